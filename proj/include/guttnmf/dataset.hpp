#ifndef GUTTNMF_DATASET_HPP
#define GUTTNMF_DATASET_HPP

#include <string>
#include <vector>

#include "guttnmf/matrix.hpp"

namespace guttnmf {

/// On-disk dataset directory: V.csv (m x n word-student matrix), vocab.txt
/// (m lines, row order), students.txt (n lines, column order), grades.csv
/// (header student_id,grade; aligned to students.txt).
struct Dataset {
    DenseMatrix V;
    std::vector<std::string> vocab;
    std::vector<std::string> students;
    std::vector<double> grades;
};

void write_dataset(const Dataset& ds, const std::string& dir);

/// Loads and cross-validates the directory; throws std::runtime_error naming
/// the offending file.
Dataset load_dataset(const std::string& dir);

/// One entry per line.
std::vector<std::string> read_lines(const std::string& path);
void write_lines(const std::vector<std::string>& lines, const std::string& path);

/// grades.csv with header, aligned to the id order given.
void write_grades_csv(const std::vector<std::string>& ids,
                      const std::vector<double>& grades,
                      const std::string& path);

}  // namespace guttnmf

#endif
