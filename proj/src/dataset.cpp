#include "guttnmf/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "guttnmf/text.hpp"

namespace guttnmf {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

void write_lines(const std::vector<std::string>& lines,
                 const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    for (const std::string& l : lines) out << l << '\n';
    if (!out) {
        throw std::runtime_error("write failed for " + path);
    }
}

void write_grades_csv(const std::vector<std::string>& ids,
                      const std::vector<double>& grades,
                      const std::string& path) {
    if (ids.size() != grades.size()) {
        throw std::invalid_argument("id/grade count mismatch");
    }
    std::string out = "student_id,grade\n";
    for (std::size_t j = 0; j < ids.size(); ++j) {
        out += ids[j];
        out.push_back(',');
        format_double(grades[j], out);
        out.push_back('\n');
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + path);
    }
    f << out;
}

void write_dataset(const Dataset& ds, const std::string& dir) {
    if (ds.V.rows() != ds.vocab.size()) {
        throw std::invalid_argument("vocab size does not match V rows");
    }
    if (ds.V.cols() != ds.students.size() ||
        ds.students.size() != ds.grades.size()) {
        throw std::invalid_argument("student/grade count does not match V cols");
    }
    std::filesystem::create_directories(dir);
    save_matrix_csv(ds.V, dir + "/V.csv");
    write_lines(ds.vocab, dir + "/vocab.txt");
    write_lines(ds.students, dir + "/students.txt");
    write_grades_csv(ds.students, ds.grades, dir + "/grades.csv");
}

Dataset load_dataset(const std::string& dir) {
    Dataset ds;
    ds.V = load_matrix_csv(dir + "/V.csv");
    ds.vocab = read_lines(dir + "/vocab.txt");
    ds.students = read_lines(dir + "/students.txt");
    if (ds.vocab.size() != ds.V.rows()) {
        throw std::runtime_error(dir + "/vocab.txt: " +
                                 std::to_string(ds.vocab.size()) +
                                 " terms but V has " +
                                 std::to_string(ds.V.rows()) + " rows");
    }
    if (ds.students.size() != ds.V.cols()) {
        throw std::runtime_error(dir + "/students.txt: " +
                                 std::to_string(ds.students.size()) +
                                 " ids but V has " +
                                 std::to_string(ds.V.cols()) + " columns");
    }
    GradeFile gf = read_grades_csv(dir + "/grades.csv");
    std::size_t missing = 0;
    ds.grades = align_grades(ds.students, gf, &missing);
    if (missing > 0) {
        throw std::runtime_error(dir + "/grades.csv: " +
                                 std::to_string(missing) +
                                 " students have no grade entry");
    }
    return ds;
}

}  // namespace guttnmf
