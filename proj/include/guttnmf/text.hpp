#ifndef GUTTNMF_TEXT_HPP
#define GUTTNMF_TEXT_HPP

#include <cstddef>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "guttnmf/matrix.hpp"

namespace guttnmf {

/// One student's aggregated forum text.
struct StudentDoc {
    std::string student_id;
    std::string text;
};

struct PostRecord {
    std::string student_id;
    std::string text;
};

/// Stemmed vocabulary; terms[i] labels row i of V.
/// Terms are unique, lowercase, stemmed, not stopwords, length >= 2.
struct Vocabulary {
    std::vector<std::string> terms;
    std::unordered_map<std::string, std::size_t> index;

    std::size_t size() const { return terms.size(); }
};

using StopwordSet = std::unordered_set<std::string>;

/// Loads a stopword file, one word per line; blank lines ignored.
StopwordSet load_stopwords(const std::string& path);

/// Collapses records into one StudentDoc per distinct student_id, texts
/// joined with a single space. First-seen order of ids; input order
/// preserved within a student.
std::vector<StudentDoc> aggregate_posts(const std::vector<PostRecord>& records);

/// HTML tags stripped, lowercased, tokenized on non-alphanumeric boundaries,
/// short tokens and stopwords dropped, survivors Porter-stemmed. Tokens whose
/// stem is shorter than 2 characters or is itself a stopword are dropped too,
/// so a second pass over the output removes nothing.
std::vector<std::string> preprocess(const StudentDoc& doc,
                                    const StopwordSet& stopwords);

struct TfidfResult {
    DenseMatrix V;
    Vocabulary vocab;
    /// Column j of V belongs to student_ids[j]; students whose text yields no
    /// tokens are dropped, counted in dropped_students.
    std::vector<std::string> student_ids;
    std::vector<std::size_t> kept_doc_indices;
    std::size_t dropped_students = 0;
};

/// Builds the word-student matrix. Entry (i,j) = tf(i,j) * idf(i), with
/// tf = term count / doc token count and idf = ln((1+n)/(1+df)) + 1, rescaled
/// by the global maximum so all entries lie in [0,1] and the max is exactly 1.
/// Throws std::runtime_error when no tokens survive preprocessing.
TfidfResult build_tfidf(const std::vector<StudentDoc>& docs,
                        const StopwordSet& stopwords);

struct PostsFile {
    std::vector<PostRecord> records;
    std::size_t skipped = 0;  // malformed lines (missing field / bad JSON)
};

/// JSON Lines reader: one object per line with "student_id" and "text"
/// string fields; unknown fields ignored, malformed lines skipped and
/// counted.
PostsFile read_posts_jsonl(const std::string& path);

struct GradeFile {
    std::unordered_map<std::string, double> by_student;
};

/// CSV with header student_id,grade; grades validated into [0,100].
/// Format errors are reported with line numbers.
GradeFile read_grades_csv(const std::string& path);

/// Grades aligned to the given student order; students missing from the
/// grade file get grade 0 and are counted in *missing if provided.
std::vector<double> align_grades(const std::vector<std::string>& student_ids,
                                 const GradeFile& grades,
                                 std::size_t* missing = nullptr);

}  // namespace guttnmf

#endif
