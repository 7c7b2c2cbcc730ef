#include "guttnmf/text.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "guttnmf/porter.hpp"

namespace guttnmf {

StopwordSet load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open stopword file " + path);
    }
    StopwordSet set;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) set.insert(line);
    }
    return set;
}

std::vector<StudentDoc> aggregate_posts(const std::vector<PostRecord>& records) {
    std::vector<StudentDoc> docs;
    std::unordered_map<std::string, std::size_t> pos;
    for (const PostRecord& r : records) {
        auto [it, inserted] = pos.try_emplace(r.student_id, docs.size());
        if (inserted) {
            docs.push_back({r.student_id, r.text});
        } else {
            StudentDoc& d = docs[it->second];
            d.text += ' ';
            d.text += r.text;
        }
    }
    return docs;
}

namespace {

/// Replaces every <...> tag with a space so adjacent words never merge.
std::string strip_html(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '<') {
            const std::size_t close = text.find('>', i + 1);
            if (close != std::string::npos) {
                out.push_back(' ');
                i = close + 1;
                continue;
            }
        }
        out.push_back(text[i]);
        ++i;
    }
    return out;
}

bool is_token_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

}  // namespace

std::vector<std::string> preprocess(const StudentDoc& doc,
                                    const StopwordSet& stopwords) {
    const std::string cleaned = strip_html(doc.text);
    std::vector<std::string> out;
    std::string token;
    auto flush = [&]() {
        if (token.size() >= 2 && !stopwords.contains(token)) {
            std::string stem = porter_stem(token);
            if (stem.size() >= 2 && !stopwords.contains(stem)) {
                out.push_back(std::move(stem));
            }
        }
        token.clear();
    };
    for (char raw : cleaned) {
        const char c = static_cast<char>(
            std::tolower(static_cast<unsigned char>(raw)));
        if (is_token_char(c)) {
            token.push_back(c);
        } else {
            flush();
        }
    }
    flush();
    return out;
}

TfidfResult build_tfidf(const std::vector<StudentDoc>& docs,
                        const StopwordSet& stopwords) {
    TfidfResult res;
    std::vector<std::vector<std::string>> token_lists;
    token_lists.reserve(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        std::vector<std::string> tokens = preprocess(docs[d], stopwords);
        if (tokens.empty()) {
            ++res.dropped_students;
            continue;
        }
        res.kept_doc_indices.push_back(d);
        res.student_ids.push_back(docs[d].student_id);
        token_lists.push_back(std::move(tokens));
    }
    if (token_lists.empty()) {
        throw std::runtime_error(
            "empty vocabulary: no tokens survive preprocessing");
    }

    for (const auto& tokens : token_lists) {
        for (const std::string& t : tokens) {
            if (res.vocab.index.try_emplace(t, res.vocab.terms.size()).second) {
                res.vocab.terms.push_back(t);
            }
        }
    }

    const std::size_t m = res.vocab.terms.size();
    const std::size_t n = token_lists.size();
    std::vector<double> counts(m * n, 0.0);
    std::vector<std::size_t> df(m, 0);
    for (std::size_t j = 0; j < n; ++j) {
        for (const std::string& t : token_lists[j]) {
            const std::size_t i = res.vocab.index.at(t);
            if (counts[i * n + j] == 0.0) ++df[i];
            counts[i * n + j] += 1.0;
        }
    }

    std::vector<double> idf(m);
    for (std::size_t i = 0; i < m; ++i) {
        idf[i] = std::log((1.0 + double(n)) / (1.0 + double(df[i]))) + 1.0;
    }

    double max_entry = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double doc_len = double(token_lists[j].size());
        for (std::size_t i = 0; i < m; ++i) {
            double& v = counts[i * n + j];
            v = (v / doc_len) * idf[i];
            if (v > max_entry) max_entry = v;
        }
    }
    if (max_entry > 0.0) {
        for (double& v : counts) v /= max_entry;
    }
    res.V = DenseMatrix::nonnegative(m, n, std::move(counts));
    return res;
}

PostsFile read_posts_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open posts file " + path);
    }
    PostsFile res;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object() ||
            !obj.contains("student_id") || !obj["student_id"].is_string() ||
            !obj.contains("text") || !obj["text"].is_string()) {
            ++res.skipped;
            continue;
        }
        res.records.push_back({obj["student_id"].get<std::string>(),
                               obj["text"].get<std::string>()});
    }
    return res;
}

GradeFile read_grades_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open grade file " + path);
    }
    GradeFile res;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != "student_id,grade") {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": expected header 'student_id,grade'");
            }
            header_seen = true;
            continue;
        }
        const std::size_t comma = line.rfind(',');
        if (comma == std::string::npos || comma == 0) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 'student_id,grade'");
        }
        const std::string id = line.substr(0, comma);
        double grade = 0.0;
        const char* first = line.data() + comma + 1;
        const char* last = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(first, last, grade);
        if (ec != std::errc() || ptr != last || first == last) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": cannot parse grade '" +
                                     std::string(first, last) + "'");
        }
        if (!(grade >= 0.0 && grade <= 100.0)) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": grade out of [0,100]");
        }
        res.by_student[id] = grade;
    }
    if (!header_seen) {
        throw std::runtime_error(path + ": empty grade file");
    }
    return res;
}

std::vector<double> align_grades(const std::vector<std::string>& student_ids,
                                 const GradeFile& grades,
                                 std::size_t* missing) {
    std::vector<double> out;
    out.reserve(student_ids.size());
    std::size_t absent = 0;
    for (const std::string& id : student_ids) {
        auto it = grades.by_student.find(id);
        if (it == grades.by_student.end()) {
            ++absent;
            out.push_back(0.0);
        } else {
            out.push_back(it->second);
        }
    }
    if (missing) *missing = absent;
    return out;
}

}  // namespace guttnmf
