#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "guttnmf/text.hpp"
#include "helpers.hpp"

using namespace guttnmf;
using namespace guttnmf::testing;

namespace {

StopwordSet tiny_stopwords() {
    return StopwordSet{"the", "a", "and", "is", "do", "very"};
}

std::vector<StudentDoc> docs_from(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
    std::vector<StudentDoc> docs;
    for (const auto& [id, text] : pairs) docs.push_back({id, text});
    return docs;
}

}  // namespace

TEST_CASE("aggregate_posts merges per student in first-seen order") {
    std::vector<PostRecord> records = {
        {"s2", "beta"}, {"s1", "alpha"}, {"s2", "gamma"}, {"s3", ""},
        {"s1", "delta"},
    };
    auto docs = aggregate_posts(records);
    REQUIRE(docs.size() == 3);
    CHECK(docs[0].student_id == "s2");
    CHECK(docs[0].text == "beta gamma");
    CHECK(docs[1].student_id == "s1");
    CHECK(docs[1].text == "alpha delta");
    CHECK(docs[2].student_id == "s3");
    CHECK(docs[2].text == "");

    SUBCASE("agrees with a map-based oracle on random records") {
        Rng rng(61);
        std::vector<PostRecord> rand_records;
        for (int i = 0; i < 200; ++i) {
            rand_records.push_back({"u" + std::to_string(rng.index(12)),
                                    "w" + std::to_string(i)});
        }
        auto got = aggregate_posts(rand_records);
        std::map<std::string, std::string> oracle;
        for (const auto& r : rand_records) {
            auto [it, fresh] = oracle.try_emplace(r.student_id, r.text);
            if (!fresh) {
                it->second += " ";
                it->second += r.text;
            }
        }
        REQUIRE(got.size() == oracle.size());
        std::set<std::string> seen;
        for (const auto& d : got) {
            CHECK(oracle.at(d.student_id) == d.text);
            CHECK(seen.insert(d.student_id).second);
        }
    }
}

TEST_CASE("preprocess pipeline") {
    const StopwordSet sw = tiny_stopwords();

    SUBCASE("strips tags, lowercases, stems") {
        auto tokens = preprocess({"s1", "<p>Running quickly</p>"}, sw);
        REQUIRE(tokens.size() == 2);
        CHECK(tokens[0] == "run");
        CHECK(tokens[1] == "quickli");
    }

    SUBCASE("stopwords and short tokens are dropped") {
        auto tokens = preprocess({"s1", "The cat IS a cat I"}, sw);
        REQUIRE(tokens.size() == 2);
        CHECK(tokens[0] == "cat");
        CHECK(tokens[1] == "cat");
    }

    SUBCASE("empty and stopword-only text yield nothing") {
        CHECK(preprocess({"s1", ""}, sw).empty());
        CHECK(preprocess({"s1", "the and is"}, sw).empty());
        CHECK(preprocess({"s1", "<div><br/></div>"}, sw).empty());
    }

    SUBCASE("token whose stem is a stopword is dropped") {
        auto tokens = preprocess({"s1", "doing fine"}, sw);
        REQUIRE(tokens.size() == 1);
        CHECK(tokens[0] == "fine");
    }

    SUBCASE("numbers and mixed tokens survive tokenization") {
        auto tokens = preprocess({"s1", "week2 problem 42"}, sw);
        REQUIRE(tokens.size() == 3);
        CHECK(tokens[0] == "week2");
        CHECK(tokens[1] == "problem");
        CHECK(tokens[2] == "42");
    }

    SUBCASE("a second pass removes no tokens") {
        // Stems may re-stem (agreed -> agre -> agr), so only the count is
        // stable; no survivor may turn into a stopword or shrink below the
        // length floor.
        Rng rng(67);
        const std::vector<std::string> base = {
            "running", "quickly", "the",      "analysis", "gradients",
            "doing",   "very",    "hopeful",  "a",        "studies",
            "week2",   "i",       "troubled", "agreed",   "generalizations"};
        for (int trial = 0; trial < 30; ++trial) {
            std::string text;
            for (int w = 0; w < 12; ++w) {
                text += base[rng.index(base.size())];
                text += ' ';
            }
            auto first = preprocess({"s", text}, sw);
            std::string joined;
            for (const auto& t : first) {
                joined += t;
                joined += ' ';
            }
            auto second = preprocess({"s", joined}, sw);
            CHECK(second.size() == first.size());
        }
    }
}

TEST_CASE("load_stopwords reads the shipped file") {
    StopwordSet sw = load_stopwords(GUTTNMF_STOPWORDS_PATH);
    CHECK(sw.size() > 50);
    CHECK(sw.count("the") == 1);
    CHECK(sw.count("and") == 1);
    CHECK(sw.count("gradient") == 0);
}

TEST_CASE("build_tfidf") {
    const StopwordSet sw = tiny_stopwords();

    SUBCASE("single-document hand computation") {
        auto r = build_tfidf(docs_from({{"s1", "xx xx yy"}}), sw);
        REQUIRE(r.V.rows() == 2);
        REQUIRE(r.V.cols() == 1);
        REQUIRE(r.vocab.terms.size() == 2);
        CHECK(r.vocab.terms[0] == "xx");
        CHECK(r.vocab.terms[1] == "yy");
        // Both idfs are ln(2/2)+1 = 1; tf 2/3 and 1/3, so the rescaled
        // column is (1, 0.5).
        CHECK(r.V(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(r.V(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
    }

    SUBCASE("three-document brute-force oracle") {
        auto docs = docs_from({{"s1", "xx xx yy zz"},
                               {"s2", "yy yy yy ww"},
                               {"s3", "xx ww ww ww ww"}});
        auto r = build_tfidf(docs, sw);
        REQUIRE(r.V.cols() == 3);

        std::vector<std::vector<std::string>> toks;
        for (const auto& d : docs) toks.push_back(preprocess(d, sw));
        std::map<std::string, std::size_t> df;
        for (const auto& t : toks) {
            std::set<std::string> uniq(t.begin(), t.end());
            for (const auto& w : uniq) df[w]++;
        }
        const double n = double(docs.size());
        double expected_max = 0.0;
        std::vector<std::vector<double>> raw(r.vocab.size(),
                                             std::vector<double>(3, 0.0));
        for (std::size_t j = 0; j < toks.size(); ++j) {
            std::map<std::string, std::size_t> counts;
            for (const auto& w : toks[j]) counts[w]++;
            for (const auto& [w, c] : counts) {
                const double tf = double(c) / double(toks[j].size());
                const double idf = std::log((1.0 + n) / (1.0 + df[w])) + 1.0;
                raw[r.vocab.index.at(w)][j] = tf * idf;
                expected_max = std::max(expected_max, tf * idf);
            }
        }
        for (std::size_t i = 0; i < r.V.rows(); ++i) {
            for (std::size_t j = 0; j < r.V.cols(); ++j) {
                CHECK(r.V(i, j) ==
                      doctest::Approx(raw[i][j] / expected_max).epsilon(1e-12));
            }
        }
        CHECK(r.V.max() == 1.0);
        CHECK(r.V.is_nonnegative());
    }

    SUBCASE("vocabulary is first-seen ordered and indexed") {
        auto r = build_tfidf(
            docs_from({{"s1", "cc aa"}, {"s2", "bb aa dd"}}), sw);
        REQUIRE(r.vocab.terms.size() == 4);
        CHECK(r.vocab.terms[0] == "cc");
        CHECK(r.vocab.terms[1] == "aa");
        CHECK(r.vocab.terms[2] == "bb");
        CHECK(r.vocab.terms[3] == "dd");
        for (std::size_t i = 0; i < r.vocab.terms.size(); ++i) {
            CHECK(r.vocab.index.at(r.vocab.terms[i]) == i);
        }
    }

    SUBCASE("token-free students are dropped and counted") {
        auto r = build_tfidf(docs_from({{"s1", "alpha beta"},
                                        {"s2", "the and"},
                                        {"s3", "gamma"}}),
                             sw);
        CHECK(r.dropped_students == 1);
        REQUIRE(r.student_ids.size() == 2);
        CHECK(r.student_ids[0] == "s1");
        CHECK(r.student_ids[1] == "s3");
        REQUIRE(r.kept_doc_indices.size() == 2);
        CHECK(r.kept_doc_indices[0] == 0);
        CHECK(r.kept_doc_indices[1] == 2);
    }

    SUBCASE("fully empty corpus throws") {
        CHECK_THROWS_AS(
            (void)build_tfidf(docs_from({{"s1", "the"}, {"s2", "and is"}}), sw),
            std::runtime_error);
    }
}

TEST_CASE("read_posts_jsonl") {
    TempDir tmp;
    const std::string path = tmp.file("posts.jsonl");

    SUBCASE("well-formed lines with extra fields") {
        write_file(path,
                   R"({"student_id":"s1","text":"hello world"})"
                   "\n"
                   R"({"student_id":"s2","text":"tags <b>bold</b>","week":3})"
                   "\n");
        auto posts = read_posts_jsonl(path);
        CHECK(posts.skipped == 0);
        REQUIRE(posts.records.size() == 2);
        CHECK(posts.records[0].student_id == "s1");
        CHECK(posts.records[0].text == "hello world");
        CHECK(posts.records[1].text == "tags <b>bold</b>");
    }

    SUBCASE("malformed lines are counted and skipped") {
        write_file(path,
                   R"({"student_id":"s1","text":"ok"})"
                   "\n"
                   "not json at all\n"
                   R"({"student_id":"s2"})"
                   "\n"
                   R"({"student_id":7,"text":"wrong type"})"
                   "\n"
                   R"({"text":"missing id"})"
                   "\n"
                   "\n"
                   R"({"student_id":"s3","text":"also ok"})"
                   "\n");
        auto posts = read_posts_jsonl(path);
        REQUIRE(posts.records.size() == 2);
        CHECK(posts.records[0].student_id == "s1");
        CHECK(posts.records[1].student_id == "s3");
        CHECK(posts.skipped == 4);
    }

    SUBCASE("missing file throws") {
        CHECK_THROWS_AS((void)read_posts_jsonl(tmp.file("absent.jsonl")),
                        std::runtime_error);
    }
}

TEST_CASE("read_grades_csv and align_grades") {
    TempDir tmp;
    const std::string path = tmp.file("grades.csv");

    SUBCASE("valid file") {
        write_file(path, "student_id,grade\ns1,85\ns2,0\ns3,100\n");
        auto g = read_grades_csv(path);
        REQUIRE(g.by_student.size() == 3);
        CHECK(g.by_student.at("s1") == 85.0);
        CHECK(g.by_student.at("s2") == 0.0);
        CHECK(g.by_student.at("s3") == 100.0);
    }

    SUBCASE("wrong header") {
        write_file(path, "id,score\ns1,85\n");
        std::string msg = thrown_message<std::runtime_error>(
            [&] { (void)read_grades_csv(path); });
        CHECK(msg.find(":1") != std::string::npos);
    }

    SUBCASE("bad number carries its line number") {
        write_file(path, "student_id,grade\ns1,85\ns2,eighty\n");
        std::string msg = thrown_message<std::runtime_error>(
            [&] { (void)read_grades_csv(path); });
        CHECK(msg.find(":3") != std::string::npos);
    }

    SUBCASE("out-of-range grade rejected") {
        write_file(path, "student_id,grade\ns1,101\n");
        CHECK_THROWS_AS((void)read_grades_csv(path), std::runtime_error);
        write_file(path, "student_id,grade\ns1,-1\n");
        CHECK_THROWS_AS((void)read_grades_csv(path), std::runtime_error);
    }

    SUBCASE("header-only file parses to zero entries") {
        write_file(path, "student_id,grade\n");
        CHECK(read_grades_csv(path).by_student.empty());
    }

    SUBCASE("file without a header rejected") {
        write_file(path, "");
        CHECK_THROWS_AS((void)read_grades_csv(path), std::runtime_error);
    }

    SUBCASE("alignment fills missing students with zero") {
        write_file(path, "student_id,grade\ns1,40\ns3,90\n");
        auto g = read_grades_csv(path);
        std::size_t missing = 0;
        auto aligned = align_grades({"s1", "s2", "s3"}, g, &missing);
        REQUIRE(aligned.size() == 3);
        CHECK(aligned[0] == 40.0);
        CHECK(aligned[1] == 0.0);
        CHECK(aligned[2] == 90.0);
        CHECK(missing == 1);
    }
}
