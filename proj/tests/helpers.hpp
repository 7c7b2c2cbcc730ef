#ifndef GUTTNMF_TESTS_HELPERS_HPP
#define GUTTNMF_TESTS_HELPERS_HPP

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "guttnmf/matrix.hpp"
#include "guttnmf/rng.hpp"

namespace guttnmf::testing {

inline DenseMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols,
                                 double lo = 0.0, double hi = 1.0) {
    std::vector<double> data(rows * cols);
    for (double& v : data) v = rng.uniform(lo, hi);
    return DenseMatrix(rows, cols, std::move(data));
}

/// Reference product with the textbook i-j-l loop, a different accumulation
/// order than the library kernel.
inline DenseMatrix naive_matmul(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t l = 0; l < a.cols(); ++l) {
                acc += a(i, l) * b(l, j);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("max_abs_diff shape mismatch");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    }
    return worst;
}

/// Runs f, which must throw; returns the exception message.
template <typename E = std::exception, typename F>
std::string thrown_message(F&& f) {
    try {
        f();
    } catch (const E& e) {
        return e.what();
    }
    return "";
}

/// Self-cleaning unique directory under the system temp path.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("guttnmf_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

}  // namespace guttnmf::testing

#endif
