#include "guttnmf/matrix.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace guttnmf {

namespace {

void check_all_finite(const std::vector<double>& data) {
    for (double v : data) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("matrix entry is not finite");
        }
    }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("matrix dimensions must be positive");
    }
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("matrix dimensions must be positive");
    }
    if (data_.size() != rows * cols) {
        throw std::invalid_argument("matrix data length does not match shape");
    }
    check_all_finite(data_);
}

DenseMatrix DenseMatrix::nonnegative(std::size_t rows, std::size_t cols,
                                     std::vector<double> data) {
    DenseMatrix m(rows, cols, std::move(data));
    if (!m.is_nonnegative()) {
        throw std::invalid_argument("matrix has a negative entry");
    }
    return m;
}

bool DenseMatrix::is_nonnegative() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return v >= 0.0; });
}

double DenseMatrix::min() const {
    if (data_.empty()) throw std::logic_error("min of empty matrix");
    return *std::min_element(data_.begin(), data_.end());
}

double DenseMatrix::max() const {
    if (data_.empty()) throw std::logic_error("max of empty matrix");
    return *std::max_element(data_.begin(), data_.end());
}

double DenseMatrix::sum() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s;
}

std::string DenseMatrix::shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix transpose(const DenseMatrix& a) {
    std::vector<double> out(a.rows() * a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out[j * a.rows() + i] = a(i, j);
        }
    }
    return DenseMatrix(a.cols(), a.rows(), std::move(out));
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul shape mismatch: " + a.shape_str() +
                                    " * " + b.shape_str());
    }
    const std::size_t m = a.rows();
    const std::size_t k = a.cols();
    const std::size_t n = b.cols();
    std::vector<double> out(m * n, 0.0);
    const double* ap = a.data().data();
    const double* bp = b.data().data();
    for (std::size_t i = 0; i < m; ++i) {
        double* row = out.data() + i * n;
        for (std::size_t l = 0; l < k; ++l) {
            const double ail = ap[i * k + l];
            if (ail == 0.0) continue;
            const double* brow = bp + l * n;
            for (std::size_t j = 0; j < n; ++j) {
                row[j] += ail * brow[j];
            }
        }
    }
    return DenseMatrix(m, n, std::move(out));
}

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("hadamard shape mismatch: " +
                                    a.shape_str() + " vs " + b.shape_str());
    }
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = a.data()[i] * b.data()[i];
    }
    return DenseMatrix(a.rows(), a.cols(), std::move(out));
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("subtract shape mismatch: " +
                                    a.shape_str() + " vs " + b.shape_str());
    }
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = a.data()[i] - b.data()[i];
    }
    return DenseMatrix(a.rows(), a.cols(), std::move(out));
}

double frobenius_sq(const DenseMatrix& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return s;
}

double frobenius_norm(const DenseMatrix& a) { return std::sqrt(frobenius_sq(a)); }

DenseMatrix pseudoinverse(const DenseMatrix& a) {
    Eigen::MatrixXd e(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                a(i, j);
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        e, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw std::runtime_error("SVD failed to converge for " + a.shape_str() +
                                 " matrix");
    }
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? 1e-10 * sv(0) : 0.0;
    Eigen::VectorXd inv_sv(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        inv_sv(i) = sv(i) > cutoff ? 1.0 / sv(i) : 0.0;
    }
    Eigen::MatrixXd pinv =
        svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.cols(); ++i) {
        for (std::size_t j = 0; j < a.rows(); ++j) {
            out[i * a.rows() + j] =
                pinv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return DenseMatrix(a.cols(), a.rows(), std::move(out));
}

namespace {

double parse_double(std::string_view token, const std::string& path,
                    std::size_t line_no) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    while (last != first && (*(last - 1) == ' ' || *(last - 1) == '\t')) --last;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || first == last) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": cannot parse number '" +
                                 std::string(token) + "'");
    }
    return value;
}

}  // namespace

DenseMatrix load_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::vector<double> data;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t row_cols = 0;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            std::string_view token(line.data() + start,
                                   (comma == std::string::npos ? line.size()
                                                               : comma) -
                                       start);
            data.push_back(parse_double(token, path, line_no));
            ++row_cols;
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (rows == 0) {
            cols = row_cols;
        } else if (row_cols != cols) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(cols) +
                                     " columns, got " +
                                     std::to_string(row_cols));
        }
        ++rows;
    }
    if (rows == 0) {
        throw std::runtime_error(path + ": empty matrix file");
    }
    try {
        return DenseMatrix(rows, cols, std::move(data));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void format_double(double v, std::string& out) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) {
        throw std::runtime_error("failed to format number");
    }
    out.append(buf, ptr);
}

void save_matrix_csv(const DenseMatrix& m, const std::string& path) {
    std::string out;
    out.reserve(m.size() * 8);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j > 0) out.push_back(',');
            format_double(m(i, j), out);
        }
        out.push_back('\n');
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + path);
    }
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) {
        throw std::runtime_error("write failed for " + path);
    }
}

}  // namespace guttnmf
