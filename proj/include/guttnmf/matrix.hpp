#ifndef GUTTNMF_MATRIX_HPP
#define GUTTNMF_MATRIX_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace guttnmf {

/// Dense row-major matrix of doubles. Values are validated at construction:
/// every stored entry is finite, so downstream kernels never see NaN/Inf.
/// Matrices are treated as immutable values once built; sharing a const
/// reference across threads is safe.
class DenseMatrix {
public:
    DenseMatrix() = default;

    /// Zero matrix of the given shape. Both dimensions must be positive.
    DenseMatrix(std::size_t rows, std::size_t cols);

    /// Takes ownership of row-major data; throws std::invalid_argument if
    /// the length is not rows*cols or any entry is non-finite.
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    /// Checked variant for matrices required to be entry-wise >= 0.
    static DenseMatrix nonnegative(std::size_t rows, std::size_t cols,
                                   std::vector<double> data);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double operator()(std::size_t i, std::size_t j) const {
        return data_[i * cols_ + j];
    }
    double& operator()(std::size_t i, std::size_t j) {
        return data_[i * cols_ + j];
    }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    bool is_nonnegative() const;
    double min() const;
    double max() const;
    double sum() const;

    /// "rows x cols", used in error messages.
    std::string shape_str() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Identity matrix of order n.
DenseMatrix identity(std::size_t n);

DenseMatrix transpose(const DenseMatrix& a);

/// Standard matrix product. Throws std::invalid_argument on a.cols != b.rows,
/// naming both shapes. Per-entry accumulation runs over the inner index in
/// ascending order, so results are deterministic.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// Entry-wise product; shapes must match.
DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);

/// Entry-wise difference; shapes must match.
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);

/// Sum of squared entries.
double frobenius_sq(const DenseMatrix& a);

/// Unsquared Frobenius norm, for reporting.
double frobenius_norm(const DenseMatrix& a);

/// Moore-Penrose pseudoinverse via SVD. Singular values below
/// 1e-10 * sigma_max are truncated to zero. Throws std::runtime_error if the
/// decomposition fails to converge.
DenseMatrix pseudoinverse(const DenseMatrix& a);

/// CSV I/O: one row per line, comma separated, '.' decimal, no header.
/// Values are written with shortest round-trip formatting. The loader
/// validates rectangularity and finiteness.
DenseMatrix load_matrix_csv(const std::string& path);
void save_matrix_csv(const DenseMatrix& m, const std::string& path);

/// Appends the shortest round-trip decimal form of v to out.
void format_double(double v, std::string& out);

}  // namespace guttnmf

#endif
