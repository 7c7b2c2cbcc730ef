#include "guttnmf/nmf.hpp"

#include <cmath>
#include <stdexcept>

#include "guttnmf/rng.hpp"

namespace guttnmf {

void validate_nmf_input(const DenseMatrix& V, const NmfConfig& cfg) {
    if (!V.is_nonnegative()) {
        throw std::invalid_argument("V has a negative entry");
    }
    if (V.sum() == 0.0) {
        throw std::invalid_argument("V is all zeros");
    }
    if (cfg.k == 0) {
        throw std::invalid_argument("k must be positive");
    }
    if (cfg.k > V.rows() || cfg.k > V.cols()) {
        throw std::invalid_argument("k exceeds min(" + V.shape_str() + ")");
    }
    if (!(cfg.tol > 0.0)) {
        throw std::invalid_argument("tol must be > 0");
    }
    if (cfg.max_iter == 0) {
        throw std::invalid_argument("max_iter must be >= 1");
    }
}

Factorization init_factors(const DenseMatrix& V, const NmfConfig& cfg) {
    validate_nmf_input(V, cfg);
    const double mean = V.sum() / double(V.size());
    const double scale = std::sqrt(mean / double(cfg.k));
    Rng rng(cfg.seed);
    const std::size_t m = V.rows();
    const std::size_t n = V.cols();
    std::vector<double> w(m * cfg.k);
    for (double& v : w) v = scale * rng.uniform_pos();
    std::vector<double> h(cfg.k * n);
    for (double& v : h) v = scale * rng.uniform_pos();
    Factorization f;
    f.W = DenseMatrix(m, cfg.k, std::move(w));
    f.H = DenseMatrix(cfg.k, n, std::move(h));
    return f;
}

DenseMatrix nmf_update_w(const DenseMatrix& V, const DenseMatrix& W,
                         const DenseMatrix& H) {
    const DenseMatrix vh = matmul(V, transpose(H));
    const DenseMatrix whh = matmul(W, matmul(H, transpose(H)));
    DenseMatrix out(W.rows(), W.cols());
    for (std::size_t i = 0; i < W.rows(); ++i) {
        for (std::size_t j = 0; j < W.cols(); ++j) {
            const double den = whh(i, j) + kDenomEps;
            out(i, j) = W(i, j) * vh(i, j) / den;
        }
    }
    return out;
}

DenseMatrix nmf_update_h(const DenseMatrix& V, const DenseMatrix& W,
                         const DenseMatrix& H) {
    const DenseMatrix wt = transpose(W);
    const DenseMatrix wv = matmul(wt, V);
    const DenseMatrix wwh = matmul(matmul(wt, W), H);
    DenseMatrix out(H.rows(), H.cols());
    for (std::size_t i = 0; i < H.rows(); ++i) {
        for (std::size_t j = 0; j < H.cols(); ++j) {
            const double den = wwh(i, j) + kDenomEps;
            out(i, j) = H(i, j) * wv(i, j) / den;
        }
    }
    return out;
}

namespace {

double nmf_objective(const DenseMatrix& V, const DenseMatrix& W,
                     const DenseMatrix& H) {
    return frobenius_sq(subtract(V, matmul(W, H)));
}

}  // namespace

Factorization nmf_fit_from(const DenseMatrix& V, DenseMatrix W, DenseMatrix H,
                           const NmfConfig& cfg) {
    validate_nmf_input(V, cfg);
    Factorization f;
    f.W = std::move(W);
    f.H = std::move(H);
    double obj = nmf_objective(V, f.W, f.H);
    f.objective_history.push_back(obj);
    for (std::size_t it = 0; it < cfg.max_iter; ++it) {
        f.W = nmf_update_w(V, f.W, f.H);
        f.H = nmf_update_h(V, f.W, f.H);
        const double next = nmf_objective(V, f.W, f.H);
        f.objective_history.push_back(next);
        if (!std::isfinite(next)) {
            throw std::runtime_error("objective not finite at iteration " +
                                     std::to_string(it + 1));
        }
        const double rel = std::abs(obj - next) / std::max(obj, 1e-30);
        obj = next;
        if (rel < cfg.tol) break;
    }
    return f;
}

Factorization nmf_fit(const DenseMatrix& V, const NmfConfig& cfg) {
    Factorization init = init_factors(V, cfg);
    return nmf_fit_from(V, std::move(init.W), std::move(init.H), cfg);
}

}  // namespace guttnmf
