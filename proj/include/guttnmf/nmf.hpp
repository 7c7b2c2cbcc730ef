#ifndef GUTTNMF_NMF_HPP
#define GUTTNMF_NMF_HPP

#include <cstdint>
#include <vector>

#include "guttnmf/matrix.hpp"

namespace guttnmf {

/// Guard added to every multiplicative-update denominator.
inline constexpr double kDenomEps = 1e-12;

struct NmfConfig {
    std::size_t k = 10;
    std::size_t max_iter = 500;
    double tol = 1e-5;
    std::uint64_t seed = 1;
};

struct Factorization {
    DenseMatrix W;  // m x k, >= 0
    DenseMatrix H;  // k x n, >= 0
    /// objective_history[t] = ||V - WH||^2 after t update sweeps; entry 0 is
    /// the initial value. Non-increasing within 1e-9 per step.
    std::vector<double> objective_history;
};

/// Throws std::invalid_argument unless V is non-negative, nonzero, and the
/// config satisfies k >= 1, k <= min(m,n), tol > 0, max_iter >= 1.
void validate_nmf_input(const DenseMatrix& V, const NmfConfig& cfg);

/// W, H filled i.i.d. uniform on (0,1] scaled by sqrt(mean(V)/k); strictly
/// positive, deterministic per seed.
Factorization init_factors(const DenseMatrix& V, const NmfConfig& cfg);

/// One Lee-Seung sweep half: W <- W . (V H^T) / (W (H H^T) + eps).
DenseMatrix nmf_update_w(const DenseMatrix& V, const DenseMatrix& W,
                         const DenseMatrix& H);

/// H <- H . (W^T V) / ((W^T W) H + eps).
DenseMatrix nmf_update_h(const DenseMatrix& V, const DenseMatrix& W,
                         const DenseMatrix& H);

/// Multiplicative-update NMF from seeded random factors. Stops when the
/// relative objective change drops below cfg.tol or after cfg.max_iter
/// sweeps. Each sweep updates W from the current H, then H from the new W.
Factorization nmf_fit(const DenseMatrix& V, const NmfConfig& cfg);

/// Same loop continuing from the given factors instead of a fresh init.
Factorization nmf_fit_from(const DenseMatrix& V, DenseMatrix W, DenseMatrix H,
                           const NmfConfig& cfg);

}  // namespace guttnmf

#endif
