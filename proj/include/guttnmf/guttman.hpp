#ifndef GUTTNMF_GUTTMAN_HPP
#define GUTTNMF_GUTTMAN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "guttnmf/matrix.hpp"
#include "guttnmf/nmf.hpp"

namespace guttnmf {

struct GuttmanConfig {
    double lambda0 = 0.1;
    double lambda1 = 0.1;
    double lambda2 = 0.01;
    std::size_t k = 10;
    std::size_t max_iter = 500;
    double tol = 1e-5;
    std::uint64_t seed = 1;
    /// Iteration budget of the plain-NMF warm start.
    std::size_t warm_start_iters = 50;
};

struct GuttmanModel {
    DenseMatrix W;        // m x k
    DenseMatrix H;        // k x n
    DenseMatrix H_ideal;  // k x n binary staircase columns
    GuttmanConfig config;
    std::vector<double> objective_history;
};

/// Target topic-student matrix: column j is a staircase of
/// b = min(floor((g_j + width) / width), k) ones, width = 100/k.
/// Throws std::invalid_argument on a grade outside [0,100].
DenseMatrix build_h_ideal(const std::vector<double>& grades, std::size_t k);

/// Rescales so every H row has max 1: with D = diag(row maxima of H),
/// W <- W*D and H <- D^-1 * H, leaving the product WH unchanged. All-zero
/// rows keep scale 1; their count is returned.
std::size_t normalize_factors(DenseMatrix& W, DenseMatrix& H);

/// ||V-WH||^2 + lambda0*||W||^2 + lambda1*||H-H_ideal||^2
///           + lambda2*||H.H - H||^2, all squared Frobenius norms.
double objective(const DenseMatrix& V, const DenseMatrix& W,
                 const DenseMatrix& H, const DenseMatrix& H_ideal,
                 const GuttmanConfig& cfg);

/// w <- w * (V H^T) / (W (H H^T) + lambda0*W + eps), entry-wise.
DenseMatrix update_w(const DenseMatrix& V, const DenseMatrix& W,
                     const DenseMatrix& H, double lambda0);

/// h <- h * (W^T V + 4*lambda2*h^3 + 3*lambda2*h^2 + lambda1*h_ideal)
///        / ((W^T W) H + 6*lambda2*h^3 + (lambda1+lambda2)*h + eps),
/// cubic and quadratic terms entry-wise.
DenseMatrix update_h(const DenseMatrix& V, const DenseMatrix& W,
                     const DenseMatrix& H, const DenseMatrix& H_ideal,
                     double lambda1, double lambda2);

/// Algorithm start point: seeded random factors refined by a short plain-NMF
/// run, normalized, then clamped entry-wise to >= 1e-6. The clamp matters:
/// multiplicative updates cannot move an entry off zero, and the h-update
/// numerator vanishes with h.
Factorization guttman_warm_start(const DenseMatrix& V, const GuttmanConfig& cfg);

/// Full training loop from the standard warm start.
GuttmanModel fit_guttman(const DenseMatrix& V, const std::vector<double>& grades,
                         const GuttmanConfig& cfg);

/// Training loop from caller-supplied factors (reduction and ablation tests).
GuttmanModel fit_guttman_from(const DenseMatrix& V,
                              const std::vector<double>& grades, DenseMatrix W,
                              DenseMatrix H, const GuttmanConfig& cfg);

/// Model directory: W.csv, H.csv, H_ideal.csv, config.json,
/// history.csv (iteration,objective).
void save_model(const GuttmanModel& model, const std::string& dir);
GuttmanModel load_model(const std::string& dir);

/// config.json (de)serialization shared with the CLI; strict: unknown keys
/// rejected. Recognized keys: lambda0, lambda1, lambda2, k, max_iter, tol,
/// seed, runs, split_fraction, method.
struct RunConfig {
    GuttmanConfig guttman;
    std::size_t runs = 10;
    double split_fraction = 0.7;
    std::string method = "guttman";  // "guttman" | "nmf"
};

RunConfig parse_run_config_json(const std::string& text,
                                const std::string& origin);
RunConfig load_run_config(const std::string& path);
std::string run_config_to_json(const RunConfig& cfg);

}  // namespace guttnmf

#endif
