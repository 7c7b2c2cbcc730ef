#ifndef GUTTNMF_EVAL_HPP
#define GUTTNMF_EVAL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "guttnmf/guttman.hpp"
#include "guttnmf/matrix.hpp"

namespace guttnmf {

struct Split {
    std::vector<std::size_t> train_cols;  // ascending
    std::vector<std::size_t> test_cols;   // ascending
    double fraction = 0.7;
    std::uint64_t seed = 0;
};

/// Uniform random partition of {0..n-1}, deterministic per seed; the train
/// side gets round(n*fraction) students, clamped so both sides are nonempty.
/// Throws std::invalid_argument for n < 2 or fraction outside (0,1).
Split split_students(std::size_t n, double fraction, std::uint64_t seed);

/// New matrix made of the given columns, in the given order.
DenseMatrix select_columns(const DenseMatrix& m,
                           const std::vector<std::size_t>& cols);

template <typename T>
std::vector<T> select_indices(const std::vector<T>& v,
                              const std::vector<std::size_t>& idx) {
    std::vector<T> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(v[i]);
    return out;
}

/// Held-out inference: H_test = H_train * pinv(V_train) * V_test.
/// May contain negatives; downstream binarization rescales.
DenseMatrix infer_test_h(const DenseMatrix& H_train, const DenseMatrix& V_train,
                         const DenseMatrix& V_test);

struct Curve {
    std::string kind;  // "roc" | "pr"
    std::vector<std::pair<double, double>> points;
    double auc = 0.0;
    bool degenerate = false;
};

struct RocPr {
    Curve roc;
    Curve pr;
};

/// Flattens both matrices and sweeps every distinct score as a threshold.
/// ROC-AUC by trapezoid (equals the normalized Mann-Whitney statistic, ties
/// counted half); PR-AUC is average precision. Truth must be binary; a
/// single-class truth yields a degenerate result with auc 0 and the flag set.
RocPr roc_pr(const DenseMatrix& scores, const DenseMatrix& truth);

struct Stats {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation; 0 for fewer than 2 values
};

Stats mean_sd(const std::vector<double>& values);

struct SweepRow {
    std::string param;
    double value = 0.0;
    Stats cr;
    Stats recon;  // unsquared ||V - WH||
    bool failed = false;
    std::string error;
};

/// For each value, trains NMF-Guttman over base.runs seeds (seed + run index)
/// with the named parameter (lambda0|lambda1|lambda2|k) overridden, scoring
/// CR of the binarized H and the unsquared reconstruction norm. Training
/// errors mark the row failed and the sweep continues.
std::vector<SweepRow> sweep(const std::string& param,
                            const std::vector<double>& values,
                            const RunConfig& base, const DenseMatrix& V,
                            const std::vector<double>& grades,
                            std::size_t jobs);

/// Aggregated run summary; optional fields appear in the JSON only when set.
struct Report {
    Stats cr;
    Stats recon;
    std::optional<double> roc_auc_mean;
    std::optional<double> pr_auc_mean;
    bool accepted = false;
    std::string method;
    std::size_t runs = 0;
    std::optional<std::string> ground_truth;
};

/// {cr_mean, cr_sd, recon_mean, recon_sd, roc_auc_mean, pr_auc_mean,
///  accepted, ...} plus a generated_at timestamp.
std::string report_json(const Report& r);

/// kind,x,y,run rows, one block per run.
void write_curves_csv(const std::vector<RocPr>& runs, const std::string& path);

/// param,value,cr_mean,cr_sd,recon_mean,recon_sd rows.
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

}  // namespace guttnmf

#endif
