#ifndef GUTTNMF_SCALE_HPP
#define GUTTNMF_SCALE_HPP

#include <string>
#include <vector>

#include "guttnmf/matrix.hpp"

namespace guttnmf {

/// Guttman scalogram scoring of a binary k x n response matrix
/// (rows = items/topics, columns = students).
struct ScaleReport {
    DenseMatrix binary_h;
    /// Chosen threshold from {0.1,...,0.9}; 0.1 by convention for degenerate
    /// (constant) inputs, where thresholding is vacuous.
    double threshold = 0.1;
    /// Rows sorted by popularity: row sum descending, ties by original index.
    std::vector<std::size_t> item_order;
    std::size_t errors = 0;
    std::size_t total_responses = 0;
    double cr = 1.0;
    bool degenerate = false;
};

/// Counts Guttman errors: each student with total score s is predicted to
/// endorse exactly the s most popular items; errors are the mismatches.
/// cr = 1 - errors / (k*n). Throws std::invalid_argument on non-binary input.
ScaleReport coefficient_of_reproducibility(const DenseMatrix& B);

struct BinarizeResult {
    /// Binary matrix for each threshold 0.1, 0.2, ..., 0.9, in order.
    std::vector<DenseMatrix> per_threshold;
    /// Report with maximal CR; ties broken toward the smallest threshold.
    ScaleReport best;
};

/// Rescales H to [0,1] by (h - min)/(max - min), thresholds at each t in
/// {0.1,...,0.9} (entry >= t maps to 1) and scores each candidate. A constant
/// H cannot be rescaled; it maps to all-ones (positive constant) or all-zeros
/// and the report is flagged degenerate.
BinarizeResult binarize(const DenseMatrix& H);

/// Conventional acceptance: CR at least 0.90.
bool accept_scale(const ScaleReport& report);

/// {threshold, errors, total_responses, cr, item_order, degenerate}.
std::string scale_report_json(const ScaleReport& report);

}  // namespace guttnmf

#endif
