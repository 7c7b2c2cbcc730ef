#include "guttnmf/scale.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace guttnmf {

ScaleReport coefficient_of_reproducibility(const DenseMatrix& B) {
    const std::size_t k = B.rows();
    const std::size_t n = B.cols();
    for (double v : B.data()) {
        if (v != 0.0 && v != 1.0) {
            throw std::invalid_argument("matrix is not binary");
        }
    }

    std::vector<std::size_t> row_sums(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (B(i, j) == 1.0) ++row_sums[i];
        }
    }
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return row_sums[a] > row_sums[b];
                     });

    std::size_t errors = 0;
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t score = 0;
        for (std::size_t i = 0; i < k; ++i) {
            if (B(i, j) == 1.0) ++score;
        }
        for (std::size_t rank = 0; rank < k; ++rank) {
            const double predicted = rank < score ? 1.0 : 0.0;
            if (B(order[rank], j) != predicted) ++errors;
        }
    }

    ScaleReport report;
    report.binary_h = B;
    report.item_order = std::move(order);
    report.errors = errors;
    report.total_responses = k * n;
    report.cr = 1.0 - double(errors) / double(k * n);
    return report;
}

BinarizeResult binarize(const DenseMatrix& H) {
    const double lo = H.min();
    const double hi = H.max();
    BinarizeResult result;

    if (hi <= lo) {
        std::vector<double> bits(H.size(), lo > 0.0 ? 1.0 : 0.0);
        DenseMatrix constant(H.rows(), H.cols(), std::move(bits));
        result.best = coefficient_of_reproducibility(constant);
        result.best.degenerate = true;
        result.per_threshold.assign(9, result.best.binary_h);
        return result;
    }

    const double span = hi - lo;
    bool have_best = false;
    for (int step = 1; step <= 9; ++step) {
        const double t = double(step) / 10.0;
        std::vector<double> bits(H.size());
        for (std::size_t i = 0; i < H.size(); ++i) {
            bits[i] = (H.data()[i] - lo) / span >= t ? 1.0 : 0.0;
        }
        DenseMatrix candidate(H.rows(), H.cols(), std::move(bits));
        ScaleReport report = coefficient_of_reproducibility(candidate);
        report.threshold = t;
        result.per_threshold.push_back(std::move(candidate));
        if (!have_best || report.cr > result.best.cr) {
            result.best = std::move(report);
            have_best = true;
        }
    }
    return result;
}

bool accept_scale(const ScaleReport& report) { return report.cr >= 0.90; }

std::string scale_report_json(const ScaleReport& report) {
    nlohmann::json j;
    j["threshold"] = report.threshold;
    j["errors"] = report.errors;
    j["total_responses"] = report.total_responses;
    j["cr"] = report.cr;
    j["item_order"] = report.item_order;
    j["degenerate"] = report.degenerate;
    return j.dump(2) + "\n";
}

}  // namespace guttnmf
