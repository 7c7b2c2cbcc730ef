#include "guttnmf/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "guttnmf/parallel.hpp"
#include "guttnmf/rng.hpp"
#include "guttnmf/scale.hpp"

namespace guttnmf {

Split split_students(std::size_t n, double fraction, std::uint64_t seed) {
    if (n < 2) {
        throw std::invalid_argument(
            "need at least 2 students to split, got " + std::to_string(n));
    }
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("split fraction must be in (0,1)");
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    rng.shuffle(idx);
    std::size_t train = std::size_t(std::llround(double(n) * fraction));
    train = std::clamp<std::size_t>(train, 1, n - 1);
    Split s;
    s.fraction = fraction;
    s.seed = seed;
    s.train_cols.assign(idx.begin(), idx.begin() + long(train));
    s.test_cols.assign(idx.begin() + long(train), idx.end());
    std::sort(s.train_cols.begin(), s.train_cols.end());
    std::sort(s.test_cols.begin(), s.test_cols.end());
    return s;
}

DenseMatrix select_columns(const DenseMatrix& m,
                           const std::vector<std::size_t>& cols) {
    if (cols.empty()) {
        throw std::invalid_argument("column selection is empty");
    }
    DenseMatrix out(m.rows(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j] >= m.cols()) {
            throw std::invalid_argument("column index out of range");
        }
        for (std::size_t i = 0; i < m.rows(); ++i) {
            out(i, j) = m(i, cols[j]);
        }
    }
    return out;
}

DenseMatrix infer_test_h(const DenseMatrix& H_train, const DenseMatrix& V_train,
                         const DenseMatrix& V_test) {
    if (H_train.cols() != V_train.cols()) {
        throw std::invalid_argument("H_train/V_train column mismatch: " +
                                    H_train.shape_str() + " vs " +
                                    V_train.shape_str());
    }
    if (V_train.rows() != V_test.rows()) {
        throw std::invalid_argument("V_train/V_test row mismatch: " +
                                    V_train.shape_str() + " vs " +
                                    V_test.shape_str());
    }
    return matmul(H_train, matmul(pseudoinverse(V_train), V_test));
}

RocPr roc_pr(const DenseMatrix& scores, const DenseMatrix& truth) {
    if (scores.rows() != truth.rows() || scores.cols() != truth.cols()) {
        throw std::invalid_argument("score/truth shape mismatch: " +
                                    scores.shape_str() + " vs " +
                                    truth.shape_str());
    }
    std::size_t positives = 0;
    for (double v : truth.data()) {
        if (v != 0.0 && v != 1.0) {
            throw std::invalid_argument("truth matrix is not binary");
        }
        if (v == 1.0) ++positives;
    }
    const std::size_t total = truth.size();
    const std::size_t negatives = total - positives;

    RocPr out;
    out.roc.kind = "roc";
    out.pr.kind = "pr";
    if (positives == 0 || negatives == 0) {
        out.roc.degenerate = true;
        out.pr.degenerate = true;
        return out;
    }

    std::vector<std::size_t> idx(total);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return scores.data()[a] > scores.data()[b];
    });

    const double p = double(positives);
    const double n = double(negatives);
    out.roc.points.emplace_back(0.0, 0.0);
    out.pr.points.emplace_back(0.0, 1.0);

    std::size_t tp = 0;
    std::size_t fp = 0;
    double roc_auc = 0.0;
    double ap = 0.0;
    double prev_fpr = 0.0;
    double prev_tpr = 0.0;
    double prev_recall = 0.0;
    std::size_t i = 0;
    while (i < total) {
        // One tie group: every flattened cell sharing this score crosses the
        // threshold together.
        const double score = scores.data()[idx[i]];
        std::size_t group_tp = 0;
        std::size_t group_fp = 0;
        while (i < total && scores.data()[idx[i]] == score) {
            if (truth.data()[idx[i]] == 1.0) {
                ++group_tp;
            } else {
                ++group_fp;
            }
            ++i;
        }
        tp += group_tp;
        fp += group_fp;
        const double tpr = double(tp) / p;
        const double fpr = double(fp) / n;
        const double precision = double(tp) / double(tp + fp);
        roc_auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        ap += (tpr - prev_recall) * precision;
        out.roc.points.emplace_back(fpr, tpr);
        out.pr.points.emplace_back(tpr, precision);
        prev_fpr = fpr;
        prev_tpr = tpr;
        prev_recall = tpr;
    }
    out.roc.auc = roc_auc;
    out.pr.auc = ap;
    return out;
}

Stats mean_sd(const std::vector<double>& values) {
    Stats s;
    if (values.empty()) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
             double(values.size());
    if (values.size() < 2) return s;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / double(values.size() - 1));
    return s;
}

std::vector<SweepRow> sweep(const std::string& param,
                            const std::vector<double>& values,
                            const RunConfig& base, const DenseMatrix& V,
                            const std::vector<double>& grades,
                            std::size_t jobs) {
    if (param != "lambda0" && param != "lambda1" && param != "lambda2" &&
        param != "k") {
        throw std::invalid_argument(
            "unknown sweep parameter '" + param +
            "' (valid: lambda0, lambda1, lambda2, k)");
    }
    if (values.empty()) {
        throw std::invalid_argument("sweep needs at least one value");
    }
    if (param == "k") {
        for (double v : values) {
            if (!(v >= 1.0) || std::floor(v) != v) {
                throw std::invalid_argument(
                    "k values must be positive integers");
            }
        }
    }

    const std::size_t runs = base.runs;
    const std::size_t cells = values.size() * runs;
    std::vector<double> cr(cells, 0.0);
    std::vector<double> recon(cells, 0.0);
    std::vector<std::string> cell_error(cells);

    parallel_for(cells, jobs, [&](std::size_t cell) {
        const std::size_t vi = cell / runs;
        const std::size_t run = cell % runs;
        GuttmanConfig cfg = base.guttman;
        if (param == "lambda0") cfg.lambda0 = values[vi];
        if (param == "lambda1") cfg.lambda1 = values[vi];
        if (param == "lambda2") cfg.lambda2 = values[vi];
        if (param == "k") cfg.k = std::size_t(values[vi]);
        cfg.seed = base.guttman.seed + run;
        try {
            GuttmanModel model = fit_guttman(V, grades, cfg);
            cr[cell] = binarize(model.H).best.cr;
            recon[cell] =
                frobenius_norm(subtract(V, matmul(model.W, model.H)));
        } catch (const std::exception& e) {
            cell_error[cell] = e.what();
        }
    });

    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
        SweepRow row;
        row.param = param;
        row.value = values[vi];
        std::vector<double> crs;
        std::vector<double> recons;
        for (std::size_t run = 0; run < runs; ++run) {
            const std::size_t cell = vi * runs + run;
            if (!cell_error[cell].empty()) {
                row.failed = true;
                if (row.error.empty()) row.error = cell_error[cell];
            } else {
                crs.push_back(cr[cell]);
                recons.push_back(recon[cell]);
            }
        }
        if (!row.failed) {
            row.cr = mean_sd(crs);
            row.recon = mean_sd(recons);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::string iso_timestamp_utc() {
    const std::time_t t =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::string report_json(const Report& r) {
    nlohmann::json j;
    j["cr_mean"] = r.cr.mean;
    j["cr_sd"] = r.cr.sd;
    j["recon_mean"] = r.recon.mean;
    j["recon_sd"] = r.recon.sd;
    if (r.roc_auc_mean) j["roc_auc_mean"] = *r.roc_auc_mean;
    if (r.pr_auc_mean) j["pr_auc_mean"] = *r.pr_auc_mean;
    j["accepted"] = r.accepted;
    j["method"] = r.method;
    j["runs"] = r.runs;
    if (r.ground_truth) j["ground_truth"] = *r.ground_truth;
    j["generated_at"] = iso_timestamp_utc();
    return j.dump(2) + "\n";
}

void write_curves_csv(const std::vector<RocPr>& runs, const std::string& path) {
    std::string out = "kind,x,y,run\n";
    auto append_curve = [&](const Curve& c, std::size_t run) {
        for (const auto& [x, y] : c.points) {
            out += c.kind;
            out.push_back(',');
            format_double(x, out);
            out.push_back(',');
            format_double(y, out);
            out.push_back(',');
            out += std::to_string(run);
            out.push_back('\n');
        }
    };
    for (std::size_t r = 0; r < runs.size(); ++r) {
        append_curve(runs[r].roc, r);
        append_curve(runs[r].pr, r);
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + path);
    }
    f << out;
}

void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::string& path) {
    std::string out = "param,value,cr_mean,cr_sd,recon_mean,recon_sd\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const SweepRow& row : rows) {
        out += row.param;
        out.push_back(',');
        format_double(row.value, out);
        for (double v : {row.failed ? nan : row.cr.mean,
                         row.failed ? nan : row.cr.sd,
                         row.failed ? nan : row.recon.mean,
                         row.failed ? nan : row.recon.sd}) {
            out.push_back(',');
            format_double(v, out);
        }
        out.push_back('\n');
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + path);
    }
    f << out;
}

}  // namespace guttnmf
