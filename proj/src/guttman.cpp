#include "guttnmf/guttman.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace guttnmf {

DenseMatrix build_h_ideal(const std::vector<double>& grades, std::size_t k) {
    if (k == 0) {
        throw std::invalid_argument("k must be positive");
    }
    if (grades.empty()) {
        throw std::invalid_argument("grade vector is empty");
    }
    for (std::size_t j = 0; j < grades.size(); ++j) {
        if (!(grades[j] >= 0.0 && grades[j] <= 100.0)) {
            throw std::invalid_argument("grade out of [0,100] at index " +
                                        std::to_string(j));
        }
    }
    const double width = 100.0 / double(k);
    DenseMatrix H(k, grades.size());
    for (std::size_t j = 0; j < grades.size(); ++j) {
        const double b_raw = std::floor((grades[j] + width) / width);
        const std::size_t b = std::min(k, std::size_t(b_raw));
        for (std::size_t i = 0; i < b; ++i) H(i, j) = 1.0;
    }
    return H;
}

std::size_t normalize_factors(DenseMatrix& W, DenseMatrix& H) {
    if (W.cols() != H.rows()) {
        throw std::invalid_argument("factor shape mismatch: " + W.shape_str() +
                                    " vs " + H.shape_str());
    }
    std::size_t zero_rows = 0;
    for (std::size_t r = 0; r < H.rows(); ++r) {
        double mx = 0.0;
        for (std::size_t j = 0; j < H.cols(); ++j) mx = std::max(mx, H(r, j));
        if (mx <= 0.0) {
            ++zero_rows;
            continue;
        }
        for (std::size_t j = 0; j < H.cols(); ++j) H(r, j) /= mx;
        for (std::size_t i = 0; i < W.rows(); ++i) W(i, r) *= mx;
    }
    return zero_rows;
}

double objective(const DenseMatrix& V, const DenseMatrix& W,
                 const DenseMatrix& H, const DenseMatrix& H_ideal,
                 const GuttmanConfig& cfg) {
    const double fit = frobenius_sq(subtract(V, matmul(W, H)));
    const double reg_w = frobenius_sq(W);
    const double reg_target = frobenius_sq(subtract(H, H_ideal));
    const double reg_binary = frobenius_sq(subtract(hadamard(H, H), H));
    return fit + cfg.lambda0 * reg_w + cfg.lambda1 * reg_target +
           cfg.lambda2 * reg_binary;
}

DenseMatrix update_w(const DenseMatrix& V, const DenseMatrix& W,
                     const DenseMatrix& H, double lambda0) {
    const DenseMatrix vh = matmul(V, transpose(H));
    const DenseMatrix whh = matmul(W, matmul(H, transpose(H)));
    DenseMatrix out(W.rows(), W.cols());
    for (std::size_t i = 0; i < W.rows(); ++i) {
        for (std::size_t j = 0; j < W.cols(); ++j) {
            const double den = whh(i, j) + lambda0 * W(i, j) + kDenomEps;
            out(i, j) = W(i, j) * vh(i, j) / den;
        }
    }
    return out;
}

DenseMatrix update_h(const DenseMatrix& V, const DenseMatrix& W,
                     const DenseMatrix& H, const DenseMatrix& H_ideal,
                     double lambda1, double lambda2) {
    if (H.rows() != H_ideal.rows() || H.cols() != H_ideal.cols()) {
        throw std::invalid_argument("H_ideal shape mismatch: " + H.shape_str() +
                                    " vs " + H_ideal.shape_str());
    }
    const DenseMatrix wt = transpose(W);
    const DenseMatrix wv = matmul(wt, V);
    const DenseMatrix wwh = matmul(matmul(wt, W), H);
    DenseMatrix out(H.rows(), H.cols());
    for (std::size_t i = 0; i < H.rows(); ++i) {
        for (std::size_t j = 0; j < H.cols(); ++j) {
            const double h = H(i, j);
            const double h2 = h * h;
            const double h3 = h2 * h;
            const double num = wv(i, j) + 4.0 * lambda2 * h3 +
                               3.0 * lambda2 * h2 + lambda1 * H_ideal(i, j);
            const double den = wwh(i, j) + 6.0 * lambda2 * h3 +
                               (lambda1 + lambda2) * h + kDenomEps;
            out(i, j) = h * num / den;
        }
    }
    return out;
}

namespace {

void validate_guttman_config(const GuttmanConfig& cfg) {
    if (cfg.lambda0 < 0.0 || cfg.lambda1 < 0.0 || cfg.lambda2 < 0.0) {
        throw std::invalid_argument("regularization coefficients must be >= 0");
    }
    if (cfg.warm_start_iters == 0) {
        throw std::invalid_argument("warm_start_iters must be >= 1");
    }
}

NmfConfig to_nmf_config(const GuttmanConfig& cfg) {
    return NmfConfig{cfg.k, cfg.max_iter, cfg.tol, cfg.seed};
}

void clamp_min(DenseMatrix& m, double floor) {
    for (double& v : m.data()) {
        if (v < floor) v = floor;
    }
}

void check_exit_invariants(const GuttmanModel& model) {
    if (!model.W.is_nonnegative() || !model.H.is_nonnegative()) {
        throw std::logic_error("factor turned negative during training");
    }
    const auto& hist = model.objective_history;
    for (std::size_t t = 1; t < hist.size(); ++t) {
        if (hist[t] > hist[t - 1] + 1e-9) {
            throw std::logic_error(
                "objective increased at step " + std::to_string(t) + ": " +
                std::to_string(hist[t - 1]) + " -> " + std::to_string(hist[t]));
        }
    }
}

}  // namespace

Factorization guttman_warm_start(const DenseMatrix& V,
                                 const GuttmanConfig& cfg) {
    validate_guttman_config(cfg);
    NmfConfig ncfg = to_nmf_config(cfg);
    ncfg.max_iter = cfg.warm_start_iters;
    Factorization f = nmf_fit(V, ncfg);
    normalize_factors(f.W, f.H);
    clamp_min(f.W, 1e-6);
    clamp_min(f.H, 1e-6);
    return f;
}

GuttmanModel fit_guttman_from(const DenseMatrix& V,
                              const std::vector<double>& grades, DenseMatrix W,
                              DenseMatrix H, const GuttmanConfig& cfg) {
    validate_guttman_config(cfg);
    validate_nmf_input(V, to_nmf_config(cfg));
    if (grades.size() != V.cols()) {
        throw std::invalid_argument("grade count " +
                                    std::to_string(grades.size()) +
                                    " does not match student count " +
                                    std::to_string(V.cols()));
    }
    GuttmanModel model;
    model.config = cfg;
    model.H_ideal = build_h_ideal(grades, cfg.k);
    double obj = objective(V, W, H, model.H_ideal, cfg);
    model.objective_history.push_back(obj);
    for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
        W = update_w(V, W, H, cfg.lambda0);
        H = update_h(V, W, H, model.H_ideal, cfg.lambda1, cfg.lambda2);
        const double next = objective(V, W, H, model.H_ideal, cfg);
        model.objective_history.push_back(next);
        if (!std::isfinite(next)) {
            throw std::runtime_error("objective not finite at iteration " +
                                     std::to_string(it));
        }
        const double rel = std::abs(obj - next) / std::max(obj, 1e-30);
        obj = next;
        if (rel < cfg.tol) break;
    }
    model.W = std::move(W);
    model.H = std::move(H);
    check_exit_invariants(model);
    return model;
}

GuttmanModel fit_guttman(const DenseMatrix& V, const std::vector<double>& grades,
                         const GuttmanConfig& cfg) {
    Factorization warm = guttman_warm_start(V, cfg);
    return fit_guttman_from(V, grades, std::move(warm.W), std::move(warm.H),
                            cfg);
}

namespace {

nlohmann::json guttman_config_json(const GuttmanConfig& cfg) {
    nlohmann::json j;
    j["lambda0"] = cfg.lambda0;
    j["lambda1"] = cfg.lambda1;
    j["lambda2"] = cfg.lambda2;
    j["k"] = cfg.k;
    j["max_iter"] = cfg.max_iter;
    j["tol"] = cfg.tol;
    j["seed"] = cfg.seed;
    return j;
}

double as_finite_double(const nlohmann::json& v, const std::string& origin,
                        const std::string& key) {
    if (!v.is_number()) {
        throw std::runtime_error(origin + ": key '" + key +
                                 "' must be a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        throw std::runtime_error(origin + ": key '" + key + "' is not finite");
    }
    return d;
}

std::size_t as_positive_int(const nlohmann::json& v, const std::string& origin,
                            const std::string& key) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        throw std::runtime_error(origin + ": key '" + key +
                                 "' must be an integer");
    }
    const std::int64_t i = v.get<std::int64_t>();
    if (i < 1) {
        throw std::runtime_error(origin + ": key '" + key + "' must be >= 1");
    }
    return std::size_t(i);
}

}  // namespace

RunConfig parse_run_config_json(const std::string& text,
                                const std::string& origin) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        throw std::runtime_error(origin + ": invalid JSON");
    }
    if (!j.is_object()) {
        throw std::runtime_error(origin + ": config must be a JSON object");
    }
    RunConfig rc;
    for (const auto& [key, val] : j.items()) {
        if (key == "lambda0" || key == "lambda1" || key == "lambda2") {
            const double d = as_finite_double(val, origin, key);
            if (d < 0.0) {
                throw std::runtime_error(origin + ": key '" + key +
                                         "' must be >= 0");
            }
            if (key == "lambda0") rc.guttman.lambda0 = d;
            if (key == "lambda1") rc.guttman.lambda1 = d;
            if (key == "lambda2") rc.guttman.lambda2 = d;
        } else if (key == "k") {
            rc.guttman.k = as_positive_int(val, origin, key);
        } else if (key == "max_iter") {
            rc.guttman.max_iter = as_positive_int(val, origin, key);
        } else if (key == "tol") {
            const double d = as_finite_double(val, origin, key);
            if (!(d > 0.0)) {
                throw std::runtime_error(origin + ": key 'tol' must be > 0");
            }
            rc.guttman.tol = d;
        } else if (key == "seed") {
            if (!val.is_number_integer() && !val.is_number_unsigned()) {
                throw std::runtime_error(origin +
                                         ": key 'seed' must be an integer");
            }
            rc.guttman.seed = val.get<std::uint64_t>();
        } else if (key == "runs") {
            rc.runs = as_positive_int(val, origin, key);
        } else if (key == "split_fraction") {
            const double d = as_finite_double(val, origin, key);
            if (!(d > 0.0 && d < 1.0)) {
                throw std::runtime_error(
                    origin + ": key 'split_fraction' must be in (0,1)");
            }
            rc.split_fraction = d;
        } else if (key == "method") {
            if (!val.is_string()) {
                throw std::runtime_error(origin +
                                         ": key 'method' must be a string");
            }
            const std::string s = val.get<std::string>();
            if (s != "guttman" && s != "nmf") {
                throw std::runtime_error(
                    origin + ": key 'method' must be 'guttman' or 'nmf'");
            }
            rc.method = s;
        } else {
            throw std::runtime_error(origin + ": unknown config key '" + key +
                                     "'");
        }
    }
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config " + path);
    }
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_run_config_json(text, path);
}

std::string run_config_to_json(const RunConfig& cfg) {
    nlohmann::json j = guttman_config_json(cfg.guttman);
    j["runs"] = cfg.runs;
    j["split_fraction"] = cfg.split_fraction;
    j["method"] = cfg.method;
    return j.dump(2) + "\n";
}

void save_model(const GuttmanModel& model, const std::string& dir) {
    std::filesystem::create_directories(dir);
    save_matrix_csv(model.W, dir + "/W.csv");
    save_matrix_csv(model.H, dir + "/H.csv");
    save_matrix_csv(model.H_ideal, dir + "/H_ideal.csv");

    std::ofstream cfg(dir + "/config.json", std::ios::binary);
    if (!cfg) {
        throw std::runtime_error("cannot write " + dir + "/config.json");
    }
    cfg << guttman_config_json(model.config).dump(2) << "\n";

    std::string hist = "iteration,objective\n";
    for (std::size_t t = 0; t < model.objective_history.size(); ++t) {
        hist += std::to_string(t);
        hist.push_back(',');
        format_double(model.objective_history[t], hist);
        hist.push_back('\n');
    }
    std::ofstream hf(dir + "/history.csv", std::ios::binary);
    if (!hf) {
        throw std::runtime_error("cannot write " + dir + "/history.csv");
    }
    hf << hist;
}

GuttmanModel load_model(const std::string& dir) {
    GuttmanModel model;
    model.W = load_matrix_csv(dir + "/W.csv");
    model.H = load_matrix_csv(dir + "/H.csv");
    model.H_ideal = load_matrix_csv(dir + "/H_ideal.csv");

    std::ifstream cfg_in(dir + "/config.json");
    if (!cfg_in) {
        throw std::runtime_error("cannot open " + dir + "/config.json");
    }
    std::string text((std::istreambuf_iterator<char>(cfg_in)),
                     std::istreambuf_iterator<char>());
    model.config = parse_run_config_json(text, dir + "/config.json").guttman;

    std::ifstream hist_in(dir + "/history.csv");
    if (!hist_in) {
        throw std::runtime_error("cannot open " + dir + "/history.csv");
    }
    std::string line;
    bool header = true;
    while (std::getline(hist_in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error(dir + "/history.csv: malformed line");
        }
        model.objective_history.push_back(std::stod(line.substr(comma + 1)));
    }
    return model;
}

}  // namespace guttnmf
