#include "guttnmf/synth.hpp"

#include <algorithm>
#include <stdexcept>

#include "guttnmf/dataset.hpp"
#include "guttnmf/guttman.hpp"
#include "guttnmf/rng.hpp"

namespace guttnmf {

namespace {

void validate_spec(const SynthSpec& spec) {
    if (spec.m == 0 || spec.n == 0 || spec.k == 0) {
        throw std::invalid_argument("synth dimensions must be positive");
    }
    if (spec.k > spec.m || spec.k > spec.n) {
        throw std::invalid_argument("k must not exceed min(m, n)");
    }
    if (spec.words_per_topic == 0) {
        throw std::invalid_argument("words_per_topic must be positive");
    }
    if (spec.words_per_topic * spec.k > spec.m) {
        throw std::invalid_argument("words_per_topic * k must be <= m");
    }
    if (spec.noise_sigma < 0.0) {
        throw std::invalid_argument("noise_sigma must be >= 0");
    }
    if (!(spec.zero_grade_mass >= 0.0 && spec.zero_grade_mass < 1.0)) {
        throw std::invalid_argument("zero_grade_mass must be in [0,1)");
    }
}

}  // namespace

SynthData generate(const SynthSpec& spec) {
    validate_spec(spec);
    Rng rng(spec.seed);
    SynthData data;

    data.grades.resize(spec.n);
    for (double& g : data.grades) {
        if (rng.uniform01() < spec.zero_grade_mass) {
            g = 0.0;
        } else {
            g = 5.0 * double(rng.index(21));
        }
    }

    data.planted_H = build_h_ideal(data.grades, spec.k);
    const double flip_rate = std::min(spec.noise_sigma, 0.1);
    if (flip_rate > 0.0) {
        for (double& v : data.planted_H.data()) {
            if (rng.uniform01() < flip_rate) v = 1.0 - v;
        }
    }

    data.planted_W = DenseMatrix(spec.m, spec.k);
    for (double& v : data.planted_W.data()) v = rng.uniform(0.0, 0.05);
    for (std::size_t t = 0; t < spec.k; ++t) {
        for (std::size_t r = 0; r < spec.words_per_topic; ++r) {
            data.planted_W(t * spec.words_per_topic + r, t) =
                rng.uniform(0.8, 1.2);
        }
    }

    DenseMatrix product = matmul(data.planted_W, data.planted_H);
    if (spec.noise_sigma > 0.0) {
        for (double& v : product.data()) {
            v = std::max(0.0, v + spec.noise_sigma * rng.gaussian());
        }
    }
    const double mx = product.max();
    if (mx <= 0.0) {
        throw std::runtime_error("degenerate synthetic matrix: all zeros");
    }
    for (double& v : product.data()) v /= mx;
    data.V = std::move(product);
    return data;
}

namespace {

std::string padded_name(char prefix, std::size_t i, std::size_t width) {
    std::string num = std::to_string(i);
    std::string out(1, prefix);
    if (num.size() < width) out.append(width - num.size(), '0');
    out += num;
    return out;
}

}  // namespace

void write_synth_dataset(const SynthData& data, const std::string& dir) {
    Dataset ds;
    ds.V = data.V;
    ds.grades = data.grades;
    ds.vocab.reserve(data.V.rows());
    for (std::size_t i = 0; i < data.V.rows(); ++i) {
        ds.vocab.push_back(padded_name('w', i + 1, 4));
    }
    ds.students.reserve(data.V.cols());
    for (std::size_t j = 0; j < data.V.cols(); ++j) {
        ds.students.push_back(padded_name('s', j + 1, 4));
    }
    write_dataset(ds, dir);
    save_matrix_csv(data.planted_H, dir + "/planted_H.csv");
    save_matrix_csv(data.planted_W, dir + "/planted_W.csv");
}

}  // namespace guttnmf
