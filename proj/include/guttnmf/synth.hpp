#ifndef GUTTNMF_SYNTH_HPP
#define GUTTNMF_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "guttnmf/matrix.hpp"

namespace guttnmf {

struct SynthSpec {
    std::size_t m = 200;
    std::size_t n = 120;
    std::size_t k = 10;
    double noise_sigma = 0.05;
    std::size_t words_per_topic = 15;
    std::uint64_t seed = 1;
    /// Probability that a student's grade is pinned to 0 before the uniform
    /// draw over {0,5,...,100}; mirrors cohorts where many enrollees never
    /// engage.
    double zero_grade_mass = 0.4;
};

struct SynthData {
    DenseMatrix V;  // m x n, in [0,1]
    std::vector<double> grades;
    DenseMatrix planted_H;  // k x n binary, staircase plus flip noise
    DenseMatrix planted_W;  // m x k, per-topic word blocks over background
};

/// Plants a Guttman-structured factorization: grades drawn from the profile,
/// planted_H = build_h_ideal(grades, k) with entries flipped at rate
/// min(noise_sigma, 0.1), planted_W giving each topic words_per_topic
/// high-weight words over a weak uniform background, and
/// V = clip(planted_W * planted_H + Gaussian(0, noise_sigma), >= 0) rescaled
/// by its global maximum. Deterministic per seed.
SynthData generate(const SynthSpec& spec);

/// Writes the corpus-ingest file set (V.csv, vocab.txt, students.txt,
/// grades.csv) with synthetic names, plus planted_H.csv and planted_W.csv.
void write_synth_dataset(const SynthData& data, const std::string& dir);

}  // namespace guttnmf

#endif
