#ifndef GUTTNMF_RNG_HPP
#define GUTTNMF_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace guttnmf {

/// Deterministic random source. The raw stream is std::mt19937_64, which the
/// standard pins bit-for-bit; all derived draws below are computed here rather
/// than with std:: distributions, whose outputs vary across standard library
/// implementations. Same seed, same platform-independent sequence.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1): 53 random bits scaled by 2^-53.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0, 1]; strictly positive, safe for log() and for
    /// initializing factors that must not contain zeros.
    double uniform_pos() {
        return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform on [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Standard normal via Box-Muller; draws two uniforms per pair and caches
    /// the spare.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Uniform index in [0, n). Modulo bias is below 2^-53 for any feasible n.
    std::size_t index(std::size_t n) {
        if (n == 0) throw std::invalid_argument("index(0)");
        return static_cast<std::size_t>(gen_() % n);
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace guttnmf

#endif
