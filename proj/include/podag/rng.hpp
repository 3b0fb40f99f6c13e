#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace podag {

/// SplitMix64 stream. Every draw is defined bit-for-bit here, so results do
/// not depend on the standard library's distribution implementations.
class Rng {
public:
    static constexpr std::string_view kAlgorithm = "splitmix64";

    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);
    /// Standard normal via Box-Muller; the second variate is cached.
    double normal();
    bool bernoulli(double p) { return uniform() < p; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t k = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[k]);
        }
    }

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Independent seed for replicate `index` under `root`.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

}  // namespace podag
