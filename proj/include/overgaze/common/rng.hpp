#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace og {

// Deterministic random source. The engine (mt19937_64) is fully specified by
// the standard and all derived draws below are implemented here rather than
// delegated to std distributions, so a seed pins the exact sample stream.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    // Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Lemire multiply-shift; bias is O(n / 2^64).
    int uniform_int(int n) {
        using u128 = unsigned __int128;
        return static_cast<int>((static_cast<u128>(eng_()) * static_cast<u128>(n)) >> 64);
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Box-Muller, no caching: every call consumes exactly two uniforms.
    double normal(double mu = 0.0, double sigma = 1.0) {
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        return mu + sigma * z;
    }

    // Draw an index with the given (not necessarily normalized) weights.
    int categorical(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double x = uniform() * total;
        double acc = 0.0;
        for (size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (x < acc) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

    // In-place Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform_int(static_cast<int>(i)));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
};

// Stage/entity seed derivation: seed = mix(global ^ fnv1a64(tag)).
// Tags are documented strings like "simulate/P003/round7" so partial reruns
// of any stage see the same per-entity stream.
uint64_t derive_seed(uint64_t global_seed, std::string_view tag);

}  // namespace og
