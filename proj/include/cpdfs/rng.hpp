#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace cpdfs {

// splitmix64 finalizer; used to derive independent seed streams from one
// root seed plus a label, so subsystems never share a generator.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t label) {
    return mix64(root ^ mix64(label));
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return derive_seed(root, h);
}

// Thin wrapper over mt19937_64 with hand-rolled uniform/categorical draws so
// sequences do not depend on implementation-defined std::*_distribution.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    // index in [0, n)
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

    // weights must lie on the probability simplex
    int categorical(std::span<const double> weights) {
        double u = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

  private:
    std::mt19937_64 eng_;
};

inline std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    rng.shuffle(perm);
    return perm;
}

}  // namespace cpdfs
