#pragma once

#include <cstdint>
#include <vector>

#include "cpdfs/model.hpp"

namespace cpdfs {

inline constexpr std::size_t kDefaultEnumerationCap = 1000000;

struct EntropyEstimate {
    double value = 0.0;  // nats
    enum class Method { Exact, MonteCarlo } method = Method::Exact;
    std::size_t sample_count = 0;   // MC only
    double standard_error = 0.0;    // MC only
    long clamp_events = 0;          // MC log-prob clamped at 1e-300
};

/// H(X_n | Z) = -sum_{i,f} A_n(i,f) lambda(f) log A_n(i,f), with 0*log0 = 0.
double conditional_entropy_given_latent(const CpdModel& model, int n);

/// Exact H(X_S) by enumerating the marginalized grid; throws capacity_error
/// when the grid exceeds `cap`.
EntropyEstimate joint_entropy_exact(const CpdModel& model, const FeatureSubset& subset,
                                    std::size_t cap = kDefaultEnumerationCap);

/// Monte-Carlo H(X_S) = -mean(log P(x)) over T model samples.
EntropyEstimate joint_entropy_mc(const CpdModel& model, const FeatureSubset& subset,
                                 std::size_t samples, std::uint64_t seed);
EntropyEstimate joint_entropy_mc(const CpdModel& model, const FeatureSubset& subset,
                                 std::size_t samples, Rng& rng);

enum class EntropyMode { Exact, MonteCarlo, Auto };

/// g(S) = I(X_S; Z) = H(X_S) - sum_{n in S} H(X_n | Z). Exact-mode results
/// are clamped to 0 after the >= -1e-10 sanity check.
double mi_subset_latent(const CpdModel& model, const FeatureSubset& subset,
                        EntropyMode mode = EntropyMode::Exact,
                        std::size_t samples = 5000, std::uint64_t seed = 0,
                        std::size_t cap = kDefaultEnumerationCap);

/// f(S) = I(X_S; Y), exact by enumeration. A verification oracle; small
/// instances only.
double mi_subset_target(const CpdModel& model, const FeatureSubset& subset,
                        std::size_t cap = kDefaultEnumerationCap);

/// I(X_V; Z | Y) = I(X_V; {Z,Y}) - I(X_V; Y), by enumeration. This is the
/// constant separating the surrogate g from the true objective f.
double bandgap_constant(const CpdModel& model, std::size_t cap = kDefaultEnumerationCap);

}  // namespace cpdfs
