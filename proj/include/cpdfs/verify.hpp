#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpdfs/model.hpp"

namespace cpdfs {

struct VerifyCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = 0;
    int trials = 20;        // random models per structural check
    std::size_t mc_samples = 100000;
};

/// Structural check suite: model invariants, monotonicity and submodularity
/// of g, the Claim-1 band around f, greedy vs the exhaustive optimum, and
/// exact-vs-Monte-Carlo entropy agreement.
std::vector<VerifyCheck> verify_random_models(const VerifyOptions& options);

/// Same suite run against one supplied model (must be enumeration-scale).
std::vector<VerifyCheck> verify_model(const CpdModel& model, const VerifyOptions& options);

}  // namespace cpdfs
