#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpdfs/em.hpp"
#include "cpdfs/info.hpp"
#include "cpdfs/model.hpp"

namespace cpdfs {

struct SelectionStep {
    int candidates_evaluated = 0;
    std::string mode;  // "exact" or "mc" actually used at this step
};

struct SelectionResult {
    std::vector<int> order;     // selected feature positions, in selection order
    std::vector<double> gains;  // marginal MI gains per step (nats)
    double final_value = 0.0;   // g(S) of the full selection
    std::string strategy;       // greedy | lazy-greedy | remodeling | exhaustive
    std::string entropy_mode;   // exact | mc | auto
    std::uint64_t seed = 0;
    std::vector<SelectionStep> per_step;
    long evaluations = 0;  // total MI evaluations performed
};

struct SelectionOptions {
    EntropyMode entropy = EntropyMode::Exact;
    std::size_t mc_samples = 5000;
    std::uint64_t seed = 0;
    std::size_t exact_cap = kDefaultEnumerationCap;
};

/// Algorithm: start from the empty set and repeatedly add the feature
/// maximizing I(X_{S+s}; Z); ties break toward the smallest feature index.
SelectionResult greedy_select(const CpdModel& model, int budget,
                              const SelectionOptions& options = {});

/// Greedy with stale upper bounds on marginal gains; identical output to
/// greedy_select but typically far fewer MI evaluations. Requires exact
/// entropies (falls back to plain greedy under MC noise, with a warning).
SelectionResult lazy_greedy_select(const CpdModel& model, int budget,
                                   const SelectionOptions& options = {});

/// Per-candidate refitting: at each step a fresh CPD is fitted to the
/// empirical PMF of S+{s} plus the label, and the candidate maximizing
/// I(X_{S+s}; Z) under its own refit model wins.
SelectionResult remodeling_select(const DiscreteDataset& dataset, int budget, int rank,
                                  const FitConfig& fit_config, std::uint64_t seed,
                                  const SelectionOptions& options = {});

/// Brute force over all size-K subsets; the verification optimum.
SelectionResult exhaustive_select(const CpdModel& model, int budget,
                                  std::size_t subset_cap = 100000,
                                  std::size_t exact_cap = kDefaultEnumerationCap);

}  // namespace cpdfs
