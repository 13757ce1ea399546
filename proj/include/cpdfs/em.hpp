#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cpdfs/data.hpp"
#include "cpdfs/model.hpp"

namespace cpdfs {

struct FitConfig {
    int rank = 1;
    int max_iterations = 500;
    double relative_kl_tolerance = 1e-6;
    std::uint64_t seed = 0;
    std::optional<CpdModel> initial_model;  // random-stochastic init when absent
    // invoked with the model state after each completed sweep
    std::function<void(const CpdModel&, int)> sweep_observer;
};

struct FitReport {
    std::vector<double> kl_trace;  // KL before each sweep, plus the final value
    int iterations_run = 0;
    std::string termination_reason;  // "tolerance" | "max-iterations"
    std::uint64_t seed = 0;
    long clamp_events = 0;  // model mass clamped at 1e-300 on the support
};

struct KlResult {
    double value = 0.0;          // +inf when the model vanishes on the support
    long zero_model_points = 0;  // support points where that happened
};

/// sum over the empirical support of x * log(x / model(t)); zero-mass terms
/// vanish by the 0*log(0) convention, so only stored entries contribute.
KlResult kl_divergence(const SparseCountTensor& empirical, const CpdModel& model);

/// Multiplicative EM for the KL-fit of a simplex-constrained CPD. Each sweep
/// updates lambda and every factor from the same support-restricted ratio
/// tensor, then renormalizes to the simplices.
std::pair<CpdModel, FitReport> em_fit(const SparseCountTensor& empirical,
                                      const FitConfig& config);

/// Posterior over label values given a partial feature tuple; missing
/// features are coded -1 and marginalize out exactly.
std::vector<double> predict_label_posterior(const CpdModel& model,
                                            std::span<const int> feature_codes);

struct RankCvEntry {
    int rank = 0;
    double mean_error = 0.0;
    std::vector<double> fold_errors;
};

struct RankCvResult {
    int best_rank = 0;
    std::vector<RankCvEntry> table;
};

/// K-fold CV over candidate ranks; validation labels are predicted with the
/// model's own posterior. Ties break toward the smaller rank.
RankCvResult cross_validate_rank(const DiscreteDataset& dataset,
                                 std::span<const int> candidate_ranks, int folds,
                                 std::uint64_t seed,
                                 const FitConfig& base_config = FitConfig{});

}  // namespace cpdfs
