#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpdfs/data.hpp"
#include "cpdfs/em.hpp"
#include "cpdfs/knn.hpp"
#include "cpdfs/selection.hpp"

namespace cpdfs {

enum class Strategy { Greedy, LazyGreedy, Remodeling };

struct ExperimentConfig {
    SplitSpec split;
    std::vector<int> ranks;  // single entry skips CV
    int cv_folds = 5;
    int k_max = 10;
    Strategy strategy = Strategy::Greedy;
    EntropyMode entropy = EntropyMode::Auto;
    std::size_t mc_samples = 5000;
    int bins = 5;
    FitConfig fit;  // rank/seed fields are overridden per run
    KnnMetric metric = KnnMetric::Hamming;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct RunRecord {
    int run_index = 0;
    int rank = 0;
    SelectionResult selection;
    std::vector<double> accuracy_by_k;  // K = 1..k_max
    std::vector<double> control_by_k;   // random-subset control, same splits
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<RunRecord> per_run;
    std::vector<double> mean_accuracy_by_k;
    std::vector<double> std_by_k;
    std::vector<double> mean_control_by_k;
};

/// Full protocol: per Monte-Carlo run, split the raw table, fit bin edges on
/// the training rows, pick the rank (CV when several candidates), fit the
/// CPD, select up to k_max features and score 1-NN accuracy for each prefix,
/// alongside a random-subset control on the same splits.
ExperimentReport run_experiment(const RawTable& table, const ExperimentConfig& config);

}  // namespace cpdfs
