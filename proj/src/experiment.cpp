#include "cpdfs/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace cpdfs {

namespace {

RunRecord run_one(const RawTable& table, const ExperimentConfig& cfg, int run) {
    RunRecord rec;
    rec.run_index = run;

    auto [train_idx, test_idx] = split_indices(table.rows, cfg.split, run);
    DiscreteDataset coded = discretize_equal_width(table, cfg.bins, train_idx);
    DiscreteDataset train = coded.select_rows(train_idx);
    DiscreteDataset test = coded.select_rows(test_idx);

    if (cfg.ranks.empty()) throw std::invalid_argument("experiment: no candidate ranks");
    if (cfg.ranks.size() == 1) {
        rec.rank = cfg.ranks.front();
    } else {
        rec.rank = cross_validate_rank(train, cfg.ranks, cfg.cv_folds,
                                       derive_seed(cfg.seed, 2000 + run), cfg.fit)
                       .best_rank;
    }

    FitConfig fit = cfg.fit;
    fit.rank = rec.rank;
    fit.seed = derive_seed(cfg.seed, 3000 + run);
    fit.initial_model.reset();

    int k_max = std::min(cfg.k_max, train.num_features);
    SelectionOptions sel;
    sel.entropy = cfg.entropy;
    sel.mc_samples = cfg.mc_samples;
    sel.seed = derive_seed(cfg.seed, 4000 + run);

    if (cfg.strategy == Strategy::Remodeling) {
        rec.selection = remodeling_select(train, k_max, rec.rank, fit, sel.seed, sel);
    } else {
        CpdModel model = em_fit(build_empirical_pmf(train), fit).first;
        rec.selection = cfg.strategy == Strategy::LazyGreedy
                            ? lazy_greedy_select(model, k_max, sel)
                            : greedy_select(model, k_max, sel);
    }

    Rng control_rng(derive_seed(cfg.seed, 5000 + run));
    std::vector<std::size_t> control_perm =
        random_permutation(static_cast<std::size_t>(train.num_features), control_rng);

    for (int k = 1; k <= k_max; ++k) {
        FeatureSubset selected;
        selected.indices.assign(rec.selection.order.begin(), rec.selection.order.begin() + k);
        rec.accuracy_by_k.push_back(
            accuracy(knn_classify(train, test, selected, cfg.metric), test.labels));
        FeatureSubset control;
        for (int i = 0; i < k; ++i) control.indices.push_back(static_cast<int>(control_perm[i]));
        rec.control_by_k.push_back(
            accuracy(knn_classify(train, test, control, cfg.metric), test.labels));
    }
    return rec;
}

}  // namespace

ExperimentReport run_experiment(const RawTable& table, const ExperimentConfig& config) {
    ExperimentReport report;
    report.config = config;
    const int runs = config.split.monte_carlo_runs;
    report.per_run.resize(runs);

    int threads = std::max(1, config.threads);
    if (threads <= 1) {
        for (int r = 0; r < runs; ++r) report.per_run[r] = run_one(table, config, r);
    } else {
        // runs are independent jobs with derived seeds; results land by index
        std::vector<std::exception_ptr> errors(runs);
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (;;) {
                int r = next.fetch_add(1);
                if (r >= runs) return;
                try {
                    report.per_run[r] = run_one(table, config, r);
                } catch (...) {
                    errors[r] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < std::min(threads, runs); ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        for (int r = 0; r < runs; ++r)
            if (errors[r]) std::rethrow_exception(errors[r]);
    }

    std::size_t k_max = 0;
    for (const auto& rec : report.per_run) k_max = std::max(k_max, rec.accuracy_by_k.size());
    for (std::size_t k = 0; k < k_max; ++k) {
        double sum = 0.0, sumsq = 0.0, csum = 0.0;
        int n = 0;
        for (const auto& rec : report.per_run) {
            if (k >= rec.accuracy_by_k.size()) continue;
            sum += rec.accuracy_by_k[k];
            sumsq += rec.accuracy_by_k[k] * rec.accuracy_by_k[k];
            csum += rec.control_by_k[k];
            ++n;
        }
        double mean = sum / n;
        report.mean_accuracy_by_k.push_back(mean);
        report.std_by_k.push_back(n > 1 ? std::sqrt(std::max(0.0, (sumsq - sum * mean) / (n - 1)))
                                        : 0.0);
        report.mean_control_by_k.push_back(csum / n);
    }
    return report;
}

}  // namespace cpdfs
