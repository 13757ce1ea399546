#include "cpdfs/selection.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "cpdfs/errors.hpp"

namespace cpdfs {

namespace {

const char* mode_name(EntropyMode mode) {
    switch (mode) {
        case EntropyMode::Exact: return "exact";
        case EntropyMode::MonteCarlo: return "mc";
        case EntropyMode::Auto: return "auto";
    }
    return "?";
}

std::size_t subset_grid(const CpdModel& model, std::span<const int> indices,
                        std::size_t cap) {
    std::size_t cells = 1;
    for (int n : indices) {
        cells *= static_cast<std::size_t>(model.dims[n]);
        if (cells > cap) return cap + 1;
    }
    return cells;
}

// g(S) with the auto exact/MC switch; the per-step seed is shared across
// candidates so MC comparisons use common random numbers.
double eval_g(const CpdModel& model, const std::vector<int>& indices,
              const SelectionOptions& opt, std::uint64_t step_seed, bool& used_mc) {
    FeatureSubset s;
    s.indices = indices;
    bool exact = opt.entropy == EntropyMode::Exact ||
                 (opt.entropy == EntropyMode::Auto &&
                  subset_grid(model, indices, opt.exact_cap) <= opt.exact_cap);
    used_mc = !exact;
    return mi_subset_latent(model, s, exact ? EntropyMode::Exact : EntropyMode::MonteCarlo,
                            opt.mc_samples, step_seed, opt.exact_cap);
}

void check_budget(int budget, int n) {
    if (budget < 1 || budget > n)
        throw std::invalid_argument("selection: budget must be in [1, N]");
}

}  // namespace

SelectionResult greedy_select(const CpdModel& model, int budget,
                              const SelectionOptions& options) {
    const int n = model.num_features();
    check_budget(budget, n);
    SelectionResult res;
    res.strategy = "greedy";
    res.entropy_mode = mode_name(options.entropy);
    res.seed = options.seed;

    std::vector<bool> taken(n, false);
    double g_prev = 0.0;
    for (int step = 0; step < budget; ++step) {
        std::uint64_t step_seed = derive_seed(options.seed, static_cast<std::uint64_t>(step));
        SelectionStep info;
        int best = -1;
        double best_g = -std::numeric_limits<double>::infinity();
        bool step_mc = false;
        std::vector<int> candidate(res.order);
        candidate.push_back(0);
        for (int s = 0; s < n; ++s) {
            if (taken[s]) continue;
            candidate.back() = s;
            bool used_mc = false;
            double g = eval_g(model, candidate, options, step_seed, used_mc);
            step_mc = step_mc || used_mc;
            ++info.candidates_evaluated;
            ++res.evaluations;
            if (g > best_g) {  // strict: ties keep the smallest index
                best_g = g;
                best = s;
            }
        }
        info.mode = step_mc ? "mc" : "exact";
        taken[best] = true;
        res.order.push_back(best);
        res.gains.push_back(best_g - g_prev);
        g_prev = best_g;
        res.per_step.push_back(info);
    }
    res.final_value = g_prev;
    return res;
}

SelectionResult lazy_greedy_select(const CpdModel& model, int budget,
                                   const SelectionOptions& options) {
    if (options.entropy != EntropyMode::Exact) {
        // lazy pruning relies on submodularity, which MC noise can violate
        std::cerr << "lazy_greedy_select: non-exact entropy mode; falling back to "
                     "plain greedy\n";
        return greedy_select(model, budget, options);
    }
    const int n = model.num_features();
    check_budget(budget, n);
    SelectionResult res;
    res.strategy = "lazy-greedy";
    res.entropy_mode = "exact";
    res.seed = options.seed;

    std::vector<bool> taken(n, false);
    std::vector<double> bound(n, std::numeric_limits<double>::infinity());
    std::vector<bool> fresh(n, false);
    double g_prev = 0.0;
    for (int step = 0; step < budget; ++step) {
        std::fill(fresh.begin(), fresh.end(), false);
        SelectionStep info;
        info.mode = "exact";
        for (;;) {
            int top = -1;
            for (int s = 0; s < n; ++s) {
                if (taken[s]) continue;
                if (top < 0 || bound[s] > bound[top]) top = s;
            }
            if (fresh[top]) {
                taken[top] = true;
                res.order.push_back(top);
                res.gains.push_back(bound[top]);
                g_prev += bound[top];
                break;
            }
            std::vector<int> candidate(res.order);
            candidate.push_back(top);
            bool used_mc = false;
            bound[top] = eval_g(model, candidate, options, 0, used_mc) - g_prev;
            fresh[top] = true;
            ++info.candidates_evaluated;
            ++res.evaluations;
        }
        res.per_step.push_back(info);
    }
    res.final_value = g_prev;
    return res;
}

SelectionResult remodeling_select(const DiscreteDataset& dataset, int budget, int rank,
                                  const FitConfig& fit_config, std::uint64_t seed,
                                  const SelectionOptions& options) {
    const int n = dataset.num_features;
    check_budget(budget, n);
    SelectionResult res;
    res.strategy = "remodeling";
    res.entropy_mode = mode_name(options.entropy);
    res.seed = seed;

    std::vector<bool> taken(n, false);
    double prev_value = 0.0;
    for (int step = 0; step < budget; ++step) {
        SelectionStep info;
        int best = -1;
        double best_g = -std::numeric_limits<double>::infinity();
        bool step_mc = false;
        for (int s = 0; s < n; ++s) {
            if (taken[s]) continue;
            std::vector<int> cols(res.order);
            cols.push_back(s);
            std::sort(cols.begin(), cols.end());
            try {
                FitConfig cfg = fit_config;
                cfg.rank = rank;
                cfg.seed = derive_seed(seed, static_cast<std::uint64_t>(step) * 4096 + s);
                cfg.initial_model.reset();
                CpdModel sub = em_fit(build_empirical_pmf(dataset, cols), cfg).first;
                std::vector<int> all(sub.num_features());
                std::iota(all.begin(), all.end(), 0);
                SelectionOptions local = options;
                local.seed = derive_seed(seed, static_cast<std::uint64_t>(step));
                bool used_mc = false;
                double g = eval_g(sub, all, local, local.seed, used_mc);
                step_mc = step_mc || used_mc;
                ++info.candidates_evaluated;
                ++res.evaluations;
                if (g > best_g) {
                    best_g = g;
                    best = s;
                }
            } catch (const std::exception& e) {
                std::cerr << "remodeling_select: candidate " << s << " skipped: " << e.what()
                          << "\n";
            }
        }
        if (best < 0) throw std::runtime_error("remodeling_select: every candidate failed");
        info.mode = step_mc ? "mc" : "exact";
        taken[best] = true;
        res.order.push_back(best);
        res.gains.push_back(best_g - prev_value);
        prev_value = best_g;
        res.per_step.push_back(info);
    }
    res.final_value = prev_value;
    return res;
}

SelectionResult exhaustive_select(const CpdModel& model, int budget,
                                  std::size_t subset_cap, std::size_t exact_cap) {
    const int n = model.num_features();
    check_budget(budget, n);
    double combos = 1.0;
    for (int i = 0; i < budget; ++i) combos = combos * (n - i) / (i + 1);
    if (combos > static_cast<double>(subset_cap))
        throw capacity_error("exhaustive_select: subset count exceeds the cap");

    SelectionResult res;
    res.strategy = "exhaustive";
    res.entropy_mode = "exact";

    std::vector<int> combo(budget);
    std::iota(combo.begin(), combo.end(), 0);
    std::vector<int> best_combo;
    double best_g = -std::numeric_limits<double>::infinity();
    for (;;) {
        FeatureSubset s;
        s.indices = combo;
        double g = mi_subset_latent(model, s, EntropyMode::Exact, 0, 0, exact_cap);
        ++res.evaluations;
        if (g > best_g) {  // strict: lexicographically smallest maximizer wins
            best_g = g;
            best_combo = combo;
        }
        // next lexicographic combination
        int i = budget - 1;
        while (i >= 0 && combo[i] == n - budget + i) --i;
        if (i < 0) break;
        ++combo[i];
        for (int j = i + 1; j < budget; ++j) combo[j] = combo[j - 1] + 1;
    }
    res.order = best_combo;
    res.final_value = best_g;
    res.gains.assign(best_combo.size(), 0.0);
    if (!best_combo.empty()) res.gains.back() = best_g;  // only the total is meaningful
    SelectionStep info;
    info.candidates_evaluated = static_cast<int>(res.evaluations);
    info.mode = "exact";
    res.per_step.push_back(info);
    return res;
}

}  // namespace cpdfs
