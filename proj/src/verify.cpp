#include "cpdfs/verify.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "cpdfs/info.hpp"
#include "cpdfs/selection.hpp"

namespace cpdfs {

namespace {

std::vector<std::vector<int>> all_subsets(int n) {
    std::vector<std::vector<int>> subsets;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<int> s;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) s.push_back(i);
        subsets.push_back(std::move(s));
    }
    return subsets;
}

double g_of(const CpdModel& model, const std::vector<int>& indices) {
    if (indices.empty()) return 0.0;
    FeatureSubset s;
    s.indices = indices;
    return mi_subset_latent(model, s, EntropyMode::Exact);
}

VerifyCheck check_invariants(const CpdModel& model) {
    VerifyCheck c{"model-invariants", model.invariants_hold(1e-9), ""};
    if (!c.passed) c.detail = "lambda or a factor column violates its simplex";
    return c;
}

VerifyCheck check_monotone_submodular(const CpdModel& model) {
    const int n = model.num_features();
    // cache g on every subset, keyed by bitmask
    std::vector<double> g(1u << n, 0.0);
    for (const auto& s : all_subsets(n)) {
        unsigned mask = 0;
        for (int i : s) mask |= 1u << i;
        g[mask] = g_of(model, s);
    }
    VerifyCheck c{"monotone-submodular", true, ""};
    for (unsigned b = 0; b < (1u << n) && c.passed; ++b) {
        for (unsigned a = b;; a = (a - 1) & b) {  // all subsets a of b
            for (int x = 0; x < n; ++x) {
                if (b & (1u << x)) continue;
                double da = g[a | (1u << x)] - g[a];
                double db = g[b | (1u << x)] - g[b];
                if (da < db - 1e-10) {
                    c.passed = false;
                    c.detail = "diminishing returns violated";
                }
                if (db < -1e-10) {
                    c.passed = false;
                    c.detail = "monotonicity violated";
                }
            }
            if (a == 0) break;
        }
    }
    return c;
}

VerifyCheck check_band(const CpdModel& model) {
    VerifyCheck c{"claim1-band", true, ""};
    double gap = bandgap_constant(model);
    for (const auto& s : all_subsets(model.num_features())) {
        FeatureSubset fs;
        fs.indices = s;
        double g = mi_subset_latent(model, fs, EntropyMode::Exact);
        double f = mi_subset_target(model, fs);
        if (!(g - gap - 1e-10 <= f && f <= g + 1e-10)) {
            c.passed = false;
            std::ostringstream ss;
            ss << "band violated: g=" << g << " f=" << f << " gap=" << gap;
            c.detail = ss.str();
            break;
        }
    }
    return c;
}

VerifyCheck check_greedy_guarantee(const CpdModel& model) {
    VerifyCheck c{"greedy-vs-exhaustive", true, ""};
    int k = std::min(3, model.num_features());
    SelectionResult greedy = greedy_select(model, k);
    SelectionResult best = exhaustive_select(model, k);
    double bound = (1.0 - 1.0 / std::exp(1.0)) * best.final_value;
    if (greedy.final_value < bound - 1e-8) {
        c.passed = false;
        c.detail = "greedy value below the (1-1/e) bound";
    }
    return c;
}

VerifyCheck check_mc_entropy(const CpdModel& model, std::size_t samples,
                             std::uint64_t seed) {
    VerifyCheck c{"mc-vs-exact-entropy", true, ""};
    FeatureSubset s;
    int take = std::min(3, model.num_features());
    for (int i = 0; i < take; ++i) s.indices.push_back(i);
    double exact = joint_entropy_exact(model, s).value;
    EntropyEstimate mc = joint_entropy_mc(model, s, samples, seed);
    double band = 4.0 * std::max(mc.standard_error, 1e-12);
    if (std::abs(mc.value - exact) > band) {
        c.passed = false;
        std::ostringstream ss;
        ss << "MC " << mc.value << " vs exact " << exact << " (se " << mc.standard_error
           << ")";
        c.detail = ss.str();
    }
    return c;
}

void merge(std::vector<VerifyCheck>& into, const VerifyCheck& check) {
    for (auto& c : into) {
        if (c.name == check.name) {
            if (!check.passed && c.passed) {
                c.passed = false;
                c.detail = check.detail;
            }
            return;
        }
    }
    into.push_back(check);
}

}  // namespace

std::vector<VerifyCheck> verify_model(const CpdModel& model, const VerifyOptions& options) {
    std::vector<VerifyCheck> checks;
    VerifyCheck inv = check_invariants(model);
    checks.push_back(inv);
    if (!inv.passed) return checks;  // the rest assumes a valid model
    checks.push_back(check_monotone_submodular(model));
    checks.push_back(check_band(model));
    checks.push_back(check_greedy_guarantee(model));
    checks.push_back(check_mc_entropy(model, options.mc_samples,
                                      derive_seed(options.seed, "verify-mc")));
    return checks;
}

std::vector<VerifyCheck> verify_random_models(const VerifyOptions& options) {
    std::vector<VerifyCheck> aggregate;
    Rng rng(derive_seed(options.seed, "verify-models"));
    for (int t = 0; t < options.trials; ++t) {
        std::vector<int> dims{3, 3, 3, 3, 3};
        CpdModel model = make_random_model(dims, 3, 3, rng);
        VerifyOptions per = options;
        per.seed = derive_seed(options.seed, static_cast<std::uint64_t>(t));
        for (const auto& c : verify_model(model, per)) merge(aggregate, c);
    }
    return aggregate;
}

}  // namespace cpdfs
