#include "cpdfs/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "cpdfs/errors.hpp"

namespace cpdfs {

namespace {
constexpr double kMassFloor = 1e-300;
}

KlResult kl_divergence(const SparseCountTensor& empirical, const CpdModel& model) {
    if (empirical.dims != model.dims)
        throw std::invalid_argument("kl_divergence: dimension mismatch");
    KlResult r;
    for (std::size_t e = 0; e < empirical.entry_count(); ++e) {
        double x = empirical.masses[e];
        double m = model.eval(empirical.tuples[e]);
        if (m <= 0.0) {
            ++r.zero_model_points;
            continue;
        }
        r.value += x * std::log(x / m);
    }
    if (r.zero_model_points > 0) {
        r.value = std::numeric_limits<double>::infinity();
    } else {
        r.value = std::max(r.value, 0.0);
    }
    return r;
}

namespace {

CpdModel random_init(const SparseCountTensor& empirical, const FitConfig& config) {
    Rng rng(derive_seed(config.seed, "em-init"));
    // every variable, including the label, gets a stochastic factor
    std::vector<int> feat(empirical.dims.begin(), empirical.dims.end() - 1);
    CpdModel m = make_random_model(feat, empirical.dims.back(), config.rank, rng);
    return m;
}

}  // namespace

std::pair<CpdModel, FitReport> em_fit(const SparseCountTensor& empirical,
                                      const FitConfig& config) {
    if (config.rank < 1) throw std::invalid_argument("em_fit: rank must be >= 1");
    if (config.max_iterations < 1)
        throw std::invalid_argument("em_fit: max_iterations must be >= 1");
    if (!(config.relative_kl_tolerance > 0.0))
        throw std::invalid_argument("em_fit: tolerance must be > 0");
    if (std::abs(empirical.mass_sum() - 1.0) > 1e-9)
        throw std::invalid_argument("em_fit: empirical tensor is not normalized");

    CpdModel model = config.initial_model ? *config.initial_model : random_init(empirical, config);
    if (model.dims != empirical.dims)
        throw std::invalid_argument("em_fit: initial model dims mismatch empirical dims");
    model.validate(1e-9);

    FitReport report;
    report.seed = config.seed;
    report.termination_reason = "max-iterations";

    const std::size_t entries = empirical.entry_count();
    const int F = config.rank;
    const int V = model.num_variables();
    std::vector<double> weights(entries * static_cast<std::size_t>(F));
    std::vector<double> lambda_new(F);
    std::vector<std::vector<double>> factors_new(V);

    for (int iter = 0; iter <= config.max_iterations; ++iter) {
        // E-step quantities over the empirical support only
        double kl = 0.0;
        for (std::size_t e = 0; e < entries; ++e) {
            const auto& t = empirical.tuples[e];
            double m = 0.0;
            double* w = &weights[e * F];
            for (int f = 0; f < F; ++f) {
                double term = model.lambda[f];
                for (int n = 0; n < V; ++n) term *= model.factor_at(n, t[n], f);
                w[f] = term;
                m += term;
            }
            if (m < kMassFloor) {
                m = kMassFloor;
                ++report.clamp_events;
            }
            kl += empirical.masses[e] * std::log(empirical.masses[e] / m);
            // stash x/m alongside; reuse w as x * w / m (the per-entry posterior mass)
            double scale = empirical.masses[e] / m;
            for (int f = 0; f < F; ++f) w[f] *= scale;
        }
        kl = std::max(kl, 0.0);
        if (std::isnan(kl))
            throw numeric_error("em_fit: NaN KL at iteration " + std::to_string(iter));
        report.kl_trace.push_back(kl);

        if (iter > 0) {
            double prev = report.kl_trace[report.kl_trace.size() - 2];
            double rel = std::abs(kl - prev) / std::max(prev, 1e-15);
            if (rel < config.relative_kl_tolerance) {
                report.termination_reason = "tolerance";
                break;
            }
        }
        if (iter == config.max_iterations) {
            report.termination_reason = "max-iterations";
            break;
        }

        // M-step: lambda and all factors from the same posterior masses
        std::fill(lambda_new.begin(), lambda_new.end(), 0.0);
        for (int n = 0; n < V; ++n)
            factors_new[n].assign(model.factors[n].size(), 0.0);
        for (std::size_t e = 0; e < entries; ++e) {
            const auto& t = empirical.tuples[e];
            const double* w = &weights[e * F];
            for (int f = 0; f < F; ++f) {
                lambda_new[f] += w[f];
                for (int n = 0; n < V; ++n)
                    factors_new[n][static_cast<std::size_t>(t[n]) * F + f] += w[f];
            }
        }
        // simplex renormalization controls floating-point drift
        double ls = std::accumulate(lambda_new.begin(), lambda_new.end(), 0.0);
        if (!(ls > 0.0))
            throw numeric_error("em_fit: vanishing mixture mass at iteration " +
                                std::to_string(iter));
        for (int f = 0; f < F; ++f) model.lambda[f] = lambda_new[f] / ls;
        for (int n = 0; n < V; ++n) {
            for (int f = 0; f < F; ++f) {
                double cs = 0.0;
                for (int i = 0; i < model.dims[n]; ++i)
                    cs += factors_new[n][static_cast<std::size_t>(i) * F + f];
                if (cs < kMassFloor) continue;  // dead component keeps its old column
                for (int i = 0; i < model.dims[n]; ++i)
                    model.factor_at(n, i, f) =
                        factors_new[n][static_cast<std::size_t>(i) * F + f] / cs;
            }
        }
        for (double l : model.lambda)
            if (std::isnan(l))
                throw numeric_error("em_fit: NaN in lambda at iteration " +
                                    std::to_string(iter));
        ++report.iterations_run;
        if (config.sweep_observer) config.sweep_observer(model, iter);
    }
    return {std::move(model), std::move(report)};
}

std::vector<double> predict_label_posterior(const CpdModel& model,
                                            std::span<const int> feature_codes) {
    if (model.label_index < 0)
        throw std::invalid_argument("predict_label_posterior: model has no label factor");
    if (static_cast<int>(feature_codes.size()) != model.num_features())
        throw std::invalid_argument("predict_label_posterior: feature tuple arity mismatch");
    const int C = model.dims[model.label_index];
    std::vector<double> posterior(C, 0.0);
    double total = 0.0;
    for (int f = 0; f < model.rank; ++f) {
        double w = model.lambda[f];
        int pos = 0;
        for (int n = 0; n < model.num_variables(); ++n) {
            if (n == model.label_index) continue;
            int code = feature_codes[pos++];
            if (code < 0) continue;  // missing features marginalize out
            if (code >= model.dims[n])
                throw std::out_of_range("predict_label_posterior: code out of range");
            w *= model.factor_at(n, code, f);
        }
        for (int y = 0; y < C; ++y) {
            double p = w * model.factor_at(model.label_index, y, f);
            posterior[y] += p;
            total += p;
        }
    }
    if (total <= 0.0) {
        // evidence impossible under the model; fall back to the label marginal
        total = 0.0;
        for (int y = 0; y < C; ++y) {
            posterior[y] = 0.0;
            for (int f = 0; f < model.rank; ++f)
                posterior[y] += model.lambda[f] * model.factor_at(model.label_index, y, f);
            total += posterior[y];
        }
    }
    for (double& p : posterior) p /= total;
    return posterior;
}

RankCvResult cross_validate_rank(const DiscreteDataset& dataset,
                                 std::span<const int> candidate_ranks, int folds,
                                 std::uint64_t seed, const FitConfig& base_config) {
    if (folds < 2) throw std::invalid_argument("cross_validate_rank: folds must be >= 2");
    if (candidate_ranks.empty())
        throw std::invalid_argument("cross_validate_rank: no candidate ranks");
    Rng rng(derive_seed(seed, "rank-cv"));
    std::vector<std::size_t> perm = random_permutation(dataset.num_rows, rng);

    RankCvResult result;
    for (int rank : candidate_ranks) {
        RankCvEntry entry;
        entry.rank = rank;
        for (int fold = 0; fold < folds; ++fold) {
            std::vector<std::size_t> train_idx, val_idx;
            for (std::size_t i = 0; i < perm.size(); ++i) {
                (static_cast<int>(i % folds) == fold ? val_idx : train_idx).push_back(perm[i]);
            }
            if (train_idx.empty() || val_idx.empty())
                throw std::invalid_argument("cross_validate_rank: fold too small");
            DiscreteDataset train = dataset.select_rows(train_idx);
            DiscreteDataset val = dataset.select_rows(val_idx);
            FitConfig cfg = base_config;
            cfg.rank = rank;
            cfg.seed = derive_seed(seed, static_cast<std::uint64_t>(rank) * 1000 + fold);
            cfg.initial_model.reset();
            CpdModel model;
            try {
                model = em_fit(build_empirical_pmf(train), cfg).first;
            } catch (const std::exception& e) {
                throw std::runtime_error("cross_validate_rank: fit failed in fold " +
                                         std::to_string(fold) + ": " + e.what());
            }
            std::size_t wrong = 0;
            std::vector<int> row(val.num_features);
            for (std::size_t r = 0; r < val.num_rows; ++r) {
                for (int c = 0; c < val.num_features; ++c) {
                    int code = val.code(r, c);
                    // unseen bin on validation row: treat as missing
                    row[c] = code < model.dims[c] ? code : -1;
                }
                auto post = predict_label_posterior(model, row);
                int best = 0;
                for (int y = 1; y < static_cast<int>(post.size()); ++y)
                    if (post[y] > post[best]) best = y;
                if (best != val.labels[r]) ++wrong;
            }
            entry.fold_errors.push_back(static_cast<double>(wrong) /
                                        static_cast<double>(val.num_rows));
        }
        entry.mean_error =
            std::accumulate(entry.fold_errors.begin(), entry.fold_errors.end(), 0.0) /
            static_cast<double>(folds);
        result.table.push_back(std::move(entry));
    }
    const RankCvEntry* best = &result.table.front();
    for (const auto& e : result.table) {
        if (e.mean_error < best->mean_error ||
            (e.mean_error == best->mean_error && e.rank < best->rank))
            best = &e;
    }
    result.best_rank = best->rank;
    return result;
}

}  // namespace cpdfs
