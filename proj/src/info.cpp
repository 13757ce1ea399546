#include "cpdfs/info.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cpdfs/errors.hpp"

namespace cpdfs {

namespace {

constexpr double kLogFloor = 1e-300;

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

std::size_t grid_cells(const CpdModel& model, const FeatureSubset& subset,
                       std::size_t cap) {
    std::size_t cells = 1;
    for (int n : subset.indices) {
        cells *= static_cast<std::size_t>(model.dims[n]);
        if (cells > cap) return cap + 1;
    }
    return cells;
}

}  // namespace

double conditional_entropy_given_latent(const CpdModel& model, int n) {
    if (n < 0 || n >= model.num_features())
        throw std::out_of_range("conditional entropy: feature index out of range");
    double h = 0.0;
    for (int i = 0; i < model.dims[n]; ++i) {
        for (int f = 0; f < model.rank; ++f) {
            double a = model.factor_at(n, i, f);
            if (a > 0.0) h -= a * model.lambda[f] * std::log(a);
        }
    }
    return h;
}

EntropyEstimate joint_entropy_exact(const CpdModel& model, const FeatureSubset& subset,
                                    std::size_t cap) {
    subset.validate(model.num_features());
    if (subset.indices.empty())
        throw std::invalid_argument("joint_entropy_exact: empty subset");
    if (grid_cells(model, subset, cap) > cap)
        throw capacity_error(
            "joint_entropy_exact: grid exceeds the enumeration cap; use the "
            "Monte-Carlo estimator");
    CpdModel sub = marginalize(model, subset, false);
    std::vector<double> grid = dense_grid(sub, cap);
    double h = 0.0;
    for (double p : grid) h -= xlogx(p);
    EntropyEstimate est;
    est.value = std::max(h, 0.0);
    est.method = EntropyEstimate::Method::Exact;
    return est;
}

EntropyEstimate joint_entropy_mc(const CpdModel& model, const FeatureSubset& subset,
                                 std::size_t samples, Rng& rng) {
    subset.validate(model.num_features());
    if (subset.indices.empty())
        throw std::invalid_argument("joint_entropy_mc: empty subset");
    if (samples < 1) throw std::invalid_argument("joint_entropy_mc: samples must be >= 1");
    CpdModel sub = marginalize(model, subset, false);
    FeatureSubset all;
    all.indices.resize(sub.num_variables());
    std::iota(all.indices.begin(), all.indices.end(), 0);
    auto draws = sample_from_model(sub, all, samples, rng);

    EntropyEstimate est;
    est.method = EntropyEstimate::Method::MonteCarlo;
    est.sample_count = samples;
    double sum = 0.0, sumsq = 0.0;
    for (const auto& t : draws) {
        double p = sub.eval(t);
        if (p < kLogFloor) {
            p = kLogFloor;
            ++est.clamp_events;
        }
        double v = -std::log(p);
        sum += v;
        sumsq += v * v;
    }
    double n = static_cast<double>(samples);
    est.value = sum / n;
    if (samples > 1) {
        double var = std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0));
        est.standard_error = std::sqrt(var / n);
    }
    return est;
}

EntropyEstimate joint_entropy_mc(const CpdModel& model, const FeatureSubset& subset,
                                 std::size_t samples, std::uint64_t seed) {
    Rng rng(seed);
    return joint_entropy_mc(model, subset, samples, rng);
}

double mi_subset_latent(const CpdModel& model, const FeatureSubset& subset,
                        EntropyMode mode, std::size_t samples, std::uint64_t seed,
                        std::size_t cap) {
    subset.validate(model.num_features());
    if (subset.indices.empty())
        throw std::invalid_argument("mi_subset_latent: empty subset");
    bool exact = mode == EntropyMode::Exact ||
                 (mode == EntropyMode::Auto && grid_cells(model, subset, cap) <= cap);
    EntropyEstimate hs = exact ? joint_entropy_exact(model, subset, cap)
                               : joint_entropy_mc(model, subset, samples, seed);
    double mi = hs.value;
    for (int n : subset.indices) mi -= conditional_entropy_given_latent(model, n);
    if (exact) {
        if (mi < -1e-10)
            throw numeric_error("mi_subset_latent: exact MI below -1e-10");
        mi = std::max(mi, 0.0);
    }
    return mi;
}

double mi_subset_target(const CpdModel& model, const FeatureSubset& subset,
                        std::size_t cap) {
    subset.validate(model.num_features());
    if (subset.indices.empty())
        throw std::invalid_argument("mi_subset_target: empty subset");
    if (model.label_index < 0)
        throw std::invalid_argument("mi_subset_target: model has no label factor");
    const int C = model.dims[model.label_index];
    std::size_t cells = grid_cells(model, subset, cap);
    if (cells > cap || cells * static_cast<std::size_t>(C) > cap)
        throw capacity_error("mi_subset_target: grid exceeds the enumeration cap");

    CpdModel sub = marginalize(model, subset, true);
    std::vector<double> joint = dense_grid(sub, cap);  // x_S major, y minor
    std::vector<double> px(cells, 0.0), py(C, 0.0);
    for (std::size_t x = 0; x < cells; ++x) {
        for (int y = 0; y < C; ++y) {
            double p = joint[x * C + y];
            px[x] += p;
            py[y] += p;
        }
    }
    double mi = 0.0;
    for (std::size_t x = 0; x < cells; ++x) {
        for (int y = 0; y < C; ++y) {
            double p = joint[x * C + y];
            if (p > 0.0) mi += p * std::log(p / (px[x] * py[y]));
        }
    }
    if (mi < -1e-10) throw numeric_error("mi_subset_target: MI below -1e-10");
    return std::max(mi, 0.0);
}

double bandgap_constant(const CpdModel& model, std::size_t cap) {
    if (model.label_index < 0)
        throw std::invalid_argument("bandgap_constant: model has no label factor");
    FeatureSubset full;
    full.indices.resize(model.num_features());
    std::iota(full.indices.begin(), full.indices.end(), 0);
    const int C = model.dims[model.label_index];
    const int F = model.rank;
    std::size_t cells = grid_cells(model, full, cap);
    if (cells > cap || cells * static_cast<std::size_t>(C * F) > cap * 4)
        throw capacity_error("bandgap_constant: grid exceeds the enumeration cap");

    // I(X_V; {Z,Y}) over the explicit (x, z, y) joint
    CpdModel sub = marginalize(model, full, false);
    std::vector<double> px = dense_grid(sub, cap);
    double i_xzy = 0.0;
    std::vector<int> idx(full.indices.size(), 0);
    for (std::size_t x = 0; x < cells; ++x) {
        for (int f = 0; f < F; ++f) {
            double base = model.lambda[f];
            for (std::size_t k = 0; k < full.indices.size(); ++k)
                base *= model.factor_at(full.indices[k], idx[k], f);
            for (int y = 0; y < C; ++y) {
                double p = base * model.factor_at(model.label_index, y, f);
                double pzy = model.lambda[f] * model.factor_at(model.label_index, y, f);
                if (p > 0.0) i_xzy += p * std::log(p / (px[x] * pzy));
            }
        }
        for (int k = static_cast<int>(idx.size()) - 1; k >= 0; --k) {
            if (++idx[k] < model.dims[full.indices[k]]) break;
            idx[k] = 0;
        }
    }
    double gap = i_xzy - mi_subset_target(model, full, cap);
    if (gap < -1e-10) throw numeric_error("bandgap_constant: negative conditional MI");
    return std::max(gap, 0.0);
}

}  // namespace cpdfs
