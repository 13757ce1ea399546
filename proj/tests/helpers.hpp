#pragma once

// Shared test fixtures plus brute-force oracles. The oracles deliberately
// recompute everything with plain nested loops over dense grids so they share
// no code path with the library kernels they check.

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "cpdfs/data.hpp"
#include "cpdfs/model.hpp"
#include "cpdfs/rng.hpp"

namespace testutil {

using cpdfs::CpdModel;
using cpdfs::DiscreteDataset;
using cpdfs::Rng;
using cpdfs::SparseCountTensor;

// Draw M rows (features + label) from the model by ancestral sampling.
inline DiscreteDataset sample_dataset(const CpdModel& model, std::size_t rows,
                                      std::uint64_t seed) {
    Rng rng(seed);
    DiscreteDataset d;
    d.num_rows = rows;
    d.num_features = model.num_features();
    for (int n = 0; n < model.num_variables(); ++n) {
        if (n == model.label_index)
            d.label_cardinality = model.dims[n];
        else
            d.cardinalities.push_back(model.dims[n]);
    }
    d.feature_names.resize(d.num_features);
    d.bin_edges.resize(d.num_features);
    std::vector<double> column;
    for (std::size_t r = 0; r < rows; ++r) {
        int f = rng.categorical(model.lambda);
        for (int n = 0; n < model.num_variables(); ++n) {
            column.resize(model.dims[n]);
            for (int i = 0; i < model.dims[n]; ++i) column[i] = model.factor_at(n, i, f);
            int code = rng.categorical(column);
            if (n == model.label_index)
                d.labels.push_back(code);
            else
                d.codes.push_back(code);
        }
    }
    return d;
}

inline SparseCountTensor random_sparse_empirical(std::span<const int> feature_dims,
                                                 int label_card, int gen_rank,
                                                 std::size_t samples, std::uint64_t seed) {
    Rng rng(cpdfs::derive_seed(seed, "gen-model"));
    CpdModel gen = cpdfs::make_random_model(feature_dims, label_card, gen_rank, rng);
    DiscreteDataset d = sample_dataset(gen, samples, cpdfs::derive_seed(seed, "gen-rows"));
    return cpdfs::build_empirical_pmf(d);
}

// Dense joint P(i_1..i_V) computed by direct summation over components.
inline std::vector<double> oracle_joint_table(const CpdModel& model) {
    std::size_t cells = 1;
    for (int dim : model.dims) cells *= static_cast<std::size_t>(dim);
    std::vector<double> table(cells, 0.0);
    std::vector<int> idx(model.num_variables(), 0);
    for (std::size_t c = 0; c < cells; ++c) {
        double p = 0.0;
        for (int f = 0; f < model.rank; ++f) {
            double term = model.lambda[f];
            for (int n = 0; n < model.num_variables(); ++n)
                term *= model.factor_at(n, idx[n], f);
            p += term;
        }
        table[c] = p;
        for (int n = model.num_variables() - 1; n >= 0; --n) {
            if (++idx[n] < model.dims[n]) break;
            idx[n] = 0;
        }
    }
    return table;
}

inline double oracle_entropy(std::span<const double> p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

// Marginal of the dense joint onto the variable positions in `keep`.
inline std::vector<double> oracle_marginal(const CpdModel& model,
                                           const std::vector<int>& keep) {
    std::vector<double> joint = oracle_joint_table(model);
    std::size_t out_cells = 1;
    for (int n : keep) out_cells *= static_cast<std::size_t>(model.dims[n]);
    std::vector<double> out(out_cells, 0.0);
    std::vector<int> idx(model.num_variables(), 0);
    for (double p : joint) {
        std::size_t o = 0;
        for (int n : keep) o = o * model.dims[n] + idx[n];
        out[o] += p;
        for (int n = model.num_variables() - 1; n >= 0; --n) {
            if (++idx[n] < model.dims[n]) break;
            idx[n] = 0;
        }
    }
    return out;
}

// I(X_S; Z) from the explicit (x_S, z) joint p = lambda(z) prod A_n(x_n, z).
inline double oracle_mi_latent(const CpdModel& model, const std::vector<int>& subset) {
    std::size_t cells = 1;
    for (int n : subset) cells *= static_cast<std::size_t>(model.dims[n]);
    std::vector<double> joint(cells * model.rank, 0.0);
    std::vector<double> px(cells, 0.0);
    std::vector<int> idx(subset.size(), 0);
    for (std::size_t x = 0; x < cells; ++x) {
        for (int f = 0; f < model.rank; ++f) {
            double p = model.lambda[f];
            for (std::size_t k = 0; k < subset.size(); ++k)
                p *= model.factor_at(subset[k], idx[k], f);
            joint[x * model.rank + f] = p;
            px[x] += p;
        }
        for (int k = static_cast<int>(subset.size()) - 1; k >= 0; --k) {
            if (++idx[k] < model.dims[subset[k]]) break;
            idx[k] = 0;
        }
    }
    double mi = 0.0;
    for (std::size_t x = 0; x < cells; ++x)
        for (int f = 0; f < model.rank; ++f) {
            double p = joint[x * model.rank + f];
            if (p > 0.0) mi += p * std::log(p / (px[x] * model.lambda[f]));
        }
    return mi;
}

// I(X_S; Y) from the dense joint marginalized onto (S, label).
inline double oracle_mi_target(const CpdModel& model, const std::vector<int>& subset) {
    std::vector<int> keep = subset;
    keep.push_back(model.label_index);
    std::vector<double> joint = oracle_marginal(model, keep);
    const int C = model.dims[model.label_index];
    std::size_t cells = joint.size() / C;
    std::vector<double> px(cells, 0.0), py(C, 0.0);
    for (std::size_t x = 0; x < cells; ++x)
        for (int y = 0; y < C; ++y) {
            px[x] += joint[x * C + y];
            py[y] += joint[x * C + y];
        }
    double mi = 0.0;
    for (std::size_t x = 0; x < cells; ++x)
        for (int y = 0; y < C; ++y) {
            double p = joint[x * C + y];
            if (p > 0.0) mi += p * std::log(p / (px[x] * py[y]));
        }
    return mi;
}

}  // namespace testutil
