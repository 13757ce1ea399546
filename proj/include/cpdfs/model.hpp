#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cpdfs/rng.hpp"

namespace cpdfs {

/// Empirical joint PMF stored sparsely: only tuples that occurred carry mass.
/// Entries are kept sorted lexicographically so every downstream accumulation
/// runs in a fixed order.
struct SparseCountTensor {
    std::vector<int> dims;  // cardinality per variable, label last
    std::vector<std::vector<int>> tuples;
    std::vector<double> masses;  // strictly positive, sums to 1
    std::size_t total_samples = 0;

    std::size_t entry_count() const { return tuples.size(); }
    double mass_sum() const;
    void validate() const;  // throws std::invalid_argument on broken invariants
};

/// Rank-F nonnegative CPD of a joint PMF: mixture weights over a latent state
/// plus one column-stochastic factor per variable. The label variable, when
/// present, is one of the factors (by convention the last).
struct CpdModel {
    int rank = 0;
    std::vector<double> lambda;            // length F, on the simplex
    std::vector<std::vector<double>> factors;  // factor n: dims[n] x F, row-major
    std::vector<int> dims;                 // cardinality per factor
    int label_index = -1;                  // -1 when the model carries no label factor

    int num_variables() const { return static_cast<int>(factors.size()); }
    int num_features() const { return num_variables() - (label_index >= 0 ? 1 : 0); }

    double factor_at(int n, int i, int f) const {
        return factors[static_cast<std::size_t>(n)][static_cast<std::size_t>(i) * rank + f];
    }
    double& factor_at(int n, int i, int f) {
        return factors[static_cast<std::size_t>(n)][static_cast<std::size_t>(i) * rank + f];
    }

    /// P(i_1,...,i_V) = sum_f lambda(f) prod_n A_n(i_n, f)
    double eval(std::span<const int> tuple) const;

    /// Simplex invariants: lambda and every factor column nonnegative and
    /// summing to 1 within `tol`. Throws std::invalid_argument otherwise.
    void validate(double tol = 1e-9) const;
    bool invariants_hold(double tol = 1e-9) const;
};

/// Ordered distinct feature positions, never including the label.
struct FeatureSubset {
    std::vector<int> indices;
    int budget = 0;

    void validate(int num_features) const;
};

struct DiscreteDataset;  // data.hpp

SparseCountTensor build_empirical_pmf(const DiscreteDataset& dataset);
/// Empirical PMF over a column subset (plus the label). Used by the
/// per-candidate remodeling strategy.
SparseCountTensor build_empirical_pmf(const DiscreteDataset& dataset,
                                      std::span<const int> feature_columns);

/// Drop every factor not in `keep` (each column of a dropped column-stochastic
/// factor sums out to 1, so marginalization is just factor removal). Kept
/// factors appear in the order listed in `keep`; lambda is shared.
CpdModel marginalize(const CpdModel& model, const FeatureSubset& keep,
                     bool keep_label = false);

/// Ancestral sampling: f ~ lambda, then i_n ~ A_n(:,f) for each kept variable.
std::vector<std::vector<int>> sample_from_model(const CpdModel& model,
                                                const FeatureSubset& subset,
                                                std::size_t count, std::uint64_t seed);
std::vector<std::vector<int>> sample_from_model(const CpdModel& model,
                                                const FeatureSubset& subset,
                                                std::size_t count, Rng& rng);

/// Random model with simplex-normalized uniform draws; used by tests, the
/// verification suite, and synthetic data generation.
CpdModel make_random_model(std::span<const int> feature_dims, int label_cardinality,
                           int rank, Rng& rng);

/// Enumerate the full index grid of `model` (throws capacity_error past `cap`).
/// Returns the dense probability table in lexicographic index order.
std::vector<double> dense_grid(const CpdModel& model, std::size_t cap = 1000000);

}  // namespace cpdfs
