#include "cpdfs/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "cpdfs/data.hpp"
#include "cpdfs/errors.hpp"

namespace cpdfs {

double SparseCountTensor::mass_sum() const {
    double s = 0.0;
    for (double m : masses) s += m;
    return s;
}

void SparseCountTensor::validate() const {
    if (tuples.size() != masses.size())
        throw std::invalid_argument("sparse tensor: tuple/mass size mismatch");
    for (std::size_t e = 0; e < tuples.size(); ++e) {
        const auto& t = tuples[e];
        if (t.size() != dims.size())
            throw std::invalid_argument("sparse tensor: tuple arity mismatch");
        for (std::size_t n = 0; n < t.size(); ++n) {
            if (t[n] < 0 || t[n] >= dims[n])
                throw std::invalid_argument("sparse tensor: index out of range in variable " +
                                            std::to_string(n));
        }
        if (!(masses[e] > 0.0))
            throw std::invalid_argument("sparse tensor: nonpositive stored mass");
    }
    if (std::abs(mass_sum() - 1.0) > 1e-9)
        throw std::invalid_argument("sparse tensor: masses do not sum to 1");
}

double CpdModel::eval(std::span<const int> tuple) const {
    if (static_cast<int>(tuple.size()) != num_variables())
        throw std::invalid_argument("model eval: tuple arity mismatch");
    for (int n = 0; n < num_variables(); ++n) {
        if (tuple[n] < 0 || tuple[n] >= dims[n])
            throw std::out_of_range("model eval: index out of range in variable " +
                                    std::to_string(n));
    }
    double total = 0.0;
    for (int f = 0; f < rank; ++f) {
        double term = lambda[f];
        for (int n = 0; n < num_variables(); ++n) term *= factor_at(n, tuple[n], f);
        total += term;
    }
    return total;
}

bool CpdModel::invariants_hold(double tol) const {
    if (rank < 1 || static_cast<int>(lambda.size()) != rank) return false;
    if (factors.size() != dims.size()) return false;
    double ls = 0.0;
    for (double l : lambda) {
        if (l < -tol) return false;
        ls += l;
    }
    if (std::abs(ls - 1.0) > tol) return false;
    for (int n = 0; n < num_variables(); ++n) {
        if (static_cast<int>(factors[n].size()) != dims[n] * rank) return false;
        for (int f = 0; f < rank; ++f) {
            double cs = 0.0;
            for (int i = 0; i < dims[n]; ++i) {
                double a = factor_at(n, i, f);
                if (a < -tol) return false;
                cs += a;
            }
            if (std::abs(cs - 1.0) > tol) return false;
        }
    }
    return true;
}

void CpdModel::validate(double tol) const {
    if (!invariants_hold(tol))
        throw std::invalid_argument("CPD model: simplex invariants violated");
}

void FeatureSubset::validate(int num_features) const {
    std::vector<int> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        if (sorted[k] < 0 || sorted[k] >= num_features)
            throw std::invalid_argument("feature subset: index out of range");
        if (k > 0 && sorted[k] == sorted[k - 1])
            throw std::invalid_argument("feature subset: duplicate index");
    }
    if (budget > 0 && static_cast<int>(indices.size()) > budget)
        throw std::invalid_argument("feature subset: size exceeds budget");
}

namespace {

SparseCountTensor pmf_from_counts(const std::map<std::vector<int>, std::size_t>& counts,
                                  std::vector<int> dims, std::size_t total) {
    SparseCountTensor t;
    t.dims = std::move(dims);
    t.total_samples = total;
    t.tuples.reserve(counts.size());
    t.masses.reserve(counts.size());
    const double inv = 1.0 / static_cast<double>(total);
    for (const auto& [tuple, c] : counts) {
        t.tuples.push_back(tuple);
        t.masses.push_back(static_cast<double>(c) * inv);
    }
    return t;
}

}  // namespace

SparseCountTensor build_empirical_pmf(const DiscreteDataset& dataset) {
    std::vector<int> all(dataset.num_features);
    std::iota(all.begin(), all.end(), 0);
    return build_empirical_pmf(dataset, all);
}

SparseCountTensor build_empirical_pmf(const DiscreteDataset& dataset,
                                      std::span<const int> feature_columns) {
    if (dataset.num_rows == 0) throw std::invalid_argument("empirical PMF: empty dataset");
    std::map<std::vector<int>, std::size_t> counts;
    std::vector<int> tuple(feature_columns.size() + 1);
    for (std::size_t r = 0; r < dataset.num_rows; ++r) {
        for (std::size_t k = 0; k < feature_columns.size(); ++k) {
            int col = feature_columns[k];
            int c = dataset.code(r, col);
            if (c < 0 || c >= dataset.cardinalities[col])
                throw std::out_of_range("empirical PMF: code out of range for variable " +
                                        std::to_string(col) + " at row " + std::to_string(r));
            tuple[k] = c;
        }
        int y = dataset.labels[r];
        if (y < 0 || y >= dataset.label_cardinality)
            throw std::out_of_range("empirical PMF: label out of range at row " +
                                    std::to_string(r));
        tuple.back() = y;
        ++counts[tuple];
    }
    std::vector<int> dims;
    dims.reserve(feature_columns.size() + 1);
    for (int col : feature_columns) dims.push_back(dataset.cardinalities[col]);
    dims.push_back(dataset.label_cardinality);
    return pmf_from_counts(counts, std::move(dims), dataset.num_rows);
}

CpdModel marginalize(const CpdModel& model, const FeatureSubset& keep, bool keep_label) {
    if (keep.indices.empty() && !keep_label)
        throw std::invalid_argument("marginalize: keep set is empty");
    keep.validate(model.num_features());
    CpdModel out;
    out.rank = model.rank;
    out.lambda = model.lambda;
    for (int s : keep.indices) {
        out.factors.push_back(model.factors[s]);
        out.dims.push_back(model.dims[s]);
    }
    if (keep_label) {
        if (model.label_index < 0)
            throw std::invalid_argument("marginalize: model has no label factor");
        out.factors.push_back(model.factors[model.label_index]);
        out.dims.push_back(model.dims[model.label_index]);
        out.label_index = static_cast<int>(out.factors.size()) - 1;
    }
    return out;
}

std::vector<std::vector<int>> sample_from_model(const CpdModel& model,
                                                const FeatureSubset& subset,
                                                std::size_t count, Rng& rng) {
    if (count < 1) throw std::invalid_argument("sample_from_model: count must be >= 1");
    subset.validate(model.num_features());
    std::vector<std::vector<int>> samples(count);
    std::vector<double> column(0);
    for (std::size_t t = 0; t < count; ++t) {
        int f = rng.categorical(model.lambda);
        std::vector<int> tuple(subset.indices.size());
        for (std::size_t k = 0; k < subset.indices.size(); ++k) {
            int n = subset.indices[k];
            column.resize(model.dims[n]);
            for (int i = 0; i < model.dims[n]; ++i) column[i] = model.factor_at(n, i, f);
            tuple[k] = rng.categorical(column);
        }
        samples[t] = std::move(tuple);
    }
    return samples;
}

std::vector<std::vector<int>> sample_from_model(const CpdModel& model,
                                                const FeatureSubset& subset,
                                                std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    return sample_from_model(model, subset, count, rng);
}

CpdModel make_random_model(std::span<const int> feature_dims, int label_cardinality,
                           int rank, Rng& rng) {
    CpdModel m;
    m.rank = rank;
    m.lambda.resize(rank);
    double ls = 0.0;
    for (int f = 0; f < rank; ++f) {
        m.lambda[f] = rng.uniform() + 1e-6;
        ls += m.lambda[f];
    }
    for (double& l : m.lambda) l /= ls;
    std::vector<int> dims(feature_dims.begin(), feature_dims.end());
    if (label_cardinality > 0) dims.push_back(label_cardinality);
    for (int d : dims) {
        std::vector<double> fac(static_cast<std::size_t>(d) * rank);
        for (int f = 0; f < rank; ++f) {
            double cs = 0.0;
            for (int i = 0; i < d; ++i) {
                fac[static_cast<std::size_t>(i) * rank + f] = rng.uniform() + 1e-6;
                cs += fac[static_cast<std::size_t>(i) * rank + f];
            }
            for (int i = 0; i < d; ++i) fac[static_cast<std::size_t>(i) * rank + f] /= cs;
        }
        m.factors.push_back(std::move(fac));
        m.dims.push_back(d);
    }
    m.label_index = label_cardinality > 0 ? static_cast<int>(m.dims.size()) - 1 : -1;
    return m;
}

std::vector<double> dense_grid(const CpdModel& model, std::size_t cap) {
    std::size_t cells = 1;
    for (int d : model.dims) {
        cells *= static_cast<std::size_t>(d);
        if (cells > cap)
            throw capacity_error("dense grid of " + std::to_string(model.num_variables()) +
                                 " variables exceeds the enumeration cap");
    }
    std::vector<double> grid(cells);
    std::vector<int> idx(model.num_variables(), 0);
    for (std::size_t c = 0; c < cells; ++c) {
        grid[c] = model.eval(idx);
        for (int n = model.num_variables() - 1; n >= 0; --n) {
            if (++idx[n] < model.dims[n]) break;
            idx[n] = 0;
        }
    }
    return grid;
}

}  // namespace cpdfs
