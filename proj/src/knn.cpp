#include "cpdfs/knn.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace cpdfs {

std::vector<int> knn_classify(const DiscreteDataset& train, const DiscreteDataset& test,
                              const FeatureSubset& subset, KnnMetric metric) {
    if (subset.indices.empty()) throw std::invalid_argument("knn: empty feature subset");
    if (train.num_rows == 0) throw std::invalid_argument("knn: empty training set");
    if (train.num_features != test.num_features || train.cardinalities != test.cardinalities)
        throw std::invalid_argument("knn: train/test cardinality mismatch");
    subset.validate(train.num_features);

    std::vector<int> predictions(test.num_rows);
    for (std::size_t t = 0; t < test.num_rows; ++t) {
        long best_dist = -1;
        std::size_t best_row = 0;
        for (std::size_t r = 0; r < train.num_rows; ++r) {
            long dist = 0;
            for (int c : subset.indices) {
                int a = train.code(r, c), b = test.code(t, c);
                dist += metric == KnnMetric::Hamming ? (a != b ? 1 : 0) : std::labs(a - b);
            }
            if (best_dist < 0 || dist < best_dist) {  // ties keep the earliest row
                best_dist = dist;
                best_row = r;
            }
        }
        predictions[t] = train.labels[best_row];
    }
    return predictions;
}

double accuracy(std::span<const int> predicted, std::span<const int> actual) {
    if (predicted.size() != actual.size() || predicted.empty())
        throw std::invalid_argument("accuracy: length mismatch or empty input");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] == actual[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace cpdfs
