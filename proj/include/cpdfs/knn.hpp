#pragma once

#include <span>
#include <vector>

#include "cpdfs/data.hpp"
#include "cpdfs/model.hpp"

namespace cpdfs {

enum class KnnMetric { Hamming, Manhattan };

/// 1-NN over the coded feature subset. Distance ties break toward the
/// smallest training-row index.
std::vector<int> knn_classify(const DiscreteDataset& train, const DiscreteDataset& test,
                              const FeatureSubset& subset,
                              KnnMetric metric = KnnMetric::Hamming);

double accuracy(std::span<const int> predicted, std::span<const int> actual);

}  // namespace cpdfs
