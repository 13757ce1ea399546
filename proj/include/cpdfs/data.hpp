#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cpdfs {

enum class ColumnKind { Continuous, Categorical, Label };

/// Parsed CSV column. Continuous columns keep raw doubles; categorical and
/// label columns are dense-coded in first-appearance order.
struct RawColumn {
    std::string name;
    ColumnKind kind = ColumnKind::Continuous;
    std::vector<double> numeric;          // continuous only
    std::vector<int> codes;               // categorical / label only
    std::vector<std::string> categories;  // code -> original string
    int cardinality = 0;
};

struct RawTable {
    std::vector<RawColumn> columns;
    std::size_t rows = 0;
    int label_column = -1;

    int num_feature_columns() const { return static_cast<int>(columns.size()) - 1; }
};

/// Column-kind declaration, loaded from a JSON document
/// {"columns": {"<name>": "continuous"|"categorical"|"label"}}.
struct Schema {
    std::vector<std::pair<std::string, ColumnKind>> columns;

    static Schema from_json_file(const std::string& path);
    static Schema from_json_text(const std::string& text);
    std::optional<ColumnKind> kind_of(const std::string& name) const;
};

/// Integer-coded dataset: M rows by N feature columns plus a label column.
struct DiscreteDataset {
    std::size_t num_rows = 0;
    int num_features = 0;
    std::vector<int> codes;   // row-major, num_rows x num_features
    std::vector<int> labels;  // length num_rows
    std::vector<int> cardinalities;
    int label_cardinality = 0;
    std::vector<std::vector<double>> bin_edges;  // per feature; empty unless binned
    std::vector<std::string> feature_names;

    int code(std::size_t row, int col) const {
        return codes[row * static_cast<std::size_t>(num_features) + col];
    }
    DiscreteDataset select_rows(std::span<const std::size_t> rows_idx) const;
    void validate() const;
};

struct SplitSpec {
    double train_fraction = 0.70;
    int monte_carlo_runs = 10;
    std::uint64_t seed = 0;
};

RawTable ingest_csv(const std::string& path, const Schema& schema);
RawTable ingest_csv_text(const std::string& text, const Schema& schema,
                         const std::string& origin = "<memory>");

/// Equal-width binning of continuous columns; edges are computed on
/// `fit_rows` only and out-of-range values clamp to the boundary bins.
/// Categorical columns pass through unchanged. All rows of `table` are coded.
DiscreteDataset discretize_equal_width(const RawTable& table, int bins,
                                       std::span<const std::size_t> fit_rows);

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_indices(std::size_t num_rows, const SplitSpec& spec, int run_index);

std::pair<DiscreteDataset, DiscreteDataset> split(const DiscreteDataset& dataset,
                                                  const SplitSpec& spec, int run_index);

}  // namespace cpdfs
