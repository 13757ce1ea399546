#include "cpdfs/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "cpdfs/rng.hpp"
#include "json.hpp"

namespace cpdfs {

Schema Schema::from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("schema: invalid JSON: ") + e.what());
    }
    if (!doc.contains("columns") || !doc["columns"].is_object())
        throw std::invalid_argument("schema: missing \"columns\" object");
    Schema s;
    int labels = 0;
    for (const auto& [name, kind] : doc["columns"].items()) {
        std::string k = kind.get<std::string>();
        ColumnKind ck;
        if (k == "continuous") ck = ColumnKind::Continuous;
        else if (k == "categorical") ck = ColumnKind::Categorical;
        else if (k == "label") { ck = ColumnKind::Label; ++labels; }
        else throw std::invalid_argument("schema: unknown column type \"" + k + "\"");
        s.columns.emplace_back(name, ck);
    }
    if (labels != 1)
        throw std::invalid_argument("schema: exactly one label column is required");
    return s;
}

Schema Schema::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("schema not found: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::optional<ColumnKind> Schema::kind_of(const std::string& name) const {
    for (const auto& [n, k] : columns)
        if (n == name) return k;
    return std::nullopt;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    cells.push_back(cell);
    return cells;
}

}  // namespace

RawTable ingest_csv_text(const std::string& text, const Schema& schema,
                         const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.empty())
        throw std::invalid_argument(origin + ": empty or header-less file");
    std::vector<std::string> headers = split_csv_line(line);

    RawTable table;
    for (const auto& h : headers) {
        auto kind = schema.kind_of(h);
        if (!kind)
            throw std::invalid_argument(origin + ": column \"" + h + "\" not in schema");
        RawColumn col;
        col.name = h;
        col.kind = *kind;
        if (*kind == ColumnKind::Label) table.label_column = static_cast<int>(table.columns.size());
        table.columns.push_back(std::move(col));
    }
    if (table.label_column < 0)
        throw std::invalid_argument(origin + ": no label column present");

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != table.columns.size())
            throw std::invalid_argument(origin + ": line " + std::to_string(line_no) +
                                        ": expected " + std::to_string(table.columns.size()) +
                                        " cells, got " + std::to_string(cells.size()));
        for (std::size_t c = 0; c < cells.size(); ++c) {
            RawColumn& col = table.columns[c];
            const std::string& cell = cells[c];
            if (cell.empty())
                throw std::invalid_argument(origin + ": line " + std::to_string(line_no) +
                                            ": missing value in column \"" + col.name + "\"");
            if (col.kind == ColumnKind::Continuous) {
                char* end = nullptr;
                double v = std::strtod(cell.c_str(), &end);
                if (end == cell.c_str() || *end != '\0')
                    throw std::invalid_argument(origin + ": line " + std::to_string(line_no) +
                                                ": non-numeric value \"" + cell + "\"");
                col.numeric.push_back(v);
            } else {
                auto it = std::find(col.categories.begin(), col.categories.end(), cell);
                int code;
                if (it == col.categories.end()) {
                    code = static_cast<int>(col.categories.size());
                    col.categories.push_back(cell);
                } else {
                    code = static_cast<int>(it - col.categories.begin());
                }
                col.codes.push_back(code);
            }
        }
        ++table.rows;
    }
    if (table.rows == 0) throw std::invalid_argument(origin + ": no data rows");
    for (auto& col : table.columns) col.cardinality = static_cast<int>(col.categories.size());
    return table;
}

RawTable ingest_csv(const std::string& path, const Schema& schema) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("data file not found: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ingest_csv_text(ss.str(), schema, path);
}

DiscreteDataset discretize_equal_width(const RawTable& table, int bins,
                                       std::span<const std::size_t> fit_rows) {
    if (bins < 2) throw std::invalid_argument("discretize: bins must be >= 2");
    if (fit_rows.empty()) throw std::invalid_argument("discretize: fit_rows is empty");

    DiscreteDataset d;
    d.num_rows = table.rows;
    d.num_features = table.num_feature_columns();
    d.codes.assign(d.num_rows * static_cast<std::size_t>(d.num_features), 0);
    d.bin_edges.resize(d.num_features);

    int out_col = 0;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        const RawColumn& col = table.columns[c];
        if (col.kind == ColumnKind::Label) {
            d.labels = col.codes;
            d.label_cardinality = col.cardinality;
            continue;
        }
        d.feature_names.push_back(col.name);
        if (col.kind == ColumnKind::Categorical) {
            for (std::size_t r = 0; r < table.rows; ++r)
                d.codes[r * d.num_features + out_col] = col.codes[r];
            d.cardinalities.push_back(col.cardinality);
        } else {
            double lo = col.numeric[fit_rows[0]], hi = lo;
            for (std::size_t r : fit_rows) {
                lo = std::min(lo, col.numeric[r]);
                hi = std::max(hi, col.numeric[r]);
            }
            double width = (hi - lo) / bins;
            if (width <= 0.0) {
                // constant training column: single degenerate bin
                std::cerr << "discretize: column \"" << col.name
                          << "\" is constant over the fit rows; using one bin\n";
                d.cardinalities.push_back(1);
            } else {
                std::vector<double>& edges = d.bin_edges[out_col];
                for (int b = 0; b <= bins; ++b) edges.push_back(lo + width * b);
                for (std::size_t r = 0; r < table.rows; ++r) {
                    int code = static_cast<int>(std::floor((col.numeric[r] - lo) / width));
                    code = std::clamp(code, 0, bins - 1);
                    d.codes[r * d.num_features + out_col] = code;
                }
                d.cardinalities.push_back(bins);
            }
        }
        ++out_col;
    }
    d.validate();
    return d;
}

DiscreteDataset DiscreteDataset::select_rows(std::span<const std::size_t> rows_idx) const {
    DiscreteDataset out;
    out.num_rows = rows_idx.size();
    out.num_features = num_features;
    out.cardinalities = cardinalities;
    out.label_cardinality = label_cardinality;
    out.bin_edges = bin_edges;
    out.feature_names = feature_names;
    out.codes.reserve(out.num_rows * static_cast<std::size_t>(num_features));
    out.labels.reserve(out.num_rows);
    for (std::size_t r : rows_idx) {
        for (int c = 0; c < num_features; ++c) out.codes.push_back(code(r, c));
        out.labels.push_back(labels[r]);
    }
    return out;
}

void DiscreteDataset::validate() const {
    if (codes.size() != num_rows * static_cast<std::size_t>(num_features))
        throw std::invalid_argument("dataset: code matrix size mismatch");
    if (labels.size() != num_rows)
        throw std::invalid_argument("dataset: label vector size mismatch");
    for (std::size_t r = 0; r < num_rows; ++r) {
        for (int c = 0; c < num_features; ++c)
            if (code(r, c) < 0 || code(r, c) >= cardinalities[c])
                throw std::out_of_range("dataset: code out of range at row " +
                                        std::to_string(r) + ", column " + std::to_string(c));
        if (labels[r] < 0 || labels[r] >= label_cardinality)
            throw std::out_of_range("dataset: label out of range at row " + std::to_string(r));
    }
    for (const auto& edges : bin_edges)
        for (std::size_t i = 1; i < edges.size(); ++i)
            if (!(edges[i] > edges[i - 1]))
                throw std::invalid_argument("dataset: bin edges not strictly increasing");
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_indices(std::size_t num_rows, const SplitSpec& spec, int run_index) {
    if (num_rows < 2) throw std::invalid_argument("split: need at least 2 rows");
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw std::invalid_argument("split: train_fraction must be in (0,1)");
    if (run_index < 0 || run_index >= spec.monte_carlo_runs)
        throw std::invalid_argument("split: run_index out of range");
    Rng rng(derive_seed(derive_seed(spec.seed, "split"),
                        static_cast<std::uint64_t>(run_index)));
    std::vector<std::size_t> perm = random_permutation(num_rows, rng);
    std::size_t n_train = static_cast<std::size_t>(
        std::floor(spec.train_fraction * static_cast<double>(num_rows)));
    n_train = std::clamp<std::size_t>(n_train, 1, num_rows - 1);
    std::vector<std::size_t> train(perm.begin(), perm.begin() + n_train);
    std::vector<std::size_t> test(perm.begin() + n_train, perm.end());
    return {std::move(train), std::move(test)};
}

std::pair<DiscreteDataset, DiscreteDataset> split(const DiscreteDataset& dataset,
                                                  const SplitSpec& spec, int run_index) {
    auto [train_idx, test_idx] = split_indices(dataset.num_rows, spec, run_index);
    return {dataset.select_rows(train_idx), dataset.select_rows(test_idx)};
}

}  // namespace cpdfs
