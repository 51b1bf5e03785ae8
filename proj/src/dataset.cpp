#include "mld/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "mld/error.hpp"
#include "mld/rng.hpp"

namespace mld {

namespace {

void check_cell(const FeatureColumn& col, double v, std::size_t row) {
    if (col.numeric()) {
        if (!std::isfinite(v)) {
            throw SchemaError("row " + std::to_string(row) + ", column '" + col.name +
                              "': non-finite numeric value");
        }
        return;
    }
    const double idx = std::floor(v);
    if (idx != v || v < 0.0 || idx >= static_cast<double>(col.categories.size())) {
        throw SchemaError("row " + std::to_string(row) + ", column '" + col.name +
                          "': nominal index " + std::to_string(v) + " outside [0, " +
                          std::to_string(col.categories.size()) + ")");
    }
}

void check_instance(const std::vector<FeatureColumn>& columns, std::size_t label_count,
                    const std::vector<double>& row, const std::vector<std::uint8_t>& labelset,
                    std::size_t index) {
    if (row.size() != columns.size()) {
        throw SchemaError("row " + std::to_string(index) + ": expected " +
                          std::to_string(columns.size()) + " feature values, got " +
                          std::to_string(row.size()));
    }
    if (labelset.size() != label_count) {
        throw SchemaError("row " + std::to_string(index) + ": expected " +
                          std::to_string(label_count) + " label cells, got " +
                          std::to_string(labelset.size()));
    }
    for (std::size_t c = 0; c < columns.size(); ++c) check_cell(columns[c], row[c], index);
    for (std::uint8_t bit : labelset) {
        if (bit > 1) {
            throw SchemaError("row " + std::to_string(index) + ": label cells must be 0 or 1");
        }
    }
}

}  // namespace

MultilabelDataset::MultilabelDataset(std::vector<FeatureColumn> columns,
                                     std::vector<std::string> labels,
                                     std::vector<std::vector<double>> rows,
                                     std::vector<std::vector<std::uint8_t>> labelsets)
    : columns_(std::move(columns)),
      labels_(std::move(labels)),
      rows_(std::move(rows)),
      labelsets_(std::move(labelsets)) {
    if (labels_.size() < 2) {
        throw SchemaError("a multilabel dataset needs at least 2 labels, got " +
                          std::to_string(labels_.size()));
    }
    std::unordered_set<std::string> names;
    for (const auto& col : columns_) {
        if (!names.insert(col.name).second) {
            throw SchemaError("duplicate column name '" + col.name + "'");
        }
        if (!col.numeric()) {
            std::unordered_set<std::string> cats(col.categories.begin(), col.categories.end());
            if (cats.size() != col.categories.size()) {
                throw SchemaError("column '" + col.name + "' has duplicate categories");
            }
        }
    }
    for (const auto& label : labels_) {
        if (!names.insert(label).second) {
            throw SchemaError("label '" + label + "' duplicates another label or column name");
        }
    }
    if (rows_.size() != labelsets_.size()) {
        throw SchemaError("feature rows (" + std::to_string(rows_.size()) +
                          ") and labelset rows (" + std::to_string(labelsets_.size()) +
                          ") differ in count");
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        check_instance(columns_, labels_.size(), rows_[i], labelsets_[i], i);
    }
}

std::size_t MultilabelDataset::active_labels(std::size_t i) const {
    const auto& set = labelsets_[i];
    return static_cast<std::size_t>(std::count(set.begin(), set.end(), std::uint8_t{1}));
}

bool MultilabelDataset::same_schema(const MultilabelDataset& other) const {
    if (labels_ != other.labels_ || columns_.size() != other.columns_.size()) return false;
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        if (columns_[c].name != other.columns_[c].name ||
            columns_[c].categories != other.columns_[c].categories) {
            return false;
        }
    }
    return true;
}

bool MultilabelDataset::equals(const MultilabelDataset& other) const {
    return same_schema(other) && rows_ == other.rows_ && labelsets_ == other.labelsets_;
}

MultilabelDataset MultilabelDataset::append_instances(
    const std::vector<std::vector<double>>& new_rows,
    const std::vector<std::vector<std::uint8_t>>& new_labelsets) const {
    if (new_rows.size() != new_labelsets.size()) {
        throw SchemaError("appended rows and labelsets differ in count");
    }
    auto rows = rows_;
    auto labelsets = labelsets_;
    rows.insert(rows.end(), new_rows.begin(), new_rows.end());
    labelsets.insert(labelsets.end(), new_labelsets.begin(), new_labelsets.end());
    return MultilabelDataset(columns_, labels_, std::move(rows), std::move(labelsets));
}

std::vector<std::pair<double, double>> MultilabelDataset::column_ranges() const {
    std::vector<std::pair<double, double>> ranges(columns_.size(), {0.0, 0.0});
    if (rows_.empty()) return ranges;
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        if (!columns_[c].numeric()) continue;
        double lo = rows_[0][c], hi = rows_[0][c];
        for (const auto& row : rows_) {
            lo = std::min(lo, row[c]);
            hi = std::max(hi, row[c]);
        }
        ranges[c] = {lo, hi};
    }
    return ranges;
}

FoldSet make_folds(const MultilabelDataset& ds, std::size_t fold_count, std::uint64_t seed) {
    if (fold_count < 2) {
        throw ConfigError("fold count must be at least 2, got " + std::to_string(fold_count));
    }
    if (ds.size() < fold_count) {
        throw ConfigError("dataset has " + std::to_string(ds.size()) +
                          " instances, fewer than " + std::to_string(fold_count) + " folds");
    }
    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, 0x666f6c64));  // "fold" stream
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
    }

    std::vector<std::vector<std::size_t>> buckets(fold_count);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        buckets[pos % fold_count].push_back(order[pos]);
    }
    for (auto& bucket : buckets) std::sort(bucket.begin(), bucket.end());

    auto subset = [&](const std::vector<std::size_t>& idx) {
        std::vector<std::vector<double>> rows;
        std::vector<std::vector<std::uint8_t>> labelsets;
        rows.reserve(idx.size());
        labelsets.reserve(idx.size());
        for (std::size_t i : idx) {
            rows.push_back(ds.row(i));
            labelsets.push_back(ds.labelset(i));
        }
        return MultilabelDataset(ds.columns(), ds.labels(), std::move(rows),
                                 std::move(labelsets));
    };

    FoldSet out;
    for (std::size_t f = 0; f < fold_count; ++f) {
        std::vector<std::size_t> train_idx;
        for (std::size_t g = 0; g < fold_count; ++g) {
            if (g == f) continue;
            train_idx.insert(train_idx.end(), buckets[g].begin(), buckets[g].end());
        }
        std::sort(train_idx.begin(), train_idx.end());
        out.folds.emplace_back(subset(train_idx), subset(buckets[f]));
    }
    return out;
}

void check_fold_schemas(const FoldSet& folds) {
    if (folds.folds.empty()) return;
    const auto& reference = folds.folds.front().first;
    for (const auto& [train, test] : folds.folds) {
        if (!train.same_schema(reference) || !test.same_schema(reference)) {
            throw SchemaError("fold members disagree on column/label schema");
        }
    }
}

}  // namespace mld
