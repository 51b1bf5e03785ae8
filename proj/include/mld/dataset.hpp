#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mld {

/// One input attribute. An empty category list means the column is numeric;
/// otherwise cells hold indices into `categories`.
struct FeatureColumn {
    std::string name;
    std::vector<std::string> categories;

    bool numeric() const { return categories.empty(); }
};

/// Immutable table of multilabel instances: feature rows plus a dense binary
/// label matrix. Construction validates the full schema; afterwards the object
/// is read-only and safe to share across threads.
class MultilabelDataset {
  public:
    /// Validates and adopts the given schema and data. Throws SchemaError on:
    /// duplicate column/label names, label names colliding with column names,
    /// fewer than two labels, empty or duplicated nominal category lists,
    /// out-of-range nominal cells, non-binary label cells, non-integer nominal
    /// cells, or mismatched row counts / arities.
    MultilabelDataset(std::vector<FeatureColumn> columns,
                      std::vector<std::string> labels,
                      std::vector<std::vector<double>> rows,
                      std::vector<std::vector<std::uint8_t>> labelsets);

    std::size_t size() const { return rows_.size(); }
    std::size_t feature_count() const { return columns_.size(); }
    std::size_t label_count() const { return labels_.size(); }

    const std::vector<FeatureColumn>& columns() const { return columns_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<std::vector<double>>& rows() const { return rows_; }
    const std::vector<std::vector<std::uint8_t>>& labelsets() const { return labelsets_; }

    const std::vector<double>& row(std::size_t i) const { return rows_[i]; }
    const std::vector<std::uint8_t>& labelset(std::size_t i) const { return labelsets_[i]; }
    double value(std::size_t i, std::size_t col) const { return rows_[i][col]; }
    bool has_label(std::size_t i, std::size_t label) const { return labelsets_[i][label] != 0; }

    /// Number of active labels on instance i (|Y_i|).
    std::size_t active_labels(std::size_t i) const;

    bool same_schema(const MultilabelDataset& other) const;

    /// Exact structural equality: schema, feature values and label matrix.
    bool equals(const MultilabelDataset& other) const;

    /// Returns a copy extended by the given instances. The new rows are
    /// validated against this dataset's schema; *this is left untouched.
    MultilabelDataset append_instances(
        const std::vector<std::vector<double>>& new_rows,
        const std::vector<std::vector<std::uint8_t>>& new_labelsets) const;

    /// Per-column (min, max) over numeric columns; (0, 0) for nominal ones
    /// and for numeric columns of an empty dataset.
    std::vector<std::pair<double, double>> column_ranges() const;

  private:
    std::vector<FeatureColumn> columns_;
    std::vector<std::string> labels_;
    std::vector<std::vector<double>> rows_;
    std::vector<std::vector<std::uint8_t>> labelsets_;
};

/// Train/test partitions sharing one schema.
struct FoldSet {
    std::vector<std::pair<MultilabelDataset, MultilabelDataset>> folds;

    std::size_t fold_count() const { return folds.size(); }
};

/// Deals instances into `fold_count` disjoint test buckets after a seeded
/// shuffle; fold i trains on everything outside bucket i. Throws ConfigError
/// for fold_count < 2 or datasets with fewer instances than folds.
FoldSet make_folds(const MultilabelDataset& ds, std::size_t fold_count, std::uint64_t seed);

/// Validates that every member of `folds` shares `schema_of`'s schema.
void check_fold_schemas(const FoldSet& folds);

}  // namespace mld
