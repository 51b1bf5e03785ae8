#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mld/dataset.hpp"

namespace mld {

/// One contiguous range of the encoded vector and the column/label it maps to.
struct CodecEntry {
    enum class Kind { Numeric, Nominal, Label };
    Kind kind;
    std::size_t source;  // feature-column index, or label index for Kind::Label
    std::size_t offset;
    std::size_t width;   // 1 for numeric, K for nominal, 2 for labels
};

/// Reversible transform between dataset rows and the real-valued vectors the
/// diffusion model consumes. Numeric columns go through an empirical-CDF
/// quantile map onto a standard normal; nominal columns and labels become
/// one-hot blocks (labels as [absent, present] pairs). Immutable after fit.
class ColumnCodec {
  public:
    /// Empty codec; assign one produced by fit() or from_json() before use.
    ColumnCodec() = default;

    static ColumnCodec fit(const MultilabelDataset& ds);

    std::size_t width() const { return width_; }
    const std::vector<CodecEntry>& layout() const { return entries_; }
    std::size_t label_count() const { return labels_.size(); }

    /// Encoded offset of label `l`'s [absent, present] block.
    std::size_t label_offset(std::size_t l) const;

    std::vector<double> encode_row(const std::vector<double>& features,
                                   const std::vector<std::uint8_t>& labelset) const;
    std::vector<std::vector<double>> encode_dataset(const MultilabelDataset& ds) const;

    /// Inverse transform. Numeric z-scores map back through the empirical CDF
    /// (clamped to the observed [min, max]); nominal blocks take the argmax
    /// (ties to the lowest index); a label is present iff its present cell
    /// strictly exceeds its absent cell.
    std::pair<std::vector<double>, std::vector<std::uint8_t>> decode(
        std::span<const double> encoded) const;

    /// Schema the codec was fitted on.
    const std::vector<FeatureColumn>& columns() const { return columns_; }
    const std::vector<std::string>& labels() const { return labels_; }

    nlohmann::json to_json() const;
    static ColumnCodec from_json(const nlohmann::json& j);

    /// FNV-1a hash of the serialized codec; model files store it so a trained
    /// model refuses to run against a different codec.
    std::uint64_t hash() const;

  private:
    std::vector<FeatureColumn> columns_;
    std::vector<std::string> labels_;
    std::vector<CodecEntry> entries_;
    std::vector<std::vector<double>> refs_;  // aligned with entries_; empty unless numeric
    std::size_t width_ = 0;
};

}  // namespace mld
