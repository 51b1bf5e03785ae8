#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "mld/dataset.hpp"

namespace mld {

/// Distance over feature rows: squared Euclidean on numeric columns after
/// min/max normalization to [0,1], plus a 0/1 mismatch term per nominal
/// column. The normalization ranges are fixed at construction.
class FeatureDistance {
  public:
    explicit FeatureDistance(const MultilabelDataset& ds);

    double squared(const std::vector<double>& a, const std::vector<double>& b) const;

    /// Indices of the k nearest candidates to `query` (ascending distance,
    /// ties broken by lower candidate position). `candidates` indexes into
    /// `ds`; the entry equal to `exclude` is skipped (pass npos to keep all).
    std::vector<std::size_t> nearest(const MultilabelDataset& ds,
                                     const std::vector<double>& query,
                                     const std::vector<std::size_t>& candidates,
                                     std::size_t k,
                                     std::size_t exclude = static_cast<std::size_t>(-1)) const;

  private:
    std::vector<bool> numeric_;
    std::vector<double> lo_;
    std::vector<double> inv_range_;  // 0 for constant or nominal columns
};

}  // namespace mld
