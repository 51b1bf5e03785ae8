#include "mld/distance.hpp"

#include <algorithm>

namespace mld {

FeatureDistance::FeatureDistance(const MultilabelDataset& ds) {
    const auto ranges = ds.column_ranges();
    numeric_.resize(ds.feature_count());
    lo_.resize(ds.feature_count());
    inv_range_.resize(ds.feature_count());
    for (std::size_t c = 0; c < ds.feature_count(); ++c) {
        numeric_[c] = ds.columns()[c].numeric();
        lo_[c] = ranges[c].first;
        const double span = ranges[c].second - ranges[c].first;
        inv_range_[c] = numeric_[c] && span > 0.0 ? 1.0 / span : 0.0;
    }
}

double FeatureDistance::squared(const std::vector<double>& a,
                                const std::vector<double>& b) const {
    double acc = 0.0;
    for (std::size_t c = 0; c < numeric_.size(); ++c) {
        if (numeric_[c]) {
            const double d = (a[c] - b[c]) * inv_range_[c];
            acc += d * d;
        } else {
            acc += a[c] == b[c] ? 0.0 : 1.0;
        }
    }
    return acc;
}

std::vector<std::size_t> FeatureDistance::nearest(const MultilabelDataset& ds,
                                                  const std::vector<double>& query,
                                                  const std::vector<std::size_t>& candidates,
                                                  std::size_t k,
                                                  std::size_t exclude) const {
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(candidates.size());
    for (std::size_t idx : candidates) {
        if (idx == exclude) continue;
        scored.emplace_back(squared(ds.row(idx), query), idx);
    }
    const std::size_t take = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                      scored.end());
    std::vector<std::size_t> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(scored[i].second);
    return out;
}

}  // namespace mld
