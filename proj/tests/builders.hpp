#pragma once

// Shared dataset builders for the test suites.

#include <cstdint>
#include <vector>

#include "mld/dataset.hpp"
#include "mld/rng.hpp"

namespace testing_data {

/// The four-instance toy dataset with labels {A,B,C} and labelsets
/// {A}, {A,B}, {A}, {C}; one numeric feature so it can be encoded.
inline mld::MultilabelDataset td4() {
    return mld::MultilabelDataset(
        {{"x", {}}},
        {"A", "B", "C"},
        {{0.1}, {0.2}, {0.3}, {0.4}},
        {{1, 0, 0}, {1, 1, 0}, {1, 0, 0}, {0, 0, 1}});
}

/// Random small dataset: numeric features, at least one nonzero label.
inline mld::MultilabelDataset random_dataset(mld::Rng& rng, std::size_t max_rows = 20,
                                             std::size_t max_labels = 6) {
    const std::size_t n = 1 + rng.below(max_rows);
    const std::size_t nl = 2 + rng.below(max_labels - 1);
    const std::size_t nf = 1 + rng.below(3);

    std::vector<mld::FeatureColumn> columns;
    for (std::size_t c = 0; c < nf; ++c) {
        columns.push_back({"f" + std::to_string(c), {}});
    }
    std::vector<std::string> labels;
    for (std::size_t l = 0; l < nl; ++l) labels.push_back("L" + std::to_string(l));

    std::vector<std::vector<double>> rows(n, std::vector<double>(nf));
    std::vector<std::vector<std::uint8_t>> sets(n, std::vector<std::uint8_t>(nl, 0));
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < nf; ++c) rows[i][c] = rng.uniform() * 10.0 - 5.0;
        for (std::size_t l = 0; l < nl; ++l) {
            sets[i][l] = rng.uniform() < 0.35 ? 1 : 0;
            any = any || sets[i][l];
        }
    }
    if (!any) sets[0][0] = 1;
    return mld::MultilabelDataset(std::move(columns), std::move(labels), std::move(rows),
                                  std::move(sets));
}

/// Two well-separated clusters: cluster 0 near the origin labeled {A},
/// cluster 1 near (5,5) labeled {B}.
inline mld::MultilabelDataset two_cluster_dataset(std::size_t per_cluster, std::uint64_t seed) {
    mld::Rng rng(seed);
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<std::uint8_t>> sets;
    for (std::size_t i = 0; i < per_cluster; ++i) {
        rows.push_back({rng.uniform() * 0.4 - 0.2, rng.uniform() * 0.4 - 0.2});
        sets.push_back({1, 0});
    }
    for (std::size_t i = 0; i < per_cluster; ++i) {
        rows.push_back({5.0 + rng.uniform() * 0.4 - 0.2, 5.0 + rng.uniform() * 0.4 - 0.2});
        sets.push_back({0, 1});
    }
    return mld::MultilabelDataset({{"x", {}}, {"y", {}}}, {"A", "B"}, std::move(rows),
                                  std::move(sets));
}

/// Imbalanced synthetic MLD: `n` instances, 8 labels with a steep frequency
/// ladder (engineered MeanIR around 10) and deliberate majority/minority
/// co-occurrence so SCUMBLE is positive. Features carry label signal: per
/// label an offset direction plus noise, one nominal column tied to the
/// rarest labels.
mld::MultilabelDataset imbalanced_dataset(std::size_t n, std::uint64_t seed);

}  // namespace testing_data
