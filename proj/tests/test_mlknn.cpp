#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "builders.hpp"
#include "mld/error.hpp"
#include "mld/mlknn.hpp"

using namespace mld;

namespace {

// From-scratch reimplementation of the posterior for one query, kept
// independent of MlknnModel: naive distance loops, explicit count tables.
std::vector<double> posterior_oracle(const MultilabelDataset& ds, int k, double s,
                                     const std::vector<double>& query) {
    const std::size_t n = ds.size();
    const std::size_t nl = ds.label_count();
    const auto ranges = ds.column_ranges();

    auto dist2 = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double acc = 0.0;
        for (std::size_t c = 0; c < ds.feature_count(); ++c) {
            if (ds.columns()[c].numeric()) {
                const double span = ranges[c].second - ranges[c].first;
                const double d = span > 0.0 ? (a[c] - b[c]) / span : 0.0;
                acc += d * d;
            } else {
                acc += a[c] == b[c] ? 0.0 : 1.0;
            }
        }
        return acc;
    };
    auto knn = [&](const std::vector<double>& row, std::size_t exclude) {
        std::vector<std::pair<double, std::size_t>> scored;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == exclude) continue;
            scored.emplace_back(dist2(ds.row(i), row), i);
        }
        std::sort(scored.begin(), scored.end());
        std::vector<std::size_t> out;
        for (int i = 0; i < k; ++i) out.push_back(scored[std::size_t(i)].second);
        return out;
    };

    std::vector<double> prior(nl);
    for (std::size_t l = 0; l < nl; ++l) {
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i) count += ds.has_label(i, l) ? 1 : 0;
        prior[l] = (s + double(count)) / (2.0 * s + double(n));
    }

    const std::size_t bins = std::size_t(k) + 1;
    std::vector<std::vector<double>> c1(nl, std::vector<double>(bins, 0.0));
    std::vector<std::vector<double>> c0(nl, std::vector<double>(bins, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const auto nbs = knn(ds.row(i), i);
        for (std::size_t l = 0; l < nl; ++l) {
            std::size_t j = 0;
            for (auto nb : nbs) j += ds.has_label(nb, l) ? 1 : 0;
            (ds.has_label(i, l) ? c1 : c0)[l][j] += 1.0;
        }
    }

    const auto nbs = knn(query, std::size_t(-1));
    std::vector<double> scores(nl);
    for (std::size_t l = 0; l < nl; ++l) {
        std::size_t j = 0;
        for (auto nb : nbs) j += ds.has_label(nb, l) ? 1 : 0;
        double sum1 = std::accumulate(c1[l].begin(), c1[l].end(), 0.0);
        double sum0 = std::accumulate(c0[l].begin(), c0[l].end(), 0.0);
        const double pe1 = (s + c1[l][j]) / (s * double(bins) + sum1);
        const double pe0 = (s + c0[l][j]) / (s * double(bins) + sum0);
        const double w1 = prior[l] * pe1;
        const double w0 = (1.0 - prior[l]) * pe0;
        scores[l] = w1 / (w1 + w0);
    }
    return scores;
}

}  // namespace

TEST_CASE("priors follow the smoothed frequency formula") {
    // 10 instances, label A on all, label B on none
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<std::uint8_t>> sets;
    for (int i = 0; i < 10; ++i) {
        rows.push_back({double(i)});
        sets.push_back({1, 0});
    }
    MultilabelDataset ds({{"x", {}}}, {"A", "B"}, std::move(rows), std::move(sets));
    const auto model = MlknnModel::train(ds, 3, 1.0);
    CHECK(model.priors()[0] == doctest::Approx(11.0 / 12.0).epsilon(1e-14));
    CHECK(model.priors()[1] == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
}

TEST_CASE("training preconditions") {
    const auto ds = testing_data::two_cluster_dataset(3, 1);  // 6 instances
    CHECK_THROWS_AS(MlknnModel::train(ds, 6, 1.0), Error);
    CHECK_THROWS_AS(MlknnModel::train(ds, 10, 1.0), Error);
    CHECK_NOTHROW(MlknnModel::train(ds, 5, 1.0));
    CHECK_THROWS_AS(MlknnModel::train(ds, 0, 1.0), ConfigError);
    CHECK_THROWS_AS(MlknnModel::train(ds, 3, 0.0), ConfigError);
}

TEST_CASE("well-separated clusters classify cleanly") {
    const auto ds = testing_data::two_cluster_dataset(20, 7);
    const auto model = MlknnModel::train(ds, 3, 1.0);

    const auto inside_a = model.predict({0.05, -0.02});
    CHECK(inside_a.bipartition[0] == 1);
    CHECK(inside_a.bipartition[1] == 0);

    const auto inside_b = model.predict({5.1, 4.9});
    CHECK(inside_b.bipartition[0] == 0);
    CHECK(inside_b.bipartition[1] == 1);

    SUBCASE("a training row predicts its own cluster") {
        const auto p = model.predict(ds.row(0));
        CHECK(p.bipartition[0] == 1);
        CHECK(p.scores[0] > 0.5);
    }
    SUBCASE("scores stay in [0, 1]") {
        mld::Rng rng(3);
        for (int i = 0; i < 50; ++i) {
            const auto p = model.predict({rng.uniform() * 10.0 - 2.0,
                                          rng.uniform() * 10.0 - 2.0});
            for (double sc : p.scores) {
                CHECK(sc >= 0.0);
                CHECK(sc <= 1.0);
                CHECK(std::isfinite(sc));
            }
        }
    }
    SUBCASE("schema mismatch is rejected") {
        CHECK_THROWS_AS(model.predict({1.0}), SchemaError);
    }
}

TEST_CASE("posteriors match the brute-force oracle") {
    mld::Rng rng(911);
    for (int trial = 0; trial < 12; ++trial) {
        auto ds = testing_data::random_dataset(rng, 18, 4);
        if (ds.size() < 6) continue;
        const int k = 3;
        const auto model = MlknnModel::train(ds, k, 1.0);
        for (int q = 0; q < 4; ++q) {
            std::vector<double> query(ds.feature_count());
            for (auto& v : query) v = rng.uniform() * 10.0 - 5.0;
            const auto expected = posterior_oracle(ds, k, 1.0, query);
            const auto got = model.predict(query);
            for (std::size_t l = 0; l < ds.label_count(); ++l) {
                CHECK(got.scores[l] == doctest::Approx(expected[l]).epsilon(1e-12));
                CHECK(got.bipartition[l] == (expected[l] > 0.5 ? 1 : 0));
            }
        }
    }
}
