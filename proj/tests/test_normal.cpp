#include <doctest.h>

#include <cmath>

#include "mld/error.hpp"
#include "mld/normal.hpp"
#include "mld/rng.hpp"
#include "oracles.hpp"

TEST_CASE("normal_cdf matches quadrature") {
    for (double x = -6.0; x <= 6.0; x += 0.37) {
        CHECK(std::fabs(mld::normal_cdf(x) - oracle::normal_cdf_quadrature(x)) < 1e-12);
    }
    CHECK(mld::normal_cdf(0.0) == doctest::Approx(0.5));
}

TEST_CASE("normal_quantile agrees with the quadrature oracle") {
    const double grid[] = {1e-8, 1e-6, 1e-4, 0.02,  0.02425, 0.1, 0.25, 0.5,
                           0.75, 0.875, 0.9, 0.975, 0.9999};
    for (double p : grid) {
        const double expected = oracle::normal_quantile_quadrature(p);
        CHECK(std::fabs(mld::normal_quantile(p) - expected) < 1e-9);
    }
}

TEST_CASE("normal_quantile upper tail via symmetry") {
    // The upper tail is checked against the lower one; comparing against the
    // oracle there would mostly measure how 1-p rounds in a double.
    for (double p : {1e-8, 1e-6, 1e-4, 0.01}) {
        CHECK(std::fabs(mld::normal_quantile(1.0 - p) + mld::normal_quantile(p)) < 2e-9);
    }
}

TEST_CASE("normal_quantile worked values") {
    CHECK(mld::normal_quantile(0.5) == 0.0);
    // reference value frozen from the quadrature oracle
    CHECK(mld::normal_quantile(0.875) == doctest::Approx(1.1503493803760079).epsilon(1e-12));
    CHECK(mld::normal_quantile(0.875) == doctest::Approx(1.1503).epsilon(1e-4));
}

TEST_CASE("normal_quantile round trip against the CDF") {
    for (double p : {1e-12, 1e-10, 0.42, 0.999999, 1.0 - 1e-12}) {
        const double x = mld::normal_quantile(p);
        CHECK(mld::normal_cdf(x) == doctest::Approx(p).epsilon(1e-11));
    }
}

TEST_CASE("normal_quantile rejects out-of-domain inputs") {
    CHECK_THROWS_AS(mld::normal_quantile(0.0), mld::Error);
    CHECK_THROWS_AS(mld::normal_quantile(1.0), mld::Error);
    CHECK_THROWS_AS(mld::normal_quantile(-0.25), mld::Error);
    CHECK_THROWS_AS(mld::normal_quantile(1.5), mld::Error);
}

TEST_CASE("rng streams are deterministic and seed-separated") {
    mld::Rng a(42), b(42), c(43);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64();
        all_equal = all_equal && va == b.next_u64();
        any_diff = any_diff || va != c.next_u64();
    }
    CHECK(all_equal);
    CHECK(any_diff);

    CHECK(mld::derive_seed(7, 0) != mld::derive_seed(7, 1));
    CHECK(mld::derive_seed(7, 0) == mld::derive_seed(7, 0));
}

TEST_CASE("rng normal draws have sane moments") {
    mld::Rng rng(123);
    double sum = 0.0, sumsq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        REQUIRE(std::isfinite(z));
        sum += z;
        sumsq += z * z;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::fabs(mean) < 0.03);
    CHECK(std::fabs(var - 1.0) < 0.05);
}

TEST_CASE("rng below is bounded and hits every bucket") {
    mld::Rng rng(9);
    std::vector<int> hits(5, 0);
    for (int i = 0; i < 5000; ++i) {
        const auto v = rng.below(5);
        REQUIRE(v < 5);
        ++hits[static_cast<std::size_t>(v)];
    }
    for (int h : hits) CHECK(h > 800);
}
