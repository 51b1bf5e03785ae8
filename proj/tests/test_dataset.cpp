#include <doctest.h>

#include "builders.hpp"
#include "mld/dataset.hpp"
#include "mld/error.hpp"

using mld::FeatureColumn;
using mld::MultilabelDataset;

TEST_CASE("construction validates the schema") {
    std::vector<FeatureColumn> cols = {{"a", {}}, {"b", {"x", "y"}}};
    std::vector<std::string> labels = {"L1", "L2"};

    CHECK_NOTHROW(MultilabelDataset(cols, labels, {{1.0, 0.0}}, {{1, 0}}));

    SUBCASE("duplicate column names") {
        CHECK_THROWS_AS(MultilabelDataset({{"a", {}}, {"a", {}}}, labels, {}, {}),
                        mld::SchemaError);
    }
    SUBCASE("label colliding with a column") {
        CHECK_THROWS_AS(MultilabelDataset(cols, {"a", "L2"}, {}, {}), mld::SchemaError);
    }
    SUBCASE("fewer than two labels") {
        CHECK_THROWS_AS(MultilabelDataset(cols, {"only"}, {}, {}), mld::SchemaError);
    }
    SUBCASE("duplicate nominal categories") {
        CHECK_THROWS_AS(MultilabelDataset({{"c", {"x", "x"}}}, labels, {}, {}),
                        mld::SchemaError);
    }
    SUBCASE("nominal index out of range") {
        CHECK_THROWS_AS(MultilabelDataset(cols, labels, {{1.0, 2.0}}, {{1, 0}}),
                        mld::SchemaError);
        CHECK_THROWS_AS(MultilabelDataset(cols, labels, {{1.0, 0.5}}, {{1, 0}}),
                        mld::SchemaError);
    }
    SUBCASE("row count mismatch") {
        CHECK_THROWS_AS(MultilabelDataset(cols, labels, {{1.0, 0.0}}, {}), mld::SchemaError);
    }
    SUBCASE("label cell out of range") {
        CHECK_THROWS_AS(MultilabelDataset(cols, labels, {{1.0, 0.0}}, {{2, 0}}),
                        mld::SchemaError);
    }
    SUBCASE("arity mismatch") {
        CHECK_THROWS_AS(MultilabelDataset(cols, labels, {{1.0}}, {{1, 0}}), mld::SchemaError);
    }
}

TEST_CASE("append_instances") {
    const auto ds = testing_data::td4();

    SUBCASE("appending nothing returns an equal dataset") {
        const auto out = ds.append_instances({}, {});
        CHECK(out.equals(ds));
    }
    SUBCASE("sizes add up and the source is untouched") {
        const auto out = ds.append_instances({{0.9}, {1.1}}, {{0, 1, 0}, {0, 0, 1}});
        CHECK(out.size() == ds.size() + 2);
        CHECK(ds.size() == 4);
        CHECK(out.same_schema(ds));
        CHECK(out.row(4)[0] == 0.9);
    }
    SUBCASE("invalid appended rows are rejected") {
        CHECK_THROWS_AS(ds.append_instances({{0.9, 1.0}}, {{0, 1, 0}}), mld::SchemaError);
        CHECK_THROWS_AS(ds.append_instances({{0.9}}, {{0, 1}}), mld::SchemaError);
    }
    SUBCASE("out-of-range nominal index is rejected") {
        MultilabelDataset nominal({{"c", {"r", "g"}}}, {"A", "B"}, {{0.0}}, {{1, 0}});
        CHECK_THROWS_AS(nominal.append_instances({{5.0}}, {{0, 1}}), mld::SchemaError);
    }
}

TEST_CASE("column_ranges covers numeric columns only") {
    MultilabelDataset ds({{"n", {}}, {"c", {"x", "y"}}}, {"A", "B"},
                         {{-2.0, 0.0}, {3.5, 1.0}}, {{1, 0}, {0, 1}});
    const auto ranges = ds.column_ranges();
    CHECK(ranges[0].first == -2.0);
    CHECK(ranges[0].second == 3.5);
    CHECK(ranges[1].first == 0.0);
    CHECK(ranges[1].second == 0.0);
}

TEST_CASE("make_folds partitions the dataset") {
    const auto base = testing_data::two_cluster_dataset(10, 3);

    const auto folds = mld::make_folds(base, 5, 42);
    REQUIRE(folds.fold_count() == 5);
    std::size_t total_test = 0;
    for (const auto& [train, test] : folds.folds) {
        CHECK(train.size() + test.size() == base.size());
        CHECK(train.same_schema(base));
        CHECK(test.same_schema(base));
        total_test += test.size();
    }
    CHECK(total_test == base.size());
    CHECK_NOTHROW(mld::check_fold_schemas(folds));

    SUBCASE("deterministic given the seed") {
        const auto again = mld::make_folds(base, 5, 42);
        for (std::size_t f = 0; f < 5; ++f) {
            CHECK(again.folds[f].first.equals(folds.folds[f].first));
            CHECK(again.folds[f].second.equals(folds.folds[f].second));
        }
    }
    SUBCASE("bad fold counts are rejected") {
        CHECK_THROWS_AS(mld::make_folds(base, 1, 0), mld::ConfigError);
        CHECK_THROWS_AS(mld::make_folds(testing_data::td4(), 5, 0), mld::ConfigError);
    }
}
