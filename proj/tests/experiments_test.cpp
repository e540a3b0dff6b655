#include "routerec/experiments.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "routerec/error.hpp"
#include "routerec/fixtures.hpp"

namespace routerec::experiments {
namespace {

using corpus::LabeledDatabase;

std::size_t count_label(const LabeledDatabase& db, const std::string& label) {
    return static_cast<std::size_t>(std::count(db.labels().begin(), db.labels().end(), label));
}

// ---- fixtures ----

TEST(Fixtures, PlantedShapeAndDeterminism) {
    const auto db = fixtures::planted_pattern_database(300, 60, 7);
    EXPECT_EQ(db.size(), 360u);
    EXPECT_EQ(count_label(db, "pos"), 300u);
    EXPECT_EQ(count_label(db, "neg"), 60u);
    EXPECT_EQ(db, fixtures::planted_pattern_database(300, 60, 7));
    EXPECT_NE(db, fixtures::planted_pattern_database(300, 60, 8));
    for (const auto& t : db.transactions()) {
        EXPECT_GE(t.size(), 8u);
        EXPECT_LE(t.size(), 9u);
    }
}

TEST(Fixtures, FoursquareShape) {
    const auto db = fixtures::foursquare_shaped_database(3);
    EXPECT_EQ(db.size(), 689u);
    EXPECT_EQ(count_label(db, "pos"), 630u);
    EXPECT_EQ(count_label(db, "neg"), 59u);
    for (std::size_t i = 0; i < db.size(); ++i) {
        EXPECT_LE(db.transaction(i).size(), *db.label(i) == "pos" ? 10u : 7u);
        for (auto tag : db.transaction(i).tags) EXPECT_LT(tag, 2800u);
    }
}

TEST(Fixtures, DiamondHasTwoSimplePaths) {
    const auto g = fixtures::diamond_graph();
    const auto paths = fixtures::all_simple_paths(g, 1, 4);
    ASSERT_EQ(paths.size(), 2u);
    EXPECT_EQ(paths[0].total_m, 2.0);
    EXPECT_EQ(paths[1].total_m, 4.0);
    EXPECT_TRUE(g.clamped().empty());
}

TEST(Fixtures, RandomGeoGraphIsDeterministic) {
    std::mt19937_64 a(5), b(5);
    const auto g1 = fixtures::random_geo_graph(a, 8, 0.5, true);
    const auto g2 = fixtures::random_geo_graph(b, 8, 0.5, true);
    std::ostringstream s1, s2;
    routing::write_graph(s1, g1);
    routing::write_graph(s2, g2);
    EXPECT_EQ(s1.str(), s2.str());
}

TEST(Fixtures, CityShape) {
    const auto city = fixtures::synthetic_city(11);
    EXPECT_EQ(city.graph.node_count(), 441u);
    EXPECT_EQ(city.graph.edge_count(), 2u * 21u * 20u);
    EXPECT_EQ(city.places.size(), 160u);
    EXPECT_EQ(city.queries.size(), 90u);
    std::set<std::string> ids;
    for (const auto& p : city.places) {
        EXPECT_NO_THROW(corpus::validate(p));
        EXPECT_TRUE(p.sentiment.has_value());
        ids.insert(p.id);
    }
    EXPECT_EQ(ids.size(), 160u);
}

// ---- splits ----

TEST(Split, StratifiedAndDisjoint) {
    const auto db = fixtures::planted_pattern_database(300, 60, 1);
    const auto s = seen_unseen_split(db, 0.8, 4);
    EXPECT_EQ(s.seen.size(), 240u + 48u);
    EXPECT_EQ(s.unseen.size(), 60u + 12u);
    EXPECT_EQ(count_label(subset(db, s.unseen), "neg"), 12u);
    std::set<std::size_t> all(s.seen.begin(), s.seen.end());
    all.insert(s.unseen.begin(), s.unseen.end());
    EXPECT_EQ(all.size(), db.size());
    const auto again = seen_unseen_split(db, 0.8, 4);
    EXPECT_EQ(again.seen, s.seen);
    EXPECT_NE(seen_unseen_split(db, 0.8, 5).seen, s.seen);
}

TEST(Split, FoldsPartitionTheIndices) {
    std::vector<std::size_t> idx{9, 3, 7, 1, 5, 0, 2};
    const auto folds = deal_folds(idx, 3);
    ASSERT_EQ(folds.size(), 3u);
    EXPECT_EQ(folds[0], (std::vector<std::size_t>{9, 1, 2}));
    EXPECT_EQ(folds[1], (std::vector<std::size_t>{3, 5}));
    EXPECT_EQ(folds[2], (std::vector<std::size_t>{7, 0}));
    EXPECT_THROW(deal_folds(idx, 0), InvalidArgument);
}

// ---- sweep ----

TEST(Sweep, RowCountIsTheProductOfTheRecipe) {
    const auto db = fixtures::planted_pattern_database(100, 20, 2);
    ExperimentRecipe r;
    r.cv_folds = {1, 2, 5};
    r.seeds = {1, 2};
    const auto rows = run_sweep(db, r);
    EXPECT_EQ(rows.size(), r.deltas.size() * 2 * 3 * 2);
    EXPECT_EQ(rows.front().cv_folds, 1u);
    EXPECT_EQ(rows.front().split, "seen");
    EXPECT_EQ(rows.front().evaluation, "resubstitution");
    for (const auto& row : rows) {
        if (row.cv_folds > 1 || row.split == "unseen") {
            EXPECT_EQ(row.evaluation, "held_out");
        }
    }
}

TEST(Sweep, SingleCellMatchesDirectClassification) {
    const auto db = fixtures::planted_pattern_database(120, 30, 3);
    ExperimentRecipe r;
    r.deltas = {0.0};
    r.seeds = {9};
    const auto rows = run_sweep(db, r);
    ASSERT_EQ(rows.size(), 2u);

    const auto split = seen_unseen_split(db, 0.8, 9);
    const auto model = classifier::train(subset(db, split.seen), r.mining).model;
    const auto unseen = subset(db, split.unseen);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < unseen.size(); ++i) {
        correct += classifier::classify(unseen.transaction(i), model).winner == *unseen.label(i);
    }
    EXPECT_DOUBLE_EQ(*rows[1].metrics.accuracy, static_cast<double>(correct) / static_cast<double>(unseen.size()));
}

TEST(Sweep, PlantedFixtureSeparatesAtFullLength) {
    const auto db = fixtures::planted_pattern_database(300, 60, 7);
    ExperimentRecipe r;
    r.deltas = {0.0, 0.67};
    const auto rows = run_sweep(db, r);
    EXPECT_GE(*rows[1].metrics.accuracy, 0.95);
    EXPECT_LT(*rows[3].metrics.accuracy, *rows[1].metrics.accuracy);
}

TEST(Sweep, CsvIsByteIdenticalAcrossRuns) {
    const auto db = fixtures::planted_pattern_database(80, 20, 4);
    ExperimentRecipe r;
    r.cv_folds = {1, 2};
    r.seeds = {1, 2, 3};
    std::ostringstream a, b;
    write_sweep_csv(a, run_sweep(db, r), database_hash(db));
    write_sweep_csv(b, run_sweep(db, r), database_hash(db));
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str().substr(0, a.str().find(',')), "cv_folds");
    EXPECT_NE(a.str().find(database_hash(db)), std::string::npos);
}

TEST(Sweep, InvalidRecipesAreRejected) {
    const auto db = fixtures::planted_pattern_database(40, 10, 1);
    auto bad = [&](auto edit) {
        ExperimentRecipe r;
        edit(r);
        EXPECT_THROW(run_sweep(db, r), InvalidArgument);
    };
    bad([](ExperimentRecipe& r) { r.seen_fraction = 1.0; });
    bad([](ExperimentRecipe& r) { r.deltas = {1.0}; });
    bad([](ExperimentRecipe& r) { r.deltas = {-0.1}; });
    bad([](ExperimentRecipe& r) { r.cv_folds = {0}; });
    bad([](ExperimentRecipe& r) { r.seeds.clear(); });
    bad([](ExperimentRecipe& r) { r.mining.minsup = 0; });
}

TEST(Sweep, UnlabeledDatabaseIsRejected) {
    std::mt19937_64 rng(1);
    EXPECT_THROW(run_sweep(fixtures::random_database(rng, 20, 5, 3), ExperimentRecipe{}), InvalidArgument);
}

}  // namespace
}  // namespace routerec::experiments
