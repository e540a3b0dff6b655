#include "routerec/corpus.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "routerec/error.hpp"

namespace routerec::corpus {
namespace {

Place make_place(std::string id, std::string review, std::optional<Sentiment> s = std::nullopt) {
    Place p;
    p.id = std::move(id);
    p.name = "Place " + p.id;
    p.address = "Main Street";
    p.review = std::move(review);
    p.lat = 52.0;
    p.lon = 5.0;
    p.sentiment = s;
    return p;
}

// Whitespace-split tagger, enough for corpus-level tests.
std::vector<std::string> split_review(const Place& p) {
    std::istringstream in(p.review);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

LabeledDatabase db_from(const std::vector<std::vector<TagId>>& rows, const std::vector<std::string>& labels = {}) {
    TagDictionary dict;
    TagId max_id = 0;
    for (const auto& r : rows) {
        for (auto id : r) max_id = std::max(max_id, id);
    }
    for (TagId i = 0; i <= max_id; ++i) dict.insert(i, "t" + std::to_string(1000 + i));
    LabeledDatabase db(dict);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::optional<ClassLabel> label;
        if (i < labels.size()) label = labels[i];
        db.add(Transaction::from_unsorted(rows[i]), label);
    }
    return db;
}

TEST(IngestPlaces, EmptyStreamGivesNoPlaces) {
    std::istringstream in("");
    auto r = ingest_places(in, true);
    EXPECT_TRUE(r.places.empty());
    EXPECT_TRUE(r.issues.empty());
}

TEST(IngestPlaces, LatitudeOutOfRangeIsReportedAtLineOne) {
    std::istringstream in(R"({"id":"a","name":"A","address":"x","review":"r","lat":91,"lon":0})" "\n");
    try {
        ingest_places(in, true);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1u);
        EXPECT_EQ(e.detail(), "latitude out of range");
    }
}

TEST(IngestPlaces, LenientModeSkipsAndRecords) {
    std::istringstream in(
        R"({"id":"a","name":"A","address":"x","review":"r","lat":91,"lon":0})" "\n"
        R"({"id":"b","name":"B","address":"x","review":"r","lat":1,"lon":2})" "\n"
        "not json\n");
    auto r = ingest_places(in, false);
    ASSERT_EQ(r.places.size(), 1u);
    EXPECT_EQ(r.places[0].id, "b");
    ASSERT_EQ(r.issues.size(), 2u);
    EXPECT_EQ(r.issues[0].line, 1u);
    EXPECT_EQ(r.issues[1].line, 3u);
}

TEST(IngestPlaces, ThreeValidRecordsPreserveOrder) {
    std::istringstream in(
        R"({"id":"p1","name":"Pizza One","address":"1 Main St","review":"good pizza","lat":10,"lon":20,"label":"pos"})" "\n"
        R"({"id":"p2","name":"Noodle Bar","address":"2 Side St","review":"cold noodles","lat":-10,"lon":-20,"label":"neg","extra":7})" "\n"
        "\n"
        R"({"id":"p3","name":"Cafe","address":"3 Park Ln","review":"","lat":0,"lon":180})" "\n");
    auto r = ingest_places(in, true);
    ASSERT_EQ(r.places.size(), 3u);
    EXPECT_EQ(r.places[0].id, "p1");
    EXPECT_EQ(r.places[1].id, "p2");
    EXPECT_EQ(r.places[2].id, "p3");
    EXPECT_EQ(r.places[0].sentiment, Sentiment::positive);
    EXPECT_EQ(r.places[1].sentiment, Sentiment::negative);
    EXPECT_FALSE(r.places[2].sentiment.has_value());
    EXPECT_DOUBLE_EQ(r.places[1].lat, -10.0);
}

TEST(IngestPlaces, MissingNameAndBadLabelAreErrors) {
    std::istringstream no_name(R"({"id":"a","address":"x","review":"r","lat":1,"lon":1})");
    EXPECT_THROW(ingest_places(no_name, true), ParseError);
    std::istringstream bad_label(R"({"id":"a","name":"A","lat":1,"lon":1,"label":"meh"})");
    EXPECT_THROW(ingest_places(bad_label, true), ParseError);
}

TEST(IngestPlaces, WriteThenReadRoundTrips) {
    std::vector<Place> places{make_place("1", "good pizza", Sentiment::positive), make_place("2", "bad")};
    std::stringstream buf;
    write_places(buf, places);
    auto r = ingest_places(buf, true);
    ASSERT_EQ(r.places.size(), 2u);
    EXPECT_EQ(r.places[0].review, "good pizza");
    EXPECT_EQ(r.places[0].sentiment, Sentiment::positive);
    EXPECT_FALSE(r.places[1].sentiment);
}

TEST(BuildDatabase, SharedTagIsInternedOnce) {
    auto r = build_database({make_place("1", "pizza cheap"), make_place("2", "pizza tasty")}, split_review);
    ASSERT_EQ(r.db.size(), 2u);
    auto pizza = r.db.dictionary().find("pizza");
    ASSERT_TRUE(pizza);
    EXPECT_TRUE(r.db.transaction(0).contains(*pizza));
    EXPECT_TRUE(r.db.transaction(1).contains(*pizza));
    EXPECT_EQ(r.db.dictionary().size(), 3u);
}

TEST(BuildDatabase, EmptyReviewIsDroppedAndCounted) {
    auto r = build_database({make_place("1", "pizza"), make_place("2", "")}, split_review);
    EXPECT_EQ(r.db.size(), 1u);
    EXPECT_EQ(r.dropped, 1u);
    EXPECT_EQ(r.place_index, std::vector<std::size_t>{0});
}

TEST(BuildDatabase, AllEmptyIsAnError) {
    EXPECT_THROW(build_database({make_place("1", ""), make_place("2", " ")}, split_review), InvalidArgument);
}

TEST(BuildDatabase, IdsFollowLexicographicTermOrder) {
    auto r = build_database({make_place("1", "zucchini apple mango", Sentiment::positive)}, split_review);
    const auto& dict = r.db.dictionary();
    EXPECT_EQ(dict.term(0), "apple");
    EXPECT_EQ(dict.term(1), "mango");
    EXPECT_EQ(dict.term(2), "zucchini");
    EXPECT_EQ(r.db.transaction(0).tags, (std::vector<TagId>{0, 1, 2}));
    EXPECT_EQ(r.db.label(0), "pos");
}

TEST(BuildDatabase, FourSquareShapedCorpusRespectsTagCap) {
    std::mt19937_64 rng(7);
    std::vector<Place> places;
    for (int i = 0; i < 689; ++i) {
        std::string review;
        const int n = 1 + static_cast<int>(rng() % 25);
        for (int w = 0; w < n; ++w) review += "w" + std::to_string(rng() % 300) + " ";
        places.push_back(make_place(std::to_string(i), review));
    }
    auto capped = [](const Place& p) {
        auto tags = split_review(p);
        if (tags.size() > 10) tags.resize(10);
        return tags;
    };
    auto r = build_database(places, capped);
    EXPECT_EQ(r.db.size(), 689u);
    EXPECT_LE(r.db.max_transaction_length(), 10u);
}

TEST(BuildDatabase, RebuildingGivesIdenticalDictionary) {
    std::vector<Place> places{make_place("1", "b a c"), make_place("2", "c d a")};
    EXPECT_EQ(build_database(places, split_review).db, build_database(places, split_review).db);
}

TEST(PartitionByClass, CountsPerClass) {
    auto db = db_from({{0, 1}, {1}, {2}}, {"pos", "pos", "neg"});
    auto parts = partition_by_class(db);
    ASSERT_EQ(parts.size(), 2u);
    EXPECT_EQ(parts.at("pos").size(), 2u);
    EXPECT_EQ(parts.at("neg").size(), 1u);
    for (const auto& [_, part] : parts) {
        for (const auto& l : part.labels()) EXPECT_FALSE(l.has_value());
    }
}

TEST(PartitionByClass, SingleClassIsDbWithoutLabels) {
    auto db = db_from({{0, 1}, {1, 2}}, {"pos", "pos"});
    auto parts = partition_by_class(db);
    ASSERT_EQ(parts.size(), 1u);
    EXPECT_EQ(parts.at("pos").transactions(), db.transactions());
}

TEST(PartitionByClass, UnlabeledTransactionNamesIndex) {
    auto db = db_from({{0}, {1}, {2}}, {"pos"});
    try {
        partition_by_class(db);
        FAIL();
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("index 1"), std::string::npos);
    }
}

TEST(PartitionByClass, YelpShapedSkew) {
    std::vector<std::vector<TagId>> rows;
    std::vector<std::string> labels;
    for (int i = 0; i < 400; ++i) {
        rows.push_back({static_cast<TagId>(i % 7), static_cast<TagId>(7 + i % 5)});
        labels.push_back(i < 345 ? "pos" : "neg");
    }
    auto parts = partition_by_class(db_from(rows, labels));
    EXPECT_EQ(parts.at("pos").size(), 345u);
    EXPECT_EQ(parts.at("neg").size(), 55u);
}

TEST(PartitionByClass, ReunionReproducesDatabaseAsMultiset) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<TagId>> rows;
        std::vector<std::string> labels;
        for (int i = 0; i < 30; ++i) {
            std::vector<TagId> r;
            for (int k = 0; k < 1 + static_cast<int>(rng() % 5); ++k) r.push_back(static_cast<TagId>(rng() % 12));
            rows.push_back(r);
            labels.push_back(rng() % 3 == 0 ? "neg" : "pos");
        }
        auto db = db_from(rows, labels);
        std::multiset<std::pair<std::string, Transaction>> original, rejoined;
        for (std::size_t i = 0; i < db.size(); ++i) original.emplace(*db.label(i), db.transaction(i));
        for (const auto& [label, part] : partition_by_class(db)) {
            for (const auto& t : part.transactions()) rejoined.emplace(label, t);
        }
        EXPECT_EQ(original, rejoined);
    }
}

TEST(Degrade, ZeroDeltaIsIdentity) {
    auto db = db_from({{0, 1, 2, 3}, {4}, {1, 4}}, {"pos", "neg", "pos"});
    for (std::uint64_t seed : {0ull, 1ull, 99ull}) EXPECT_EQ(degrade(db, 0.0, seed), db);
}

TEST(Degrade, HalfOfFourKeepsTwo) {
    auto db = db_from({{0, 1, 2, 3}});
    EXPECT_EQ(degrade(db, 0.5, 3).transaction(0).size(), 2u);
}

TEST(Degrade, SixtySevenPercentOfThreeKeepsOne) {
    auto db = db_from({{0, 1, 2}});
    EXPECT_EQ(degrade(db, 0.67, 3).transaction(0).size(), 1u);
}

TEST(Degrade, KeepCountArithmetic) {
    EXPECT_EQ(degraded_size(100, 0.33), 67u);
    EXPECT_EQ(degraded_size(4, 0.25), 3u);
    EXPECT_EQ(degraded_size(10, 0.67), 4u);
    EXPECT_EQ(degraded_size(1, 0.99), 1u);
    EXPECT_EQ(degraded_size(7, 0.0), 7u);
}

TEST(Degrade, RejectsDeltaOutsideUnitInterval) {
    auto db = db_from({{0, 1}});
    EXPECT_THROW(degrade(db, 1.0, 0), InvalidArgument);
    EXPECT_THROW(degrade(db, -0.1, 0), InvalidArgument);
}

TEST(Degrade, RandomDatabasesKeepExactCountsOfOriginalTags) {
    std::mt19937_64 rng(5);
    const double deltas[] = {0.0, 0.25, 0.33, 0.5, 0.67, 0.9};
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::vector<TagId>> rows;
        std::vector<std::string> labels;
        for (int i = 0; i < 25; ++i) {
            std::vector<TagId> r;
            for (int k = 0; k < 1 + static_cast<int>(rng() % 15); ++k) r.push_back(static_cast<TagId>(rng() % 40));
            rows.push_back(r);
            labels.push_back(i % 2 ? "a" : "b");
        }
        auto db = db_from(rows, labels);
        const double delta = deltas[trial % 6];
        const auto seed = rng();
        auto out = degrade(db, delta, seed);
        EXPECT_EQ(out, degrade(db, delta, seed));
        ASSERT_EQ(out.size(), db.size());
        for (std::size_t i = 0; i < db.size(); ++i) {
            const auto& before = db.transaction(i).tags;
            const auto& after = out.transaction(i).tags;
            const double exact = (1.0 - delta) * static_cast<double>(before.size());
            EXPECT_EQ(after.size(), std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(exact - 1e-9))));
            EXPECT_TRUE(std::is_sorted(after.begin(), after.end()));
            EXPECT_TRUE(std::includes(before.begin(), before.end(), after.begin(), after.end()));
            EXPECT_EQ(out.label(i), db.label(i));
        }
    }
}

TEST(Degrade, DifferentSeedsSampleDifferently) {
    std::vector<std::vector<TagId>> rows(50, std::vector<TagId>{0, 1, 2, 3, 4, 5, 6, 7});
    auto db = db_from(rows);
    EXPECT_NE(degrade(db, 0.5, 1), degrade(db, 0.5, 2));
}

TEST(TransactionFile, RoundTripWithLabelsAndDictionary) {
    auto db = db_from({{0, 3}, {2}, {1, 2, 3}}, {"pos", "neg"});
    std::stringstream tx, dict;
    write_transactions(tx, db);
    write_dictionary(dict, db.dictionary());
    auto back = read_transactions(tx, read_dictionary(dict), false);
    EXPECT_EQ(back, db);
}

TEST(TransactionFile, AutoTermsRegisterDecimalIds) {
    std::istringstream in("146 477 488 7623 | 17073\n488\n");
    auto db = read_transactions(in, {});
    ASSERT_EQ(db.size(), 2u);
    EXPECT_EQ(db.transaction(0).tags, (std::vector<TagId>{146, 477, 488, 7623}));
    EXPECT_EQ(db.label(0), "17073");
    EXPECT_FALSE(db.label(1));
    EXPECT_EQ(db.dictionary().term(7623), "7623");
}

TEST(TransactionFile, UnknownIdWithoutAutoTermsFails) {
    std::istringstream in("1 2\n");
    EXPECT_THROW(read_transactions(in, {}, false), ParseError);
    std::istringstream bad("1 x\n");
    EXPECT_THROW(read_transactions(bad, {}), ParseError);
}

}  // namespace
}  // namespace routerec::corpus
