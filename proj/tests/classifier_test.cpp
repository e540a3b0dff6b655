#include "routerec/classifier.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "routerec/hashing.hpp"

namespace routerec::classifier {
namespace {

namespace fs = std::filesystem;
using corpus::LabeledDatabase;
using corpus::TagDictionary;
using corpus::Transaction;
using krimp::CodeTable;

constexpr TagId a = 0, b = 1, c = 2, d = 3, x = 4;

TagDictionary dict_of(TagId n) {
    TagDictionary dict;
    for (TagId i = 0; i < n; ++i) dict.insert(i, "t" + std::string(1, static_cast<char>('a' + i)));
    return dict;
}

Transaction tx(std::vector<TagId> tags) { return Transaction::from_unsorted(std::move(tags)); }

// pos: {a,b} x 10, neg: {c,d} x 10.
LabeledDatabase planted_pair() {
    LabeledDatabase db(dict_of(5));
    for (int i = 0; i < 10; ++i) db.add(tx({a, b}), "pos");
    for (int i = 0; i < 10; ++i) db.add(tx({c, d}), "neg");
    return db;
}

krimp::MiningOptions minsup(std::uint64_t m) {
    krimp::MiningOptions o;
    o.minsup = m;
    return o;
}

fs::path scratch_dir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    auto dir = fs::temp_directory_path() / (std::string("routerec_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(dir);
    return dir;
}

TEST(Hashing, MatchesGitBlobIds) {
    EXPECT_EQ(git_blob_sha1(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    EXPECT_EQ(git_blob_sha1("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST(Train, PlantedPatternsLandInTheirClassTables) {
    auto result = train(planted_pair(), minsup(1));
    const auto& m = result.model;
    EXPECT_EQ(m.classes(), (std::vector<ClassLabel>{"neg", "pos"}));
    EXPECT_TRUE(m.table("pos").contains({a, b}));
    EXPECT_FALSE(m.table("pos").contains({c, d}));
    EXPECT_TRUE(m.table("neg").contains({c, d}));
    EXPECT_EQ(result.reports.at("pos").transactions, 10u);
    EXPECT_LT(result.reports.at("pos").final.total_bits, result.reports.at("pos").initial.total_bits);
}

TEST(Train, TablesArePaddedToTheSharedAlphabet) {
    auto m = train(planted_pair(), minsup(1)).model;
    EXPECT_EQ(m.alphabet(), (std::vector<TagId>{a, b, c, d}));
    for (const auto& label : m.classes()) {
        for (TagId t : m.alphabet()) EXPECT_TRUE(m.table(label).has_singleton(t)) << label << " " << t;
    }
    const auto& pos = m.table("pos");
    EXPECT_EQ(pos[pos.find({c})].usage, 0u);
    EXPECT_EQ(pos[pos.find({c})].support, 0u);
}

TEST(Train, SingleClassIsRejected) {
    LabeledDatabase db(dict_of(2));
    db.add(tx({a, b}), "pos");
    EXPECT_THROW(train(db, minsup(1)), InvalidArgument);
}

TEST(Train, MissingRequiredClassIsNamed) {
    try {
        train(planted_pair(), minsup(1), {"pos", "neutral"});
        FAIL();
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("neutral"), std::string::npos);
    }
}

TEST(Train, UnlabeledTransactionIsRejected) {
    auto db = planted_pair();
    db.add(tx({a}));
    EXPECT_THROW(train(db, minsup(1)), Error);
}

CodeTable uniform_ab() { return CodeTable({{{a}, 1, 1}, {{b}, 1, 1}}); }

TEST(EncodeLength, SingleTagUnderUniformPair) {
    EXPECT_DOUBLE_EQ(encode_length(tx({a}), uniform_ab()), 1.0);
}

TEST(EncodeLength, PairSumsBothCodes) {
    EXPECT_DOUBLE_EQ(encode_length(tx({a, b}), uniform_ab()), 2.0);
}

TEST(EncodeLength, UnknownTagIsDropped) {
    EXPECT_DOUBLE_EQ(encode_length(tx({a, x}), uniform_ab()), encode_length(tx({a}), uniform_ab()));
}

TEST(EncodeLength, FullyUnknownTransactionIsOutOfVocabulary) {
    EXPECT_THROW(encode_length(tx({x}), uniform_ab()), OutOfVocabulary);
    EXPECT_THROW(encode_length(tx({}), uniform_ab()), OutOfVocabulary);
}

TEST(EncodeLength, ModelLengthsMatchHandArithmetic) {
    // pos: {a,b} usage 10, a/b/c/d usage 0. Laplace: 11 + 4 = 15.
    auto m = train(planted_pair(), minsup(1)).model;
    EXPECT_NEAR(encode_length(tx({a, b}), m, "pos"), std::log2(15.0 / 11.0), 1e-12);
    EXPECT_NEAR(encode_length(tx({a, b}), m, "neg"), 2 * std::log2(15.0), 1e-12);
    EXPECT_NEAR(encode_length(tx({a, c}), m, "pos"), 2 * std::log2(15.0), 1e-12);
}

TEST(Classify, PlantedPatternGoesToItsClass) {
    auto m = train(planted_pair(), minsup(1)).model;
    auto got = classify(tx({a, b}), m);
    EXPECT_EQ(got.winner, "pos");
    EXPECT_LT(got.lengths.at("pos"), got.lengths.at("neg"));
    EXPECT_EQ(classify(tx({c, d, x}), m).winner, "neg");
}

TEST(Classify, TieGoesToSmallestLabel) {
    std::map<ClassLabel, CodeTable> tables;
    tables.emplace("zeta", uniform_ab());
    tables.emplace("alpha", uniform_ab());
    auto m = SentimentModel::assemble(std::move(tables));
    auto got = classify(tx({a, b}), m);
    EXPECT_EQ(got.winner, "alpha");
    EXPECT_EQ(got.lengths.at("alpha"), got.lengths.at("zeta"));
}

TEST(Classify, OutOfVocabularyEverywhereThrows) {
    auto m = train(planted_pair(), minsup(1)).model;
    EXPECT_THROW(classify(tx({x}), m), OutOfVocabulary);
}

TEST(Classify, WinnerAttainsMinimumOnRandomInput) {
    std::mt19937_64 rng(11);
    LabeledDatabase db(dict_of(8));
    for (int i = 0; i < 60; ++i) {
        std::vector<TagId> t;
        for (int k = 0; k < 4; ++k) t.push_back(static_cast<TagId>(rng() % 8));
        db.add(tx(t), i % 3 ? "pos" : "neg");
    }
    auto m = train(db, minsup(2)).model;
    for (int trial = 0; trial < 200; ++trial) {
        auto got = classify(tx({static_cast<TagId>(rng() % 8), static_cast<TagId>(rng() % 8)}), m);
        for (const auto& [label, bits] : got.lengths) {
            EXPECT_TRUE(std::isfinite(bits));
            EXPECT_LE(got.lengths.at(got.winner), bits);
        }
    }
}

TEST(Classify, UniformExtraPaddingKeepsPlantedWinners) {
    auto trained = train(planted_pair(), minsup(1)).model;
    auto padded = SentimentModel::assemble(trained.tables(), {100, 101, 102});
    const auto db = planted_pair();
    for (const auto& t : db.transactions()) {
        EXPECT_EQ(classify(t, trained).winner, classify(t, padded).winner);
        EXPECT_NE(classify(t, trained).lengths.at("pos"), classify(t, padded).lengths.at("pos"));
    }
}

std::string replay_path(const std::string& name) {
    return std::string(ROUTEREC_DATA_DIR) + "/replay/" + name + ".ct";
}

class PrintedTables : public ::testing::TestWithParam<const char*> {};

TEST_P(PrintedTables, QueryGoesToFirstClassOverFullAlphabet) {
    std::ifstream in(replay_path(GetParam()));
    ASSERT_TRUE(in);
    auto m = model_from_code_tables(in, 2800);
    EXPECT_EQ(m.alphabet().size(), 2800u);
    EXPECT_EQ(classify(tx({146, 477, 488, 7623}), m).winner, "17073");
}

INSTANTIATE_TEST_SUITE_P(Replay, PrintedTables, ::testing::Values("cv1_fo", "cv2_fo", "cv2_fi"));

TEST(PrintedTablesExcerpt, HandArithmetic) {
    // Without padding: 17073 usages (1,4,1,1) + 1 each -> total 11;
    // 17074 usages (0,0,1,0) + 1 each -> total 5.
    std::ifstream in(replay_path("cv1_fo"));
    auto got = classify(tx({146, 477, 488, 7623}), model_from_code_tables(in));
    EXPECT_NEAR(got.lengths.at("17073"), 3 * std::log2(11.0 / 2) + std::log2(11.0 / 5), 1e-12);
    EXPECT_NEAR(got.lengths.at("17074"), 3 * std::log2(5.0) + std::log2(5.0 / 2), 1e-12);
}

TEST(Truncate, DeltaZeroOnTrainingDataReproducesClassSizes) {
    auto db = planted_pair();
    auto m = train(db, minsup(1)).model;
    auto r = truncate_classification(db, 0.0, 7, m);
    EXPECT_EQ(r.degraded, db);
    EXPECT_EQ(r.partitions.at("pos").size(), 10u);
    EXPECT_EQ(r.partitions.at("neg").size(), 10u);
    EXPECT_TRUE(r.unclassifiable.empty());
    for (const auto& p : r.predictions) EXPECT_EQ(p.truth, p.predicted);
}

TEST(Truncate, PartitionCoversEveryTransactionOnce) {
    std::mt19937_64 rng(5);
    LabeledDatabase db(dict_of(10));
    for (int i = 0; i < 80; ++i) {
        std::vector<TagId> t;
        for (int k = 0; k < 5; ++k) t.push_back(static_cast<TagId>(rng() % 10));
        db.add(tx(t), i % 4 ? "pos" : "neg");
    }
    auto m = train(db, minsup(2)).model;
    for (double delta : {0.0, 0.33, 0.67}) {
        auto r = truncate_classification(db, delta, 99, m);
        std::vector<int> seen(r.degraded.size(), 0);
        for (const auto& [_, idx] : r.partitions) {
            for (auto i : idx) ++seen[i];
        }
        for (auto i : r.unclassifiable) ++seen[i];
        for (int s : seen) EXPECT_EQ(s, 1);
        EXPECT_EQ(r.predictions.size(), db.size());
        std::size_t members = 0;
        for (const auto& label : m.classes()) members += r.members(label).size();
        EXPECT_EQ(members + r.unclassifiable.size(), db.size());
    }
}

TEST(Truncate, UnknownOnlyTransactionIsUnclassifiable) {
    auto db = planted_pair();
    auto m = train(db, minsup(1)).model;
    db.add(tx({x}), "pos");
    auto r = truncate_classification(db, 0.0, 1, m);
    EXPECT_EQ(r.unclassifiable, (std::vector<std::size_t>{20}));
    EXPECT_FALSE(r.predictions.back().predicted);
}

TEST(Truncate, DeterministicForFixedSeed) {
    auto db = planted_pair();
    auto m = train(db, minsup(1)).model;
    auto r1 = truncate_classification(db, 0.5, 42, m);
    auto r2 = truncate_classification(db, 0.5, 42, m);
    EXPECT_EQ(r1.partitions, r2.partitions);
    EXPECT_EQ(r1.degraded, r2.degraded);
}

TEST(Histogram, IdenticalTablesPutAllMassInZeroBin) {
    auto m = train(planted_pair(), minsup(1)).model;
    const auto db = planted_pair();
    auto h = dissimilarity_histogram(db.transactions(), m.table("pos"), m.table("pos"));
    EXPECT_EQ(h.bins, (std::map<long long, std::size_t>{{0, db.size()}}));
}

TEST(Histogram, OwnClassTransactionsAreStrictlyPositive) {
    auto db = planted_pair();
    auto m = train(db, minsup(1)).model;
    auto pos = corpus::partition_by_class(db).at("pos");
    auto h = dissimilarity_histogram(pos.transactions(), m.table("pos"), m.table("neg"), 1.0);
    ASSERT_EQ(h.differences.size(), 10u);
    // (neg - pos) = 2 log2 15 - log2(15/11) for every {a,b}.
    for (double diff : h.differences) EXPECT_NEAR(diff, 2 * std::log2(15.0) - std::log2(15.0 / 11.0), 1e-12);
    for (const auto& [bin, _] : h.bins) EXPECT_GE(bin, 0);
}

TEST(Histogram, BinTotalsConserveCount) {
    auto db = planted_pair();
    db.add(tx({a, c}), "pos");
    db.add(tx({x}), "neg");
    auto m = train(planted_pair(), minsup(1)).model;
    auto h = dissimilarity_histogram(db.transactions(), m.table("pos"), m.table("neg"), 0.5);
    EXPECT_EQ(h.total() + h.skipped, db.size());
    EXPECT_EQ(h.skipped, 1u);
    EXPECT_THROW(dissimilarity_histogram(db.transactions(), m.table("pos"), m.table("neg"), 0.0), InvalidArgument);
}

TEST(Histogram, NegativeDifferencesUseFloorBins) {
    CodeTable cheap({{{a}, 7, 7}, {{b}, 1, 1}});
    CodeTable dear({{{a}, 1, 1}, {{b}, 7, 7}});
    std::vector<Transaction> db{tx({a})};
    auto h = dissimilarity_histogram(db, dear, cheap, 1.0);
    // log2(10/8) - log2(10/2) = -2 exactly.
    EXPECT_NEAR(h.differences[0], -2.0, 1e-12);
    EXPECT_EQ(h.bins.begin()->first, -2);
}

TEST(ModelIo, RoundTripPreservesTablesAndHash) {
    auto db = planted_pair();
    auto m = train(db, minsup(1)).model;
    auto dir = scratch_dir();
    save_model(dir.string(), m, db.dictionary());
    EXPECT_TRUE(fs::exists(dir / "pos.ct"));
    EXPECT_TRUE(fs::exists(dir / "neg.ct"));
    auto loaded = load_model(dir.string());
    EXPECT_EQ(loaded.model.tables(), m.tables());
    EXPECT_EQ(loaded.model.minsup(), 1u);
    EXPECT_EQ(loaded.dictionary, db.dictionary());
    EXPECT_EQ(loaded.content_hash.size(), 40u);
    save_model(dir.string(), m, db.dictionary());
    EXPECT_EQ(load_model(dir.string()).content_hash, loaded.content_hash);
    fs::remove_all(dir);
}

TEST(ModelIo, TamperedTableIsRejected) {
    auto db = planted_pair();
    auto dir = scratch_dir();
    save_model(dir.string(), train(db, minsup(1)).model, db.dictionary());
    std::ofstream(dir / "pos.ct", std::ios::app) << "\n";
    EXPECT_THROW(load_model(dir.string()), Error);
    fs::remove_all(dir);
}

TEST(ModelIo, MissingDirectoryIsIoError) {
    EXPECT_THROW(load_model("/nonexistent/routerec/model"), IoError);
}

TEST(ModelIo, UnsafeLabelIsRejected) {
    std::map<ClassLabel, CodeTable> tables;
    tables.emplace("../up", uniform_ab());
    tables.emplace("ok", uniform_ab());
    auto dir = scratch_dir();
    EXPECT_THROW(save_model(dir.string(), SentimentModel::assemble(std::move(tables)), dict_of(2)), InvalidArgument);
    fs::remove_all(dir);
}

TEST(Train, DeterministicAcrossRuns) {
    std::mt19937_64 rng(21);
    LabeledDatabase db(dict_of(12));
    for (int i = 0; i < 100; ++i) {
        std::vector<TagId> t;
        for (int k = 0; k < 6; ++k) t.push_back(static_cast<TagId>(rng() % 12));
        db.add(tx(t), i % 5 ? "pos" : "neg");
    }
    EXPECT_EQ(train(db, minsup(2)).model.tables(), train(db, minsup(2)).model.tables());
}

}  // namespace
}  // namespace routerec::classifier
