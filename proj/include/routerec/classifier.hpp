#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "routerec/corpus.hpp"
#include "routerec/error.hpp"
#include "routerec/krimp.hpp"

namespace routerec::classifier {

using corpus::ClassLabel;
using corpus::TagId;

// Raised when a transaction has no tag inside the model alphabet.
class OutOfVocabulary : public Error {
public:
    OutOfVocabulary() : Error("out-of-vocabulary transaction") {}
};

// Per-class code tables over one shared alphabet. Immutable once built;
// Laplace-smoothed code lengths are computed once at construction.
class SentimentModel {
public:
    SentimentModel() = default;

    // Pads every table with (0,0) singletons so all tables cover the union of
    // their own singletons and extra_alphabet. Needs at least two classes.
    static SentimentModel assemble(std::map<ClassLabel, krimp::CodeTable> tables,
                                   const std::vector<TagId>& extra_alphabet = {}, std::uint64_t minsup = 0);

    const std::map<ClassLabel, krimp::CodeTable>& tables() const { return tables_; }
    const krimp::CodeTable& table(const ClassLabel& label) const;
    std::vector<ClassLabel> classes() const;
    const std::vector<TagId>& alphabet() const { return alphabet_; }
    bool in_alphabet(TagId tag) const;
    std::uint64_t minsup() const { return minsup_; }

    // Laplace code lengths, aligned with table(label).entries().
    const std::vector<double>& smoothed_lengths(const ClassLabel& label) const;

private:
    std::map<ClassLabel, krimp::CodeTable> tables_;
    std::map<ClassLabel, std::vector<double>> lengths_;
    std::vector<TagId> alphabet_;
    std::uint64_t minsup_ = 0;
};

struct ClassTrainingReport {
    std::size_t transactions = 0;
    krimp::CompressionStats initial;
    krimp::CompressionStats final;
    std::size_t candidates = 0;
    std::size_t accepted = 0;
};

struct TrainResult {
    SentimentModel model;
    std::map<ClassLabel, ClassTrainingReport> reports;
};

// Partitions by class, compresses each partition (concurrently) and pads the
// tables to the shared alphabet. Throws on unlabeled transactions, fewer
// than two classes, or an empty class in `required_classes`.
TrainResult train(const corpus::LabeledDatabase& db, const krimp::MiningOptions& options,
                  const std::vector<ClassLabel>& required_classes = {});

// Tags of t that lie in the table's alphabet.
corpus::Transaction restrict_to_alphabet(const corpus::Transaction& t, const krimp::CodeTable& ct);

// Sum of Laplace-smoothed code lengths over the cover of t, after dropping
// tags outside the table's alphabet. Throws OutOfVocabulary if none remain.
double encode_length(const corpus::Transaction& t, const krimp::CodeTable& ct);

// Same, against one class of a model (uses the cached lengths).
double encode_length(const corpus::Transaction& t, const SentimentModel& model, const ClassLabel& label);

struct Classification {
    ClassLabel winner;
    std::map<ClassLabel, double> lengths;
};

// Shortest encoding wins; ties go to the lexicographically smallest label.
Classification classify(const corpus::Transaction& t, const SentimentModel& model);

struct Prediction {
    std::optional<ClassLabel> truth;
    std::optional<ClassLabel> predicted;  // nullopt: unclassifiable
};

struct TruncationResult {
    corpus::LabeledDatabase degraded;
    // Indices into degraded, per winning class.
    std::map<ClassLabel, std::vector<std::size_t>> partitions;
    std::vector<std::size_t> unclassifiable;
    std::vector<Prediction> predictions;  // aligned with degraded

    std::vector<corpus::Transaction> members(const ClassLabel& label) const;
};

// Degrades db with (delta, seed) and assigns every transaction to its
// shortest-encoding class. Out-of-vocabulary transactions are listed as
// unclassifiable instead of being guessed.
TruncationResult truncate_classification(const corpus::LabeledDatabase& db, double delta, std::uint64_t seed,
                                         const SentimentModel& model);

struct Histogram {
    double bin_width = 0.0;
    // Bin i holds differences in [i * bin_width, (i + 1) * bin_width).
    std::map<long long, std::size_t> bins;
    std::vector<double> differences;
    std::size_t skipped = 0;  // out-of-vocabulary transactions

    std::size_t total() const;
};

inline constexpr double kDefaultHistogramBinWidth = 50.0;

// encode_length under `second` minus encode_length under `first` for every
// transaction; positive values mean the transaction is more typical of the
// first table's class.
Histogram dissimilarity_histogram(std::span<const corpus::Transaction> db, const krimp::CodeTable& first,
                                  const krimp::CodeTable& second, double bin_width = kDefaultHistogramBinWidth);

// Model directory: one "<class>.ct" per class, dictionary.tsv and
// manifest.json (classes, minsup, alphabet size, per-file and overall
// content hashes).
void save_model(const std::string& dir, const SentimentModel& model, const corpus::TagDictionary& dictionary);

struct LoadedModel {
    SentimentModel model;
    corpus::TagDictionary dictionary;
    std::string content_hash;
};

// Throws IoError on missing files and Error on a hash mismatch.
LoadedModel load_model(const std::string& dir);

// Builds a model from every table in a code-table stream (one class per
// table). With alphabet_size above the tables' own alphabet, the model is
// padded with zero-usage singletons under fresh ids past the largest one
// present, standing in for tags the excerpted tables leave out.
SentimentModel model_from_code_tables(std::istream& in, std::size_t alphabet_size = 0);

}  // namespace routerec::classifier
