#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace routerec::corpus {

using TagId = std::uint32_t;
using ClassLabel = std::string;

// Bijective term <-> dense id mapping.
//
// Ids handed out by intern() are first-come. canonicalize() renumbers the
// dictionary so that ascending id order equals lexicographic term order;
// build_database() always canonicalizes, which lets every downstream
// component use plain numeric order as "lexicographic tag order".
class TagDictionary {
public:
    TagId intern(std::string_view term);
    // Registers an explicit id. Throws if the id or the term is taken by a
    // different binding.
    void insert(TagId id, std::string term);
    std::optional<TagId> find(std::string_view term) const;
    const std::string& term(TagId id) const;
    bool contains(TagId id) const { return id < terms_.size() && !terms_[id].empty(); }
    std::size_t size() const { return count_; }
    // Present ids in ascending order.
    std::vector<TagId> ids() const;

    // Renumbers ids into lexicographic term order. Returns old id -> new id.
    std::vector<TagId> canonicalize();

    bool operator==(const TagDictionary& other) const { return terms_ == other.terms_; }

private:
    // Indexed by id; an empty string marks an unused id.
    std::vector<std::string> terms_;
    std::size_t count_ = 0;
    std::unordered_map<std::string, TagId> ids_;
};

// Tag ids in ascending order (lexicographic term order for canonical
// dictionaries), without duplicates.
struct Transaction {
    std::vector<TagId> tags;

    static Transaction from_unsorted(std::vector<TagId> tags);
    std::size_t size() const { return tags.size(); }
    bool empty() const { return tags.empty(); }
    bool contains(TagId id) const;
    auto operator<=>(const Transaction&) const = default;
};

class LabeledDatabase {
public:
    LabeledDatabase() = default;
    explicit LabeledDatabase(TagDictionary dictionary) : dictionary_(std::move(dictionary)) {}

    // Throws InvalidArgument if a tag id is missing from the dictionary.
    void add(Transaction t, std::optional<ClassLabel> label = std::nullopt);

    std::size_t size() const { return transactions_.size(); }
    bool empty() const { return transactions_.empty(); }
    const std::vector<Transaction>& transactions() const { return transactions_; }
    const Transaction& transaction(std::size_t i) const { return transactions_.at(i); }
    const std::optional<ClassLabel>& label(std::size_t i) const { return labels_.at(i); }
    const std::vector<std::optional<ClassLabel>>& labels() const { return labels_; }
    const std::set<ClassLabel>& classes() const { return classes_; }
    const TagDictionary& dictionary() const { return dictionary_; }
    TagDictionary& mutable_dictionary() { return dictionary_; }

    bool fully_labeled() const;
    std::size_t max_transaction_length() const;

    bool operator==(const LabeledDatabase& other) const = default;

private:
    std::vector<Transaction> transactions_;
    std::vector<std::optional<ClassLabel>> labels_;
    std::set<ClassLabel> classes_;
    TagDictionary dictionary_;
};

enum class Sentiment { positive, negative };

std::string_view to_label(Sentiment s);
std::optional<Sentiment> sentiment_from_label(std::string_view label);

struct Place {
    std::string id;
    std::string name;
    std::string address;
    std::string review;
    double lat = 0.0;
    double lon = 0.0;
    std::optional<Sentiment> sentiment;
};

// Throws InvalidArgument when coordinates are out of range or the name is empty.
void validate(const Place& p);

struct IngestIssue {
    std::size_t line;
    std::string message;
};

struct IngestResult {
    std::vector<Place> places;
    std::vector<IngestIssue> issues;
};

// Reads JSON Lines place records. Blank lines are ignored. In strict mode the
// first malformed record throws ParseError; otherwise it is recorded in
// issues and skipped.
IngestResult ingest_places(std::istream& in, bool strict);
IngestResult ingest_places_file(const std::string& path, bool strict);

void write_places(std::ostream& out, const std::vector<Place>& places);

using Tagger = std::function<std::vector<std::string>(const Place&)>;

struct BuildResult {
    LabeledDatabase db;
    // place_index[i] is the index of the place that produced transaction i.
    std::vector<std::size_t> place_index;
    std::size_t dropped = 0;
};

// One transaction per place with a non-empty tag set, over a canonical
// dictionary. Throws InvalidArgument("empty database") if every place
// yields no tags.
BuildResult build_database(const std::vector<Place>& places, const Tagger& tagger);

// Splits a fully labeled database by class. Partition members carry no
// labels and share the parent's dictionary.
std::map<ClassLabel, LabeledDatabase> partition_by_class(const LabeledDatabase& db);

// Number of tags kept by degrade() for a transaction of the given size.
std::size_t degraded_size(std::size_t size, double delta);

// Keeps max(1, ceil((1 - delta) * |t|)) tags of every transaction, sampled
// uniformly without replacement. The sampler is a partial Fisher-Yates
// shuffle driven by std::mt19937_64 seeded with `seed`: for position i of n,
// the swap index is i + (draw mod (n - i)). Transactions are processed in
// order with one generator for the whole database.
LabeledDatabase degrade(const LabeledDatabase& db, double delta, std::uint64_t seed);

// Transaction file: "id id id [| label]" per line. With auto_terms, ids
// missing from the dictionary are registered under their decimal spelling;
// otherwise they are a ParseError.
LabeledDatabase read_transactions(std::istream& in, TagDictionary dictionary, bool auto_terms = true);
void write_transactions(std::ostream& out, const LabeledDatabase& db);

// Dictionary file: "id<TAB>term" per line.
TagDictionary read_dictionary(std::istream& in);
void write_dictionary(std::ostream& out, const TagDictionary& dictionary);

}  // namespace routerec::corpus
