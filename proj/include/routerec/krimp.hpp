#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "routerec/corpus.hpp"

namespace routerec::krimp {

using Item = corpus::TagId;

// Items in ascending (lexicographic tag) order, no duplicates.
using Itemset = std::vector<Item>;

struct CodeTableEntry {
    Itemset itemset;
    std::uint64_t usage = 0;    // times the itemset is selected by cover()
    std::uint64_t support = 0;  // transactions containing the itemset

    bool operator==(const CodeTableEntry&) const = default;
};

// Standard cover order: descending cardinality, then descending support,
// then lexicographic.
bool cover_order_less(const CodeTableEntry& a, const CodeTableEntry& b);

// Standard candidate order: descending support, then descending
// cardinality, then lexicographic.
bool candidate_order_less(const CodeTableEntry& a, const CodeTableEntry& b);

// Code table kept in standard cover order at all times.
class CodeTable {
public:
    CodeTable() = default;
    // Sorts the entries. Throws InvalidArgument on duplicate or empty itemsets.
    explicit CodeTable(std::vector<CodeTableEntry> entries);

    const std::vector<CodeTableEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const CodeTableEntry& operator[](std::size_t i) const { return entries_[i]; }

    // Index of the entry holding exactly this itemset, or size().
    std::size_t find(const Itemset& itemset) const;
    bool contains(const Itemset& itemset) const { return find(itemset) != size(); }

    void insert(CodeTableEntry entry);
    void erase(const Itemset& itemset);
    void set_usage(std::size_t index, std::uint64_t usage) { entries_.at(index).usage = usage; }

    // Items that have a singleton entry, ascending.
    std::vector<Item> alphabet() const;
    bool has_singleton(Item item) const;
    std::uint64_t total_usage() const;
    std::size_t non_singleton_count() const;

    bool operator==(const CodeTable&) const = default;

private:
    std::vector<CodeTableEntry> entries_;
};

using Database = std::span<const corpus::Transaction>;

struct MiningOptions {
    std::uint64_t minsup = 1;
    std::size_t max_cardinality = 6;
    std::size_t max_candidates = 5'000'000;
};

struct CompressionStats {
    double db_bits = 0.0;
    double ct_bits = 0.0;
    double total_bits = 0.0;
};

// All itemsets of cardinality 2..max_cardinality with support >= minsup, in
// standard candidate order. usage is left at 0. Throws if more than
// max_candidates itemsets are found.
std::vector<CodeTableEntry> mine_candidates(Database db, const MiningOptions& options);

// Singleton-only table of db with usage = support = occurrence count.
CodeTable standard_table(Database db);

// Greedy cover: scans ct in order and takes every itemset contained in the
// still-uncovered part of t. Throws InvalidArgument if a tag is left over.
std::vector<Itemset> cover(const corpus::Transaction& t, const CodeTable& ct);

// Entry indices chosen by cover(), in selection order.
std::vector<std::size_t> cover_indices(const corpus::Transaction& t, const CodeTable& ct);

// -log2((usage + b) / sum(usage + b)) per entry, b = 1 with laplace. Entries
// whose adjusted usage is 0 get +infinity (no code). Throws when every
// adjusted usage is 0.
std::vector<double> code_lengths(const CodeTable& ct, bool laplace);

// Copy of ct with usages recomputed by covering db.
CodeTable with_usages(Database db, const CodeTable& ct);

// Bits to encode db with ct, usages taken from covering db.
double encoded_db_size(Database db, const CodeTable& ct);

// Bits to encode ct as stored: every entry with usage > 0 costs its own code
// plus its items in the standard table's codes.
double encoded_ct_size(const CodeTable& ct, const CodeTable& standard);

// Covers db with ct (recomputing usages) and sums both parts.
CompressionStats total_size(Database db, const CodeTable& ct);

struct KrimpResult {
    CodeTable table;
    CompressionStats stats;
    // Sizes of the singleton-only table, the starting point.
    CompressionStats initial;
    // total_bits after each accepted candidate (pruning included).
    std::vector<double> accepted_totals;
    std::size_t candidates = 0;
    std::size_t accepted = 0;
    std::size_t pruned = 0;
};

// MDL compression of db: candidates are tried in candidate order and kept
// iff they strictly shrink the total size; each acceptance is followed by
// pruning of entries whose usage dropped. Singletons are never removed.
KrimpResult krimp_compress(Database db, const MiningOptions& options);

// Code-table file: "CT <class> <n>" followed by n lines "id id ... (usage,support)".
struct NamedCodeTable {
    std::string name;
    CodeTable table;
};

void write_code_table(std::ostream& out, const std::string& name, const CodeTable& ct);
// Reads every table in the stream, in file order.
std::vector<NamedCodeTable> read_code_tables(std::istream& in);

}  // namespace routerec::krimp
