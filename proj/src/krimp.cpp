#include "routerec/krimp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "routerec/error.hpp"

namespace routerec::krimp {

bool cover_order_less(const CodeTableEntry& a, const CodeTableEntry& b) {
    if (a.itemset.size() != b.itemset.size()) return a.itemset.size() > b.itemset.size();
    if (a.support != b.support) return a.support > b.support;
    return a.itemset < b.itemset;
}

bool candidate_order_less(const CodeTableEntry& a, const CodeTableEntry& b) {
    if (a.support != b.support) return a.support > b.support;
    if (a.itemset.size() != b.itemset.size()) return a.itemset.size() > b.itemset.size();
    return a.itemset < b.itemset;
}

namespace {

void check_itemset(const Itemset& s) {
    if (s.empty()) throw InvalidArgument("itemset must be non-empty");
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i - 1] >= s[i]) throw InvalidArgument("itemset must be strictly ascending");
    }
}

}  // namespace

CodeTable::CodeTable(std::vector<CodeTableEntry> entries) : entries_(std::move(entries)) {
    for (const auto& e : entries_) check_itemset(e.itemset);
    std::sort(entries_.begin(), entries_.end(), cover_order_less);
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        if (entries_[i - 1].itemset == entries_[i].itemset) {
            throw InvalidArgument("duplicate itemset in code table");
        }
    }
}

std::size_t CodeTable::find(const Itemset& itemset) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].itemset == itemset) return i;
    }
    return entries_.size();
}

void CodeTable::insert(CodeTableEntry entry) {
    check_itemset(entry.itemset);
    if (contains(entry.itemset)) throw InvalidArgument("itemset already in code table");
    auto pos = std::upper_bound(entries_.begin(), entries_.end(), entry, cover_order_less);
    entries_.insert(pos, std::move(entry));
}

void CodeTable::erase(const Itemset& itemset) {
    const auto i = find(itemset);
    if (i == size()) throw InvalidArgument("itemset not in code table");
    entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(i));
}

std::vector<Item> CodeTable::alphabet() const {
    std::vector<Item> items;
    for (const auto& e : entries_) {
        if (e.itemset.size() == 1) items.push_back(e.itemset.front());
    }
    std::sort(items.begin(), items.end());
    return items;
}

bool CodeTable::has_singleton(Item item) const {
    // Singletons sit at the tail of the cover order.
    for (auto it = entries_.rbegin(); it != entries_.rend() && it->itemset.size() == 1; ++it) {
        if (it->itemset.front() == item) return true;
    }
    return false;
}

std::uint64_t CodeTable::total_usage() const {
    std::uint64_t sum = 0;
    for (const auto& e : entries_) sum += e.usage;
    return sum;
}

std::size_t CodeTable::non_singleton_count() const {
    return static_cast<std::size_t>(
        std::count_if(entries_.begin(), entries_.end(), [](const auto& e) { return e.itemset.size() > 1; }));
}

namespace {

using Tids = std::vector<std::uint32_t>;

// Dense re-indexing of the items present in a database. The mapping is
// monotone so dense order equals item order.
struct DenseDb {
    std::vector<Item> items;                        // dense -> item
    std::vector<std::vector<std::uint32_t>> rows;   // transactions over dense ids
    std::vector<Tids> tids;                         // dense -> containing transactions

    explicit DenseDb(Database db) {
        for (const auto& t : db) items.insert(items.end(), t.tags.begin(), t.tags.end());
        std::sort(items.begin(), items.end());
        items.erase(std::unique(items.begin(), items.end()), items.end());
        tids.resize(items.size());
        rows.reserve(db.size());
        for (std::uint32_t r = 0; r < db.size(); ++r) {
            std::vector<std::uint32_t> row;
            row.reserve(db[r].tags.size());
            for (Item it : db[r].tags) {
                const auto d = static_cast<std::uint32_t>(std::lower_bound(items.begin(), items.end(), it) - items.begin());
                row.push_back(d);
                tids[d].push_back(r);
            }
            rows.push_back(std::move(row));
        }
    }

    Itemset to_items(const std::vector<std::uint32_t>& dense) const {
        Itemset out;
        out.reserve(dense.size());
        for (auto d : dense) out.push_back(items[d]);
        return out;
    }
};

struct Candidate {
    std::vector<std::uint32_t> dense;  // ascending dense ids
    Tids tids;
};

// Depth-first enumeration over projected databases: the extensions of a
// prefix are counted only inside the transactions that contain it.
class Miner {
public:
    Miner(const DenseDb& db, const MiningOptions& options) : db_(db), opt_(options), counts_(db.items.size(), 0) {}

    std::vector<Candidate> run() {
        if (opt_.minsup == 0) throw InvalidArgument("minsup must be at least 1");
        if (opt_.max_cardinality < 2) return {};
        std::vector<std::uint32_t> prefix;
        for (std::uint32_t d = 0; d < db_.items.size(); ++d) {
            if (db_.tids[d].size() < opt_.minsup) continue;
            prefix.assign(1, d);
            extend(prefix, db_.tids[d]);
        }
        return std::move(out_);
    }

private:
    void extend(std::vector<std::uint32_t>& prefix, const Tids& tids) {
        const std::uint32_t last = prefix.back();
        std::vector<std::uint32_t> touched;
        for (auto r : tids) {
            const auto& row = db_.rows[r];
            for (auto it = std::upper_bound(row.begin(), row.end(), last); it != row.end(); ++it) {
                if (counts_[*it]++ == 0) touched.push_back(*it);
            }
        }
        std::sort(touched.begin(), touched.end());
        std::vector<std::uint32_t> frequent;
        for (auto d : touched) {
            if (counts_[d] >= opt_.minsup) frequent.push_back(d);
            counts_[d] = 0;
        }
        for (auto d : frequent) {
            Tids child;
            const auto& dt = db_.tids[d];
            std::set_intersection(tids.begin(), tids.end(), dt.begin(), dt.end(), std::back_inserter(child));
            prefix.push_back(d);
            if (out_.size() >= opt_.max_candidates) {
                throw Error("candidate count exceeds the configured limit of " + std::to_string(opt_.max_candidates) +
                            " itemsets (raise max_candidates or minsup)");
            }
            out_.push_back({prefix, child});
            if (prefix.size() < opt_.max_cardinality) extend(prefix, child);
            prefix.pop_back();
        }
    }

    const DenseDb& db_;
    const MiningOptions& opt_;
    std::vector<std::uint64_t> counts_;
    std::vector<Candidate> out_;
};

bool dense_candidate_less(const Candidate& a, const Candidate& b) {
    if (a.tids.size() != b.tids.size()) return a.tids.size() > b.tids.size();
    if (a.dense.size() != b.dense.size()) return a.dense.size() > b.dense.size();
    return a.dense < b.dense;
}

std::vector<Candidate> mine_dense(const DenseDb& db, const MiningOptions& options) {
    auto cands = Miner(db, options).run();
    std::sort(cands.begin(), cands.end(), dense_candidate_less);
    return cands;
}

}  // namespace

std::vector<CodeTableEntry> mine_candidates(Database db, const MiningOptions& options) {
    const DenseDb dense(db);
    std::vector<CodeTableEntry> out;
    for (auto& c : mine_dense(dense, options)) {
        out.push_back({dense.to_items(c.dense), 0, c.tids.size()});
    }
    return out;
}

CodeTable standard_table(Database db) {
    std::unordered_map<Item, std::uint64_t> counts;
    for (const auto& t : db) {
        for (Item i : t.tags) ++counts[i];
    }
    std::vector<CodeTableEntry> entries;
    entries.reserve(counts.size());
    for (const auto& [item, n] : counts) entries.push_back({{item}, n, n});
    return CodeTable(std::move(entries));
}

std::vector<std::size_t> cover_indices(const corpus::Transaction& t, const CodeTable& ct) {
    std::vector<Item> remaining = t.tags;
    std::vector<std::size_t> chosen;
    std::vector<Item> scratch;
    for (std::size_t i = 0; i < ct.size() && !remaining.empty(); ++i) {
        const auto& items = ct[i].itemset;
        if (items.size() > remaining.size()) continue;
        if (!std::includes(remaining.begin(), remaining.end(), items.begin(), items.end())) continue;
        chosen.push_back(i);
        scratch.clear();
        std::set_difference(remaining.begin(), remaining.end(), items.begin(), items.end(),
                            std::back_inserter(scratch));
        remaining.swap(scratch);
    }
    if (!remaining.empty()) {
        throw InvalidArgument("tag " + std::to_string(remaining.front()) + " cannot be covered by the code table");
    }
    return chosen;
}

std::vector<Itemset> cover(const corpus::Transaction& t, const CodeTable& ct) {
    std::vector<Itemset> out;
    for (auto i : cover_indices(t, ct)) out.push_back(ct[i].itemset);
    return out;
}

std::vector<double> code_lengths(const CodeTable& ct, bool laplace) {
    const std::uint64_t b = laplace ? 1 : 0;
    std::uint64_t total = 0;
    for (const auto& e : ct.entries()) total += e.usage + b;
    if (total == 0) throw InvalidArgument("code table has no usage; code lengths are undefined");
    const double log_total = std::log2(static_cast<double>(total));
    std::vector<double> lengths;
    lengths.reserve(ct.size());
    for (const auto& e : ct.entries()) {
        const auto u = e.usage + b;
        lengths.push_back(u == 0 ? std::numeric_limits<double>::infinity()
                                 : log_total - std::log2(static_cast<double>(u)));
    }
    return lengths;
}

CodeTable with_usages(Database db, const CodeTable& ct) {
    std::vector<CodeTableEntry> entries = ct.entries();
    for (auto& e : entries) e.usage = 0;
    for (const auto& t : db) {
        for (auto i : cover_indices(t, ct)) ++entries[i].usage;
    }
    return CodeTable(std::move(entries));
}

double encoded_db_size(Database db, const CodeTable& ct) {
    const CodeTable used = with_usages(db, ct);
    if (used.total_usage() == 0) return 0.0;
    const auto lengths = code_lengths(used, false);
    double bits = 0.0;
    for (std::size_t i = 0; i < used.size(); ++i) {
        if (used[i].usage > 0) bits += static_cast<double>(used[i].usage) * lengths[i];
    }
    return bits;
}

double encoded_ct_size(const CodeTable& ct, const CodeTable& standard) {
    if (ct.total_usage() == 0) return 0.0;
    const auto lengths = code_lengths(ct, false);
    const auto st_lengths = code_lengths(standard, false);
    std::unordered_map<Item, double> st;
    for (std::size_t i = 0; i < standard.size(); ++i) {
        if (standard[i].itemset.size() == 1) st[standard[i].itemset.front()] = st_lengths[i];
    }
    double bits = 0.0;
    for (std::size_t i = 0; i < ct.size(); ++i) {
        if (ct[i].usage == 0) continue;
        bits += lengths[i];
        for (Item item : ct[i].itemset) {
            auto it = st.find(item);
            if (it == st.end() || std::isinf(it->second)) {
                throw InvalidArgument("item " + std::to_string(item) + " has no standard code");
            }
            bits += it->second;
        }
    }
    return bits;
}

CompressionStats total_size(Database db, const CodeTable& ct) {
    const CodeTable used = with_usages(db, ct);
    CompressionStats s;
    s.db_bits = encoded_db_size(db, used);
    s.ct_bits = encoded_ct_size(used, standard_table(db));
    s.total_bits = s.db_bits + s.ct_bits;
    return s;
}

namespace {

// Incremental KRIMP state. Covers are kept per transaction so that adding or
// removing an itemset only re-covers the transactions containing it.
class Compressor {
public:
    Compressor(Database db, const MiningOptions& options) : dense_(db), options_(options) {
        const double total_occ = [&] {
            double n = 0;
            for (const auto& t : dense_.tids) n += static_cast<double>(t.size());
            return n;
        }();
        st_len_.resize(dense_.items.size());
        for (std::size_t d = 0; d < dense_.items.size(); ++d) {
            st_len_[d] = std::log2(total_occ) - std::log2(static_cast<double>(dense_.tids[d].size()));
        }
        for (std::uint32_t d = 0; d < dense_.items.size(); ++d) {
            Slot s;
            s.items = {d};
            s.tids = dense_.tids[d];
            s.support = s.tids.size();
            s.usage = s.support;
            s.st_cost = st_len_[d];
            slots_.push_back(std::move(s));
        }
        order_.resize(slots_.size());
        std::iota(order_.begin(), order_.end(), 0u);
        std::sort(order_.begin(), order_.end(), [&](auto a, auto b) { return slot_less(a, b); });
        covers_.resize(dense_.rows.size());
        for (std::uint32_t r = 0; r < dense_.rows.size(); ++r) {
            covers_[r].assign(dense_.rows[r].begin(), dense_.rows[r].end());
        }
    }

    KrimpResult run() {
        KrimpResult result;
        double current = total().total_bits;
        result.initial = total();
        auto candidates = mine_dense(dense_, options_);
        result.candidates = candidates.size();
        for (auto& cand : candidates) {
            if (try_candidate(std::move(cand), current)) {
                ++result.accepted;
                result.pruned += prune(current);
                result.accepted_totals.push_back(current);
            }
        }
        result.stats = total();
        result.table = export_table();
        return result;
    }

private:
    struct Slot {
        std::vector<std::uint32_t> items;
        Tids tids;
        std::uint64_t support = 0;
        std::uint64_t usage = 0;
        double st_cost = 0.0;
        bool live = true;
    };

    bool slot_less(std::uint32_t a, std::uint32_t b) const {
        const auto& x = slots_[a];
        const auto& y = slots_[b];
        if (x.items.size() != y.items.size()) return x.items.size() > y.items.size();
        if (x.support != y.support) return x.support > y.support;
        return x.items < y.items;
    }

    static bool improves(double candidate, double current) {
        return candidate < current - 1e-9 * std::max(1.0, std::abs(current));
    }

    CompressionStats total() const {
        double usage_sum = 0.0;
        for (auto id : order_) usage_sum += static_cast<double>(slots_[id].usage);
        CompressionStats s;
        if (usage_sum == 0.0) return s;
        const double log_total = std::log2(usage_sum);
        for (auto id : order_) {
            const auto& slot = slots_[id];
            if (slot.usage == 0) continue;
            const double len = log_total - std::log2(static_cast<double>(slot.usage));
            s.db_bits += static_cast<double>(slot.usage) * len;
            s.ct_bits += len + slot.st_cost;
        }
        s.total_bits = s.db_bits + s.ct_bits;
        return s;
    }

    std::vector<std::uint32_t> compute_cover(std::uint32_t row) const {
        std::vector<std::uint32_t> remaining = dense_.rows[row];
        std::vector<std::uint32_t> chosen, scratch;
        for (auto id : order_) {
            if (remaining.empty()) break;
            const auto& items = slots_[id].items;
            if (items.size() > remaining.size()) continue;
            if (!std::includes(remaining.begin(), remaining.end(), items.begin(), items.end())) continue;
            chosen.push_back(id);
            scratch.clear();
            std::set_difference(remaining.begin(), remaining.end(), items.begin(), items.end(),
                                std::back_inserter(scratch));
            remaining.swap(scratch);
        }
        return chosen;
    }

    struct Change {
        std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> old_covers;
        std::unordered_map<std::uint32_t, std::int64_t> usage_delta;
    };

    Change recover(const Tids& rows) {
        Change change;
        for (auto r : rows) {
            auto fresh = compute_cover(r);
            if (fresh == covers_[r]) continue;
            for (auto id : covers_[r]) {
                --slots_[id].usage;
                --change.usage_delta[id];
            }
            for (auto id : fresh) {
                ++slots_[id].usage;
                ++change.usage_delta[id];
            }
            change.old_covers.emplace_back(r, std::move(covers_[r]));
            covers_[r] = std::move(fresh);
        }
        return change;
    }

    void rollback(Change& change) {
        for (auto& [r, old] : change.old_covers) {
            for (auto id : covers_[r]) --slots_[id].usage;
            for (auto id : old) ++slots_[id].usage;
            covers_[r] = std::move(old);
        }
    }

    void insert_ordered(std::uint32_t id) {
        auto pos = std::upper_bound(order_.begin(), order_.end(), id,
                                    [&](auto a, auto b) { return slot_less(a, b); });
        order_.insert(pos, id);
    }

    void remove_ordered(std::uint32_t id) { order_.erase(std::find(order_.begin(), order_.end(), id)); }

    bool try_candidate(Candidate cand, double& current) {
        const auto id = static_cast<std::uint32_t>(slots_.size());
        Slot s;
        s.items = std::move(cand.dense);
        s.tids = std::move(cand.tids);
        s.support = s.tids.size();
        for (auto d : s.items) s.st_cost += st_len_[d];
        slots_.push_back(std::move(s));
        insert_ordered(id);

        Change change = recover(slots_[id].tids);
        const double candidate_total = total().total_bits;
        if (!improves(candidate_total, current)) {
            rollback(change);
            remove_ordered(id);
            slots_.pop_back();
            return false;
        }
        current = candidate_total;
        for (const auto& [sid, delta] : change.usage_delta) {
            if (delta < 0 && sid != id && slots_[sid].items.size() > 1) prune_queue_.push_back(sid);
        }
        return true;
    }

    // Rows whose current cover uses slot id.
    Tids rows_using(std::uint32_t id) const {
        Tids rows;
        for (auto r : slots_[id].tids) {
            const auto& c = covers_[r];
            if (std::find(c.begin(), c.end(), id) != c.end()) rows.push_back(r);
        }
        return rows;
    }

    std::size_t prune(double& current) {
        std::size_t removed = 0;
        std::sort(prune_queue_.begin(), prune_queue_.end());
        prune_queue_.erase(std::unique(prune_queue_.begin(), prune_queue_.end()), prune_queue_.end());
        while (!prune_queue_.empty()) {
            auto it = std::min_element(prune_queue_.begin(), prune_queue_.end(), [&](auto a, auto b) {
                if (slots_[a].usage != slots_[b].usage) return slots_[a].usage < slots_[b].usage;
                return slot_less(a, b);
            });
            const auto id = *it;
            prune_queue_.erase(it);
            auto& slot = slots_[id];
            if (slot.usage == 0) {
                // Unused entries carry no code; dropping them leaves every size unchanged.
                remove_ordered(id);
                slot.live = false;
                ++removed;
                continue;
            }
            const Tids rows = rows_using(id);
            remove_ordered(id);
            Change change = recover(rows);
            const double pruned_total = total().total_bits;
            if (improves(pruned_total, current)) {
                current = pruned_total;
                slots_[id].live = false;
                ++removed;
            } else {
                rollback(change);
                insert_ordered(id);
            }
        }
        const auto before = order_.size();
        std::erase_if(order_, [&](auto id) {
            auto& s = slots_[id];
            if (s.items.size() > 1 && s.usage == 0) {
                s.live = false;
                return true;
            }
            return false;
        });
        return removed + (before - order_.size());
    }

    CodeTable export_table() const {
        std::vector<CodeTableEntry> entries;
        entries.reserve(order_.size());
        for (auto id : order_) {
            const auto& s = slots_[id];
            entries.push_back({dense_.to_items(s.items), s.usage, s.support});
        }
        return CodeTable(std::move(entries));
    }

    DenseDb dense_;
    MiningOptions options_;
    std::vector<double> st_len_;
    std::vector<Slot> slots_;
    std::vector<std::uint32_t> order_;
    std::vector<std::vector<std::uint32_t>> covers_;
    std::vector<std::uint32_t> prune_queue_;
};

}  // namespace

KrimpResult krimp_compress(Database db, const MiningOptions& options) {
    if (db.empty()) throw InvalidArgument("cannot compress an empty database");
    if (options.minsup == 0) throw InvalidArgument("minsup must be at least 1");
    return Compressor(db, options).run();
}

void write_code_table(std::ostream& out, const std::string& name, const CodeTable& ct) {
    if (name.empty() || std::any_of(name.begin(), name.end(), [](unsigned char c) { return std::isspace(c); })) {
        throw InvalidArgument("code table name must be a non-empty word");
    }
    out << "CT " << name << ' ' << ct.size() << '\n';
    for (const auto& e : ct.entries()) {
        for (std::size_t i = 0; i < e.itemset.size(); ++i) {
            if (i) out << ' ';
            out << e.itemset[i];
        }
        out << " (" << e.usage << ',' << e.support << ")\n";
    }
}

namespace {

CodeTableEntry parse_entry(const std::string& line, std::size_t lineno) {
    const auto open = line.find('(');
    const auto close = line.find(')', open == std::string::npos ? 0 : open);
    if (open == std::string::npos || close == std::string::npos) {
        throw ParseError(lineno, "expected '<items> (usage,support)'");
    }
    CodeTableEntry e;
    std::istringstream items(line.substr(0, open));
    std::string tok;
    while (items >> tok) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(tok, &used);
            if (used != tok.size() || v > std::numeric_limits<Item>::max()) throw std::invalid_argument(tok);
            e.itemset.push_back(static_cast<Item>(v));
        } catch (const std::exception&) {
            throw ParseError(lineno, "invalid item '" + tok + "'");
        }
    }
    if (e.itemset.empty()) throw ParseError(lineno, "entry without items");
    std::sort(e.itemset.begin(), e.itemset.end());
    if (std::adjacent_find(e.itemset.begin(), e.itemset.end()) != e.itemset.end()) {
        throw ParseError(lineno, "duplicate item in entry");
    }
    const std::string counts = line.substr(open + 1, close - open - 1);
    const auto comma = counts.find(',');
    if (comma == std::string::npos) throw ParseError(lineno, "expected (usage,support)");
    try {
        e.usage = std::stoull(counts.substr(0, comma));
        e.support = std::stoull(counts.substr(comma + 1));
    } catch (const std::exception&) {
        throw ParseError(lineno, "invalid (usage,support) pair");
    }
    return e;
}

}  // namespace

std::vector<NamedCodeTable> read_code_tables(std::istream& in) {
    std::vector<NamedCodeTable> tables;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream header(line);
        std::string tag, name;
        std::size_t count = 0;
        if (!(header >> tag >> name >> count) || tag != "CT") {
            throw ParseError(lineno, "expected header 'CT <class> <num_entries>'");
        }
        std::vector<CodeTableEntry> entries;
        while (entries.size() < count) {
            if (!std::getline(in, line)) throw ParseError(lineno, "code table '" + name + "' is truncated");
            ++lineno;
            entries.push_back(parse_entry(line, lineno));
        }
        try {
            tables.push_back({name, CodeTable(std::move(entries))});
        } catch (const InvalidArgument& e) {
            throw ParseError(lineno, e.what());
        }
    }
    return tables;
}

}  // namespace routerec::krimp
