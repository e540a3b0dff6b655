#include "routerec/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "routerec/error.hpp"

namespace routerec::corpus {

TagId TagDictionary::intern(std::string_view term) {
    if (term.empty()) throw InvalidArgument("tag term must be non-empty");
    if (auto it = ids_.find(std::string(term)); it != ids_.end()) return it->second;
    const auto id = static_cast<TagId>(terms_.size());
    terms_.emplace_back(term);
    ids_.emplace(std::string(term), id);
    ++count_;
    return id;
}

void TagDictionary::insert(TagId id, std::string term) {
    if (term.empty()) throw InvalidArgument("tag term must be non-empty");
    if (auto it = ids_.find(term); it != ids_.end()) {
        if (it->second == id) return;
        throw InvalidArgument("term '" + term + "' already bound to id " + std::to_string(it->second));
    }
    if (contains(id)) {
        throw InvalidArgument("tag id " + std::to_string(id) + " already bound to '" + terms_[id] + "'");
    }
    if (id >= terms_.size()) terms_.resize(static_cast<std::size_t>(id) + 1);
    terms_[id] = term;
    ids_.emplace(std::move(term), id);
    ++count_;
}

std::optional<TagId> TagDictionary::find(std::string_view term) const {
    if (auto it = ids_.find(std::string(term)); it != ids_.end()) return it->second;
    return std::nullopt;
}

const std::string& TagDictionary::term(TagId id) const {
    if (!contains(id)) throw InvalidArgument("unknown tag id " + std::to_string(id));
    return terms_[id];
}

std::vector<TagId> TagDictionary::ids() const {
    std::vector<TagId> out;
    out.reserve(count_);
    for (TagId i = 0; i < terms_.size(); ++i) {
        if (!terms_[i].empty()) out.push_back(i);
    }
    return out;
}

std::vector<TagId> TagDictionary::canonicalize() {
    std::vector<TagId> present = ids();
    std::sort(present.begin(), present.end(),
              [&](TagId a, TagId b) { return terms_[a] < terms_[b]; });
    std::vector<TagId> remap(terms_.size(), 0);
    std::vector<std::string> terms(present.size());
    ids_.clear();
    for (TagId rank = 0; rank < present.size(); ++rank) {
        remap[present[rank]] = rank;
        terms[rank] = std::move(terms_[present[rank]]);
        ids_.emplace(terms[rank], rank);
    }
    terms_ = std::move(terms);
    count_ = terms_.size();
    return remap;
}

Transaction Transaction::from_unsorted(std::vector<TagId> tags) {
    std::sort(tags.begin(), tags.end());
    tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
    return Transaction{std::move(tags)};
}

bool Transaction::contains(TagId id) const {
    return std::binary_search(tags.begin(), tags.end(), id);
}

void LabeledDatabase::add(Transaction t, std::optional<ClassLabel> label) {
    for (TagId id : t.tags) {
        if (!dictionary_.contains(id)) {
            throw InvalidArgument("tag id " + std::to_string(id) + " not in dictionary");
        }
    }
    if (label) classes_.insert(*label);
    transactions_.push_back(std::move(t));
    labels_.push_back(std::move(label));
}

bool LabeledDatabase::fully_labeled() const {
    return std::all_of(labels_.begin(), labels_.end(), [](const auto& l) { return l.has_value(); });
}

std::size_t LabeledDatabase::max_transaction_length() const {
    std::size_t m = 0;
    for (const auto& t : transactions_) m = std::max(m, t.size());
    return m;
}

std::string_view to_label(Sentiment s) { return s == Sentiment::positive ? "pos" : "neg"; }

std::optional<Sentiment> sentiment_from_label(std::string_view label) {
    if (label == "pos" || label == "positive") return Sentiment::positive;
    if (label == "neg" || label == "negative") return Sentiment::negative;
    return std::nullopt;
}

void validate(const Place& p) {
    if (!(p.lat >= -90.0 && p.lat <= 90.0)) throw InvalidArgument("latitude out of range");
    if (!(p.lon >= -180.0 && p.lon <= 180.0)) throw InvalidArgument("longitude out of range");
    if (p.name.empty()) throw InvalidArgument("name must be non-empty");
}

namespace {

using nlohmann::json;

std::string string_field(const json& obj, const char* key, bool required) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        if (required) throw InvalidArgument(std::string("missing field '") + key + "'");
        return {};
    }
    if (!it->is_string()) throw InvalidArgument(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

double number_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw InvalidArgument(std::string("missing field '") + key + "'");
    if (!it->is_number()) throw InvalidArgument(std::string("field '") + key + "' must be a number");
    return it->get<double>();
}

Place parse_place(const std::string& line) {
    json obj = json::parse(line);
    if (!obj.is_object()) throw InvalidArgument("record must be a JSON object");
    Place p;
    // Ids may be numeric in some dumps.
    if (auto it = obj.find("id"); it != obj.end() && it->is_number_integer()) {
        p.id = std::to_string(it->get<long long>());
    } else {
        p.id = string_field(obj, "id", true);
    }
    p.name = string_field(obj, "name", true);
    p.address = string_field(obj, "address", false);
    p.review = string_field(obj, "review", false);
    p.lat = number_field(obj, "lat");
    p.lon = number_field(obj, "lon");
    if (auto it = obj.find("label"); it != obj.end() && !it->is_null()) {
        if (!it->is_string()) throw InvalidArgument("field 'label' must be a string");
        auto s = sentiment_from_label(it->get<std::string>());
        if (!s) throw InvalidArgument("label must be \"pos\" or \"neg\"");
        p.sentiment = s;
    }
    validate(p);
    return p;
}

}  // namespace

IngestResult ingest_places(std::istream& in, bool strict) {
    IngestResult result;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
        try {
            result.places.push_back(parse_place(line));
        } catch (const std::exception& e) {
            if (strict) throw ParseError(lineno, e.what());
            result.issues.push_back({lineno, e.what()});
        }
    }
    if (in.bad()) throw IoError("error reading place stream");
    return result;
}

IngestResult ingest_places_file(const std::string& path, bool strict) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return ingest_places(in, strict);
}

void write_places(std::ostream& out, const std::vector<Place>& places) {
    for (const auto& p : places) {
        nlohmann::ordered_json obj;
        obj["id"] = p.id;
        obj["name"] = p.name;
        obj["address"] = p.address;
        obj["review"] = p.review;
        obj["lat"] = p.lat;
        obj["lon"] = p.lon;
        if (p.sentiment) obj["label"] = std::string(to_label(*p.sentiment));
        out << obj.dump() << '\n';
    }
}

BuildResult build_database(const std::vector<Place>& places, const Tagger& tagger) {
    TagDictionary dict;
    std::vector<std::vector<TagId>> raw;
    std::vector<std::optional<ClassLabel>> labels;
    BuildResult result;
    for (std::size_t i = 0; i < places.size(); ++i) {
        std::vector<TagId> ids;
        for (const auto& term : tagger(places[i])) {
            if (!term.empty()) ids.push_back(dict.intern(term));
        }
        if (ids.empty()) {
            ++result.dropped;
            continue;
        }
        raw.push_back(std::move(ids));
        labels.push_back(places[i].sentiment ? std::optional<ClassLabel>(std::string(to_label(*places[i].sentiment)))
                                             : std::nullopt);
        result.place_index.push_back(i);
    }
    if (raw.empty()) throw InvalidArgument("empty database");

    const auto remap = dict.canonicalize();
    result.db = LabeledDatabase(std::move(dict));
    for (std::size_t i = 0; i < raw.size(); ++i) {
        for (auto& id : raw[i]) id = remap[id];
        result.db.add(Transaction::from_unsorted(std::move(raw[i])), std::move(labels[i]));
    }
    return result;
}

std::map<ClassLabel, LabeledDatabase> partition_by_class(const LabeledDatabase& db) {
    std::map<ClassLabel, LabeledDatabase> parts;
    for (std::size_t i = 0; i < db.size(); ++i) {
        const auto& label = db.label(i);
        if (!label) throw InvalidArgument("unlabeled transaction at index " + std::to_string(i));
        auto [it, inserted] = parts.try_emplace(*label, db.dictionary());
        it->second.add(db.transaction(i));
    }
    return parts;
}

std::size_t degraded_size(std::size_t size, double delta) {
    if (!(delta >= 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in [0,1)");
    if (size == 0) return 0;
    // The epsilon absorbs representation error, e.g. (1 - 0.33) * 100 = 67.00000000000001.
    const double exact = (1.0 - delta) * static_cast<double>(size);
    const auto keep = static_cast<std::size_t>(std::ceil(exact - 1e-9));
    return std::clamp<std::size_t>(keep, 1, size);
}

LabeledDatabase degrade(const LabeledDatabase& db, double delta, std::uint64_t seed) {
    if (!(delta >= 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in [0,1)");
    std::mt19937_64 rng(seed);
    LabeledDatabase out(db.dictionary());
    for (std::size_t i = 0; i < db.size(); ++i) {
        std::vector<TagId> tags = db.transaction(i).tags;
        const std::size_t keep = degraded_size(tags.size(), delta);
        if (keep < tags.size()) {
            const std::size_t n = tags.size();
            for (std::size_t k = 0; k < keep; ++k) {
                const std::size_t j = k + static_cast<std::size_t>(rng() % (n - k));
                std::swap(tags[k], tags[j]);
            }
            tags.resize(keep);
            std::sort(tags.begin(), tags.end());
        }
        out.add(Transaction{std::move(tags)}, db.label(i));
    }
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

TagId parse_id(std::string_view tok, std::size_t lineno) {
    TagId v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError(lineno, "invalid tag id '" + std::string(tok) + "'");
    }
    return v;
}

}  // namespace

LabeledDatabase read_transactions(std::istream& in, TagDictionary dictionary, bool auto_terms) {
    struct Row {
        std::vector<TagId> ids;
        std::optional<ClassLabel> label;
    };
    std::vector<Row> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        Row row;
        if (auto bar = body.find('|'); bar != std::string_view::npos) {
            auto label = trim(body.substr(bar + 1));
            if (label.empty()) throw ParseError(lineno, "empty label after '|'");
            row.label = std::string(label);
            body = trim(body.substr(0, bar));
        }
        std::istringstream tokens{std::string(body)};
        std::string tok;
        while (tokens >> tok) {
            const TagId id = parse_id(tok, lineno);
            if (!dictionary.contains(id)) {
                if (!auto_terms) throw ParseError(lineno, "tag id " + tok + " not in dictionary");
                dictionary.insert(id, std::to_string(id));
            }
            row.ids.push_back(id);
        }
        if (row.ids.empty()) throw ParseError(lineno, "empty transaction");
        rows.push_back(std::move(row));
    }
    LabeledDatabase db(std::move(dictionary));
    for (auto& row : rows) db.add(Transaction::from_unsorted(std::move(row.ids)), std::move(row.label));
    return db;
}

void write_transactions(std::ostream& out, const LabeledDatabase& db) {
    for (std::size_t i = 0; i < db.size(); ++i) {
        const auto& tags = db.transaction(i).tags;
        for (std::size_t j = 0; j < tags.size(); ++j) {
            if (j) out << ' ';
            out << tags[j];
        }
        if (db.label(i)) out << " | " << *db.label(i);
        out << '\n';
    }
}

TagDictionary read_dictionary(std::istream& in) {
    TagDictionary dict;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError(lineno, "expected id<TAB>term");
        const TagId id = parse_id(trim(std::string_view(line).substr(0, tab)), lineno);
        std::string term(trim(std::string_view(line).substr(tab + 1)));
        try {
            dict.insert(id, std::move(term));
        } catch (const InvalidArgument& e) {
            throw ParseError(lineno, e.what());
        }
    }
    return dict;
}

void write_dictionary(std::ostream& out, const TagDictionary& dictionary) {
    for (TagId id : dictionary.ids()) out << id << '\t' << dictionary.term(id) << '\n';
}

}  // namespace routerec::corpus
