#include "routerec/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include "routerec/error.hpp"

namespace routerec::scoring {

Query parse_query(std::string_view raw, const textprep::Stoplist& stoplist) {
    Query q;
    q.raw = std::string(raw);
    std::unordered_set<std::string> seen;
    std::vector<std::string> run;
    auto flush = [&] {
        if (run.size() >= 2) q.phrases.push_back(run);
        run.clear();
    };
    for (auto& tok : textprep::tokenize_and_filter(raw, stoplist)) {
        if (tok.boundary) {
            flush();
            continue;
        }
        if (seen.insert(tok.text).second) q.terms.push_back(tok.text);
        run.push_back(std::move(tok.text));
    }
    flush();
    if (q.terms.empty()) throw InvalidArgument("query has no searchable terms");
    return q;
}

std::string_view to_string(Field f) {
    switch (f) {
        case Field::name: return "name";
        case Field::address: return "address";
        case Field::review: return "review";
        case Field::none: break;
    }
    return "none";
}

namespace {

bool has(const std::vector<std::string>& field, const std::string& term) {
    return std::find(field.begin(), field.end(), term) != field.end();
}

}  // namespace

bool FieldDoc::in_name(const std::string& term) const { return has(name, term); }
bool FieldDoc::in_address(const std::string& term) const { return has(address, term); }
bool FieldDoc::in_review(const std::string& term) const { return has(review, term); }
bool FieldDoc::matches(const std::string& term) const {
    return in_name(term) || in_address(term) || in_review(term);
}

std::size_t FieldDoc::count(const std::string& term) const {
    std::size_t n = 0;
    for (const auto* field : {&name, &address, &review}) n += static_cast<std::size_t>(std::count(field->begin(), field->end(), term));
    return n;
}

FieldDoc make_field_doc(const corpus::Place& place, std::optional<corpus::Sentiment> sentiment,
                        std::optional<double> route_distance_m) {
    return {place.id,
            textprep::words(place.name),
            textprep::words(place.address),
            textprep::words(place.review),
            sentiment,
            route_distance_m};
}

IndexStats::IndexStats(std::span<const FieldDoc> docs) : documents_(docs.size()) {
    for (const auto& d : docs) {
        std::unordered_set<std::string> terms;
        for (const auto* field : {&d.name, &d.address, &d.review}) terms.insert(field->begin(), field->end());
        for (const auto& t : terms) ++df_[t];
    }
}

std::size_t IndexStats::df(const std::string& term) const {
    auto it = df_.find(term);
    return it == df_.end() ? 0 : it->second;
}

double IndexStats::idf(const std::string& term) const {
    if (documents_ == 0) throw InvalidArgument("index statistics are empty");
    return 1.0 + std::log(static_cast<double>(documents_) / static_cast<double>(df(term) + 1));
}

int w_length(const Query& q, const FieldDoc& d) {
    int n = 0;
    for (const auto& t : q.terms) n += d.matches(t) ? 1 : 0;
    return std::min(n, 3);
}

double w_sentiment(const FieldDoc& d, int wl) {
    return d.sentiment == corpus::Sentiment::positive ? wl : wl / 2.0;
}

int w_dist(std::optional<double> route_distance_m) {
    if (!route_distance_m) return 0;
    const double m = *route_distance_m;
    if (m < 0.0 || std::isnan(m)) throw InvalidArgument("route distance must be non-negative");
    if (m <= 1000.0) return 3;
    if (m <= 2000.0) return 2;
    if (m <= 5000.0) return 1;
    return 0;
}

int w_pop(const std::string& term, const FieldDoc& d) {
    const bool name = d.in_name(term);
    const bool address = d.in_address(term);
    if (name && address) return 3;
    if (name || address) return 2;
    return d.in_review(term) ? 1 : 0;
}

int w_field(const std::string& term, const FieldDoc& d) {
    if (d.in_name(term)) return 3;
    if (d.in_review(term)) return 2;
    if (d.in_address(term)) return 1;
    return 0;
}

BoostBreakdown boost(const std::string& term, const FieldDoc& d, const Query& q) {
    BoostBreakdown b;
    const int wl = w_length(q, d);
    b.w_length = wl;
    b.w_sentiment = w_sentiment(d, wl);
    b.w_dist = w_dist(d.route_distance_m);
    b.w_pop = w_pop(term, d);
    b.w_field = w_field(term, d);
    b.product = b.w_length * b.w_sentiment * b.w_dist * b.w_pop * b.w_field;
    return b;
}

BoostBreakdown unit_boost() { return {}; }

namespace {

Field best_field(const std::string& term, const FieldDoc& d) {
    if (d.in_name(term)) return Field::name;
    if (d.in_review(term)) return Field::review;
    if (d.in_address(term)) return Field::address;
    return Field::none;
}

std::size_t field_length(const FieldDoc& d, Field f) {
    switch (f) {
        case Field::name: return d.name.size();
        case Field::address: return d.address.size();
        case Field::review: return d.review.size();
        case Field::none: break;
    }
    return 0;
}

}  // namespace

ScoreReport score(const Query& q, const FieldDoc& d, const IndexStats& stats, bool boosts_enabled) {
    if (q.terms.empty()) throw InvalidArgument("empty query");
    ScoreReport r;
    double idf_sq = 0.0;
    std::size_t matched = 0;
    for (const auto& term : q.terms) {
        TermScore ts;
        ts.term = term;
        ts.idf = stats.idf(term);
        idf_sq += ts.idf * ts.idf;
        ts.count = d.count(term);
        if (ts.count > 0) {
            ++matched;
            ts.tf = std::sqrt(static_cast<double>(ts.count));
            ts.field = best_field(term, d);
            ts.norm = 1.0 / std::sqrt(static_cast<double>(field_length(d, ts.field)));
            ts.boost = boosts_enabled ? boost(term, d, q) : unit_boost();
            ts.contribution = ts.tf * ts.idf * ts.idf * ts.boost.product * ts.norm;
        } else {
            ts.boost = boosts_enabled ? boost(term, d, q) : unit_boost();
        }
        r.terms.push_back(std::move(ts));
    }
    r.query_norm = 1.0 / std::sqrt(idf_sq);
    r.coord = static_cast<double>(matched) / static_cast<double>(q.terms.size());
    r.total = recompute_total(r);
    return r;
}

double recompute_total(const ScoreReport& report) {
    double sum = 0.0;
    for (const auto& t : report.terms) sum += t.tf * t.idf * t.idf * t.boost.product * t.norm;
    return report.query_norm * report.coord * sum;
}

std::vector<RankedDoc> rank_candidates(const Query& q, std::span<const FieldDoc> docs, const IndexStats& stats,
                                       std::size_t limit, bool boosts_enabled) {
    std::vector<RankedDoc> out;
    for (const auto& d : docs) {
        auto report = score(q, d, stats, boosts_enabled);
        if (report.total > 0.0) out.push_back({d.place_id, d.route_distance_m, std::move(report)});
    }
    std::sort(out.begin(), out.end(), [](const RankedDoc& a, const RankedDoc& b) {
        if (a.report.total != b.report.total) return a.report.total > b.report.total;
        const double da = a.route_distance_m.value_or(INFINITY);
        const double db = b.route_distance_m.value_or(INFINITY);
        if (da != db) return da < db;
        return a.place_id < b.place_id;
    });
    if (out.size() > limit) out.resize(limit);
    return out;
}

std::vector<BatchQuery> read_batch(std::istream& in) {
    std::vector<BatchQuery> out;
    std::set<std::string> ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cols;
        std::size_t start = 0;
        for (int i = 0; i < 3; ++i) {
            const auto tab = line.find('\t', start);
            if (tab == std::string::npos) throw ParseError(lineno, "expected 'query_id<TAB>lat<TAB>lon<TAB>text'");
            cols.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
        BatchQuery q;
        q.id = cols[0];
        q.text = line.substr(start);
        try {
            std::size_t used_lat = 0, used_lon = 0;
            q.lat = std::stod(cols[1], &used_lat);
            q.lon = std::stod(cols[2], &used_lon);
            if (used_lat != cols[1].size() || used_lon != cols[2].size()) throw std::invalid_argument("trailing text");
        } catch (const std::exception&) {
            throw ParseError(lineno, "coordinates must be numbers");
        }
        if (q.id.empty()) throw ParseError(lineno, "empty query id");
        if (!(std::abs(q.lat) <= 90.0 && std::abs(q.lon) <= 180.0)) throw ParseError(lineno, "coordinates out of range");
        if (!ids.insert(q.id).second) throw ParseError(lineno, "query id '" + q.id + "' repeated");
        out.push_back(std::move(q));
    }
    return out;
}

void write_batch(std::ostream& out, const std::vector<BatchQuery>& batch) {
    const auto old = out.precision(17);
    for (const auto& q : batch) out << q.id << '\t' << q.lat << '\t' << q.lon << '\t' << q.text << '\n';
    out.precision(old);
}

}  // namespace routerec::scoring
