#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "routerec/corpus.hpp"
#include "routerec/textprep.hpp"

namespace routerec::scoring {

struct Query {
    std::string raw;
    // Unique lowercase terms in first-occurrence order, stopwords removed.
    std::vector<std::string> terms;
    // Runs of two or more consecutive content words.
    std::vector<std::vector<std::string>> phrases;
};

// Throws InvalidArgument when no content term remains.
Query parse_query(std::string_view raw, const textprep::Stoplist& stoplist = textprep::Stoplist::english());

enum class Field { none, name, address, review };

std::string_view to_string(Field f);

// A place as the scorer sees it: tokenized fields plus the sentiment and
// route distance known at query time.
struct FieldDoc {
    std::string place_id;
    std::vector<std::string> name;
    std::vector<std::string> address;
    std::vector<std::string> review;
    std::optional<corpus::Sentiment> sentiment;
    std::optional<double> route_distance_m;

    bool in_name(const std::string& term) const;
    bool in_address(const std::string& term) const;
    bool in_review(const std::string& term) const;
    bool matches(const std::string& term) const;
    // Occurrences of term across all three fields.
    std::size_t count(const std::string& term) const;
};

FieldDoc make_field_doc(const corpus::Place& place, std::optional<corpus::Sentiment> sentiment,
                        std::optional<double> route_distance_m);

// Document frequencies over a place collection.
class IndexStats {
public:
    IndexStats() = default;
    explicit IndexStats(std::span<const FieldDoc> docs);

    std::size_t documents() const { return documents_; }
    std::size_t df(const std::string& term) const;
    // 1 + ln(N / (df + 1)).
    double idf(const std::string& term) const;

private:
    std::size_t documents_ = 0;
    std::unordered_map<std::string, std::size_t> df_;
};

// Unique query terms found in any field, capped at 3.
int w_length(const Query& q, const FieldDoc& d);
// wl for positive sentiment, wl / 2 otherwise (negative or unknown).
double w_sentiment(const FieldDoc& d, int wl);
// 3 up to 1 km, 2 up to 2 km, 1 up to 5 km, 0 beyond or unknown. Upper
// bounds are inclusive. Throws on a negative distance.
int w_dist(std::optional<double> route_distance_m);
// 3: name and address; 2: exactly one of them; 1: review only; 0: no match.
int w_pop(const std::string& term, const FieldDoc& d);
// 3: name; 2: review; 1: address; 0: no match. The highest applies.
int w_field(const std::string& term, const FieldDoc& d);

struct BoostBreakdown {
    double w_length = 1.0;
    double w_sentiment = 1.0;
    double w_dist = 1.0;
    double w_pop = 1.0;
    double w_field = 1.0;
    double product = 1.0;

    bool operator==(const BoostBreakdown&) const = default;
};

BoostBreakdown boost(const std::string& term, const FieldDoc& d, const Query& q);
// All factors 1, for the unboosted baseline.
BoostBreakdown unit_boost();

struct TermScore {
    std::string term;
    std::size_t count = 0;
    double tf = 0.0;
    double idf = 0.0;
    BoostBreakdown boost;
    double norm = 0.0;
    Field field = Field::none;  // field the norm was taken from
    double contribution = 0.0;  // tf * idf^2 * boost * norm
};

struct ScoreReport {
    std::vector<TermScore> terms;
    double query_norm = 0.0;
    double coord = 0.0;
    double total = 0.0;
};

// total = queryNorm * coord * sum over query terms of tf * idf^2 * boost * norm,
// with tf = sqrt(count), norm = 1/sqrt(length of the best-matching field in
// name > review > address order), coord = matched / |q| and
// queryNorm = 1/sqrt(sum of idf^2). Unmatched terms contribute 0.
ScoreReport score(const Query& q, const FieldDoc& d, const IndexStats& stats, bool boosts_enabled = true);

// Recomputes total from the report's parts.
double recompute_total(const ScoreReport& report);

struct RankedDoc {
    std::string place_id;
    std::optional<double> route_distance_m;
    ScoreReport report;
};

// Descending total; ties by ascending distance (unknown last), then place
// id. Zero totals are dropped; at most limit results.
std::vector<RankedDoc> rank_candidates(const Query& q, std::span<const FieldDoc> docs, const IndexStats& stats,
                                       std::size_t limit, bool boosts_enabled = true);

// One query of a batch, posed from a user position.
struct BatchQuery {
    std::string id;
    double lat = 0.0;
    double lon = 0.0;
    std::string text;

    bool operator==(const BatchQuery&) const = default;
};

// Batch file: "query_id<TAB>lat<TAB>lon<TAB>text" per line; blank lines and
// lines starting with '#' are skipped. Throws ParseError on malformed lines,
// out-of-range coordinates or a repeated id.
std::vector<BatchQuery> read_batch(std::istream& in);
void write_batch(std::ostream& out, const std::vector<BatchQuery>& batch);

}  // namespace routerec::scoring
