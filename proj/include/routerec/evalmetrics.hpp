#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "routerec/classifier.hpp"

namespace routerec::evalmetrics {

struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::size_t unclassifiable = 0;

    std::size_t classified() const { return tp + fp + tn + fn; }
    std::size_t evaluated() const { return classified() + unclassifiable; }
};

// Ratios with a zero denominator are nullopt rather than 0.
struct ClassificationMetrics {
    ConfusionCounts counts;
    std::optional<double> precision, recall, f1, tnr, accuracy, ppcr;
};

// One-vs-rest against positive_class. Pairs without a prediction count as
// unclassifiable and stay out of every ratio. Throws on empty input or a
// pair without a truth label.
ClassificationMetrics classification_metrics(std::span<const classifier::Prediction> pairs,
                                             const std::string& positive_class);

// Element ids, best first. Ranks are 1-based positions.
using RankedList = std::vector<std::string>;

struct Footrule {
    std::size_t k = 0;
    std::size_t z = 0;     // elements in both top-k lists
    double overlap = 0.0;  // sum over shared elements of |r1 - r2|
    double first_only = 0.0;   // sum of (k + 1 - r1) over first-only elements
    double second_only = 0.0;  // sum of (k + 1 - r2) over second-only elements
    double distance = 0.0;
};

// Footrule distance of the two top-k prefixes, with an element missing from
// one list placed at rank k + 1. Throws on k == 0 or duplicates in a list.
Footrule footrule_distance(const RankedList& l1, const RankedList& l2, std::size_t k);

// k(k + 1), the distance of two disjoint full top-k lists.
double footrule_max(std::size_t k);
// 1 - d / footrule_max(k).
double f_measure(const RankedList& l1, const RankedList& l2, std::size_t k);
// d / footrule_max(k) = 1 - F.
double g_measure(const RankedList& l1, const RankedList& l2, std::size_t k);

struct MMeasure {
    double m_prime = 0.0;
    double max_m_prime = 0.0;
    double m = 0.0;
};

// M' of two fully disjoint lists of these lengths:
// sum_{i<=l1} (1/i - 1/(l1+1)) + sum_{i<=l2} (1/i - 1/(l2+1)).
double max_m_prime(std::size_t len1, std::size_t len2);

// Reciprocal-rank distance M' (absolute differences over shared elements)
// and M = 1 - M' / max_m_prime, floored at 0 (reachable only for lists of
// unequal length). Throws on an empty list or duplicates.
MMeasure m_measure(const RankedList& l1, const RankedList& l2);

// Interval index 1..5 of an overlap fraction: 1 is (0.8, 1], 5 is [0, 0.2].
int overlap_bucket(double overlap_fraction);
// Same from integer counts, free of rounding: z shared out of k.
int overlap_bucket(std::size_t z, std::size_t k);

struct ListComparison {
    std::size_t k = 0;  // compared prefix length
    std::size_t z = 0;
    std::vector<std::string> shared, first_only, second_only;
    double d_footrule = 0.0;
    double f = 0.0, g = 0.0, m = 0.0;
    double overlap_fraction = 0.0;
    int bucket = 0;
};

// Compares the top-k prefixes. The compared length is the longer truncated
// list, so identical short lists still count as full overlap. Two empty
// lists compare as identical; M of an empty against a non-empty list is 0.
ListComparison compare_lists(const RankedList& l1, const RankedList& l2, std::size_t k);

inline constexpr std::size_t kDefaultTopK = 10;

enum class Aggregation { mean, median };

struct BucketSummary {
    std::size_t count = 0;
    double f = 0.0, g = 0.0, m = 0.0;  // aggregated over the bucket's queries; 0 when empty
};

// query id -> ranked list.
using Run = std::map<std::string, RankedList>;

struct PairComparison {
    std::vector<std::pair<std::string, ListComparison>> rows;  // ascending query id
    std::array<BucketSummary, 5> buckets;                     // buckets[x - 1]
    std::size_t unmatched = 0;  // queries present in only one run
};

// Compares every query present in both runs. Throws when no query is shared.
PairComparison compare_pairs(const Run& a, const Run& b, std::size_t k = kDefaultTopK,
                             Aggregation aggregation = Aggregation::mean);

// Run file: "query_id<TAB>rank<TAB>element_id" per line, ranks 1..n per query.
Run read_run(std::istream& in);
void write_run(std::ostream& out, const Run& run);

// Header: query_id,z,overlap_fraction,bucket,d_footrule,F,G,M
void write_comparison_csv(std::ostream& out, const PairComparison& pc);
// Header: bucket,count,F,G,M
void write_bucket_csv(std::ostream& out, const PairComparison& pc);

}  // namespace routerec::evalmetrics
