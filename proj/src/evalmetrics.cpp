#include "routerec/evalmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "routerec/error.hpp"

namespace routerec::evalmetrics {

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ClassificationMetrics classification_metrics(std::span<const classifier::Prediction> pairs,
                                             const std::string& positive_class) {
    if (pairs.empty()) throw InvalidArgument("no predictions to evaluate");
    ClassificationMetrics m;
    auto& c = m.counts;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs[i];
        if (!p.truth) throw InvalidArgument("prediction " + std::to_string(i) + " has no truth label");
        if (!p.predicted) {
            ++c.unclassifiable;
            continue;
        }
        const bool truth_pos = *p.truth == positive_class;
        const bool pred_pos = *p.predicted == positive_class;
        if (truth_pos && pred_pos) ++c.tp;
        else if (!truth_pos && pred_pos) ++c.fp;
        else if (truth_pos) ++c.fn;
        else ++c.tn;
    }
    m.precision = ratio(c.tp, c.tp + c.fp);
    m.recall = ratio(c.tp, c.tp + c.fn);
    if (m.precision && m.recall && *m.precision + *m.recall > 0.0) {
        m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
    }
    m.tnr = ratio(c.tn, c.tn + c.fp);
    m.accuracy = ratio(c.tp + c.tn, c.classified());
    m.ppcr = ratio(c.tp + c.fp, c.classified());
    return m;
}

namespace {

// element -> 1-based rank within the first k entries.
std::unordered_map<std::string, std::size_t> ranks(const RankedList& l, std::size_t k, const char* which) {
    std::unordered_map<std::string, std::size_t> r;
    for (std::size_t i = 0; i < l.size(); ++i) {
        if (!r.emplace(l[i], i + 1).second) throw InvalidArgument(std::string(which) + " list repeats element '" + l[i] + "'");
    }
    std::erase_if(r, [k](const auto& kv) { return kv.second > k; });
    return r;
}

}  // namespace

Footrule footrule_distance(const RankedList& l1, const RankedList& l2, std::size_t k) {
    if (k == 0) throw InvalidArgument("k must be at least 1");
    const auto r1 = ranks(l1, k, "first");
    const auto r2 = ranks(l2, k, "second");
    Footrule f;
    f.k = k;
    const double placement = static_cast<double>(k + 1);
    for (const auto& [e, rank] : r1) {
        auto it = r2.find(e);
        if (it != r2.end()) {
            ++f.z;
            f.overlap += std::abs(static_cast<double>(rank) - static_cast<double>(it->second));
        } else {
            f.first_only += placement - static_cast<double>(rank);
        }
    }
    for (const auto& [e, rank] : r2) {
        if (!r1.count(e)) f.second_only += placement - static_cast<double>(rank);
    }
    f.distance = f.overlap + f.first_only + f.second_only;
    return f;
}

double footrule_max(std::size_t k) { return static_cast<double>(k) * static_cast<double>(k + 1); }

double f_measure(const RankedList& l1, const RankedList& l2, std::size_t k) {
    return 1.0 - footrule_distance(l1, l2, k).distance / footrule_max(k);
}

double g_measure(const RankedList& l1, const RankedList& l2, std::size_t k) {
    return footrule_distance(l1, l2, k).distance / footrule_max(k);
}

double max_m_prime(std::size_t len1, std::size_t len2) {
    auto side = [](std::size_t len) {
        double s = 0.0;
        for (std::size_t i = 1; i <= len; ++i) s += 1.0 / static_cast<double>(i) - 1.0 / static_cast<double>(len + 1);
        return s;
    };
    return side(len1) + side(len2);
}

MMeasure m_measure(const RankedList& l1, const RankedList& l2) {
    if (l1.empty() || l2.empty()) throw InvalidArgument("M needs two non-empty lists");
    const auto r1 = ranks(l1, l1.size(), "first");
    const auto r2 = ranks(l2, l2.size(), "second");
    const double end1 = 1.0 / static_cast<double>(l1.size() + 1);
    const double end2 = 1.0 / static_cast<double>(l2.size() + 1);
    MMeasure m;
    // Iterate in list order so the floating sum does not depend on hashing.
    for (const auto& e : l1) {
        const double inv1 = 1.0 / static_cast<double>(r1.at(e));
        auto it = r2.find(e);
        m.m_prime += it != r2.end() ? std::abs(inv1 - 1.0 / static_cast<double>(it->second)) : inv1 - end1;
    }
    for (const auto& e : l2) {
        if (!r1.count(e)) m.m_prime += 1.0 / static_cast<double>(r2.at(e)) - end2;
    }
    m.max_m_prime = max_m_prime(l1.size(), l2.size());
    // Unequal lengths can push M' past the disjoint maximum; equal lengths cannot.
    m.m = std::max(0.0, 1.0 - m.m_prime / m.max_m_prime);
    return m;
}

int overlap_bucket(double overlap_fraction) {
    if (!(overlap_fraction >= 0.0 && overlap_fraction <= 1.0)) throw InvalidArgument("overlap fraction must lie in [0, 1]");
    const int c = static_cast<int>(std::ceil(5.0 * overlap_fraction - 1e-9));
    return 6 - std::max(c, 1);
}

int overlap_bucket(std::size_t z, std::size_t k) {
    if (k == 0 || z > k) throw InvalidArgument("overlap needs 0 <= z <= k and k >= 1");
    const auto c = static_cast<int>((5 * z + k - 1) / k);
    return 6 - std::max(c, 1);
}

ListComparison compare_lists(const RankedList& l1, const RankedList& l2, std::size_t k) {
    if (k == 0) throw InvalidArgument("k must be at least 1");
    const RankedList a(l1.begin(), l1.begin() + static_cast<std::ptrdiff_t>(std::min(k, l1.size())));
    const RankedList b(l2.begin(), l2.begin() + static_cast<std::ptrdiff_t>(std::min(k, l2.size())));
    ListComparison c;
    c.k = std::max(a.size(), b.size());
    if (c.k == 0) {
        c.f = 1.0;
        c.m = 1.0;
        c.overlap_fraction = 1.0;
        c.bucket = 1;
        return c;
    }
    const auto fr = footrule_distance(a, b, c.k);
    const std::unordered_set<std::string> in_b(b.begin(), b.end());
    const std::unordered_set<std::string> in_a(a.begin(), a.end());
    for (const auto& e : a) (in_b.count(e) ? c.shared : c.first_only).push_back(e);
    for (const auto& e : b) {
        if (!in_a.count(e)) c.second_only.push_back(e);
    }
    c.z = fr.z;
    c.d_footrule = fr.distance;
    c.g = fr.distance / footrule_max(c.k);
    c.f = 1.0 - c.g;
    c.m = a.empty() || b.empty() ? 0.0 : m_measure(a, b).m;
    c.overlap_fraction = static_cast<double>(c.z) / static_cast<double>(c.k);
    c.bucket = overlap_bucket(c.z, c.k);
    return c;
}

namespace {

double aggregate(std::vector<double> values, Aggregation how) {
    if (values.empty()) return 0.0;
    if (how == Aggregation::mean) {
        double s = 0.0;
        for (double v : values) s += v;
        return s / static_cast<double>(values.size());
    }
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

}  // namespace

PairComparison compare_pairs(const Run& a, const Run& b, std::size_t k, Aggregation aggregation) {
    PairComparison pc;
    for (const auto& [query, list] : a) {
        auto it = b.find(query);
        if (it == b.end()) {
            ++pc.unmatched;
            continue;
        }
        pc.rows.emplace_back(query, compare_lists(list, it->second, k));
    }
    for (const auto& [query, _] : b) {
        if (!a.count(query)) ++pc.unmatched;
    }
    if (pc.rows.empty()) throw InvalidArgument("the two runs share no query");
    std::array<std::vector<double>, 5> fs, gs, ms;
    for (const auto& [_, c] : pc.rows) {
        const auto i = static_cast<std::size_t>(c.bucket - 1);
        fs[i].push_back(c.f);
        gs[i].push_back(c.g);
        ms[i].push_back(c.m);
    }
    for (std::size_t i = 0; i < 5; ++i) {
        pc.buckets[i] = {fs[i].size(), aggregate(fs[i], aggregation), aggregate(gs[i], aggregation),
                         aggregate(ms[i], aggregation)};
    }
    return pc;
}

Run read_run(std::istream& in) {
    std::map<std::string, std::map<std::size_t, std::string>> by_rank;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
            throw ParseError(lineno, "expected 'query_id<TAB>rank<TAB>element_id'");
        }
        const std::string query = line.substr(0, t1);
        const std::string rank_text = line.substr(t1 + 1, t2 - t1 - 1);
        const std::string element = line.substr(t2 + 1);
        std::size_t used = 0;
        unsigned long rank = 0;
        try {
            rank = std::stoul(rank_text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != rank_text.size() || rank == 0) throw ParseError(lineno, "rank must be a positive integer");
        if (query.empty() || element.empty()) throw ParseError(lineno, "empty query or element id");
        if (!by_rank[query].emplace(rank, element).second) {
            throw ParseError(lineno, "rank " + rank_text + " repeated for query '" + query + "'");
        }
    }
    Run run;
    for (auto& [query, entries] : by_rank) {
        RankedList list;
        std::unordered_set<std::string> seen;
        for (auto& [rank, element] : entries) {
            if (rank != list.size() + 1) throw ParseError(0, "query '" + query + "' skips rank " + std::to_string(list.size() + 1));
            if (!seen.insert(element).second) throw ParseError(0, "query '" + query + "' repeats element '" + element + "'");
            list.push_back(std::move(element));
        }
        run.emplace(query, std::move(list));
    }
    return run;
}

void write_run(std::ostream& out, const Run& run) {
    for (const auto& [query, list] : run) {
        for (std::size_t i = 0; i < list.size(); ++i) out << query << '\t' << i + 1 << '\t' << list[i] << '\n';
    }
}

namespace {

std::string num(double v) {
    std::ostringstream s;
    s << std::setprecision(12) << v;
    return s.str();
}

}  // namespace

void write_comparison_csv(std::ostream& out, const PairComparison& pc) {
    out << "query_id,z,overlap_fraction,bucket,d_footrule,F,G,M\n";
    for (const auto& [query, c] : pc.rows) {
        out << query << ',' << c.z << ',' << num(c.overlap_fraction) << ',' << c.bucket << ',' << num(c.d_footrule)
            << ',' << num(c.f) << ',' << num(c.g) << ',' << num(c.m) << '\n';
    }
}

void write_bucket_csv(std::ostream& out, const PairComparison& pc) {
    out << "bucket,count,F,G,M\n";
    for (std::size_t i = 0; i < pc.buckets.size(); ++i) {
        const auto& b = pc.buckets[i];
        out << i + 1 << ',' << b.count << ',' << num(b.f) << ',' << num(b.g) << ',' << num(b.m) << '\n';
    }
}

}  // namespace routerec::evalmetrics
