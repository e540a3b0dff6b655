#include "routerec/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>

namespace routerec::fixtures {

namespace {

using corpus::LabeledDatabase;
using corpus::TagDictionary;
using corpus::TagId;
using corpus::Transaction;

// Plain modulo and bit arithmetic on raw draws keep the fixtures identical
// across standard libraries, whose distributions are implementation-defined.
std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

TagDictionary numbered_dictionary(TagId n, const char* prefix, int width) {
    TagDictionary d;
    char buf[32];
    for (TagId i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "%s%0*u", prefix, width, static_cast<unsigned>(i));
        d.insert(i, buf);
    }
    return d;
}

void add_distinct(std::vector<TagId>& tags, TagId tag) {
    if (std::find(tags.begin(), tags.end(), tag) == tags.end()) tags.push_back(tag);
}

}  // namespace

LabeledDatabase random_database(std::mt19937_64& rng, std::size_t n, TagId tags, std::size_t max_len) {
    LabeledDatabase db(numbered_dictionary(tags, "t", 3));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<TagId> t;
        const auto len = 1 + pick(rng, max_len);
        for (std::size_t k = 0; k < len; ++k) t.push_back(static_cast<TagId>(pick(rng, tags)));
        db.add(Transaction::from_unsorted(std::move(t)));
    }
    return db;
}

LabeledDatabase planted_pattern_database(std::size_t positives, std::size_t negatives, std::uint64_t seed) {
    constexpr TagId kPatternTags = 18, kNoiseTags = 12;
    LabeledDatabase db(numbered_dictionary(kPatternTags + kNoiseTags, "t", 2));
    std::mt19937_64 rng(seed);
    auto make = [&](TagId own_base, TagId other_base) {
        std::vector<TagId> t;
        const auto first = pick(rng, 3);
        const auto second = (first + 1 + pick(rng, 2)) % 3;
        for (auto p : {first, second}) {
            for (TagId k = 0; k < 3; ++k) {
                if (k == 0 || pick(rng, 5) != 0) t.push_back(own_base + static_cast<TagId>(3 * p) + k);
            }
        }
        while (t.size() < 8) add_distinct(t, kPatternTags + static_cast<TagId>(pick(rng, kNoiseTags)));
        if (pick(rng, 10) == 0) t.push_back(other_base + static_cast<TagId>(pick(rng, 9)));
        return Transaction::from_unsorted(std::move(t));
    };
    // Interleaved so any prefix keeps roughly the overall class ratio.
    std::size_t p = 0, n = 0;
    while (p < positives || n < negatives) {
        const bool take_pos = n >= negatives || (p < positives && p * (negatives + 1) <= n * (positives + 1));
        if (take_pos) {
            db.add(make(0, 9), "pos");
            ++p;
        } else {
            db.add(make(9, 0), "neg");
            ++n;
        }
    }
    return db;
}

LabeledDatabase foursquare_shaped_database(std::uint64_t seed) {
    constexpr TagId kTags = 2800;
    LabeledDatabase db(numbered_dictionary(kTags, "w", 4));
    std::mt19937_64 rng(seed);
    auto draw = [&](bool negative) {
        // Log-uniform rank: tag r is drawn with probability roughly 1 / r.
        auto r = static_cast<TagId>(std::exp(unit(rng) * std::log(static_cast<double>(kTags + 1)))) - 1;
        r = std::min<TagId>(r, kTags - 1);
        if (negative && pick(rng, 2) == 0) r = (r + kTags / 2) % kTags;
        return r;
    };
    auto make = [&](bool negative) {
        const std::size_t len = 1 + pick(rng, negative ? 7 : 10);
        std::vector<TagId> t;
        while (t.size() < len) add_distinct(t, draw(negative));
        return Transaction::from_unsorted(std::move(t));
    };
    for (int i = 0; i < 630; ++i) db.add(make(false), "pos");
    for (int i = 0; i < 59; ++i) db.add(make(true), "neg");
    return db;
}

routing::RoadGraph random_geo_graph(std::mt19937_64& rng, std::size_t n, double edge_prob, bool some_directed) {
    routing::RoadGraph g;
    std::vector<routing::NodeId> ids;
    for (std::size_t i = 0; i < n; ++i) {
        routing::RoadNode node{static_cast<routing::NodeId>(10 + 3 * i), 52.0 + 0.02 * unit(rng), 4.0 + 0.02 * unit(rng)};
        g.add_node(node);
        ids.push_back(node.id);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (unit(rng) >= edge_prob) continue;
            const double straight = routing::haversine(g.node(ids[i]).position(), g.node(ids[j]).position());
            const double len = std::max(straight * (1.0 + 0.5 * unit(rng)), 1.0);
            const bool directed = some_directed && pick(rng, 4) == 0;
            if (directed && pick(rng, 2) == 0) {
                g.add_edge(ids[j], ids[i], len, true);
            } else {
                g.add_edge(ids[i], ids[j], len, directed);
            }
        }
    }
    return g;
}

std::vector<routing::Route> all_simple_paths(const routing::RoadGraph& g, routing::NodeId s, routing::NodeId t) {
    std::vector<routing::Route> out;
    std::vector<std::size_t> path{g.index_of(s)};
    std::vector<bool> on_path(g.node_count(), false);
    on_path[path[0]] = true;
    const auto target = g.index_of(t);
    std::function<void(double)> dfs = [&](double length) {
        const auto at = path.back();
        if (at == target) {
            routing::Route r;
            for (auto i : path) r.path.push_back(g.node_at(i).id);
            r.total_m = length;
            out.push_back(std::move(r));
            return;
        }
        for (const auto& arc : g.arcs(at)) {
            if (on_path[arc.to]) continue;
            on_path[arc.to] = true;
            path.push_back(arc.to);
            dfs(length + arc.length_m);
            path.pop_back();
            on_path[arc.to] = false;
        }
    };
    dfs(0.0);
    std::sort(out.begin(), out.end(), [](const routing::Route& a, const routing::Route& b) {
        return a.total_m != b.total_m ? a.total_m < b.total_m : a.path < b.path;
    });
    return out;
}

routing::RoadGraph diamond_graph() {
    // Nodes a few centimeters apart, so the stated lengths stay above the
    // straight-line distance and are kept verbatim.
    routing::RoadGraph g;
    g.add_node({1, 52.0, 4.0});
    g.add_node({2, 52.0000001, 4.0000001});
    g.add_node({3, 51.9999999, 4.0000001});
    g.add_node({4, 52.0, 4.0000002});
    g.add_edge(1, 2, 1.0);
    g.add_edge(2, 4, 1.0);
    g.add_edge(1, 3, 2.0);
    g.add_edge(3, 4, 2.0);
    return g;
}

namespace {

constexpr const char* kCuisines[] = {"pizza", "sushi", "burger", "noodle", "coffee",
                                     "taco",  "curry", "bakery", "steak",  "salad"};
constexpr const char* kOwners[] = {"Luigi's", "Golden", "Corner", "Blue Door", "Harbor",
                                   "Old Town", "Sunny",  "Little", "Royal",     "Green Leaf"};
constexpr const char* kStreets[] = {"Oak", "Maple", "Harbor", "Market", "Station", "Mill", "River", "Garden"};
constexpr const char* kPraise[] = {"delicious", "friendly", "excellent", "tasty", "cozy", "fresh", "cheap", "great"};
constexpr const char* kComplaints[] = {"bland", "rude", "slow", "dirty", "expensive", "cold", "stale", "awful"};
constexpr const char* kQueryAdjectives[] = {"cheap", "cozy", "fresh", "spicy", "late"};

template <std::size_t N>
const char* any(std::mt19937_64& rng, const char* const (&words)[N]) {
    return words[pick(rng, N)];
}

}  // namespace

City synthetic_city(std::uint64_t seed) {
    constexpr int kSide = 21;
    constexpr double kBlockM = 200.0;
    City city;
    city.center = {52.0, 4.0};
    std::mt19937_64 rng(seed);
    const double dlat = kBlockM / (routing::kEarthRadiusM * std::numbers::pi / 180.0);
    const double dlon = dlat / std::cos(city.center.lat * std::numbers::pi / 180.0);
    auto id_of = [](int r, int c) { return static_cast<routing::NodeId>(1000 + r * kSide + c); };
    for (int r = 0; r < kSide; ++r) {
        for (int c = 0; c < kSide; ++c) {
            city.graph.add_node({id_of(r, c), city.center.lat + (r - kSide / 2) * dlat,
                                 city.center.lon + (c - kSide / 2) * dlon});
        }
    }
    auto connect = [&](routing::NodeId u, routing::NodeId v) {
        const double straight = routing::haversine(city.graph.node(u).position(), city.graph.node(v).position());
        city.graph.add_edge(u, v, straight * (1.0 + 0.3 * unit(rng)));
    };
    for (int r = 0; r < kSide; ++r) {
        for (int c = 0; c < kSide; ++c) {
            if (c + 1 < kSide) connect(id_of(r, c), id_of(r, c + 1));
            if (r + 1 < kSide) connect(id_of(r, c), id_of(r + 1, c));
        }
    }

    std::vector<std::size_t> slots(city.graph.node_count());
    for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
    for (std::size_t i = 0; i < 160; ++i) std::swap(slots[i], slots[i + pick(rng, slots.size() - i)]);
    for (std::size_t i = 0; i < 160; ++i) {
        const auto& node = city.graph.node_at(slots[i]);
        const char* cuisine = kCuisines[i % std::size(kCuisines)];
        corpus::Place p;
        char id[16];
        std::snprintf(id, sizeof id, "p%03zu", i + 1);
        p.id = id;
        p.name = std::string(any(rng, kOwners)) + " " + cuisine;
        if (pick(rng, 3) == 0) p.name += std::string(" ") + any(rng, kCuisines);
        p.address = std::to_string(1 + pick(rng, 120)) + " " + any(rng, kStreets) + " Street";
        p.lat = node.lat;
        p.lon = node.lon;
        const bool positive = pick(rng, 5) != 0;
        p.sentiment = positive ? corpus::Sentiment::positive : corpus::Sentiment::negative;
        const char* dish = pick(rng, 2) ? cuisine : any(rng, kCuisines);
        if (positive) {
            p.review = std::string(any(rng, kPraise)) + " " + dish + ", " + any(rng, kPraise) + " staff and " +
                       any(rng, kPraise) + " service near " + any(rng, kStreets) + " street";
        } else {
            p.review = std::string(any(rng, kComplaints)) + " " + dish + ", " + any(rng, kComplaints) +
                       " staff and " + any(rng, kComplaints) + " service";
        }
        city.places.push_back(std::move(p));
    }

    for (std::size_t i = 0; i < 90; ++i) {
        const char* cuisine = kCuisines[i % std::size(kCuisines)];
        std::string text;
        switch ((i / std::size(kCuisines)) % 3) {
            case 0: text = cuisine; break;
            case 1: text = std::string(any(rng, kQueryAdjectives)) + " " + cuisine; break;
            default: text = std::string(cuisine) + " near " + any(rng, kStreets) + " street"; break;
        }
        const auto& node = city.graph.node_at(pick(rng, city.graph.node_count()));
        char id[8];
        std::snprintf(id, sizeof id, "q%02zu", i + 1);
        city.queries.push_back({id, node.lat + 0.3 * dlat * unit(rng), node.lon + 0.3 * dlon * unit(rng), text});
    }
    return city;
}

}  // namespace routerec::fixtures
