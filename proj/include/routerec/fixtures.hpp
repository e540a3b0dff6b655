#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "routerec/corpus.hpp"
#include "routerec/routing.hpp"
#include "routerec/scoring.hpp"

// Deterministic synthetic data shared by tests, the acceptance suite and the
// `synth` command. Every generator is a pure function of its seed.
namespace routerec::fixtures {

// n transactions of 1..max_len tags drawn uniformly from ids [0, tags).
// Unlabeled; the dictionary spells id i as its zero-padded number.
corpus::LabeledDatabase random_database(std::mt19937_64& rng, std::size_t n, corpus::TagId tags,
                                        std::size_t max_len);

// Two classes ("pos", "neg"), each built from three class-specific 3-tag
// patterns. A transaction holds two patterns of its class (the first tag
// always, the other two with probability 4/5 each), filled up to 8 tags
// from a shared noise pool, and with probability 1/10 one tag from the
// other class's patterns.
corpus::LabeledDatabase planted_pattern_database(std::size_t positives, std::size_t negatives, std::uint64_t seed);

// 630 pos / 59 neg transactions over a 2800-tag alphabet, at most 10 tags
// (pos) and 7 tags (neg) per transaction, with Zipf-like tag popularity.
corpus::LabeledDatabase foursquare_shaped_database(std::uint64_t seed);

// Nodes scattered over roughly 2 km with ids 10 + 3i; each node pair gets an
// edge with probability edge_prob, its length the straight-line distance
// stretched by a factor in [1, 1.5). With some_directed, about a quarter of
// the edges are one-way.
routing::RoadGraph random_geo_graph(std::mt19937_64& rng, std::size_t n, double edge_prob, bool some_directed);

// Every simple s-t path by depth-first search over g's arcs, sorted by
// (total_m, path). Exponential; meant for graphs of a handful of nodes.
std::vector<routing::Route> all_simple_paths(const routing::RoadGraph& g, routing::NodeId s, routing::NodeId t);

// s=1 -> a=2 -> t=4 with 1 m hops and s -> b=3 -> t with 2 m hops.
routing::RoadGraph diamond_graph();

struct City {
    routing::RoadGraph graph;
    std::vector<corpus::Place> places;
    std::vector<scoring::BatchQuery> queries;
    routing::LatLon center;
};

// A 21 x 21 street grid with 200 m blocks, 160 places at grid nodes
// (cuisine names, street addresses, templated reviews with sentiment
// labels) and 90 queries from positions spread over the grid.
City synthetic_city(std::uint64_t seed);

}  // namespace routerec::fixtures
