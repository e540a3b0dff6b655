#include "routerec/routing.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "routerec/error.hpp"

namespace routerec::routing {
namespace {

// ---- Oracles ----

struct OracleEdge {
    NodeId u, v;
    double len;
    bool directed;
};

// All simple s-t paths by depth-first enumeration, sorted by (length, path).
std::vector<Route> all_simple_paths(const std::vector<NodeId>& ids, const std::vector<OracleEdge>& edges, NodeId s,
                                    NodeId t) {
    std::map<NodeId, std::map<NodeId, double>> adj;
    for (NodeId id : ids) adj[id];
    for (const auto& e : edges) {
        adj[e.u][e.v] = e.len;
        if (!e.directed) adj[e.v][e.u] = e.len;
    }
    std::vector<Route> out;
    std::vector<NodeId> path{s};
    std::set<NodeId> on_path{s};
    std::function<void(NodeId)> dfs = [&](NodeId at) {
        if (at == t) {
            double total = 0;
            for (std::size_t i = 1; i < path.size(); ++i) total += adj[path[i - 1]][path[i]];
            out.push_back({path, total});
            return;
        }
        for (const auto& [next, _] : adj[at]) {
            if (on_path.count(next)) continue;
            path.push_back(next);
            on_path.insert(next);
            dfs(next);
            on_path.erase(next);
            path.pop_back();
        }
    };
    dfs(s);
    std::sort(out.begin(), out.end(), [](const Route& a, const Route& b) {
        return a.total_m != b.total_m ? a.total_m < b.total_m : a.path < b.path;
    });
    return out;
}

struct RandomGraph {
    RoadGraph g;
    std::vector<NodeId> ids;
    std::vector<OracleEdge> edges;
};

// Nodes scattered over roughly 2 km; edge lengths are the straight-line
// distance stretched by a random factor in [1, 1.5).
RandomGraph random_graph(std::mt19937_64& rng, std::size_t n, double edge_prob, bool some_directed) {
    std::uniform_real_distribution<double> coord(0.0, 0.02), stretch(1.0, 1.5), coin(0.0, 1.0);
    RandomGraph r;
    for (std::size_t i = 0; i < n; ++i) {
        RoadNode node{static_cast<NodeId>(10 + 3 * i), 52.0 + coord(rng), 4.0 + coord(rng)};
        r.g.add_node(node);
        r.ids.push_back(node.id);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (coin(rng) >= edge_prob) continue;
            const auto& a = r.g.node(r.ids[i]);
            const auto& b = r.g.node(r.ids[j]);
            const double len = haversine(a.position(), b.position()) * stretch(rng);
            const bool directed = some_directed && coin(rng) < 0.3;
            const bool flip = coin(rng) < 0.5;
            OracleEdge e{flip ? b.id : a.id, flip ? a.id : b.id, len, directed};
            r.g.add_edge(e.u, e.v, e.len, e.directed);
            r.edges.push_back(e);
        }
    }
    return r;
}

// ---- haversine ----

TEST(Haversine, IdentityIsZero) { EXPECT_EQ(haversine({51.5, -0.1}, {51.5, -0.1}), 0.0); }

TEST(Haversine, HalfCircumference) {
    EXPECT_NEAR(haversine({0, 0}, {0, 180}), std::numbers::pi * 6'371'000.0, 1e-6);
    EXPECT_NEAR(haversine({0, 0}, {0, 180}), 20'015'087.0, 1.0);
}

TEST(Haversine, OneDegreeOfLatitude) {
    EXPECT_NEAR(haversine({10, 20}, {11, 20}), 6'371'000.0 * std::numbers::pi / 180.0, 1e-6);
}

TEST(Haversine, SymmetricOnRandomPairs) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
    for (int i = 0; i < 1000; ++i) {
        LatLon a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)};
        EXPECT_EQ(haversine(a, b), haversine(b, a));
        EXPECT_GE(haversine(a, b), 0.0);
    }
}

// ---- graph construction and file format ----

TEST(RoadGraph, RejectsBadNodesAndEdges) {
    RoadGraph g;
    g.add_node({1, 0, 0});
    EXPECT_THROW(g.add_node({1, 1, 1}), InvalidArgument);
    EXPECT_THROW(g.add_node({2, 91, 0}), InvalidArgument);
    EXPECT_THROW(g.add_node({2, 0, 181}), InvalidArgument);
    g.add_node({2, 0, 0.001});
    EXPECT_THROW(g.add_edge(1, 3, 10), InvalidArgument);
    EXPECT_THROW(g.add_edge(1, 2, 0), InvalidArgument);
    EXPECT_THROW(g.add_edge(1, 1, 5), InvalidArgument);
}

TEST(RoadGraph, ShortEdgeIsClampedToStraightLine) {
    RoadGraph g;
    g.add_node({1, 0, 0});
    g.add_node({2, 0, 0.001});
    const double straight = haversine({0, 0}, {0, 0.001});
    g.add_edge(1, 2, 50.0);
    ASSERT_EQ(g.clamped().size(), 1u);
    EXPECT_EQ(g.clamped()[0].given_m, 50.0);
    EXPECT_EQ(g.clamped()[0].clamped_m, straight);
    EXPECT_EQ(*g.arc_length(2, 1), straight);
    EXPECT_GE(straight, 111.0);
}

TEST(RoadGraph, ParallelEdgeKeepsShorter) {
    RoadGraph g;
    g.add_node({1, 0, 0});
    g.add_node({2, 0, 0});
    g.add_edge(1, 2, 9);
    g.add_edge(2, 1, 4);
    EXPECT_EQ(*g.arc_length(1, 2), 4.0);
}

TEST(GraphFile, ReadsSectionsCommentsAndDirectedFlag) {
    std::istringstream in(
        "# fixture\nnodes:\n1 0 0\n2 0 0   # co-located\n3 0 0\nedges:\n1 2 5\n2 3 7 directed\n");
    auto g = read_graph(in);
    EXPECT_EQ(g.node_count(), 3u);
    EXPECT_EQ(*g.arc_length(2, 1), 5.0);
    EXPECT_EQ(*g.arc_length(2, 3), 7.0);
    EXPECT_FALSE(g.arc_length(3, 2));
}

TEST(GraphFile, ErrorsCarryLineNumbers) {
    auto line_of = [](const std::string& text) {
        std::istringstream in(text);
        try {
            read_graph(in);
        } catch (const ParseError& e) {
            return e.line();
        }
        return std::size_t{0};
    };
    EXPECT_EQ(line_of("1 0 0\n"), 1u);
    EXPECT_EQ(line_of("nodes:\n1 0 0\n2 x 0\n"), 3u);
    EXPECT_EQ(line_of("nodes:\n1 0 0\nedges:\n1 9 3\n"), 4u);
    EXPECT_EQ(line_of("nodes:\n1 0 0\n2 0 0\nedges:\n1 2 3 sideways\n"), 5u);
    EXPECT_EQ(line_of("nodes:\n1 95 0\n"), 2u);
}

TEST(GraphFile, RoundTripIsLossless) {
    std::mt19937_64 rng(4);
    auto r = random_graph(rng, 12, 0.4, true);
    std::stringstream buf;
    write_graph(buf, r.g);
    auto back = read_graph(buf);
    ASSERT_EQ(back.node_count(), r.g.node_count());
    for (const auto& e : r.g.edges()) EXPECT_EQ(back.arc_length(e.u, e.v), r.g.arc_length(e.u, e.v));
    EXPECT_TRUE(back.clamped().empty());
}

// ---- subgraph ----

TEST(Subgraph, LargeRadiusIsIdentity) {
    std::mt19937_64 rng(2);
    auto r = random_graph(rng, 10, 0.5, false);
    auto sub = subgraph_within_radius(r.g, {52.01, 4.01}, 1e7);
    EXPECT_EQ(sub.node_count(), r.g.node_count());
    EXPECT_EQ(sub.edge_count(), r.g.edge_count());
}

TEST(Subgraph, TinyRadiusAroundIsolatedNode) {
    RoadGraph g;
    g.add_node({1, 10, 10});
    g.add_node({2, 10.1, 10});
    g.add_edge(1, 2, 20'000);
    auto sub = subgraph_within_radius(g, {10, 10}, 1e-6);
    EXPECT_EQ(sub.node_count(), 1u);
    EXPECT_EQ(sub.edge_count(), 0u);
    EXPECT_THROW(subgraph_within_radius(g, {10, 10}, 0.0), InvalidArgument);
}

TEST(Subgraph, MatchesDirectDistanceFilterAndIsMonotone) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> coord(0.0, 0.1);
    RoadGraph g;
    for (NodeId id = 0; id < 10; ++id) g.add_node({id, 48 + coord(rng), 2 + coord(rng)});
    const LatLon origin{48.05, 2.05};
    std::set<NodeId> previous;
    for (double radius : {1000.0, 3000.0, 5000.0, 8000.0}) {
        auto sub = subgraph_within_radius(g, origin, radius);
        std::set<NodeId> got, expected;
        for (const auto& n : sub.nodes()) got.insert(n.id);
        for (const auto& n : g.nodes()) {
            if (haversine(origin, {n.lat, n.lon}) <= radius) expected.insert(n.id);
        }
        EXPECT_EQ(got, expected) << radius;
        EXPECT_TRUE(std::includes(got.begin(), got.end(), previous.begin(), previous.end()));
        previous = got;
    }
}

// ---- shortest paths ----

RoadGraph colocated(std::initializer_list<std::tuple<NodeId, NodeId, double>> edges) {
    RoadGraph g;
    std::set<NodeId> ids;
    for (const auto& [u, v, _] : edges) ids.insert({u, v});
    for (NodeId id : ids) g.add_node({id, 0, 0});
    for (const auto& [u, v, len] : edges) g.add_edge(u, v, len);
    return g;
}

TEST(Dijkstra, SourceEqualsTarget) {
    auto g = colocated({{1, 2, 5}});
    auto r = dijkstra(g, 1, 1).route;
    ASSERT_TRUE(r);
    EXPECT_EQ(r->path, (std::vector<NodeId>{1}));
    EXPECT_EQ(r->total_m, 0.0);
}

TEST(Dijkstra, SingleEdge) {
    auto r = dijkstra(colocated({{1, 2, 5}}), 1, 2).route;
    ASSERT_TRUE(r);
    EXPECT_EQ(r->total_m, 5.0);
    EXPECT_EQ(r->path, (std::vector<NodeId>{1, 2}));
}

TEST(Dijkstra, UnknownAndUnreachable) {
    auto g = colocated({{1, 2, 5}, {3, 4, 1}});
    EXPECT_THROW(dijkstra(g, 1, 9), InvalidArgument);
    EXPECT_FALSE(dijkstra(g, 1, 4).route);
    EXPECT_FALSE(astar(g, 1, 4).route);
}

TEST(Dijkstra, DirectedEdgesAreOneWay) {
    RoadGraph g;
    g.add_node({1, 0, 0});
    g.add_node({2, 0, 0});
    g.add_edge(1, 2, 3, true);
    EXPECT_TRUE(dijkstra(g, 1, 2).route);
    EXPECT_FALSE(dijkstra(g, 2, 1).route);
}

TEST(Dijkstra, EqualCostTieGoesThroughSmallerId) {
    // 1 -> {2, 3} -> 4, both 2 m.
    auto g = colocated({{1, 3, 1}, {3, 4, 1}, {1, 2, 1}, {2, 4, 1}});
    EXPECT_EQ(dijkstra(g, 1, 4).route->path, (std::vector<NodeId>{1, 2, 4}));
}

TEST(Dijkstra, MatchesExhaustiveMinimumOnRandomGraphs) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        auto r = random_graph(rng, 2 + rng() % 7, 0.45, trial % 2 == 0);
        const NodeId s = r.ids.front(), t = r.ids.back();
        auto paths = all_simple_paths(r.ids, r.edges, s, t);
        auto got = dijkstra(r.g, s, t).route;
        ASSERT_EQ(got.has_value(), !paths.empty());
        if (got) {
            EXPECT_NEAR(got->total_m, paths.front().total_m, 1e-9 * paths.front().total_m);
            EXPECT_EQ(path_length(r.g, got->path), got->total_m);
        }
    }
}

TEST(AStar, EqualsDijkstraOnRandomGraphs) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        auto r = random_graph(rng, 30, 0.15, trial % 3 == 0);
        for (int q = 0; q < 5; ++q) {
            const NodeId s = r.ids[rng() % r.ids.size()], t = r.ids[rng() % r.ids.size()];
            auto d = dijkstra(r.g, s, t).route;
            auto a = astar(r.g, s, t).route;
            ASSERT_EQ(d.has_value(), a.has_value());
            if (d) {
                EXPECT_NEAR(a->total_m, d->total_m, 1e-9 * std::max(1.0, d->total_m));
            }
        }
    }
}

TEST(AStar, ColocatedNodesBehaveAsDijkstra) {
    auto g = colocated({{1, 2, 4}, {2, 3, 4}, {1, 3, 9}, {3, 4, 1}});
    auto a = astar(g, 1, 4), d = dijkstra(g, 1, 4);
    EXPECT_EQ(a.route, d.route);
    EXPECT_EQ(a.expanded, d.expanded);
}

TEST(AStar, ExpandsNoMoreThanDijkstraOnGrid) {
    RoadGraph g;
    const int side = 15;
    const double step = 0.001;
    for (int i = 0; i < side; ++i) {
        for (int j = 0; j < side; ++j) g.add_node({i * side + j, 45 + i * step, 7 + j * step});
    }
    for (int i = 0; i < side; ++i) {
        for (int j = 0; j < side; ++j) {
            const NodeId id = i * side + j;
            if (j + 1 < side) g.add_edge(id, id + 1, 1.1 * haversine(g.node(id).position(), g.node(id + 1).position()));
            if (i + 1 < side) g.add_edge(id, id + side, 1.1 * haversine(g.node(id).position(), g.node(id + side).position()));
        }
    }
    for (auto [s, t] : std::vector<std::pair<NodeId, NodeId>>{{0, side * side - 1}, {7, 200}, {112, 14}}) {
        auto a = astar(g, s, t), d = dijkstra(g, s, t);
        EXPECT_LE(a.expanded, d.expanded);
        EXPECT_NEAR(a.route->total_m, d.route->total_m, 1e-9 * d.route->total_m);
    }
}

// ---- Yen ----

TEST(Yen, KOneIsDijkstra) {
    std::mt19937_64 rng(31);
    auto r = random_graph(rng, 8, 0.5, false);
    auto routes = yen_k_shortest(r.g, r.ids.front(), r.ids.back(), 1);
    auto d = dijkstra(r.g, r.ids.front(), r.ids.back()).route;
    ASSERT_EQ(routes.size(), d ? 1u : 0u);
    if (d) {
        EXPECT_EQ(routes.front(), *d);
    }
    EXPECT_THROW(yen_k_shortest(r.g, r.ids.front(), r.ids.back(), 0), InvalidArgument);
}

TEST(Yen, DiamondHasExactlyTwoRoutes) {
    auto g = colocated({{1, 2, 1}, {2, 4, 1}, {1, 3, 2}, {3, 4, 2}});
    auto routes = yen_k_shortest(g, 1, 4, 3);
    ASSERT_EQ(routes.size(), 2u);
    EXPECT_EQ(routes[0].path, (std::vector<NodeId>{1, 2, 4}));
    EXPECT_EQ(routes[0].total_m, 2.0);
    EXPECT_EQ(routes[1].path, (std::vector<NodeId>{1, 3, 4}));
    EXPECT_EQ(routes[1].total_m, 4.0);
}

TEST(Yen, MatchesBruteForceOnSmallRandomGraphs) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 300; ++trial) {
        auto r = random_graph(rng, 2 + rng() % 7, 0.55, trial % 2 == 1);
        const NodeId s = r.ids[rng() % r.ids.size()], t = r.ids[rng() % r.ids.size()];
        auto oracle = all_simple_paths(r.ids, r.edges, s, t);
        for (std::size_t k = 1; k <= 5; ++k) {
            auto got = yen_k_shortest(r.g, s, t, k);
            ASSERT_EQ(got.size(), std::min(k, oracle.size())) << "trial " << trial << " k " << k;
            for (std::size_t i = 0; i < got.size(); ++i) {
                EXPECT_EQ(got[i].path, oracle[i].path) << "trial " << trial << " k " << k << " i " << i;
                EXPECT_NEAR(got[i].total_m, oracle[i].total_m, 1e-9 * std::max(1.0, oracle[i].total_m));
            }
        }
    }
}

TEST(Yen, RoutesAreSortedLooplessAndDistinct) {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 30; ++trial) {
        auto r = random_graph(rng, 20, 0.25, false);
        auto routes = yen_k_shortest(r.g, r.ids.front(), r.ids.back(), 8);
        std::set<std::vector<NodeId>> seen;
        for (std::size_t i = 0; i < routes.size(); ++i) {
            const auto& p = routes[i].path;
            EXPECT_EQ(std::set<NodeId>(p.begin(), p.end()).size(), p.size());
            EXPECT_TRUE(seen.insert(p).second);
            if (i) {
                EXPECT_LE(routes[i - 1].total_m, routes[i].total_m);
            }
        }
    }
}

// ---- snapping and algorithm names ----

TEST(Snap, ExactNodeAndTies) {
    RoadGraph g;
    g.add_node({5, 1.0, 1.0});
    g.add_node({9, 0.0, 0.001});
    g.add_node({4, 0.0, -0.001});
    EXPECT_EQ(snap(g, {0.0, 0.001}), 9);
    EXPECT_EQ(snap(g, {0.0, 0.0}), 4);
    corpus::Place p;
    p.lat = 1.0;
    p.lon = 1.0;
    EXPECT_EQ(snap_place(g, p), 5);
    EXPECT_THROW(snap(RoadGraph{}, {0, 0}), InvalidArgument);
}

TEST(Snap, MatchesLinearScan) {
    std::mt19937_64 rng(3);
    auto r = random_graph(rng, 40, 0.0, false);
    std::uniform_real_distribution<double> coord(-0.005, 0.025);
    for (int i = 0; i < 200; ++i) {
        LatLon p{52 + coord(rng), 4 + coord(rng)};
        NodeId best = -1;
        double best_d = 1e300;
        for (const auto& n : r.g.nodes()) {
            double dd = haversine(p, {n.lat, n.lon});
            if (dd < best_d || (dd == best_d && n.id < best)) best = n.id, best_d = dd;
        }
        EXPECT_EQ(snap(r.g, p), best);
    }
}

TEST(Algorithm, NamesRoundTrip) {
    for (auto a : {Algorithm::dijkstra, Algorithm::astar, Algorithm::yen}) EXPECT_EQ(algorithm_from_string(to_string(a)), a);
    EXPECT_EQ(algorithm_from_string("A*"), Algorithm::astar);
    EXPECT_THROW(algorithm_from_string("bellman"), InvalidArgument);
}

TEST(Algorithm, AllVariantsAgreeOnShortestLength) {
    std::mt19937_64 rng(47);
    auto r = random_graph(rng, 25, 0.2, false);
    auto d = shortest_route(r.g, r.ids[0], r.ids[24], Algorithm::dijkstra);
    auto a = shortest_route(r.g, r.ids[0], r.ids[24], Algorithm::astar);
    auto y = shortest_route(r.g, r.ids[0], r.ids[24], Algorithm::yen);
    ASSERT_EQ(d.has_value(), a.has_value());
    ASSERT_EQ(d.has_value(), y.has_value());
    if (d) {
        EXPECT_EQ(d->total_m, y->total_m);
        EXPECT_NEAR(d->total_m, a->total_m, 1e-9 * d->total_m);
    }
}

}  // namespace
}  // namespace routerec::routing
