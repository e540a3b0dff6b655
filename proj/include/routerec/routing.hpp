#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "routerec/corpus.hpp"

namespace routerec::routing {

inline constexpr double kEarthRadiusM = 6'371'000.0;

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
};

// Great-circle distance in meters.
double haversine(LatLon a, LatLon b);

using NodeId = std::int64_t;

struct RoadNode {
    NodeId id = 0;
    double lat = 0.0;
    double lon = 0.0;

    LatLon position() const { return {lat, lon}; }
};

struct RoadEdge {
    NodeId u = 0;
    NodeId v = 0;
    double length_m = 0.0;
    bool directed = false;
};

// An edge whose stated length was below the straight-line distance of its
// endpoints and was raised to it.
struct ClampedEdge {
    NodeId u = 0;
    NodeId v = 0;
    double given_m = 0.0;
    double clamped_m = 0.0;
};

// Geo-embedded graph. Nodes get dense indices in insertion order; searches
// work on indices internally and break ties on node ids.
class RoadGraph {
public:
    struct Arc {
        std::size_t to;
        double length_m;
    };

    // Throws InvalidArgument on a duplicate id or out-of-range coordinates.
    void add_node(RoadNode node);
    // Lengths must be positive; lengths below haversine(u, v) are raised to
    // it and recorded in clamped(). A repeated (u, v) keeps the shorter edge.
    void add_edge(NodeId u, NodeId v, double length_m, bool directed = false);

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    bool empty() const { return nodes_.empty(); }
    bool has_node(NodeId id) const { return index_.count(id) > 0; }

    // Nodes in insertion order.
    const std::vector<RoadNode>& nodes() const { return nodes_; }
    const std::vector<RoadEdge>& edges() const { return edges_; }
    const std::vector<ClampedEdge>& clamped() const { return clamped_; }

    std::size_t index_of(NodeId id) const;
    const RoadNode& node(NodeId id) const { return nodes_[index_of(id)]; }
    const RoadNode& node_at(std::size_t index) const { return nodes_[index]; }
    // Outgoing arcs of a node index, ascending by target id.
    const std::vector<Arc>& arcs(std::size_t index) const { return adjacency_[index]; }
    // Length of the arc u -> v, if any.
    std::optional<double> arc_length(NodeId u, NodeId v) const;

private:
    void add_arc(std::size_t from, std::size_t to, double length_m);

    std::vector<RoadNode> nodes_;
    std::unordered_map<NodeId, std::size_t> index_;
    std::vector<std::vector<Arc>> adjacency_;
    std::vector<RoadEdge> edges_;
    std::vector<ClampedEdge> clamped_;
};

// Graph file: a "nodes:" section of "id lat lon" lines and an "edges:"
// section of "u v length_m [directed]" lines. '#' starts a comment.
RoadGraph read_graph(std::istream& in);
RoadGraph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const RoadGraph& g);

// Nodes within radius_m of origin (inclusive) and the edges among them.
RoadGraph subgraph_within_radius(const RoadGraph& g, LatLon origin, double radius_m);

struct Route {
    std::vector<NodeId> path;
    double total_m = 0.0;

    bool operator==(const Route&) const = default;
};

struct SearchResult {
    std::optional<Route> route;  // nullopt: unreachable
    std::size_t expanded = 0;    // nodes settled
};

// Both throw InvalidArgument for unknown endpoints. Equal distances are
// settled in ascending node id order.
SearchResult dijkstra(const RoadGraph& g, NodeId s, NodeId t);
// Haversine-to-target heuristic; admissible because edges are never shorter
// than the straight line between their endpoints.
SearchResult astar(const RoadGraph& g, NodeId s, NodeId t);

// Up to k loopless routes in non-decreasing length; equal lengths are
// ordered by node sequence. Fewer routes are returned when fewer exist.
std::vector<Route> yen_k_shortest(const RoadGraph& g, NodeId s, NodeId t, std::size_t k);

// Sum of arc lengths along path, in path order. Throws if two consecutive
// nodes are not joined by an arc.
double path_length(const RoadGraph& g, const std::vector<NodeId>& path);

// Nearest node by haversine; ties go to the smaller id. Throws on an empty graph.
NodeId snap(const RoadGraph& g, LatLon p);
NodeId snap_place(const RoadGraph& g, const corpus::Place& p);

enum class Algorithm { dijkstra, astar, yen };

std::string to_string(Algorithm a);
// Accepts "dijkstra", "astar", "a*" and "yen".
Algorithm algorithm_from_string(const std::string& name);

// Shortest route under the chosen algorithm (yen: its first route).
std::optional<Route> shortest_route(const RoadGraph& g, NodeId s, NodeId t, Algorithm a);

}  // namespace routerec::routing
