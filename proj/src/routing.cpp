#include "routerec/routing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <queue>
#include <set>
#include <sstream>

#include "routerec/error.hpp"

namespace routerec::routing {

double haversine(LatLon a, LatLon b) {
    constexpr double rad = std::numbers::pi / 180.0;
    const double dlat = (b.lat - a.lat) * rad;
    const double dlon = (b.lon - a.lon) * rad;
    const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(a.lat * rad) * std::cos(b.lat * rad) * std::sin(dlon / 2) * std::sin(dlon / 2);
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

void RoadGraph::add_node(RoadNode node) {
    if (!(node.lat >= -90.0 && node.lat <= 90.0)) throw InvalidArgument("node " + std::to_string(node.id) + ": latitude out of range");
    if (!(node.lon >= -180.0 && node.lon <= 180.0)) throw InvalidArgument("node " + std::to_string(node.id) + ": longitude out of range");
    if (!index_.emplace(node.id, nodes_.size()).second) throw InvalidArgument("duplicate node id " + std::to_string(node.id));
    nodes_.push_back(node);
    adjacency_.emplace_back();
}

std::size_t RoadGraph::index_of(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw InvalidArgument("unknown node " + std::to_string(id));
    return it->second;
}

void RoadGraph::add_arc(std::size_t from, std::size_t to, double length_m) {
    auto& list = adjacency_[from];
    const NodeId to_id = nodes_[to].id;
    auto it = std::lower_bound(list.begin(), list.end(), to_id,
                               [this](const Arc& arc, NodeId id) { return nodes_[arc.to].id < id; });
    if (it != list.end() && it->to == to) {
        it->length_m = std::min(it->length_m, length_m);
    } else {
        list.insert(it, Arc{to, length_m});
    }
}

void RoadGraph::add_edge(NodeId u, NodeId v, double length_m, bool directed) {
    const auto iu = index_of(u);
    const auto iv = index_of(v);
    if (u == v) throw InvalidArgument("self-loop at node " + std::to_string(u));
    if (!(length_m > 0.0) || !std::isfinite(length_m)) {
        throw InvalidArgument("edge " + std::to_string(u) + "-" + std::to_string(v) + ": length must be positive");
    }
    const double straight = haversine(nodes_[iu].position(), nodes_[iv].position());
    if (length_m < straight) {
        clamped_.push_back({u, v, length_m, straight});
        length_m = straight;
    }
    edges_.push_back({u, v, length_m, directed});
    add_arc(iu, iv, length_m);
    if (!directed) add_arc(iv, iu, length_m);
}

std::optional<double> RoadGraph::arc_length(NodeId u, NodeId v) const {
    const auto iu = index_of(u);
    for (const auto& arc : adjacency_[iu]) {
        if (nodes_[arc.to].id == v) return arc.length_m;
    }
    return std::nullopt;
}

namespace {

std::string strip_comment(const std::string& line) {
    auto s = line.substr(0, line.find('#'));
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

}  // namespace

RoadGraph read_graph(std::istream& in) {
    enum class Section { none, nodes, edges } section = Section::none;
    RoadGraph g;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto line = strip_comment(raw);
        if (line.empty()) continue;
        if (line == "nodes:") {
            section = Section::nodes;
            continue;
        }
        if (line == "edges:") {
            section = Section::edges;
            continue;
        }
        std::istringstream fields(line);
        try {
            if (section == Section::nodes) {
                RoadNode n;
                std::string extra;
                if (!(fields >> n.id >> n.lat >> n.lon) || fields >> extra) throw ParseError(lineno, "expected 'id lat lon'");
                g.add_node(n);
            } else if (section == Section::edges) {
                NodeId u = 0, v = 0;
                double len = 0.0;
                std::string flag, extra;
                if (!(fields >> u >> v >> len)) throw ParseError(lineno, "expected 'u v length_m [directed]'");
                fields >> flag;
                if ((!flag.empty() && flag != "directed") || fields >> extra) {
                    throw ParseError(lineno, "unexpected token after edge length");
                }
                g.add_edge(u, v, len, flag == "directed");
            } else {
                throw ParseError(lineno, "data before a 'nodes:' or 'edges:' header");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const InvalidArgument& e) {
            throw ParseError(lineno, e.what());
        }
    }
    return g;
}

RoadGraph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open graph file " + path);
    return read_graph(in);
}

void write_graph(std::ostream& out, const RoadGraph& g) {
    out << std::setprecision(17) << "nodes:\n";
    for (const auto& n : g.nodes()) out << n.id << ' ' << n.lat << ' ' << n.lon << '\n';
    out << "edges:\n";
    for (const auto& e : g.edges()) out << e.u << ' ' << e.v << ' ' << e.length_m << (e.directed ? " directed\n" : "\n");
}

RoadGraph subgraph_within_radius(const RoadGraph& g, LatLon origin, double radius_m) {
    if (!(radius_m > 0.0)) throw InvalidArgument("radius must be positive");
    RoadGraph out;
    for (const auto& n : g.nodes()) {
        if (haversine(origin, n.position()) <= radius_m) out.add_node(n);
    }
    for (const auto& e : g.edges()) {
        if (out.has_node(e.u) && out.has_node(e.v)) out.add_edge(e.u, e.v, e.length_m, e.directed);
    }
    return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Removed nodes and arcs for the deviation searches of Yen's algorithm.
struct Blocked {
    std::vector<char> nodes;
    std::set<std::pair<std::size_t, std::size_t>> arcs;
};

struct Labels {
    std::vector<double> dist;
    std::vector<std::size_t> pred;
};

SearchResult search(const RoadGraph& g, std::size_t s, std::size_t t, bool guided, const Blocked* blocked) {
    const auto n = g.node_count();
    const auto none = n;
    const LatLon goal = g.node_at(t).position();
    Labels lab{std::vector<double>(n, kInf), std::vector<std::size_t>(n, none)};

    struct Entry {
        double f;
        NodeId id;
        std::size_t index;
        double dist;
        bool operator>(const Entry& o) const { return f != o.f ? f > o.f : id > o.id; }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    auto h = [&](std::size_t i) { return guided ? haversine(g.node_at(i).position(), goal) : 0.0; };

    SearchResult result;
    lab.dist[s] = 0.0;
    open.push({h(s), g.node_at(s).id, s, 0.0});
    while (!open.empty()) {
        const Entry top = open.top();
        open.pop();
        if (top.dist > lab.dist[top.index]) continue;
        ++result.expanded;
        if (top.index == t) break;
        for (const auto& arc : g.arcs(top.index)) {
            if (blocked && (blocked->nodes[arc.to] || blocked->arcs.count({top.index, arc.to}))) continue;
            const double nd = top.dist + arc.length_m;
            if (nd < lab.dist[arc.to]) {
                lab.dist[arc.to] = nd;
                lab.pred[arc.to] = top.index;
                open.push({nd + h(arc.to), g.node_at(arc.to).id, arc.to, nd});
            }
        }
    }
    if (lab.dist[t] == kInf) return result;
    Route r;
    for (std::size_t i = t; i != none; i = lab.pred[i]) r.path.push_back(g.node_at(i).id);
    std::reverse(r.path.begin(), r.path.end());
    r.total_m = lab.dist[t];
    result.route = std::move(r);
    return result;
}

}  // namespace

SearchResult dijkstra(const RoadGraph& g, NodeId s, NodeId t) {
    return search(g, g.index_of(s), g.index_of(t), false, nullptr);
}

SearchResult astar(const RoadGraph& g, NodeId s, NodeId t) {
    return search(g, g.index_of(s), g.index_of(t), true, nullptr);
}

double path_length(const RoadGraph& g, const std::vector<NodeId>& path) {
    double total = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        auto len = g.arc_length(path[i - 1], path[i]);
        if (!len) throw InvalidArgument("no edge " + std::to_string(path[i - 1]) + " -> " + std::to_string(path[i]));
        total += *len;
    }
    return total;
}

std::vector<Route> yen_k_shortest(const RoadGraph& g, NodeId s, NodeId t, std::size_t k) {
    if (k == 0) throw InvalidArgument("k must be at least 1");
    const auto is = g.index_of(s);
    const auto it = g.index_of(t);
    std::vector<Route> found;
    auto first = search(g, is, it, false, nullptr).route;
    if (!first) return found;
    found.push_back(std::move(*first));

    auto less = [](const Route& a, const Route& b) {
        return a.total_m != b.total_m ? a.total_m < b.total_m : a.path < b.path;
    };
    std::set<Route, decltype(less)> candidates(less);

    while (found.size() < k) {
        const auto& prev = found.back().path;
        for (std::size_t i = 0; i + 1 < prev.size(); ++i) {
            const std::vector<NodeId> root(prev.begin(), prev.begin() + static_cast<std::ptrdiff_t>(i) + 1);
            Blocked blocked{std::vector<char>(g.node_count(), 0), {}};
            for (const auto& r : found) {
                if (r.path.size() > i + 1 && std::equal(root.begin(), root.end(), r.path.begin())) {
                    blocked.arcs.insert({g.index_of(r.path[i]), g.index_of(r.path[i + 1])});
                }
            }
            for (std::size_t j = 0; j < i; ++j) blocked.nodes[g.index_of(root[j])] = 1;
            auto spur = search(g, g.index_of(root.back()), it, false, &blocked).route;
            if (!spur) continue;
            Route cand;
            cand.path = root;
            cand.path.insert(cand.path.end(), spur->path.begin() + 1, spur->path.end());
            cand.total_m = path_length(g, cand.path);
            if (std::find(found.begin(), found.end(), cand) == found.end()) candidates.insert(std::move(cand));
        }
        if (candidates.empty()) break;
        found.push_back(*candidates.begin());
        candidates.erase(candidates.begin());
    }
    return found;
}

NodeId snap(const RoadGraph& g, LatLon p) {
    if (g.empty()) throw InvalidArgument("cannot snap to an empty graph");
    const RoadNode* best = nullptr;
    double best_d = kInf;
    for (const auto& n : g.nodes()) {
        const double d = haversine(p, n.position());
        if (d < best_d || (d == best_d && n.id < best->id)) {
            best = &n;
            best_d = d;
        }
    }
    return best->id;
}

NodeId snap_place(const RoadGraph& g, const corpus::Place& p) { return snap(g, {p.lat, p.lon}); }

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::dijkstra: return "dijkstra";
        case Algorithm::astar: return "astar";
        case Algorithm::yen: return "yen";
    }
    return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
    std::string lower;
    for (unsigned char ch : name) lower.push_back(static_cast<char>(std::tolower(ch)));
    if (lower == "dijkstra") return Algorithm::dijkstra;
    if (lower == "astar" || lower == "a*") return Algorithm::astar;
    if (lower == "yen") return Algorithm::yen;
    throw InvalidArgument("unknown routing algorithm '" + name + "'");
}

std::optional<Route> shortest_route(const RoadGraph& g, NodeId s, NodeId t, Algorithm a) {
    switch (a) {
        case Algorithm::dijkstra: return dijkstra(g, s, t).route;
        case Algorithm::astar: return astar(g, s, t).route;
        case Algorithm::yen: {
            auto routes = yen_k_shortest(g, s, t, 1);
            if (routes.empty()) return std::nullopt;
            return routes.front();
        }
    }
    return std::nullopt;
}

}  // namespace routerec::routing
