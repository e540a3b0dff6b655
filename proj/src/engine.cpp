#include "routerec/engine.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "routerec/hashing.hpp"

namespace routerec::service {

void EngineConfig::validate() const {
    if (!(radius_m > 0.0 && std::isfinite(radius_m))) throw InvalidArgument("radius_m must be positive");
    if (yen_k == 0) throw InvalidArgument("yen_k must be at least 1");
    if (result_limit == 0) throw InvalidArgument("result_limit must be at least 1");
}

std::string_view to_string(SentimentSource s) {
    switch (s) {
        case SentimentSource::model: return "model";
        case SentimentSource::label: return "label";
        case SentimentSource::none: break;
    }
    return "none";
}

namespace {

ResolvedSentiment resolve_sentiment(const corpus::Place& p, const std::optional<classifier::LoadedModel>& model,
                                    const corpus::Tagger& tagger) {
    if (model) {
        std::vector<corpus::TagId> ids;
        for (const auto& term : tagger(p)) {
            if (auto id = model->dictionary.find(term)) ids.push_back(*id);
        }
        if (!ids.empty()) {
            try {
                const auto winner = classifier::classify(corpus::Transaction::from_unsorted(ids), model->model).winner;
                if (auto s = corpus::sentiment_from_label(winner)) return {s, SentimentSource::model};
            } catch (const classifier::OutOfVocabulary&) {
            }
        }
    }
    if (p.sentiment) return {p.sentiment, SentimentSource::label};
    return {};
}

void check_position(double lat, double lon) {
    if (!(std::abs(lat) <= 90.0)) throw InvalidArgument("latitude must lie in [-90, 90]");
    if (!(std::abs(lon) <= 180.0)) throw InvalidArgument("longitude must lie in [-180, 180]");
}

double checked_radius(std::optional<double> requested, const EngineConfig& config) {
    const double r = requested.value_or(config.radius_m);
    if (!(r > 0.0 && std::isfinite(r))) throw InvalidArgument("radius_m must be positive");
    return r;
}

}  // namespace

Engine::Engine(EngineConfig config, std::vector<corpus::Place> places, routing::RoadGraph graph,
               std::optional<classifier::LoadedModel> model, InputHashes hashes)
    : config_(std::move(config)),
      places_(std::move(places)),
      graph_(std::move(graph)),
      model_(std::move(model)),
      hashes_(std::move(hashes)) {
    config_.validate();
    if (graph_.empty()) throw InvalidArgument("road graph is empty");
    const auto tagger = textprep::review_tagger(textprep::Stoplist::english());
    for (std::size_t i = 0; i < places_.size(); ++i) {
        corpus::validate(places_[i]);
        if (!by_id_.emplace(places_[i].id, i).second) throw InvalidArgument("place id '" + places_[i].id + "' repeated");
        sentiments_.push_back(resolve_sentiment(places_[i], model_, tagger));
        docs_.push_back(scoring::make_field_doc(places_[i], sentiments_.back().value, std::nullopt));
    }
    stats_ = scoring::IndexStats(docs_);
}

std::shared_ptr<const Engine> Engine::load(const EngineConfig& config) {
    config.validate();
    if (config.places_path.empty() || config.graph_path.empty()) throw InvalidArgument("places and graph paths are required");
    InputHashes hashes;
    hashes.places = file_blob_sha1(config.places_path);
    hashes.graph = file_blob_sha1(config.graph_path);
    auto places = corpus::ingest_places_file(config.places_path, true).places;
    auto graph = routing::read_graph_file(config.graph_path);
    std::optional<classifier::LoadedModel> model;
    if (!config.model_path.empty()) {
        model = classifier::load_model(config.model_path);
        hashes.model = model->content_hash;
    }
    return std::make_shared<const Engine>(config, std::move(places), std::move(graph), std::move(model), std::move(hashes));
}

const corpus::Place& Engine::place(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw NotFound("no place with id '" + id + "'");
    return places_[it->second];
}

const ResolvedSentiment& Engine::sentiment(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw NotFound("no place with id '" + id + "'");
    return sentiments_[it->second];
}

SearchResponse Engine::search(const SearchRequest& request) const {
    check_position(request.lat, request.lon);
    SearchResponse out;
    out.radius_m = checked_radius(request.radius_m, config_);
    out.algorithm = request.algorithm.value_or(config_.algorithm);
    out.boosts_enabled = request.boosts.value_or(config_.boosts_enabled);
    const std::size_t limit = request.limit.value_or(config_.result_limit);
    if (limit == 0) throw InvalidArgument("limit must be at least 1");
    out.query = scoring::parse_query(request.q);

    const routing::LatLon user{request.lat, request.lon};
    const auto sub = routing::subgraph_within_radius(graph_, user, out.radius_m);
    std::optional<routing::NodeId> user_node;
    if (!sub.empty()) user_node = routing::snap(sub, user);

    std::vector<scoring::FieldDoc> candidates;
    std::unordered_map<std::string, std::pair<std::size_t, std::optional<routing::Route>>> found;
    for (std::size_t i = 0; i < places_.size(); ++i) {
        const auto& p = places_[i];
        if (routing::haversine(user, {p.lat, p.lon}) > out.radius_m) continue;
        bool match = false;
        for (const auto& term : out.query.terms) match = match || docs_[i].matches(term);
        if (!match) continue;
        std::optional<routing::Route> route;
        if (user_node) route = routing::shortest_route(sub, *user_node, routing::snap_place(sub, p), out.algorithm);
        auto doc = docs_[i];
        if (route) doc.route_distance_m = route->total_m;
        candidates.push_back(std::move(doc));
        found.emplace(p.id, std::pair{i, std::move(route)});
    }
    out.candidates = candidates.size();
    for (auto& ranked : scoring::rank_candidates(out.query, candidates, stats_, limit, out.boosts_enabled)) {
        auto& [index, route] = found.at(ranked.place_id);
        out.hits.push_back({&places_[index], sentiments_[index], route, std::move(ranked.report)});
    }
    return out;
}

RouteResponse Engine::route(routing::LatLon from, const std::string& place_id, routing::Algorithm algorithm,
                            std::size_t k, std::optional<double> radius_m) const {
    check_position(from.lat, from.lon);
    if (k == 0) throw InvalidArgument("k must be at least 1");
    const double radius = checked_radius(radius_m, config_);
    const auto& p = place(place_id);
    RouteResponse out;
    if (routing::haversine(from, {p.lat, p.lon}) > radius) return out;
    const auto sub = routing::subgraph_within_radius(graph_, from, radius);
    if (sub.empty()) return out;
    out.from_node = routing::snap(sub, from);
    out.to_node = routing::snap_place(sub, p);
    if (algorithm == routing::Algorithm::yen) {
        out.routes = routing::yen_k_shortest(sub, out.from_node, out.to_node, k);
    } else if (auto r = routing::shortest_route(sub, out.from_node, out.to_node, algorithm)) {
        out.routes.push_back(std::move(*r));
    }
    return out;
}

std::shared_ptr<const Engine> EngineHolder::get() const {
    std::lock_guard lock(mutex_);
    return engine_;
}

void EngineHolder::set(std::shared_ptr<const Engine> engine) {
    std::lock_guard lock(mutex_);
    engine_ = std::move(engine);
}

const std::vector<Variant>& routing_variants() {
    static const std::vector<Variant> variants{
        {"astar", routing::Algorithm::astar, true},
        {"dijkstra", routing::Algorithm::dijkstra, true},
        {"yen", routing::Algorithm::yen, true},
        {"dijkstra_norel", routing::Algorithm::dijkstra, false},
    };
    return variants;
}

const std::vector<VariantPair>& variant_pairs() {
    static const std::vector<VariantPair> pairs{
        {"A", "astar", "dijkstra_norel"}, {"B", "astar", "dijkstra"},       {"C", "astar", "yen"},
        {"D", "dijkstra", "dijkstra_norel"}, {"E", "yen", "dijkstra_norel"}, {"F", "yen", "dijkstra"},
    };
    return pairs;
}

evalmetrics::Run run_variant(const Engine& engine, std::span<const scoring::BatchQuery> batch, const Variant& v,
                             std::size_t k) {
    evalmetrics::Run run;
    for (const auto& q : batch) {
        SearchRequest req{q.text, q.lat, q.lon, std::nullopt, v.algorithm, v.boosts_enabled, k};
        evalmetrics::RankedList list;
        for (const auto& hit : engine.search(req).hits) list.push_back(hit.place->id);
        run[q.id] = std::move(list);
    }
    return run;
}

RoutingComparison compare_routing(const Engine& engine, std::span<const scoring::BatchQuery> batch, std::size_t k,
                                  evalmetrics::Aggregation aggregation) {
    if (batch.empty()) throw InvalidArgument("query batch is empty");
    RoutingComparison out;
    for (const auto& v : routing_variants()) out.runs[v.name] = run_variant(engine, batch, v, k);
    for (const auto& pair : variant_pairs()) {
        out.pairs.emplace_back(pair, evalmetrics::compare_pairs(out.runs.at(pair.first), out.runs.at(pair.second), k,
                                                               aggregation));
    }
    return out;
}

void write_pair_buckets_csv(std::ostream& out, const RoutingComparison& c) {
    std::ostringstream body;
    body << std::setprecision(12);
    body << "pair,first,second,bucket,count,F,G,M\n";
    for (const auto& [pair, pc] : c.pairs) {
        for (std::size_t b = 0; b < pc.buckets.size(); ++b) {
            const auto& s = pc.buckets[b];
            body << pair.label << ',' << pair.first << ',' << pair.second << ',' << b + 1 << ',' << s.count << ','
                 << s.f << ',' << s.g << ',' << s.m << '\n';
        }
    }
    out << body.str();
}

}  // namespace routerec::service
