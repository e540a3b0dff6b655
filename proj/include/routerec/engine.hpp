#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "routerec/classifier.hpp"
#include "routerec/corpus.hpp"
#include "routerec/error.hpp"
#include "routerec/evalmetrics.hpp"
#include "routerec/routing.hpp"
#include "routerec/scoring.hpp"
#include "routerec/textprep.hpp"

namespace routerec::service {

class NotFound : public Error {
public:
    using Error::Error;
};

struct EngineConfig {
    double radius_m = 5000.0;
    routing::Algorithm algorithm = routing::Algorithm::dijkstra;
    std::size_t yen_k = 3;
    bool boosts_enabled = true;
    std::size_t result_limit = 10;
    std::string model_path;  // optional; without it stored labels give sentiment
    std::string graph_path;
    std::string places_path;

    // Throws InvalidArgument unless radius_m > 0, yen_k >= 1 and result_limit >= 1.
    void validate() const;
};

enum class SentimentSource { model, label, none };
std::string_view to_string(SentimentSource s);

struct ResolvedSentiment {
    std::optional<corpus::Sentiment> value;
    SentimentSource source = SentimentSource::none;
};

struct SearchRequest {
    std::string q;
    double lat = 0.0;
    double lon = 0.0;
    std::optional<double> radius_m;
    std::optional<routing::Algorithm> algorithm;
    std::optional<bool> boosts;
    std::optional<std::size_t> limit;
};

struct SearchHit {
    const corpus::Place* place = nullptr;
    ResolvedSentiment sentiment;
    std::optional<routing::Route> route;  // nullopt: place unreachable inside the radius
    scoring::ScoreReport report;
};

struct SearchResponse {
    scoring::Query query;
    double radius_m = 0.0;
    routing::Algorithm algorithm = routing::Algorithm::dijkstra;
    bool boosts_enabled = true;
    std::size_t candidates = 0;
    std::vector<SearchHit> hits;
};

struct RouteResponse {
    routing::NodeId from_node = 0;
    routing::NodeId to_node = 0;
    std::vector<routing::Route> routes;  // empty: no route

    bool reachable() const { return !routes.empty(); }
};

struct InputHashes {
    std::string model;  // manifest content hash, empty without a model
    std::string graph;
    std::string places;
};

// Immutable search state: places, road graph, optional sentiment model and
// the index statistics derived from them.
class Engine {
public:
    // Resolves every place's sentiment: the model's classification of the
    // review tags when a model is given and the review is in vocabulary,
    // otherwise the stored label.
    Engine(EngineConfig config, std::vector<corpus::Place> places, routing::RoadGraph graph,
           std::optional<classifier::LoadedModel> model = std::nullopt, InputHashes hashes = {});

    // Reads config.places_path, config.graph_path and, if set, config.model_path.
    static std::shared_ptr<const Engine> load(const EngineConfig& config);

    const EngineConfig& config() const { return config_; }
    const std::vector<corpus::Place>& places() const { return places_; }
    const routing::RoadGraph& graph() const { return graph_; }
    const InputHashes& hashes() const { return hashes_; }
    bool has_model() const { return model_.has_value(); }

    // Throws NotFound.
    const corpus::Place& place(const std::string& id) const;
    const ResolvedSentiment& sentiment(const std::string& id) const;

    // Road network within the radius of the user, candidates = places within
    // the radius matching a query term, one route per candidate under the
    // chosen algorithm, then rank_candidates. Throws InvalidArgument on bad
    // coordinates, a non-positive radius or a query without searchable terms.
    SearchResponse search(const SearchRequest& request) const;

    // Routes from the user's position to a place over the same radius-limited
    // network search() uses. k only applies to yen. Throws NotFound for an
    // unknown place and InvalidArgument for bad input.
    RouteResponse route(routing::LatLon from, const std::string& place_id, routing::Algorithm algorithm,
                        std::size_t k, std::optional<double> radius_m = std::nullopt) const;

private:
    EngineConfig config_;
    std::vector<corpus::Place> places_;
    std::map<std::string, std::size_t> by_id_;
    std::vector<ResolvedSentiment> sentiments_;
    std::vector<scoring::FieldDoc> docs_;
    scoring::IndexStats stats_;
    routing::RoadGraph graph_;
    std::optional<classifier::LoadedModel> model_;
    InputHashes hashes_;
};

// Shared engine slot for concurrent request handlers; swaps are atomic.
class EngineHolder {
public:
    std::shared_ptr<const Engine> get() const;
    void set(std::shared_ptr<const Engine> engine);

private:
    mutable std::mutex mutex_;
    std::shared_ptr<const Engine> engine_;
};

// ---- ranking comparison across routing variants ----

struct Variant {
    std::string name;
    routing::Algorithm algorithm;
    bool boosts_enabled;
};

// astar, dijkstra, yen (boosts on) and dijkstra_norel (boosts off).
const std::vector<Variant>& routing_variants();

struct VariantPair {
    std::string label;
    std::string first;
    std::string second;
};

// A = (astar, dijkstra_norel), B = (astar, dijkstra), C = (astar, yen),
// D = (dijkstra, dijkstra_norel), E = (yen, dijkstra_norel), F = (yen, dijkstra).
const std::vector<VariantPair>& variant_pairs();

struct RoutingComparison {
    std::map<std::string, evalmetrics::Run> runs;  // by variant name
    std::vector<std::pair<VariantPair, evalmetrics::PairComparison>> pairs;
};

// Runs every variant over the batch with result limit k and compares the
// pairs. Throws InvalidArgument on an empty batch.
RoutingComparison compare_routing(const Engine& engine, std::span<const scoring::BatchQuery> batch,
                                  std::size_t k = evalmetrics::kDefaultTopK,
                                  evalmetrics::Aggregation aggregation = evalmetrics::Aggregation::mean);

// The ranked place ids one variant returns for every batch query.
evalmetrics::Run run_variant(const Engine& engine, std::span<const scoring::BatchQuery> batch, const Variant& v,
                             std::size_t k);

// Header: pair,first,second,bucket,count,F,G,M (five rows per pair).
void write_pair_buckets_csv(std::ostream& out, const RoutingComparison& c);

}  // namespace routerec::service
