#include "routerec/api.hpp"

#include <cmath>

#include "httplib.h"

#ifndef ROUTEREC_VERSION
#define ROUTEREC_VERSION "dev"
#endif

namespace routerec::service {

using nlohmann::json;

namespace {

class BadRequest : public Error {
public:
    using Error::Error;
};

ApiResponse error(int status, const std::string& code, const std::string& message) {
    return {status, {{"error", {{"code", code}, {"message", message}}}}};
}

std::optional<std::string> param(const Params& p, const std::string& key) {
    auto it = p.find(key);
    if (it == p.end()) return std::nullopt;
    return it->second;
}

std::string required(const Params& p, const std::string& key) {
    auto v = param(p, key);
    if (!v || v->empty()) throw BadRequest("missing parameter '" + key + "'");
    return *v;
}

double to_number(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v)) throw BadRequest("parameter '" + key + "' must be a number");
    return v;
}

std::size_t to_count(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
        v = std::stoul(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || v == 0 || text[0] == '-') {
        throw BadRequest("parameter '" + key + "' must be a positive integer");
    }
    return v;
}

bool to_flag(const std::string& key, const std::string& text) {
    if (text == "1" || text == "true" || text == "on" || text == "yes") return true;
    if (text == "0" || text == "false" || text == "off" || text == "no") return false;
    throw BadRequest("parameter '" + key + "' must be true or false");
}

routing::Algorithm to_algorithm(const std::string& text) {
    try {
        return routing::algorithm_from_string(text);
    } catch (const InvalidArgument& e) {
        throw BadRequest(e.what());
    }
}

template <typename F>
ApiResponse guarded(const EngineHolder& holder, F&& body) {
    auto engine = holder.get();
    if (!engine) return error(503, "not_loaded", "engine is not loaded");
    try {
        return body(*engine);
    } catch (const BadRequest& e) {
        return error(400, "bad_request", e.what());
    } catch (const InvalidArgument& e) {
        return error(400, "invalid_argument", e.what());
    } catch (const NotFound& e) {
        return error(404, "not_found", e.what());
    } catch (const std::exception& e) {
        return error(500, "internal", e.what());
    }
}

}  // namespace

json place_json(const Engine& engine, const corpus::Place& p) {
    const auto& s = engine.sentiment(p.id);
    return {{"id", p.id},
            {"name", p.name},
            {"address", p.address},
            {"review", p.review},
            {"lat", p.lat},
            {"lon", p.lon},
            {"sentiment", s.value ? json(std::string(corpus::to_label(*s.value))) : json(nullptr)},
            {"sentiment_source", std::string(to_string(s.source))}};
}

json report_json(const scoring::ScoreReport& r) {
    json terms = json::array();
    for (const auto& t : r.terms) {
        terms.push_back({{"term", t.term},
                         {"count", t.count},
                         {"tf", t.tf},
                         {"idf", t.idf},
                         {"norm", t.norm},
                         {"field", std::string(scoring::to_string(t.field))},
                         {"boost",
                          {{"w_length", t.boost.w_length},
                           {"w_sentiment", t.boost.w_sentiment},
                           {"w_dist", t.boost.w_dist},
                           {"w_pop", t.boost.w_pop},
                           {"w_field", t.boost.w_field},
                           {"product", t.boost.product}}},
                         {"contribution", t.contribution}});
    }
    return {{"terms", terms}, {"query_norm", r.query_norm}, {"coord", r.coord}, {"total", r.total}};
}

ApiResponse api_search(const EngineHolder& holder, const Params& params) {
    return guarded(holder, [&](const Engine& engine) {
        SearchRequest req;
        req.q = required(params, "q");
        req.lat = to_number("lat", required(params, "lat"));
        req.lon = to_number("lon", required(params, "lon"));
        if (auto v = param(params, "radius_m")) req.radius_m = to_number("radius_m", *v);
        if (auto v = param(params, "algo")) req.algorithm = to_algorithm(*v);
        if (auto v = param(params, "boosts")) req.boosts = to_flag("boosts", *v);
        if (auto v = param(params, "limit")) req.limit = to_count("limit", *v);
        const auto res = engine.search(req);

        json results = json::array();
        for (std::size_t i = 0; i < res.hits.size(); ++i) {
            const auto& h = res.hits[i];
            json route = nullptr;
            if (h.route) {
                route = {{"total_m", h.route->total_m},
                         {"nodes", h.route->path.size()},
                         {"from_node", h.route->path.front()},
                         {"to_node", h.route->path.back()}};
            }
            results.push_back({{"rank", i + 1},
                               {"place", place_json(engine, *h.place)},
                               {"score", h.report.total},
                               {"breakdown", report_json(h.report)},
                               {"distance_m", h.route ? json(h.route->total_m) : json(nullptr)},
                               {"route", route}});
        }
        return ApiResponse{200,
                           {{"query", {{"raw", res.query.raw}, {"terms", res.query.terms}}},
                            {"radius_m", res.radius_m},
                            {"algorithm", routing::to_string(res.algorithm)},
                            {"boosts", res.boosts_enabled},
                            {"candidates", res.candidates},
                            {"results", results}}};
    });
}

ApiResponse api_route(const EngineHolder& holder, const Params& params) {
    return guarded(holder, [&](const Engine& engine) {
        const routing::LatLon from{to_number("from_lat", required(params, "from_lat")),
                                   to_number("from_lon", required(params, "from_lon"))};
        const auto place_id = required(params, "place_id");
        auto algo = engine.config().algorithm;
        if (auto v = param(params, "algo")) algo = to_algorithm(*v);
        std::size_t k = engine.config().yen_k;
        if (auto v = param(params, "k")) k = to_count("k", *v);
        std::optional<double> radius;
        if (auto v = param(params, "radius_m")) radius = to_number("radius_m", *v);
        const auto res = engine.route(from, place_id, algo, k, radius);

        json routes = json::array();
        for (const auto& r : res.routes) {
            json polyline = json::array();
            for (auto id : r.path) {
                const auto& n = engine.graph().node(id);
                polyline.push_back({n.lat, n.lon});
            }
            routes.push_back({{"polyline", polyline}, {"nodes", r.path}, {"total_m", r.total_m}});
        }
        json body = {{"place_id", place_id},
                     {"algorithm", routing::to_string(algo)},
                     {"k", algo == routing::Algorithm::yen ? k : 1},
                     {"reachable", res.reachable()},
                     {"routes", routes}};
        if (res.reachable()) {
            body["from_node"] = res.from_node;
            body["to_node"] = res.to_node;
        }
        return ApiResponse{200, body};
    });
}

ApiResponse api_place(const EngineHolder& holder, const std::string& id) {
    return guarded(holder, [&](const Engine& engine) { return ApiResponse{200, place_json(engine, engine.place(id))}; });
}

ApiResponse api_health(const EngineHolder& holder) {
    return guarded(holder, [&](const Engine& engine) {
        const auto& h = engine.hashes();
        return ApiResponse{200,
                           {{"status", "ok"},
                            {"build", {{"version", ROUTEREC_VERSION}, {"compiler", __VERSION__}}},
                            {"hashes",
                             {{"model", h.model.empty() ? json(nullptr) : json(h.model)},
                              {"graph", h.graph.empty() ? json(nullptr) : json(h.graph)},
                              {"places", h.places.empty() ? json(nullptr) : json(h.places)}}},
                            {"places", engine.places().size()},
                            {"nodes", engine.graph().node_count()},
                            {"model_loaded", engine.has_model()}}};
    });
}

HttpServer::HttpServer(EngineHolder& holder, EngineConfig config)
    : holder_(holder), config_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
    auto reply = [](httplib::Response& res, const ApiResponse& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    server_->Get("/api/search", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, api_search(holder_, req.params));
    });
    server_->Get("/api/route", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, api_route(holder_, req.params));
    });
    server_->Get(R"(/api/places/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, api_place(holder_, req.matches[1]));
    });
    server_->Get("/api/health", [this, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, api_health(holder_));
    });
    server_->Post("/api/admin/reload", [this, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, reload());
    });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
    const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() { server_->stop(); }

ApiResponse HttpServer::reload() {
    std::lock_guard lock(reload_mutex_);
    try {
        holder_.set(Engine::load(config_));
    } catch (const std::exception& e) {
        return error(500, "reload_failed", e.what());
    }
    return api_health(holder_);
}

}  // namespace routerec::service
