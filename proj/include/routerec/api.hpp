#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "json.hpp"
#include "routerec/engine.hpp"

namespace httplib {
class Server;
}

namespace routerec::service {

using Params = std::multimap<std::string, std::string>;

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

// Each handler answers 503 while the holder is empty, 400 on invalid
// parameters and 404 on an unknown place. Error bodies are
// {"error": {"code": ..., "message": ...}}.

// q, lat, lon required; radius_m, algo, boosts, limit optional.
ApiResponse api_search(const EngineHolder& holder, const Params& params);
// from_lat, from_lon, place_id required; algo, k, radius_m optional. An
// unreachable place is a 200 with "reachable": false and no routes.
ApiResponse api_route(const EngineHolder& holder, const Params& params);
ApiResponse api_place(const EngineHolder& holder, const std::string& id);
ApiResponse api_health(const EngineHolder& holder);

nlohmann::json place_json(const Engine& engine, const corpus::Place& place);
nlohmann::json report_json(const scoring::ScoreReport& report);

// Blocking HTTP server over an engine holder. POST /api/admin/reload reloads
// the engine from the config paths and swaps it in; a failed reload keeps
// the current engine.
class HttpServer {
public:
    HttpServer(EngineHolder& holder, EngineConfig config);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Port 0 picks a free port. Returns the bound port; throws IoError.
    int bind(const std::string& host, int port);
    // Serves until stop(). Call bind() first.
    void listen();
    void stop();

    ApiResponse reload();

private:
    EngineHolder& holder_;
    EngineConfig config_;
    std::mutex reload_mutex_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace routerec::service
