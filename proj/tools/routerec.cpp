// routerec: batch commands (ingest, train, sweep, classify, degrade,
// histogram, compare-routing, route, synth) and the HTTP service.
//
// Failures print one JSON line {"error":{"code":...,"message":...}} on
// stderr and exit nonzero (2 for usage errors, 1 otherwise). Progress and
// summaries are JSON lines on stderr; payloads go to --out or stdout.

#include <pthread.h>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "routerec/api.hpp"
#include "routerec/classifier.hpp"
#include "routerec/corpus.hpp"
#include "routerec/engine.hpp"
#include "routerec/error.hpp"
#include "routerec/evalmetrics.hpp"
#include "routerec/experiments.hpp"
#include "routerec/fixtures.hpp"
#include "routerec/routing.hpp"
#include "routerec/textprep.hpp"

#ifndef ROUTEREC_VERSION
#define ROUTEREC_VERSION "dev"
#endif

namespace {

using namespace routerec;
using nlohmann::json;
namespace fs = std::filesystem;

void note(const json& j) { std::cerr << j.dump() << '\n'; }

// A file, or stdout for "-".
class Output {
public:
    explicit Output(const std::string& path) : path_(path == "-" ? "" : path) {
        if (path_.empty()) return;
        file_.open(path_, std::ios::binary);
        if (!file_) throw IoError("cannot write '" + path_ + "'");
    }

    std::ostream& stream() { return path_.empty() ? std::cout : file_; }

    void close() {
        if (path_.empty()) {
            std::cout.flush();
            return;
        }
        file_.close();
        if (!file_) throw IoError("write to '" + path_ + "' failed");
    }

private:
    std::string path_;
    std::ofstream file_;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    return in;
}

std::string exact(double v) {
    std::ostringstream o;
    o << std::setprecision(17) << v;
    return o.str();
}

template <typename F>
void write_file(const std::string& path, F&& body) {
    Output out(path);
    body(out.stream());
    out.close();
}

// ---- corpus input shared by several commands ----

struct CorpusArgs {
    std::string places;
    std::string db;
    std::string dict;
    std::string stoplist;
    std::string lexicon;
    bool lenient = false;

    void add(CLI::App* cmd, bool with_lexicon, bool with_db = true) {
        auto* p = cmd->add_option("--places", places, "Place records (JSON Lines); reviews are tagged")
                      ->check(CLI::ExistingFile);
        if (with_db) {
            auto* d = cmd->add_option("--db", db, "Transaction file (\"id id ... [| label]\" per line)")
                          ->check(CLI::ExistingFile);
            p->excludes(d);
            cmd->add_option("--dict", dict, "Dictionary for --db (\"id<TAB>term\" per line)")
                ->check(CLI::ExistingFile)
                ->needs(d);
        }
        cmd->add_option("--stoplist", stoplist, "Stopword file for tagging (default: built-in English list)")
            ->check(CLI::ExistingFile)
            ->needs(p);
        cmd->add_flag("--lenient", lenient, "Skip malformed place records instead of failing")->needs(p);
        if (with_lexicon) {
            cmd->add_option("--bootstrap-lexicon", lexicon,
                            "Sentiment lexicon labelling places without a stored sentiment; undecided ones are dropped")
                ->check(CLI::ExistingFile)
                ->needs(p);
        }
    }

    void require_one() const {
        if (places.empty() && db.empty()) throw InvalidArgument("one of --places or --db is required");
    }
};

std::vector<corpus::Place> read_places(const CorpusArgs& a) {
    auto r = corpus::ingest_places_file(a.places, !a.lenient);
    for (const auto& issue : r.issues) note({{"skipped", {{"line", issue.line}, {"message", issue.message}}}});
    if (!a.lexicon.empty()) {
        const auto undecided = textprep::bootstrap_labels(r.places, textprep::SentimentLexicon::from_file(a.lexicon));
        note({{"bootstrap_lexicon", {{"labelled_places", r.places.size()}, {"undecided_dropped", undecided}}}});
    }
    return std::move(r.places);
}

corpus::LabeledDatabase tag_places(const std::vector<corpus::Place>& places, const CorpusArgs& a) {
    const auto stop = a.stoplist.empty() ? textprep::Stoplist::english() : textprep::Stoplist::from_file(a.stoplist);
    auto built = corpus::build_database(places, textprep::review_tagger(stop));
    if (built.dropped > 0) note({{"untagged_places_dropped", built.dropped}});
    return std::move(built.db);
}

// Re-expresses db over `target`; terms target lacks get fresh ids.
corpus::LabeledDatabase reexpress(const corpus::LabeledDatabase& db, corpus::TagDictionary target) {
    std::vector<corpus::Transaction> txs;
    for (const auto& t : db.transactions()) {
        std::vector<corpus::TagId> ids;
        for (auto id : t.tags) ids.push_back(target.intern(db.dictionary().term(id)));
        txs.push_back(corpus::Transaction::from_unsorted(std::move(ids)));
    }
    corpus::LabeledDatabase out(std::move(target));
    for (std::size_t i = 0; i < txs.size(); ++i) out.add(std::move(txs[i]), db.label(i));
    return out;
}

corpus::LabeledDatabase load_database(const CorpusArgs& a) {
    a.require_one();
    if (!a.places.empty()) return tag_places(read_places(a), a);
    corpus::TagDictionary dict;
    if (!a.dict.empty()) {
        auto in = open_input(a.dict);
        dict = corpus::read_dictionary(in);
    }
    auto in = open_input(a.db);
    return corpus::read_transactions(in, std::move(dict));
}

// Database in the model's tag ids. A --db without --dict is taken to use
// the model's ids already.
corpus::LabeledDatabase load_for_model(const CorpusArgs& a, const classifier::LoadedModel& model) {
    a.require_one();
    if (!a.places.empty() || !a.dict.empty()) return reexpress(load_database(a), model.dictionary);
    auto in = open_input(a.db);
    return corpus::read_transactions(in, model.dictionary);
}

struct MiningArgs {
    std::uint64_t minsup = 0;
    std::size_t max_cardinality = krimp::MiningOptions{}.max_cardinality;
    std::size_t max_candidates = krimp::MiningOptions{}.max_candidates;

    void add(CLI::App* cmd) {
        cmd->add_option("--minsup", minsup, "Minimum absolute support of candidate itemsets")
            ->required()
            ->check(CLI::PositiveNumber);
        cmd->add_option("--max-cardinality", max_cardinality, "Largest candidate itemset")
            ->capture_default_str()
            ->check(CLI::Range(2, 64));
        cmd->add_option("--max-candidates", max_candidates, "Abort mining beyond this many candidates")
            ->capture_default_str();
    }

    krimp::MiningOptions options() const { return {minsup, max_cardinality, max_candidates}; }
};

json stats_json(const krimp::CompressionStats& s) {
    return {{"db_bits", s.db_bits}, {"ct_bits", s.ct_bits}, {"total_bits", s.total_bits}};
}

// ---- commands ----

void add_ingest(CLI::App& app) {
    struct Args {
        CorpusArgs corpus;
        std::string out_db, out_dict, out_places;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = app.add_subcommand("ingest", "Validate place records and write their tag transactions");
    args->corpus.add(cmd, true, false);
    cmd->get_option("--places")->required();
    cmd->add_option("--out-db", args->out_db, "Transaction file to write")->required();
    cmd->add_option("--out-dict", args->out_dict, "Dictionary file to write")->required();
    cmd->add_option("--out-places", args->out_places, "Normalized place records to write (JSON Lines)");
    cmd->callback([args] {
        const auto places = read_places(args->corpus);
        const auto db = tag_places(places, args->corpus);
        write_file(args->out_db, [&](std::ostream& o) { corpus::write_transactions(o, db); });
        write_file(args->out_dict, [&](std::ostream& o) { corpus::write_dictionary(o, db.dictionary()); });
        if (!args->out_places.empty()) {
            write_file(args->out_places, [&](std::ostream& o) { corpus::write_places(o, places); });
        }
        std::size_t labelled = 0;
        for (const auto& l : db.labels()) labelled += l ? 1 : 0;
        note({{"ingest",
               {{"places", places.size()},
                {"transactions", db.size()},
                {"labelled", labelled},
                {"tags", db.dictionary().size()},
                {"hash", experiments::database_hash(db)}}}});
    });
}

void add_train(CLI::App& app) {
    struct Args {
        CorpusArgs corpus;
        MiningArgs mining;
        std::string out;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = app.add_subcommand("train", "Compress each sentiment class and write a model directory");
    args->corpus.add(cmd, true);
    args->mining.add(cmd);
    cmd->add_option("--out", args->out, "Model directory to write")->required();
    cmd->callback([args] {
        const auto db = load_database(args->corpus);
        if (!db.fully_labeled()) {
            throw InvalidArgument(args->corpus.places.empty()
                                      ? "transaction file has unlabeled lines"
                                      : "corpus has places without a sentiment label; pass --bootstrap-lexicon");
        }
        const auto result = classifier::train(db, args->mining.options());
        classifier::save_model(args->out, result.model, db.dictionary());
        json classes = json::object();
        for (const auto& [label, r] : result.reports) {
            classes[label] = {{"transactions", r.transactions},
                              {"candidates", r.candidates},
                              {"accepted", r.accepted},
                              {"initial", stats_json(r.initial)},
                              {"final", stats_json(r.final)}};
        }
        note({{"train", {{"model", args->out}, {"minsup", args->mining.minsup}, {"classes", classes}}}});
    });
}

void add_sweep(CLI::App& app) {
    struct Args {
        CorpusArgs corpus;
        MiningArgs mining;
        experiments::ExperimentRecipe recipe;
        std::string out = "-";
    };
    auto args = std::make_shared<Args>();
    auto* cmd = app.add_subcommand(
        "sweep", "Degradation sweep over seen/unseen splits and cross-validation folds (labelled corpus)");
    args->corpus.add(cmd, false);
    args->mining.add(cmd);
    auto& r = args->recipe;
    cmd->add_option("--seen-fraction", r.seen_fraction, "Seen share of every class")->capture_default_str();
    cmd->add_option("--cv", r.cv_folds, "Fold counts, e.g. 1,2,5,10")->delimiter(',')->capture_default_str();
    cmd->add_option("--deltas", r.deltas, "Degradation levels in [0, 1)")->delimiter(',')->capture_default_str();
    cmd->add_option("--seeds", r.seeds, "Seeds for the split and the degradation")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--positive-class", r.positive_class, "Class counted as positive")->capture_default_str();
    cmd->add_option("--out", args->out, "CSV to write (- for stdout)")->capture_default_str();
    cmd->callback([args] {
        auto recipe = args->recipe;
        recipe.mining = args->mining.options();
        recipe.validate();
        const auto db = load_database(args->corpus);
        const auto rows = experiments::run_sweep(db, recipe);
        write_file(args->out, [&](std::ostream& o) { experiments::write_sweep_csv(o, rows, experiments::database_hash(db)); });
        note({{"sweep", {{"rows", rows.size()}, {"transactions", db.size()}}}});
    });
}

void add_classify(CLI::App& app) {
    struct Args {
        CorpusArgs corpus;
        std::string model, out = "-", positive_class = "pos";
        double delta = 0.0;
        std::uint64_t seed = 1;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = app.add_subcommand("classify", "Classify (optionally degraded) transactions with a trained model");
    cmd->add_option("--model", args->model, "Model directory")->required()->check(CLI::ExistingDirectory);
    args->corpus.add(cmd, false);
    cmd->add_option("--delta", args->delta, "Share of every transaction's tags to drop")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 0.999999));
    cmd->add_option("--seed", args->seed, "Degradation seed")->capture_default_str();
    cmd->add_option("--positive-class", args->positive_class, "Class counted as positive")->capture_default_str();
    cmd->add_option("--out", args->out, "CSV to write (- for stdout): index,truth,predicted")->capture_default_str();
    cmd->callback([args] {
        const auto model = classifier::load_model(args->model);
        const auto db = load_for_model(args->corpus, model);
        const auto res = classifier::truncate_classification(db, args->delta, args->seed, model.model);
        write_file(args->out, [&](std::ostream& o) {
            o << "index,truth,predicted\n";
            for (std::size_t i = 0; i < res.predictions.size(); ++i) {
                const auto& p = res.predictions[i];
                o << i << ',' << p.truth.value_or("") << ',' << p.predicted.value_or("") << '\n';
            }
        });
        json summary{{"transactions", db.size()}, {"unclassifiable", res.unclassifiable.size()}};
        if (db.fully_labeled() && !db.empty()) {
            const auto m = evalmetrics::classification_metrics(res.predictions, args->positive_class);
            summary["accuracy"] = m.accuracy ? json(*m.accuracy) : json(nullptr);
        }
        note({{"classify", summary}});
    });
}

void add_degrade(CLI::App& app) {
    struct Args {
        CorpusArgs corpus;
        std::string out = "-", out_dict;
        double delta = 0.0;
        std::uint64_t seed = 1;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = app.add_subcommand("degrade", "Drop a share of every transaction's tags");
    args->corpus.add(cmd, false);
    cmd->add_option("--delta", args->delta, "Share of tags to drop, in [0, 1)")
        ->required()
        ->check(CLI::Range(0.0, 0.999999));
    cmd->add_option("--seed", args->seed, "Sampling seed")->capture_default_str();
    cmd->add_option("--out", args->out, "Transaction file to write (- for stdout)")->capture_default_str();
    cmd->add_option("--out-dict", args->out_dict, "Dictionary file to write");
    cmd->callback([args] {
        const auto db = corpus::degrade(load_database(args->corpus), args->delta, args->seed);
        write_file(args->out, [&](std::ostream& o) { corpus::write_transactions(o, db); });
        if (!args->out_dict.empty()) {
            write_file(args->out_dict, [&](std::ostream& o) { corpus::write_dictionary(o, db.dictionary()); });
        }
    });
}

void add_histogram(CLI::App& app) {
    struct Args {
        CorpusArgs corpus;
        std::string model, class_a, class_b, label, out = "-";
        double bin_width = classifier::kDefaultHistogramBinWidth;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = app.add_subcommand(
        "histogram", "Histogram of code length under class B minus code length under class A per transaction");
    cmd->add_option("--model", args->model, "Model directory")->required()->check(CLI::ExistingDirectory);
    args->corpus.add(cmd, false);
    cmd->add_option("--class-a", args->class_a, "Reference class")->required();
    cmd->add_option("--class-b", args->class_b, "Compared class")->required();
    cmd->add_option("--only-label", args->label, "Keep only transactions with this stored label");
    cmd->add_option("--bin-width", args->bin_width, "Bin width in bits")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", args->out, "CSV to write (- for stdout): bin,lower,upper,count")->capture_default_str();
    cmd->callback([args] {
        const auto model = classifier::load_model(args->model);
        const auto db = load_for_model(args->corpus, model);
        std::vector<corpus::Transaction> txs;
        for (std::size_t i = 0; i < db.size(); ++i) {
            if (args->label.empty() || db.label(i) == args->label) txs.push_back(db.transaction(i));
        }
        const auto h = classifier::dissimilarity_histogram(txs, model.model.table(args->class_a),
                                                           model.model.table(args->class_b), args->bin_width);
        write_file(args->out, [&](std::ostream& o) {
            o << std::setprecision(12) << "bin,lower,upper,count\n";
            for (const auto& [bin, count] : h.bins) {
                o << bin << ',' << static_cast<double>(bin) * h.bin_width << ','
                  << static_cast<double>(bin + 1) * h.bin_width << ',' << count << '\n';
            }
        });
        note({{"histogram", {{"transactions", txs.size()}, {"binned", h.total()}, {"skipped", h.skipped}}}});
    });
}

struct EngineArgs {
    service::EngineConfig config;
    std::string algorithm = "dijkstra";

    void add_paths(CLI::App* cmd, bool required) {
        auto* g = cmd->add_option("--graph", config.graph_path, "Road graph file")->check(CLI::ExistingFile);
        auto* p = cmd->add_option("--places", config.places_path, "Place records (JSON Lines)")->check(CLI::ExistingFile);
        if (required) {
            g->required();
            p->required();
        }
        cmd->add_option("--model", config.model_path, "Model directory for sentiment (default: stored labels)")
            ->check(CLI::ExistingDirectory);
        cmd->add_option("--radius-m", config.radius_m, "Search radius in metres")->capture_default_str();
    }
};

void add_compare_routing(CLI::App& app) {
    struct Args {
        EngineArgs engine;
        std::string queries, out_dir, aggregation = "mean";
        std::size_t k = evalmetrics::kDefaultTopK;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = app.add_subcommand("compare-routing",
                                   "Rank a query batch under astar, dijkstra, yen and dijkstra_norel and compare pairs");
    args->engine.add_paths(cmd, true);
    cmd->add_option("--queries", args->queries, "Query batch (\"query_id<TAB>lat<TAB>lon<TAB>text\")")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--k", args->k, "Top-k cut-off")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--aggregation", args->aggregation, "Per-bucket aggregation")
        ->capture_default_str()
        ->check(CLI::IsMember({"mean", "median"}));
    cmd->add_option("--out-dir", args->out_dir, "Directory for runs and comparison CSVs")->required();
    cmd->callback([args] {
        const auto engine = service::Engine::load(args->engine.config);
        auto in = open_input(args->queries);
        const auto batch = scoring::read_batch(in);
        const auto agg = args->aggregation == "median" ? evalmetrics::Aggregation::median : evalmetrics::Aggregation::mean;
        const auto c = service::compare_routing(*engine, batch, args->k, agg);
        const fs::path dir(args->out_dir);
        fs::create_directories(dir / "runs");
        for (const auto& [name, run] : c.runs) {
            write_file((dir / "runs" / (name + ".tsv")).string(), [&](std::ostream& o) { evalmetrics::write_run(o, run); });
        }
        json pairs = json::array();
        for (const auto& [pair, pc] : c.pairs) {
            const auto stem = "pair_" + pair.label;
            write_file((dir / (stem + ".csv")).string(), [&](std::ostream& o) { evalmetrics::write_comparison_csv(o, pc); });
            write_file((dir / (stem + "_buckets.csv")).string(), [&](std::ostream& o) { evalmetrics::write_bucket_csv(o, pc); });
            pairs.push_back({{"pair", pair.label}, {"first", pair.first}, {"second", pair.second},
                             {"queries", pc.rows.size()}, {"unmatched", pc.unmatched}});
        }
        write_file((dir / "buckets.csv").string(), [&](std::ostream& o) { service::write_pair_buckets_csv(o, c); });
        note({{"compare_routing", {{"queries", batch.size()}, {"k", args->k}, {"pairs", pairs}}}});
    });
}

void add_route(CLI::App& app) {
    struct Args {
        EngineArgs engine;
        double from_lat = 0, from_lon = 0, to_lat = 0, to_lon = 0;
        std::string place_id, out = "-";
    };
    auto args = std::make_shared<Args>();
    auto* cmd = app.add_subcommand("route", "Shortest route(s) from a position to a place or to another position");
    args->engine.add_paths(cmd, false);
    cmd->get_option("--graph")->required();
    cmd->add_option("--from-lat", args->from_lat, "Start latitude")->required();
    cmd->add_option("--from-lon", args->from_lon, "Start longitude")->required();
    auto* id = cmd->add_option("--place-id", args->place_id, "Destination place (needs --places)");
    auto* tlat = cmd->add_option("--to-lat", args->to_lat, "Destination latitude");
    auto* tlon = cmd->add_option("--to-lon", args->to_lon, "Destination longitude");
    id->needs(cmd->get_option("--places"))->excludes(tlat)->excludes(tlon);
    tlat->needs(tlon);
    tlon->needs(tlat);
    cmd->add_option("--algo", args->engine.algorithm, "dijkstra, astar or yen")->capture_default_str();
    cmd->add_option("--k", args->engine.config.yen_k, "Routes to return with yen")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", args->out, "JSON to write (- for stdout)")->capture_default_str();
    cmd->callback([args, tlat] {
        auto config = args->engine.config;
        const auto algo = routing::algorithm_from_string(args->engine.algorithm);
        json body;
        if (!args->place_id.empty()) {
            service::EngineHolder holder;
            holder.set(service::Engine::load(config));
            const service::Params params{{"from_lat", exact(args->from_lat)},
                                         {"from_lon", exact(args->from_lon)},
                                         {"place_id", args->place_id},
                                         {"algo", args->engine.algorithm},
                                         {"k", std::to_string(config.yen_k)},
                                         {"radius_m", exact(config.radius_m)}};
            auto r = service::api_route(holder, params);
            if (r.status == 404) throw service::NotFound(r.body["error"]["message"].get<std::string>());
            if (r.status != 200) throw InvalidArgument(r.body["error"]["message"].get<std::string>());
            body = std::move(r.body);
        } else {
            if (!args->engine.config.places_path.empty() || !args->engine.config.model_path.empty()) {
                throw InvalidArgument("--places and --model only apply with --place-id");
            }
            if (tlat->count() == 0) throw InvalidArgument("either --place-id or --to-lat and --to-lon is required");
            const auto g = routing::read_graph_file(config.graph_path);
            const auto s = routing::snap(g, {args->from_lat, args->from_lon});
            const auto t = routing::snap(g, {args->to_lat, args->to_lon});
            std::vector<routing::Route> routes;
            if (algo == routing::Algorithm::yen) {
                routes = routing::yen_k_shortest(g, s, t, config.yen_k);
            } else if (auto r = routing::shortest_route(g, s, t, algo)) {
                routes.push_back(std::move(*r));
            }
            json list = json::array();
            for (const auto& r : routes) {
                json polyline = json::array();
                for (auto n : r.path) polyline.push_back({g.node(n).lat, g.node(n).lon});
                list.push_back({{"polyline", polyline}, {"nodes", r.path}, {"total_m", r.total_m}});
            }
            body = {{"algorithm", routing::to_string(algo)}, {"from_node", s}, {"to_node", t},
                    {"reachable", !routes.empty()}, {"routes", list}};
        }
        write_file(args->out, [&](std::ostream& o) { o << body.dump() << '\n'; });
    });
}

// Blocks SIGINT and SIGTERM in every thread and stops the server from a
// dedicated waiter thread.
void stop_on_signal(service::HttpServer& server) {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    std::thread([set, &server] {
        int sig = 0;
        sigwait(&set, &sig);
        note({{"serve", {{"signal", sig}}}});
        server.stop();
    }).detach();
}

void add_serve(CLI::App& app) {
    struct Args {
        EngineArgs engine;
        std::string config_file, host = "127.0.0.1";
        int port = 8080;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = app.add_subcommand("serve", "Run the HTTP service (/api/search, /api/route, /api/places, /api/health)");
    auto& c = args->engine.config;
    cmd->add_option("--config", args->config_file,
                    "TOML file with any of the flags below as keys (e.g. radius-m = 2000); flags win")
        ->check(CLI::ExistingFile);
    cmd->add_option("--host", args->host, "Listen address")->capture_default_str();
    cmd->add_option("--port", args->port, "Listen port (0 picks a free one)")
        ->capture_default_str()
        ->check(CLI::Range(0, 65535));
    args->engine.add_paths(cmd, false);
    cmd->add_option("--algo", args->engine.algorithm, "Default routing algorithm: dijkstra, astar or yen")
        ->capture_default_str();
    cmd->add_option("--yen-k", c.yen_k, "Default number of yen routes")->capture_default_str();
    cmd->add_option("--boosts", c.boosts_enabled, "Boosted ranking by default (true/false)")->capture_default_str();
    cmd->add_option("--limit", c.result_limit, "Default result limit")->capture_default_str();
    cmd->callback([args, cmd] {
        if (!args->config_file.empty()) {
            std::vector<CLI::ConfigItem> items;
            try {
                items = CLI::ConfigTOML().from_file(args->config_file);
            } catch (const CLI::Error& e) {
                throw ParseError(0, "config '" + args->config_file + "': " + e.what());
            }
            for (const auto& item : items) {
                auto* opt = item.parents.empty() ? cmd->get_option_no_throw("--" + item.name) : nullptr;
                if (!opt || item.name == "config") throw InvalidArgument("unknown config key '" + item.fullname() + "'");
                if (opt->count() > 0) continue;
                opt->add_result(item.inputs);
                opt->run_callback();
            }
        }
        auto config = args->engine.config;
        config.algorithm = routing::algorithm_from_string(args->engine.algorithm);
        config.validate();

        service::EngineHolder holder;
        service::HttpServer server(holder, config);
        const auto loaded = server.reload();
        if (loaded.status != 200) note({{"serve", {{"engine", "not loaded"}, {"detail", loaded.body}}}});
        const int port = server.bind(args->host, args->port);
        stop_on_signal(server);
        note({{"serve", {{"listening", args->host + ":" + std::to_string(port)}}}});
        server.listen();
    });
}

void add_synth(CLI::App& app) {
    struct Args {
        std::string kind, out_dir;
        std::uint64_t seed = 1;
        std::size_t positives = 300, negatives = 60;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = app.add_subcommand("synth", "Write a deterministic synthetic data set");
    cmd->add_option("--kind", args->kind,
                    "city: graph.txt, places.jsonl, queries.tsv; planted or foursquare: transactions.txt, dictionary.tsv")
        ->required()
        ->check(CLI::IsMember({"city", "planted", "foursquare"}));
    cmd->add_option("--seed", args->seed, "Generator seed")->capture_default_str();
    cmd->add_option("--positives", args->positives, "Positive transactions (planted)")->capture_default_str();
    cmd->add_option("--negatives", args->negatives, "Negative transactions (planted)")->capture_default_str();
    cmd->add_option("--out-dir", args->out_dir, "Directory to write")->required();
    cmd->callback([args] {
        const fs::path dir(args->out_dir);
        fs::create_directories(dir);
        if (args->kind == "city") {
            const auto city = fixtures::synthetic_city(args->seed);
            write_file((dir / "graph.txt").string(), [&](std::ostream& o) { routing::write_graph(o, city.graph); });
            write_file((dir / "places.jsonl").string(), [&](std::ostream& o) { corpus::write_places(o, city.places); });
            write_file((dir / "queries.tsv").string(), [&](std::ostream& o) { scoring::write_batch(o, city.queries); });
            note({{"synth", {{"nodes", city.graph.node_count()}, {"places", city.places.size()},
                             {"queries", city.queries.size()}}}});
            return;
        }
        const auto db = args->kind == "planted"
                            ? fixtures::planted_pattern_database(args->positives, args->negatives, args->seed)
                            : fixtures::foursquare_shaped_database(args->seed);
        write_file((dir / "transactions.txt").string(), [&](std::ostream& o) { corpus::write_transactions(o, db); });
        write_file((dir / "dictionary.tsv").string(), [&](std::ostream& o) { corpus::write_dictionary(o, db.dictionary()); });
        note({{"synth", {{"transactions", db.size()}, {"tags", db.dictionary().size()}}}});
    });
}

int fail(const std::string& code, const std::string& message, int status) {
    std::cerr << json{{"error", {{"code", code}, {"message", message}}}}.dump() << '\n';
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Route recommendation with sentiment-aware ranking"};
    app.set_version_flag("--version", ROUTEREC_VERSION);
    app.require_subcommand(1);
    add_ingest(app);
    add_train(app);
    add_sweep(app);
    add_classify(app);
    add_degrade(app);
    add_histogram(app);
    add_compare_routing(app);
    add_route(app);
    add_serve(app);
    add_synth(app);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return fail("usage", e.what(), 2);
    } catch (const ParseError& e) {
        return fail("parse_error", e.what(), 1);
    } catch (const IoError& e) {
        return fail("io_error", e.what(), 1);
    } catch (const service::NotFound& e) {
        return fail("not_found", e.what(), 1);
    } catch (const classifier::OutOfVocabulary& e) {
        return fail("out_of_vocabulary", e.what(), 1);
    } catch (const InvalidArgument& e) {
        return fail("invalid_argument", e.what(), 1);
    } catch (const std::exception& e) {
        return fail("error", e.what(), 1);
    }
    return 0;
}
