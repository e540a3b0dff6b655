#include "routerec/experiments.hpp"

#include <cmath>
#include <future>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include "routerec/error.hpp"
#include "routerec/hashing.hpp"

namespace routerec::experiments {

void ExperimentRecipe::validate() const {
    if (!(seen_fraction > 0.0 && seen_fraction < 1.0)) throw InvalidArgument("seen fraction must lie in (0, 1)");
    if (cv_folds.empty() || deltas.empty() || seeds.empty()) throw InvalidArgument("recipe needs folds, deltas and seeds");
    for (auto f : cv_folds) {
        if (f == 0) throw InvalidArgument("fold count must be at least 1");
    }
    for (double d : deltas) {
        if (!(d >= 0.0 && d < 1.0)) throw InvalidArgument("delta must lie in [0, 1)");
    }
    if (mining.minsup == 0) throw InvalidArgument("minsup must be at least 1");
}

namespace {

// Same sampler as corpus::degrade: swap index i + (draw mod (n - i)).
void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i) std::swap(v[i], v[i + rng() % (v.size() - i)]);
}

}  // namespace

Split seen_unseen_split(const corpus::LabeledDatabase& db, double seen_fraction, std::uint64_t seed) {
    std::map<corpus::ClassLabel, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < db.size(); ++i) {
        const auto& label = db.label(i);
        if (!label) throw InvalidArgument("transaction " + std::to_string(i) + " has no label");
        by_class[*label].push_back(i);
    }
    std::mt19937_64 rng(seed);
    Split s;
    for (auto& [_, members] : by_class) {
        shuffle(members, rng);
        const auto cut = static_cast<std::size_t>(std::llround(seen_fraction * static_cast<double>(members.size())));
        s.seen.insert(s.seen.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(cut));
        s.unseen.insert(s.unseen.end(), members.begin() + static_cast<std::ptrdiff_t>(cut), members.end());
    }
    shuffle(s.seen, rng);
    shuffle(s.unseen, rng);
    return s;
}

std::vector<std::vector<std::size_t>> deal_folds(const std::vector<std::size_t>& indices, std::size_t folds) {
    if (folds == 0) throw InvalidArgument("fold count must be at least 1");
    std::vector<std::vector<std::size_t>> out(folds);
    for (std::size_t i = 0; i < indices.size(); ++i) out[i % folds].push_back(indices[i]);
    return out;
}

corpus::LabeledDatabase subset(const corpus::LabeledDatabase& db, const std::vector<std::size_t>& indices) {
    corpus::LabeledDatabase out(db.dictionary());
    for (auto i : indices) out.add(db.transaction(i), db.label(i));
    return out;
}

namespace {

using Predictions = std::vector<classifier::Prediction>;

void append_predictions(Predictions& into, const corpus::LabeledDatabase& db, double delta, std::uint64_t seed,
                        const classifier::SentimentModel& model) {
    auto r = classifier::truncate_classification(db, delta, seed, model);
    into.insert(into.end(), r.predictions.begin(), r.predictions.end());
}

std::vector<SweepRow> run_cell(const corpus::LabeledDatabase& db, const ExperimentRecipe& recipe, std::size_t folds,
                               std::uint64_t seed) {
    const auto split = seen_unseen_split(db, recipe.seen_fraction, seed);
    const std::vector<corpus::ClassLabel> classes(db.classes().begin(), db.classes().end());
    const auto unseen = subset(db, split.unseen);

    std::vector<Predictions> seen_preds(recipe.deltas.size()), unseen_preds(recipe.deltas.size());
    if (folds == 1) {
        const auto seen = subset(db, split.seen);
        const auto model = classifier::train(seen, recipe.mining, classes).model;
        for (std::size_t d = 0; d < recipe.deltas.size(); ++d) {
            append_predictions(seen_preds[d], seen, recipe.deltas[d], seed, model);
            append_predictions(unseen_preds[d], unseen, recipe.deltas[d], seed, model);
        }
    } else {
        const auto groups = deal_folds(split.seen, folds);
        for (std::size_t f = 0; f < folds; ++f) {
            std::vector<std::size_t> train_idx;
            for (std::size_t g = 0; g < folds; ++g) {
                if (g != f) train_idx.insert(train_idx.end(), groups[g].begin(), groups[g].end());
            }
            const auto model = classifier::train(subset(db, train_idx), recipe.mining, classes).model;
            const auto held_out = subset(db, groups[f]);
            for (std::size_t d = 0; d < recipe.deltas.size(); ++d) {
                append_predictions(seen_preds[d], held_out, recipe.deltas[d], seed, model);
                append_predictions(unseen_preds[d], unseen, recipe.deltas[d], seed, model);
            }
        }
    }

    std::vector<SweepRow> rows;
    for (std::size_t d = 0; d < recipe.deltas.size(); ++d) {
        rows.push_back({folds, seed, recipe.deltas[d], "seen", folds == 1 ? "resubstitution" : "held_out",
                        evalmetrics::classification_metrics(seen_preds[d], recipe.positive_class)});
        rows.push_back({folds, seed, recipe.deltas[d], "unseen", "held_out",
                        evalmetrics::classification_metrics(unseen_preds[d], recipe.positive_class)});
    }
    return rows;
}

}  // namespace

std::vector<SweepRow> run_sweep(const corpus::LabeledDatabase& db, const ExperimentRecipe& recipe) {
    recipe.validate();
    if (!db.fully_labeled()) throw InvalidArgument("sweep needs a fully labeled database");
    std::vector<std::future<std::vector<SweepRow>>> jobs;
    for (auto folds : recipe.cv_folds) {
        for (auto seed : recipe.seeds) {
            jobs.push_back(std::async(std::launch::async, [&db, &recipe, folds, seed] {
                return run_cell(db, recipe, folds, seed);
            }));
        }
    }
    std::vector<SweepRow> rows;
    for (auto& job : jobs) {
        auto cell = job.get();
        rows.insert(rows.end(), cell.begin(), cell.end());
    }
    return rows;
}

namespace {

std::string field(const std::optional<double>& v) {
    if (!v) return "";
    std::ostringstream s;
    s << std::setprecision(12) << *v;
    return s.str();
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, const std::string& input_hash) {
    out << "cv_folds,seed,delta,split,evaluation,evaluated,classified,unclassifiable,tp,fp,tn,fn,"
           "accuracy,precision,recall,f1,tnr,ppcr,input_hash\n";
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        const auto& c = m.counts;
        out << r.cv_folds << ',' << r.seed << ',' << field(r.delta) << ',' << r.split << ',' << r.evaluation << ','
            << c.evaluated() << ',' << c.classified() << ',' << c.unclassifiable << ',' << c.tp << ',' << c.fp << ','
            << c.tn << ',' << c.fn << ',' << field(m.accuracy) << ',' << field(m.precision) << ','
            << field(m.recall) << ',' << field(m.f1) << ',' << field(m.tnr) << ',' << field(m.ppcr) << ','
            << input_hash << '\n';
    }
}

std::string database_hash(const corpus::LabeledDatabase& db) {
    std::ostringstream s;
    corpus::write_transactions(s, db);
    return git_blob_sha1(s.str());
}

}  // namespace routerec::experiments
