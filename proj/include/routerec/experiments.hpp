#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "routerec/classifier.hpp"
#include "routerec/corpus.hpp"
#include "routerec/evalmetrics.hpp"
#include "routerec/krimp.hpp"

namespace routerec::experiments {

struct ExperimentRecipe {
    double seen_fraction = 0.8;
    std::vector<std::size_t> cv_folds{1};
    std::vector<double> deltas{0.0, 0.25, 0.33, 0.50, 0.67};
    std::vector<std::uint64_t> seeds{1};
    krimp::MiningOptions mining;
    std::string positive_class = "pos";

    // Throws InvalidArgument: seen_fraction outside (0, 1), a delta outside
    // [0, 1), a fold count of 0, or an empty list.
    void validate() const;
};

struct Split {
    std::vector<std::size_t> seen;
    std::vector<std::size_t> unseen;
};

// Stratified split: within every class the indices are shuffled with the
// seed and the first round(seen_fraction * n) of them are seen. Both
// halves are returned in shuffled order. Throws on unlabeled transactions.
Split seen_unseen_split(const corpus::LabeledDatabase& db, double seen_fraction, std::uint64_t seed);

// Deals indices round-robin into `folds` groups.
std::vector<std::vector<std::size_t>> deal_folds(const std::vector<std::size_t>& indices, std::size_t folds);

// The transactions at `indices`, labels and dictionary included.
corpus::LabeledDatabase subset(const corpus::LabeledDatabase& db, const std::vector<std::size_t>& indices);

struct SweepRow {
    std::size_t cv_folds = 1;
    std::uint64_t seed = 0;
    double delta = 0.0;
    std::string split;       // "seen" or "unseen"
    std::string evaluation;  // "resubstitution" or "held_out"
    evalmetrics::ClassificationMetrics metrics;
};

// Per (cv_folds, seed): splits db, trains and evaluates, then emits one
// seen and one unseen row per delta. With one fold the model is trained on
// the whole seen split and the seen rows are resubstitution scores. With f
// folds the seen split is dealt into f folds; each fold is scored by the
// model trained on the others and the unseen split by every fold model,
// with predictions pooled. Degradation uses the row's seed. (cv_folds,
// seed) cells run concurrently; rows come back in recipe order.
std::vector<SweepRow> run_sweep(const corpus::LabeledDatabase& db, const ExperimentRecipe& recipe);

// Header: cv_folds,seed,delta,split,evaluation,evaluated,classified,
// unclassifiable,tp,fp,tn,fn,accuracy,precision,recall,f1,tnr,ppcr,input_hash.
// Undefined ratios are empty fields.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, const std::string& input_hash);

// git_blob_sha1 of the database in transaction-file form.
std::string database_hash(const corpus::LabeledDatabase& db);

}  // namespace routerec::experiments
