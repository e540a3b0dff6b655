#include "routerec/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "routerec/hashing.hpp"

namespace routerec::classifier {

namespace fs = std::filesystem;

SentimentModel SentimentModel::assemble(std::map<ClassLabel, krimp::CodeTable> tables,
                                        const std::vector<TagId>& extra_alphabet, std::uint64_t minsup) {
    if (tables.size() < 2) throw InvalidArgument("a sentiment model needs at least two classes");
    std::set<TagId> alphabet(extra_alphabet.begin(), extra_alphabet.end());
    for (const auto& [_, ct] : tables) {
        for (TagId t : ct.alphabet()) alphabet.insert(t);
    }
    SentimentModel m;
    m.alphabet_.assign(alphabet.begin(), alphabet.end());
    m.minsup_ = minsup;
    for (auto& [label, ct] : tables) {
        std::vector<krimp::CodeTableEntry> entries = ct.entries();
        const auto own = ct.alphabet();
        for (TagId t : m.alphabet_) {
            if (!std::binary_search(own.begin(), own.end(), t)) entries.push_back({{t}, 0, 0});
        }
        krimp::CodeTable padded(std::move(entries));
        m.lengths_.emplace(label, krimp::code_lengths(padded, true));
        m.tables_.emplace(label, std::move(padded));
    }
    return m;
}

const krimp::CodeTable& SentimentModel::table(const ClassLabel& label) const {
    auto it = tables_.find(label);
    if (it == tables_.end()) throw InvalidArgument("unknown class '" + label + "'");
    return it->second;
}

std::vector<ClassLabel> SentimentModel::classes() const {
    std::vector<ClassLabel> out;
    for (const auto& [label, _] : tables_) out.push_back(label);
    return out;
}

bool SentimentModel::in_alphabet(TagId tag) const {
    return std::binary_search(alphabet_.begin(), alphabet_.end(), tag);
}

const std::vector<double>& SentimentModel::smoothed_lengths(const ClassLabel& label) const {
    auto it = lengths_.find(label);
    if (it == lengths_.end()) throw InvalidArgument("unknown class '" + label + "'");
    return it->second;
}

TrainResult train(const corpus::LabeledDatabase& db, const krimp::MiningOptions& options,
                  const std::vector<ClassLabel>& required_classes) {
    auto parts = corpus::partition_by_class(db);
    for (const auto& label : required_classes) {
        if (!parts.count(label)) throw InvalidArgument("class '" + label + "' has no training transactions");
    }
    if (parts.size() < 2) throw InvalidArgument("training needs at least two classes, found " + std::to_string(parts.size()));

    std::map<ClassLabel, std::future<krimp::KrimpResult>> jobs;
    for (const auto& [label, part] : parts) {
        jobs.emplace(label, std::async(std::launch::async, [&part, &options] {
                         return krimp::krimp_compress(part.transactions(), options);
                     }));
    }
    TrainResult result;
    std::map<ClassLabel, krimp::CodeTable> tables;
    for (auto& [label, job] : jobs) {
        auto r = job.get();
        result.reports[label] = {parts.at(label).size(), r.initial, r.stats, r.candidates, r.accepted};
        tables.emplace(label, std::move(r.table));
    }
    result.model = SentimentModel::assemble(std::move(tables), {}, options.minsup);
    return result;
}

corpus::Transaction restrict_to_alphabet(const corpus::Transaction& t, const krimp::CodeTable& ct) {
    corpus::Transaction out;
    for (TagId tag : t.tags) {
        if (ct.has_singleton(tag)) out.tags.push_back(tag);
    }
    return out;
}

namespace {

double encode_with(const corpus::Transaction& t, const krimp::CodeTable& ct, const std::vector<double>& lengths) {
    if (t.empty()) throw OutOfVocabulary();
    double bits = 0.0;
    for (auto i : krimp::cover_indices(t, ct)) bits += lengths[i];
    return bits;
}

}  // namespace

double encode_length(const corpus::Transaction& t, const krimp::CodeTable& ct) {
    return encode_with(restrict_to_alphabet(t, ct), ct, krimp::code_lengths(ct, true));
}

double encode_length(const corpus::Transaction& t, const SentimentModel& model, const ClassLabel& label) {
    corpus::Transaction known;
    for (TagId tag : t.tags) {
        if (model.in_alphabet(tag)) known.tags.push_back(tag);
    }
    return encode_with(known, model.table(label), model.smoothed_lengths(label));
}

Classification classify(const corpus::Transaction& t, const SentimentModel& model) {
    Classification c;
    double best = std::numeric_limits<double>::infinity();
    // Map iteration is in ascending label order, so strict improvement keeps
    // the smallest label on ties.
    for (const auto& label : model.classes()) {
        const double bits = encode_length(t, model, label);
        c.lengths.emplace(label, bits);
        if (bits < best) {
            best = bits;
            c.winner = label;
        }
    }
    return c;
}

std::vector<corpus::Transaction> TruncationResult::members(const ClassLabel& label) const {
    std::vector<corpus::Transaction> out;
    if (auto it = partitions.find(label); it != partitions.end()) {
        for (auto i : it->second) out.push_back(degraded.transaction(i));
    }
    return out;
}

TruncationResult truncate_classification(const corpus::LabeledDatabase& db, double delta, std::uint64_t seed,
                                         const SentimentModel& model) {
    TruncationResult r;
    r.degraded = corpus::degrade(db, delta, seed);
    for (const auto& label : model.classes()) r.partitions[label];
    r.predictions.reserve(r.degraded.size());
    for (std::size_t i = 0; i < r.degraded.size(); ++i) {
        Prediction p{r.degraded.label(i), std::nullopt};
        try {
            auto c = classify(r.degraded.transaction(i), model);
            r.partitions[c.winner].push_back(i);
            p.predicted = c.winner;
        } catch (const OutOfVocabulary&) {
            r.unclassifiable.push_back(i);
        }
        r.predictions.push_back(std::move(p));
    }
    return r;
}

std::size_t Histogram::total() const {
    std::size_t n = 0;
    for (const auto& [_, count] : bins) n += count;
    return n;
}

Histogram dissimilarity_histogram(std::span<const corpus::Transaction> db, const krimp::CodeTable& first,
                                  const krimp::CodeTable& second, double bin_width) {
    if (!(bin_width > 0.0)) throw InvalidArgument("bin width must be positive");
    Histogram h;
    h.bin_width = bin_width;
    const auto first_lengths = krimp::code_lengths(first, true);
    const auto second_lengths = krimp::code_lengths(second, true);
    for (const auto& t : db) {
        double diff = 0.0;
        try {
            diff = encode_with(restrict_to_alphabet(t, second), second, second_lengths) -
                   encode_with(restrict_to_alphabet(t, first), first, first_lengths);
        } catch (const OutOfVocabulary&) {
            ++h.skipped;
            continue;
        }
        h.differences.push_back(diff);
        ++h.bins[static_cast<long long>(std::floor(diff / bin_width))];
    }
    return h;
}

namespace {

void check_label(const ClassLabel& label) {
    const bool ok = !label.empty() && std::all_of(label.begin(), label.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-';
    });
    if (!ok) throw InvalidArgument("class label '" + label + "' cannot name a model file");
}

std::string combined_hash(const std::map<std::string, std::string>& file_hashes) {
    std::string joined;
    for (const auto& [file, hash] : file_hashes) joined += file + ' ' + hash + '\n';
    return git_blob_sha1(joined);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

void save_model(const std::string& dir, const SentimentModel& model, const corpus::TagDictionary& dictionary) {
    fs::create_directories(dir);
    std::map<std::string, std::string> hashes;
    nlohmann::ordered_json classes = nlohmann::ordered_json::array();
    for (const auto& [label, ct] : model.tables()) {
        check_label(label);
        std::ostringstream text;
        krimp::write_code_table(text, label, ct);
        const std::string file = label + ".ct";
        write_text(fs::path(dir) / file, text.str());
        hashes[file] = git_blob_sha1(text.str());
        classes.push_back({{"label", label}, {"file", file}, {"entries", ct.size()},
                           {"non_singletons", ct.non_singleton_count()}, {"sha1", hashes[file]}});
    }
    std::ostringstream dict;
    corpus::write_dictionary(dict, dictionary);
    write_text(fs::path(dir) / "dictionary.tsv", dict.str());
    hashes["dictionary.tsv"] = git_blob_sha1(dict.str());

    nlohmann::ordered_json manifest;
    manifest["format"] = 1;
    manifest["classes"] = classes;
    manifest["minsup"] = model.minsup();
    manifest["alphabet_size"] = model.alphabet().size();
    manifest["dictionary"] = {{"file", "dictionary.tsv"}, {"sha1", hashes["dictionary.tsv"]}};
    manifest["content_hash"] = combined_hash(hashes);
    write_text(fs::path(dir) / "manifest.json", manifest.dump(2) + "\n");
}

LoadedModel load_model(const std::string& dir) {
    const fs::path root(dir);
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_file((root / "manifest.json").string()));
    } catch (const nlohmann::json::exception& e) {
        throw Error("invalid model manifest: " + std::string(e.what()));
    }
    std::map<std::string, std::string> hashes;
    std::map<ClassLabel, krimp::CodeTable> tables;
    for (const auto& entry : manifest.at("classes")) {
        const auto file = entry.at("file").get<std::string>();
        const std::string text = read_file((root / file).string());
        hashes[file] = git_blob_sha1(text);
        if (hashes[file] != entry.at("sha1").get<std::string>()) throw Error("hash mismatch for " + file);
        std::istringstream in(text);
        auto read = krimp::read_code_tables(in);
        if (read.size() != 1) throw Error(file + " must hold exactly one code table");
        tables.emplace(entry.at("label").get<std::string>(), std::move(read.front().table));
    }
    const auto dict_file = manifest.at("dictionary").at("file").get<std::string>();
    const std::string dict_text = read_file((root / dict_file).string());
    hashes[dict_file] = git_blob_sha1(dict_text);
    if (hashes[dict_file] != manifest.at("dictionary").at("sha1").get<std::string>()) {
        throw Error("hash mismatch for " + dict_file);
    }
    const auto content_hash = combined_hash(hashes);
    if (content_hash != manifest.at("content_hash").get<std::string>()) throw Error("model content hash mismatch");

    std::istringstream dict_in(dict_text);
    LoadedModel loaded;
    loaded.dictionary = corpus::read_dictionary(dict_in);
    loaded.model = SentimentModel::assemble(std::move(tables), {}, manifest.at("minsup").get<std::uint64_t>());
    loaded.content_hash = content_hash;
    if (loaded.model.alphabet().size() != manifest.at("alphabet_size").get<std::size_t>()) {
        throw Error("model alphabet size does not match its manifest");
    }
    return loaded;
}

SentimentModel model_from_code_tables(std::istream& in, std::size_t alphabet_size) {
    std::map<ClassLabel, krimp::CodeTable> tables;
    std::set<TagId> present;
    for (auto& named : krimp::read_code_tables(in)) {
        for (TagId t : named.table.alphabet()) present.insert(t);
        if (!tables.emplace(named.name, std::move(named.table)).second) {
            throw InvalidArgument("duplicate code table for class '" + named.name + "'");
        }
    }
    std::vector<TagId> extra;
    TagId next = present.empty() ? 0 : *present.rbegin() + 1;
    for (std::size_t n = present.size(); n < alphabet_size; ++n) extra.push_back(next++);
    return SentimentModel::assemble(std::move(tables), extra);
}

}  // namespace routerec::classifier
