#include "routerec/textprep.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <unordered_map>

#include "routerec/error.hpp"

namespace routerec::textprep {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_word_char(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

enum class CharClass { word, space, punct };

CharClass classify(unsigned char c) {
    if (is_word_char(c)) return CharClass::word;
    if (std::isspace(c)) return CharClass::space;
    return CharClass::punct;
}

// Walks text emitting words and punctuation characters. An apostrophe
// between two word characters stays inside the word ("don't").
template <typename OnWord, typename OnPunct>
void scan(std::string_view text, OnWord on_word, OnPunct on_punct) {
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            on_word(lower(current));
            current.clear();
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const auto c = static_cast<unsigned char>(text[i]);
        switch (classify(c)) {
            case CharClass::word:
                current.push_back(static_cast<char>(c));
                break;
            case CharClass::space:
                flush();
                break;
            case CharClass::punct:
                if (c == '\'' && !current.empty() && i + 1 < text.size() &&
                    is_word_char(static_cast<unsigned char>(text[i + 1]))) {
                    current.push_back('\'');
                    break;
                }
                flush();
                on_punct();
                break;
        }
    }
    flush();
}

}  // namespace

Stoplist::Stoplist(const std::vector<std::string>& words) {
    for (const auto& w : words) {
        auto t = trim(w);
        if (t.empty()) continue;
        if (std::any_of(t.begin(), t.end(), [](unsigned char c) { return std::isspace(c); })) {
            throw InvalidArgument("stoplist entry contains whitespace: '" + std::string(t) + "'");
        }
        words_.insert(lower(t));
    }
}

Stoplist Stoplist::read(std::istream& in) {
    std::vector<std::string> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto t = trim(line);
        if (!t.empty()) entries.emplace_back(t);
    }
    return Stoplist(entries);
}

Stoplist Stoplist::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open stoplist " + path);
    return read(in);
}

const Stoplist& Stoplist::english() {
    static const Stoplist list(std::vector<std::string>{
        "a",       "about",  "above",   "after",   "again",  "against", "all",    "am",      "an",
        "and",     "any",    "are",     "as",      "at",     "be",      "because", "been",   "before",
        "being",   "below",  "between", "both",    "but",    "by",      "can",    "could",   "did",
        "do",      "does",   "doing",   "down",    "during", "each",    "few",    "for",     "from",
        "further", "had",    "has",     "have",    "having", "he",      "her",    "here",    "hers",
        "herself", "him",    "himself", "his",     "how",    "i",       "if",     "in",      "into",
        "is",      "it",     "its",     "itself",  "just",   "me",      "more",   "most",    "my",
        "myself",  "no",     "nor",     "not",     "now",    "of",      "off",    "on",      "once",
        "only",    "or",     "other",   "our",     "ours",   "ourselves", "out",  "over",    "own",
        "same",    "she",    "should",  "so",      "some",   "such",    "than",   "that",    "the",
        "their",   "theirs", "them",    "themselves", "then", "there",  "these",  "they",    "this",
        "those",   "through", "to",     "too",     "under",  "until",   "up",     "very",    "was",
        "we",      "were",   "what",    "when",    "where",  "which",   "while",  "who",     "whom",
        "why",     "will",   "with",    "would",   "you",    "your",    "yours",  "yourself", "yourselves",
    });
    return list;
}

std::vector<std::string> words(std::string_view text) {
    std::vector<std::string> out;
    scan(text, [&](std::string w) { out.push_back(std::move(w)); }, [] {});
    return out;
}

std::vector<Token> tokenize_and_filter(std::string_view text, const Stoplist& stoplist) {
    std::vector<Token> out;
    scan(
        text,
        [&](std::string w) { out.push_back(stoplist.contains(w) ? Token::stop() : Token::word(std::move(w))); },
        [&] { out.push_back(Token::stop()); });
    return out;
}

std::string ScoredPhrase::joined(char sep) const {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out.push_back(sep);
        out += words[i];
    }
    return out;
}

std::vector<ScoredPhrase> rake_extract(std::string_view text, const Stoplist& stoplist, const RakeOptions& options) {
    if (options.max_phrase_words == 0) throw InvalidArgument("max_phrase_words must be positive");

    std::vector<std::vector<std::string>> candidates;
    std::vector<std::string> run;
    auto close_run = [&] {
        for (std::size_t i = 0; i < run.size(); i += options.max_phrase_words) {
            const auto end = std::min(run.size(), i + options.max_phrase_words);
            candidates.emplace_back(run.begin() + static_cast<std::ptrdiff_t>(i),
                                    run.begin() + static_cast<std::ptrdiff_t>(end));
        }
        run.clear();
    };
    for (auto& tok : tokenize_and_filter(text, stoplist)) {
        if (tok.boundary) {
            close_run();
        } else {
            run.push_back(std::move(tok.text));
        }
    }
    close_run();

    // freq counts occurrences across all candidates; deg adds the length of
    // every candidate the word occurs in, which is freq plus co-occurrences.
    std::unordered_map<std::string, double> freq, deg;
    for (const auto& cand : candidates) {
        for (const auto& w : cand) {
            freq[w] += 1.0;
            deg[w] += static_cast<double>(cand.size());
        }
    }

    std::vector<ScoredPhrase> phrases;
    std::map<std::vector<std::string>, std::size_t> seen;
    for (const auto& cand : candidates) {
        if (seen.count(cand)) continue;
        seen.emplace(cand, phrases.size());
        double score = 0.0;
        for (const auto& w : cand) score += deg[w] / freq[w];
        phrases.push_back({cand, score});
    }
    std::stable_sort(phrases.begin(), phrases.end(),
                     [](const ScoredPhrase& a, const ScoredPhrase& b) { return a.score > b.score; });
    return phrases;
}

std::vector<std::string> phrases_to_terms(const std::vector<ScoredPhrase>& phrases, std::size_t top_n) {
    if (top_n == 0) throw InvalidArgument("top_n must be at least 1");
    std::vector<std::string> terms;
    const auto n = std::min(top_n, phrases.size());
    terms.reserve(n);
    for (std::size_t i = 0; i < n; ++i) terms.push_back(phrases[i].joined('_'));
    return terms;
}

corpus::Transaction phrases_to_tags(const std::vector<ScoredPhrase>& phrases, corpus::TagDictionary& dictionary,
                                    std::size_t top_n) {
    std::vector<corpus::TagId> ids;
    for (const auto& term : phrases_to_terms(phrases, top_n)) ids.push_back(dictionary.intern(term));
    return corpus::Transaction::from_unsorted(std::move(ids));
}

corpus::Tagger review_tagger(const Stoplist& stoplist, TaggerOptions options) {
    if (options.top_n == 0) throw InvalidArgument("top_n must be at least 1");
    return [stoplist, options](const corpus::Place& p) {
        return phrases_to_terms(rake_extract(p.review, stoplist, options.rake), options.top_n);
    };
}

SentimentLexicon::SentimentLexicon(std::set<std::string> positive, std::set<std::string> negative,
                                   std::set<std::string> negations)
    : positive_(std::move(positive)), negative_(std::move(negative)), negations_(std::move(negations)) {
    for (const auto& w : positive_) {
        if (negative_.count(w)) throw InvalidArgument("lexicon word '" + w + "' is both positive and negative");
    }
}

SentimentLexicon SentimentLexicon::read(std::istream& in) {
    std::set<std::string> pos, neg, negations;
    std::set<std::string>* section = nullptr;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto t = trim(line);
        if (t.empty()) continue;
        if (t == "[positive]") {
            section = &pos;
        } else if (t == "[negative]") {
            section = &neg;
        } else if (t == "[negation]") {
            section = &negations;
        } else if (t.front() == '[') {
            throw ParseError(lineno, "unknown lexicon section " + std::string(t));
        } else {
            if (!section) throw ParseError(lineno, "word outside of a section");
            section->insert(lower(t));
        }
    }
    return SentimentLexicon(std::move(pos), std::move(neg), std::move(negations));
}

SentimentLexicon SentimentLexicon::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open lexicon " + path);
    return read(in);
}

std::optional<corpus::Sentiment> lexicon_label(std::string_view text, const SentimentLexicon& lexicon) {
    const auto toks = words(text);
    int positive = 0;
    int negative = 0;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        int polarity = 0;
        if (lexicon.positive().count(toks[i])) {
            polarity = 1;
        } else if (lexicon.negative().count(toks[i])) {
            polarity = -1;
        } else {
            continue;
        }
        const std::size_t from = i >= kNegationWindow ? i - kNegationWindow : 0;
        for (std::size_t j = from; j < i; ++j) {
            if (lexicon.negations().count(toks[j])) {
                polarity = -polarity;
                break;
            }
        }
        (polarity > 0 ? positive : negative) += 1;
    }
    if (positive > negative) return corpus::Sentiment::positive;
    if (negative > positive) return corpus::Sentiment::negative;
    return std::nullopt;
}

std::size_t bootstrap_labels(std::vector<corpus::Place>& places, const SentimentLexicon& lexicon) {
    const std::size_t before = places.size();
    std::vector<corpus::Place> kept;
    kept.reserve(before);
    for (auto& p : places) {
        if (!p.sentiment) p.sentiment = lexicon_label(p.review, lexicon);
        if (p.sentiment) kept.push_back(std::move(p));
    }
    places = std::move(kept);
    return before - places.size();
}

}  // namespace routerec::textprep
