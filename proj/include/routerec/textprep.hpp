#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "routerec/corpus.hpp"

namespace routerec::textprep {

class Stoplist {
public:
    Stoplist() = default;
    // Entries are lowercased; entries containing whitespace are rejected.
    explicit Stoplist(const std::vector<std::string>& words);

    bool contains(std::string_view word) const { return words_.count(std::string(word)) > 0; }
    std::size_t size() const { return words_.size(); }
    const std::set<std::string>& words() const { return words_; }

    // One word per line, '#' starts a comment.
    static Stoplist read(std::istream& in);
    static Stoplist from_file(const std::string& path);
    // Built-in English list; the same words ship as data/stoplist_en.txt.
    static const Stoplist& english();

private:
    std::set<std::string> words_;
};

// A lowercased word, or a phrase boundary (punctuation or a stopword).
struct Token {
    std::string text;
    bool boundary = false;

    static Token word(std::string w) { return {std::move(w), false}; }
    static Token stop() { return {{}, true}; }
    bool operator==(const Token&) const = default;
};

// Plain lowercased words with no stopword or punctuation handling. Letters,
// digits, apostrophes inside words and non-ASCII bytes form words.
std::vector<std::string> words(std::string_view text);

// Lowercased word tokens; every punctuation character and every stoplist
// member becomes a boundary marker.
std::vector<Token> tokenize_and_filter(std::string_view text, const Stoplist& stoplist);

struct ScoredPhrase {
    std::vector<std::string> words;
    double score = 0.0;

    std::string joined(char sep = ' ') const;
};

struct RakeOptions {
    // Longer content runs are split into consecutive chunks of this length.
    std::size_t max_phrase_words = 4;
};

// RAKE keyword extraction: candidates are maximal runs of content words,
// word score is deg(w)/freq(w), phrase score is the sum over its words.
// Distinct phrases are returned by descending score, ties in order of first
// occurrence.
std::vector<ScoredPhrase> rake_extract(std::string_view text, const Stoplist& stoplist,
                                       const RakeOptions& options = {});

// Joins the top_n phrases with '_' into tag terms.
std::vector<std::string> phrases_to_terms(const std::vector<ScoredPhrase>& phrases, std::size_t top_n);

// Interns the top_n phrase terms and returns them as a transaction.
corpus::Transaction phrases_to_tags(const std::vector<ScoredPhrase>& phrases, corpus::TagDictionary& dictionary,
                                    std::size_t top_n);

struct TaggerOptions {
    std::size_t top_n = 10;
    RakeOptions rake;
};

// Tagger over a place's review text, for corpus::build_database.
corpus::Tagger review_tagger(const Stoplist& stoplist, TaggerOptions options = {});

class SentimentLexicon {
public:
    SentimentLexicon() = default;
    // Throws InvalidArgument if positive and negative overlap.
    SentimentLexicon(std::set<std::string> positive, std::set<std::string> negative,
                     std::set<std::string> negations);

    const std::set<std::string>& positive() const { return positive_; }
    const std::set<std::string>& negative() const { return negative_; }
    const std::set<std::string>& negations() const { return negations_; }

    // Sections [positive], [negative], [negation], one word per line.
    static SentimentLexicon read(std::istream& in);
    static SentimentLexicon from_file(const std::string& path);

private:
    std::set<std::string> positive_;
    std::set<std::string> negative_;
    std::set<std::string> negations_;
};

inline constexpr std::size_t kNegationWindow = 2;

// Counts lexicon hits; a negation among the two preceding words flips a hit.
// Returns nullopt when positive and negative counts tie.
std::optional<corpus::Sentiment> lexicon_label(std::string_view text, const SentimentLexicon& lexicon);

// Labels every place without a sentiment from its review via lexicon_label
// and removes the undecided ones. Stored labels are kept. Returns the number
// of places removed.
std::size_t bootstrap_labels(std::vector<corpus::Place>& places, const SentimentLexicon& lexicon);

}  // namespace routerec::textprep
