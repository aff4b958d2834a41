#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace persua {

// Text preprocessing switches. Two runs with equal config and input produce
// identical token streams. The exact character sets (punctuation, emoji
// blocks, URL pattern, whitespace) are pinned in docs/FORMATS.md.
struct PrepConfig {
    bool lowercase = true;
    bool strip_punctuation = true;
    bool strip_emoji_links = true;
    bool remove_stopwords = true;
    bool strip_suffixes = false;  // crude rule-based normalizer, not a lemmatizer
    std::set<std::string> stopword_list;  // empty = use the built-in list

    const std::set<std::string>& effective_stopwords() const;

    std::string to_json() const;
    static PrepConfig from_json(const std::string& json_text);
};

// Fixed transform order: links -> emoji -> punctuation -> lowercase ->
// whitespace collapse. Disabled steps are skipped, order never changes.
std::string normalize(const std::string& text, const PrepConfig& cfg);

// Splits on Unicode whitespace, drops empty tokens, preserves order.
std::vector<std::string> tokenize(const std::string& text);

// Full pipeline: normalize, tokenize, then stopword removal and suffix
// stripping when enabled.
std::vector<std::string> preprocess(const std::string& text, const PrepConfig& cfg);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const std::set<std::string>& stopwords);

// Plural/-ing/-ed stripper with a short exception list; see docs/FORMATS.md.
std::string strip_suffix(const std::string& word);

// Versioned built-in English stopword list (lowercase).
const std::set<std::string>& builtin_stopwords();

// Loads a stopword file: one lowercase token per line, '#' comments allowed.
std::set<std::string> load_stopwords(const std::string& path);

using Bigram = std::pair<std::string, std::string>;

// Adjacent token pairs, each pair sorted lexicographically before counting so
// (a,b) and (b,a) land on the same key.
std::map<Bigram, std::uint64_t> canonical_bigrams(const std::vector<std::string>& tokens);

struct Vocabulary {
    std::vector<std::string> terms;                      // index -> term, lexicographic
    std::unordered_map<std::string, std::uint32_t> index;  // term -> index
    std::vector<std::uint32_t> df;                       // index -> document frequency
    std::size_t n_docs = 0;

    std::size_t size() const noexcept { return terms.size(); }

    // FNV-1a over terms, df counts, and n_docs; recorded in model files so a
    // model is never applied against the wrong vocabulary.
    std::uint64_t hash() const;
};

// Terms with df >= min_df, indices in lexicographic term order.
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& docs,
                            std::uint32_t min_df = 1);

enum class IdfVariant {
    // ln((1 + N) / (1 + df)) + 1; no term gets idf 0, single-doc corpora stay
    // informative. The default everywhere.
    smoothed,
    // ln(N / df); classic variant, config-gated, never silently swapped in.
    raw,
};

double idf(const Vocabulary& vocab, std::uint32_t term_index,
           IdfVariant variant = IdfVariant::smoothed);

// Sparse feature vector: strictly increasing indices, finite weights, no
// explicit zeros. dim tracks the owning vocabulary size.
struct FeatureVector {
    std::vector<std::pair<std::uint32_t, double>> entries;
    std::size_t dim = 0;
};

// weight(t) = tf(t, d) * idf(t) with tf = count(t, d) / |d|, where |d| counts
// every token of the document including out-of-vocabulary ones. OOV tokens
// produce no entries; an empty doc yields a zero vector.
FeatureVector tfidf(const std::vector<std::string>& doc, const Vocabulary& vocab,
                    IdfVariant variant = IdfVariant::smoothed);

// Per-term mean tfidf weight over ALL docs (zero where the term is absent),
// sorted descending, ties broken lexicographically; top k terms.
std::vector<std::pair<std::string, double>> average_tfidf(
    const std::vector<std::vector<std::string>>& docs, const Vocabulary& vocab,
    std::size_t k, IdfVariant variant = IdfVariant::smoothed);

}  // namespace persua
