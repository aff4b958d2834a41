#include "persua/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "persua/error.hpp"

namespace persua {

namespace {

// ---- UTF-8 <-> code points ------------------------------------------------

std::vector<std::uint32_t> decode_utf8(const std::string& s) {
    std::vector<std::uint32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const unsigned char c = static_cast<unsigned char>(s[i]);
        std::uint32_t cp = 0;
        std::size_t len = 1;
        if (c < 0x80) {
            cp = c;
        } else if ((c >> 5) == 0x6) {
            cp = c & 0x1F;
            len = 2;
        } else if ((c >> 4) == 0xE) {
            cp = c & 0x0F;
            len = 3;
        } else if ((c >> 3) == 0x1E) {
            cp = c & 0x07;
            len = 4;
        } else {
            throw ParseError("invalid UTF-8 byte in text");
        }
        if (i + len > s.size()) throw ParseError("truncated UTF-8 sequence");
        for (std::size_t k = 1; k < len; ++k) {
            const unsigned char cc = static_cast<unsigned char>(s[i + k]);
            if ((cc >> 6) != 0x2) throw ParseError("invalid UTF-8 continuation byte");
            cp = (cp << 6) | (cc & 0x3F);
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

void encode_utf8(std::uint32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode_utf8(const std::vector<std::uint32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (auto cp : cps) encode_utf8(cp, out);
    return out;
}

// ---- character classes (pinned in docs/FORMATS.md) -------------------------

bool is_whitespace(std::uint32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_emoji(std::uint32_t cp) {
    if (cp == 0x200D || cp == 0x20E3) return true;  // ZWJ, keycap combiner
    if (cp >= 0xFE00 && cp <= 0xFE0F) return true;  // variation selectors
    if (cp >= 0x2600 && cp <= 0x27BF) return true;  // misc symbols, dingbats
    if (cp >= 0x2B00 && cp <= 0x2BFF) return true;  // misc symbols and arrows
    if (cp >= 0x1F000 && cp <= 0x1FAFF) return true;  // emoji planes
    return false;
}

// Apostrophes are deleted without a space so contractions stay one token.
bool is_apostrophe(std::uint32_t cp) { return cp == 0x27 || cp == 0x2019; }

bool is_punctuation(std::uint32_t cp) {
    if (cp < 0x80) {
        const char c = static_cast<char>(cp);
        static const std::string ascii_punct = "!\"#$%&()*+,-./:;<=>?@[\\]^_`{|}~";
        return ascii_punct.find(c) != std::string::npos;
    }
    switch (cp) {
        case 0xAB: case 0xBB:              // guillemets
        case 0x2013: case 0x2014:          // en/em dash
        case 0x2018: case 0x201C: case 0x201D:
        case 0x2026:                       // ellipsis
        case 0xA1: case 0xBF:              // inverted ! ?
            return true;
        default:
            return false;
    }
}

bool ascii_ieq_prefix(const std::vector<std::uint32_t>& cps, std::size_t start,
                      std::size_t end, const char* prefix) {
    std::size_t i = start;
    for (const char* p = prefix; *p; ++p, ++i) {
        if (i >= end) return false;
        std::uint32_t cp = cps[i];
        if (cp >= 'A' && cp <= 'Z') cp += 32;
        if (cp != static_cast<std::uint32_t>(*p)) return false;
    }
    return true;
}

bool is_link_token(const std::vector<std::uint32_t>& cps, std::size_t start,
                   std::size_t end) {
    return ascii_ieq_prefix(cps, start, end, "http://") ||
           ascii_ieq_prefix(cps, start, end, "https://") ||
           ascii_ieq_prefix(cps, start, end, "www.");
}

}  // namespace

std::string normalize(const std::string& text, const PrepConfig& cfg) {
    std::vector<std::uint32_t> cps = decode_utf8(text);

    if (cfg.strip_emoji_links) {
        // Links first: drop maximal non-whitespace runs matching the URL pattern.
        std::vector<std::uint32_t> kept;
        kept.reserve(cps.size());
        std::size_t i = 0;
        while (i < cps.size()) {
            if (is_whitespace(cps[i])) {
                kept.push_back(cps[i]);
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < cps.size() && !is_whitespace(cps[j])) ++j;
            if (!is_link_token(cps, i, j))
                kept.insert(kept.end(), cps.begin() + i, cps.begin() + j);
            i = j;
        }
        cps = std::move(kept);
        std::erase_if(cps, [](std::uint32_t cp) { return is_emoji(cp); });
    }

    if (cfg.strip_punctuation) {
        std::vector<std::uint32_t> out;
        out.reserve(cps.size());
        for (auto cp : cps) {
            if (is_apostrophe(cp)) continue;
            if (is_punctuation(cp))
                out.push_back(' ');
            else
                out.push_back(cp);
        }
        cps = std::move(out);
    }

    if (cfg.lowercase) {
        for (auto& cp : cps)
            if (cp >= 'A' && cp <= 'Z') cp += 32;
    }

    // Whitespace collapse always runs last.
    std::vector<std::uint32_t> out;
    out.reserve(cps.size());
    bool in_ws = true;  // also trims leading whitespace
    for (auto cp : cps) {
        if (is_whitespace(cp)) {
            if (!in_ws) out.push_back(' ');
            in_ws = true;
        } else {
            out.push_back(cp);
            in_ws = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return encode_utf8(out);
}

std::vector<std::string> tokenize(const std::string& text) {
    const std::vector<std::uint32_t> cps = decode_utf8(text);
    std::vector<std::string> tokens;
    std::vector<std::uint32_t> current;
    for (auto cp : cps) {
        if (is_whitespace(cp)) {
            if (!current.empty()) {
                tokens.push_back(encode_utf8(current));
                current.clear();
            }
        } else {
            current.push_back(cp);
        }
    }
    if (!current.empty()) tokens.push_back(encode_utf8(current));
    return tokens;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const std::set<std::string>& stopwords) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens)
        if (!stopwords.count(t)) out.push_back(t);
    return out;
}

namespace {

bool ends_with(const std::string& s, const char* suffix) {
    const std::size_t n = std::string(suffix).size();
    return s.size() >= n && s.compare(s.size() - n, n, suffix) == 0;
}

bool undoublable(char c) {
    static const std::string set = "bdfgmnprt";
    return set.find(c) != std::string::npos;
}

std::string undouble(std::string stem) {
    const std::size_t n = stem.size();
    if (n >= 2 && stem[n - 1] == stem[n - 2] && undoublable(stem[n - 1]))
        stem.pop_back();
    return stem;
}

const std::set<std::string>& stripper_exceptions() {
    static const std::set<std::string> ex = {
        "news",     "morning",  "evening",    "nothing", "something",
        "anything", "everything", "indeed",   "hundred", "speed",
        "agreed",   "series",   "species",
    };
    return ex;
}

}  // namespace

std::string strip_suffix(const std::string& word) {
    if (word.size() <= 3 || stripper_exceptions().count(word)) return word;
    if (ends_with(word, "ies") && word.size() >= 5)
        return word.substr(0, word.size() - 3) + "y";
    if (ends_with(word, "sses")) return word.substr(0, word.size() - 2);
    if (ends_with(word, "ches") || ends_with(word, "shes") || ends_with(word, "xes") ||
        ends_with(word, "zes"))
        return word.substr(0, word.size() - 2);
    if (word.back() == 's' && !ends_with(word, "ss") && !ends_with(word, "us") &&
        !ends_with(word, "is"))
        return word.substr(0, word.size() - 1);
    if (ends_with(word, "ing") && word.size() >= 7)
        return undouble(word.substr(0, word.size() - 3));
    if (ends_with(word, "ed") && word.size() >= 5)
        return undouble(word.substr(0, word.size() - 2));
    return word;
}

std::vector<std::string> preprocess(const std::string& text, const PrepConfig& cfg) {
    std::vector<std::string> tokens = tokenize(normalize(text, cfg));
    if (cfg.remove_stopwords) tokens = remove_stopwords(tokens, cfg.effective_stopwords());
    if (cfg.strip_suffixes)
        for (auto& t : tokens) t = strip_suffix(t);
    return tokens;
}

const std::set<std::string>& PrepConfig::effective_stopwords() const {
    return stopword_list.empty() ? builtin_stopwords() : stopword_list;
}

std::string PrepConfig::to_json() const {
    nlohmann::json j;
    j["lowercase"] = lowercase;
    j["strip_punctuation"] = strip_punctuation;
    j["strip_emoji_links"] = strip_emoji_links;
    j["remove_stopwords"] = remove_stopwords;
    j["strip_suffixes"] = strip_suffixes;
    j["stopword_list"] = stopword_list;  // empty array = built-in list
    return j.dump();
}

PrepConfig PrepConfig::from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("bad preprocessing config: ") + e.what());
    }
    PrepConfig cfg;
    cfg.lowercase = j.value("lowercase", cfg.lowercase);
    cfg.strip_punctuation = j.value("strip_punctuation", cfg.strip_punctuation);
    cfg.strip_emoji_links = j.value("strip_emoji_links", cfg.strip_emoji_links);
    cfg.remove_stopwords = j.value("remove_stopwords", cfg.remove_stopwords);
    cfg.strip_suffixes = j.value("strip_suffixes", cfg.strip_suffixes);
    if (j.contains("stopword_list"))
        cfg.stopword_list = j["stopword_list"].get<std::set<std::string>>();
    return cfg;
}

std::set<std::string> load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open stopword file: " + path);
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        out.insert(line);
    }
    return out;
}

std::map<Bigram, std::uint64_t> canonical_bigrams(const std::vector<std::string>& tokens) {
    std::map<Bigram, std::uint64_t> counts;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        Bigram key(tokens[i], tokens[i + 1]);
        if (key.second < key.first) std::swap(key.first, key.second);
        ++counts[key];
    }
    return counts;
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& docs,
                            std::uint32_t min_df) {
    if (docs.empty()) throw ValidationError("build_vocabulary: no documents");
    std::map<std::string, std::uint32_t> df_map;  // ordered: indices come out lexicographic
    std::set<std::string> seen;
    for (const auto& doc : docs) {
        seen.clear();
        for (const auto& t : doc) seen.insert(t);
        for (const auto& t : seen) ++df_map[t];
    }
    Vocabulary vocab;
    vocab.n_docs = docs.size();
    for (const auto& [term, df] : df_map) {
        if (df < min_df) continue;
        vocab.index.emplace(term, static_cast<std::uint32_t>(vocab.terms.size()));
        vocab.terms.push_back(term);
        vocab.df.push_back(df);
    }
    return vocab;
}

std::uint64_t Vocabulary::hash() const {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&h](const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    };
    for (std::size_t i = 0; i < terms.size(); ++i) {
        mix(terms[i].data(), terms[i].size());
        mix(":", 1);
        mix(&df[i], sizeof df[i]);
        mix(";", 1);
    }
    const std::uint64_t n = n_docs;
    mix(&n, sizeof n);
    return h;
}

double idf(const Vocabulary& vocab, std::uint32_t term_index, IdfVariant variant) {
    const double n = static_cast<double>(vocab.n_docs);
    const double d = static_cast<double>(vocab.df.at(term_index));
    if (variant == IdfVariant::raw) return std::log(n / d);
    return std::log((1.0 + n) / (1.0 + d)) + 1.0;
}

FeatureVector tfidf(const std::vector<std::string>& doc, const Vocabulary& vocab,
                    IdfVariant variant) {
    FeatureVector vec;
    vec.dim = vocab.size();
    if (doc.empty()) return vec;
    std::map<std::uint32_t, std::uint64_t> counts;  // ordered: indices strictly increasing
    for (const auto& t : doc) {
        auto it = vocab.index.find(t);
        if (it != vocab.index.end()) ++counts[it->second];
    }
    const double doc_len = static_cast<double>(doc.size());
    vec.entries.reserve(counts.size());
    for (const auto& [index, count] : counts) {
        const double w = (static_cast<double>(count) / doc_len) * idf(vocab, index, variant);
        if (w != 0.0) vec.entries.emplace_back(index, w);
    }
    return vec;
}

std::vector<std::pair<std::string, double>> average_tfidf(
    const std::vector<std::vector<std::string>>& docs, const Vocabulary& vocab,
    std::size_t k, IdfVariant variant) {
    if (k < 1) throw ValidationError("average_tfidf: k must be >= 1");
    std::vector<double> sums(vocab.size(), 0.0);
    for (const auto& doc : docs) {
        const FeatureVector vec = tfidf(doc, vocab, variant);
        for (const auto& [index, w] : vec.entries) sums[index] += w;
    }
    const double n = docs.empty() ? 1.0 : static_cast<double>(docs.size());
    std::vector<std::pair<std::string, double>> ranked;
    ranked.reserve(vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        if (sums[i] == 0.0) continue;  // term absent from every doc
        ranked.emplace_back(vocab.terms[i], sums[i] / n);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

}  // namespace persua
