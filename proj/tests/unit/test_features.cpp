#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "persua/error.hpp"
#include "persua/features.hpp"
#include "persua/rng.hpp"

using namespace persua;

namespace {

PrepConfig bare() {
    PrepConfig cfg;
    cfg.remove_stopwords = false;
    return cfg;
}

// random printable strings with whitespace, punctuation, uppercase, digits
std::string random_text(Rng& rng, std::size_t len) {
    static const std::string pool =
        "abcXYZ 019 .,!?-_:;()[]'\"\t  the and https://x.io/a?b=1 ";
    std::string out;
    for (std::size_t i = 0; i < len; ++i)
        out += pool[static_cast<std::size_t>(rng.next_below(pool.size()))];
    return out;
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("normalize lowercases and strips punctuation") {
    CHECK(normalize("Vote NOW, America!", bare()) == "vote now america");
    CHECK(normalize("  spaced\t\tout  ", bare()) == "spaced out");
}

TEST_CASE("normalize strips urls and emoji when enabled") {
    PrepConfig cfg = bare();
    CHECK(normalize("read https://example.com/a?b=1 now", cfg) == "read now");
    CHECK(normalize("great \xF0\x9F\x98\x80 news", cfg) == "great news");

    cfg.strip_emoji_links = false;
    CHECK(normalize("read https://examplecom now", cfg) == "read https examplecom now");
}

TEST_CASE("normalize is idempotent") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const std::string text = random_text(rng, 1 + rng.next_below(80));
        const std::string once = normalize(text, bare());
        CHECK(normalize(once, bare()) == once);
    }
}

TEST_CASE("tokenize splits on whitespace and drops empties") {
    CHECK(tokenize("a b  c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(tokenize("  ") == std::vector<std::string>{});
    CHECK(tokenize("") == std::vector<std::string>{});
}

TEST_CASE("preprocess removes stopwords when enabled") {
    PrepConfig cfg;
    cfg.remove_stopwords = true;
    const auto tokens = preprocess("the quick fox and the dog", cfg);
    CHECK(tokens == std::vector<std::string>{"quick", "fox", "dog"});
}

TEST_CASE("custom stopword list replaces the builtin") {
    PrepConfig cfg;
    cfg.remove_stopwords = true;
    cfg.stopword_list = {"fox"};
    const auto tokens = preprocess("the quick fox", cfg);
    CHECK(tokens == std::vector<std::string>{"the", "quick"});
}

TEST_CASE("suffix stripping is off by default and crude when on") {
    PrepConfig cfg = bare();
    CHECK(preprocess("voters voting voted", cfg) ==
          std::vector<std::string>{"voters", "voting", "voted"});
    CHECK(strip_suffix("voters") == strip_suffix("voter"));
}

TEST_CASE("prep config json round trip") {
    PrepConfig cfg;
    cfg.lowercase = false;
    cfg.strip_suffixes = true;
    cfg.stopword_list = {"zzz", "aaa"};
    const PrepConfig back = PrepConfig::from_json(cfg.to_json());
    CHECK(back.lowercase == cfg.lowercase);
    CHECK(back.strip_punctuation == cfg.strip_punctuation);
    CHECK(back.strip_emoji_links == cfg.strip_emoji_links);
    CHECK(back.remove_stopwords == cfg.remove_stopwords);
    CHECK(back.strip_suffixes == cfg.strip_suffixes);
    CHECK(back.stopword_list == cfg.stopword_list);
}

TEST_CASE("canonical bigrams sort each pair") {
    const auto counts = canonical_bigrams({"b", "a", "b"});
    // pairs (b,a) and (a,b) both land on (a,b)
    REQUIRE(counts.size() == 1);
    const auto& [key, n] = *counts.begin();
    CHECK(key.first == "a");
    CHECK(key.second == "b");
    CHECK(n == 2);
}

TEST_CASE("canonical bigrams of short inputs are empty") {
    CHECK(canonical_bigrams({}).empty());
    CHECK(canonical_bigrams({"solo"}).empty());
}

TEST_CASE("bigram keys are always pair-sorted") {
    Rng rng(23);
    const std::vector<std::string> alphabet = {"aa", "bb", "cc", "dd", "ee"};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::string> tokens;
        const std::size_t n = rng.next_below(12);
        for (std::size_t i = 0; i < n; ++i)
            tokens.push_back(alphabet[static_cast<std::size_t>(rng.next_below(alphabet.size()))]);
        std::uint64_t total = 0;
        for (const auto& [key, count] : canonical_bigrams(tokens)) {
            CHECK(key.first <= key.second);
            total += count;
        }
        CHECK(total == (tokens.size() < 2 ? 0 : tokens.size() - 1));
    }
}

TEST_CASE("vocabulary is lexicographic with document frequencies") {
    const auto vocab = build_vocabulary({{"b", "a", "b"}, {"a", "c"}});
    CHECK(vocab.terms == std::vector<std::string>{"a", "b", "c"});
    CHECK(vocab.df == std::vector<std::uint32_t>{2, 1, 1});
    CHECK(vocab.n_docs == 2);
    CHECK(vocab.index.at("c") == 2);
}

TEST_CASE("min_df filters rare terms") {
    const auto vocab = build_vocabulary({{"a", "b"}, {"a", "c"}}, 2);
    CHECK(vocab.terms == std::vector<std::string>{"a"});
    CHECK(vocab.n_docs == 2);
}

TEST_CASE("vocabulary over no documents is an error") {
    CHECK_THROWS_AS(build_vocabulary({}), ValidationError);
}

TEST_CASE("vocabulary hash tracks content") {
    const auto a = build_vocabulary({{"a", "b"}, {"a"}});
    const auto b = build_vocabulary({{"a", "b"}, {"a"}});
    const auto c = build_vocabulary({{"a", "b"}, {"b"}});
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
}

TEST_CASE("idf variants") {
    const auto vocab = build_vocabulary({{"a", "b"}, {"a", "c"}});
    // smoothed: ln((1+N)/(1+df)) + 1
    CHECK(idf(vocab, 0, IdfVariant::smoothed) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(idf(vocab, 1, IdfVariant::smoothed) ==
          doctest::Approx(std::log(1.5) + 1.0).epsilon(1e-12));
    // raw: ln(N/df)
    CHECK(idf(vocab, 0, IdfVariant::raw) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(idf(vocab, 1, IdfVariant::raw) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("tfidf counts oov tokens in the document length") {
    const auto vocab = build_vocabulary({{"a", "b"}, {"a", "c"}});
    const auto fv = tfidf({"a", "b", "x"}, vocab);  // x is oov
    REQUIRE(fv.entries.size() == 2);
    CHECK(fv.dim == 3);
    CHECK(fv.entries[0].first == 0);
    CHECK(fv.entries[0].second == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(fv.entries[1].first == 1);
    CHECK(fv.entries[1].second ==
          doctest::Approx((1.0 / 3.0) * (std::log(1.5) + 1.0)).epsilon(1e-12));
}

TEST_CASE("tfidf of an empty or fully-oov document is a zero vector") {
    const auto vocab = build_vocabulary({{"a"}});
    CHECK(tfidf({}, vocab).entries.empty());
    CHECK(tfidf({"zz", "yy"}, vocab).entries.empty());
}

TEST_CASE("tfidf entries have strictly increasing indices") {
    Rng rng(5);
    const auto vocab = build_vocabulary({{"a", "b", "c", "d", "e"}});
    const std::vector<std::string> pool = {"a", "b", "c", "d", "e", "oov"};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::string> doc;
        const std::size_t n = 1 + rng.next_below(10);
        for (std::size_t i = 0; i < n; ++i)
            doc.push_back(pool[static_cast<std::size_t>(rng.next_below(pool.size()))]);
        const auto fv = tfidf(doc, vocab);
        for (std::size_t i = 1; i < fv.entries.size(); ++i)
            CHECK(fv.entries[i - 1].first < fv.entries[i].first);
    }
}

TEST_CASE("average tfidf ranks terms and breaks ties lexicographically") {
    // "b" appears in both docs, "a" and "c" in one each with equal weight
    const std::vector<std::vector<std::string>> docs = {{"a", "b"}, {"c", "b"}};
    const auto vocab = build_vocabulary(docs);
    const auto top = average_tfidf(docs, vocab, 3);
    REQUIRE(top.size() == 3);
    CHECK(top[0].first == "b");
    CHECK(top[1].first == "a");  // ties with c, lexicographic order
    CHECK(top[2].first == "c");
    CHECK(top[1].second == doctest::Approx(top[2].second).epsilon(1e-12));
}

TEST_CASE("average tfidf honors k") {
    const std::vector<std::vector<std::string>> docs = {{"a", "b", "c"}};
    const auto vocab = build_vocabulary(docs);
    CHECK(average_tfidf(docs, vocab, 2).size() == 2);
    CHECK(average_tfidf(docs, vocab, 10).size() == 3);
}

}  // TEST_SUITE
