#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "persua/corpus.hpp"
#include "persua/error.hpp"
#include "persua/rng.hpp"

namespace persua {

namespace {

// Disjoint syllable pools keep marker tokens and filler tokens from ever
// colliding, so label signal lives entirely in the markers.
const char* kMarkerSyllables[10] = {"vo", "ta", "re", "mi", "lo",
                                    "ka", "su", "ne", "pi", "da"};
const char* kFillerSyllables[10] = {"ben", "dor", "fal", "gim", "hul",
                                    "jen", "kop", "lum", "nar", "pex"};
constexpr std::size_t kMarkersPerLabel = 4;
constexpr std::size_t kFillerCount = 40;

std::string filler_token(std::size_t i) {
    i %= kFillerCount;
    return std::string(kFillerSyllables[i / 10]) + kFillerSyllables[i % 10];
}

std::vector<std::string> sentence_tokens(Rng& rng, const std::vector<double>& priors,
                                         std::vector<std::uint32_t>& labels_out) {
    std::vector<std::string> tokens;
    const std::size_t n_fillers = 5 + rng.next_below(6);
    for (std::size_t i = 0; i < n_fillers; ++i)
        tokens.push_back(filler_token(rng.next_below(kFillerCount)));

    labels_out.clear();
    for (std::uint32_t k = 0; k < priors.size(); ++k) {
        if (!rng.bernoulli(priors[k])) continue;
        labels_out.push_back(k);
        const auto markers = synthetic_marker_tokens(k);
        const std::size_t n_markers = 1 + rng.next_below(3);
        for (std::size_t j = 0; j < n_markers; ++j) {
            const std::string& tok = markers[rng.next_below(markers.size())];
            const std::size_t pos = rng.next_below(tokens.size() + 1);
            tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(pos), tok);
        }
    }
    return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string text;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) text += ' ';
        text += tokens[i];
    }
    return text;
}

}  // namespace

std::vector<std::string> synthetic_marker_tokens(std::uint32_t label) {
    if (label >= 100) throw ValidationError("synthetic generator supports at most 100 labels");
    std::vector<std::string> out;
    const std::string stem =
        std::string(kMarkerSyllables[label / 10]) + kMarkerSyllables[label % 10];
    for (std::size_t j = 0; j < kMarkersPerLabel; ++j)
        out.push_back(stem + kMarkerSyllables[j]);
    return out;
}

std::vector<LabeledSentence> generate_synthetic(std::size_t n_docs,
                                                std::size_t sentences_per_doc,
                                                const std::vector<double>& label_priors,
                                                std::uint64_t seed) {
    if (n_docs == 0 || sentences_per_doc == 0)
        throw ValidationError("synthetic corpus needs at least one document and sentence");
    if (label_priors.empty())
        throw ValidationError("synthetic corpus needs at least one label prior");
    if (label_priors.size() > 100)
        throw ValidationError("synthetic generator supports at most 100 labels");
    for (double p : label_priors)
        if (!(p >= 0.0 && p <= 1.0))
            throw ValidationError("label priors must lie in [0, 1]");

    Rng rng(seed);
    std::vector<LabeledSentence> out;
    out.reserve(n_docs * sentences_per_doc);
    for (std::size_t d = 0; d < n_docs; ++d) {
        for (std::size_t s = 0; s < sentences_per_doc; ++s) {
            LabeledSentence sent;
            sent.doc_id = "synth-" + std::to_string(d);
            sent.sentence_id = static_cast<std::uint32_t>(s);
            const auto tokens = sentence_tokens(rng, label_priors, sent.labels);
            sent.text = join_tokens(tokens);
            out.push_back(std::move(sent));
        }
    }
    return out;
}

namespace {

const char* kHighFunders[4] = {"Forward Momentum PAC", "Victory Coalition Fund",
                               "Citizens for Action", "Progress Push Committee"};
const char* kLowFunders[4] = {"Civic Information League", "Voter Facts Project",
                              "Community Notice Board", "Public Record Group"};
const char* kMidFunders[4] = {"Statewide Outreach Fund", "Neighbors United",
                              "Open Ballot Society", "Common Ground Alliance"};

enum class AdStyle { high, low, mid };

std::string ad_sentence(Rng& rng, std::size_t n_labels, bool persuasive) {
    std::vector<std::string> tokens;
    const std::size_t n_fillers = 5 + rng.next_below(6);
    for (std::size_t i = 0; i < n_fillers; ++i)
        tokens.push_back(filler_token(rng.next_below(kFillerCount)));
    if (persuasive) {
        const auto k = static_cast<std::uint32_t>(rng.next_below(n_labels));
        const auto markers = synthetic_marker_tokens(k);
        const std::size_t n_markers = 1 + rng.next_below(3);
        for (std::size_t j = 0; j < n_markers; ++j) {
            const std::string& tok = markers[rng.next_below(markers.size())];
            const std::size_t pos = rng.next_below(tokens.size() + 1);
            tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(pos), tok);
        }
    }
    return join_tokens(tokens);
}

}  // namespace

std::vector<AdRecord> generate_synthetic_ads(const SyntheticAdsConfig& cfg,
                                             std::uint64_t seed) {
    if (cfg.n_ads == 0) throw ValidationError("synthetic ad corpus needs at least one ad");
    if (cfg.n_labels == 0 || cfg.n_labels > 100)
        throw ValidationError("synthetic ad corpus needs between 1 and 100 labels");
    if (cfg.window_start > cfg.window_end)
        throw ValidationError("synthetic ad window end precedes start");
    if (cfg.high_fraction < 0 || cfg.low_fraction < 0 ||
        cfg.high_fraction + cfg.low_fraction > 1.0)
        throw ValidationError("high/low fractions must be nonnegative and sum to <= 1");

    Rng rng(seed);
    const std::int64_t window_days =
        days_between(cfg.window_start, cfg.window_end) + 1;

    std::vector<AdRecord> out;
    out.reserve(cfg.n_ads);
    for (std::size_t i = 0; i < cfg.n_ads; ++i) {
        const double u = rng.next_unit();
        const AdStyle style = u < cfg.high_fraction ? AdStyle::high
                              : u < cfg.high_fraction + cfg.low_fraction ? AdStyle::low
                                                                         : AdStyle::mid;
        AdRecord ad;
        char idbuf[16];
        std::snprintf(idbuf, sizeof idbuf, "ad-%05zu", i);
        ad.ad_id = idbuf;

        const std::size_t n_sentences = 2 + rng.next_below(5);
        const double p_persuasive = style == AdStyle::high ? 0.9
                                    : style == AdStyle::low ? 0.07
                                                            : 0.5;
        std::string text;
        for (std::size_t s = 0; s < n_sentences; ++s) {
            if (s) text += ' ';
            text += ad_sentence(rng, cfg.n_labels, rng.bernoulli(p_persuasive));
            text += '.';
        }
        ad.text = std::move(text);

        switch (style) {
            case AdStyle::high:
                ad.funder = kHighFunders[rng.next_below(4)];
                break;
            case AdStyle::low:
                ad.funder = kLowFunders[rng.next_below(4)];
                break;
            case AdStyle::mid:
                ad.funder = kMidFunders[rng.next_below(4)];
                break;
        }

        const std::int64_t offset =
            static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(window_days)));
        ad.start_date = cfg.window_start.plus_days(offset);
        const std::int64_t duration = 1 + static_cast<std::int64_t>(rng.next_below(14));
        ad.end_date = ad.start_date.plus_days(duration - 1);
        if (ad.end_date > cfg.window_end) ad.end_date = cfg.window_end;
        ad.created = ad.start_date;

        // High-persuasion campaigns ramp up toward the window end; the trend
        // detector should find an increasing series on the synthetic bundle.
        const double pos = window_days > 1
                               ? static_cast<double>(offset) / static_cast<double>(window_days - 1)
                               : 0.0;
        double spend_mid = 0.0;
        double impr_mid = 0.0;
        switch (style) {
            case AdStyle::high:
                spend_mid = 260.0 + 420.0 * pos + 60.0 * rng.next_unit();
                impr_mid = 18000.0 + 16000.0 * pos + 2500.0 * rng.next_unit();
                break;
            case AdStyle::low:
                spend_mid = 120.0 + 50.0 * rng.next_unit();
                impr_mid = 9000.0 + 2000.0 * rng.next_unit();
                break;
            case AdStyle::mid:
                spend_mid = 180.0 + 80.0 * rng.next_unit();
                impr_mid = 13000.0 + 2500.0 * rng.next_unit();
                break;
        }
        ad.spend_lo = std::floor(spend_mid / 100.0) * 100.0;
        ad.spend_hi = ad.spend_lo + 99.0;
        ad.impressions_lo = static_cast<std::int64_t>(std::floor(impr_mid / 1000.0)) * 1000;
        ad.impressions_hi = ad.impressions_lo + 999;

        double first = 0.3 + 0.4 * rng.next_unit();
        first = std::round(first * 1e4) / 1e4;
        ad.demographics = {{"25-34", "female", first}, {"35-44", "male", 1.0 - first}};

        validate(ad);
        out.push_back(std::move(ad));
    }
    return out;
}

}  // namespace persua
