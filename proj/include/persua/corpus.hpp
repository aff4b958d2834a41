#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "persua/date.hpp"

namespace persua {

// Dense, stable label-id assignment: array index in the schema file is the id.
struct LabelSchema {
    std::vector<std::string> names;
    std::unordered_map<std::string, std::uint32_t> index;

    std::size_t size() const noexcept { return names.size(); }

    static LabelSchema from_names(std::vector<std::string> names);
    static LabelSchema load(const std::string& path);  // JSON array of strings
    void save(const std::string& path) const;

    // The 23-technique schema used for multi-label runs.
    static const LabelSchema& techniques23();
    // Single-label schema {"persuasive"} used for the binary task.
    static const LabelSchema& binary();

    // FNV-1a over the names; identifies the schema in model files.
    std::uint64_t id_hash() const;
};

enum class BinaryLabel : std::uint8_t { neutral = 0, persuasive = 1 };

const char* to_string(BinaryLabel b);
BinaryLabel binary_label_from_string(const std::string& s);

struct LabeledSentence {
    std::string doc_id;
    std::uint32_t sentence_id = 0;
    std::string text;
    std::vector<std::uint32_t> labels;  // sorted, unique, each < schema size
    std::optional<BinaryLabel> binary;

    bool operator==(const LabeledSentence&) const = default;
};

struct Demographic {
    std::string age_bucket;
    std::string gender;
    double fraction = 0.0;  // in [0,1]; non-empty lists sum to 1 within 1e-6

    bool operator==(const Demographic&) const = default;
};

// One political ad as the ad library reports it: spend and impressions are
// ranges, not point values.
struct AdRecord {
    std::string ad_id;
    std::string text;
    std::string funder;
    Date created;
    Date start_date;
    Date end_date;
    double spend_lo = 0.0;
    double spend_hi = 0.0;
    std::int64_t impressions_lo = 0;
    std::int64_t impressions_hi = 0;
    std::vector<Demographic> demographics;

    double spend_mid() const { return (spend_lo + spend_hi) / 2.0; }
    double impressions_mid() const {
        return (static_cast<double>(impressions_lo) + static_cast<double>(impressions_hi)) / 2.0;
    }
    // Inclusive day count: an ad running May 1 - May 11 lasts 11 days.
    std::int64_t duration_days() const {
        return days_between(start_date, end_date) + 1;
    }

    bool operator==(const AdRecord&) const = default;
};

struct DatasetSplit {
    std::vector<LabeledSentence> train;
    std::vector<LabeledSentence> test;
    std::uint64_t seed = 0;
};

// ---- ingestion --------------------------------------------------------------

// JSONL loader; schema violations and duplicate (doc_id, sentence_id) pairs
// are reported with the offending line number.
std::vector<LabeledSentence> load_sentences(const std::string& path,
                                            const LabelSchema& schema);
void save_sentences(const std::string& path, const std::vector<LabeledSentence>& sentences,
                    const LabelSchema& schema);

// CSV loader for the ad corpus (header pinned in docs/FORMATS.md).
std::vector<AdRecord> load_ads(const std::string& path);
void save_ads(const std::string& path, const std::vector<AdRecord>& ads);

void validate(const AdRecord& ad);

// ---- derivation -------------------------------------------------------------

// binary = persuasive iff the sentence carries any technique label or was
// already marked persuasive; neutral otherwise. Technique labels untouched.
LabeledSentence binarize(const LabeledSentence& s);
std::vector<LabeledSentence> binarize(const std::vector<LabeledSentence>& corpus);

// Stratified by binary label. Per-class test counts round half-up, then the
// largest class absorbs the difference so the global test size is exactly
// round-half-up(fraction * n). Deterministic under (corpus, fraction, seed).
DatasetSplit stratified_split(const std::vector<LabeledSentence>& corpus,
                              double test_fraction, std::uint64_t seed);

// Total technique annotations divided by number of distinct doc_ids.
double avg_techniques_per_doc(const std::vector<LabeledSentence>& corpus);

// ---- synthetic corpora -------------------------------------------------------

// Each label is planted independently with probability priors[k]; planted
// labels inject 1-3 marker tokens from a label-specific vocabulary so lexical
// features carry signal. Byte-deterministic under seed.
std::vector<LabeledSentence> generate_synthetic(std::size_t n_docs,
                                                std::size_t sentences_per_doc,
                                                const std::vector<double>& label_priors,
                                                std::uint64_t seed);

// Marker vocabulary used by the generator; label k's tokens are disjoint from
// every other label's. Exposed so tests can assert separability.
std::vector<std::string> synthetic_marker_tokens(std::uint32_t label);

struct SyntheticAdsConfig {
    std::size_t n_ads = 200;
    std::size_t n_labels = 5;  // marker vocabulary reused from the sentence generator
    Date window_start{2022, 3, 1};
    Date window_end{2022, 6, 18};
    double high_fraction = 0.45;  // ads generated with mostly persuasive sentences
    double low_fraction = 0.15;   // ads generated with mostly neutral sentences
};

// Ad corpus with planted persuasion levels: high-style ads use persuasive
// marker sentences and grow spend/impressions toward the window end, so the
// analytics layer has real structure to find. Deterministic under seed.
std::vector<AdRecord> generate_synthetic_ads(const SyntheticAdsConfig& cfg,
                                             std::uint64_t seed);

}  // namespace persua
