#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "persua/corpus.hpp"
#include "persua/date.hpp"
#include "persua/features.hpp"
#include "persua/model.hpp"

namespace persua {

// Abbreviations whose trailing period does not end a sentence ("dr.", "u.s.",
// ...). Lowercase, periods included.
const std::vector<std::string>& builtin_abbreviations();

// Splits ad copy into sentences at '.', '!', '?' runs, guarding known
// abbreviations and decimal-number periods. Trims whitespace, drops empties.
std::vector<std::string> split_sentences(const std::string& text);

struct ScoredAd {
    AdRecord ad;
    double score = 0.0;          // persuasive sentence share, in [0, 1]
    std::size_t n_sentences = 0;
};

struct ScoreResult {
    std::vector<ScoredAd> ads;
    std::size_t skipped = 0;  // ads whose text yields zero sentences
};

// Scores each ad as the fraction of its sentences the binary model marks
// persuasive at the given threshold. Requires a single-label model. Ads with
// no sentences after splitting are skipped, not scored 0.
ScoreResult score_ads(const std::vector<AdRecord>& ads, const LinearModel& model,
                      const Featurizer& featurizer, double tau);

// Scored-ad CSV: the ad columns plus `score` and `n_sentences`, so a scoring
// run can feed a later analyze run without the model.
void save_scored_ads(const std::string& path, const std::vector<ScoredAd>& ads);
std::vector<ScoredAd> load_scored_ads(const std::string& path);

enum class PersuasionBucket { low, mid, high };

std::string to_string(PersuasionBucket b);

struct BucketThresholds {
    double low = 0.2;   // score <= low  -> low bucket
    double high = 0.8;  // score >= high -> high bucket

    void validate() const;
};

PersuasionBucket bucket_of(double score, const BucketThresholds& t);

struct BucketStats {
    std::size_t count = 0;
    double share = 0.0;  // count / total ads
    double total_spend_mid = 0.0;
    double mean_spend_mid = 0.0;
    double mean_impressions_mid = 0.0;
    double mean_duration_days = 0.0;
    std::string top_funder;  // by summed midpoint spend; empty when bucket empty
    double top_funder_spend = 0.0;
};

struct BucketBreakdown {
    BucketStats low;
    BucketStats mid;
    BucketStats high;
    std::size_t total = 0;
};

BucketBreakdown bucket_stats(const std::vector<ScoredAd>& ads, const BucketThresholds& t);

struct ComparisonMetric {
    std::string name;
    double high_value = 0.0;
    double low_value = 0.0;
    double pct_difference = 0.0;  // (high - low) / low * 100
};

// Mean impressions, spend, and duration of the high bucket against the low
// bucket. Throws DegenerateInputError when either bucket is empty or a low
// mean is zero, since the percent difference is undefined there.
std::vector<ComparisonMetric> compare_buckets(const BucketBreakdown& breakdown);

struct LexicalProfile {
    std::vector<std::pair<std::string, double>> top_terms;      // by mean tfidf
    std::vector<std::pair<std::string, std::uint64_t>> top_bigrams;  // "a b" keys
};

// Vocabulary and idf are built on the given texts alone, so profiles of two
// buckets are independent. Bigrams are canonical (pair-sorted) and counted
// after preprocessing; ties sort lexicographically.
LexicalProfile lexical_profile(const std::vector<std::string>& texts,
                               const PrepConfig& prep, std::size_t k,
                               IdfVariant variant = IdfVariant::smoothed);

enum class AdQuantity { spend, impressions };

enum class AttributionMode {
    active_days,   // an ad counts on every day of [start_date, end_date]
    creation_day,  // an ad counts only on its created date
};

struct DailySeries {
    std::vector<Date> days;            // contiguous, inclusive
    std::vector<double> mean_mid;      // per-day mean over counted ads; 0 when none
    std::vector<double> mean_lo;
    std::vector<double> mean_hi;
    std::vector<std::uint64_t> ad_count;
};

DailySeries daily_series(const std::vector<ScoredAd>& ads, AdQuantity quantity,
                         AttributionMode mode = AttributionMode::active_days);

// Trailing mean with a partial window at the head: out[i] averages
// values[max(0, i - w + 1) .. i]. Output length equals input length.
std::vector<double> moving_average(const std::vector<double>& values, std::size_t window);

struct TrendResult {
    long long s = 0;        // Kendall statistic: sum of pairwise signs
    double var_s = 0.0;     // tie-corrected variance of s
    double z = 0.0;         // continuity-corrected normal score
    double p_value = 1.0;   // two-sided
    int direction = 0;      // sign of s: -1 falling, 0 none, +1 rising
};

// Mann-Kendall trend test. Needs n >= 4. A constant series is a defined
// result (no trend, p = 1), not an error.
TrendResult mann_kendall(const std::vector<double>& values);

struct PearsonResult {
    double r = 0.0;
    double p_value = 1.0;  // two-sided, Student-t with n - 2 df
    std::size_t n = 0;
};

// Needs n >= 3 and nonzero variance in both inputs (zero variance makes r
// undefined, so that raises DegenerateInputError).
PearsonResult pearson(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace persua
