#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "persua/analytics.hpp"
#include "persua/error.hpp"
#include "persua/stats.hpp"

namespace persua {

namespace {

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_space_byte(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string ascii_lower(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

const std::set<std::string>& abbreviation_set() {
    static const std::set<std::string> abbrevs = [] {
        std::set<std::string> s;
        for (const auto& a : builtin_abbreviations()) s.insert(a);
        return s;
    }();
    return abbrevs;
}

// token ending at position `end` (inclusive), scanned back to whitespace
std::string token_ending_at(const std::string& text, std::size_t end) {
    std::size_t begin = end;
    while (begin > 0 && !is_space_byte(text[begin - 1])) --begin;
    return ascii_lower(text.substr(begin, end - begin + 1));
}

std::string trimmed(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space_byte(s[b])) ++b;
    while (e > b && is_space_byte(s[e - 1])) --e;
    return s.substr(b, e - b);
}

}  // namespace

std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    const std::size_t n = text.size();
    std::size_t start = 0;
    std::size_t i = 0;
    while (i < n) {
        if (!is_terminator(text[i])) {
            ++i;
            continue;
        }
        std::size_t run_end = i;
        while (run_end + 1 < n && is_terminator(text[run_end + 1])) ++run_end;

        const bool at_boundary = run_end + 1 >= n || is_space_byte(text[run_end + 1]);
        bool guarded = false;
        if (at_boundary && run_end == i && text[i] == '.') {
            const bool digit_before = i > 0 && std::isdigit(static_cast<unsigned char>(text[i - 1]));
            const bool digit_after =
                i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1]));
            if (digit_before && digit_after) {
                guarded = true;  // decimal point
            } else if (abbreviation_set().count(token_ending_at(text, i))) {
                guarded = true;
            }
        }
        if (at_boundary && !guarded) {
            const std::string sentence = trimmed(text.substr(start, run_end + 1 - start));
            if (!sentence.empty()) out.push_back(sentence);
            start = run_end + 1;
        }
        i = run_end + 1;
    }
    if (start < n) {
        const std::string tail = trimmed(text.substr(start));
        if (!tail.empty()) out.push_back(tail);
    }
    return out;
}

ScoreResult score_ads(const std::vector<AdRecord>& ads, const LinearModel& model,
                      const Featurizer& featurizer, double tau) {
    if (model.labels.size() != 1)
        throw ValidationError("ad scoring requires a single-label model, got " +
                              std::to_string(model.labels.size()) + " labels");
    if (!(tau >= 0.0 && tau <= 1.0))
        throw ValidationError("threshold must lie in [0, 1], got " + std::to_string(tau));

    ScoreResult result;
    for (const auto& ad : ads) {
        const auto sentences = split_sentences(ad.text);
        if (sentences.empty()) {
            ++result.skipped;
            continue;
        }
        const auto features = featurizer.transform_all(sentences);
        const Matrix probs = predict_proba(model, features);
        std::size_t hits = 0;
        for (std::size_t s = 0; s < sentences.size(); ++s)
            if (probs(s, 0) >= tau) ++hits;
        ScoredAd scored;
        scored.ad = ad;
        scored.n_sentences = sentences.size();
        scored.score = static_cast<double>(hits) / static_cast<double>(sentences.size());
        result.ads.push_back(std::move(scored));
    }
    return result;
}

std::string to_string(PersuasionBucket b) {
    switch (b) {
        case PersuasionBucket::low: return "low";
        case PersuasionBucket::mid: return "mid";
        case PersuasionBucket::high: return "high";
    }
    throw ValidationError("unreachable bucket value");
}

void BucketThresholds::validate() const {
    if (!(low >= 0.0 && low < high && high <= 1.0))
        throw ValidationError("bucket thresholds need 0 <= low < high <= 1, got low=" +
                              std::to_string(low) + " high=" + std::to_string(high));
}

PersuasionBucket bucket_of(double score, const BucketThresholds& t) {
    t.validate();
    if (!(score >= 0.0 && score <= 1.0))
        throw ValidationError("persuasion score must lie in [0, 1], got " +
                              std::to_string(score));
    if (score >= t.high) return PersuasionBucket::high;
    if (score <= t.low) return PersuasionBucket::low;
    return PersuasionBucket::mid;
}

namespace {

struct BucketAccumulator {
    std::size_t count = 0;
    double spend = 0.0;
    double impressions = 0.0;
    double duration = 0.0;
    std::map<std::string, double> funder_spend;

    void add(const ScoredAd& s) {
        ++count;
        spend += s.ad.spend_mid();
        impressions += s.ad.impressions_mid();
        duration += static_cast<double>(s.ad.duration_days());
        funder_spend[s.ad.funder] += s.ad.spend_mid();
    }

    BucketStats finish(std::size_t total) const {
        BucketStats out;
        out.count = count;
        out.share = static_cast<double>(count) / static_cast<double>(total);
        out.total_spend_mid = spend;
        if (count > 0) {
            out.mean_spend_mid = spend / static_cast<double>(count);
            out.mean_impressions_mid = impressions / static_cast<double>(count);
            out.mean_duration_days = duration / static_cast<double>(count);
        }
        for (const auto& [funder, amount] : funder_spend) {
            // strict > keeps the lexicographically first funder on ties, since
            // the map iterates in name order
            if (amount > out.top_funder_spend || out.top_funder.empty()) {
                out.top_funder = funder;
                out.top_funder_spend = amount;
            }
        }
        return out;
    }
};

}  // namespace

BucketBreakdown bucket_stats(const std::vector<ScoredAd>& ads, const BucketThresholds& t) {
    t.validate();
    if (ads.empty()) throw ValidationError("bucket stats need at least one scored ad");
    BucketAccumulator low, mid, high;
    for (const auto& s : ads) {
        switch (bucket_of(s.score, t)) {
            case PersuasionBucket::low: low.add(s); break;
            case PersuasionBucket::mid: mid.add(s); break;
            case PersuasionBucket::high: high.add(s); break;
        }
    }
    BucketBreakdown out;
    out.total = ads.size();
    out.low = low.finish(ads.size());
    out.mid = mid.finish(ads.size());
    out.high = high.finish(ads.size());
    return out;
}

std::vector<ComparisonMetric> compare_buckets(const BucketBreakdown& breakdown) {
    if (breakdown.high.count == 0 || breakdown.low.count == 0)
        throw DegenerateInputError("bucket comparison needs non-empty high and low buckets");
    auto metric = [](std::string name, double high, double low) {
        if (low == 0.0)
            throw DegenerateInputError("percent difference undefined: low-bucket " + name +
                                       " is zero");
        ComparisonMetric m;
        m.name = std::move(name);
        m.high_value = high;
        m.low_value = low;
        m.pct_difference = (high - low) / low * 100.0;
        return m;
    };
    return {
        metric("mean_impressions_mid", breakdown.high.mean_impressions_mid,
               breakdown.low.mean_impressions_mid),
        metric("mean_spend_mid", breakdown.high.mean_spend_mid, breakdown.low.mean_spend_mid),
        metric("mean_duration_days", breakdown.high.mean_duration_days,
               breakdown.low.mean_duration_days),
    };
}

LexicalProfile lexical_profile(const std::vector<std::string>& texts,
                               const PrepConfig& prep, std::size_t k,
                               IdfVariant variant) {
    if (texts.empty()) throw ValidationError("lexical profile needs at least one text");
    if (k == 0) throw ValidationError("lexical profile needs k >= 1");

    std::vector<std::vector<std::string>> docs;
    docs.reserve(texts.size());
    for (const auto& t : texts) docs.push_back(preprocess(t, prep));

    LexicalProfile profile;
    const Vocabulary vocab = build_vocabulary(docs);
    if (vocab.size() > 0) profile.top_terms = average_tfidf(docs, vocab, k, variant);

    std::map<Bigram, std::uint64_t> counts;
    for (const auto& doc : docs)
        for (const auto& [bg, c] : canonical_bigrams(doc)) counts[bg] += c;
    std::vector<std::pair<Bigram, std::uint64_t>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i)
        profile.top_bigrams.emplace_back(ranked[i].first.first + " " + ranked[i].first.second,
                                         ranked[i].second);
    return profile;
}

DailySeries daily_series(const std::vector<ScoredAd>& ads, AdQuantity quantity,
                         AttributionMode mode) {
    if (ads.empty()) throw ValidationError("daily series needs at least one ad");

    auto first_day = [&](const ScoredAd& s) {
        return mode == AttributionMode::creation_day ? s.ad.created : s.ad.start_date;
    };
    auto last_day = [&](const ScoredAd& s) {
        return mode == AttributionMode::creation_day ? s.ad.created : s.ad.end_date;
    };

    std::int64_t lo_serial = first_day(ads.front()).serial();
    std::int64_t hi_serial = last_day(ads.front()).serial();
    for (const auto& s : ads) {
        lo_serial = std::min(lo_serial, first_day(s).serial());
        hi_serial = std::max(hi_serial, last_day(s).serial());
    }

    const std::size_t n_days = static_cast<std::size_t>(hi_serial - lo_serial + 1);
    DailySeries series;
    series.days.reserve(n_days);
    for (std::size_t d = 0; d < n_days; ++d)
        series.days.push_back(Date::from_serial(lo_serial + static_cast<std::int64_t>(d)));
    std::vector<double> sum_mid(n_days, 0.0), sum_lo(n_days, 0.0), sum_hi(n_days, 0.0);
    series.ad_count.assign(n_days, 0);

    for (const auto& s : ads) {
        double mid, vlo, vhi;
        if (quantity == AdQuantity::spend) {
            mid = s.ad.spend_mid();
            vlo = s.ad.spend_lo;
            vhi = s.ad.spend_hi;
        } else {
            mid = s.ad.impressions_mid();
            vlo = static_cast<double>(s.ad.impressions_lo);
            vhi = static_cast<double>(s.ad.impressions_hi);
        }
        const std::int64_t from = first_day(s).serial() - lo_serial;
        const std::int64_t to = last_day(s).serial() - lo_serial;
        for (std::int64_t d = from; d <= to; ++d) {
            const auto idx = static_cast<std::size_t>(d);
            sum_mid[idx] += mid;
            sum_lo[idx] += vlo;
            sum_hi[idx] += vhi;
            ++series.ad_count[idx];
        }
    }

    series.mean_mid.resize(n_days);
    series.mean_lo.resize(n_days);
    series.mean_hi.resize(n_days);
    for (std::size_t d = 0; d < n_days; ++d) {
        const auto c = static_cast<double>(series.ad_count[d]);
        series.mean_mid[d] = c > 0 ? sum_mid[d] / c : 0.0;
        series.mean_lo[d] = c > 0 ? sum_lo[d] / c : 0.0;
        series.mean_hi[d] = c > 0 ? sum_hi[d] / c : 0.0;
    }
    return series;
}

std::vector<double> moving_average(const std::vector<double>& values, std::size_t window) {
    if (window == 0) throw ValidationError("moving average window must be >= 1");
    for (double v : values)
        if (!std::isfinite(v)) throw ValidationError("moving average input must be finite");
    std::vector<double> out(values.size());
    double running = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        running += values[i];
        if (i >= window) running -= values[i - window];
        const std::size_t effective = std::min(i + 1, window);
        out[i] = running / static_cast<double>(effective);
    }
    return out;
}

TrendResult mann_kendall(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 4)
        throw ValidationError("trend test needs at least 4 observations, got " +
                              std::to_string(n));
    for (double v : values)
        if (!std::isfinite(v)) throw ValidationError("trend test input must be finite");

    long long s = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double diff = values[j] - values[i];
            if (diff > 0) ++s;
            else if (diff < 0) --s;
        }
    }

    std::map<double, std::uint64_t> tie_groups;
    for (double v : values) ++tie_groups[v];
    const double dn = static_cast<double>(n);
    double var_s = dn * (dn - 1.0) * (2.0 * dn + 5.0);
    for (const auto& [value, t_raw] : tie_groups) {
        const double t = static_cast<double>(t_raw);
        if (t > 1.0) var_s -= t * (t - 1.0) * (2.0 * t + 5.0);
    }
    var_s /= 18.0;

    TrendResult out;
    out.s = s;
    out.var_s = var_s;
    out.direction = s > 0 ? 1 : s < 0 ? -1 : 0;
    if (s == 0 || var_s <= 0.0) {
        out.z = 0.0;
        out.p_value = 1.0;
        return out;
    }
    const double sd = std::sqrt(var_s);
    out.z = s > 0 ? (static_cast<double>(s) - 1.0) / sd : (static_cast<double>(s) + 1.0) / sd;
    out.p_value = normal_two_sided_p(out.z);
    return out;
}

PearsonResult pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw ValidationError("correlation inputs must have equal length");
    const std::size_t n = x.size();
    if (n < 3)
        throw ValidationError("correlation needs at least 3 observations, got " +
                              std::to_string(n));
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw ValidationError("correlation input must be finite");

    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw DegenerateInputError("correlation undefined for a constant input");

    PearsonResult out;
    out.n = n;
    out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double df = static_cast<double>(n - 2);
    if (std::fabs(out.r) >= 1.0) {
        out.p_value = 0.0;
    } else {
        const double t = out.r * std::sqrt(df / (1.0 - out.r * out.r));
        out.p_value = student_t_two_sided_p(t, df);
    }
    return out;
}

}  // namespace persua
