// Acceptance checks for the full pipeline. Each check prints exactly one
// PASS/FAIL line; the process exits with the number of failed checks.
// Tolerances are pinned here on purpose: loosening one is a visible diff.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "persua/analytics.hpp"
#include "persua/corpus.hpp"
#include "persua/error.hpp"
#include "persua/features.hpp"
#include "persua/matrix.hpp"
#include "persua/metrics.hpp"
#include "persua/model.hpp"
#include "persua/rng.hpp"

using namespace persua;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void run_check(int number, const std::string& name, double time_budget_s,
               const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    const auto start = Clock::now();
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration_cast<std::chrono::duration<double>>(Clock::now() - start)
            .count();
    if (time_budget_s > 0.0 && elapsed > time_budget_s) {
        ok = false;
        detail += (detail.empty() ? "" : "; ") + std::string("over time budget of ") +
                  std::to_string(time_budget_s) + " s";
    }
    std::printf("%s  %2d  %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
                elapsed, detail.empty() ? "" : ": ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

std::string mismatch(const std::string& what, double got, double want) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: got %.10g, want %.10g", what.c_str(), got, want);
    return buf;
}

// ---- 1: loss correctness ----------------------------------------------------

bool check_loss(std::string& detail) {
    const Matrix truth = Matrix::from_rows({{1.0, 0.0}});
    const Matrix probs = Matrix::from_rows({{0.8, 0.2}});
    LossConfig cfg;
    cfg.beta = 0.75;
    const double hand = asymmetric_bce(truth, probs, cfg);
    if (!close(hand, 0.111572, 1e-6)) {
        detail = mismatch("hand example", hand, 0.111572);
        return false;
    }

    Rng rng(101);
    cfg.beta = 0.5;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t rows = 1 + rng.next_below(8);
        const std::size_t cols = 1 + rng.next_below(6);
        Matrix y(rows, cols), p(rows, cols);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                y(r, c) = rng.bernoulli(0.5) ? 1.0 : 0.0;
                p(r, c) = 0.01 + 0.98 * rng.next_unit();
            }
        double plain = 0.0;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                plain += -(y(r, c) * std::log(p(r, c)) +
                           (1.0 - y(r, c)) * std::log(1.0 - p(r, c)));
        plain /= static_cast<double>(rows * cols);
        const double weighted = asymmetric_bce(y, p, cfg);
        if (!close(weighted, 0.5 * plain, 1e-12)) {
            detail = mismatch("beta 0.5 trial " + std::to_string(trial), weighted,
                              0.5 * plain);
            return false;
        }
    }
    return true;
}

// ---- 2: gradient vs finite differences --------------------------------------

bool check_gradient(std::string& detail) {
    Rng rng(202);
    const double h = 1e-4;
    for (int instance = 0; instance < 50; ++instance) {
        const std::size_t n = 2 + rng.next_below(7);
        const std::size_t dim = 1 + rng.next_below(10);
        const std::size_t labels = 1 + rng.next_below(5);

        std::vector<FeatureVector> features;
        for (std::size_t i = 0; i < n; ++i) {
            FeatureVector fv;
            fv.dim = dim;
            for (std::uint32_t d = 0; d < dim; ++d)
                if (rng.bernoulli(0.6))
                    fv.entries.push_back({d, rng.next_unit() * 2.0 - 1.0});
            features.push_back(std::move(fv));
        }
        Matrix truth(n, labels);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < labels; ++c)
                truth(r, c) = rng.bernoulli(0.4) ? 1.0 : 0.0;
        Matrix weights(dim + 1, labels);
        for (std::size_t r = 0; r < weights.rows(); ++r)
            for (std::size_t c = 0; c < labels; ++c)
                weights(r, c) = rng.next_unit() - 0.5;
        LossConfig cfg;
        cfg.beta = 0.25 + 0.5 * rng.next_unit();

        const Matrix grad = weight_gradient(features, truth, weights, cfg);
        for (std::size_t r = 0; r < weights.rows(); ++r)
            for (std::size_t c = 0; c < labels; ++c) {
                Matrix up = weights, down = weights;
                up(r, c) += h;
                down(r, c) -= h;
                const double fd =
                    (asymmetric_bce(truth, forward_probs(features, up), cfg) -
                     asymmetric_bce(truth, forward_probs(features, down), cfg)) /
                    (2.0 * h);
                const double g = grad(r, c);
                // relative above 1, absolute below: fd noise is ~1e-9
                const double err =
                    std::fabs(g - fd) / std::max({1.0, std::fabs(g), std::fabs(fd)});
                if (err > 1e-5) {
                    detail = mismatch("instance " + std::to_string(instance) + " cell (" +
                                          std::to_string(r) + "," + std::to_string(c) + ")",
                                      g, fd);
                    return false;
                }
            }
    }
    return true;
}

// ---- 3: f1 against brute force ----------------------------------------------

bool check_f1_oracle(std::string& detail) {
    for (int t_bits = 0; t_bits < 16; ++t_bits)
        for (int p_bits = 0; p_bits < 16; ++p_bits) {
            Matrix truth(2, 2), pred(2, 2);
            for (int cell = 0; cell < 4; ++cell) {
                truth(cell / 2, cell % 2) = (t_bits >> cell) & 1 ? 1.0 : 0.0;
                pred(cell / 2, cell % 2) = (p_bits >> cell) & 1 ? 1.0 : 0.0;
            }

            // brute force, written independently of the library internals
            double pooled_tp = 0, pooled_fp = 0, pooled_fn = 0, macro_sum = 0;
            for (int label = 0; label < 2; ++label) {
                double tp = 0, fp = 0, fn = 0;
                for (int row = 0; row < 2; ++row) {
                    const bool y = truth(row, label) == 1.0;
                    const bool q = pred(row, label) == 1.0;
                    tp += y && q;
                    fp += !y && q;
                    fn += y && !q;
                }
                pooled_tp += tp;
                pooled_fp += fp;
                pooled_fn += fn;
                const double denom = 2 * tp + fp + fn;
                macro_sum += denom == 0 ? 0.0 : 2 * tp / denom;
            }
            const double pooled_denom = 2 * pooled_tp + pooled_fp + pooled_fn;
            const double want_micro = pooled_denom == 0 ? 0.0 : 2 * pooled_tp / pooled_denom;
            const double want_macro = macro_sum / 2.0;

            const double got_micro = f1_micro(truth, pred);
            const double got_macro = f1_macro(truth, pred);
            if (!close(got_micro, want_micro, 1e-12) ||
                !close(got_macro, want_macro, 1e-12)) {
                detail = "case truth=" + std::to_string(t_bits) +
                         " pred=" + std::to_string(p_bits) + "; " +
                         mismatch("micro", got_micro, want_micro) + "; " +
                         mismatch("macro", got_macro, want_macro);
                return false;
            }
        }
    return true;
}

// ---- 4: fleiss kappa ----------------------------------------------------------

bool check_fleiss(std::string& detail) {
    const double hand = fleiss_kappa(Matrix::from_rows({{4, 0}, {0, 4}, {2, 2}}));
    if (!close(hand, 0.5556, 1e-4)) {
        detail = mismatch("hand table", hand, 0.5556);
        return false;
    }
    const double perfect = fleiss_kappa(Matrix::from_rows({{3, 0}, {0, 3}, {3, 0}}));
    if (perfect != 1.0) {
        detail = mismatch("perfect agreement", perfect, 1.0);
        return false;
    }
    return true;
}

// ---- 5: split fidelity ---------------------------------------------------------

bool check_split(std::string& detail) {
    std::vector<LabeledSentence> corpus;
    for (int i = 0; i < 658; ++i) {
        LabeledSentence s;
        s.doc_id = "doc-" + std::to_string(i / 6);
        s.sentence_id = static_cast<std::uint32_t>(i % 6);
        s.text = "sentence " + std::to_string(i);
        s.binary = i % 3 == 0 ? BinaryLabel::persuasive : BinaryLabel::neutral;
        corpus.push_back(std::move(s));
    }
    const std::size_t n_pos = 220, n_neg = 438;  // i % 3 over 658

    const auto split = stratified_split(corpus, 0.25, 13);
    if (split.train.size() != 493 || split.test.size() != 165) {
        detail = "sizes " + std::to_string(split.train.size()) + "/" +
                 std::to_string(split.test.size()) + ", want 493/165";
        return false;
    }

    std::size_t test_pos = 0;
    for (const auto& s : split.test)
        if (*s.binary == BinaryLabel::persuasive) ++test_pos;
    const double pos_target = 0.25 * static_cast<double>(n_pos);
    const double neg_target = 0.25 * static_cast<double>(n_neg);
    const double pos_dev = std::fabs(static_cast<double>(test_pos) - pos_target);
    const double neg_dev =
        std::fabs(static_cast<double>(split.test.size() - test_pos) - neg_target);
    if (pos_dev > 1.0 || neg_dev > 1.0) {
        detail = "per-class deviation " + std::to_string(pos_dev) + "/" +
                 std::to_string(neg_dev) + " exceeds 1";
        return false;
    }

    const auto rerun = stratified_split(corpus, 0.25, 13);
    if (!(rerun.train == split.train && rerun.test == split.test)) {
        detail = "rerun with the same seed differs";
        return false;
    }
    return true;
}

// ---- 6: end-to-end learning ----------------------------------------------------

bool check_learning(std::string& detail) {
    const std::vector<double> priors(5, 0.3);
    const auto corpus = generate_synthetic(200, 10, priors, 606);  // 2000 sentences
    const auto schema = LabelSchema::from_names(
        {"label-00", "label-01", "label-02", "label-03", "label-04"});

    std::vector<std::string> texts;
    Matrix truth(corpus.size(), schema.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        texts.push_back(corpus[i].text);
        for (auto label : corpus[i].labels) truth(i, label) = 1.0;
    }

    PrepConfig prep;
    const auto featurizer = Featurizer::fit(texts, prep, 1);
    const auto features = featurizer.transform_all(texts);

    TrainConfig cfg;
    cfg.learning_rate = 2.0;
    cfg.epochs = 300;
    cfg.beta = -1.0;
    const auto result = train(features, truth, schema.names, featurizer.vocab.hash(), cfg);

    for (std::size_t i = 1; i < result.loss_history.size(); ++i)
        if (!(result.loss_history[i] < result.loss_history[i - 1])) {
            detail = "loss not strictly decreasing at epoch " + std::to_string(i);
            return false;
        }

    const Matrix pred = apply_threshold(predict_proba(result.model, features), 0.5);
    const double micro = f1_micro(truth, pred);
    if (micro < 0.90) {
        detail = mismatch("f1_micro", micro, 0.90);
        return false;
    }
    return true;
}

// ---- 7: calibration behavior ----------------------------------------------------

bool check_calibration(std::string& detail) {
    Rng rng(707);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t rows = 5 + rng.next_below(30);
        const std::size_t cols = 1 + rng.next_below(5);
        Matrix probs(rows, cols);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) probs(r, c) = rng.next_unit();
        std::size_t prev = rows * cols + 1;
        for (double tau : default_threshold_grid()) {
            const Matrix pred = apply_threshold(probs, tau);
            std::size_t count = 0;
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < cols; ++c) count += pred(r, c) == 1.0;
            if (count > prev) {
                detail = "positive count rose from " + std::to_string(prev) + " to " +
                         std::to_string(count) + " at tau " + std::to_string(tau);
                return false;
            }
            prev = count;
        }
    }

    // dev set whose micro F1 peaks at tau = 0.6 and nowhere else
    const Matrix truth = Matrix::from_rows({{1.0}, {1.0}, {0.0}, {0.0}});
    const Matrix probs = Matrix::from_rows({{0.60}, {0.90}, {0.55}, {0.10}});
    const auto result = calibrate(truth, probs);
    if (!close(result.recommended, 0.6, 1e-12)) {
        detail = mismatch("recommended tau", result.recommended, 0.6);
        return false;
    }
    return true;
}

// ---- 8: mann-kendall oracle ------------------------------------------------------

bool check_mann_kendall(std::string& detail) {
    // exhaustive {0,1,2}^n for all valid lengths up to 12
    for (std::size_t n = 4; n <= 12; ++n) {
        std::vector<int> digits(n, 0);
        while (true) {
            std::vector<double> series(n);
            for (std::size_t i = 0; i < n; ++i) series[i] = digits[i];

            long long brute = 0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) {
                    if (series[j] > series[i]) ++brute;
                    if (series[j] < series[i]) --brute;
                }
            const auto result = mann_kendall(series);
            if (result.s != brute) {
                detail = "length " + std::to_string(n) + ": s " +
                         std::to_string(result.s) + " vs brute " + std::to_string(brute);
                return false;
            }

            std::size_t pos = 0;
            while (pos < n && digits[pos] == 2) digits[pos++] = 0;
            if (pos == n) break;
            ++digits[pos];
        }
    }

    const auto inc = mann_kendall({1.0, 2.0, 3.0, 4.0, 5.0});
    if (inc.s != 10 || !close(inc.z, 2.205, 1e-3) || !close(inc.p_value, 0.0275, 1e-3)) {
        detail = "increasing series: s=" + std::to_string(inc.s) + " " +
                 mismatch("z", inc.z, 2.205) + "; " + mismatch("p", inc.p_value, 0.0275);
        return false;
    }
    return true;
}

// ---- 9: pearson -------------------------------------------------------------------

bool check_pearson(std::string& detail) {
    Rng rng(909);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 3 + rng.next_below(20);
        std::vector<double> x, y;
        const double slope = (rng.bernoulli(0.5) ? 1.0 : -1.0) * (0.5 + rng.next_unit());
        const double intercept = rng.next_unit() * 10.0 - 5.0;
        for (std::size_t i = 0; i < n; ++i) {
            x.push_back(static_cast<double>(i) + rng.next_unit() * 0.25);
            y.push_back(slope * x.back() + intercept);
        }
        const double r = pearson(x, y).r;
        if (!close(std::fabs(r), 1.0, 1e-12)) {
            detail = mismatch("affine |r| trial " + std::to_string(trial), std::fabs(r), 1.0);
            return false;
        }
    }

    const auto hand = pearson({1.0, 2.0, 3.0, 4.0}, {2.0, 1.0, 4.0, 3.0});
    if (!close(hand.r, 0.6, 1e-12)) {
        detail = mismatch("hand r", hand.r, 0.6);
        return false;
    }
    if (!close(hand.p_value, 0.40, 2e-2)) {
        detail = mismatch("hand p", hand.p_value, 0.40);
        return false;
    }
    return true;
}

// ---- 10: bucketing partition -------------------------------------------------------

bool check_buckets(std::string& detail) {
    const BucketThresholds thresholds{};

    Rng rng(1010);
    std::vector<ScoredAd> ads;
    for (int i = 0; i < 400; ++i) {
        ScoredAd s;
        s.ad.ad_id = "ad-" + std::to_string(i);
        s.ad.text = "text";
        s.ad.funder = "F" + std::to_string(i % 7);
        s.ad.created = s.ad.start_date = Date{2022, 4, 1};
        s.ad.end_date = Date{2022, 4, 3};
        s.ad.spend_lo = 100;
        s.ad.spend_hi = 199;
        s.ad.impressions_lo = 1000;
        s.ad.impressions_hi = 1999;
        s.n_sentences = 1;
        s.score = rng.next_unit();
        ads.push_back(std::move(s));
    }
    // force both boundaries to appear
    ads[0].score = 0.8;
    ads[1].score = 0.2;

    const auto breakdown = bucket_stats(ads, thresholds);
    if (breakdown.low.count + breakdown.mid.count + breakdown.high.count !=
        breakdown.total ||
        breakdown.total != ads.size()) {
        detail = "bucket counts do not partition the corpus";
        return false;
    }
    if (bucket_of(0.8, thresholds) != PersuasionBucket::high ||
        bucket_of(0.2, thresholds) != PersuasionBucket::low) {
        detail = "boundary scores 0.8/0.2 not mapped to high/low";
        return false;
    }

    // the published impressions means, fed straight into the comparison
    BucketBreakdown table;
    table.high.count = 1;
    table.low.count = 1;
    table.high.mean_impressions_mid = 25407.0;
    table.low.mean_impressions_mid = 17441.0;
    table.high.mean_spend_mid = table.low.mean_spend_mid = 1.0;
    table.high.mean_duration_days = table.low.mean_duration_days = 1.0;
    table.total = 2;
    const auto metrics = compare_buckets(table);
    double got = 0.0;
    bool found = false;
    for (const auto& m : metrics)
        if (m.name == "mean_impressions_mid") {
            got = m.pct_difference;
            found = true;
        }
    if (!found || !close(got, 45.7, 0.1)) {
        detail = mismatch("impressions percent difference", got, 45.7);
        return false;
    }
    return true;
}

// ---- 11: bigram canonicalization ----------------------------------------------------

bool check_bigrams(std::string& detail) {
    const auto counts = canonical_bigrams({"tax", "cut", "tax"});
    const Bigram want{"cut", "tax"};
    if (counts.size() != 1 || counts.count(want) == 0 || counts.at(want) != 2) {
        detail = "hand case produced " + std::to_string(counts.size()) + " keys";
        return false;
    }

    Rng rng(1111);
    const std::vector<std::string> pool = {"tax", "cut", "vote", "win", "now", "usa"};
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<std::string> tokens;
        const std::size_t n = rng.next_below(15);
        for (std::size_t i = 0; i < n; ++i)
            tokens.push_back(pool[static_cast<std::size_t>(rng.next_below(pool.size()))]);
        std::uint64_t total = 0;
        for (const auto& [key, count] : canonical_bigrams(tokens)) {
            if (key.first > key.second) {
                detail = "unsorted key (" + key.first + "," + key.second + ") at trial " +
                         std::to_string(trial);
                return false;
            }
            total += count;
        }
        if (total != (tokens.size() < 2 ? 0 : tokens.size() - 1)) {
            detail = "bigram total mismatch at trial " + std::to_string(trial);
            return false;
        }
    }
    return true;
}

}  // namespace

int main() {
    run_check(1, "weighted bce hand value and plain-bce consistency", 1.0, check_loss);
    run_check(2, "weight gradient matches central finite differences", 10.0,
              check_gradient);
    run_check(3, "micro/macro f1 agree with brute force on all 2x2 cases", 1.0,
              check_f1_oracle);
    run_check(4, "fleiss kappa hand table and perfect agreement", 0.0, check_fleiss);
    run_check(5, "stratified split is exact, balanced, reproducible", 0.0, check_split);
    run_check(6, "synthetic end-to-end training reaches f1-micro 0.90", 60.0,
              check_learning);
    run_check(7, "threshold sweep is monotone and finds the dev optimum", 0.0,
              check_calibration);
    run_check(8, "mann-kendall matches brute force exhaustively", 0.0, check_mann_kendall);
    run_check(9, "pearson affine and hand cases", 0.0, check_pearson);
    run_check(10, "buckets partition with inclusive bounds, comparison arithmetic", 0.0,
              check_buckets);
    run_check(11, "bigram keys are canonical", 0.0, check_bigrams);

    if (failures == 0) std::printf("all acceptance checks passed\n");
    return failures;
}
