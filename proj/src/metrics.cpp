#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "persua/error.hpp"
#include "persua/metrics.hpp"

namespace persua {

using nlohmann::json;

namespace {

bool indicator(double v, std::size_t r, std::size_t c, const char* what) {
    if (v == 0.0) return false;
    if (v == 1.0) return true;
    throw ValidationError(std::string(what) + " matrix entry (" + std::to_string(r) + "," +
                          std::to_string(c) + ") is " + std::to_string(v) +
                          ", expected 0 or 1");
}

}  // namespace

std::vector<ConfusionCounts> confusion_counts(const Matrix& truth, const Matrix& pred) {
    require_same_shape(truth, pred, "confusion counts");
    std::vector<ConfusionCounts> out(truth.cols());
    for (std::size_t i = 0; i < truth.rows(); ++i) {
        for (std::size_t j = 0; j < truth.cols(); ++j) {
            const bool t = indicator(truth(i, j), i, j, "truth");
            const bool p = indicator(pred(i, j), i, j, "prediction");
            if (t && p) ++out[j].tp;
            else if (!t && p) ++out[j].fp;
            else if (t && !p) ++out[j].fn;
            else ++out[j].tn;
        }
    }
    return out;
}

double f1_from_counts(const ConfusionCounts& c) {
    const double denom = 2.0 * static_cast<double>(c.tp) + static_cast<double>(c.fp) +
                         static_cast<double>(c.fn);
    if (denom == 0.0) return 0.0;
    return 2.0 * static_cast<double>(c.tp) / denom;
}

double f1_micro(const Matrix& truth, const Matrix& pred) {
    const auto per_label = confusion_counts(truth, pred);
    ConfusionCounts pooled;
    for (const auto& c : per_label) {
        pooled.tp += c.tp;
        pooled.fp += c.fp;
        pooled.fn += c.fn;
        pooled.tn += c.tn;
    }
    return f1_from_counts(pooled);
}

double f1_macro(const Matrix& truth, const Matrix& pred) {
    const auto per_label = confusion_counts(truth, pred);
    if (per_label.empty()) throw ValidationError("macro F1 needs at least one label");
    double total = 0.0;
    for (const auto& c : per_label) total += f1_from_counts(c);
    return total / static_cast<double>(per_label.size());
}

double accuracy(const Matrix& truth, const Matrix& pred) {
    require_same_shape(truth, pred, "accuracy");
    const std::size_t cells = truth.rows() * truth.cols();
    if (cells == 0) throw ValidationError("accuracy needs at least one entry");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.rows(); ++i)
        for (std::size_t j = 0; j < truth.cols(); ++j) {
            const bool t = indicator(truth(i, j), i, j, "truth");
            const bool p = indicator(pred(i, j), i, j, "prediction");
            if (t == p) ++hits;
        }
    return static_cast<double>(hits) / static_cast<double>(cells);
}

double fleiss_kappa(const Matrix& rating_counts) {
    const std::size_t n_items = rating_counts.rows();
    const std::size_t n_cats = rating_counts.cols();
    if (n_items == 0 || n_cats == 0)
        throw ValidationError("agreement table must be non-empty");

    // every cell a nonnegative integer, every row the same rater count
    double raters = 0.0;
    for (std::size_t i = 0; i < n_items; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < n_cats; ++j) {
            const double v = rating_counts(i, j);
            if (v < 0.0 || v != std::floor(v))
                throw ValidationError("agreement table cells must be nonnegative integers");
            row_sum += v;
        }
        if (i == 0) {
            raters = row_sum;
        } else if (row_sum != raters) {
            throw ValidationError("agreement table rows must all sum to the same rater count");
        }
    }
    if (raters < 2.0)
        throw ValidationError("agreement requires at least two raters per item");

    double p_bar = 0.0;
    std::vector<double> category_mass(n_cats, 0.0);
    for (std::size_t i = 0; i < n_items; ++i) {
        double agree = 0.0;
        for (std::size_t j = 0; j < n_cats; ++j) {
            const double v = rating_counts(i, j);
            agree += v * (v - 1.0);
            category_mass[j] += v;
        }
        p_bar += agree / (raters * (raters - 1.0));
    }
    p_bar /= static_cast<double>(n_items);

    double p_expected = 0.0;
    const double total = raters * static_cast<double>(n_items);
    for (double mass : category_mass) {
        const double p_j = mass / total;
        p_expected += p_j * p_j;
    }

    if (p_expected >= 1.0)
        throw DegenerateInputError(
            "expected agreement is 1 (all ratings in one category); kappa undefined");
    return (p_bar - p_expected) / (1.0 - p_expected);
}

EvalReport evaluate(const Matrix& truth, const Matrix& pred, const LabelSchema& schema,
                    bool with_accuracy) {
    if (truth.cols() != schema.names.size())
        throw ValidationError("matrix has " + std::to_string(truth.cols()) +
                              " labels but schema has " + std::to_string(schema.names.size()));
    const auto per_label = confusion_counts(truth, pred);

    EvalReport report;
    ConfusionCounts pooled;
    double macro_total = 0.0;
    for (std::size_t j = 0; j < per_label.size(); ++j) {
        LabelReport lr;
        lr.label = schema.names[j];
        lr.counts = per_label[j];
        lr.f1 = f1_from_counts(per_label[j]);
        macro_total += lr.f1;
        pooled.tp += per_label[j].tp;
        pooled.fp += per_label[j].fp;
        pooled.fn += per_label[j].fn;
        report.per_label.push_back(std::move(lr));
    }
    report.f1_micro = f1_from_counts(pooled);
    report.f1_macro = macro_total / static_cast<double>(per_label.size());
    if (with_accuracy) report.accuracy = accuracy(truth, pred);
    return report;
}

std::string to_json_string(const EvalReport& report) {
    json j;
    j["f1_micro"] = report.f1_micro;
    j["f1_macro"] = report.f1_macro;
    json per_label = json::array();
    for (const auto& lr : report.per_label) {
        per_label.push_back({{"label", lr.label},
                             {"tp", lr.counts.tp},
                             {"fp", lr.counts.fp},
                             {"fn", lr.counts.fn},
                             {"f1", lr.f1}});
    }
    j["per_label"] = std::move(per_label);
    j["accuracy"] = report.accuracy ? json(*report.accuracy) : json(nullptr);
    return j.dump(2);
}

void save_report(const std::string& path, const EvalReport& report) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write report file: " + path);
    out << to_json_string(report) << "\n";
}

EvalReport load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open report file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("bad report JSON: ") + e.what());
    }
    EvalReport report;
    try {
        report.f1_micro = j.at("f1_micro").get<double>();
        report.f1_macro = j.at("f1_macro").get<double>();
        for (const auto& item : j.at("per_label")) {
            LabelReport lr;
            lr.label = item.at("label").get<std::string>();
            lr.counts.tp = item.at("tp").get<std::uint64_t>();
            lr.counts.fp = item.at("fp").get<std::uint64_t>();
            lr.counts.fn = item.at("fn").get<std::uint64_t>();
            lr.f1 = item.at("f1").get<double>();
            report.per_label.push_back(std::move(lr));
        }
        if (!j.at("accuracy").is_null()) report.accuracy = j["accuracy"].get<double>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad report JSON: ") + e.what());
    }
    return report;
}

}  // namespace persua
