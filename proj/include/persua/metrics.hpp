#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "persua/corpus.hpp"
#include "persua/matrix.hpp"

namespace persua {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    bool operator==(const ConfusionCounts&) const = default;
};

// Per-label confusion over two N x L indicator matrices. Entries must be
// exactly 0 or 1.
std::vector<ConfusionCounts> confusion_counts(const Matrix& truth, const Matrix& pred);

// 2*tp / (2*tp + fp + fn); defined as 0 when the denominator is 0.
double f1_from_counts(const ConfusionCounts& c);

// Pools counts across every label before computing F1, so frequent labels
// dominate.
double f1_micro(const Matrix& truth, const Matrix& pred);

// Unweighted mean of per-label F1 across all schema labels, including labels
// that never occur (those contribute 0).
double f1_macro(const Matrix& truth, const Matrix& pred);

// Fraction of cells where prediction equals truth. For a single-column task
// this is plain accuracy.
double accuracy(const Matrix& truth, const Matrix& pred);

// Fleiss' kappa over an N x k table of category counts; every row must sum to
// the same number of raters (>= 2). Throws DegenerateInputError when expected
// agreement is 1 (all mass in one category), since kappa is undefined there.
double fleiss_kappa(const Matrix& rating_counts);

struct LabelReport {
    std::string label;
    ConfusionCounts counts;
    double f1 = 0.0;
};

struct EvalReport {
    double f1_micro = 0.0;
    double f1_macro = 0.0;
    std::vector<LabelReport> per_label;
    std::optional<double> accuracy;  // set for the binary task only
};

EvalReport evaluate(const Matrix& truth, const Matrix& pred, const LabelSchema& schema,
                    bool with_accuracy);

std::string to_json_string(const EvalReport& report);
void save_report(const std::string& path, const EvalReport& report);
EvalReport load_report(const std::string& path);

}  // namespace persua
