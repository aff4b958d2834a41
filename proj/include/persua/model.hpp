#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "persua/corpus.hpp"
#include "persua/features.hpp"
#include "persua/matrix.hpp"

namespace persua {

// Class-weighted binary cross entropy. Positive entries weigh beta, negative
// entries 1 - beta, so beta > 0.5 pushes the model toward recall on sparse
// labels. The mean runs over every (instance, label) cell.
struct LossConfig {
    double beta = 0.5;
    double eps = 1e-7;  // probability clamp: p in [eps, 1 - eps]

    void validate() const;
};

// 1 - mean(truth): weighs the positive class by the negative-class share.
double balanced_beta(const Matrix& truth);

double asymmetric_bce(const Matrix& truth, const Matrix& probs, const LossConfig& cfg);

// d loss / d logit, cell-wise: weight * (p - y) / N. Pairs with sigmoid
// outputs; N is the total cell count.
Matrix loss_logit_gradient(const Matrix& truth, const Matrix& probs,
                           const LossConfig& cfg);

double sigmoid(double z);

// sigmoid(X_aug * W) where X_aug appends a constant 1 column and W has
// (dim + 1) rows; row `dim` is the bias.
Matrix forward_probs(const std::vector<FeatureVector>& features, const Matrix& weights);

// d loss / d W for loss(forward_probs(X, W)): X_aug^T (w * (p - y)) / N.
// Shape matches `weights`. This is the exact gradient descent step direction.
Matrix weight_gradient(const std::vector<FeatureVector>& features, const Matrix& truth,
                       const Matrix& weights, const LossConfig& cfg);

// Dense weights over an augmented feature space: row `dim` is the bias, so
// weights has (dim + 1) rows and one column per label.
struct LinearModel {
    std::vector<std::string> labels;
    std::uint64_t vocab_hash = 0;
    std::size_t dim = 0;
    Matrix weights;

    std::size_t n_labels() const noexcept { return labels.size(); }
};

struct TrainConfig {
    double learning_rate = 1.0;
    std::size_t epochs = 200;
    double eps = 1e-7;
    // < 0 means "derive from the data" via balanced_beta
    double beta = -1.0;
};

struct TrainResult {
    LinearModel model;
    std::vector<double> loss_history;  // one entry per epoch, pre-update
    double beta = 0.5;                 // the beta actually used
};

// Full-batch gradient descent from zero weights. The objective is convex, so
// the recorded losses must fall monotonically when the learning rate is sane;
// non-finite values raise DivergenceError rather than silently continuing.
TrainResult train(const std::vector<FeatureVector>& features, const Matrix& truth,
                  const std::vector<std::string>& labels, std::uint64_t vocab_hash,
                  const TrainConfig& cfg);

Matrix predict_proba(const LinearModel& model, const std::vector<FeatureVector>& features);

// p >= tau maps to 1. The comparison is inclusive so tau = 0 selects
// everything.
Matrix apply_threshold(const Matrix& probs, double tau);

struct CalibrationPoint {
    double tau = 0.0;
    double f1_micro = 0.0;
    double f1_macro = 0.0;
};

struct CalibrationResult {
    std::vector<CalibrationPoint> points;
    double recommended = 0.5;
};

// 0.05, 0.10, ..., 0.95
std::vector<double> default_threshold_grid();

// Sweeps the grid and recommends the tau with the best micro F1; ties prefer
// the value closest to 0.5, then the smaller tau, so the recommendation is
// deterministic.
CalibrationResult calibrate(const Matrix& truth, const Matrix& probs,
                            const std::vector<double>& grid = default_threshold_grid());

void save_model(const std::string& path, const LinearModel& model);
LinearModel load_model(const std::string& path);

// Bundles preprocessing, vocabulary, and idf choice so a trained model can be
// re-applied to raw text without re-deriving any of them.
struct Featurizer {
    PrepConfig prep;
    Vocabulary vocab;
    IdfVariant variant = IdfVariant::smoothed;

    FeatureVector transform(const std::string& text) const;
    std::vector<FeatureVector> transform_all(const std::vector<std::string>& texts) const;

    static Featurizer fit(const std::vector<std::string>& texts, const PrepConfig& prep,
                          std::uint32_t min_df = 1,
                          IdfVariant variant = IdfVariant::smoothed);
};

void save_featurizer(const std::string& path, const Featurizer& fz);
Featurizer load_featurizer(const std::string& path);

}  // namespace persua
