#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "persua/error.hpp"
#include "persua/metrics.hpp"
#include "persua/model.hpp"

namespace persua {

using nlohmann::json;

void LossConfig::validate() const {
    if (!(beta >= 0.0 && beta <= 1.0))
        throw ValidationError("loss beta must lie in [0, 1], got " + std::to_string(beta));
    if (!(eps > 0.0 && eps < 0.5))
        throw ValidationError("loss eps must lie in (0, 0.5), got " + std::to_string(eps));
}

namespace {

double require_indicator(double y) {
    if (y == 0.0 || y == 1.0) return y;
    throw ValidationError("truth entries must be 0 or 1, got " + std::to_string(y));
}

double require_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("probabilities must lie in [0, 1], got " + std::to_string(p));
    return p;
}

}  // namespace

double balanced_beta(const Matrix& truth) {
    const std::size_t cells = truth.rows() * truth.cols();
    if (cells == 0) throw ValidationError("cannot derive beta from an empty matrix");
    double positives = 0.0;
    for (std::size_t i = 0; i < truth.rows(); ++i)
        for (std::size_t j = 0; j < truth.cols(); ++j)
            positives += require_indicator(truth(i, j));
    return 1.0 - positives / static_cast<double>(cells);
}

double asymmetric_bce(const Matrix& truth, const Matrix& probs, const LossConfig& cfg) {
    cfg.validate();
    require_same_shape(truth, probs, "loss");
    const std::size_t cells = truth.rows() * truth.cols();
    if (cells == 0) throw ValidationError("loss needs at least one entry");

    double total = 0.0;
    for (std::size_t i = 0; i < truth.rows(); ++i) {
        for (std::size_t j = 0; j < truth.cols(); ++j) {
            const double y = require_indicator(truth(i, j));
            double p = require_probability(probs(i, j));
            p = std::min(std::max(p, cfg.eps), 1.0 - cfg.eps);
            const double w = cfg.beta * y + (1.0 - cfg.beta) * (1.0 - y);
            total += w * -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
        }
    }
    const double loss = total / static_cast<double>(cells);
    if (!std::isfinite(loss)) throw DivergenceError("loss is not finite");
    return loss;
}

Matrix loss_logit_gradient(const Matrix& truth, const Matrix& probs,
                           const LossConfig& cfg) {
    cfg.validate();
    require_same_shape(truth, probs, "loss gradient");
    const std::size_t cells = truth.rows() * truth.cols();
    if (cells == 0) throw ValidationError("loss gradient needs at least one entry");

    Matrix grad(truth.rows(), truth.cols());
    for (std::size_t i = 0; i < truth.rows(); ++i) {
        for (std::size_t j = 0; j < truth.cols(); ++j) {
            const double y = require_indicator(truth(i, j));
            const double p = require_probability(probs(i, j));
            const double w = cfg.beta * y + (1.0 - cfg.beta) * (1.0 - y);
            grad(i, j) = w * (p - y) / static_cast<double>(cells);
        }
    }
    return grad;
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

void check_features(const std::vector<FeatureVector>& features, std::size_t dim) {
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].dim != dim)
            throw ValidationError("feature vector " + std::to_string(i) + " has dim " +
                                  std::to_string(features[i].dim) + ", expected " +
                                  std::to_string(dim));
        std::uint32_t prev = 0;
        bool first = true;
        for (const auto& [idx, v] : features[i].entries) {
            if (idx >= dim)
                throw ValidationError("feature index out of range in vector " +
                                      std::to_string(i));
            if (!first && idx <= prev)
                throw ValidationError("feature indices must be strictly increasing");
            if (!std::isfinite(v))
                throw ValidationError("feature values must be finite");
            prev = idx;
            first = false;
        }
    }
}

Matrix forward(const std::vector<FeatureVector>& features, const Matrix& weights,
               std::size_t dim, std::size_t n_labels) {
    Matrix probs(features.size(), n_labels);
    for (std::size_t i = 0; i < features.size(); ++i) {
        for (std::size_t j = 0; j < n_labels; ++j) {
            double z = weights(dim, j);  // bias row
            for (const auto& [idx, v] : features[i].entries) z += v * weights(idx, j);
            if (!std::isfinite(z)) throw DivergenceError("logit overflow during forward pass");
            probs(i, j) = sigmoid(z);
        }
    }
    return probs;
}

}  // namespace

Matrix forward_probs(const std::vector<FeatureVector>& features, const Matrix& weights) {
    if (weights.rows() == 0) throw ValidationError("weight matrix must have a bias row");
    const std::size_t dim = weights.rows() - 1;
    check_features(features, dim);
    return forward(features, weights, dim, weights.cols());
}

Matrix weight_gradient(const std::vector<FeatureVector>& features, const Matrix& truth,
                       const Matrix& weights, const LossConfig& cfg) {
    cfg.validate();
    if (weights.rows() == 0) throw ValidationError("weight matrix must have a bias row");
    const std::size_t dim = weights.rows() - 1;
    const std::size_t n_labels = weights.cols();
    check_features(features, dim);
    if (features.size() != truth.rows() || truth.cols() != n_labels)
        throw ValidationError("truth shape does not match features and weights");
    const std::size_t cells = truth.rows() * truth.cols();
    if (cells == 0) throw ValidationError("gradient needs at least one entry");

    const Matrix probs = forward(features, weights, dim, n_labels);
    Matrix grad(dim + 1, n_labels);
    for (std::size_t i = 0; i < features.size(); ++i) {
        for (std::size_t j = 0; j < n_labels; ++j) {
            const double y = truth(i, j);
            if (y != 0.0 && y != 1.0)
                throw ValidationError("truth entries must be 0 or 1");
            const double w = cfg.beta * y + (1.0 - cfg.beta) * (1.0 - y);
            const double d = w * (probs(i, j) - y) / static_cast<double>(cells);
            for (const auto& [idx, v] : features[i].entries) grad(idx, j) += v * d;
            grad(dim, j) += d;
        }
    }
    return grad;
}

TrainResult train(const std::vector<FeatureVector>& features, const Matrix& truth,
                  const std::vector<std::string>& labels, std::uint64_t vocab_hash,
                  const TrainConfig& cfg) {
    if (features.empty()) throw ValidationError("training needs at least one instance");
    if (features.size() != truth.rows())
        throw ValidationError("feature count " + std::to_string(features.size()) +
                              " does not match truth rows " + std::to_string(truth.rows()));
    if (labels.empty()) throw ValidationError("training needs at least one label");
    if (truth.cols() != labels.size())
        throw ValidationError("truth has " + std::to_string(truth.cols()) +
                              " columns but " + std::to_string(labels.size()) +
                              " labels were given");
    if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate))
        throw ValidationError("learning rate must be positive and finite");
    if (cfg.epochs == 0) throw ValidationError("epochs must be >= 1");

    const std::size_t dim = features.front().dim;
    check_features(features, dim);

    LossConfig loss_cfg;
    loss_cfg.beta = cfg.beta < 0.0 ? balanced_beta(truth) : cfg.beta;
    loss_cfg.eps = cfg.eps;
    loss_cfg.validate();

    TrainResult result;
    result.beta = loss_cfg.beta;
    result.model.labels = labels;
    result.model.vocab_hash = vocab_hash;
    result.model.dim = dim;
    result.model.weights = Matrix(dim + 1, labels.size());

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const Matrix probs = forward(features, result.model.weights, dim, labels.size());
        result.loss_history.push_back(asymmetric_bce(truth, probs, loss_cfg));

        const Matrix grad = weight_gradient(features, truth, result.model.weights, loss_cfg);
        for (std::size_t r = 0; r < dim + 1; ++r) {
            for (std::size_t j = 0; j < labels.size(); ++j) {
                const double next = result.model.weights(r, j) - cfg.learning_rate * grad(r, j);
                if (!std::isfinite(next))
                    throw DivergenceError("weights diverged at epoch " + std::to_string(epoch));
                result.model.weights(r, j) = next;
            }
        }
    }
    return result;
}

Matrix predict_proba(const LinearModel& model, const std::vector<FeatureVector>& features) {
    if (model.weights.rows() != model.dim + 1 ||
        model.weights.cols() != model.labels.size())
        throw ValidationError("model weight shape does not match its dim and labels");
    check_features(features, model.dim);
    return forward(features, model.weights, model.dim, model.labels.size());
}

Matrix apply_threshold(const Matrix& probs, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0))
        throw ValidationError("threshold must lie in [0, 1], got " + std::to_string(tau));
    Matrix out(probs.rows(), probs.cols());
    for (std::size_t i = 0; i < probs.rows(); ++i)
        for (std::size_t j = 0; j < probs.cols(); ++j)
            out(i, j) = require_probability(probs(i, j)) >= tau ? 1.0 : 0.0;
    return out;
}

std::vector<double> default_threshold_grid() {
    std::vector<double> grid;
    // i * 0.05 drifts an ulp above the decimal value for several i; a single
    // division keeps each point equal to the literal a caller would write
    for (int i = 1; i <= 19; ++i) grid.push_back(static_cast<double>(5 * i) / 100.0);
    return grid;
}

CalibrationResult calibrate(const Matrix& truth, const Matrix& probs,
                            const std::vector<double>& grid) {
    require_same_shape(truth, probs, "calibration");
    if (grid.empty()) throw ValidationError("calibration grid must be non-empty");

    CalibrationResult result;
    bool have_best = false;
    CalibrationPoint best;
    for (double tau : grid) {
        if (!(tau >= 0.0 && tau <= 1.0))
            throw ValidationError("calibration grid thresholds must lie in [0, 1]");
        const Matrix pred = apply_threshold(probs, tau);
        CalibrationPoint pt;
        pt.tau = tau;
        pt.f1_micro = f1_micro(truth, pred);
        pt.f1_macro = f1_macro(truth, pred);
        result.points.push_back(pt);

        bool better = false;
        if (!have_best || pt.f1_micro > best.f1_micro) {
            better = true;
        } else if (pt.f1_micro == best.f1_micro) {
            const double d_new = std::fabs(pt.tau - 0.5);
            const double d_old = std::fabs(best.tau - 0.5);
            better = d_new < d_old || (d_new == d_old && pt.tau < best.tau);
        }
        if (better) {
            best = pt;
            have_best = true;
        }
    }
    result.recommended = best.tau;
    return result;
}

void save_model(const std::string& path, const LinearModel& model) {
    if (model.weights.rows() != model.dim + 1 ||
        model.weights.cols() != model.labels.size())
        throw ValidationError("model weight shape does not match its dim and labels");
    json j;
    j["format_version"] = 1;
    j["labels"] = model.labels;
    j["vocab_hash"] = model.vocab_hash;
    j["dim"] = model.dim;
    j["weights"] = model.weights.data();
    std::ofstream out(path);
    if (!out) throw IoError("cannot write model file: " + path);
    out << j.dump() << "\n";
}

LinearModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("bad model JSON: ") + e.what());
    }
    LinearModel model;
    try {
        if (j.at("format_version").get<int>() != 1)
            throw ParseError("unsupported model format version");
        model.labels = j.at("labels").get<std::vector<std::string>>();
        model.vocab_hash = j.at("vocab_hash").get<std::uint64_t>();
        model.dim = j.at("dim").get<std::size_t>();
        const auto values = j.at("weights").get<std::vector<double>>();
        if (values.size() != (model.dim + 1) * model.labels.size())
            throw ParseError("model weight count does not match dim and labels");
        model.weights = Matrix(model.dim + 1, model.labels.size());
        std::copy(values.begin(), values.end(), model.weights.data().begin());
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad model JSON: ") + e.what());
    }
    if (model.labels.empty()) throw ParseError("model has no labels");
    std::set<std::string> unique(model.labels.begin(), model.labels.end());
    if (unique.size() != model.labels.size()) throw ParseError("model labels repeat");
    return model;
}

FeatureVector Featurizer::transform(const std::string& text) const {
    return tfidf(preprocess(text, prep), vocab, variant);
}

std::vector<FeatureVector> Featurizer::transform_all(
    const std::vector<std::string>& texts) const {
    std::vector<FeatureVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(transform(t));
    return out;
}

Featurizer Featurizer::fit(const std::vector<std::string>& texts, const PrepConfig& prep,
                           std::uint32_t min_df, IdfVariant variant) {
    std::vector<std::vector<std::string>> docs;
    docs.reserve(texts.size());
    for (const auto& t : texts) docs.push_back(preprocess(t, prep));
    Featurizer fz;
    fz.prep = prep;
    fz.vocab = build_vocabulary(docs, min_df);
    fz.variant = variant;
    return fz;
}

void save_featurizer(const std::string& path, const Featurizer& fz) {
    json j;
    j["format_version"] = 1;
    j["prep"] = json::parse(fz.prep.to_json());
    j["idf"] = fz.variant == IdfVariant::smoothed ? "smoothed" : "raw";
    j["terms"] = fz.vocab.terms;
    j["df"] = fz.vocab.df;
    j["n_docs"] = fz.vocab.n_docs;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write featurizer file: " + path);
    out << j.dump() << "\n";
}

Featurizer load_featurizer(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open featurizer file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("bad featurizer JSON: ") + e.what());
    }
    Featurizer fz;
    try {
        if (j.at("format_version").get<int>() != 1)
            throw ParseError("unsupported featurizer format version");
        fz.prep = PrepConfig::from_json(j.at("prep").dump());
        const auto idf_name = j.at("idf").get<std::string>();
        if (idf_name == "smoothed") fz.variant = IdfVariant::smoothed;
        else if (idf_name == "raw") fz.variant = IdfVariant::raw;
        else throw ParseError("unknown idf variant '" + idf_name + "'");
        fz.vocab.terms = j.at("terms").get<std::vector<std::string>>();
        fz.vocab.df = j.at("df").get<std::vector<std::uint32_t>>();
        fz.vocab.n_docs = j.at("n_docs").get<std::size_t>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad featurizer JSON: ") + e.what());
    }
    if (fz.vocab.df.size() != fz.vocab.terms.size())
        throw ParseError("featurizer df count does not match terms");
    for (std::size_t i = 0; i + 1 < fz.vocab.terms.size(); ++i)
        if (!(fz.vocab.terms[i] < fz.vocab.terms[i + 1]))
            throw ParseError("featurizer terms must be strictly increasing");
    for (std::size_t i = 0; i < fz.vocab.terms.size(); ++i)
        fz.vocab.index.emplace(fz.vocab.terms[i], static_cast<std::uint32_t>(i));
    return fz;
}

}  // namespace persua
