// Python surface for the pipeline. Thin by design: plain lists in, plain
// structures out, all numerics delegated to the C++ core.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "persua/analytics.hpp"
#include "persua/corpus.hpp"
#include "persua/error.hpp"
#include "persua/features.hpp"
#include "persua/matrix.hpp"
#include "persua/metrics.hpp"
#include "persua/model.hpp"

namespace py = pybind11;
using namespace persua;

namespace {

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return Matrix(0, 0);
    return Matrix::from_rows(rows);
}

std::vector<std::vector<double>> from_matrix(const Matrix& m) {
    std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
    return out;
}

IdfVariant idf_from_string(const std::string& name) {
    if (name == "smoothed") return IdfVariant::smoothed;
    if (name == "raw") return IdfVariant::raw;
    throw ValidationError("idf must be 'smoothed' or 'raw', got '" + name + "'");
}

// featurizer plus weights, the unit a caller actually works with
struct TextModel {
    Featurizer featurizer;
    LinearModel model;
    std::vector<double> loss_history;
    double beta = 0.5;

    std::vector<std::vector<double>> predict_proba(const std::vector<std::string>& texts) const {
        return from_matrix(
            persua::predict_proba(model, featurizer.transform_all(texts)));
    }

    std::vector<std::vector<double>> predict(const std::vector<std::string>& texts,
                                             double tau) const {
        return from_matrix(apply_threshold(
            persua::predict_proba(model, featurizer.transform_all(texts)), tau));
    }
};

TextModel train_text_model(const std::vector<std::string>& texts,
                           const std::vector<std::vector<double>>& truth,
                           const std::vector<std::string>& labels, const PrepConfig& prep,
                           std::uint32_t min_df, const std::string& idf,
                           double learning_rate, std::size_t epochs, double beta) {
    TextModel tm;
    tm.featurizer = Featurizer::fit(texts, prep, min_df, idf_from_string(idf));
    TrainConfig cfg;
    cfg.learning_rate = learning_rate;
    cfg.epochs = epochs;
    cfg.beta = beta;
    auto result = train(tm.featurizer.transform_all(texts), to_matrix(truth), labels,
                        tm.featurizer.vocab.hash(), cfg);
    tm.model = std::move(result.model);
    tm.loss_history = std::move(result.loss_history);
    tm.beta = result.beta;
    return tm;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "persuasion-detection core: text features, classifier, agreement and "
              "trend statistics";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<DegenerateInputError>(m, "DegenerateInputError",
                                                 PyExc_ArithmeticError);
    py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<PrepConfig>(m, "PrepConfig")
        .def(py::init<>())
        .def_readwrite("lowercase", &PrepConfig::lowercase)
        .def_readwrite("strip_punctuation", &PrepConfig::strip_punctuation)
        .def_readwrite("strip_emoji_links", &PrepConfig::strip_emoji_links)
        .def_readwrite("remove_stopwords", &PrepConfig::remove_stopwords)
        .def_readwrite("strip_suffixes", &PrepConfig::strip_suffixes)
        .def_readwrite("stopword_list", &PrepConfig::stopword_list);

    m.def("normalize", &normalize, py::arg("text"), py::arg("config") = PrepConfig{});
    m.def("tokenize", &tokenize, py::arg("text"));
    m.def("preprocess", &preprocess, py::arg("text"), py::arg("config") = PrepConfig{});
    m.def("split_sentences", &split_sentences, py::arg("text"));
    m.def("canonical_bigrams", &canonical_bigrams, py::arg("tokens"));

    py::class_<Vocabulary>(m, "Vocabulary")
        .def_readonly("terms", &Vocabulary::terms)
        .def_readonly("df", &Vocabulary::df)
        .def_readonly("n_docs", &Vocabulary::n_docs)
        .def("__len__", &Vocabulary::size);

    m.def("build_vocabulary", &build_vocabulary, py::arg("docs"), py::arg("min_df") = 1);
    m.def(
        "tfidf",
        [](const std::vector<std::string>& doc, const Vocabulary& vocab,
           const std::string& idf) { return tfidf(doc, vocab, idf_from_string(idf)).entries; },
        py::arg("doc"), py::arg("vocab"), py::arg("idf") = "smoothed");
    m.def(
        "average_tfidf",
        [](const std::vector<std::vector<std::string>>& docs, const Vocabulary& vocab,
           std::size_t k, const std::string& idf) {
            return average_tfidf(docs, vocab, k, idf_from_string(idf));
        },
        py::arg("docs"), py::arg("vocab"), py::arg("k"), py::arg("idf") = "smoothed");

    m.def(
        "asymmetric_bce",
        [](const std::vector<std::vector<double>>& truth,
           const std::vector<std::vector<double>>& probs, double beta, double eps) {
            LossConfig cfg;
            cfg.beta = beta;
            cfg.eps = eps;
            return asymmetric_bce(to_matrix(truth), to_matrix(probs), cfg);
        },
        py::arg("truth"), py::arg("probs"), py::arg("beta") = 0.5, py::arg("eps") = 1e-7);
    m.def(
        "balanced_beta",
        [](const std::vector<std::vector<double>>& truth) {
            return balanced_beta(to_matrix(truth));
        },
        py::arg("truth"));

    py::class_<TextModel>(m, "TextModel")
        .def_readonly("loss_history", &TextModel::loss_history)
        .def_readonly("beta", &TextModel::beta)
        .def_property_readonly("labels",
                               [](const TextModel& tm) { return tm.model.labels; })
        .def_property_readonly(
            "vocabulary", [](const TextModel& tm) { return tm.featurizer.vocab.terms; })
        .def("predict_proba", &TextModel::predict_proba, py::arg("texts"))
        .def("predict", &TextModel::predict, py::arg("texts"), py::arg("threshold") = 0.5);

    m.def("train_text_model", &train_text_model, py::arg("texts"), py::arg("truth"),
          py::arg("labels"), py::arg("prep") = PrepConfig{}, py::arg("min_df") = 1,
          py::arg("idf") = "smoothed", py::arg("learning_rate") = 1.0,
          py::arg("epochs") = 200, py::arg("beta") = -1.0,
          "Fit tf-idf features and a multi-label linear classifier in one step. "
          "A negative beta derives the positive-class weight from the label balance.");

    m.def(
        "f1_micro",
        [](const std::vector<std::vector<double>>& truth,
           const std::vector<std::vector<double>>& pred) {
            return f1_micro(to_matrix(truth), to_matrix(pred));
        },
        py::arg("truth"), py::arg("pred"));
    m.def(
        "f1_macro",
        [](const std::vector<std::vector<double>>& truth,
           const std::vector<std::vector<double>>& pred) {
            return f1_macro(to_matrix(truth), to_matrix(pred));
        },
        py::arg("truth"), py::arg("pred"));
    m.def(
        "accuracy",
        [](const std::vector<std::vector<double>>& truth,
           const std::vector<std::vector<double>>& pred) {
            return accuracy(to_matrix(truth), to_matrix(pred));
        },
        py::arg("truth"), py::arg("pred"));
    m.def(
        "fleiss_kappa",
        [](const std::vector<std::vector<double>>& table) {
            return fleiss_kappa(to_matrix(table));
        },
        py::arg("rating_counts"));

    m.def(
        "calibrate",
        [](const std::vector<std::vector<double>>& truth,
           const std::vector<std::vector<double>>& probs) {
            const auto result = calibrate(to_matrix(truth), to_matrix(probs));
            std::vector<std::tuple<double, double, double>> points;
            for (const auto& pt : result.points)
                points.emplace_back(pt.tau, pt.f1_micro, pt.f1_macro);
            return py::make_tuple(result.recommended, points);
        },
        py::arg("truth"), py::arg("probs"),
        "Sweep the threshold grid; returns (recommended_tau, [(tau, f1_micro, "
        "f1_macro), ...]).");

    py::class_<TrendResult>(m, "TrendResult")
        .def_readonly("s", &TrendResult::s)
        .def_readonly("var_s", &TrendResult::var_s)
        .def_readonly("z", &TrendResult::z)
        .def_readonly("p_value", &TrendResult::p_value)
        .def_readonly("direction", &TrendResult::direction);

    py::class_<PearsonResult>(m, "PearsonResult")
        .def_readonly("r", &PearsonResult::r)
        .def_readonly("p_value", &PearsonResult::p_value)
        .def_readonly("n", &PearsonResult::n);

    m.def("mann_kendall", &mann_kendall, py::arg("values"));
    m.def("pearson", &pearson, py::arg("x"), py::arg("y"));
    m.def("moving_average", &moving_average, py::arg("values"), py::arg("window"));
}
