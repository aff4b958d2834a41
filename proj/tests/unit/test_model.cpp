#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "persua/error.hpp"
#include "persua/matrix.hpp"
#include "persua/model.hpp"
#include "persua/rng.hpp"

using namespace persua;

namespace {

Matrix random_binary(Rng& rng, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.bernoulli(0.4) ? 1.0 : 0.0;
    return m;
}

Matrix random_probs(Rng& rng, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            m(r, c) = 0.01 + 0.98 * rng.next_unit();
    return m;
}

double plain_bce(const Matrix& truth, const Matrix& probs) {
    double total = 0.0;
    for (std::size_t r = 0; r < truth.rows(); ++r)
        for (std::size_t c = 0; c < truth.cols(); ++c) {
            const double y = truth(r, c);
            const double p = probs(r, c);
            total += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
        }
    return total / static_cast<double>(truth.size());
}

FeatureVector fv(std::vector<std::pair<std::uint32_t, double>> entries, std::size_t dim) {
    FeatureVector v;
    v.entries = std::move(entries);
    v.dim = dim;
    return v;
}

// two clearly separable token classes
struct Toy {
    std::vector<FeatureVector> features;
    Matrix truth;
};

Toy separable_toy(std::size_t n) {
    Toy toy;
    toy.truth = Matrix(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const bool pos = i % 2 == 0;
        toy.features.push_back(fv({{pos ? 0u : 1u, 1.0}}, 2));
        toy.truth(i, 0) = pos ? 1.0 : 0.0;
    }
    return toy;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("weighted bce hand value") {
    const Matrix truth = Matrix::from_rows({{1.0, 0.0}});
    const Matrix probs = Matrix::from_rows({{0.8, 0.2}});
    LossConfig cfg;
    cfg.beta = 0.75;
    CHECK(asymmetric_bce(truth, probs, cfg) == doctest::Approx(0.111572).epsilon(1e-5));
}

TEST_CASE("beta 0.5 halves the plain bce") {
    Rng rng(3);
    LossConfig cfg;
    cfg.beta = 0.5;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t rows = 1 + rng.next_below(6);
        const std::size_t cols = 1 + rng.next_below(4);
        const Matrix truth = random_binary(rng, rows, cols);
        const Matrix probs = random_probs(rng, rows, cols);
        CHECK(asymmetric_bce(truth, probs, cfg) ==
              doctest::Approx(0.5 * plain_bce(truth, probs)).epsilon(1e-12));
    }
}

TEST_CASE("loss is affine in beta") {
    Rng rng(4);
    const Matrix truth = random_binary(rng, 5, 3);
    const Matrix probs = random_probs(rng, 5, 3);
    LossConfig cfg;
    cfg.beta = 1.0;
    const double pos_part = asymmetric_bce(truth, probs, cfg);
    cfg.beta = 0.0;
    const double neg_part = asymmetric_bce(truth, probs, cfg);
    for (double beta : {0.1, 0.25, 0.6, 0.9}) {
        cfg.beta = beta;
        CHECK(asymmetric_bce(truth, probs, cfg) ==
              doctest::Approx(beta * pos_part + (1.0 - beta) * neg_part).epsilon(1e-12));
    }
}

TEST_CASE("probability clamping keeps the loss finite") {
    const Matrix truth = Matrix::from_rows({{1.0, 0.0}});
    const Matrix probs = Matrix::from_rows({{0.0, 1.0}});  // worst case
    CHECK(std::isfinite(asymmetric_bce(truth, probs, LossConfig{})));
}

TEST_CASE("loss input validation") {
    LossConfig cfg;
    cfg.beta = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.beta = -0.1;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);

    const Matrix truth = Matrix::from_rows({{1.0}});
    const Matrix probs = Matrix::from_rows({{0.5, 0.5}});
    CHECK_THROWS_AS(asymmetric_bce(truth, probs, LossConfig{}), ValidationError);
}

TEST_CASE("balanced beta is one minus the positive rate") {
    const Matrix truth = Matrix::from_rows({{1.0, 0.0}, {0.0, 0.0}});
    CHECK(balanced_beta(truth) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("logit gradient hand value") {
    const Matrix truth = Matrix::from_rows({{1.0, 0.0}});
    const Matrix probs = Matrix::from_rows({{0.8, 0.2}});
    LossConfig cfg;
    cfg.beta = 0.75;
    const Matrix g = loss_logit_gradient(truth, probs, cfg);
    CHECK(g(0, 0) == doctest::Approx(0.75 * (0.8 - 1.0) / 2.0).epsilon(1e-12));
    CHECK(g(0, 1) == doctest::Approx(0.25 * (0.2 - 0.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("forward probs with zero weights is one half") {
    const auto features = std::vector<FeatureVector>{fv({{0, 3.0}}, 2), fv({}, 2)};
    const Matrix probs = forward_probs(features, Matrix(3, 1));
    CHECK(probs(0, 0) == doctest::Approx(0.5));
    CHECK(probs(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("forward probs applies weights and bias") {
    Matrix w(3, 1);  // 2 features + bias
    w(0, 0) = 1.0;
    w(1, 0) = -1.0;
    w(2, 0) = 0.5;
    const Matrix probs = forward_probs({fv({{0, 2.0}}, 2)}, w);
    CHECK(probs(0, 0) == doctest::Approx(sigmoid(2.0 * 1.0 + 0.5)).epsilon(1e-12));
}

TEST_CASE("weight gradient matches finite differences") {
    Rng rng(17);
    const std::size_t n = 6, dim = 3, labels = 2;
    std::vector<FeatureVector> features;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<std::uint32_t, double>> entries;
        for (std::uint32_t d = 0; d < dim; ++d)
            if (rng.bernoulli(0.7)) entries.push_back({d, rng.next_unit() * 2.0 - 1.0});
        features.push_back(fv(std::move(entries), dim));
    }
    const Matrix truth = random_binary(rng, n, labels);
    Matrix weights(dim + 1, labels);
    for (std::size_t r = 0; r < weights.rows(); ++r)
        for (std::size_t c = 0; c < labels; ++c)
            weights(r, c) = rng.next_unit() - 0.5;

    LossConfig cfg;
    cfg.beta = 0.7;
    const Matrix grad = weight_gradient(features, truth, weights, cfg);
    REQUIRE(grad.rows() == dim + 1);
    REQUIRE(grad.cols() == labels);

    const double h = 1e-5;
    for (std::size_t r = 0; r < weights.rows(); ++r)
        for (std::size_t c = 0; c < labels; ++c) {
            Matrix up = weights, down = weights;
            up(r, c) += h;
            down(r, c) -= h;
            const double fd = (asymmetric_bce(truth, forward_probs(features, up), cfg) -
                               asymmetric_bce(truth, forward_probs(features, down), cfg)) /
                              (2.0 * h);
            CHECK(grad(r, c) == doctest::Approx(fd).epsilon(1e-6));
        }
}

TEST_CASE("training loss falls monotonically on separable data") {
    const Toy toy = separable_toy(20);
    TrainConfig cfg;
    cfg.learning_rate = 5.0;
    cfg.epochs = 50;
    cfg.beta = 0.5;
    const auto result = train(toy.features, toy.truth, {"persuasive"}, 1, cfg);
    REQUIRE(result.loss_history.size() == 50);
    for (std::size_t i = 1; i < result.loss_history.size(); ++i)
        CHECK(result.loss_history[i] < result.loss_history[i - 1]);

    const Matrix probs = predict_proba(result.model, toy.features);
    const Matrix pred = apply_threshold(probs, 0.5);
    for (std::size_t i = 0; i < toy.features.size(); ++i)
        CHECK(pred(i, 0) == toy.truth(i, 0));
}

TEST_CASE("negative beta derives the balanced value") {
    const Toy toy = separable_toy(8);  // half positive
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.beta = -1.0;
    CHECK(train(toy.features, toy.truth, {"p"}, 1, cfg).beta == doctest::Approx(0.5));
    cfg.beta = 0.8;
    CHECK(train(toy.features, toy.truth, {"p"}, 1, cfg).beta == doctest::Approx(0.8));
}

TEST_CASE("training rejects bad inputs") {
    const Toy toy = separable_toy(4);
    TrainConfig cfg;
    CHECK_THROWS_AS(train({}, Matrix(0, 1), {"p"}, 1, cfg), ValidationError);
    CHECK_THROWS_AS(train(toy.features, Matrix(3, 1), {"p"}, 1, cfg), ValidationError);
    CHECK_THROWS_AS(train(toy.features, toy.truth, {}, 1, cfg), ValidationError);
    cfg.epochs = 0;
    CHECK_THROWS_AS(train(toy.features, toy.truth, {"p"}, 1, cfg), ValidationError);
    cfg.epochs = 1;
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(train(toy.features, toy.truth, {"p"}, 1, cfg), ValidationError);
}

TEST_CASE("diverging weights raise instead of returning garbage") {
    TrainConfig cfg;
    cfg.learning_rate = 1e200;
    cfg.epochs = 5;
    cfg.beta = 0.5;
    Matrix truth(1, 1);
    truth(0, 0) = 1.0;
    CHECK_THROWS_AS(train({fv({{0, 1e200}}, 1)}, truth, {"p"}, 1, cfg), DivergenceError);
}

TEST_CASE("threshold comparison is inclusive") {
    const Matrix probs = Matrix::from_rows({{0.5, 0.4999}});
    const Matrix pred = apply_threshold(probs, 0.5);
    CHECK(pred(0, 0) == 1.0);
    CHECK(pred(0, 1) == 0.0);
}

TEST_CASE("positive prediction count never rises with tau") {
    Rng rng(8);
    const Matrix probs = random_probs(rng, 20, 5);
    std::size_t prev = probs.size() + 1;
    for (double tau : default_threshold_grid()) {
        const Matrix pred = apply_threshold(probs, tau);
        std::size_t count = 0;
        for (std::size_t r = 0; r < pred.rows(); ++r)
            for (std::size_t c = 0; c < pred.cols(); ++c) count += pred(r, c) == 1.0;
        CHECK(count <= prev);
        prev = count;
    }
}

TEST_CASE("threshold grid is the documented sweep") {
    const auto grid = default_threshold_grid();
    REQUIRE(grid.size() == 19);
    CHECK(grid.front() == doctest::Approx(0.05));
    CHECK(grid.back() == doctest::Approx(0.95));
}

TEST_CASE("calibration recommends the midpoint on perfect probabilities") {
    const Matrix truth = Matrix::from_rows({{1.0}, {0.0}, {1.0}, {0.0}});
    const Matrix probs = Matrix::from_rows({{0.99}, {0.01}, {0.98}, {0.02}});
    // every grid point scores f1 = 1, so the tie breaks to 0.5
    const auto result = calibrate(truth, probs);
    CHECK(result.recommended == doctest::Approx(0.5));
    for (const auto& pt : result.points) CHECK(pt.f1_micro == doctest::Approx(1.0));
}

TEST_CASE("calibration plateau resolves toward the midpoint") {
    const Matrix truth = Matrix::from_rows({{1.0}, {1.0}, {0.0}, {0.0}});
    const Matrix probs = Matrix::from_rows({{0.7}, {0.9}, {0.6}, {0.1}});
    // f1 = 1 exactly for tau in {0.65, 0.70}; 0.65 is closer to 0.5
    CHECK(calibrate(truth, probs).recommended == doctest::Approx(0.65));
}

TEST_CASE("model file round trip preserves predictions") {
    const auto dir = std::filesystem::temp_directory_path() / "persua_test_model";
    std::filesystem::create_directories(dir);
    const Toy toy = separable_toy(10);
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.learning_rate = 3.0;
    const auto result = train(toy.features, toy.truth, {"persuasive"}, 77, cfg);

    const auto path = (dir / "model.json").string();
    save_model(path, result.model);
    const LinearModel back = load_model(path);
    CHECK(back.labels == result.model.labels);
    CHECK(back.vocab_hash == result.model.vocab_hash);
    CHECK(back.dim == result.model.dim);
    CHECK(back.weights == result.model.weights);
    CHECK(predict_proba(back, toy.features) == predict_proba(result.model, toy.features));
}

TEST_CASE("featurizer round trip preserves transforms") {
    const auto dir = std::filesystem::temp_directory_path() / "persua_test_fz";
    std::filesystem::create_directories(dir);
    const std::vector<std::string> texts = {"Vote for change now", "change is coming",
                                            "nothing here"};
    PrepConfig prep;
    const auto fz = Featurizer::fit(texts, prep, 1, IdfVariant::raw);
    const auto path = (dir / "featurizer.json").string();
    save_featurizer(path, fz);
    const Featurizer back = load_featurizer(path);
    CHECK(back.vocab.terms == fz.vocab.terms);
    CHECK(back.vocab.df == fz.vocab.df);
    CHECK(back.vocab.hash() == fz.vocab.hash());
    CHECK(back.variant == fz.variant);
    for (const auto& t : texts) {
        const auto a = fz.transform(t);
        const auto b = back.transform(t);
        CHECK(a.entries == b.entries);
        CHECK(a.dim == b.dim);
    }
}

TEST_CASE("model loader rejects tampered files") {
    const auto dir = std::filesystem::temp_directory_path() / "persua_test_tamper";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "model.json").string();
    {
        std::ofstream out(path);
        out << "{\"format_version\":1,\"labels\":[\"a\",\"a\"],\"vocab_hash\":1,"
               "\"dim\":0,\"weights\":[[0.0],[0.0]]}";
    }
    CHECK_THROWS(load_model(path));
    {
        std::ofstream out(path);
        out << "not json";
    }
    CHECK_THROWS_AS(load_model(path), ParseError);
}

}  // TEST_SUITE
