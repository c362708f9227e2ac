#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

#include "owcsim/mlp.hpp"
#include "owcsim/model_io.hpp"
#include "owcsim/rng.hpp"

using namespace owcsim;
using Catch::Approx;

namespace {

// Small dense model with all hidden units safely on the active side of the
// ReLU so central differences stay valid.
MlpModel handmade_model(MlpOutput output) {
    MlpModel m;
    m.n_in = 4;
    m.n_hidden = 6;
    m.n_out = 5;
    m.output = output;
    m.w1.resize(24);
    m.b1.resize(6);
    m.w2.resize(30);
    m.b2.resize(5);
    for (std::size_t i = 0; i < m.w1.size(); ++i) m.w1[i] = 0.15 * std::sin(1.0 + double(i));
    for (std::size_t j = 0; j < m.b1.size(); ++j) m.b1[j] = 0.8 + 0.05 * double(j);
    for (std::size_t i = 0; i < m.w2.size(); ++i) m.w2[i] = 0.2 * std::cos(0.5 + double(i));
    for (std::size_t k = 0; k < m.b2.size(); ++k) m.b2[k] = 0.1 * double(k) - 0.2;
    m.scaler.log_input = false;
    m.scaler.mean.assign(4, 0.0);
    m.scaler.stddev.assign(4, 1.0);
    return m;
}

struct GradCheckData {
    std::vector<std::vector<double>> x;
    std::vector<int> labels;
    std::vector<std::vector<double>> targets;
};

GradCheckData gradcheck_batch() {
    GradCheckData d;
    for (int s = 0; s < 12; ++s) {
        std::vector<double> row(4);
        for (int i = 0; i < 4; ++i) row[i] = 0.6 * std::sin(0.37 * s + 1.3 * i);
        d.x.push_back(row);
        d.labels.push_back(s % 5);
        std::vector<double> t(5);
        for (int k = 0; k < 5; ++k) t[k] = 0.5 + 0.4 * std::sin(0.9 * s + k);
        d.targets.push_back(t);
    }
    return d;
}

void check_all_gradients(MlpModel m, const GradCheckData& d) {
    MlpGradients g;
    double base = loss_and_gradients(m, d.x, d.labels, d.targets, &g);
    REQUIRE(std::isfinite(base));

    const double eps = 1e-5;
    auto probe = [&](std::vector<double>& w, const std::vector<double>& ga) {
        for (std::size_t p = 0; p < w.size(); ++p) {
            double keep = w[p];
            w[p] = keep + eps;
            double up = loss_and_gradients(m, d.x, d.labels, d.targets, nullptr);
            w[p] = keep - eps;
            double dn = loss_and_gradients(m, d.x, d.labels, d.targets, nullptr);
            w[p] = keep;
            double gn = (up - dn) / (2.0 * eps);
            double denom = std::max({1e-6, std::abs(ga[p]), std::abs(gn)});
            REQUIRE(std::abs(ga[p] - gn) / denom < 1e-4);
        }
    };
    probe(m.w1, g.w1);
    probe(m.b1, g.b1);
    probe(m.w2, g.w2);
    probe(m.b2, g.b2);
}

}  // namespace

TEST_CASE("analytic gradients agree with central differences", "[mlp]") {
    GradCheckData d = gradcheck_batch();
    check_all_gradients(handmade_model(MlpOutput::softmax), d);
    check_all_gradients(handmade_model(MlpOutput::sigmoid), d);
}

TEST_CASE("probability outputs are a proper distribution", "[mlp]") {
    MlpModel m = handmade_model(MlpOutput::softmax);
    BeamPrediction pred = predict_beam(m, {0.3, -0.2, 0.5, 0.1});
    REQUIRE(pred.probs.size() == 5);
    double sum = 0.0;
    for (double p : pred.probs) {
        REQUIRE(p >= 0.0);
        REQUIRE(p <= 1.0);
        sum += p;
    }
    REQUIRE(sum == Approx(1.0).margin(1e-9));
    REQUIRE(pred.probs[pred.index] == *std::max_element(pred.probs.begin(), pred.probs.end()));
}

TEST_CASE("relabeling output rows permutes the probabilities", "[mlp]") {
    MlpModel m = handmade_model(MlpOutput::softmax);
    std::vector<double> raw{0.4, 0.1, -0.3, 0.2};
    BeamPrediction before = predict_beam(m, raw);

    MlpModel sw = m;
    for (int j = 0; j < m.n_hidden; ++j)
        std::swap(sw.w2[0 * m.n_hidden + j], sw.w2[1 * m.n_hidden + j]);
    std::swap(sw.b2[0], sw.b2[1]);
    BeamPrediction after = predict_beam(sw, raw);

    REQUIRE(after.probs[0] == Approx(before.probs[1]).margin(1e-15));
    REQUIRE(after.probs[1] == Approx(before.probs[0]).margin(1e-15));
    for (int k = 2; k < 5; ++k)
        REQUIRE(after.probs[k] == Approx(before.probs[k]).margin(1e-15));
}

TEST_CASE("classifier drives a separable toy problem to zero error", "[mlp]") {
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
    double cx[3] = {-2.0, 0.0, 2.0};
    double cy[3] = {0.0, 2.0, 0.0};
    for (int c = 0; c < 3; ++c) {
        for (int a = -2; a <= 2; ++a) {
            for (int b = -2; b <= 2; ++b) {
                features.push_back({cx[c] + 0.15 * a, cy[c] + 0.15 * b});
                labels.push_back(c);
            }
        }
    }
    TrainOptions opt;
    opt.epochs = 300;
    opt.batch = 25;
    opt.learning_rate = 0.01;
    opt.log_features = false;
    opt.seed = 3;
    TrainResult res = train_classifier(features, labels, 3, 6, opt);
    REQUIRE(classification_accuracy(res.model, features, labels, 0, features.size()) == 1.0);
    REQUIRE(res.epoch_loss.size() == 300);
    REQUIRE(res.epoch_loss.back() < res.epoch_loss.front());
    REQUIRE(res.epoch_loss.back() < 0.05);

    // Same options and seed reproduce the same weights bit for bit.
    TrainResult res2 = train_classifier(features, labels, 3, 6, opt);
    REQUIRE(res2.model.w1 == res.model.w1);
    REQUIRE(res2.model.w2 == res.model.w2);
    REQUIRE(res2.epoch_loss == res.epoch_loss);
}

TEST_CASE("position regressor recovers normalized coordinates", "[mlp]") {
    RngStream rng = derive_stream(9, stream_id::training, 5);
    std::vector<std::vector<double>> features;
    std::vector<std::vector<double>> targets;
    for (int i = 0; i < 300; ++i) {
        double u = rng.uniform(), v = rng.uniform();
        features.push_back({u, v});
        targets.push_back({u, v});
    }
    TrainOptions opt;
    opt.epochs = 300;
    opt.batch = 64;
    opt.learning_rate = 0.01;
    opt.log_features = false;
    TrainResult res = train_regressor(features, targets, 8, opt);
    double err = 0.0;
    for (int i = 0; i < 300; ++i) {
        auto [px, py] = predict_position(res.model, features[i]);
        REQUIRE(px >= 0.0);
        REQUIRE(px <= 1.0);
        REQUIRE(py >= 0.0);
        REQUIRE(py <= 1.0);
        err += std::abs(px - targets[i][0]) + std::abs(py - targets[i][1]);
    }
    REQUIRE(err / 600.0 < 0.2);

    REQUIRE_THROWS_AS(train_regressor(features, {{0.5}}, 8, opt), std::invalid_argument);
    std::vector<std::vector<double>> bad3(300, std::vector<double>{0.1, 0.2, 0.3});
    REQUIRE_THROWS_AS(train_regressor(features, bad3, 8, opt), std::invalid_argument);
}

TEST_CASE("training aborts cleanly when the loss stops being finite", "[mlp]") {
    // An absurd learning rate blows the logits up to inf within an epoch, so
    // the softmax shift produces NaN and the epoch-loss guard must fire.
    RngStream rng = derive_stream(11, 3);
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
    for (int i = 0; i < 40; ++i) {
        features.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
        labels.push_back(i % 3);
    }
    TrainOptions opt;
    opt.epochs = 5;
    opt.batch = 8;
    opt.learning_rate = 1e200;
    opt.log_features = false;
    REQUIRE_THROWS_AS(train_classifier(features, labels, 3, 6, opt), std::runtime_error);
}

TEST_CASE("feature scaling standardizes and guards degenerate columns", "[mlp]") {
    std::vector<std::vector<double>> rows{{2.0, 5.0}, {2.0, 9.0}};
    FeatureScaler sc = FeatureScaler::fit(rows, false);
    std::vector<double> out = sc.apply({2.0, 9.0});
    REQUIRE(out[0] == Approx(0.0).margin(1e-15));  // constant feature, unit guard std
    REQUIRE(out[1] == Approx(1.0).epsilon(1e-12));

    // Dark photodiode reads floor instead of -inf under the log transform.
    FeatureScaler lg = FeatureScaler::fit({{1e-6, 0.0}, {1e-4, 1e-7}}, true);
    std::vector<double> mapped = lg.apply({1e-5, 0.0});
    REQUIRE(std::isfinite(mapped[0]));
    REQUIRE(std::isfinite(mapped[1]));

    REQUIRE_THROWS_AS(sc.apply({1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(FeatureScaler::fit({}, false), std::invalid_argument);
}

TEST_CASE("interface guards on prediction and scoring", "[mlp]") {
    MlpModel cls = handmade_model(MlpOutput::softmax);
    REQUIRE_THROWS_AS(predict_beam(cls, {1.0, 2.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(predict_position(cls, {1.0, 2.0, 3.0, 4.0}), std::invalid_argument);

    std::vector<std::vector<double>> f(4, std::vector<double>{0.0, 0.0, 0.0, 0.0});
    std::vector<int> l(4, 0);
    REQUIRE_THROWS_AS(classification_accuracy(cls, f, l, 2, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(classification_accuracy(cls, f, l, 0, 9), std::invalid_argument);

    GradCheckData d = gradcheck_batch();
    std::vector<int> bad = d.labels;
    bad[0] = 7;
    REQUIRE_THROWS_AS(loss_and_gradients(cls, d.x, bad, d.targets, nullptr),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(loss_and_gradients(cls, {}, {}, {}, nullptr), std::invalid_argument);
}

TEST_CASE("models survive a serialization round trip", "[mlp]") {
    MlpModel m = handmade_model(MlpOutput::softmax);
    nlohmann::json j = mlp_to_json(m);
    MlpModel back = mlp_from_json(j);
    REQUIRE(mlp_to_json(back).dump() == j.dump());

    std::vector<double> raw{0.2, -0.4, 0.7, 0.0};
    BeamPrediction a = predict_beam(m, raw);
    BeamPrediction b = predict_beam(back, raw);
    REQUIRE(a.index == b.index);
    REQUIRE(a.probs == b.probs);

    const char* path = "mlp_roundtrip_tmp.json";
    save_mlp(m, path);
    MlpModel loaded = load_mlp(path);
    REQUIRE(predict_beam(loaded, raw).probs == a.probs);
    std::remove(path);

    nlohmann::json wrong = j;
    wrong["format"] = "not-a-model";
    REQUIRE_THROWS_AS(mlp_from_json(wrong), std::runtime_error);
    nlohmann::json trunc = j;
    trunc["w1"] = std::vector<double>{1.0, 2.0};
    REQUIRE_THROWS_AS(mlp_from_json(trunc), std::runtime_error);
}
