#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fairlens/synthetic.hpp"
#include "fairlens/trainer.hpp"

using namespace fairlens;
using namespace fairlens::trainer;

namespace {

// 20 points: positives around (2, 1), negatives around (-2, -1), gap of at least 1 along x.
std::pair<FeatureSet, LabelChannel> separable() {
    FeatureSet fs;
    fs.names = {"a", "b"};
    LabelChannel y{"y", {}};
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        int label = i % 2;
        double sign = label ? 1.0 : -1.0;
        auto id = "p" + std::to_string(10 + i);
        fs.ids.push_back(id);
        fs.rows.push_back({sign * (1.0 + 2.0 * u(rng)), sign * 0.5 + 2.0 * (u(rng) - 0.5)});
        y.labels[id] = label;
    }
    return {fs, y};
}

double oracle_loss(const std::vector<double>& w, const std::vector<std::vector<double>>& x, const std::vector<int>& y, double l2) {
    long double total = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        long double z = w.back();
        for (std::size_t d = 0; d < x[i].size(); ++d) z += w[d] * x[i][d];
        long double p = 1.0L / (1.0L + std::exp(-z));
        total += y[i] ? -std::log(p) : -std::log(1.0L - p);
    }
    long double reg = 0;
    for (std::size_t d = 0; d + 1 < w.size(); ++d) reg += w[d] * w[d];
    return double(total / x.size() + 0.5L * l2 * reg);
}

} // namespace

TEST(Train, ZeroEpochsGivesHalf) {
    auto [fs, y] = separable();
    TrainConfig cfg;
    cfg.epochs = 0;
    auto m = train(fs, y, cfg);
    for (double w : m.weights) EXPECT_EQ(w, 0.0);
    auto pm = predict_proba(m, fs, "zero");
    for (std::size_t r = 0; r < pm.rows(); ++r) {
        EXPECT_EQ(pm.prob(r, 0, 0), 0.5);
        EXPECT_EQ(pm.prob(r, 0, 1), 0.5);
    }
}

TEST(Train, SeparableFixtureReachesPerfectAccuracy) {
    auto [fs, y] = separable();
    TrainConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.epochs = 500;
    auto m = train(fs, y, cfg);
    EXPECT_EQ(training_accuracy(m, fs, y), 1.0);
}

TEST(Train, LossDecreasesAndRunsAreBitIdentical) {
    auto [fs, y] = separable();
    TrainConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.epochs = 200;
    std::vector<double> losses;
    auto m1 = train(fs, y, cfg, [&](std::size_t, double l) { losses.push_back(l); });
    ASSERT_EQ(losses.size(), 200u);
    EXPECT_NEAR(losses.front(), std::log(2.0), 1e-15);
    for (std::size_t i = 1; i < losses.size(); ++i) EXPECT_LE(losses[i], losses[i - 1]);
    auto m2 = train(fs, y, cfg);
    EXPECT_EQ(m1, m2);
}

TEST(Train, Errors) {
    auto [fs, y] = separable();
    auto bad = fs;
    bad.rows[3].push_back(1.0);
    EXPECT_THROW(train(bad, y, TrainConfig{}), ShapeError);
    auto short_y = y;
    short_y.labels.erase("p10");
    EXPECT_THROW(train(fs, short_y, TrainConfig{}), CoverageError);
    TrainConfig cfg;
    cfg.learning_rate = 0.0;
    EXPECT_THROW(train(fs, y, cfg), ConfigError);
}

TEST(Gradient, MatchesCentralDifferences) {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> n(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    const double h = 1e-5;
    double worst = 0.0;
    for (int batch = 0; batch < 20; ++batch) {
        std::vector<std::vector<double>> x(16, std::vector<double>(5));
        std::vector<int> y(16);
        for (auto& r : x)
            for (auto& v : r) v = n(rng);
        for (auto& v : y) v = coin(rng);
        std::vector<double> w(6);
        for (auto& v : w) v = 0.5 * n(rng);
        double l2 = batch % 2 ? 0.1 : 0.0;
        EXPECT_NEAR(loss(w, x, y, l2), oracle_loss(w, x, y, l2), 1e-12);
        auto g = gradient(w, x, y, l2);
        for (std::size_t d = 0; d < w.size(); ++d) {
            auto wp = w, wm = w;
            wp[d] += h;
            wm[d] -= h;
            double fd = (loss(wp, x, y, l2) - loss(wm, x, y, l2)) / (2 * h);
            double rel = std::abs(fd - g[d]) / std::max(1e-8, std::max(std::abs(fd), std::abs(g[d])));
            worst = std::max(worst, rel);
        }
    }
    EXPECT_LT(worst, 1e-4);
}

TEST(Predict, SigmoidIsStableAndMonotone) {
    EXPECT_EQ(sigmoid(0.0), 0.5);
    EXPECT_EQ(sigmoid(1000.0), 1.0);
    EXPECT_EQ(sigmoid(-1000.0), 0.0);
    LinearModel m{{1.0, 0.0}, {"a"}};
    double prev = 0.0;
    for (double x = -20; x <= 20; x += 0.5) {
        double p = predict_positive(m, std::vector<double>{x});
        EXPECT_GE(p, prev);
        prev = p;
    }
    EXPECT_THROW(predict_positive(m, std::vector<double>{1.0, 2.0}), ShapeError);
}

TEST(Predict, MatchesIndependentRecomputation) {
    LinearModel m{{0.7, -1.3, 0.25, 0.1}, {"a", "b", "c"}};
    FeatureSet fs{{"x", "y"}, {"a", "b", "c"}, {{1.0, 2.0, -0.5}, {-3.0, 0.25, 4.0}}};
    auto pm = predict_proba(m, fs, "lin");
    for (std::size_t r = 0; r < 2; ++r) {
        const auto& v = fs.rows[r];
        double z = 0.7 * v[0] - 1.3 * v[1] + 0.25 * v[2] + 0.1;
        double p = 1.0 / (1.0 + std::exp(-z));
        EXPECT_NEAR(pm.prob(r, 0, 1), p, 1e-12);
        EXPECT_NEAR(pm.prob(r, 0, 0), 1.0 - p, 1e-12);
    }
    EXPECT_EQ(pm.model_names(), std::vector<std::string>{"lin"});
}

TEST(Features, StandardizedAttractivenessScores) {
    geometry::GeometryConfig cfg;
    auto faces = synthetic::face_population(200, 3);
    std::vector<geometry::AttractivenessScores> scores;
    for (const auto& f : faces) scores.push_back(geometry::score_face(f, cfg));
    auto fs = feature_extract(scores);
    EXPECT_EQ(fs.dims(), 3u);
    std::size_t frontal = 0;
    for (const auto& s : scores) frontal += s.frontal;
    ASSERT_EQ(fs.rows.size(), frontal);
    for (std::size_t d = 0; d < 3; ++d) {
        double mean = 0, var = 0;
        for (const auto& r : fs.rows) mean += r[d];
        mean /= double(fs.rows.size());
        for (const auto& r : fs.rows) var += (r[d] - mean) * (r[d] - mean);
        var /= double(fs.rows.size());
        EXPECT_NEAR(mean, 0.0, 1e-12);
        EXPECT_NEAR(var, 1.0, 1e-12);
    }
}

TEST(Features, ZeroVarianceIsCenteredWithWarning) {
    std::vector<geometry::AttractivenessScores> scores;
    for (int i = 0; i < 3; ++i) {
        geometry::AttractivenessScores s;
        s.id = "f" + std::to_string(i);
        s.frontal = true;
        s.golden_ratio = 1.5 + 0.1 * i;
        s.symmetry = 2.0;
        s.neocanons = 0.1 * i;
        scores.push_back(s);
    }
    Warnings w;
    auto fs = feature_extract(scores, &w);
    ASSERT_EQ(fs.rows.size(), 3u);
    for (const auto& r : fs.rows) {
        EXPECT_EQ(r.size(), 3u);
        EXPECT_EQ(r[1], 0.0);
    }
    ASSERT_EQ(w.messages.size(), 1u);
    EXPECT_NE(w.messages[0].find("symmetry"), std::string::npos);
}

TEST(Features, AuModeUsesTaxonomyOrder) {
    auto tax = expression::default_taxonomy();
    AUFrame f;
    f.id = "a";
    for (int au : tax.au_codes()) {
        f.presence[au] = au == 12;
        f.intensity[au] = 2.5;
    }
    auto fs = feature_extract(std::vector<AUFrame>{f}, tax);
    ASSERT_EQ(fs.dims(), tax.au_codes().size());
    EXPECT_EQ(fs.names[7], "AU12");
    EXPECT_EQ(fs.rows[0][7], 0.5);
    EXPECT_EQ(fs.rows[0][0], 0.0);
}

TEST(Io, ModelAndFeatureRoundTrip) {
    auto [fs, y] = separable();
    TrainConfig cfg;
    cfg.learning_rate = 0.05;
    cfg.epochs = 50;
    auto m = train(fs, y, cfg);
    auto back = model_from_json(nlohmann::json::parse(to_json(m).dump()));
    EXPECT_EQ(back, m);
    EXPECT_THROW(model_from_json(nlohmann::json::parse(R"({"feature_names":["a"],"weights":[1]})")), ShapeError);
    EXPECT_THROW(model_from_json(nlohmann::json::parse(R"({"weights":[1]})")), ParseError);

    auto t = parse_csv(to_csv(features_to_table(fs)));
    auto fs2 = features_from_table(t);
    EXPECT_EQ(fs2.ids, fs.ids);
    EXPECT_EQ(fs2.rows, fs.rows);
}
