#pragma once

// Binary logistic regression trained by full-batch gradient descent.
// Stands in for deep models so the annotate -> train -> sweep pipeline runs locally.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairlens/au_expression.hpp"
#include "fairlens/data_model.hpp"
#include "fairlens/error.hpp"
#include "fairlens/geometry.hpp"

namespace fairlens::trainer {

// Row-major design matrix with ids.
struct FeatureSet {
    std::vector<std::string> ids;
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;

    std::size_t dims() const noexcept { return names.size(); }

    void validate() const {
        if (ids.size() != rows.size()) throw ShapeError("feature ids and rows differ in length");
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i].size() != names.size())
                throw ShapeError("feature row '" + ids[i] + "' has " + std::to_string(rows[i].size()) + " values, expected " +
                                 std::to_string(names.size()));
    }
};

struct LinearModel {
    std::vector<double> weights;  // D coefficients followed by the bias
    std::vector<std::string> feature_names;

    std::size_t dims() const noexcept { return weights.empty() ? 0 : weights.size() - 1; }
    friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t epochs = 100;
    unsigned seed = 0;  // reserved for shuffled mini-batches; full-batch training ignores it
    double l2 = 0.0;

    void validate() const {
        if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
        if (!(l2 >= 0.0)) throw ConfigError("l2 must be >= 0");
    }
};

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

inline double margin(std::span<const double> weights, std::span<const double> x) {
    double z = weights[x.size()];
    for (std::size_t d = 0; d < x.size(); ++d) z += weights[d] * x[d];
    return z;
}

// log(1 + exp(z)) without overflow.
inline double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Mean cross-entropy plus (l2 / 2) * |w|^2 over the coefficients (bias excluded).
inline double loss(std::span<const double> weights, const std::vector<std::vector<double>>& x,
                   const std::vector<int>& y, double l2) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double z = margin(weights, x[i]);
        total += y[i] ? softplus(-z) : softplus(z);
    }
    double reg = 0.0;
    for (std::size_t d = 0; d + 1 < weights.size(); ++d) reg += weights[d] * weights[d];
    return (x.empty() ? 0.0 : total / static_cast<double>(x.size())) + 0.5 * l2 * reg;
}

inline std::vector<double> gradient(std::span<const double> weights, const std::vector<std::vector<double>>& x,
                                    const std::vector<int>& y, double l2) {
    std::vector<double> g(weights.size(), 0.0);
    const std::size_t dims = weights.size() - 1;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double err = sigmoid(margin(weights, x[i])) - static_cast<double>(y[i]);
        for (std::size_t d = 0; d < dims; ++d) g[d] += err * x[i][d];
        g[dims] += err;
    }
    if (!x.empty())
        for (auto& v : g) v /= static_cast<double>(x.size());
    for (std::size_t d = 0; d < dims; ++d) g[d] += l2 * weights[d];
    return g;
}

// Labels aligned to the feature rows; every feature id needs a 0/1 label.
inline std::vector<int> aligned_labels(const FeatureSet& features, const LabelChannel& labels) {
    std::vector<std::string> missing;
    std::vector<int> y;
    y.reserve(features.ids.size());
    for (const auto& id : features.ids) {
        auto it = labels.labels.find(id);
        if (it == labels.labels.end()) {
            missing.push_back(id);
            continue;
        }
        if (it->second != 0 && it->second != 1) throw ValidationError("label for '" + id + "' is not binary");
        y.push_back(it->second);
    }
    if (!missing.empty()) {
        std::sort(missing.begin(), missing.end());
        throw CoverageError(std::move(missing));
    }
    return y;
}

// Zero-initialized, deterministic. on_epoch (optional) receives the loss before each update.
template <typename EpochCallback>
LinearModel train(const FeatureSet& features, const LabelChannel& labels, const TrainConfig& cfg, EpochCallback&& on_epoch) {
    features.validate();
    cfg.validate();
    auto y = aligned_labels(features, labels);
    LinearModel model;
    model.feature_names = features.names;
    model.weights.assign(features.dims() + 1, 0.0);
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        on_epoch(e, loss(model.weights, features.rows, y, cfg.l2));
        auto g = gradient(model.weights, features.rows, y, cfg.l2);
        for (std::size_t d = 0; d < g.size(); ++d) model.weights[d] -= cfg.learning_rate * g[d];
    }
    for (double w : model.weights)
        if (!std::isfinite(w)) throw ValidationError("training diverged (non-finite weights); lower the learning rate");
    return model;
}

inline LinearModel train(const FeatureSet& features, const LabelChannel& labels, const TrainConfig& cfg) {
    return train(features, labels, cfg, [](std::size_t, double) {});
}

// p1 = sigmoid(w.x + b)
inline double predict_positive(const LinearModel& model, std::span<const double> x) {
    if (x.size() != model.dims())
        throw ShapeError("feature vector has " + std::to_string(x.size()) + " values, model expects " + std::to_string(model.dims()));
    return sigmoid(margin(model.weights, x));
}

// One-model PredictionMatrix column pair (p0, p1) named `name`.
inline PredictionMatrix predict_proba(const LinearModel& model, const FeatureSet& features, const std::string& name) {
    features.validate();
    PredictionMatrix pm({name}, 2);
    for (std::size_t i = 0; i < features.rows.size(); ++i) {
        double p1 = predict_positive(model, features.rows[i]);
        pm.add_row(features.ids[i], {1.0 - p1, p1});
    }
    return pm;
}

inline double training_accuracy(const LinearModel& model, const FeatureSet& features, const LabelChannel& labels) {
    auto y = aligned_labels(features, labels);
    if (y.empty()) return 0.0;
    std::size_t ok = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
        ok += (predict_positive(model, features.rows[i]) > 0.5 ? 1 : 0) == y[i];
    return static_cast<double>(ok) / static_cast<double>(y.size());
}

// Per-column standardization (population variance). Zero-variance columns are only centered.
inline void standardize(FeatureSet& fs, Warnings* warnings = nullptr) {
    const std::size_t n = fs.rows.size();
    if (n == 0) return;
    for (std::size_t d = 0; d < fs.dims(); ++d) {
        double mean = 0.0;
        for (const auto& r : fs.rows) mean += r[d];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (const auto& r : fs.rows) var += (r[d] - mean) * (r[d] - mean);
        var /= static_cast<double>(n);
        double sd = std::sqrt(var);
        bool degenerate = !(sd > 1e-12 * std::max(1.0, std::abs(mean)));
        if (degenerate && warnings) warnings->add("feature '" + fs.names[d] + "' has zero variance; centered only");
        for (auto& r : fs.rows) {
            r[d] -= mean;
            if (!degenerate) r[d] /= sd;
            else r[d] = 0.0;
        }
    }
}

// (golden_ratio, symmetry, neocanons) of frontal faces, standardized over the dataset.
inline FeatureSet feature_extract(const std::vector<geometry::AttractivenessScores>& scores, Warnings* warnings = nullptr) {
    FeatureSet fs;
    fs.names = {"golden_ratio", "symmetry", "neocanons"};
    for (const auto& s : scores) {
        if (!s.frontal) continue;
        fs.ids.push_back(s.id);
        fs.rows.push_back({*s.golden_ratio, *s.symmetry, *s.neocanons});
    }
    standardize(fs, warnings);
    return fs;
}

// Normalized scored intensities in taxonomy AU order.
inline FeatureSet feature_extract(const std::vector<AUFrame>& frames, const expression::ExpressionTaxonomy& tax,
                                  double intensity_normalizer = kMaxIntensity) {
    FeatureSet fs;
    auto aus = tax.au_codes();
    for (int au : aus) fs.names.push_back(ColumnSchema{}.au_column(au, ""));
    for (const auto& f : frames) {
        fs.ids.push_back(f.id);
        std::vector<double> row;
        row.reserve(aus.size());
        for (int au : aus) row.push_back(f.scored_intensity(au) / intensity_normalizer);
        fs.rows.push_back(std::move(row));
    }
    return fs;
}

// Feature files: id column plus one numeric column per feature.
inline FeatureSet features_from_table(const Table& t) {
    FeatureSet fs;
    auto id_col = t.column("id");
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (i != id_col) {
            cols.push_back(i);
            fs.names.push_back(t.header[i]);
        }
    std::set<std::string> seen;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& id = t.rows[r][id_col];
        if (!seen.insert(id).second) throw DuplicateKeyError(id);
        fs.ids.push_back(id);
        std::vector<double> row;
        for (auto c : cols) row.push_back(parse_finite(t.rows[r][c], r + 1, t.header[c]));
        fs.rows.push_back(std::move(row));
    }
    return fs;
}

inline FeatureSet load_features(const std::string& path) { return features_from_table(read_table(path)); }

inline Table features_to_table(const FeatureSet& fs) {
    Table t;
    t.header = {"id"};
    t.header.insert(t.header.end(), fs.names.begin(), fs.names.end());
    for (std::size_t i = 0; i < fs.rows.size(); ++i) {
        std::vector<std::string> row{fs.ids[i]};
        for (double v : fs.rows[i]) row.push_back(format_number(v));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline nlohmann::ordered_json to_json(const LinearModel& m) {
    nlohmann::ordered_json j;
    j["feature_names"] = m.feature_names;
    j["weights"] = m.weights;
    return j;
}

inline LinearModel model_from_json(const nlohmann::json& j) {
    LinearModel m;
    try {
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        m.weights = j.at("weights").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("invalid model JSON: ") + e.what());
    }
    if (m.weights.size() != m.feature_names.size() + 1)
        throw ShapeError("model has " + std::to_string(m.weights.size()) + " weights for " +
                         std::to_string(m.feature_names.size()) + " features (expected D + 1)");
    for (double w : m.weights)
        if (!std::isfinite(w)) throw ValidationError("model weights must be finite");
    return m;
}

} // namespace fairlens::trainer
