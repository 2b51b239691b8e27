#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fairlens/error.hpp"
#include "fairlens/table.hpp"

namespace fairlens {

inline constexpr std::size_t kLandmarkCount = 68;
inline constexpr double kMaxIntensity = 5.0;

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }
inline Point2 midpoint(Point2 a, Point2 b) { return {(a.x + b.x) / 2.0, (a.y + b.y) / 2.0}; }

// One face in the 68-point landmark scheme, pixel coordinates.
struct LandmarkFace {
    std::string id;
    std::array<Point2, kLandmarkCount> points{};
    int sensitive = 0;
    friend bool operator==(const LandmarkFace&, const LandmarkFace&) = default;
};

// Per-face action units. presence and intensity are keyed by AU code and share the key set.
struct AUFrame {
    std::string id;
    std::map<int, int> presence;
    std::map<int, double> intensity;
    int sensitive = 0;

    // Raw intensity used for scoring: 0 when the AU is absent or unknown.
    double scored_intensity(int au) const {
        auto p = presence.find(au);
        if (p == presence.end() || p->second == 0) return 0.0;
        return intensity.at(au);
    }

    friend bool operator==(const AUFrame&, const AUFrame&) = default;
};

// A named source of labels over a dataset (binary 0/1, or an expression index).
struct LabelChannel {
    std::string name;
    std::map<std::string, int> labels;
    friend bool operator==(const LabelChannel&, const LabelChannel&) = default;
};

// Per-model, per-instance class-probability vectors. Row order is file order.
class PredictionMatrix {
public:
    PredictionMatrix() = default;

    PredictionMatrix(std::vector<std::string> model_names, std::size_t classes)
        : model_names_(std::move(model_names)), classes_(classes) {
        if (model_names_.empty()) throw ShapeError("prediction matrix needs at least one model");
        if (classes_ < 2) throw ShapeError("prediction matrix needs at least two classes");
    }

    // probs is laid out [model][class], length models() * classes().
    void add_row(std::string id, std::vector<double> probs) {
        if (probs.size() != models() * classes_)
            throw ShapeError("row '" + id + "' has " + std::to_string(probs.size()) + " probabilities, expected " +
                             std::to_string(models() * classes_));
        if (index_.count(id)) throw DuplicateKeyError(id);
        for (std::size_t m = 0; m < models(); ++m) {
            double sum = 0.0;
            for (std::size_t c = 0; c < classes_; ++c) {
                double p = probs[m * classes_ + c];
                if (!std::isfinite(p) || p < 0.0)
                    throw ValidationError("row '" + id + "' model '" + model_names_[m] + "' has a negative or non-finite probability");
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-6)
                throw ValidationError("row '" + id + "' model '" + model_names_[m] + "' probabilities sum to " + format_number(sum));
        }
        index_.emplace(id, ids_.size());
        ids_.push_back(std::move(id));
        data_.insert(data_.end(), probs.begin(), probs.end());
    }

    std::size_t models() const noexcept { return model_names_.size(); }
    std::size_t classes() const noexcept { return classes_; }
    std::size_t rows() const noexcept { return ids_.size(); }
    const std::vector<std::string>& model_names() const noexcept { return model_names_; }
    const std::vector<std::string>& ids() const noexcept { return ids_; }

    double prob(std::size_t row, std::size_t model, std::size_t cls) const {
        return data_[(row * models() + model) * classes_ + cls];
    }

    std::optional<std::size_t> find(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    friend bool operator==(const PredictionMatrix& a, const PredictionMatrix& b) {
        return a.model_names_ == b.model_names_ && a.classes_ == b.classes_ && a.ids_ == b.ids_ && a.data_ == b.data_;
    }

private:
    std::vector<std::string> model_names_;
    std::size_t classes_ = 0;
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<double> data_;
};

// Column naming for landmark and AU tables.
struct ColumnSchema {
    std::string id = "id";
    std::string sensitive = "sensitive";
    std::string x_prefix = "x_";
    std::string y_prefix = "y_";
    std::string au_prefix = "AU";
    std::string presence_suffix = "_presence";
    std::string intensity_suffix = "_intensity";

    std::string au_column(int au, const std::string& suffix) const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%02d", au);
        return au_prefix + buf + suffix;
    }
};

namespace detail {

inline int parse_group(const std::string& cell, std::size_t row, const std::string& column) {
    auto v = parse_number(cell);
    if (!v || (*v != 0.0 && *v != 1.0))
        throw ParseError(row, "column '" + column + "' must be 0 or 1, found '" + cell + "'");
    return static_cast<int>(*v);
}

inline void check_unique(std::unordered_set<std::string>& seen, const std::string& id) {
    if (!seen.insert(id).second) throw DuplicateKeyError(id);
}

} // namespace detail

inline std::vector<LandmarkFace> landmarks_from_table(const Table& t, const ColumnSchema& schema = {}) {
    auto id_col = t.column(schema.id);
    auto s_col = t.column(schema.sensitive);
    std::array<std::size_t, kLandmarkCount> xs{}, ys{};
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        xs[i] = t.column(schema.x_prefix + std::to_string(i));
        ys[i] = t.column(schema.y_prefix + std::to_string(i));
    }
    std::vector<LandmarkFace> faces;
    faces.reserve(t.rows.size());
    std::unordered_set<std::string> seen;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        LandmarkFace f;
        f.id = row[id_col];
        f.sensitive = detail::parse_group(row[s_col], r + 1, schema.sensitive);
        for (std::size_t i = 0; i < kLandmarkCount; ++i) {
            f.points[i].x = parse_finite(row[xs[i]], r + 1, t.header[xs[i]]);
            f.points[i].y = parse_finite(row[ys[i]], r + 1, t.header[ys[i]]);
        }
        detail::check_unique(seen, f.id);
        faces.push_back(std::move(f));
    }
    return faces;
}

inline std::vector<LandmarkFace> load_landmarks(const std::string& path, const ColumnSchema& schema = {}) {
    return landmarks_from_table(read_table(path), schema);
}

inline Table landmarks_to_table(const std::vector<LandmarkFace>& faces, const ColumnSchema& schema = {}) {
    Table t;
    t.header = {schema.id, schema.sensitive};
    for (std::size_t i = 0; i < kLandmarkCount; ++i) t.header.push_back(schema.x_prefix + std::to_string(i));
    for (std::size_t i = 0; i < kLandmarkCount; ++i) t.header.push_back(schema.y_prefix + std::to_string(i));
    for (const auto& f : faces) {
        std::vector<std::string> row{f.id, std::to_string(f.sensitive)};
        for (const auto& p : f.points) row.push_back(format_number(p.x));
        for (const auto& p : f.points) row.push_back(format_number(p.y));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline void write_landmarks(const std::string& path, const std::vector<LandmarkFace>& faces,
                            const ColumnSchema& schema = {}) {
    write_table(path, landmarks_to_table(faces, schema), {schema.id});
}

// Loads AU frames for the given AU codes. Intensities above kMaxIntensity are clamped
// and counted in `clamped` (and reported through `warnings` when provided).
inline std::vector<AUFrame> au_frames_from_table(const Table& t, const std::vector<int>& au_codes,
                                                 const ColumnSchema& schema = {}, Warnings* warnings = nullptr,
                                                 std::size_t* clamped = nullptr) {
    auto id_col = t.column(schema.id);
    auto s_col = t.column(schema.sensitive);
    std::vector<std::pair<std::size_t, std::size_t>> cols;
    for (int au : au_codes) {
        auto p = t.column(schema.au_column(au, schema.presence_suffix));
        cols.emplace_back(p, t.column(schema.au_column(au, schema.intensity_suffix)));
    }

    std::vector<AUFrame> frames;
    frames.reserve(t.rows.size());
    std::unordered_set<std::string> seen;
    std::size_t n_clamped = 0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        AUFrame f;
        f.id = row[id_col];
        f.sensitive = detail::parse_group(row[s_col], r + 1, schema.sensitive);
        for (std::size_t k = 0; k < au_codes.size(); ++k) {
            int au = au_codes[k];
            const auto& pcol = t.header[cols[k].first];
            const auto& icol = t.header[cols[k].second];
            f.presence[au] = detail::parse_group(row[cols[k].first], r + 1, pcol);
            double v = parse_finite(row[cols[k].second], r + 1, icol);
            if (v < 0.0) throw ParseError(r + 1, "column '" + icol + "' is negative");
            if (v > kMaxIntensity) {
                v = kMaxIntensity;
                ++n_clamped;
            }
            f.intensity[au] = v;
        }
        detail::check_unique(seen, f.id);
        frames.push_back(std::move(f));
    }
    if (clamped) *clamped = n_clamped;
    if (warnings && n_clamped)
        warnings->add(std::to_string(n_clamped) + " AU intensities above " + format_number(kMaxIntensity) + " were clamped");
    return frames;
}

inline std::vector<AUFrame> load_au_frames(const std::string& path, const std::vector<int>& au_codes,
                                           const ColumnSchema& schema = {}, Warnings* warnings = nullptr,
                                           std::size_t* clamped = nullptr) {
    return au_frames_from_table(read_table(path), au_codes, schema, warnings, clamped);
}

inline Table au_frames_to_table(const std::vector<AUFrame>& frames, const std::vector<int>& au_codes,
                                const ColumnSchema& schema = {}) {
    Table t;
    t.header = {schema.id, schema.sensitive};
    for (int au : au_codes) {
        t.header.push_back(schema.au_column(au, schema.presence_suffix));
        t.header.push_back(schema.au_column(au, schema.intensity_suffix));
    }
    for (const auto& f : frames) {
        std::vector<std::string> row{f.id, std::to_string(f.sensitive)};
        for (int au : au_codes) {
            row.push_back(std::to_string(f.presence.at(au)));
            row.push_back(format_number(f.intensity.at(au)));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline void write_au_frames(const std::string& path, const std::vector<AUFrame>& frames,
                            const std::vector<int>& au_codes, const ColumnSchema& schema = {}) {
    write_table(path, au_frames_to_table(frames, au_codes, schema), {schema.id});
}

// Prediction files: id followed by M groups of C columns named "<model>_p<c>".
// Rows whose per-model sums are off by more than 1e-6 but within 1e-4 are renormalized.
inline PredictionMatrix predictions_from_table(const Table& t, std::size_t models = 0, std::size_t classes = 0) {
    auto id_col = t.column("id");
    std::vector<std::size_t> prob_cols;
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (i != id_col) prob_cols.push_back(i);

    if (classes == 0) {
        // Infer C from the "_p0, _p1, ..." run of the first model.
        if (prob_cols.empty()) throw SchemaError("<model>_p0");
        const auto& first = t.header[prob_cols.front()];
        auto pos = first.rfind("_p");
        if (pos == std::string::npos) throw SchemaError(first + " (expected <model>_p<class>)");
        auto stem = first.substr(0, pos + 2);
        while (classes < prob_cols.size() && t.header[prob_cols[classes]] == stem + std::to_string(classes)) ++classes;
    }
    if (models == 0 && classes > 0) models = prob_cols.size() / classes;
    if (classes < 2 || models == 0 || prob_cols.size() != models * classes)
        throw ShapeError("prediction table has " + std::to_string(prob_cols.size()) + " probability columns, expected " +
                         std::to_string(models) + " x " + std::to_string(classes));

    std::vector<std::string> names;
    for (std::size_t m = 0; m < models; ++m) {
        for (std::size_t c = 0; c < classes; ++c) {
            const auto& h = t.header[prob_cols[m * classes + c]];
            auto suffix = "_p" + std::to_string(c);
            if (!detail::ends_with(h, suffix)) throw SchemaError(h.empty() ? suffix : h.substr(0, h.rfind('_')) + suffix);
            if (c == 0) names.push_back(h.substr(0, h.size() - suffix.size()));
            else if (h.substr(0, h.size() - suffix.size()) != names.back())
                throw SchemaError(names.back() + suffix);
        }
    }

    PredictionMatrix pm(names, classes);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        std::vector<double> probs;
        probs.reserve(prob_cols.size());
        for (auto c : prob_cols) probs.push_back(parse_finite(row[c], r + 1, t.header[c]));
        for (std::size_t m = 0; m < models; ++m) {
            double sum = 0.0;
            for (std::size_t c = 0; c < classes; ++c) {
                double p = probs[m * classes + c];
                if (p < 0.0) throw ValidationError("row " + std::to_string(r + 1) + ": negative probability for model '" + names[m] + "'");
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-4)
                throw ValidationError("row " + std::to_string(r + 1) + ": probabilities of model '" + names[m] +
                                      "' sum to " + format_number(sum));
            if (std::abs(sum - 1.0) > 1e-6)
                for (std::size_t c = 0; c < classes; ++c) probs[m * classes + c] /= sum;
        }
        pm.add_row(row[id_col], std::move(probs));
    }
    return pm;
}

// models/classes of 0 mean "infer from the header".
inline PredictionMatrix load_predictions(const std::string& path, std::size_t models = 0, std::size_t classes = 0) {
    return predictions_from_table(read_table(path), models, classes);
}

inline Table predictions_to_table(const PredictionMatrix& pm) {
    Table t;
    t.header = {"id"};
    for (const auto& name : pm.model_names())
        for (std::size_t c = 0; c < pm.classes(); ++c) t.header.push_back(name + "_p" + std::to_string(c));
    for (std::size_t r = 0; r < pm.rows(); ++r) {
        std::vector<std::string> row{pm.ids()[r]};
        for (std::size_t m = 0; m < pm.models(); ++m)
            for (std::size_t c = 0; c < pm.classes(); ++c) row.push_back(format_number(pm.prob(r, m, c)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline void write_predictions(const std::string& path, const PredictionMatrix& pm) {
    write_table(path, predictions_to_table(pm));
}

// Horizontal join of prediction files over the same ids (order of the first input).
inline PredictionMatrix merge_predictions(const std::vector<PredictionMatrix>& parts) {
    if (parts.empty()) throw ShapeError("no prediction matrices to merge");
    std::vector<std::string> names;
    std::set<std::string> unique_names;
    for (const auto& p : parts) {
        if (p.classes() != parts.front().classes()) throw ShapeError("prediction matrices disagree on class count");
        for (const auto& n : p.model_names()) {
            if (!unique_names.insert(n).second) throw DuplicateKeyError(n);
            names.push_back(n);
        }
    }
    std::vector<std::string> missing;
    for (const auto& p : parts) {
        if (p.rows() != parts.front().rows())
            for (const auto& id : p.ids())
                if (!parts.front().find(id)) missing.push_back(id);
        for (const auto& id : parts.front().ids())
            if (!p.find(id)) missing.push_back(id);
    }
    if (!missing.empty()) {
        std::sort(missing.begin(), missing.end());
        missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
        throw CoverageError(missing);
    }
    PredictionMatrix out(names, parts.front().classes());
    for (std::size_t r = 0; r < parts.front().rows(); ++r) {
        const auto& id = parts.front().ids()[r];
        std::vector<double> probs;
        for (const auto& p : parts) {
            auto pr = *p.find(id);
            for (std::size_t m = 0; m < p.models(); ++m)
                for (std::size_t c = 0; c < p.classes(); ++c) probs.push_back(p.prob(pr, m, c));
        }
        out.add_row(id, std::move(probs));
    }
    return out;
}

// Label files: an id column plus one integer column per channel.
inline std::vector<LabelChannel> label_channels_from_table(const Table& t, const std::string& id_column = "id") {
    auto id_col = t.column(id_column);
    std::vector<LabelChannel> channels;
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (i == id_col) continue;
        cols.push_back(i);
        channels.push_back({t.header[i], {}});
    }
    std::unordered_set<std::string> seen;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& id = t.rows[r][id_col];
        detail::check_unique(seen, id);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const auto& cell = t.rows[r][cols[k]];
            auto v = parse_number(cell);
            if (!v || std::floor(*v) != *v) throw ParseError(r + 1, "column '" + channels[k].name + "' is not an integer label: '" + cell + "'");
            channels[k].labels.emplace(id, static_cast<int>(*v));
        }
    }
    return channels;
}

inline std::vector<LabelChannel> load_label_channels(const std::string& path) {
    return label_channels_from_table(read_table(path));
}

// Picks one channel from a label file: by name, or the only/first label column when name is empty.
inline LabelChannel load_label_channel(const std::string& path, const std::string& name = {}) {
    auto channels = load_label_channels(path);
    if (channels.empty()) throw SchemaError(name.empty() ? "<label column>" : name);
    if (name.empty()) return channels.front();
    for (auto& c : channels)
        if (c.name == name) return c;
    throw SchemaError(name);
}

// Aligned label table: ids sorted lexicographically, one column per channel.
struct LabelTable {
    std::vector<std::string> ids;
    std::vector<std::string> channel_names;
    std::vector<std::vector<int>> rows;  // rows[i][k] = label of ids[i] in channel k
};

inline LabelTable join_channels(const std::vector<std::string>& ids, const std::vector<LabelChannel>& channels) {
    LabelTable out;
    std::set<std::string> sorted;
    for (const auto& id : ids)
        if (!sorted.insert(id).second) throw DuplicateKeyError(id);
    std::set<std::string> missing;
    for (const auto& ch : channels)
        for (const auto& id : sorted)
            if (!ch.labels.count(id)) missing.insert(id);
    if (!missing.empty()) throw CoverageError({missing.begin(), missing.end()});

    out.ids.assign(sorted.begin(), sorted.end());
    for (const auto& ch : channels) out.channel_names.push_back(ch.name);
    for (const auto& id : out.ids) {
        std::vector<int> row;
        row.reserve(channels.size());
        for (const auto& ch : channels) row.push_back(ch.labels.at(id));
        out.rows.push_back(std::move(row));
    }
    return out;
}

inline Table label_table_to_table(const LabelTable& lt) {
    Table t;
    t.header = {"id"};
    t.header.insert(t.header.end(), lt.channel_names.begin(), lt.channel_names.end());
    for (std::size_t i = 0; i < lt.ids.size(); ++i) {
        std::vector<std::string> row{lt.ids[i]};
        for (int v : lt.rows[i]) row.push_back(std::to_string(v));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline void write_label_channels(const std::string& path, const std::vector<LabelChannel>& channels) {
    std::set<std::string> ids;
    for (const auto& ch : channels)
        for (const auto& [id, _] : ch.labels) ids.insert(id);
    write_table(path, label_table_to_table(join_channels({ids.begin(), ids.end()}, channels)));
}

} // namespace fairlens
