#pragma once

// Objective attractiveness scores from 68-point landmarks: frontality filter,
// golden-ratio score, bilateral symmetry score and neoclassical-canon deviation,
// plus their binarization into label channels.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairlens/data_model.hpp"
#include "fairlens/error.hpp"

namespace fairlens::geometry {

inline constexpr double kGoldenRatio = 1.618;

// Landmark position: either a single index or the midpoint of two.
struct Anchor {
    int a = 0;
    int b = -1;

    Point2 resolve(const LandmarkFace& face) const {
        if (b < 0) return face.points.at(static_cast<std::size_t>(a));
        return midpoint(face.points.at(static_cast<std::size_t>(a)), face.points.at(static_cast<std::size_t>(b)));
    }
};

// Special anchors for the eye centroids and their midpoint.
inline constexpr int kLeftEyeCentroid = -10;
inline constexpr int kRightEyeCentroid = -11;
inline constexpr int kEyeMidpoint = -12;

inline Point2 centroid(const LandmarkFace& face, int first, int last) {
    Point2 c;
    for (int i = first; i <= last; ++i) {
        c.x += face.points[static_cast<std::size_t>(i)].x;
        c.y += face.points[static_cast<std::size_t>(i)].y;
    }
    double n = static_cast<double>(last - first + 1);
    return {c.x / n, c.y / n};
}

// Points 36-41 (image-left eye) and 42-47 (image-right eye).
inline Point2 left_eye_centroid(const LandmarkFace& face) { return centroid(face, 36, 41); }
inline Point2 right_eye_centroid(const LandmarkFace& face) { return centroid(face, 42, 47); }

inline double inter_ocular_distance(const LandmarkFace& face) {
    return distance(left_eye_centroid(face), right_eye_centroid(face));
}

inline Point2 resolve(const Anchor& anchor, const LandmarkFace& face) {
    switch (anchor.a) {
    case kLeftEyeCentroid: return left_eye_centroid(face);
    case kRightEyeCentroid: return right_eye_centroid(face);
    case kEyeMidpoint: return midpoint(left_eye_centroid(face), right_eye_centroid(face));
    default: return anchor.resolve(face);
    }
}

struct Segment {
    Anchor from;
    Anchor to;
    double length(const LandmarkFace& face) const { return distance(resolve(from, face), resolve(to, face)); }
};

// A golden-ratio measurement: numerator / denominator.
struct RatioRule {
    std::string name;
    Segment numerator;
    Segment denominator;
};

// A canon: numerator / denominator should equal target.
struct CanonRule {
    std::string name;
    Segment numerator;
    Segment denominator;
    double target = 1.0;
};

inline std::vector<RatioRule> default_ratio_set() {
    return {
        {"face_height_over_width", {{21, 22}, {8}}, {{0}, {16}}},
        {"eyes_to_chin_over_nose_to_chin", {{kEyeMidpoint}, {8}}, {{33}, {8}}},
    };
}

inline std::vector<CanonRule> default_canon_set() {
    return {
        {"interocular_equals_nose_width", {{kLeftEyeCentroid}, {kRightEyeCentroid}}, {{31}, {35}}, 1.0},
        {"mouth_width_is_1.5_nose_width", {{48}, {54}}, {{31}, {35}}, 1.5},
        {"nose_width_is_quarter_face_width", {{31}, {35}}, {{0}, {16}}, 0.25},
    };
}

// Standard left/right correspondences of the 68-point scheme.
inline std::vector<std::pair<int, int>> default_mirror_pairs() {
    return {
        {0, 16}, {1, 15}, {2, 14}, {3, 13}, {4, 12}, {5, 11}, {6, 10}, {7, 9},   // jaw
        {17, 26}, {18, 25}, {19, 24}, {20, 23}, {21, 22},                        // brows
        {31, 35}, {32, 34},                                                      // nose wings
        {36, 45}, {37, 44}, {38, 43}, {39, 42}, {40, 47}, {41, 46},              // eyes
        {48, 54}, {49, 53}, {50, 52}, {59, 55}, {58, 56}, {60, 64}, {61, 63}, {67, 65}, // mouth
    };
}

inline std::vector<int> default_midline_indices() { return {27, 28, 29, 30, 33, 51, 57, 8}; }

struct GeometryConfig {
    double beta_frontal = 10.0;
    double delta_gr = 0.19;
    double t_sym = 4.2;
    double t_neo = 0.29;
    // Drop faces whose eye-to-nose asymmetry is small instead of large.
    bool invert_frontality = false;
    std::vector<RatioRule> ratio_set = default_ratio_set();
    std::vector<CanonRule> canon_set = default_canon_set();
    std::vector<std::pair<int, int>> mirror_pairs = default_mirror_pairs();
    std::vector<int> midline_indices = default_midline_indices();

    void validate() const {
        if (!(beta_frontal > 0.0)) throw ConfigError("beta_frontal must be > 0");
        if (!(delta_gr > 0.0)) throw ConfigError("delta_gr must be > 0");
        if (!(t_sym > 0.0)) throw ConfigError("t_sym must be > 0");
        if (!(t_neo > 0.0)) throw ConfigError("t_neo must be > 0");
        if (ratio_set.empty()) throw ConfigError("ratio_set is empty");
        if (canon_set.empty()) throw ConfigError("canon_set is empty");
        if (mirror_pairs.empty()) throw ConfigError("mirror_pairs is empty");
        if (midline_indices.empty()) throw ConfigError("midline_indices is empty");
        auto in_range = [](int i) { return i >= 0 && i < static_cast<int>(kLandmarkCount); };
        for (int m : midline_indices)
            if (!in_range(m)) throw ConfigError("midline index " + std::to_string(m) + " out of range");
        for (auto [l, r] : mirror_pairs) {
            if (!in_range(l) || !in_range(r)) throw ConfigError("mirror pair index out of range");
            for (int m : midline_indices)
                if (m == l || m == r) throw ConfigError("mirror pair index " + std::to_string(m) + " is also a midline index");
        }
        for (double c : {delta_gr, t_sym, t_neo})
            if (!std::isfinite(c)) throw ConfigError("thresholds must be finite");
        for (const auto& c : canon_set)
            if (!(c.target > 0.0)) throw ConfigError("canon '" + c.name + "' needs a positive target");
    }
};

// Threshold grids used for the attractiveness channels.
inline const std::vector<double>& delta_values() {
    static const std::vector<double> v{0.17, 0.18, 0.19, 0.20, 0.21};
    return v;
}
inline const std::vector<double>& t_sym_values() {
    static const std::vector<double> v{4.0, 4.2, 4.4, 4.6, 4.8};
    return v;
}
inline const std::vector<double>& t_neo_values() {
    static const std::vector<double> v{0.26, 0.27, 0.28, 0.29, 0.30};
    return v;
}

inline void check_not_degenerate(const LandmarkFace& face) {
    const auto& first = face.points.front();
    bool all_same = std::all_of(face.points.begin(), face.points.end(), [&](const Point2& p) { return p == first; });
    if (all_same) throw GeometryError("face '" + face.id + "' is degenerate (all landmarks coincide)");
}

// Eye-centroid to nose-tip (point 30) distance difference.
inline double eye_nose_asymmetry(const LandmarkFace& face) {
    check_not_degenerate(face);
    const Point2 nose = face.points[30];
    return std::abs(distance(left_eye_centroid(face), nose) - distance(right_eye_centroid(face), nose));
}

inline bool frontality_filter(const LandmarkFace& face, const GeometryConfig& cfg) {
    double diff = eye_nose_asymmetry(face);
    return cfg.invert_frontality ? diff > cfg.beta_frontal : diff <= cfg.beta_frontal;
}

inline double golden_ratio_score(const LandmarkFace& face, const GeometryConfig& cfg) {
    double sum = 0.0;
    for (const auto& r : cfg.ratio_set) {
        double den = r.denominator.length(face);
        if (!(den > 0.0)) throw GeometryError("ratio '" + r.name + "' has a zero-length denominator on face '" + face.id + "'");
        sum += r.numerator.length(face) / den;
    }
    return sum / static_cast<double>(cfg.ratio_set.size());
}

// Mean horizontal and vertical mismatch of mirrored landmark pairs around the
// vertical axis through the midline landmarks, in percent of inter-ocular distance.
inline double symmetry_score(const LandmarkFace& face, const GeometryConfig& cfg) {
    double iod = inter_ocular_distance(face);
    if (!(iod > 0.0)) throw GeometryError("face '" + face.id + "' has zero inter-ocular distance");
    double x_mid = 0.0;
    for (int m : cfg.midline_indices) x_mid += face.points.at(static_cast<std::size_t>(m)).x;
    x_mid /= static_cast<double>(cfg.midline_indices.size());

    double total = 0.0;
    for (auto [l, r] : cfg.mirror_pairs) {
        const auto& pl = face.points.at(static_cast<std::size_t>(l));
        const auto& pr = face.points.at(static_cast<std::size_t>(r));
        total += std::abs((x_mid - pl.x) - (pr.x - x_mid)) + std::abs(pl.y - pr.y);
    }
    return 100.0 / (static_cast<double>(cfg.mirror_pairs.size()) * iod) * total;
}

inline double neocanons_score(const LandmarkFace& face, const GeometryConfig& cfg) {
    double sum = 0.0;
    for (const auto& c : cfg.canon_set) {
        double den = c.denominator.length(face);
        if (!(den > 0.0)) throw GeometryError("canon '" + c.name + "' has a zero-length segment on face '" + face.id + "'");
        double measured = c.numerator.length(face) / den;
        sum += std::abs(measured - c.target) / c.target;
    }
    return sum / static_cast<double>(cfg.canon_set.size());
}

struct AttractivenessScores {
    std::string id;
    bool frontal = false;
    // Present only for frontal faces.
    std::optional<double> golden_ratio;
    std::optional<double> symmetry;
    std::optional<double> neocanons;
};

inline AttractivenessScores score_face(const LandmarkFace& face, const GeometryConfig& cfg) {
    AttractivenessScores s;
    s.id = face.id;
    s.frontal = frontality_filter(face, cfg);
    if (!s.frontal) return s;
    s.golden_ratio = golden_ratio_score(face, cfg);
    s.symmetry = symmetry_score(face, cfg);
    s.neocanons = neocanons_score(face, cfg);
    return s;
}

// Interval tests are inclusive; kBoundarySlack absorbs rounding in 1.618 +/- delta.
inline constexpr double kBoundarySlack = 1e-9;

inline int golden_ratio_label(double golden_ratio, double delta) {
    return std::abs(golden_ratio - kGoldenRatio) <= delta + kBoundarySlack ? 1 : 0;
}
inline int threshold_label(double score, double t) { return score >= 0.0 && score <= t + kBoundarySlack ? 1 : 0; }

struct AttractivenessLabels {
    int golden_ratio = 0;
    int symmetry = 0;
    int neocanons = 0;
};

inline AttractivenessLabels binarize_attractiveness(const AttractivenessScores& s, const GeometryConfig& cfg) {
    if (!s.frontal || !s.golden_ratio || !s.symmetry || !s.neocanons)
        throw ValidationError("face '" + s.id + "' is not frontal; it has no attractiveness labels");
    return {golden_ratio_label(*s.golden_ratio, cfg.delta_gr), threshold_label(*s.symmetry, cfg.t_sym),
            threshold_label(*s.neocanons, cfg.t_neo)};
}

// Channel names follow "<notion>:<threshold>", e.g. "GR:0.19".
inline std::string channel_name(const std::string& notion, double threshold) {
    return notion + ":" + format_number(threshold);
}

struct AttractivenessAnnotation {
    std::vector<AttractivenessScores> scores;  // input order, non-frontal included
    LabelChannel golden_ratio;
    LabelChannel symmetry;
    LabelChannel neocanons;
    std::size_t kept = 0;

    double keep_rate() const {
        return scores.empty() ? 0.0 : static_cast<double>(kept) / static_cast<double>(scores.size());
    }
};

// Scores every face and emits GR/S/NC channels over the frontal faces only.
inline AttractivenessAnnotation annotate_attractiveness(const std::vector<LandmarkFace>& faces, const GeometryConfig& cfg) {
    cfg.validate();
    AttractivenessAnnotation out;
    out.golden_ratio.name = channel_name("GR", cfg.delta_gr);
    out.symmetry.name = channel_name("S", cfg.t_sym);
    out.neocanons.name = channel_name("NC", cfg.t_neo);
    out.scores.reserve(faces.size());
    for (const auto& f : faces) {
        auto s = score_face(f, cfg);
        if (s.frontal) {
            auto labels = binarize_attractiveness(s, cfg);
            out.golden_ratio.labels.emplace(f.id, labels.golden_ratio);
            out.symmetry.labels.emplace(f.id, labels.symmetry);
            out.neocanons.labels.emplace(f.id, labels.neocanons);
            ++out.kept;
        }
        out.scores.push_back(std::move(s));
    }
    return out;
}

} // namespace fairlens::geometry
