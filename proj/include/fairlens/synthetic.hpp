#pragma once

// Synthetic inputs for demos and tests: a constructed reference face, jittered
// face populations, random AU frames, and a group-biased labeling scenario.

#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "fairlens/au_expression.hpp"
#include "fairlens/data_model.hpp"
#include "fairlens/geometry.hpp"
#include "fairlens/trainer.hpp"

namespace fairlens::synthetic {

// Mirror-symmetric about x = 0 and built so that, under the default geometry
// configuration, both golden ratios equal 1.618 and every canon holds exactly.
// Inter-ocular distance 20 px, nose width 20, mouth width 30, face width 80.
inline LandmarkFace reference_face(std::string id = "reference", int sensitive = 0) {
    constexpr double kChinY = 129.44;  // (chin - midbrow) / face width = 1.618
    const double nose_base_y = kChinY - (kChinY - 20.0) / geometry::kGoldenRatio;
    const double pi = std::acos(-1.0);

    LandmarkFace f;
    f.id = std::move(id);
    f.sensitive = sensitive;
    auto& p = f.points;
    auto set = [&](int i, double x, double y) { p[static_cast<std::size_t>(i)] = {x, y}; };
    auto mirror = [&](int dst, int src) { p[static_cast<std::size_t>(dst)] = {-p[static_cast<std::size_t>(src)].x, p[static_cast<std::size_t>(src)].y}; };

    for (int k = 0; k <= 16; ++k) set(k, -40.0 * std::cos(pi * k / 16.0), 20.0 + (kChinY - 20.0) * std::sin(pi * k / 16.0));
    set(8, 0.0, kChinY);
    for (int k = 9; k <= 16; ++k) mirror(k, 16 - k);

    set(17, -35, -5); set(18, -28, -9); set(19, -20, -10); set(20, -12, -8); set(21, -5, 0);
    for (int k = 0; k < 5; ++k) mirror(26 - k, 17 + k);

    set(27, 0, 10); set(28, 0, 25); set(29, 0, 40); set(30, 0, 55);
    set(31, -10, nose_base_y); set(32, -5, nose_base_y + 1.2); set(33, 0, nose_base_y);
    mirror(34, 32); mirror(35, 31);

    set(36, -14, 20); set(37, -12, 18); set(38, -8, 18); set(39, -6, 20); set(40, -8, 22); set(41, -12, 22);
    mirror(45, 36); mirror(44, 37); mirror(43, 38); mirror(42, 39); mirror(47, 40); mirror(46, 41);

    set(48, -15, 85); set(49, -10, 81); set(50, -4, 79); set(51, 0, 80);
    mirror(52, 50); mirror(53, 49); mirror(54, 48);
    set(57, 0, 92); set(58, -4, 91); set(59, -10, 89);
    mirror(56, 58); mirror(55, 59);
    set(60, -12, 85); set(61, -4, 83); set(62, 0, 83);
    mirror(63, 61); mirror(64, 60);
    set(66, 0, 87); set(67, -4, 87); mirror(65, 67);
    return f;
}

inline LandmarkFace transform(const LandmarkFace& face, double scale, double dx, double dy) {
    LandmarkFace out = face;
    for (auto& pt : out.points) pt = {pt.x * scale + dx, pt.y * scale + dy};
    return out;
}

// Independent gaussian noise on every coordinate.
template <typename Rng>
LandmarkFace jitter(const LandmarkFace& face, Rng& rng, double sigma) {
    std::normal_distribution<double> n(0.0, sigma);
    LandmarkFace out = face;
    for (auto& pt : out.points) {
        pt.x += n(rng);
        pt.y += n(rng);
    }
    return out;
}

// Population of plausible faces: per-face proportions vary, a fraction is turned
// sideways (nose tip shifted) so the frontality filter has something to drop.
inline std::vector<LandmarkFace> face_population(std::size_t n, std::uint64_t seed, double sideways_fraction = 0.15) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> shape(0.0, 1.0);
    std::vector<LandmarkFace> faces;
    faces.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto f = reference_face("face_" + std::to_string(10000 + i), u(rng) < 0.5 ? 1 : 0);
        double widen = 1.0 + 0.08 * shape(rng);
        double lengthen = 1.0 + 0.08 * shape(rng);
        double mouth = 1.0 + 0.12 * shape(rng);
        for (auto& pt : f.points) {
            pt.x *= widen;
            pt.y *= lengthen;
        }
        for (int k = 48; k <= 67; ++k) f.points[static_cast<std::size_t>(k)].x *= mouth;
        f = jitter(f, rng, 1.2);
        if (u(rng) < sideways_fraction) {
            double shift = (u(rng) < 0.5 ? -1.0 : 1.0) * (14.0 + 6.0 * u(rng));
            for (int k = 27; k <= 35; ++k) f.points[static_cast<std::size_t>(k)].x += shift;
        }
        f = transform(f, 2.0 + u(rng), 200.0 + 40.0 * u(rng), 150.0 + 40.0 * u(rng));
        faces.push_back(std::move(f));
    }
    return faces;
}

// Each AU active with probability p_active; intensities uniform in [0, 5].
template <typename Rng>
AUFrame random_frame(Rng& rng, const std::vector<int>& au_codes, double p_active, std::string id = "frame", int sensitive = 0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    AUFrame f;
    f.id = std::move(id);
    f.sensitive = sensitive;
    for (int au : au_codes) {
        f.presence[au] = u(rng) < p_active ? 1 : 0;
        f.intensity[au] = kMaxIntensity * u(rng);
    }
    return f;
}

inline std::vector<AUFrame> frame_population(std::size_t n, std::uint64_t seed, const expression::ExpressionTaxonomy& tax) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto codes = tax.au_codes();
    std::vector<AUFrame> frames;
    frames.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double p = 0.1 + 0.4 * u(rng);
        frames.push_back(random_frame(rng, codes, p, "frame_" + std::to_string(10000 + i), u(rng) < 0.5 ? 1 : 0));
    }
    return frames;
}

// A latent "objective" quality q drives three objective channels independently of
// group; the subjective channel H adds a group-dependent shift of `bias`.
// Features: three noisy views of q plus a noisy proxy of the group.
struct BiasedDataset {
    std::vector<std::string> ids;
    LabelChannel groups{"sensitive", {}};
    LabelChannel human{"H", {}};
    std::vector<LabelChannel> objective;  // GR, S, NC
    trainer::FeatureSet features;
};

inline BiasedDataset biased_dataset(std::size_t n, std::uint64_t seed, double bias = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    BiasedDataset d;
    d.objective = {{"GR", {}}, {"S", {}}, {"NC", {}}};
    d.features.names = {"view_1", "view_2", "view_3", "group_proxy"};
    for (std::size_t i = 0; i < n; ++i) {
        std::string id = "inst_" + std::to_string(100000 + i);
        int g = coin(rng) ? 1 : 0;
        double q = z(rng);
        d.ids.push_back(id);
        d.groups.labels[id] = g;
        d.human.labels[id] = q + bias * (g - 0.5) + 0.4 * z(rng) > 0.0 ? 1 : 0;
        for (auto& ch : d.objective) ch.labels[id] = q + 0.5 * z(rng) > 0.0 ? 1 : 0;
        d.features.ids.push_back(id);
        d.features.rows.push_back({q + 0.3 * z(rng), q + 0.3 * z(rng), q + 0.3 * z(rng), g + 0.3 * z(rng)});
    }
    return d;
}

} // namespace fairlens::synthetic
