#pragma once

// Objective expression labels from action units.
//
// ObjBase assigns an expression only when every canonical AU of it is present;
// collisions go to the expression with the highest mean intensity.
// ObjLCS ranks expressions by longest common subsequence with the detected AU
// codes, breaks ties by euclidean distance to the reference intensities, and
// falls back to neutral when the winner's mean intensity is below a threshold.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fairlens/data_model.hpp"
#include "fairlens/error.hpp"

namespace fairlens::expression {

// Index into ExpressionTaxonomy::expressions, or neutral.
class ExpressionId {
public:
    static constexpr int kNeutral = -1;

    constexpr ExpressionId() = default;
    constexpr explicit ExpressionId(int index) : index_(index) {}
    static constexpr ExpressionId neutral() { return ExpressionId(kNeutral); }

    constexpr bool is_neutral() const noexcept { return index_ == kNeutral; }
    constexpr int index() const noexcept { return index_; }
    friend constexpr auto operator<=>(ExpressionId, ExpressionId) = default;

private:
    int index_ = kNeutral;
};

struct Expression {
    std::string name;
    std::vector<int> aus;            // strictly increasing
    std::vector<double> reference;   // normalized [0,1] intensities aligned with aus
};

struct ExpressionTaxonomy {
    std::vector<Expression> expressions;
    std::string neutral_name = "neutral";
    std::string happy_name = "happiness";

    void validate() const {
        if (expressions.empty()) throw ConfigError("taxonomy has no expressions");
        std::set<std::string> names{neutral_name};
        for (const auto& e : expressions) {
            if (e.aus.empty()) throw ConfigError("expression '" + e.name + "' has no AUs");
            for (std::size_t i = 1; i < e.aus.size(); ++i)
                if (e.aus[i] <= e.aus[i - 1]) throw ConfigError("AU list of '" + e.name + "' is not strictly increasing");
            if (e.reference.size() != e.aus.size())
                throw ConfigError("reference vector of '" + e.name + "' does not match its AU list");
            if (!names.insert(e.name).second) throw ConfigError("duplicate expression name '" + e.name + "'");
        }
    }

    std::string name(ExpressionId id) const {
        if (id.is_neutral()) return neutral_name;
        return expressions.at(static_cast<std::size_t>(id.index())).name;
    }

    std::optional<ExpressionId> find(const std::string& name) const {
        if (name == neutral_name) return ExpressionId::neutral();
        for (std::size_t i = 0; i < expressions.size(); ++i)
            if (expressions[i].name == name) return ExpressionId(static_cast<int>(i));
        return std::nullopt;
    }

    // Union of canonical AU codes, ascending.
    std::vector<int> au_codes() const {
        std::set<int> all;
        for (const auto& e : expressions) all.insert(e.aus.begin(), e.aus.end());
        return {all.begin(), all.end()};
    }
};

inline ExpressionTaxonomy default_taxonomy() {
    auto make = [](std::string name, std::vector<int> aus) {
        std::vector<double> ref(aus.size(), 1.0);
        return Expression{std::move(name), std::move(aus), std::move(ref)};
    };
    ExpressionTaxonomy tax;
    tax.expressions = {
        make("happiness", {6, 12}),
        make("sadness", {1, 4, 15}),
        make("surprise", {1, 2, 5, 26}),
        make("fear", {1, 2, 4, 5, 7, 20, 26}),
        make("anger", {4, 5, 7, 23}),
        make("disgust", {9, 15, 16}),
    };
    return tax;
}

// {"neutral": "neutral", "happy": "happiness",
//  "expressions": [{"name": "...", "aus": [..], "reference": [..]}]}
// "reference" is optional and defaults to all 1.0.
inline ExpressionTaxonomy taxonomy_from_json(const nlohmann::json& j) {
    ExpressionTaxonomy tax;
    try {
        tax.neutral_name = j.value("neutral", tax.neutral_name);
        tax.happy_name = j.value("happy", tax.happy_name);
        for (const auto& e : j.at("expressions")) {
            Expression ex;
            ex.name = e.at("name").get<std::string>();
            ex.aus = e.at("aus").get<std::vector<int>>();
            ex.reference = e.contains("reference") ? e.at("reference").get<std::vector<double>>()
                                                   : std::vector<double>(ex.aus.size(), 1.0);
            tax.expressions.push_back(std::move(ex));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid taxonomy JSON: ") + e.what());
    }
    tax.validate();
    return tax;
}

inline ExpressionTaxonomy load_taxonomy(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("invalid taxonomy JSON in '" + path + "': " + e.what());
    }
    return taxonomy_from_json(j);
}

enum class Algorithm { ObjBase, ObjLCS };

struct ExpressionConfig {
    Algorithm algorithm = Algorithm::ObjLCS;
    double neutral_t = 0.3;
    double intensity_normalizer = kMaxIntensity;

    void validate() const {
        if (!(neutral_t > 0.0)) throw ConfigError("neutral_t must be > 0");
        if (!(intensity_normalizer > 0.0)) throw ConfigError("intensity_normalizer must be > 0");
    }
};

inline bool strictly_increasing(std::span<const int> s) {
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] <= s[i - 1]) return false;
    return true;
}

// Longest common subsequence length by dynamic programming over two AU code sequences.
inline std::size_t lcs_length(std::span<const int> a, std::span<const int> b) {
    if (!strictly_increasing(a) || !strictly_increasing(b))
        throw ValidationError("lcs_length expects strictly increasing AU sequences");
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

inline std::vector<int> detected_aus(const AUFrame& frame) {
    std::vector<int> out;
    for (const auto& [au, present] : frame.presence)
        if (present) out.push_back(au);
    return out;  // std::map keeps keys ascending
}

// Mean normalized intensity over an expression's canonical AUs; absent AUs count as 0.
inline double mean_intensity(const AUFrame& frame, const Expression& e, double normalizer) {
    double sum = 0.0;
    for (int au : e.aus) sum += frame.scored_intensity(au) / normalizer;
    return sum / static_cast<double>(e.aus.size());
}

inline double reference_distance(const AUFrame& frame, const Expression& e, double normalizer) {
    double sq = 0.0;
    for (std::size_t k = 0; k < e.aus.size(); ++k) {
        double d = frame.scored_intensity(e.aus[k]) / normalizer - e.reference[k];
        sq += d * d;
    }
    return std::sqrt(sq);
}

// Expressions whose canonical AUs are all present in the frame, taxonomy order.
inline std::vector<std::size_t> full_matches(const AUFrame& frame, const ExpressionTaxonomy& tax) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < tax.expressions.size(); ++i) {
        const auto& aus = tax.expressions[i].aus;
        bool all = std::all_of(aus.begin(), aus.end(), [&](int au) {
            auto p = frame.presence.find(au);
            return p != frame.presence.end() && p->second == 1;
        });
        if (all) out.push_back(i);
    }
    return out;
}

inline ExpressionId obj_base_label(const AUFrame& frame, const ExpressionTaxonomy& tax,
                                   double intensity_normalizer = kMaxIntensity) {
    auto candidates = full_matches(frame, tax);
    if (candidates.empty()) return ExpressionId::neutral();
    std::size_t best = candidates.front();
    double best_mean = mean_intensity(frame, tax.expressions[best], intensity_normalizer);
    for (std::size_t k = 1; k < candidates.size(); ++k) {
        double m = mean_intensity(frame, tax.expressions[candidates[k]], intensity_normalizer);
        if (m > best_mean) {
            best = candidates[k];
            best_mean = m;
        }
    }
    return ExpressionId(static_cast<int>(best));
}

inline ExpressionId obj_lcs_label(const AUFrame& frame, const ExpressionTaxonomy& tax, const ExpressionConfig& cfg) {
    auto detected = detected_aus(frame);
    if (detected.empty()) return ExpressionId::neutral();

    std::size_t best_len = 0;
    std::vector<std::size_t> winners;
    for (std::size_t i = 0; i < tax.expressions.size(); ++i) {
        auto len = lcs_length(detected, tax.expressions[i].aus);
        if (len > best_len) {
            best_len = len;
            winners.assign(1, i);
        } else if (len == best_len) {
            winners.push_back(i);
        }
    }
    std::size_t winner = winners.front();
    if (winners.size() > 1) {
        double best = std::numeric_limits<double>::infinity();
        for (auto w : winners) {
            double d = reference_distance(frame, tax.expressions[w], cfg.intensity_normalizer);
            if (d < best) {
                best = d;
                winner = w;
            }
        }
    }
    if (mean_intensity(frame, tax.expressions[winner], cfg.intensity_normalizer) < cfg.neutral_t)
        return ExpressionId::neutral();
    return ExpressionId(static_cast<int>(winner));
}

inline ExpressionId label_frame(const AUFrame& frame, const ExpressionTaxonomy& tax, const ExpressionConfig& cfg) {
    return cfg.algorithm == Algorithm::ObjBase ? obj_base_label(frame, tax, cfg.intensity_normalizer)
                                               : obj_lcs_label(frame, tax, cfg);
}

inline int binarize_happiness(ExpressionId id, const ExpressionTaxonomy& tax) {
    return !id.is_neutral() && tax.name(id) == tax.happy_name ? 1 : 0;
}

struct ExpressionAnnotation {
    std::vector<ExpressionId> expressions;   // input order
    LabelChannel happy;                      // binary happy/unhappy channel
    // (group, expression name) -> count
    std::map<std::pair<int, std::string>, std::size_t> histogram;
    // Frames with two or more full ObjBase matches.
    std::size_t collisions = 0;
};

inline std::string channel_name(const ExpressionConfig& cfg) {
    return cfg.algorithm == Algorithm::ObjBase ? std::string("ObjBase") : "ObjLCS:" + format_number(cfg.neutral_t);
}

inline ExpressionAnnotation annotate_expressions(const std::vector<AUFrame>& frames, const ExpressionTaxonomy& tax,
                                                 const ExpressionConfig& cfg) {
    tax.validate();
    cfg.validate();
    ExpressionAnnotation out;
    out.happy.name = channel_name(cfg);
    out.expressions.reserve(frames.size());
    for (const auto& f : frames) {
        auto id = label_frame(f, tax, cfg);
        if (full_matches(f, tax).size() > 1) ++out.collisions;
        if (!out.happy.labels.emplace(f.id, binarize_happiness(id, tax)).second) throw DuplicateKeyError(f.id);
        ++out.histogram[{f.sensitive, tax.name(id)}];
        out.expressions.push_back(id);
    }
    return out;
}

inline nlohmann::ordered_json histogram_json(const ExpressionAnnotation& ann, const ExpressionTaxonomy& tax) {
    nlohmann::ordered_json j;
    std::vector<std::string> names;
    for (const auto& e : tax.expressions) names.push_back(e.name);
    names.push_back(tax.neutral_name);
    for (int g : {0, 1}) {
        nlohmann::ordered_json counts;
        for (const auto& n : names) {
            auto it = ann.histogram.find({g, n});
            counts[n] = it == ann.histogram.end() ? 0 : it->second;
        }
        j["group_" + std::to_string(g)] = counts;
    }
    nlohmann::ordered_json total;
    std::size_t all = 0;
    for (const auto& n : names) {
        std::size_t c = 0;
        for (int g : {0, 1})
            if (auto it = ann.histogram.find({g, n}); it != ann.histogram.end()) c += it->second;
        total[n] = c;
        all += c;
    }
    j["total"] = total;
    j["frames"] = all;
    j["objbase_collisions"] = ann.collisions;
    return j;
}

} // namespace fairlens::expression
