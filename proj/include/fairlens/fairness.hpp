#pragma once

// Group-conditioned confusion counts and the gap metrics built on them.
// Rates with a zero denominator are std::nullopt, never coerced to 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairlens/data_model.hpp"
#include "fairlens/error.hpp"

namespace fairlens::fairness {

using Rate = std::optional<double>;

// One evaluated instance: predicted class, true class and group, each 0 or 1.
struct Outcome {
    std::uint8_t pred = 0;
    std::uint8_t truth = 0;
    std::uint8_t group = 0;
};

struct Confusion {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }
    std::size_t positives() const noexcept { return tp + fn; }
    std::size_t negatives() const noexcept { return tn + fp; }
    std::size_t predicted_positive() const noexcept { return tp + fp; }

    Rate tpr() const { return ratio(tp, positives()); }
    Rate fnr() const { return ratio(fn, positives()); }
    Rate fpr() const { return ratio(fp, negatives()); }
    Rate accuracy() const { return ratio(tp + tn, total()); }
    Rate positive_rate() const { return ratio(predicted_positive(), total()); }

    Confusion& operator+=(const Confusion& o) {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn += o.fn;
        return *this;
    }
    friend bool operator==(const Confusion&, const Confusion&) = default;

private:
    static Rate ratio(std::size_t num, std::size_t den) {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    }
};

struct GroupedConfusion {
    std::array<Confusion, 2> group{};

    std::size_t total() const noexcept { return group[0].total() + group[1].total(); }
    GroupedConfusion& operator+=(const GroupedConfusion& o) {
        group[0] += o.group[0];
        group[1] += o.group[1];
        return *this;
    }
    friend bool operator==(const GroupedConfusion&, const GroupedConfusion&) = default;
};

inline GroupedConfusion grouped_confusion(std::span<const Outcome> outcomes) {
    GroupedConfusion c;
    for (const auto& o : outcomes) {
        auto& g = c.group[o.group & 1u];
        if (o.truth) (o.pred ? g.tp : g.fn)++;
        else (o.pred ? g.fp : g.tn)++;
    }
    return c;
}

inline Rate abs_gap(Rate a, Rate b) {
    if (!a || !b) return std::nullopt;
    return std::abs(*a - *b);
}

// |FNR_0 - FNR_1|
inline Rate delta_eoo(const GroupedConfusion& c) { return abs_gap(c.group[0].fnr(), c.group[1].fnr()); }

struct TprFprGap {
    Rate tpr;
    Rate fpr;
};

inline TprFprGap delta_tpr_fpr(const GroupedConfusion& c) {
    return {abs_gap(c.group[0].tpr(), c.group[1].tpr()), abs_gap(c.group[0].fpr(), c.group[1].fpr())};
}

struct DiscGap {
    double signed_gap = 0.0;  // P(pred=1 | g=1) - P(pred=1 | g=0)
    double absolute = 0.0;
};

// Label-free: depends only on predictions and groups. nullopt when a group is empty.
inline std::optional<DiscGap> delta_disc(const GroupedConfusion& c) {
    auto p1 = c.group[1].positive_rate();
    auto p0 = c.group[0].positive_rate();
    if (!p1 || !p0) return std::nullopt;
    double s = *p1 - *p0;
    return DiscGap{s, std::abs(s)};
}

inline std::optional<DiscGap> delta_disc(std::span<const Outcome> outcomes) {
    return delta_disc(grouped_confusion(outcomes));
}

struct FairnessReport {
    double accuracy_overall = 0.0;
    std::array<Rate, 2> accuracy_per_group{};
    Rate delta_tpr;
    Rate delta_fpr;
    Rate delta_eoo;
    Rate delta_disc;
    Rate signed_disc;
    GroupedConfusion confusion;
};

inline FairnessReport fairness_report(const GroupedConfusion& c) {
    if (c.total() == 0) throw ValidationError("fairness report over an empty dataset");
    FairnessReport r;
    r.confusion = c;
    Confusion all = c.group[0];
    all += c.group[1];
    r.accuracy_overall = *all.accuracy();
    r.accuracy_per_group = {c.group[0].accuracy(), c.group[1].accuracy()};
    auto tf = delta_tpr_fpr(c);
    r.delta_tpr = tf.tpr;
    r.delta_fpr = tf.fpr;
    r.delta_eoo = delta_eoo(c);
    if (auto d = delta_disc(c)) {
        r.delta_disc = d->absolute;
        r.signed_disc = d->signed_gap;
    }
    return r;
}

inline FairnessReport fairness_report(std::span<const Outcome> outcomes) {
    return fairness_report(grouped_confusion(outcomes));
}

using BinaryMap = std::map<std::string, int>;

namespace detail {

inline std::uint8_t binary(int v, const std::string& what, const std::string& id) {
    if (v != 0 && v != 1) throw ValidationError(what + " for id '" + id + "' is " + std::to_string(v) + ", expected 0 or 1");
    return static_cast<std::uint8_t>(v);
}

} // namespace detail

// Aligns id-keyed inputs; throws CoverageError when the id sets differ.
// truth may be null for label-free metrics.
inline std::vector<Outcome> align(const BinaryMap& pred, const BinaryMap* truth, const BinaryMap& groups) {
    std::vector<std::string> missing;
    auto check = [&](const BinaryMap& a, const BinaryMap& b) {
        for (const auto& [id, _] : a)
            if (!b.count(id)) missing.push_back(id);
    };
    check(pred, groups);
    check(groups, pred);
    if (truth) {
        check(pred, *truth);
        check(*truth, pred);
    }
    if (!missing.empty()) {
        std::sort(missing.begin(), missing.end());
        missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
        throw CoverageError(std::move(missing));
    }
    std::vector<Outcome> out;
    out.reserve(pred.size());
    for (const auto& [id, p] : pred) {
        Outcome o;
        o.pred = detail::binary(p, "prediction", id);
        o.truth = truth ? detail::binary(truth->at(id), "label", id) : 0;
        o.group = detail::binary(groups.at(id), "group", id);
        out.push_back(o);
    }
    return out;
}

inline GroupedConfusion grouped_confusion(const BinaryMap& pred, const LabelChannel& truth, const BinaryMap& groups) {
    return grouped_confusion(align(pred, &truth.labels, groups));
}

inline std::optional<DiscGap> delta_disc(const BinaryMap& pred, const BinaryMap& groups) {
    return delta_disc(std::span<const Outcome>(align(pred, nullptr, groups)));
}

inline FairnessReport fairness_report(const BinaryMap& pred, const LabelChannel& truth, const BinaryMap& groups) {
    return fairness_report(grouped_confusion(pred, truth, groups));
}

inline nlohmann::ordered_json rate_json(Rate r) { return r ? nlohmann::ordered_json(*r) : nlohmann::ordered_json(nullptr); }

// Undefined rates serialize as null.
inline nlohmann::ordered_json to_json(const FairnessReport& r) {
    nlohmann::ordered_json j;
    j["accuracy_overall"] = r.accuracy_overall;
    j["accuracy_per_group"] = {rate_json(r.accuracy_per_group[0]), rate_json(r.accuracy_per_group[1])};
    j["delta_tpr"] = rate_json(r.delta_tpr);
    j["delta_fpr"] = rate_json(r.delta_fpr);
    j["delta_eoo"] = rate_json(r.delta_eoo);
    j["delta_disc"] = rate_json(r.delta_disc);
    j["signed_disc"] = rate_json(r.signed_disc);
    auto counts = nlohmann::ordered_json::array();
    for (const auto& g : r.confusion.group)
        counts.push_back({{"tp", g.tp}, {"fp", g.fp}, {"tn", g.tn}, {"fn", g.fn}});
    j["confusion"] = counts;
    return j;
}

} // namespace fairlens::fairness
