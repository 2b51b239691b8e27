#pragma once

// Weighted soft-voting ensembles: per-class weighted sum of model probabilities,
// exhaustive weight grids, parallel sweeps, and accuracy-vs-gap Pareto analysis.

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "fairlens/data_model.hpp"
#include "fairlens/error.hpp"
#include "fairlens/fairness.hpp"
#include "fairlens/table.hpp"

namespace fairlens::ensemble {

struct WeightVector {
    std::vector<double> alphas;

    void validate() const {
        if (alphas.empty()) throw ShapeError("weight vector is empty");
        bool any = false;
        for (double a : alphas) {
            if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("weights must lie in [0, 1]");
            any = any || a > 0.0;
        }
        if (!any) throw ValidationError("weight vector is all zero");
    }

    // e_i: 1 at position i, 0 elsewhere.
    static WeightVector one_hot(std::size_t models, std::size_t i) {
        WeightVector w{std::vector<double>(models, 0.0)};
        w.alphas.at(i) = 1.0;
        return w;
    }

    std::optional<std::size_t> one_hot_index() const {
        std::optional<std::size_t> idx;
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            if (alphas[i] == 0.0) continue;
            if (alphas[i] != 1.0 || idx) return std::nullopt;
            idx = i;
        }
        return idx;
    }

    friend auto operator<=>(const WeightVector&, const WeightVector&) = default;
    friend bool operator==(const WeightVector&, const WeightVector&) = default;
};

// argmax_c sum_i alpha_i * o_i(x)[c]; exact ties go to the lowest class index.
inline int combine_row(const WeightVector& w, const PredictionMatrix& preds, std::size_t row) {
    int best = 0;
    double best_score = 0.0;
    for (std::size_t c = 0; c < preds.classes(); ++c) {
        double s = 0.0;
        for (std::size_t m = 0; m < preds.models(); ++m) s += w.alphas[m] * preds.prob(row, m, c);
        if (c == 0 || s > best_score) {
            best = static_cast<int>(c);
            best_score = s;
        }
    }
    return best;
}

inline std::vector<int> combine_rows(const WeightVector& w, const PredictionMatrix& preds) {
    if (w.alphas.size() != preds.models())
        throw ShapeError("weight vector has " + std::to_string(w.alphas.size()) + " entries for " +
                         std::to_string(preds.models()) + " models");
    std::vector<int> out(preds.rows());
    for (std::size_t r = 0; r < preds.rows(); ++r) out[r] = combine_row(w, preds, r);
    return out;
}

inline std::map<std::string, int> combine(const WeightVector& w, const PredictionMatrix& preds) {
    auto rows = combine_rows(w, preds);
    std::map<std::string, int> out;
    for (std::size_t r = 0; r < rows.size(); ++r) out.emplace(preds.ids()[r], rows[r]);
    return out;
}

// All vectors in {0, step, ..., 1}^M except all-zero, lexicographic (last weight fastest).
inline std::vector<WeightVector> weight_grid(std::size_t models, double step) {
    if (models == 0) throw ConfigError("weight grid needs at least one model");
    if (!(step > 0.0 && step <= 1.0)) throw ConfigError("grid step must lie in (0, 1]");
    double levels_f = std::round(1.0 / step);
    if (std::abs(levels_f * step - 1.0) > 1e-9) throw ConfigError("grid step " + format_number(step) + " does not divide 1");
    auto levels = static_cast<std::size_t>(levels_f);

    double total = std::pow(static_cast<double>(levels + 1), static_cast<double>(models));
    if (total > 5e7) throw ConfigError("weight grid too large: " + format_number(total) + " vectors");

    std::vector<double> values(levels + 1);
    for (std::size_t k = 0; k <= levels; ++k) values[k] = static_cast<double>(k) / static_cast<double>(levels);

    std::vector<WeightVector> grid;
    grid.reserve(static_cast<std::size_t>(total) - 1);
    std::vector<std::size_t> digits(models, 0);
    while (true) {
        // odometer increment
        std::size_t pos = models;
        while (pos > 0) {
            --pos;
            if (++digits[pos] <= levels) break;
            digits[pos] = 0;
            if (pos == 0) return grid;
        }
        WeightVector w;
        w.alphas.reserve(models);
        for (auto d : digits) w.alphas.push_back(values[d]);
        grid.push_back(std::move(w));
    }
}

enum class GapMetric { EqualOpportunity, Discrimination };

inline fairness::Rate gap_of(const fairness::FairnessReport& r, GapMetric metric) {
    return metric == GapMetric::EqualOpportunity ? r.delta_eoo : r.delta_disc;
}

struct EnsembleCandidate {
    WeightVector weights;
    double accuracy = 0.0;
    std::optional<double> gap;  // nullopt: undefined, excluded from frontiers
    std::optional<fairness::FairnessReport> report;
};

// Truth and groups aligned to the prediction rows.
struct EvaluationSet {
    const PredictionMatrix* preds = nullptr;
    std::vector<fairness::Outcome> base;  // pred field is filled per candidate

    EvaluationSet(const PredictionMatrix& p, const LabelChannel& truth, const std::map<std::string, int>& groups)
        : preds(&p) {
        if (p.classes() != 2) throw ShapeError("fairness evaluation needs binary predictions (C = 2)");
        std::vector<std::string> missing;
        for (const auto& id : p.ids())
            if (!truth.labels.count(id) || !groups.count(id)) missing.push_back(id);
        for (const auto& [id, _] : truth.labels)
            if (!p.find(id)) missing.push_back(id);
        for (const auto& [id, _] : groups)
            if (!p.find(id)) missing.push_back(id);
        if (!missing.empty()) {
            std::sort(missing.begin(), missing.end());
            missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
            throw CoverageError(std::move(missing));
        }
        base.reserve(p.rows());
        for (const auto& id : p.ids()) {
            fairness::Outcome o;
            o.truth = fairness::detail::binary(truth.labels.at(id), "label", id);
            o.group = fairness::detail::binary(groups.at(id), "group", id);
            base.push_back(o);
        }
    }

    EnsembleCandidate evaluate(const WeightVector& w, GapMetric metric) const {
        if (w.alphas.size() != preds->models()) throw ShapeError("weight vector does not match the model count");
        std::vector<fairness::Outcome> outcomes = base;
        for (std::size_t r = 0; r < outcomes.size(); ++r)
            outcomes[r].pred = static_cast<std::uint8_t>(combine_row(w, *preds, r));
        auto report = fairness::fairness_report(std::span<const fairness::Outcome>(outcomes));
        return {w, report.accuracy_overall, gap_of(report, metric), report};
    }
};

inline unsigned default_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

// One candidate per grid vector, in grid order for any thread count.
inline std::vector<EnsembleCandidate> sweep(const PredictionMatrix& preds, const LabelChannel& truth,
                                            const std::map<std::string, int>& groups,
                                            const std::vector<WeightVector>& grid, GapMetric metric,
                                            unsigned threads = 1) {
    EvaluationSet eval(preds, truth, groups);
    for (const auto& w : grid)
        if (w.alphas.size() != preds.models()) throw ShapeError("grid vector does not match the model count");

    std::vector<EnsembleCandidate> out(grid.size());
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(grid.size(), 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) out[i] = eval.evaluate(grid[i], metric);
        return out;
    }

    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    std::size_t chunk = (grid.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                std::size_t begin = t * chunk, end = std::min(grid.size(), begin + chunk);
                for (std::size_t i = begin; i < end; ++i) out[i] = eval.evaluate(grid[i], metric);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

// a dominates b: accuracy >= and gap <= with at least one strict.
inline bool dominates(const EnsembleCandidate& a, const EnsembleCandidate& b) {
    return a.accuracy >= b.accuracy && *a.gap <= *b.gap && (a.accuracy > b.accuracy || *a.gap < *b.gap);
}

struct ParetoFrontier {
    std::vector<EnsembleCandidate> points;  // accuracy descending
};

// Non-dominated set of the defined candidates. Equal (accuracy, gap) points keep
// only the lexicographically smallest weight vector.
inline ParetoFrontier pareto_frontier(const std::vector<EnsembleCandidate>& candidates) {
    std::vector<const EnsembleCandidate*> defined;
    for (const auto& c : candidates)
        if (c.gap) defined.push_back(&c);
    std::sort(defined.begin(), defined.end(), [](const EnsembleCandidate* a, const EnsembleCandidate* b) {
        if (a->accuracy != b->accuracy) return a->accuracy > b->accuracy;
        if (*a->gap != *b->gap) return *a->gap < *b->gap;
        return a->weights < b->weights;
    });
    ParetoFrontier f;
    for (const auto* c : defined) {
        // Sorted by accuracy desc, so c survives only by strictly beating every kept gap.
        if (f.points.empty() || *c->gap < *f.points.back().gap) f.points.push_back(*c);
    }
    return f;
}

// Candidates whose weight vectors lie on every frontier, by gap ascending, at most k.
inline std::vector<EnsembleCandidate> select_top_k_intersection(const std::vector<ParetoFrontier>& frontiers,
                                                                std::size_t k, Warnings* warnings = nullptr) {
    if (frontiers.empty()) throw ValidationError("top-k selection needs at least one frontier");
    std::vector<EnsembleCandidate> common;
    for (const auto& c : frontiers.front().points) {
        bool everywhere = std::all_of(frontiers.begin() + 1, frontiers.end(), [&](const ParetoFrontier& f) {
            return std::any_of(f.points.begin(), f.points.end(),
                               [&](const EnsembleCandidate& o) { return o.weights == c.weights; });
        });
        if (everywhere) common.push_back(c);
    }
    if (common.empty() && warnings) warnings->add("Pareto frontiers share no weight vector; top-k selection is empty");
    std::stable_sort(common.begin(), common.end(), [](const EnsembleCandidate& a, const EnsembleCandidate& b) {
        if (*a.gap != *b.gap) return *a.gap < *b.gap;
        if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
        return a.weights < b.weights;
    });
    if (common.size() > k) common.resize(k);
    return common;
}

// Candidate CSV: alpha_<model>..., accuracy, gap, defined. Undefined gaps are empty cells.
inline Table candidates_to_table(const std::vector<EnsembleCandidate>& cands, const std::vector<std::string>& model_names) {
    Table t;
    for (const auto& n : model_names) t.header.push_back("alpha_" + n);
    t.header.insert(t.header.end(), {"accuracy", "gap", "defined"});
    for (const auto& c : cands) {
        if (c.weights.alphas.size() != model_names.size()) throw ShapeError("candidate width does not match model names");
        std::vector<std::string> row;
        for (double a : c.weights.alphas) row.push_back(format_number(a));
        row.push_back(format_number(c.accuracy));
        row.push_back(c.gap ? format_number(*c.gap) : std::string());
        row.push_back(c.gap ? "1" : "0");
        t.rows.push_back(std::move(row));
    }
    return t;
}

struct CandidateSet {
    std::vector<std::string> model_names;
    std::vector<EnsembleCandidate> candidates;
};

inline CandidateSet candidates_from_table(const Table& t) {
    CandidateSet out;
    std::vector<std::size_t> alpha_cols;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (t.header[i].rfind("alpha_", 0) == 0) {
            alpha_cols.push_back(i);
            out.model_names.push_back(t.header[i].substr(6));
        }
    }
    if (alpha_cols.empty()) throw SchemaError("alpha_<model>");
    auto acc_col = t.column("accuracy");
    auto gap_col = t.column("gap");
    auto def_col = t.column("defined");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        EnsembleCandidate c;
        for (auto col : alpha_cols) c.weights.alphas.push_back(parse_finite(row[col], r + 1, t.header[col]));
        c.accuracy = parse_finite(row[acc_col], r + 1, "accuracy");
        auto defined = detail::parse_group(row[def_col], r + 1, "defined");
        if (defined) c.gap = parse_finite(row[gap_col], r + 1, "gap");
        else if (!row[gap_col].empty()) throw ParseError(r + 1, "gap given for an undefined candidate");
        out.candidates.push_back(std::move(c));
    }
    return out;
}

} // namespace fairlens::ensemble
