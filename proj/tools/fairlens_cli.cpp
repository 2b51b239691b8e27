// fairlens command-line driver.
//
//   annotate-attractiveness  landmarks -> geometry scores and GR/S/NC labels
//   annotate-expression      AU frames -> expression, happy label, histogram
//   train / predict          logistic regression on feature tables
//   evaluate                 fairness report for one set of predictions
//   sweep                    weighted-ensemble grid search
//   pareto                   frontier, top-k intersection, SVG scatter
//   report                   markdown summary of one or more sweeps
//
// Every command writes "<out>.manifest.json" next to its primary output.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairlens.hpp"
#include "fairlens/manifest.hpp"

namespace fl = fairlens;
using nlohmann::ordered_json;

namespace {

struct Globals {
    unsigned threads = fl::ensemble::default_threads();
    unsigned seed = 0;
    bool quiet = false;
};

void warn(const Globals& g, const fl::Warnings& w) {
    if (g.quiet) return;
    for (const auto& m : w.messages) std::cerr << "warning: " << m << "\n";
}

void info(const Globals& g, const std::string& msg) {
    if (!g.quiet) std::cerr << msg << "\n";
}

std::string with_default(const std::string& given, const std::string& out, const std::string& suffix) {
    return given.empty() ? out + suffix : given;
}

std::map<std::string, int> groups_from(const std::string& path, const std::string& column) {
    return fl::load_label_channel(path, column).labels;
}

std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const fl::SchemaError*>(&e)) return "schema";
    if (dynamic_cast<const fl::ParseError*>(&e)) return "parse";
    if (dynamic_cast<const fl::DuplicateKeyError*>(&e)) return "duplicate_key";
    if (dynamic_cast<const fl::CoverageError*>(&e)) return "coverage";
    if (dynamic_cast<const fl::GeometryError*>(&e)) return "geometry";
    if (dynamic_cast<const fl::ShapeError*>(&e)) return "shape";
    if (dynamic_cast<const fl::ConfigError*>(&e)) return "config";
    if (dynamic_cast<const fl::ValidationError*>(&e)) return "validation";
    return "error";
}

// ---------------------------------------------------------------- annotate-attractiveness

struct AttractivenessArgs {
    std::string landmarks, out, labels_out, groups_out, features_out;
    fl::geometry::GeometryConfig cfg;
};

void run_attractiveness(const AttractivenessArgs& a, const Globals& g) {
    auto faces = fl::load_landmarks(a.landmarks);
    auto ann = fl::geometry::annotate_attractiveness(faces, a.cfg);

    fl::Table t;
    t.header = {"id", "frontal", "gr_score", "sym_score", "neo_score", "gr_label", "s_label", "nc_label"};
    for (const auto& s : ann.scores) {
        if (!s.frontal) {
            t.rows.push_back({s.id, "0", "", "", "", "", "", ""});
            continue;
        }
        auto labels = fl::geometry::binarize_attractiveness(s, a.cfg);
        t.rows.push_back({s.id, "1", fl::format_number(*s.golden_ratio), fl::format_number(*s.symmetry),
                          fl::format_number(*s.neocanons), std::to_string(labels.golden_ratio),
                          std::to_string(labels.symmetry), std::to_string(labels.neocanons)});
    }
    fl::write_table(a.out, t);

    fl::RunManifest m;
    m.command = "annotate-attractiveness";
    m.config = {{"beta", a.cfg.beta_frontal},        {"delta", a.cfg.delta_gr},     {"t_sym", a.cfg.t_sym},
                {"t_neo", a.cfg.t_neo},              {"invert_frontality", a.cfg.invert_frontality},
                {"faces", faces.size()},             {"kept", ann.kept},            {"keep_rate", ann.keep_rate()}};
    m.add_input(a.landmarks);
    m.add_output(a.out);

    if (!a.labels_out.empty()) {
        fl::write_label_channels(a.labels_out, {ann.golden_ratio, ann.symmetry, ann.neocanons});
        m.add_output(a.labels_out);
    }
    if (!a.groups_out.empty()) {
        fl::LabelChannel groups{"sensitive", {}};
        for (const auto& f : faces)
            if (ann.golden_ratio.labels.count(f.id)) groups.labels.emplace(f.id, f.sensitive);
        fl::write_label_channels(a.groups_out, {groups});
        m.add_output(a.groups_out);
    }
    if (!a.features_out.empty()) {
        fl::Warnings w;
        auto fs = fl::trainer::feature_extract(ann.scores, &w);
        warn(g, w);
        fl::write_table(a.features_out, fl::trainer::features_to_table(fs));
        m.add_output(a.features_out);
    }
    fl::write_manifest(m, a.out);
    info(g, "kept " + std::to_string(ann.kept) + " of " + std::to_string(faces.size()) + " faces as frontal");
}

// ---------------------------------------------------------------- annotate-expression

struct ExpressionArgs {
    std::string aus, taxonomy, out, histogram_out, labels_out, groups_out, features_out;
    std::string algorithm = "objlcs";
    double neutral_t = 0.3;
};

void run_expression(const ExpressionArgs& a, const Globals& g) {
    auto tax = a.taxonomy.empty() ? fl::expression::default_taxonomy() : fl::expression::load_taxonomy(a.taxonomy);
    fl::expression::ExpressionConfig cfg;
    cfg.algorithm = a.algorithm == "objbase" ? fl::expression::Algorithm::ObjBase : fl::expression::Algorithm::ObjLCS;
    cfg.neutral_t = a.neutral_t;

    fl::Warnings w;
    auto frames = fl::load_au_frames(a.aus, tax.au_codes(), {}, &w);
    warn(g, w);
    auto ann = fl::expression::annotate_expressions(frames, tax, cfg);

    fl::Table t;
    t.header = {"id", "expression", "happy_label"};
    for (std::size_t i = 0; i < frames.size(); ++i)
        t.rows.push_back({frames[i].id, tax.name(ann.expressions[i]), std::to_string(ann.happy.labels.at(frames[i].id))});
    fl::write_table(a.out, t);
    auto hist_path = with_default(a.histogram_out, a.out, ".histogram.json");
    fl::write_file(hist_path, fl::expression::histogram_json(ann, tax).dump(2) + "\n");

    fl::RunManifest m;
    m.command = "annotate-expression";
    m.config = {{"algorithm", a.algorithm}, {"neutral_t", a.neutral_t}, {"taxonomy", a.taxonomy.empty() ? "default" : a.taxonomy},
                {"frames", frames.size()}, {"clamped_intensity_warnings", w.messages.size()}};
    m.add_input(a.aus);
    if (!a.taxonomy.empty()) m.add_input(a.taxonomy);
    m.add_output(a.out);
    m.add_output(hist_path);

    if (!a.labels_out.empty()) {
        fl::write_label_channels(a.labels_out, {ann.happy});
        m.add_output(a.labels_out);
    }
    if (!a.groups_out.empty()) {
        fl::LabelChannel groups{"sensitive", {}};
        for (const auto& f : frames) groups.labels.emplace(f.id, f.sensitive);
        fl::write_label_channels(a.groups_out, {groups});
        m.add_output(a.groups_out);
    }
    if (!a.features_out.empty()) {
        auto fs = fl::trainer::feature_extract(frames, tax, cfg.intensity_normalizer);
        fl::write_table(a.features_out, fl::trainer::features_to_table(fs));
        m.add_output(a.features_out);
    }
    fl::write_manifest(m, a.out);
}

// ---------------------------------------------------------------- train / predict

struct TrainArgs {
    std::string features, labels, label_column, out;
    fl::trainer::TrainConfig cfg;
};

void run_train(const TrainArgs& a, const Globals& g) {
    auto fs = fl::trainer::load_features(a.features);
    auto labels = fl::load_label_channel(a.labels, a.label_column);
    auto cfg = a.cfg;
    cfg.seed = g.seed;
    auto model = fl::trainer::train(fs, labels, cfg);
    fl::write_file(a.out, fl::trainer::to_json(model).dump(2) + "\n");

    fl::RunManifest m;
    m.command = "train";
    m.config = {{"label_column", labels.name}, {"lr", cfg.learning_rate}, {"epochs", cfg.epochs}, {"l2", cfg.l2}, {"seed", cfg.seed},
                {"training_accuracy", fl::trainer::training_accuracy(model, fs, labels)}};
    m.add_input(a.features);
    m.add_input(a.labels);
    m.add_output(a.out);
    fl::write_manifest(m, a.out);
}

struct PredictArgs {
    std::string model, features, name, out;
};

void run_predict(const PredictArgs& a, const Globals&) {
    auto model = fl::trainer::model_from_json(nlohmann::json::parse(fl::read_file(a.model)));
    auto fs = fl::trainer::load_features(a.features);
    if (fs.names != model.feature_names) throw fl::ShapeError("feature columns do not match the model's feature names");
    auto pm = fl::trainer::predict_proba(model, fs, a.name);
    fl::write_predictions(a.out, pm);

    fl::RunManifest m;
    m.command = "predict";
    m.config = {{"name", a.name}};
    m.add_input(a.model);
    m.add_input(a.features);
    m.add_output(a.out);
    fl::write_manifest(m, a.out);
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::string pred, truth, truth_column, groups, groups_column = "sensitive", out, weights;
};

std::vector<double> parse_weights(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto v = fl::parse_number(item);
        if (!v) throw fl::ConfigError("invalid weight '" + item + "'");
        out.push_back(*v);
    }
    return out;
}

// Accepts a label file (id, pred) or a prediction matrix (combined with --weights when M > 1).
std::map<std::string, int> load_decisions(const EvaluateArgs& a) {
    auto table = fl::read_table(a.pred);
    bool is_matrix = false;
    for (const auto& h : table.header)
        if (h.size() > 3 && h.rfind("_p0") == h.size() - 3) is_matrix = true;
    if (!is_matrix) return fl::label_channels_from_table(table).at(0).labels;

    auto pm = fl::predictions_from_table(table);
    fl::ensemble::WeightVector w;
    if (a.weights.empty()) {
        if (pm.models() != 1) throw fl::ConfigError("prediction file has several models; pass --weights");
        w = fl::ensemble::WeightVector::one_hot(1, 0);
    } else {
        w.alphas = parse_weights(a.weights);
    }
    w.validate();
    return fl::ensemble::combine(w, pm);
}

void run_evaluate(const EvaluateArgs& a, const Globals&) {
    auto pred = load_decisions(a);
    auto truth = fl::load_label_channel(a.truth, a.truth_column);
    auto groups = groups_from(a.groups, a.groups_column);
    auto report = fl::fairness::fairness_report(pred, truth, groups);
    fl::write_file(a.out, fl::fairness::to_json(report).dump(2) + "\n");

    fl::RunManifest m;
    m.command = "evaluate";
    m.config = {{"truth_column", truth.name}, {"groups_column", a.groups_column}, {"weights", a.weights}};
    m.add_input(a.pred);
    m.add_input(a.truth);
    m.add_input(a.groups);
    m.add_output(a.out);
    fl::write_manifest(m, a.out);
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    std::vector<std::string> preds;
    std::string truth, truth_column, groups, groups_column = "sensitive", out;
    std::string metric = "eoo";
    double step = 0.1;
};

fl::ensemble::GapMetric parse_metric(const std::string& m) {
    return m == "disc" ? fl::ensemble::GapMetric::Discrimination : fl::ensemble::GapMetric::EqualOpportunity;
}

void run_sweep(const SweepArgs& a, const Globals& g) {
    std::vector<fl::PredictionMatrix> parts;
    for (const auto& p : a.preds) parts.push_back(fl::load_predictions(p));
    auto preds = parts.size() == 1 ? parts.front() : fl::merge_predictions(parts);
    auto truth = fl::load_label_channel(a.truth, a.truth_column);
    auto groups = groups_from(a.groups, a.groups_column);
    auto grid = fl::ensemble::weight_grid(preds.models(), a.step);
    auto cands = fl::ensemble::sweep(preds, truth, groups, grid, parse_metric(a.metric), g.threads);
    fl::write_table(a.out, fl::ensemble::candidates_to_table(cands, preds.model_names()));

    std::size_t defined = 0;
    for (const auto& c : cands) defined += c.gap.has_value();
    fl::RunManifest m;
    m.command = "sweep";
    m.config = {{"metric", a.metric}, {"step", a.step}, {"models", preds.model_names()}, {"truth_column", truth.name},
                {"groups_column", a.groups_column}, {"candidates", cands.size()}, {"defined", defined}};
    for (const auto& p : a.preds) m.add_input(p);
    m.add_input(a.truth);
    m.add_input(a.groups);
    m.add_output(a.out);
    fl::write_manifest(m, a.out);
    info(g, "evaluated " + std::to_string(cands.size()) + " weight vectors (" + std::to_string(defined) + " with a defined gap)");
}

// ---------------------------------------------------------------- pareto / report

struct ParetoArgs {
    std::vector<std::string> candidates;
    std::string out, topk_out, svg_out, title;
    std::size_t k = 3;
    std::vector<double> hlines, vlines;
};

std::vector<fl::svg::Marker> individual_markers(const fl::ensemble::CandidateSet& set) {
    std::vector<fl::svg::Marker> out;
    for (const auto& c : set.candidates)
        if (auto i = c.weights.one_hot_index(); i && c.gap) out.push_back({set.model_names[*i], c.accuracy, *c.gap});
    return out;
}

void run_pareto(const ParetoArgs& a, const Globals& g) {
    std::vector<fl::ensemble::CandidateSet> sets;
    std::vector<fl::ensemble::ParetoFrontier> frontiers;
    for (const auto& p : a.candidates) {
        sets.push_back(fl::ensemble::candidates_from_table(fl::read_table(p)));
        frontiers.push_back(fl::ensemble::pareto_frontier(sets.back().candidates));
    }
    const auto& first = sets.front();
    fl::write_table(a.out, fl::ensemble::candidates_to_table(frontiers.front().points, first.model_names));

    fl::Warnings w;
    auto top = fl::ensemble::select_top_k_intersection(frontiers, a.k, &w);
    warn(g, w);
    auto topk_path = with_default(a.topk_out, a.out, ".topk.csv");
    fl::write_table(topk_path, fl::ensemble::candidates_to_table(top, first.model_names));

    fl::svg::ScatterOptions opt;
    opt.hlines = a.hlines;
    opt.vlines = a.vlines;
    opt.title = a.title;
    auto svg_path = with_default(a.svg_out, a.out, ".svg");
    fl::write_file(svg_path, fl::svg::render_scatter(first.candidates, frontiers.front(), individual_markers(first), opt));

    fl::RunManifest m;
    m.command = "pareto";
    m.config = {{"k", a.k}, {"hlines", a.hlines}, {"vlines", a.vlines}, {"frontier_size", frontiers.front().points.size()},
                {"intersection_size", top.size()}};
    for (const auto& p : a.candidates) m.add_input(p);
    m.add_output(a.out);
    m.add_output(topk_path);
    m.add_output(svg_path);
    fl::write_manifest(m, a.out);
}

struct ReportArgs {
    std::vector<std::string> candidates;
    std::string out;
    std::size_t k = 3;
};

std::string weights_str(const fl::ensemble::WeightVector& w) {
    std::string s = "(";
    for (std::size_t i = 0; i < w.alphas.size(); ++i) s += (i ? ", " : "") + fl::format_number(w.alphas[i]);
    return s + ")";
}

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

void run_report(const ReportArgs& a, const Globals& g) {
    std::ostringstream md;
    md << "# Ensemble sweep report\n";
    std::vector<fl::ensemble::CandidateSet> sets;
    std::vector<fl::ensemble::ParetoFrontier> frontiers;
    for (const auto& p : a.candidates) {
        sets.push_back(fl::ensemble::candidates_from_table(fl::read_table(p)));
        frontiers.push_back(fl::ensemble::pareto_frontier(sets.back().candidates));
        const auto& set = sets.back();
        const auto& f = frontiers.back();
        std::size_t defined = 0;
        for (const auto& c : set.candidates) defined += c.gap.has_value();
        md << "\n## " << std::filesystem::path(p).filename().string() << "\n\n";
        md << "- candidates: " << set.candidates.size() << " (" << defined << " with a defined gap)\n";
        md << "- frontier size: " << f.points.size() << "\n\n";
        md << "| model | accuracy | gap |\n|---|---|---|\n";
        for (const auto& mk : individual_markers(set)) md << "| " << mk.label << " | " << fmt4(mk.accuracy) << " | " << fmt4(mk.gap) << " |\n";
        md << "\nFrontier (accuracy descending):\n\n| weights | accuracy | gap |\n|---|---|---|\n";
        for (const auto& c : f.points) md << "| " << weights_str(c.weights) << " | " << fmt4(c.accuracy) << " | " << fmt4(*c.gap) << " |\n";
    }
    fl::Warnings w;
    auto top = fl::ensemble::select_top_k_intersection(frontiers, a.k, &w);
    warn(g, w);
    md << "\n## Top " << a.k << " in the intersection of all frontiers (gap ascending)\n\n";
    if (top.empty()) md << "_empty intersection_\n";
    else {
        md << "| weights | accuracy | gap |\n|---|---|---|\n";
        for (const auto& c : top) md << "| " << weights_str(c.weights) << " | " << fmt4(c.accuracy) << " | " << fmt4(*c.gap) << " |\n";
    }
    fl::write_file(a.out, md.str());

    fl::RunManifest m;
    m.command = "report";
    m.config = {{"k", a.k}};
    for (const auto& p : a.candidates) m.add_input(p);
    m.add_output(a.out);
    fl::write_manifest(m, a.out);
}

// ---------------------------------------------------------------- config defaults

// FAIRLENS_CONFIG points at {"threads": 2, "sweep": {"step": 0.05}, ...}.
// Values are appended as flags only when the flag is absent from argv.
std::vector<std::string> apply_config_defaults(std::vector<std::string> args, const std::set<std::string>& subcommands) {
    const char* path = std::getenv("FAIRLENS_CONFIG");
    if (!path || !*path) return args;
    nlohmann::json cfg;
    try {
        cfg = nlohmann::json::parse(fl::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw fl::ConfigError(std::string("invalid FAIRLENS_CONFIG file: ") + e.what());
    }
    if (!cfg.is_object()) throw fl::ConfigError("FAIRLENS_CONFIG must hold a JSON object");

    std::string sub;
    for (std::size_t i = 1; i < args.size(); ++i)
        if (subcommands.count(args[i])) {
            sub = args[i];
            break;
        }
    auto present = [&](const std::string& flag) {
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        return false;
    };
    auto scalar = [](const nlohmann::json& v) {
        return v.is_string() ? v.get<std::string>() : v.is_number_float() ? fl::format_number(v.get<double>()) : v.dump();
    };
    auto append = [&](const std::string& key, const nlohmann::json& v) {
        std::string flag = "--" + key;
        if (present(flag)) return;
        if (v.is_boolean()) {
            if (v.get<bool>()) args.push_back(flag);
        } else if (v.is_array()) {
            for (const auto& e : v) {
                args.push_back(flag);
                args.push_back(scalar(e));
            }
        } else {
            args.push_back(flag);
            args.push_back(scalar(v));
        }
    };
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        if (subcommands.count(it.key())) continue;
        append(it.key(), it.value());
    }
    if (!sub.empty() && cfg.contains(sub) && cfg[sub].is_object())
        for (auto it = cfg[sub].begin(); it != cfg[sub].end(); ++it) append(it.key(), it.value());
    return args;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fairlens: objective annotations, group-fairness metrics and fair ensemble search"};
    app.set_version_flag("--version", std::string(fl::kVersion));
    app.fallthrough();
    app.require_subcommand(1);

    Globals g;
    app.add_option("--threads", g.threads, "Worker threads for the sweep")->check(CLI::PositiveNumber);
    app.add_option("--seed", g.seed, "Seed recorded in manifests");
    app.add_flag("--quiet", g.quiet, "Suppress informational output and warnings");

    AttractivenessArgs attr;
    auto* c_attr = app.add_subcommand("annotate-attractiveness", "Score landmarks and emit attractiveness labels");
    c_attr->add_option("--landmarks", attr.landmarks, "Landmark CSV/JSON")->required()->check(CLI::ExistingFile);
    c_attr->add_option("--beta", attr.cfg.beta_frontal, "Frontality threshold in pixels")->capture_default_str();
    c_attr->add_option("--delta", attr.cfg.delta_gr, "Golden-ratio half-width")->capture_default_str();
    c_attr->add_option("--t-sym", attr.cfg.t_sym, "Symmetry threshold")->capture_default_str();
    c_attr->add_option("--t-neo", attr.cfg.t_neo, "Neoclassical-canon threshold")->capture_default_str();
    c_attr->add_flag("--invert-frontality", attr.cfg.invert_frontality, "Keep faces whose eye-nose asymmetry exceeds beta");
    c_attr->add_option("--out", attr.out, "Scores CSV")->required();
    c_attr->add_option("--labels-out", attr.labels_out, "Label channels CSV over frontal faces");
    c_attr->add_option("--groups-out", attr.groups_out, "Sensitive-attribute CSV over frontal faces");
    c_attr->add_option("--features-out", attr.features_out, "Standardized score features CSV");

    ExpressionArgs expr;
    auto* c_expr = app.add_subcommand("annotate-expression", "Label expressions from action units");
    c_expr->add_option("--aus", expr.aus, "AU CSV/JSON")->required()->check(CLI::ExistingFile);
    c_expr->add_option("--algorithm", expr.algorithm, "objbase or objlcs")
        ->check(CLI::IsMember({"objbase", "objlcs"}))
        ->capture_default_str();
    c_expr->add_option("--neutral-t", expr.neutral_t, "Neutral threshold on mean normalized intensity")->capture_default_str();
    c_expr->add_option("--taxonomy", expr.taxonomy, "Taxonomy JSON")->check(CLI::ExistingFile);
    c_expr->add_option("--out", expr.out, "Expression CSV")->required();
    c_expr->add_option("--histogram-out", expr.histogram_out, "Histogram JSON (default <out>.histogram.json)");
    c_expr->add_option("--labels-out", expr.labels_out, "Happy label channel CSV");
    c_expr->add_option("--groups-out", expr.groups_out, "Sensitive-attribute CSV");
    c_expr->add_option("--features-out", expr.features_out, "Normalized intensity features CSV");

    TrainArgs tr;
    auto* c_train = app.add_subcommand("train", "Train a logistic-regression model");
    c_train->add_option("--features", tr.features, "Feature CSV")->required()->check(CLI::ExistingFile);
    c_train->add_option("--labels", tr.labels, "Label CSV")->required()->check(CLI::ExistingFile);
    c_train->add_option("--label-column", tr.label_column, "Label column (default: first)");
    c_train->add_option("--lr", tr.cfg.learning_rate, "Learning rate")->capture_default_str();
    c_train->add_option("--epochs", tr.cfg.epochs, "Full-batch epochs")->capture_default_str();
    c_train->add_option("--l2", tr.cfg.l2, "L2 penalty")->capture_default_str();
    c_train->add_option("--out", tr.out, "Model JSON")->required();

    PredictArgs pr;
    auto* c_pred = app.add_subcommand("predict", "Write class probabilities for a feature table");
    c_pred->add_option("--model", pr.model, "Model JSON")->required()->check(CLI::ExistingFile);
    c_pred->add_option("--features", pr.features, "Feature CSV")->required()->check(CLI::ExistingFile);
    c_pred->add_option("--name", pr.name, "Model name used in the column header")->required();
    c_pred->add_option("--out", pr.out, "Prediction CSV")->required();

    EvaluateArgs ev;
    auto* c_eval = app.add_subcommand("evaluate", "Fairness report for one set of predictions");
    c_eval->add_option("--pred", ev.pred, "Decision CSV (id,label) or prediction matrix")->required()->check(CLI::ExistingFile);
    c_eval->add_option("--truth", ev.truth, "Ground-truth label CSV")->required()->check(CLI::ExistingFile);
    c_eval->add_option("--truth-column", ev.truth_column, "Ground-truth column (default: first)");
    c_eval->add_option("--groups", ev.groups, "Sensitive-attribute CSV")->required()->check(CLI::ExistingFile);
    c_eval->add_option("--groups-column", ev.groups_column, "Sensitive-attribute column")->capture_default_str();
    c_eval->add_option("--weights", ev.weights, "Comma-separated ensemble weights for multi-model inputs");
    c_eval->add_option("--out", ev.out, "Report JSON")->required();

    SweepArgs sw;
    auto* c_sweep = app.add_subcommand("sweep", "Evaluate every weight vector of the grid");
    c_sweep->add_option("--preds", sw.preds, "Prediction CSV (repeatable; merged by id)")->required()->check(CLI::ExistingFile);
    c_sweep->add_option("--truth", sw.truth, "Ground-truth label CSV")->required()->check(CLI::ExistingFile);
    c_sweep->add_option("--truth-column", sw.truth_column, "Ground-truth column (default: first)");
    c_sweep->add_option("--groups", sw.groups, "Sensitive-attribute CSV")->required()->check(CLI::ExistingFile);
    c_sweep->add_option("--groups-column", sw.groups_column, "Sensitive-attribute column")->capture_default_str();
    c_sweep->add_option("--metric", sw.metric, "eoo or disc")->check(CLI::IsMember({"eoo", "disc"}))->capture_default_str();
    c_sweep->add_option("--step", sw.step, "Grid step")->capture_default_str();
    c_sweep->add_option("--out", sw.out, "Candidate CSV")->required();

    ParetoArgs pa;
    auto* c_pareto = app.add_subcommand("pareto", "Pareto frontier, top-k intersection and scatter plot");
    c_pareto->add_option("--candidates", pa.candidates, "Candidate CSV (repeatable)")->required()->check(CLI::ExistingFile);
    c_pareto->add_option("--k", pa.k, "Number of intersection candidates to keep")->capture_default_str();
    c_pareto->add_option("--out", pa.out, "Frontier CSV of the first candidate file")->required();
    c_pareto->add_option("--topk-out", pa.topk_out, "Top-k CSV (default <out>.topk.csv)");
    c_pareto->add_option("--svg", pa.svg_out, "Scatter SVG (default <out>.svg)");
    c_pareto->add_option("--hline", pa.hlines, "Reference line at this gap (repeatable)");
    c_pareto->add_option("--vline", pa.vlines, "Reference line at this accuracy (repeatable)");
    c_pareto->add_option("--title", pa.title, "Plot title");

    ReportArgs rp;
    auto* c_report = app.add_subcommand("report", "Markdown summary of sweeps");
    c_report->add_option("--candidates", rp.candidates, "Candidate CSV (repeatable)")->required()->check(CLI::ExistingFile);
    c_report->add_option("--k", rp.k, "Number of intersection candidates to list")->capture_default_str();
    c_report->add_option("--out", rp.out, "Markdown output")->required();

    std::vector<std::string> args(argv, argv + argc);
    try {
        std::set<std::string> names;
        for (const auto* sc : app.get_subcommands([](const CLI::App*) { return true; })) names.insert(sc->get_name());
        args = apply_config_defaults(std::move(args), names);
    } catch (const fl::Error& e) {
        std::cerr << ordered_json{{"error", error_kind(e)}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*c_attr) run_attractiveness(attr, g);
        else if (*c_expr) run_expression(expr, g);
        else if (*c_train) run_train(tr, g);
        else if (*c_pred) run_predict(pr, g);
        else if (*c_eval) run_evaluate(ev, g);
        else if (*c_sweep) run_sweep(sw, g);
        else if (*c_pareto) run_pareto(pa, g);
        else if (*c_report) run_report(rp, g);
    } catch (const std::exception& e) {
        std::cerr << ordered_json{{"error", error_kind(e)}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }
    return 0;
}
