#include "seqml/cli.hpp"

#include "seqml/error.hpp"
#include "seqml/estimators.hpp"
#include "seqml/stages.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace seqml::cli {

namespace fs = std::filesystem;

SequenceDataset generate_synthetic(const GenerateOptions& options) {
    if (options.series < 1 || options.length < 1 || options.channels < 1 || options.classes < 1) {
        throw Error(Errc::InvalidParameter, "generate: n, t, d and classes must all be >= 1");
    }
    constexpr double kNoise = 0.3;
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> noise(0.0, kNoise);

    SequenceDataset ds;
    ds.schema.channels = options.channels;
    ds.schema.target_kind = TargetKind::ClassLabel;
    ds.schema.class_count = options.classes;
    ds.instances.reserve(options.series);
    const auto T = static_cast<double>(options.length);
    for (std::size_t i = 0; i < options.series; ++i) {
        const Label label = static_cast<Label>(i % static_cast<std::size_t>(options.classes));
        const double cycles = 1.0 + static_cast<double>(label);
        const double amplitude = 1.0 + 0.5 * static_cast<double>(label);
        SequenceInstance inst;
        inst.target = label;
        inst.samples.resize(options.length, options.channels);
        std::vector<double> phases(static_cast<std::size_t>(options.channels));
        for (auto& p : phases) p = phase_dist(rng);
        for (Eigen::Index t = 0; t < options.length; ++t) {
            for (Eigen::Index c = 0; c < options.channels; ++c) {
                const double angle = 2.0 * std::numbers::pi * cycles * static_cast<double>(t) / T +
                                     phases[static_cast<std::size_t>(c)];
                inst.samples(t, c) = amplitude * std::sin(angle) + noise(rng);
            }
        }
        ds.instances.push_back(std::move(inst));
    }
    return ds;
}

namespace {

[[noreturn]] void config_fail(const std::string& msg) { throw Error(Errc::ConfigError, msg); }

const Json& require_field(const Json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) config_fail(where + ": missing field \"" + key + "\"");
    return obj[key];
}

fs::path resolve(const fs::path& p, const fs::path& base) {
    if (p.is_absolute() || base.empty()) return p;
    return base / p;
}

SplitSpec parse_split(const Json& node) {
    if (!node.is_object()) config_fail("split: must be an object");
    SplitSpec spec;
    const Json& kind = require_field(node, "kind", "split");
    if (!kind.is_string()) config_fail("split.kind: must be a string");
    const std::string k = kind.get<std::string>();
    auto number = [&](const char* key, double fallback) {
        if (!node.contains(key)) return fallback;
        if (!node[key].is_number()) config_fail(std::string("split.") + key + ": must be a number");
        return node[key].get<double>();
    };
    if (k == "instance") {
        spec.kind = SplitSpec::Kind::Instance;
        spec.test_fraction = number("test_fraction", 0.25);
        const double seed = number("seed", 0.0);
        if (seed < 0 || std::floor(seed) != seed) config_fail("split.seed: must be a non-negative integer");
        spec.seed = static_cast<std::uint64_t>(seed);
    } else if (k == "temporal") {
        spec.kind = SplitSpec::Kind::Temporal;
        spec.test_fraction = number("test_fraction", 0.25);
    } else if (k == "kfold") {
        spec.kind = SplitSpec::Kind::KFold;
        const double folds = number("k", 3.0);
        if (folds < 2 || std::floor(folds) != folds) config_fail("split.k: must be an integer >= 2");
        spec.k = static_cast<int>(folds);
    } else {
        config_fail("split.kind: expected instance, temporal or kfold, got '" + k + "'");
    }
    if (spec.kind != SplitSpec::Kind::KFold && !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
        config_fail("split.test_fraction: must be in (0, 1)");
    }
    return spec;
}

Json split_to_json(const SplitSpec& spec) {
    Json out;
    switch (spec.kind) {
    case SplitSpec::Kind::Instance:
        out["kind"] = "instance";
        out["test_fraction"] = spec.test_fraction;
        out["seed"] = spec.seed;
        break;
    case SplitSpec::Kind::Temporal:
        out["kind"] = "temporal";
        out["test_fraction"] = spec.test_fraction;
        break;
    case SplitSpec::Kind::KFold:
        out["kind"] = "kfold";
        out["k"] = spec.k;
        break;
    }
    return out;
}

Json grid_to_json(const ParamGrid& grid) {
    Json out = Json::object();
    for (const auto& [path, values] : grid.axes) out[path] = values;
    return out;
}

Json timings_json(const std::vector<StageTiming>& timings) {
    Json out = Json::array();
    for (const auto& t : timings) out.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    return out;
}

Json class_metrics_json(const Prediction& prediction, const Schema& schema) {
    Json out = Json::array();
    for (const auto& [label, m] : per_class_metrics(prediction.truth, prediction.values)) {
        Json row;
        row["label"] = label;
        if (label >= 0 && static_cast<std::size_t>(label) < schema.label_names.size()) {
            row["name"] = schema.label_names[static_cast<std::size_t>(label)];
        }
        row["precision"] = m.precision;
        row["recall"] = m.recall;
        row["support"] = m.support;
        out.push_back(std::move(row));
    }
    return out;
}

/// Applies the best grid row (if any) to a copy of the pipeline.
Pype with_params(const Pype& pipeline, const Json& params) {
    Pype out = pipeline.clone_unfitted();
    for (const auto& [path, value] : params.items()) out = out.set_param(path, value);
    return out;
}

struct Evaluation {
    Pype pipeline;
    Prediction prediction;
    std::size_t train_segments = 0;
};

Evaluation evaluate(const Pype& pipeline, const SplitPair& split) {
    Pype fitted = pipeline.clone_unfitted();
    fitted.fit(split.train);
    Prediction prediction = fitted.predict(split.test);
    const std::size_t train_segments = fitted.fit_info()->segments;
    return {std::move(fitted), std::move(prediction), train_segments};
}

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void write_json(const fs::path& path, const Json& value) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write report: " + path.string());
    out << value.dump(2) << '\n';
}

int report_error(const std::exception& e, std::ostream& err) {
    if (const auto* se = dynamic_cast<const Error*>(&e)) {
        err << "error [" << to_string(se->code()) << "]: " << se->what() << '\n';
        return is_config_error(se->code()) ? kConfigError : kDataError;
    }
    err << "error: " << e.what() << '\n';
    return kDataError;
}

}  // namespace

RunConfig parse_config(const Json& config, const fs::path& base_dir) {
    if (!config.is_object()) config_fail("config: top level must be an object");
    RunConfig rc;
    const Json& dataset = require_field(config, "dataset", "config");
    if (!dataset.is_string()) config_fail("config.dataset: must be a path string");
    rc.dataset = resolve(dataset.get<std::string>(), base_dir);

    rc.pipeline = require_field(config, "pipeline", "config");
    if (!rc.pipeline.is_array()) config_fail("config.pipeline: must be an array of stages");
    if (config.contains("estimator")) {
        const Json& est = config["estimator"];
        if (!est.is_object()) config_fail("config.estimator: must be an object");
        rc.pipeline.push_back(est);
    }
    // Build once so that pipeline errors surface as config errors here.
    (void)make_pipeline(rc.pipeline);

    rc.split = parse_split(require_field(config, "split", "config"));
    if (config.contains("grid") && !config["grid"].is_null()) rc.grid = ParamGrid::from_json(config["grid"]);
    if (config.contains("grid_folds")) {
        const Json& k = config["grid_folds"];
        if (!k.is_number_integer() || k.get<int>() < 2) config_fail("config.grid_folds: must be an integer >= 2");
        rc.grid_folds = k.get<int>();
    }
    if (config.contains("output") && !config["output"].is_null()) {
        if (!config["output"].is_string()) config_fail("config.output: must be a path string");
        rc.output = resolve(config["output"].get<std::string>(), base_dir);
    }
    return rc;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) config_fail("cannot read config file: " + path.string());
    Json config;
    try {
        config = Json::parse(in);
    } catch (const Json::parse_error& e) {
        config_fail("config " + path.string() + ": invalid JSON: " + e.what());
    }
    return parse_config(config, path.parent_path());
}

Json echo_config(const RunConfig& config) {
    Json out;
    out["dataset"] = fs::absolute(config.dataset).lexically_normal().string();
    out["pipeline"] = make_pipeline(config.pipeline).to_config();
    out["split"] = split_to_json(config.split);
    if (config.grid) {
        out["grid"] = grid_to_json(*config.grid);
        out["grid_folds"] = config.grid_folds;
    }
    if (config.output) out["output"] = fs::absolute(*config.output).lexically_normal().string();
    return out;
}

Json fit_eval(const RunConfig& config, const SequenceDataset& dataset) {
    Pype pipeline = make_pipeline(config.pipeline);
    Json report;
    report["version"] = kVersion;
    report["config"] = echo_config(config);
    const Schema& schema = dataset.schema;
    if (!schema.label_names.empty()) report["label_names"] = schema.label_names;

    std::optional<GridSearchResult> search;
    auto run_search = [&](const FoldPlan& folds) {
        search = grid_search(pipeline, *config.grid, folds);
        if (const GridRow* best = search->best()) pipeline = with_params(pipeline, best->params);
    };

    Prediction combined;
    std::size_t train_segments = 0;
    std::vector<StageTiming> fit_timings;
    std::vector<StageTiming> predict_timings;
    std::vector<std::string> feature_names;

    if (config.split.kind == SplitSpec::Kind::KFold) {
        const FoldPlan folds = temporal_k_fold(dataset, config.split.k);
        if (config.grid) run_search(folds);
        Json fold_scores = Json::array();
        double total = 0.0;
        for (const auto& fold : folds.folds) {
            Evaluation e = evaluate(pipeline, fold);
            const double s = score_predictions(e.prediction);
            fold_scores.push_back(s);
            total += s;
            train_segments += e.train_segments;
            combined.target_type = e.prediction.target_type;
            const auto old = combined.values.size();
            const auto add = e.prediction.values.size();
            combined.values.conservativeResize(old + add);
            combined.values.tail(add) = e.prediction.values;
            combined.truth.conservativeResize(old + add);
            combined.truth.tail(add) = e.prediction.truth;
            fit_timings.insert(fit_timings.end(), e.pipeline.fit_info()->timings.begin(),
                               e.pipeline.fit_info()->timings.end());
            predict_timings.insert(predict_timings.end(), e.prediction.timings.begin(), e.prediction.timings.end());
            feature_names = e.pipeline.fit_info()->feature_names;
        }
        report["score"] = total / static_cast<double>(folds.k());
        report["fold_scores"] = std::move(fold_scores);
    } else {
        const SplitPair split = config.split.kind == SplitSpec::Kind::Instance
                                    ? split_instances(dataset, config.split.test_fraction, config.split.seed)
                                    : temporal_split(dataset, config.split.test_fraction);
        if (config.grid) run_search(temporal_k_fold(split.train, config.grid_folds));
        Evaluation e = evaluate(pipeline, split);
        report["score"] = score_predictions(e.prediction);
        train_segments = e.train_segments;
        fit_timings = e.pipeline.fit_info()->timings;
        predict_timings = e.prediction.timings;
        feature_names = e.pipeline.fit_info()->feature_names;
        combined = std::move(e.prediction);
        report["train_instances"] = split.train.size();
        report["test_instances"] = split.test.size();
    }

    const bool classification = combined.target_type == TargetType::Label;
    report["metric"] = classification ? "accuracy" : "neg_rmse";
    report["train_segments"] = train_segments;
    report["test_segments"] = combined.size();
    if (classification) report["per_class"] = class_metrics_json(combined, schema);
    report["feature_names"] = feature_names;
    report["timing"] = {{"fit", timings_json(fit_timings)}, {"predict", timings_json(predict_timings)}};
    if (search) report["grid_search"] = search->to_json();
    return report;
}

Json bench(const RunConfig& config, const SequenceDataset& dataset, int repeats) {
    if (repeats < 1) throw Error(Errc::InvalidParameter, "repeats must be >= 1");
    const Pype pipeline = make_pipeline(config.pipeline);
    SplitPair split;
    switch (config.split.kind) {
    case SplitSpec::Kind::Instance: split = split_instances(dataset, config.split.test_fraction, config.split.seed); break;
    case SplitSpec::Kind::Temporal: split = temporal_split(dataset, config.split.test_fraction); break;
    case SplitSpec::Kind::KFold: split = std::move(temporal_k_fold(dataset, config.split.k).folds.front()); break;
    }

    using Clock = std::chrono::steady_clock;
    std::vector<double> totals;
    std::vector<std::string> stage_labels;
    std::vector<std::vector<double>> stage_samples;
    double score = 0.0;
    for (int r = 0; r < repeats; ++r) {
        Pype trial = pipeline.clone_unfitted();
        const auto start = Clock::now();
        trial.fit(split.train);
        const Prediction prediction = trial.predict(split.test);
        score = score_predictions(prediction);
        totals.push_back(std::chrono::duration<double>(Clock::now() - start).count());

        std::vector<std::pair<std::string, double>> stages;
        for (const auto& t : trial.fit_info()->timings) stages.emplace_back("fit:" + t.stage, t.seconds);
        for (const auto& t : prediction.timings) stages.emplace_back("predict:" + t.stage, t.seconds);
        if (stage_labels.empty()) {
            for (const auto& [label, _] : stages) stage_labels.push_back(label);
            stage_samples.resize(stages.size());
        }
        for (std::size_t s = 0; s < stages.size() && s < stage_samples.size(); ++s) {
            stage_samples[s].push_back(stages[s].second);
        }
    }

    Json report;
    report["version"] = kVersion;
    report["repeats"] = repeats;
    report["score"] = score;
    report["total_seconds"] = totals;
    report["total_min"] = *std::min_element(totals.begin(), totals.end());
    report["total_median"] = median_of(totals);
    Json stages = Json::array();
    for (std::size_t s = 0; s < stage_labels.size(); ++s) {
        stages.push_back({{"stage", stage_labels[s]},
                          {"min", *std::min_element(stage_samples[s].begin(), stage_samples[s].end())},
                          {"median", median_of(stage_samples[s])}});
    }
    report["stages"] = std::move(stages);
    report["config"] = echo_config(config);
    return report;
}

std::string inspect(const SequenceDataset& dataset) {
    std::ostringstream os;
    const Schema& schema = dataset.schema;
    os << "N: " << dataset.size() << '\n';
    os << "d: " << schema.channels << '\n';
    os << "c: " << schema.context_width << '\n';
    os << "target kind: " << to_string(schema.target_kind);
    if (schema.target_kind == TargetKind::AlignedSequence) os << (schema.label_sequence ? " (labels)" : " (real)");
    os << '\n';
    std::vector<double> lengths;
    for (const auto& inst : dataset) lengths.push_back(static_cast<double>(inst.length()));
    if (!lengths.empty()) {
        os << "T: min " << *std::min_element(lengths.begin(), lengths.end()) << ", median " << median_of(lengths)
           << ", max " << *std::max_element(lengths.begin(), lengths.end()) << '\n';
    }
    const bool has_time = std::any_of(dataset.begin(), dataset.end(), [](const auto& i) { return i.time.has_value(); });
    os << "time vectors: " << (has_time ? "yes" : "no") << '\n';
    if (schema.target_kind != TargetKind::ClassLabel) {
        os << "class histogram: n/a\n";
    } else {
        os << "class histogram:";
        for (const auto& [label, count] : class_histogram(dataset)) {
            os << ' ';
            if (static_cast<std::size_t>(label) < schema.label_names.size()) {
                os << schema.label_names[static_cast<std::size_t>(label)];
            } else {
                os << label;
            }
            os << '=' << count;
        }
        os << '\n';
    }
    return os.str();
}

int cmd_fit_eval(const fs::path& config_path, std::ostream& out, std::ostream& err) {
    RunConfig config;
    try {
        config = load_config(config_path);
    } catch (const std::exception& e) {
        return report_error(e, err);
    }
    try {
        const SequenceDataset dataset = read_ndjson(config.dataset);
        const Json report = fit_eval(config, dataset);
        if (config.output) write_json(*config.output, report);
        out << "score: " << std::setprecision(6) << report["score"].get<double>() << " ("
            << report["metric"].get<std::string>() << ", " << report["train_segments"].get<std::size_t>()
            << " train / " << report["test_segments"].get<std::size_t>() << " test segments)";
        if (config.output) out << ", report: " << config.output->string();
        out << '\n';
        return kOk;
    } catch (const std::exception& e) {
        return report_error(e, err);
    }
}

int cmd_generate(const GenerateOptions& options, const fs::path& out_path, std::ostream& out, std::ostream& err) {
    try {
        const SequenceDataset ds = generate_synthetic(options);
        if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
        write_ndjson(ds, out_path);
        out << "wrote " << ds.size() << " series (T=" << options.length << ", d=" << options.channels
            << ", classes=" << options.classes << ") to " << out_path.string() << '\n';
        return kOk;
    } catch (const std::exception& e) {
        return report_error(e, err);
    }
}

int cmd_bench(const fs::path& config_path, int repeats, std::ostream& out, std::ostream& err) {
    RunConfig config;
    try {
        config = load_config(config_path);
        if (repeats < 1) config_fail("--repeats must be >= 1");
    } catch (const std::exception& e) {
        return report_error(e, err);
    }
    try {
        const SequenceDataset dataset = read_ndjson(config.dataset);
        const Json report = bench(config, dataset, repeats);
        out << report.dump(2) << '\n';
        return kOk;
    } catch (const std::exception& e) {
        return report_error(e, err);
    }
}

int cmd_inspect(const fs::path& dataset_path, std::ostream& out, std::ostream& err) {
    try {
        out << inspect(read_ndjson(dataset_path));
        return kOk;
    } catch (const std::exception& e) {
        return report_error(e, err);
    }
}

}  // namespace seqml::cli
