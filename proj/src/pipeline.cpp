#include "seqml/pipeline.hpp"

#include "seqml/error.hpp"
#include "seqml/estimators.hpp"

#include <chrono>
#include <map>
#include <set>

namespace seqml {

const char* to_string(StageKind kind) noexcept {
    switch (kind) {
    case StageKind::DatasetTransform: return "DatasetTransform";
    case StageKind::Segmenter: return "Segmenter";
    case StageKind::FeatureStage: return "FeatureStage";
    case StageKind::MatrixTransform: return "MatrixTransform";
    case StageKind::Estimator: return "Estimator";
    }
    return "Unknown";
}

Json Stage::to_config() const {
    Json out;
    out["kind"] = type();
    out["name"] = name();
    const Json current = params();
    for (const auto& [key, value] : current.items()) out[key] = value;
    return out;
}

void Stage::unknown_param(const std::string& key) const {
    throw Error(Errc::UnknownParamPath, "stage '" + name() + "' (" + type() + ") has no parameter '" + key + "'");
}

std::vector<std::pair<std::size_t, Label>> majority_vote(const Prediction& prediction) {
    std::map<std::size_t, std::map<Label, std::size_t>> votes;
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        ++votes[prediction.origins[i].parent][static_cast<Label>(prediction.values[static_cast<Eigen::Index>(i)])];
    }
    std::vector<std::pair<std::size_t, Label>> out;
    for (const auto& [parent, counts] : votes) {
        Label best = counts.begin()->first;
        std::size_t best_count = 0;
        for (const auto& [label, count] : counts) {
            if (count > best_count) {
                best = label;
                best_count = count;
            }
        }
        out.emplace_back(parent, best);
    }
    return out;
}

double score_predictions(const Prediction& prediction) {
    switch (prediction.target_type) {
    case TargetType::Label: return accuracy(prediction.truth, prediction.values);
    case TargetType::Real: return -rmse(prediction.truth, prediction.values);
    case TargetType::Window: break;
    }
    throw Error(Errc::WrongTargetKind, "pass-through target windows cannot be scored");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

template <class F>
auto run_stage(const Stage& stage, std::vector<StageTiming>& timings, F&& body) {
    const auto start = Clock::now();
    try {
        if constexpr (std::is_void_v<decltype(body())>) {
            body();
            timings.push_back({stage.name(), seconds_since(start)});
        } else {
            auto result = body();
            timings.push_back({stage.name(), seconds_since(start)});
            return result;
        }
    } catch (const Error& e) {
        throw Error(e.code(), "stage '" + stage.name() + "': " + e.what(), e.line());
    }
}

}  // namespace

Pype::Pype(std::vector<std::unique_ptr<Stage>> stages) : stages_(std::move(stages)) {
    if (stages_.empty()) throw Error(Errc::InvalidPipeline, "pipeline has no stages");
    std::set<std::string> names;
    // Allowed order: DatasetTransform* Segmenter? FeatureStage MatrixTransform* Estimator
    int phase = 0;
    bool have_features = false;
    for (std::size_t i = 0; i < stages_.size(); ++i) {
        const Stage& s = *stages_[i];
        if (s.name().empty() || s.name().find('.') != std::string::npos) {
            throw Error(Errc::InvalidPipeline, "stage name '" + s.name() + "' must be non-empty and contain no '.'");
        }
        if (!names.insert(s.name()).second) {
            throw Error(Errc::InvalidPipeline, "duplicate stage name '" + s.name() + "'");
        }
        int next = 0;
        switch (s.kind()) {
        case StageKind::DatasetTransform: next = 0; break;
        case StageKind::Segmenter: next = 1; break;
        case StageKind::FeatureStage: next = 2; break;
        case StageKind::MatrixTransform: next = 3; break;
        case StageKind::Estimator: next = 4; break;
        }
        const bool repeatable = next == 0 || next == 3;
        if (next < phase || (next == phase && !repeatable) || phase == 4) {
            throw Error(Errc::InvalidPipeline, std::string("stage '") + s.name() + "' (" + to_string(s.kind()) +
                                                   ") is out of order");
        }
        if (next == 2) have_features = true;
        if (next >= 3 && !have_features) {
            throw Error(Errc::InvalidPipeline, "stage '" + s.name() + "' requires a preceding feature stage");
        }
        phase = next;
    }
    if (phase != 4) throw Error(Errc::InvalidPipeline, "pipeline must end with an estimator");
}

const Stage* Pype::find(const std::string& name) const {
    for (const auto& s : stages_) {
        if (s->name() == name) return s.get();
    }
    return nullptr;
}

const Segmenter* Pype::segmenter() const noexcept {
    for (const auto& s : stages_) {
        if (s->kind() == StageKind::Segmenter) return static_cast<const Segmenter*>(s.get());
    }
    return nullptr;
}

void Pype::fit(const SequenceDataset& dataset) {
    fit_info_.reset();
    require_valid(dataset);
    FitInfo info;
    info.schema = dataset.schema;

    SequenceDataset current = dataset;
    std::optional<SegmentSet> segments;
    FeatureMatrix features;
    for (auto& stage : stages_) {
        switch (stage->kind()) {
        case StageKind::DatasetTransform: {
            const auto& t = static_cast<const DatasetTransform&>(*stage);
            current = run_stage(t, info.timings, [&] { return t.apply(current); });
            break;
        }
        case StageKind::Segmenter: {
            const auto& s = static_cast<const Segmenter&>(*stage);
            auto source = std::make_shared<const SequenceDataset>(std::move(current));
            segments.emplace(run_stage(s, info.timings, [&] { return s.segment(source); }));
            break;
        }
        case StageKind::FeatureStage: {
            const auto& f = static_cast<const FeatureStage&>(*stage);
            if (!segments) {
                auto source = std::make_shared<const SequenceDataset>(std::move(current));
                segments.emplace(run_stage(f, info.timings, [&] { return whole_series_segments(source); }));
            }
            info.segments = segments->size();
            info.dropped_instances = segments->dropped_instances();
            features = run_stage(f, info.timings, [&] { return f.transform(*segments); });
            info.feature_names = features.names;
            break;
        }
        case StageKind::MatrixTransform: {
            auto& m = static_cast<MatrixTransform&>(*stage);
            features = run_stage(m, info.timings, [&] {
                m.fit(features);
                return m.transform(features);
            });
            break;
        }
        case StageKind::Estimator: {
            auto& e = static_cast<Estimator&>(*stage);
            run_stage(e, info.timings, [&] { e.fit(features); });
            break;
        }
        }
    }
    fit_info_ = std::move(info);
}

Prediction Pype::predict(const SequenceDataset& dataset) const {
    if (!fit_info_) throw Error(Errc::NotFitted, "pipeline is not fitted");
    const Schema& fitted = fit_info_->schema;
    if (dataset.schema.channels != fitted.channels || dataset.schema.context_width != fitted.context_width ||
        dataset.schema.target_kind != fitted.target_kind || dataset.schema.label_sequence != fitted.label_sequence) {
        throw Error(Errc::SchemaMismatch,
                    "dataset schema (d=" + std::to_string(dataset.schema.channels) +
                        ", c=" + std::to_string(dataset.schema.context_width) + ", " +
                        to_string(dataset.schema.target_kind) + ") does not match the fitted schema (d=" +
                        std::to_string(fitted.channels) + ", c=" + std::to_string(fitted.context_width) + ", " +
                        to_string(fitted.target_kind) + ")");
    }
    require_valid(dataset);

    Prediction out;
    out.target_type = fitted.is_classification() ? TargetType::Label : TargetType::Real;
    if (dataset.empty()) return out;

    SequenceDataset current = dataset;
    std::optional<SegmentSet> segments;
    FeatureMatrix features;
    for (const auto& stage : stages_) {
        switch (stage->kind()) {
        case StageKind::DatasetTransform: {
            const auto& t = static_cast<const DatasetTransform&>(*stage);
            current = run_stage(t, out.timings, [&] { return t.apply(current); });
            break;
        }
        case StageKind::Segmenter: {
            const auto& s = static_cast<const Segmenter&>(*stage);
            auto source = std::make_shared<const SequenceDataset>(std::move(current));
            segments.emplace(run_stage(s, out.timings, [&] { return s.segment(source); }));
            break;
        }
        case StageKind::FeatureStage: {
            const auto& f = static_cast<const FeatureStage&>(*stage);
            if (!segments) {
                auto source = std::make_shared<const SequenceDataset>(std::move(current));
                segments.emplace(run_stage(f, out.timings, [&] { return whole_series_segments(source); }));
            }
            features = run_stage(f, out.timings, [&] { return f.transform(*segments); });
            break;
        }
        case StageKind::MatrixTransform: {
            const auto& m = static_cast<const MatrixTransform&>(*stage);
            features = run_stage(m, out.timings, [&] { return m.transform(features); });
            break;
        }
        case StageKind::Estimator: {
            const auto& e = static_cast<const Estimator&>(*stage);
            out.values = run_stage(e, out.timings, [&] { return e.predict(features); });
            break;
        }
        }
    }
    out.target_type = features.target_type;
    out.truth = std::move(features.targets);
    out.origins = std::move(features.origins);
    return out;
}

double Pype::score(const SequenceDataset& dataset) const { return score_predictions(predict(dataset)); }

Json Pype::get_params() const {
    Json out = Json::object();
    for (const auto& s : stages_) {
        const Json current = s->params();
        for (const auto& [key, value] : current.items()) out[s->name() + "." + key] = value;
    }
    return out;
}

Pype Pype::set_param(const std::string& path, const Json& value) const {
    const auto dot = path.find('.');
    if (dot == std::string::npos) {
        throw Error(Errc::UnknownParamPath, "parameter path '" + path + "' is not of the form stage.param");
    }
    const std::string stage_name = path.substr(0, dot);
    Pype out = clone_unfitted();
    for (auto& s : out.stages_) {
        if (s->name() == stage_name) {
            s->set_param(path.substr(dot + 1), value);
            return out;
        }
    }
    throw Error(Errc::UnknownParamPath, "parameter path '" + path + "': no stage named '" + stage_name + "'");
}

Pype Pype::clone_unfitted() const {
    std::vector<std::unique_ptr<Stage>> copies;
    copies.reserve(stages_.size());
    for (const auto& s : stages_) copies.push_back(s->clone_unfitted());
    return Pype(std::move(copies));
}

Json Pype::to_config() const {
    Json out = Json::array();
    for (const auto& s : stages_) out.push_back(s->to_config());
    return out;
}

}  // namespace seqml
