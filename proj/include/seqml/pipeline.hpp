#pragma once

#include "seqml/dataset.hpp"
#include "seqml/feature_matrix.hpp"
#include "seqml/transforms.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace seqml {

using Json = nlohmann::ordered_json;

enum class StageKind { DatasetTransform, Segmenter, FeatureStage, MatrixTransform, Estimator };

const char* to_string(StageKind kind) noexcept;

/// A named pipeline step with string-addressable parameters.
class Stage {
public:
    explicit Stage(std::string name) : name_(std::move(name)) {}
    virtual ~Stage() = default;

    Stage(const Stage&) = default;
    Stage& operator=(const Stage&) = delete;

    const std::string& name() const noexcept { return name_; }
    virtual StageKind kind() const noexcept = 0;
    /// The config "kind" string this stage is built from.
    virtual std::string type() const = 0;
    /// Parameter name -> current value.
    virtual Json params() const = 0;
    /// Throws UnknownParamPath for unknown keys, InvalidParameter for bad values.
    /// Clears any fitted state.
    virtual void set_param(const std::string& key, const Json& value) = 0;
    virtual std::unique_ptr<Stage> clone_unfitted() const = 0;

    /// The stage as a config object: {"kind", "name", params...}.
    Json to_config() const;

protected:
    [[noreturn]] void unknown_param(const std::string& key) const;

private:
    std::string name_;
};

class DatasetTransform : public Stage {
public:
    using Stage::Stage;
    StageKind kind() const noexcept override { return StageKind::DatasetTransform; }
    virtual SequenceDataset apply(const SequenceDataset& dataset) const = 0;
};

class Segmenter : public Stage {
public:
    using Stage::Stage;
    StageKind kind() const noexcept override { return StageKind::Segmenter; }
    virtual SegmentSet segment(std::shared_ptr<const SequenceDataset> dataset) const = 0;
    virtual SegmentParams segment_params() const = 0;
};

class FeatureStage : public Stage {
public:
    using Stage::Stage;
    StageKind kind() const noexcept override { return StageKind::FeatureStage; }
    virtual FeatureMatrix transform(const SegmentSet& segments) const = 0;
};

class MatrixTransform : public Stage {
public:
    using Stage::Stage;
    StageKind kind() const noexcept override { return StageKind::MatrixTransform; }
    virtual void fit(const FeatureMatrix& features) = 0;
    virtual FeatureMatrix transform(const FeatureMatrix& features) const = 0;
    virtual bool fitted() const noexcept = 0;
};

class Estimator : public Stage {
public:
    using Stage::Stage;
    StageKind kind() const noexcept override { return StageKind::Estimator; }
    virtual void fit(const FeatureMatrix& features) = 0;
    virtual Vector predict(const FeatureMatrix& features) const = 0;
    virtual bool fitted() const noexcept = 0;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct Prediction {
    Vector values;                        // one per segment
    Vector truth;                         // resolved segment targets, same order
    TargetType target_type = TargetType::Label;
    std::vector<SegmentOrigin> origins;   // (parent, start) of every prediction
    std::vector<StageTiming> timings;

    std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }
};

/// Per-parent majority vote over segment predictions (lowest label on ties).
/// Returned in parent order; parents without segments are absent.
std::vector<std::pair<std::size_t, Label>> majority_vote(const Prediction& prediction);

/// Accuracy for label targets, negative RMSE for real targets.
double score_predictions(const Prediction& prediction);

/// Ordered stages: dataset transforms, at most one segmenter, one feature
/// stage, matrix transforms, then a terminal estimator.
class Pype {
public:
    /// Throws InvalidPipeline if names repeat or the kind sequence is ill-typed.
    explicit Pype(std::vector<std::unique_ptr<Stage>> stages);

    Pype(Pype&&) noexcept = default;
    Pype& operator=(Pype&&) noexcept = default;
    Pype(const Pype&) = delete;
    Pype& operator=(const Pype&) = delete;

    void fit(const SequenceDataset& dataset);
    Prediction predict(const SequenceDataset& dataset) const;
    double score(const SequenceDataset& dataset) const;

    bool fitted() const noexcept { return fit_info_.has_value(); }

    /// Path -> value for every stage parameter ("seg.width", ...).
    Json get_params() const;
    /// A copy with one parameter changed; the copy is never fitted.
    Pype set_param(const std::string& path, const Json& value) const;
    Pype clone_unfitted() const;

    std::size_t size() const noexcept { return stages_.size(); }
    const Stage& stage(std::size_t i) const { return *stages_[i]; }
    const Stage* find(const std::string& name) const;
    const Segmenter* segmenter() const noexcept;

    /// Populated by fit.
    struct FitInfo {
        Schema schema;
        std::size_t segments = 0;
        std::size_t dropped_instances = 0;
        std::vector<std::string> feature_names;
        std::vector<StageTiming> timings;
    };
    const std::optional<FitInfo>& fit_info() const noexcept { return fit_info_; }

    Json to_config() const;

private:
    std::vector<std::unique_ptr<Stage>> stages_;
    std::optional<FitInfo> fit_info_;
};

}  // namespace seqml
