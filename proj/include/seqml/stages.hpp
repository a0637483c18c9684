#pragma once

#include "seqml/estimators.hpp"
#include "seqml/features.hpp"
#include "seqml/pipeline.hpp"

#include <optional>

namespace seqml {

class TruncateStage final : public DatasetTransform {
public:
    explicit TruncateStage(TruncateLength length, std::string name = "truncate")
        : DatasetTransform(std::move(name)), length_(length) {}
    std::string type() const override { return "truncate"; }
    Json params() const override;
    void set_param(const std::string& key, const Json& value) override;
    std::unique_ptr<Stage> clone_unfitted() const override { return std::make_unique<TruncateStage>(*this); }
    SequenceDataset apply(const SequenceDataset& dataset) const override;

private:
    TruncateLength length_;
};

class PadStage final : public DatasetTransform {
public:
    explicit PadStage(Eigen::Index length, double value = 0.0, std::string name = "pad")
        : DatasetTransform(std::move(name)), length_(length), value_(value) {}
    std::string type() const override { return "pad"; }
    Json params() const override;
    void set_param(const std::string& key, const Json& value) override;
    std::unique_ptr<Stage> clone_unfitted() const override { return std::make_unique<PadStage>(*this); }
    SequenceDataset apply(const SequenceDataset& dataset) const override;

private:
    Eigen::Index length_;
    double value_;
};

class InterpolateStage final : public DatasetTransform {
public:
    explicit InterpolateStage(double period, std::string name = "interpolate")
        : DatasetTransform(std::move(name)), period_(period) {}
    std::string type() const override { return "interpolate"; }
    Json params() const override;
    void set_param(const std::string& key, const Json& value) override;
    std::unique_ptr<Stage> clone_unfitted() const override { return std::make_unique<InterpolateStage>(*this); }
    SequenceDataset apply(const SequenceDataset& dataset) const override;

private:
    double period_;
};

class SegmentStage final : public Segmenter {
public:
    explicit SegmentStage(SegmentParams params, TargetStrategy strategy = TargetStrategy::Middle,
                          std::string name = "seg");
    std::string type() const override { return "segment"; }
    Json params() const override;
    void set_param(const std::string& key, const Json& value) override;
    std::unique_ptr<Stage> clone_unfitted() const override { return std::make_unique<SegmentStage>(*this); }
    SegmentSet segment(std::shared_ptr<const SequenceDataset> dataset) const override;
    SegmentParams segment_params() const override { return params_; }

private:
    SegmentParams params_;
    TargetStrategy strategy_;
};

class FeatureRepStage final : public FeatureStage {
public:
    explicit FeatureRepStage(std::vector<std::string> names = benchmark_feature_names(),
                             std::string name = "features");
    std::string type() const override { return "features"; }
    Json params() const override;
    void set_param(const std::string& key, const Json& value) override;
    std::unique_ptr<Stage> clone_unfitted() const override { return std::make_unique<FeatureRepStage>(*this); }
    FeatureMatrix transform(const SegmentSet& segments) const override;

private:
    std::vector<std::string> names_;
    FeatureSet features_;
};

class StandardScalerStage final : public MatrixTransform {
public:
    explicit StandardScalerStage(std::string name = "scaler") : MatrixTransform(std::move(name)) {}
    std::string type() const override { return "standard_scaler"; }
    Json params() const override { return Json::object(); }
    void set_param(const std::string& key, const Json&) override { unknown_param(key); }
    std::unique_ptr<Stage> clone_unfitted() const override;
    void fit(const FeatureMatrix& features) override { state_ = scaler_fit(features); }
    FeatureMatrix transform(const FeatureMatrix& features) const override;
    bool fitted() const noexcept override { return state_.has_value(); }
    const std::optional<ScalerState>& state() const noexcept { return state_; }

private:
    std::optional<ScalerState> state_;
};

/// Kernel ridge one-vs-rest classifier. gamma unset means 1 / feature count.
class KernelRidgeClassifierStage final : public Estimator {
public:
    explicit KernelRidgeClassifierStage(std::optional<double> gamma = std::nullopt, double lambda = 1e-3,
                                        std::string name = "est")
        : Estimator(std::move(name)), gamma_(gamma), lambda_(lambda) {}
    std::string type() const override { return "krc"; }
    Json params() const override;
    void set_param(const std::string& key, const Json& value) override;
    std::unique_ptr<Stage> clone_unfitted() const override;
    void fit(const FeatureMatrix& features) override;
    Vector predict(const FeatureMatrix& features) const override;
    bool fitted() const noexcept override { return model_.has_value(); }
    const std::optional<KernelRidgeModel>& model() const noexcept { return model_; }

private:
    std::optional<double> gamma_;
    double lambda_;
    std::optional<KernelRidgeModel> model_;
};

class KernelRidgeRegressorStage final : public Estimator {
public:
    explicit KernelRidgeRegressorStage(std::optional<double> gamma = std::nullopt, double lambda = 1e-3,
                                       std::string name = "est")
        : Estimator(std::move(name)), gamma_(gamma), lambda_(lambda) {}
    std::string type() const override { return "krr"; }
    Json params() const override;
    void set_param(const std::string& key, const Json& value) override;
    std::unique_ptr<Stage> clone_unfitted() const override;
    void fit(const FeatureMatrix& features) override;
    Vector predict(const FeatureMatrix& features) const override;
    bool fitted() const noexcept override { return model_.has_value(); }

private:
    std::optional<double> gamma_;
    double lambda_;
    std::optional<KernelRidgeRegressorModel> model_;
};

class NearestCentroidStage final : public Estimator {
public:
    explicit NearestCentroidStage(std::string name = "est") : Estimator(std::move(name)) {}
    std::string type() const override { return "nearest_centroid"; }
    Json params() const override { return Json::object(); }
    void set_param(const std::string& key, const Json&) override { unknown_param(key); }
    std::unique_ptr<Stage> clone_unfitted() const override;
    void fit(const FeatureMatrix& features) override;
    Vector predict(const FeatureMatrix& features) const override;
    bool fitted() const noexcept override { return model_.has_value(); }

private:
    std::optional<CentroidModel> model_;
};

/// Memorizing 1-nearest-neighbour estimator, mostly useful as a test oracle.
class OneNNStage final : public Estimator {
public:
    explicit OneNNStage(std::string name = "est") : Estimator(std::move(name)) {}
    std::string type() const override { return "one_nn"; }
    Json params() const override { return Json::object(); }
    void set_param(const std::string& key, const Json&) override { unknown_param(key); }
    std::unique_ptr<Stage> clone_unfitted() const override;
    void fit(const FeatureMatrix& features) override;
    Vector predict(const FeatureMatrix& features) const override;
    bool fitted() const noexcept override { return model_.has_value(); }

private:
    std::optional<OneNNModel> model_;
};

/// Builds a stage from {"kind": ..., "name"?: ..., <params>}. Unknown kinds
/// and parameters raise config errors.
std::unique_ptr<Stage> make_stage(const Json& spec);

/// Builds a pipeline from an array of stage specs.
Pype make_pipeline(const Json& stages);

}  // namespace seqml
