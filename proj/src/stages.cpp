#include "seqml/stages.hpp"

#include "seqml/error.hpp"

#include <cmath>

namespace seqml {

namespace {

[[noreturn]] void bad_value(const Stage& stage, const std::string& key, const std::string& expected, const Json& value) {
    throw Error(Errc::InvalidParameter,
                "stage '" + stage.name() + "' parameter '" + key + "': expected " + expected + ", got " + value.dump());
}

double as_real(const Stage& stage, const std::string& key, const Json& value) {
    if (!value.is_number()) bad_value(stage, key, "a number", value);
    return value.get<double>();
}

Eigen::Index as_count(const Stage& stage, const std::string& key, const Json& value, Eigen::Index minimum) {
    if (!value.is_number()) bad_value(stage, key, "an integer", value);
    const double v = value.get<double>();
    if (std::floor(v) != v || v < static_cast<double>(minimum)) {
        bad_value(stage, key, "an integer >= " + std::to_string(minimum), value);
    }
    return static_cast<Eigen::Index>(v);
}

std::optional<double> as_gamma(const Stage& stage, const Json& value) {
    if (value.is_null() || (value.is_string() && value.get<std::string>() == "auto")) return std::nullopt;
    const double g = as_real(stage, "gamma", value);
    if (!(g > 0.0)) bad_value(stage, "gamma", "a positive number, null or \"auto\"", value);
    return g;
}

double as_lambda(const Stage& stage, const Json& value) {
    const double l = as_real(stage, "lambda", value);
    if (!(l > 0.0)) bad_value(stage, "lambda", "a positive number", value);
    return l;
}

void require_target(const Stage& stage, const FeatureMatrix& features, TargetType expected) {
    if (features.target_type != expected) {
        throw Error(Errc::WrongTargetKind, "estimator '" + stage.type() + "' requires " +
                                               (expected == TargetType::Label ? "class label" : "real-valued") +
                                               " segment targets");
    }
}

double resolve_gamma(const std::optional<double>& gamma, const FeatureMatrix& features) {
    if (gamma) return *gamma;
    return 1.0 / static_cast<double>(std::max<Eigen::Index>(1, features.cols()));
}

template <class StageT>
void require_fitted(const StageT& stage, bool fitted) {
    if (!fitted) throw Error(Errc::NotFitted, "stage '" + stage.name() + "' is not fitted");
}

}  // namespace

// -- dataset transforms

Json TruncateStage::params() const {
    Json out;
    if (const auto* n = std::get_if<Eigen::Index>(&length_)) out["length"] = *n;
    else out["length"] = "min";
    return out;
}

void TruncateStage::set_param(const std::string& key, const Json& value) {
    if (key != "length") unknown_param(key);
    if (value.is_string() && value.get<std::string>() == "min") length_ = MinAcrossDataset{};
    else length_ = as_count(*this, key, value, 1);
}

SequenceDataset TruncateStage::apply(const SequenceDataset& dataset) const { return truncate(dataset, length_); }

Json PadStage::params() const {
    Json out;
    out["length"] = length_;
    out["value"] = value_;
    return out;
}

void PadStage::set_param(const std::string& key, const Json& value) {
    if (key == "length") length_ = as_count(*this, key, value, 0);
    else if (key == "value") value_ = as_real(*this, key, value);
    else unknown_param(key);
}

SequenceDataset PadStage::apply(const SequenceDataset& dataset) const { return pad(dataset, length_, value_); }

Json InterpolateStage::params() const {
    Json out;
    out["period"] = period_;
    return out;
}

void InterpolateStage::set_param(const std::string& key, const Json& value) {
    if (key != "period") unknown_param(key);
    const double p = as_real(*this, key, value);
    if (!(p > 0.0)) bad_value(*this, key, "a positive number", value);
    period_ = p;
}

SequenceDataset InterpolateStage::apply(const SequenceDataset& dataset) const { return interpolate(dataset, period_); }

// -- segmentation and features

SegmentStage::SegmentStage(SegmentParams params, TargetStrategy strategy, std::string name)
    : Segmenter(std::move(name)), params_(params), strategy_(strategy) {
    params_.validate();
}

Json SegmentStage::params() const {
    Json out;
    out["width"] = params_.width;
    out["overlap"] = params_.overlap;
    out["strategy"] = to_string(strategy_);
    return out;
}

void SegmentStage::set_param(const std::string& key, const Json& value) {
    if (key == "width") {
        params_.width = as_count(*this, key, value, 1);
    } else if (key == "overlap") {
        const double o = as_real(*this, key, value);
        if (!(o >= 0.0 && o < 1.0)) bad_value(*this, key, "a number in [0, 1)", value);
        params_.overlap = o;
    } else if (key == "strategy") {
        if (!value.is_string()) bad_value(*this, key, "a strategy name", value);
        strategy_ = parse_target_strategy(value.get<std::string>());
    } else {
        unknown_param(key);
    }
}

SegmentSet SegmentStage::segment(std::shared_ptr<const SequenceDataset> dataset) const {
    return seqml::segment(std::move(dataset), params_, strategy_);
}

FeatureRepStage::FeatureRepStage(std::vector<std::string> names, std::string name)
    : FeatureStage(std::move(name)), names_(std::move(names)), features_(select_features(names_)) {}

Json FeatureRepStage::params() const {
    Json out;
    out["features"] = names_;
    return out;
}

void FeatureRepStage::set_param(const std::string& key, const Json& value) {
    if (key != "features") unknown_param(key);
    if (!value.is_array() || value.empty()) bad_value(*this, key, "a non-empty list of feature names", value);
    std::vector<std::string> names;
    for (const auto& v : value) {
        if (!v.is_string()) bad_value(*this, key, "a list of feature names", value);
        names.push_back(v.get<std::string>());
    }
    features_ = select_features(names);
    names_ = std::move(names);
}

FeatureMatrix FeatureRepStage::transform(const SegmentSet& segments) const { return extract(segments, features_); }

// -- matrix transforms

std::unique_ptr<Stage> StandardScalerStage::clone_unfitted() const {
    return std::make_unique<StandardScalerStage>(name());
}

FeatureMatrix StandardScalerStage::transform(const FeatureMatrix& features) const {
    require_fitted(*this, fitted());
    return scaler_apply(*state_, features);
}

// -- estimators

Json KernelRidgeClassifierStage::params() const {
    Json out;
    out["gamma"] = gamma_ ? Json(*gamma_) : Json(nullptr);
    out["lambda"] = lambda_;
    return out;
}

void KernelRidgeClassifierStage::set_param(const std::string& key, const Json& value) {
    if (key == "gamma") gamma_ = as_gamma(*this, value);
    else if (key == "lambda") lambda_ = as_lambda(*this, value);
    else unknown_param(key);
    model_.reset();
}

std::unique_ptr<Stage> KernelRidgeClassifierStage::clone_unfitted() const {
    return std::make_unique<KernelRidgeClassifierStage>(gamma_, lambda_, name());
}

void KernelRidgeClassifierStage::fit(const FeatureMatrix& features) {
    require_target(*this, features, TargetType::Label);
    model_ = krc_fit(features.values, features.targets, resolve_gamma(gamma_, features), lambda_);
}

Vector KernelRidgeClassifierStage::predict(const FeatureMatrix& features) const {
    require_fitted(*this, fitted());
    return krc_predict(*model_, features.values);
}

Json KernelRidgeRegressorStage::params() const {
    Json out;
    out["gamma"] = gamma_ ? Json(*gamma_) : Json(nullptr);
    out["lambda"] = lambda_;
    return out;
}

void KernelRidgeRegressorStage::set_param(const std::string& key, const Json& value) {
    if (key == "gamma") gamma_ = as_gamma(*this, value);
    else if (key == "lambda") lambda_ = as_lambda(*this, value);
    else unknown_param(key);
    model_.reset();
}

std::unique_ptr<Stage> KernelRidgeRegressorStage::clone_unfitted() const {
    return std::make_unique<KernelRidgeRegressorStage>(gamma_, lambda_, name());
}

void KernelRidgeRegressorStage::fit(const FeatureMatrix& features) {
    require_target(*this, features, TargetType::Real);
    model_ = krr_fit(features.values, features.targets, resolve_gamma(gamma_, features), lambda_);
}

Vector KernelRidgeRegressorStage::predict(const FeatureMatrix& features) const {
    require_fitted(*this, fitted());
    return krr_predict(*model_, features.values);
}

std::unique_ptr<Stage> NearestCentroidStage::clone_unfitted() const {
    return std::make_unique<NearestCentroidStage>(name());
}

void NearestCentroidStage::fit(const FeatureMatrix& features) {
    require_target(*this, features, TargetType::Label);
    model_ = nearest_centroid_fit(features.values, features.targets);
}

Vector NearestCentroidStage::predict(const FeatureMatrix& features) const {
    require_fitted(*this, fitted());
    return nearest_centroid_predict(*model_, features.values);
}

std::unique_ptr<Stage> OneNNStage::clone_unfitted() const { return std::make_unique<OneNNStage>(name()); }

void OneNNStage::fit(const FeatureMatrix& features) {
    if (features.target_type == TargetType::Window) {
        throw Error(Errc::WrongTargetKind, "one_nn cannot fit pass-through target windows");
    }
    model_ = one_nn_fit(features.values, features.targets);
}

Vector OneNNStage::predict(const FeatureMatrix& features) const {
    require_fitted(*this, fitted());
    return one_nn_predict(*model_, features.values);
}

// -- factory

std::unique_ptr<Stage> make_stage(const Json& spec) {
    if (!spec.is_object()) throw Error(Errc::ConfigError, "stage spec must be an object, got " + spec.dump());
    if (!spec.contains("kind") || !spec["kind"].is_string()) {
        throw Error(Errc::ConfigError, "stage spec needs a string \"kind\": " + spec.dump());
    }
    const std::string kind = spec["kind"].get<std::string>();
    std::string name;
    if (spec.contains("name")) {
        if (!spec["name"].is_string()) throw Error(Errc::ConfigError, "stage \"name\" must be a string");
        name = spec["name"].get<std::string>();
    }
    auto named = [&](const char* fallback) { return name.empty() ? std::string(fallback) : name; };

    std::unique_ptr<Stage> stage;
    if (kind == "truncate") stage = std::make_unique<TruncateStage>(MinAcrossDataset{}, named("truncate"));
    else if (kind == "pad") stage = std::make_unique<PadStage>(0, 0.0, named("pad"));
    else if (kind == "interpolate") stage = std::make_unique<InterpolateStage>(1.0, named("interpolate"));
    else if (kind == "segment") stage = std::make_unique<SegmentStage>(SegmentParams{100, 0.0}, TargetStrategy::Middle, named("seg"));
    else if (kind == "features") stage = std::make_unique<FeatureRepStage>(benchmark_feature_names(), named("features"));
    else if (kind == "standard_scaler") stage = std::make_unique<StandardScalerStage>(named("scaler"));
    else if (kind == "krc") stage = std::make_unique<KernelRidgeClassifierStage>(std::nullopt, 1e-3, named("est"));
    else if (kind == "krr") stage = std::make_unique<KernelRidgeRegressorStage>(std::nullopt, 1e-3, named("est"));
    else if (kind == "nearest_centroid") stage = std::make_unique<NearestCentroidStage>(named("est"));
    else if (kind == "one_nn") stage = std::make_unique<OneNNStage>(named("est"));
    else {
        throw Error(Errc::ConfigError, "unknown stage kind '" + kind +
                                           "' (expected truncate, pad, interpolate, segment, features, "
                                           "standard_scaler, krc, krr, nearest_centroid, one_nn)");
    }
    for (const auto& [key, value] : spec.items()) {
        if (key == "kind" || key == "name") continue;
        stage->set_param(key, value);
    }
    return stage;
}

Pype make_pipeline(const Json& stages) {
    if (!stages.is_array()) throw Error(Errc::ConfigError, "pipeline must be an array of stage specs");
    std::vector<std::unique_ptr<Stage>> built;
    for (const auto& spec : stages) built.push_back(make_stage(spec));
    return Pype(std::move(built));
}

}  // namespace seqml
