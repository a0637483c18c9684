#pragma once

#include "seqml/feature_matrix.hpp"
#include "seqml/transforms.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace seqml {

/// Scalar statistics of one channel of one segment.
namespace feature {

double mean(std::span<const double> x);
double median(std::span<const double> x);
double min(std::span<const double> x);
double max(std::span<const double> x);
double stddev(std::span<const double> x);  // population form
double var(std::span<const double> x);   // population form
double skew(std::span<const double> x);  // m3 / m2^1.5, 0 for a constant channel
double kurt(std::span<const double> x);  // m4 / m2^2 - 3, 0 for a constant channel
double abs_energy(std::span<const double> x);
double zero_crossings(std::span<const double> x);  // sign changes of x - mean(x), zeros skipped
double line_length(std::span<const double> x);

}  // namespace feature

struct FeatureFunction {
    std::string name;
    std::function<double(std::span<const double>)> eval;
    /// Ratio of central moments; undefined on single-sample windows.
    bool moment_ratio = false;
};

class FeatureSet {
public:
    FeatureSet() = default;
    /// Throws InvalidParameter on duplicate names.
    explicit FeatureSet(std::vector<FeatureFunction> functions);

    void add(FeatureFunction function);

    std::size_t size() const noexcept { return functions_.size(); }
    bool empty() const noexcept { return functions_.empty(); }
    const FeatureFunction& operator[](std::size_t i) const { return functions_[i]; }
    auto begin() const noexcept { return functions_.begin(); }
    auto end() const noexcept { return functions_.end(); }
    std::vector<std::string> names() const;
    bool has_moment_ratio() const noexcept;

private:
    std::vector<FeatureFunction> functions_;
};

/// mean, median, min, max, std, var, skew, kurt, abs_energy, zero_crossings, line_length
FeatureSet builtin_features();

/// Picks builtins by name, in the given order. Unknown names raise
/// UnknownFeature with the list of valid names.
FeatureSet select_features(std::span<const std::string> names);

/// The five per-channel statistics used by the activity recognition benchmark.
std::vector<std::string> benchmark_feature_names();

/// Row i holds every feature of channel 0, then channel 1, ..., followed by
/// the segment's context. Columns are named ch{j}_{feature} and ctx{k}.
FeatureMatrix extract(const SegmentSet& segments, const FeatureSet& features);

}  // namespace seqml
