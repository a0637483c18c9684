#pragma once

#include "seqml/dataset.hpp"
#include "seqml/feature_matrix.hpp"

#include <cstddef>
#include <memory>
#include <variant>
#include <vector>

namespace seqml {

struct SegmentParams {
    Eigen::Index width = 1;
    double overlap = 0.0;  // fraction of the window shared with the next one, in [0, 1)

    /// max(1, floor(width * (1 - overlap))), floored with a 1e-9 guard so that
    /// e.g. width 50 at overlap 0.9 steps by 5 rather than 4.
    Eigen::Index step() const noexcept;
    /// Throws Error(InvalidParameter) unless width >= 1 and overlap is in [0, 1).
    void validate() const;
};

Eigen::Index num_segments(Eigen::Index length, const SegmentParams& params);

enum class TargetStrategy { Last, Middle, Mean, PassThrough };

const char* to_string(TargetStrategy strategy) noexcept;
TargetStrategy parse_target_strategy(std::string_view name);

struct Segment {
    std::size_t parent = 0;
    Eigen::Index start = 0;
    double target = 0.0;  // resolved target; unused for TargetType::Window
};

/// Fixed-width windows over a shared, immutable source dataset. Windows are
/// views into the parent samples; nothing is copied at segmentation time.
class SegmentSet {
public:
    using Window = Eigen::Block<const RowMatrix>;
    using TargetWindow = Eigen::VectorBlock<const Vector>;

    SegmentSet(std::shared_ptr<const SequenceDataset> source, Eigen::Index width, TargetType target_type,
               std::vector<Segment> segments, std::size_t dropped_instances);

    std::size_t size() const noexcept { return segments_.size(); }
    bool empty() const noexcept { return segments_.empty(); }
    Eigen::Index width() const noexcept { return width_; }
    Eigen::Index channels() const noexcept { return source_->schema.channels; }
    Eigen::Index context_width() const noexcept { return source_->schema.context_width; }
    TargetType target_type() const noexcept { return target_type_; }
    const Schema& schema() const noexcept { return source_->schema; }
    const SequenceDataset& source() const noexcept { return *source_; }
    /// Instances that were too short to yield a single window.
    std::size_t dropped_instances() const noexcept { return dropped_; }

    const Segment& operator[](std::size_t i) const { return segments_[i]; }
    const std::vector<Segment>& segments() const noexcept { return segments_; }

    Window window(std::size_t i) const;
    const Vector& context(std::size_t i) const;
    /// The aligned target slice under segment i; only for AlignedSequence sources.
    TargetWindow target_window(std::size_t i) const;

private:
    std::shared_ptr<const SequenceDataset> source_;
    Eigen::Index width_;
    TargetType target_type_;
    std::vector<Segment> segments_;
    std::size_t dropped_;
};

/// Segments a dataset with one label or value per instance; every window
/// inherits its parent's target. Throws EmptyOutput when no window fits.
SegmentSet segment_fixed_target(std::shared_ptr<const SequenceDataset> dataset, const SegmentParams& params);

/// Segments a dataset whose targets are aligned sequences and resolves each
/// target window with `strategy`.
SegmentSet segment_sequence_target(std::shared_ptr<const SequenceDataset> dataset, const SegmentParams& params,
                                   TargetStrategy strategy);

/// Dispatches on the dataset's target kind.
SegmentSet segment(std::shared_ptr<const SequenceDataset> dataset, const SegmentParams& params,
                   TargetStrategy strategy = TargetStrategy::Middle);

/// One segment per instance spanning the whole series. All instances must
/// share one length.
SegmentSet whole_series_segments(std::shared_ptr<const SequenceDataset> dataset);

/// Trailing constant padding up to `length` samples.
SequenceDataset pad(const SequenceDataset& dataset, Eigen::Index length, double value = 0.0);

struct MinAcrossDataset {};
using TruncateLength = std::variant<Eigen::Index, MinAcrossDataset>;

SequenceDataset truncate(const SequenceDataset& dataset, TruncateLength length);

/// Linear resampling onto t0, t0 + period, ... without extrapolating past the
/// last timestamp. Label sequences take the nearest sample (earlier on ties).
SequenceDataset interpolate(const SequenceDataset& dataset, double period);

struct ScalerState {
    Vector means;
    Vector stds;               // population std, 1 for constant columns
    std::vector<bool> constant;
};

ScalerState scaler_fit(const FeatureMatrix& features);
FeatureMatrix scaler_apply(const ScalerState& state, const FeatureMatrix& features);

}  // namespace seqml
