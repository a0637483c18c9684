#include "seqml/transforms.hpp"

#include "seqml/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seqml {

Eigen::Index SegmentParams::step() const noexcept {
    const double raw = std::floor(static_cast<double>(width) * (1.0 - overlap) + 1e-9);
    return std::max<Eigen::Index>(1, static_cast<Eigen::Index>(raw));
}

void SegmentParams::validate() const {
    if (width < 1) throw Error(Errc::InvalidParameter, "segment width must be >= 1, got " + std::to_string(width));
    if (!(overlap >= 0.0 && overlap < 1.0)) {
        throw Error(Errc::InvalidParameter, "segment overlap must be in [0, 1), got " + std::to_string(overlap));
    }
}

Eigen::Index num_segments(Eigen::Index length, const SegmentParams& params) {
    if (length < params.width) return 0;
    return (length - params.width) / params.step() + 1;
}

const char* to_string(TargetStrategy strategy) noexcept {
    switch (strategy) {
    case TargetStrategy::Last: return "last";
    case TargetStrategy::Middle: return "middle";
    case TargetStrategy::Mean: return "mean";
    case TargetStrategy::PassThrough: return "pass_through";
    }
    return "unknown";
}

TargetStrategy parse_target_strategy(std::string_view name) {
    for (auto s : {TargetStrategy::Last, TargetStrategy::Middle, TargetStrategy::Mean, TargetStrategy::PassThrough}) {
        if (name == to_string(s)) return s;
    }
    throw Error(Errc::InvalidParameter,
                "unknown target strategy '" + std::string(name) + "' (expected last, middle, mean, pass_through)");
}

SegmentSet::SegmentSet(std::shared_ptr<const SequenceDataset> source, Eigen::Index width, TargetType target_type,
                       std::vector<Segment> segments, std::size_t dropped_instances)
    : source_(std::move(source)),
      width_(width),
      target_type_(target_type),
      segments_(std::move(segments)),
      dropped_(dropped_instances) {}

SegmentSet::Window SegmentSet::window(std::size_t i) const {
    const Segment& s = segments_[i];
    return Window(source_->instances[s.parent].samples, s.start, 0, width_, source_->schema.channels);
}

const Vector& SegmentSet::context(std::size_t i) const { return source_->instances[segments_[i].parent].context; }

SegmentSet::TargetWindow SegmentSet::target_window(std::size_t i) const {
    const Segment& s = segments_[i];
    const auto* seq = std::get_if<Vector>(&source_->instances[s.parent].target);
    if (seq == nullptr) throw Error(Errc::WrongTargetKind, "target windows require AlignedSequence targets");
    return TargetWindow(*seq, s.start, width_);
}

namespace {

template <class Resolve>
SegmentSet enumerate_windows(std::shared_ptr<const SequenceDataset> dataset, const SegmentParams& params,
                             TargetType type, Resolve&& resolve) {
    params.validate();
    const Eigen::Index step = params.step();
    std::size_t total = 0;
    for (const auto& inst : *dataset) total += static_cast<std::size_t>(num_segments(inst.length(), params));
    if (total == 0) {
        throw Error(Errc::EmptyOutput, "segmentation produced no windows: every series is shorter than width " +
                                           std::to_string(params.width));
    }

    std::vector<Segment> segments;
    segments.reserve(total);
    std::size_t dropped = 0;
    for (std::size_t i = 0; i < dataset->size(); ++i) {
        const auto& inst = (*dataset)[i];
        if (inst.length() < params.width) {
            ++dropped;
            continue;
        }
        for (Eigen::Index start = 0; start + params.width <= inst.length(); start += step) {
            segments.push_back({i, start, resolve(inst, start)});
        }
    }
    return SegmentSet(std::move(dataset), params.width, type, std::move(segments), dropped);
}

}  // namespace

SegmentSet segment_fixed_target(std::shared_ptr<const SequenceDataset> dataset, const SegmentParams& params) {
    const auto kind = dataset->schema.target_kind;
    if (kind == TargetKind::ClassLabel) {
        return enumerate_windows(std::move(dataset), params, TargetType::Label, [](const SequenceInstance& inst, Eigen::Index) {
            return static_cast<double>(std::get<Label>(inst.target));
        });
    }
    if (kind == TargetKind::ScalarValue) {
        return enumerate_windows(std::move(dataset), params, TargetType::Real,
                                 [](const SequenceInstance& inst, Eigen::Index) { return std::get<double>(inst.target); });
    }
    throw Error(Errc::WrongTargetKind, "fixed-target segmentation requires ClassLabel or ScalarValue targets");
}

SegmentSet segment_sequence_target(std::shared_ptr<const SequenceDataset> dataset, const SegmentParams& params,
                                   TargetStrategy strategy) {
    if (dataset->schema.target_kind != TargetKind::AlignedSequence) {
        throw Error(Errc::WrongTargetKind, "sequence-target segmentation requires AlignedSequence targets");
    }
    const bool labels = dataset->schema.label_sequence;
    if (labels && strategy == TargetStrategy::Mean) {
        throw Error(Errc::StrategyKindMismatch, "mean target strategy is undefined for class label sequences");
    }
    const Eigen::Index w = params.width;
    TargetType type = labels ? TargetType::Label : TargetType::Real;
    if (strategy == TargetStrategy::PassThrough) type = TargetType::Window;

    return enumerate_windows(std::move(dataset), params, type, [=](const SequenceInstance& inst, Eigen::Index start) {
        const auto window = std::get<Vector>(inst.target).segment(start, w);
        switch (strategy) {
        case TargetStrategy::Last: return window[w - 1];
        case TargetStrategy::Middle: return window[w / 2];
        case TargetStrategy::Mean: return window.mean();
        case TargetStrategy::PassThrough: break;
        }
        return 0.0;
    });
}

SegmentSet segment(std::shared_ptr<const SequenceDataset> dataset, const SegmentParams& params,
                   TargetStrategy strategy) {
    if (dataset->schema.target_kind == TargetKind::AlignedSequence) {
        return segment_sequence_target(std::move(dataset), params, strategy);
    }
    return segment_fixed_target(std::move(dataset), params);
}

SegmentSet whole_series_segments(std::shared_ptr<const SequenceDataset> dataset) {
    if (dataset->empty()) throw Error(Errc::EmptyOutput, "cannot segment an empty dataset");
    const Eigen::Index length = dataset->instances.front().length();
    for (std::size_t i = 0; i < dataset->size(); ++i) {
        if ((*dataset)[i].length() != length) {
            throw Error(Errc::InvalidPipeline, "series lengths differ (instance " + std::to_string(i) +
                                                   "); add a segment or truncate stage");
        }
    }
    if (dataset->schema.target_kind == TargetKind::AlignedSequence) {
        throw Error(Errc::InvalidPipeline, "aligned sequence targets require a segment stage");
    }
    return segment_fixed_target(std::move(dataset), SegmentParams{length, 0.0});
}

SequenceDataset pad(const SequenceDataset& dataset, Eigen::Index length, double value) {
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (dataset[i].time && dataset[i].length() < length) {
            throw Error(Errc::TimePaddingUnsupported,
                        "instance " + std::to_string(i) + " has a time vector; padding would fabricate timestamps");
        }
    }
    SequenceDataset out = dataset;
    for (auto& inst : out.instances) {
        const Eigen::Index T = inst.length();
        if (T >= length) continue;
        RowMatrix padded(length, inst.samples.cols());
        padded.topRows(T) = inst.samples;
        padded.bottomRows(length - T).setConstant(value);
        inst.samples = std::move(padded);
        if (auto* seq = std::get_if<Vector>(&inst.target)) {
            Vector extended(length);
            extended.head(T) = *seq;
            extended.tail(length - T).setConstant((*seq)[T - 1]);
            *seq = std::move(extended);
        }
    }
    return out;
}

SequenceDataset truncate(const SequenceDataset& dataset, TruncateLength length) {
    Eigen::Index limit = 0;
    if (const auto* fixed = std::get_if<Eigen::Index>(&length)) {
        if (*fixed < 1) throw Error(Errc::InvalidParameter, "truncation length must be >= 1");
        limit = *fixed;
    } else {
        if (dataset.empty()) return dataset;
        limit = std::min_element(dataset.begin(), dataset.end(), [](const auto& a, const auto& b) {
                    return a.length() < b.length();
                })->length();
    }

    SequenceDataset out = dataset;
    for (auto& inst : out.instances) {
        if (inst.length() <= limit) continue;
        inst.samples = RowMatrix(inst.samples.topRows(limit));
        if (inst.time) inst.time = Vector(inst.time->head(limit));
        if (auto* seq = std::get_if<Vector>(&inst.target)) *seq = Vector(seq->head(limit));
    }
    return out;
}

SequenceDataset interpolate(const SequenceDataset& dataset, double period) {
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw Error(Errc::InvalidParameter, "interpolation period must be > 0");
    }
    const bool nearest_labels = dataset.schema.target_kind == TargetKind::AlignedSequence && dataset.schema.label_sequence;

    SequenceDataset out;
    out.schema = dataset.schema;
    out.instances.reserve(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto& inst = dataset[i];
        if (!inst.time) throw Error(Errc::MissingTimeVector, "instance " + std::to_string(i) + " has no time vector");
        if (inst.length() < 2) {
            throw Error(Errc::DegenerateSeries, "instance " + std::to_string(i) + " has fewer than 2 samples");
        }
        const Vector& t = *inst.time;
        const Eigen::Index T = t.size();
        const double t0 = t[0];
        const double t_last = t[T - 1];
        const auto count = static_cast<Eigen::Index>(std::floor((t_last - t0) / period + 1e-9)) + 1;

        SequenceInstance res;
        res.context = inst.context;
        res.time = Vector(count);
        res.samples.resize(count, inst.samples.cols());
        const auto* seq = std::get_if<Vector>(&inst.target);
        Vector target_seq(seq ? count : 0);

        Eigen::Index k = 0;  // interval [t[k], t[k+1]] containing the grid point
        for (Eigen::Index g = 0; g < count; ++g) {
            const double grid_t = t0 + static_cast<double>(g) * period;
            const double at = std::min(grid_t, t_last);
            while (k + 2 < T && t[k + 1] <= at) ++k;
            (*res.time)[g] = grid_t;
            if (at >= t[k + 1]) {
                // Only reachable at the final timestamp; take the sample as-is.
                res.samples.row(g) = inst.samples.row(k + 1);
                if (seq) target_seq[g] = (*seq)[k + 1];
                continue;
            }
            const double frac = (at - t[k]) / (t[k + 1] - t[k]);
            res.samples.row(g) = inst.samples.row(k) + frac * (inst.samples.row(k + 1) - inst.samples.row(k));
            if (seq) {
                if (nearest_labels) {
                    target_seq[g] = (at - t[k] <= t[k + 1] - at) ? (*seq)[k] : (*seq)[k + 1];
                } else {
                    target_seq[g] = (*seq)[k] + frac * ((*seq)[k + 1] - (*seq)[k]);
                }
            }
        }
        res.target = seq ? Target(std::move(target_seq)) : inst.target;
        out.instances.push_back(std::move(res));
    }
    return out;
}

ScalerState scaler_fit(const FeatureMatrix& features) {
    const RowMatrix& x = features.values;
    if (x.rows() < 1) throw Error(Errc::Empty, "scaler requires at least one row");
    const auto n = static_cast<double>(x.rows());
    ScalerState state;
    state.means.resize(x.cols());
    state.stds.resize(x.cols());
    state.constant.assign(static_cast<std::size_t>(x.cols()), false);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const auto col = x.col(j);
        const double mean = col.sum() / n;
        state.means[j] = mean;
        const bool constant = col.minCoeff() == col.maxCoeff();
        const double std = std::sqrt((col.array() - mean).square().sum() / n);
        if (constant || !(std > 0.0)) {
            state.constant[static_cast<std::size_t>(j)] = true;
            state.stds[j] = 1.0;
        } else {
            state.stds[j] = std;
        }
    }
    return state;
}

FeatureMatrix scaler_apply(const ScalerState& state, const FeatureMatrix& features) {
    if (features.cols() != state.means.size()) {
        throw Error(Errc::DimensionMismatch, "scaler fitted on " + std::to_string(state.means.size()) +
                                                 " columns, got " + std::to_string(features.cols()));
    }
    FeatureMatrix out = features;
    out.values = ((features.values.rowwise() - state.means.transpose()).array().rowwise() /
                  state.stds.transpose().array())
                     .matrix();
    return out;
}

}  // namespace seqml
