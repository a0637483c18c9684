#pragma once

#include "seqml/dataset.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace seqml {

/// How the per-segment targets are represented once segmentation has resolved them.
enum class TargetType { Label, Real, Window };

/// Where a segment (and hence a feature row or prediction) came from.
struct SegmentOrigin {
    std::size_t parent = 0;
    Eigen::Index start = 0;

    friend bool operator==(const SegmentOrigin&, const SegmentOrigin&) = default;
};

struct FeatureMatrix {
    RowMatrix values;                 // N x p
    std::vector<std::string> names;   // p column names
    TargetType target_type = TargetType::Label;
    Vector targets;                   // N resolved targets; empty for TargetType::Window
    std::vector<SegmentOrigin> origins;

    Eigen::Index rows() const noexcept { return values.rows(); }
    Eigen::Index cols() const noexcept { return values.cols(); }
};

}  // namespace seqml
