#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace seqml {

/// Samples are stored row-major: one row per time step, channels contiguous.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Label = std::int64_t;

enum class TargetKind { ClassLabel, ScalarValue, AlignedSequence };

const char* to_string(TargetKind kind) noexcept;

/// A per-instance target: a class label, a real value, or a sequence aligned
/// sample-for-sample with the instance.
using Target = std::variant<Label, double, Vector>;

struct SequenceInstance {
    RowMatrix samples;            // T x d
    std::optional<Vector> time;   // length T, strictly increasing
    Vector context;               // length c; empty when the dataset has no context
    Target target;

    Eigen::Index length() const noexcept { return samples.rows(); }
};

struct Schema {
    Eigen::Index channels = 0;
    Eigen::Index context_width = 0;
    TargetKind target_kind = TargetKind::ClassLabel;
    /// For AlignedSequence targets: entries are class labels rather than reals.
    bool label_sequence = false;
    std::optional<Label> class_count;
    /// Original string labels, indexed by the dense label they were mapped to.
    std::vector<std::string> label_names;

    /// Whether targets (or aligned target entries) are class labels.
    bool is_classification() const noexcept {
        return target_kind == TargetKind::ClassLabel ||
               (target_kind == TargetKind::AlignedSequence && label_sequence);
    }

    friend bool operator==(const Schema&, const Schema&) = default;
};

struct SequenceDataset {
    Schema schema;
    std::vector<SequenceInstance> instances;

    std::size_t size() const noexcept { return instances.size(); }
    bool empty() const noexcept { return instances.empty(); }
    const SequenceInstance& operator[](std::size_t i) const { return instances[i]; }
    auto begin() const noexcept { return instances.begin(); }
    auto end() const noexcept { return instances.end(); }
};

bool operator==(const SequenceInstance& a, const SequenceInstance& b);
bool operator==(const SequenceDataset& a, const SequenceDataset& b);

struct Violation {
    std::optional<std::size_t> instance;  // empty for dataset-level violations
    std::string field;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    std::string summary(std::size_t max_items = 5) const;
};

/// Lists every invariant violation; never throws.
ValidationReport validate(const SequenceDataset& dataset);

/// Throws Error(InvalidDataset) carrying the report summary when validation fails.
void require_valid(const SequenceDataset& dataset);

SequenceDataset select(const SequenceDataset& dataset, std::span<const std::size_t> indices);

std::map<Label, std::size_t> class_histogram(const SequenceDataset& dataset);

/// Reads one instance per line:
///   {"X": [[...], ...], "y": int | real | string | [..], "t": [...]?, "context": [...]?}
/// The schema comes from the first record and is enforced on every later one.
/// String labels are mapped to dense integers in lexicographic order.
SequenceDataset read_ndjson(const std::filesystem::path& path);
SequenceDataset parse_ndjson(std::string_view text);

void write_ndjson(const SequenceDataset& dataset, const std::filesystem::path& path);
std::string format_ndjson(const SequenceDataset& dataset);

}  // namespace seqml
