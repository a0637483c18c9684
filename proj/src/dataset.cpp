#include "seqml/dataset.hpp"

#include "seqml/error.hpp"

#include <cmath>
#include <sstream>

namespace seqml {

const char* to_string(TargetKind kind) noexcept {
    switch (kind) {
    case TargetKind::ClassLabel: return "ClassLabel";
    case TargetKind::ScalarValue: return "ScalarValue";
    case TargetKind::AlignedSequence: return "AlignedSequence";
    }
    return "Unknown";
}

namespace {

template <class Derived>
bool same_values(const Eigen::DenseBase<Derived>& a, const Eigen::DenseBase<Derived>& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.derived().array() == b.derived().array()).all();
}

bool is_integral(double v) { return std::isfinite(v) && std::floor(v) == v; }

}  // namespace

bool operator==(const SequenceInstance& a, const SequenceInstance& b) {
    if (!same_values(a.samples, b.samples) || !same_values(a.context, b.context)) return false;
    if (a.time.has_value() != b.time.has_value()) return false;
    if (a.time && !same_values(*a.time, *b.time)) return false;
    if (a.target.index() != b.target.index()) return false;
    if (const auto* va = std::get_if<Vector>(&a.target)) return same_values(*va, std::get<Vector>(b.target));
    return a.target == b.target;
}

bool operator==(const SequenceDataset& a, const SequenceDataset& b) {
    return a.schema == b.schema && a.instances == b.instances;
}

std::string ValidationReport::summary(std::size_t max_items) const {
    std::ostringstream os;
    os << violations.size() << " violation(s)";
    for (std::size_t i = 0; i < violations.size() && i < max_items; ++i) {
        const auto& v = violations[i];
        os << (i == 0 ? ": " : "; ");
        if (v.instance) os << "instance " << *v.instance << " ";
        os << v.field << ": " << v.message;
    }
    if (violations.size() > max_items) os << "; ...";
    return os.str();
}

ValidationReport validate(const SequenceDataset& dataset) {
    ValidationReport report;
    const Schema& schema = dataset.schema;
    auto add = [&](std::optional<std::size_t> idx, std::string field, std::string msg) {
        report.violations.push_back({idx, std::move(field), std::move(msg)});
    };

    if (schema.channels < 1) add(std::nullopt, "schema.d", "channel count must be >= 1");
    if (schema.context_width < 0) add(std::nullopt, "schema.c", "context width must be >= 0");
    if (schema.class_count && *schema.class_count < 1) add(std::nullopt, "schema.class_count", "must be >= 1");
    if (!schema.label_names.empty() && !schema.is_classification())
        add(std::nullopt, "schema.label_names", "label names on a non-classification dataset");

    auto check_label = [&](std::size_t i, const std::string& field, double value) {
        if (!is_integral(value) || value < 0) {
            add(i, field, "class label must be a non-negative integer");
        } else if (schema.class_count && value >= static_cast<double>(*schema.class_count)) {
            std::ostringstream os;
            os << "label " << value << " >= class_count " << *schema.class_count;
            add(i, field, os.str());
        }
    };

    for (std::size_t i = 0; i < dataset.instances.size(); ++i) {
        const auto& inst = dataset.instances[i];
        const Eigen::Index T = inst.length();
        if (T < 1) add(i, "X", "series must have at least one sample");
        if (inst.samples.cols() != schema.channels) {
            std::ostringstream os;
            os << "expected " << schema.channels << " channels, got " << inst.samples.cols();
            add(i, "X", os.str());
        }
        if (!inst.samples.allFinite()) add(i, "X", "non-finite sample value");
        if (inst.context.size() != schema.context_width) {
            std::ostringstream os;
            os << "expected context width " << schema.context_width << ", got " << inst.context.size();
            add(i, "context", os.str());
        }
        if (!inst.context.allFinite()) add(i, "context", "non-finite context value");

        if (inst.time) {
            const Vector& t = *inst.time;
            if (t.size() != T) {
                std::ostringstream os;
                os << "time length " << t.size() << " != T " << T;
                add(i, "t", os.str());
            }
            if (!t.allFinite()) add(i, "t", "non-finite time value");
            for (Eigen::Index k = 0; k + 1 < t.size(); ++k) {
                if (!(t[k + 1] > t[k])) {
                    std::ostringstream os;
                    os << "time not strictly increasing at index " << k + 1;
                    add(i, "t", os.str());
                    break;
                }
            }
        }

        switch (schema.target_kind) {
        case TargetKind::ClassLabel:
            if (const auto* label = std::get_if<Label>(&inst.target)) {
                check_label(i, "y", static_cast<double>(*label));
            } else {
                add(i, "y", "expected a class label target");
            }
            break;
        case TargetKind::ScalarValue:
            if (const auto* value = std::get_if<double>(&inst.target)) {
                if (!std::isfinite(*value)) add(i, "y", "non-finite target value");
            } else {
                add(i, "y", "expected a scalar target");
            }
            break;
        case TargetKind::AlignedSequence:
            if (const auto* seq = std::get_if<Vector>(&inst.target)) {
                if (seq->size() != T) {
                    std::ostringstream os;
                    os << "target length " << seq->size() << " != T " << T;
                    add(i, "y", os.str());
                }
                if (!seq->allFinite()) {
                    add(i, "y", "non-finite target value");
                } else if (schema.label_sequence) {
                    for (Eigen::Index k = 0; k < seq->size(); ++k) {
                        const auto before = report.violations.size();
                        check_label(i, "y", (*seq)[k]);
                        if (report.violations.size() != before) break;
                    }
                }
            } else {
                add(i, "y", "expected an aligned target sequence");
            }
            break;
        }
    }
    return report;
}

void require_valid(const SequenceDataset& dataset) {
    const auto report = validate(dataset);
    if (!report.ok()) throw Error(Errc::InvalidDataset, "invalid dataset: " + report.summary());
}

SequenceDataset select(const SequenceDataset& dataset, std::span<const std::size_t> indices) {
    SequenceDataset out;
    out.schema = dataset.schema;
    out.instances.reserve(indices.size());
    for (std::size_t idx : indices) {
        if (idx >= dataset.size()) {
            throw Error(Errc::IndexOutOfRange, "instance index " + std::to_string(idx) + " out of range [0, " +
                                                   std::to_string(dataset.size()) + ")");
        }
        out.instances.push_back(dataset.instances[idx]);
    }
    return out;
}

std::map<Label, std::size_t> class_histogram(const SequenceDataset& dataset) {
    if (dataset.schema.target_kind != TargetKind::ClassLabel) {
        throw Error(Errc::WrongTargetKind, std::string("class histogram requires ClassLabel targets, dataset has ") +
                                               to_string(dataset.schema.target_kind));
    }
    std::map<Label, std::size_t> counts;
    for (const auto& inst : dataset) ++counts[std::get<Label>(inst.target)];
    return counts;
}

}  // namespace seqml
