#include "seqml/dataset.hpp"

#include "seqml/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace seqml {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

enum class RawTarget { Integer, Real, Text, IntegerSeq, RealSeq, TextSeq };

struct RawRecord {
    std::size_t line = 0;
    SequenceInstance instance;
    RawTarget target_kind = RawTarget::Integer;
    std::vector<std::string> text_labels;  // string labels, for Text / TextSeq
};

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ": " + msg, line);
}

[[noreturn]] void schema_fail(std::size_t line, const std::string& msg) {
    throw Error(Errc::SchemaError, "line " + std::to_string(line) + ": " + msg, line);
}

Vector read_vector(const json& node, std::size_t line, const char* field) {
    if (!node.is_array()) parse_fail(line, std::string("\"") + field + "\" must be an array of numbers");
    Vector out(static_cast<Eigen::Index>(node.size()));
    for (std::size_t k = 0; k < node.size(); ++k) {
        if (!node[k].is_number()) parse_fail(line, std::string("\"") + field + "\" must contain only numbers");
        out[static_cast<Eigen::Index>(k)] = node[k].get<double>();
    }
    return out;
}

RowMatrix read_samples(const json& node, std::size_t line) {
    if (!node.is_array() || node.empty()) parse_fail(line, "\"X\" must be a non-empty array of rows");
    const std::size_t rows = node.size();
    if (!node[0].is_array() || node[0].empty()) parse_fail(line, "\"X\" rows must be non-empty arrays");
    const std::size_t cols = node[0].size();
    RowMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        const json& row = node[r];
        if (!row.is_array()) parse_fail(line, "\"X\" rows must be arrays");
        if (row.size() != cols) {
            schema_fail(line, "row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                                  " channels, row 0 has " + std::to_string(cols));
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (!row[c].is_number()) parse_fail(line, "\"X\" must contain only numbers");
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
        }
    }
    return out;
}

RawRecord parse_record(std::string_view text, std::size_t line) {
    json obj;
    try {
        obj = json::parse(text);
    } catch (const json::parse_error& e) {
        parse_fail(line, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) parse_fail(line, "record must be a JSON object");
    if (!obj.contains("X")) parse_fail(line, "missing \"X\"");
    if (!obj.contains("y")) parse_fail(line, "missing \"y\"");

    RawRecord rec;
    rec.line = line;
    rec.instance.samples = read_samples(obj["X"], line);
    if (auto it = obj.find("t"); it != obj.end()) rec.instance.time = read_vector(*it, line, "t");
    if (auto it = obj.find("context"); it != obj.end()) rec.instance.context = read_vector(*it, line, "context");

    const json& y = obj["y"];
    if (y.is_number_integer()) {
        rec.target_kind = RawTarget::Integer;
        rec.instance.target = y.get<Label>();
    } else if (y.is_number_float()) {
        rec.target_kind = RawTarget::Real;
        rec.instance.target = y.get<double>();
    } else if (y.is_string()) {
        rec.target_kind = RawTarget::Text;
        rec.text_labels.push_back(y.get<std::string>());
    } else if (y.is_array()) {
        const bool all_text = !y.empty() && std::all_of(y.begin(), y.end(), [](const json& v) { return v.is_string(); });
        if (all_text) {
            rec.target_kind = RawTarget::TextSeq;
            for (const auto& v : y) rec.text_labels.push_back(v.get<std::string>());
        } else {
            Vector seq = read_vector(y, line, "y");
            const bool all_int = std::all_of(y.begin(), y.end(), [](const json& v) { return v.is_number_integer(); });
            rec.target_kind = all_int ? RawTarget::IntegerSeq : RawTarget::RealSeq;
            rec.instance.target = std::move(seq);
        }
    } else {
        parse_fail(line, "\"y\" must be a number, string, or array");
    }
    return rec;
}

TargetKind kind_of(RawTarget raw) {
    switch (raw) {
    case RawTarget::Integer:
    case RawTarget::Text: return TargetKind::ClassLabel;
    case RawTarget::Real: return TargetKind::ScalarValue;
    default: return TargetKind::AlignedSequence;
    }
}

bool is_text(RawTarget raw) { return raw == RawTarget::Text || raw == RawTarget::TextSeq; }

}  // namespace

SequenceDataset parse_ndjson(std::string_view text) {
    std::vector<RawRecord> records;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") != std::string_view::npos) records.push_back(parse_record(line, line_no));
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    if (records.empty()) throw Error(Errc::EmptyDataset, "dataset contains no records");

    const RawRecord& first = records.front();
    SequenceDataset ds;
    ds.schema.channels = first.instance.samples.cols();
    ds.schema.context_width = first.instance.context.size();
    ds.schema.target_kind = kind_of(first.target_kind);
    ds.schema.label_sequence = first.target_kind == RawTarget::IntegerSeq || first.target_kind == RawTarget::TextSeq;
    const bool text_labels = is_text(first.target_kind);

    std::set<std::string> names;
    for (const auto& rec : records) {
        const auto& inst = rec.instance;
        if (inst.samples.cols() != ds.schema.channels) {
            schema_fail(rec.line, "expected " + std::to_string(ds.schema.channels) + " channels, got " +
                                      std::to_string(inst.samples.cols()));
        }
        if (inst.context.size() != ds.schema.context_width) {
            schema_fail(rec.line, "expected context width " + std::to_string(ds.schema.context_width) + ", got " +
                                      std::to_string(inst.context.size()));
        }
        bool compatible = kind_of(rec.target_kind) == ds.schema.target_kind && is_text(rec.target_kind) == text_labels;
        // Integer entries are acceptable where reals are expected, not the other way round.
        if (compatible && ds.schema.label_sequence && rec.target_kind == RawTarget::RealSeq) compatible = false;
        if (!compatible && first.target_kind == RawTarget::Real && rec.target_kind == RawTarget::Integer) compatible = true;
        if (!compatible) {
            schema_fail(rec.line, std::string("target kind does not match first record (") +
                                      to_string(ds.schema.target_kind) + ")");
        }
        names.insert(rec.text_labels.begin(), rec.text_labels.end());
    }

    if (text_labels) ds.schema.label_names.assign(names.begin(), names.end());
    auto label_of = [&](const std::string& name) {
        return static_cast<Label>(std::lower_bound(ds.schema.label_names.begin(), ds.schema.label_names.end(), name) -
                                  ds.schema.label_names.begin());
    };

    ds.instances.reserve(records.size());
    Label max_label = -1;
    for (auto& rec : records) {
        SequenceInstance inst = std::move(rec.instance);
        switch (rec.target_kind) {
        case RawTarget::Text: inst.target = label_of(rec.text_labels.front()); break;
        case RawTarget::TextSeq: {
            Vector seq(static_cast<Eigen::Index>(rec.text_labels.size()));
            for (std::size_t k = 0; k < rec.text_labels.size(); ++k)
                seq[static_cast<Eigen::Index>(k)] = static_cast<double>(label_of(rec.text_labels[k]));
            inst.target = std::move(seq);
            break;
        }
        case RawTarget::Integer:
            if (ds.schema.target_kind == TargetKind::ScalarValue)
                inst.target = static_cast<double>(std::get<Label>(inst.target));
            break;
        default: break;
        }
        if (ds.schema.target_kind == TargetKind::ClassLabel) {
            max_label = std::max(max_label, std::get<Label>(inst.target));
        } else if (ds.schema.label_sequence) {
            const auto& seq = std::get<Vector>(inst.target);
            if (seq.size() > 0) max_label = std::max(max_label, static_cast<Label>(seq.maxCoeff()));
        }
        ds.instances.push_back(std::move(inst));
    }
    if (ds.schema.is_classification()) {
        ds.schema.class_count = text_labels ? static_cast<Label>(ds.schema.label_names.size()) : max_label + 1;
    }

    const auto report = validate(ds);
    if (!report.ok()) {
        const auto& v = report.violations.front();
        const std::size_t line = v.instance ? records[*v.instance].line : records.front().line;
        throw Error(Errc::SchemaError, "line " + std::to_string(line) + ": " + v.field + ": " + v.message, line);
    }
    return ds;
}

SequenceDataset read_ndjson(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open dataset file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_ndjson(buffer.str());
}

std::string format_ndjson(const SequenceDataset& dataset) {
    require_valid(dataset);
    const Schema& schema = dataset.schema;
    const bool named = !schema.label_names.empty();
    auto label_json = [&](Label label) -> ordered_json {
        if (named) return schema.label_names.at(static_cast<std::size_t>(label));
        return label;
    };

    std::string out;
    for (const auto& inst : dataset) {
        ordered_json rec;
        ordered_json rows = ordered_json::array();
        for (Eigen::Index r = 0; r < inst.samples.rows(); ++r) {
            ordered_json row = ordered_json::array();
            for (Eigen::Index c = 0; c < inst.samples.cols(); ++c) row.push_back(inst.samples(r, c));
            rows.push_back(std::move(row));
        }
        rec["X"] = std::move(rows);

        if (const auto* label = std::get_if<Label>(&inst.target)) {
            rec["y"] = label_json(*label);
        } else if (const auto* value = std::get_if<double>(&inst.target)) {
            rec["y"] = *value;
        } else {
            const auto& seq = std::get<Vector>(inst.target);
            ordered_json arr = ordered_json::array();
            for (Eigen::Index k = 0; k < seq.size(); ++k) {
                if (schema.label_sequence) arr.push_back(label_json(static_cast<Label>(seq[k])));
                else arr.push_back(seq[k]);
            }
            rec["y"] = std::move(arr);
        }
        if (inst.time) rec["t"] = std::vector<double>(inst.time->begin(), inst.time->end());
        if (schema.context_width > 0) rec["context"] = std::vector<double>(inst.context.begin(), inst.context.end());
        out += rec.dump();
        out += '\n';
    }
    return out;
}

void write_ndjson(const SequenceDataset& dataset, const std::filesystem::path& path) {
    const std::string text = format_ndjson(dataset);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot open output file: " + path.string());
    out << text;
    if (!out) throw Error(Errc::Io, "failed writing: " + path.string());
}

}  // namespace seqml
