#include "seqml/error.hpp"

namespace seqml {

const char* to_string(Errc code) noexcept {
    switch (code) {
    case Errc::ParseError: return "ParseError";
    case Errc::SchemaError: return "SchemaError";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::InvalidDataset: return "InvalidDataset";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::WrongTargetKind: return "WrongTargetKind";
    case Errc::EmptyOutput: return "EmptyOutput";
    case Errc::StrategyKindMismatch: return "StrategyKindMismatch";
    case Errc::TimePaddingUnsupported: return "TimePaddingUnsupported";
    case Errc::MissingTimeVector: return "MissingTimeVector";
    case Errc::DegenerateSeries: return "DegenerateSeries";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::WidthTooSmall: return "WidthTooSmall";
    case Errc::TooFewInstances: return "TooFewInstances";
    case Errc::DegenerateCut: return "DegenerateCut";
    case Errc::SeriesTooShort: return "SeriesTooShort";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::Empty: return "Empty";
    case Errc::NotFitted: return "NotFitted";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::Io: return "Io";
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::UnknownParamPath: return "UnknownParamPath";
    case Errc::UnknownFeature: return "UnknownFeature";
    case Errc::InvalidPipeline: return "InvalidPipeline";
    case Errc::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

bool is_config_error(Errc code) noexcept {
    switch (code) {
    case Errc::InvalidParameter:
    case Errc::UnknownParamPath:
    case Errc::UnknownFeature:
    case Errc::InvalidPipeline:
    case Errc::ConfigError:
        return true;
    default:
        return false;
    }
}

Error::Error(Errc code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(message), code_(code), line_(line) {}

}  // namespace seqml
