#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace seqml {

enum class Errc {
    // data errors
    ParseError,
    SchemaError,
    EmptyDataset,
    InvalidDataset,
    IndexOutOfRange,
    WrongTargetKind,
    EmptyOutput,
    StrategyKindMismatch,
    TimePaddingUnsupported,
    MissingTimeVector,
    DegenerateSeries,
    DimensionMismatch,
    WidthTooSmall,
    TooFewInstances,
    DegenerateCut,
    SeriesTooShort,
    SingularSystem,
    LengthMismatch,
    Empty,
    NotFitted,
    SchemaMismatch,
    Io,
    // configuration errors
    InvalidParameter,
    UnknownParamPath,
    UnknownFeature,
    InvalidPipeline,
    ConfigError,
};

const char* to_string(Errc code) noexcept;

/// True for errors caused by the run configuration rather than the data.
bool is_config_error(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message, std::optional<std::size_t> line = std::nullopt);

    Errc code() const noexcept { return code_; }
    /// 1-based input line, for errors raised while reading line-oriented files.
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    Errc code_;
    std::optional<std::size_t> line_;
};

}  // namespace seqml
