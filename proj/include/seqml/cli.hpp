#pragma once

#include "seqml/dataset.hpp"
#include "seqml/model_selection.hpp"
#include "seqml/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace seqml::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Process exit codes.
enum ExitCode : int { kOk = 0, kConfigError = 1, kDataError = 2 };

struct GenerateOptions {
    std::size_t series = 140;
    Eigen::Index length = 200;
    Eigen::Index channels = 6;
    Label classes = 7;
    std::uint64_t seed = 0;
};

/// Class k is a sinusoid with k + 1 cycles per series and amplitude 1 + 0.5k on
/// every channel (random phase per channel), plus N(0, 0.3^2) noise. Labels
/// are assigned round-robin.
SequenceDataset generate_synthetic(const GenerateOptions& options);

struct SplitSpec {
    enum class Kind { Instance, Temporal, KFold } kind = Kind::Instance;
    double test_fraction = 0.25;
    std::uint64_t seed = 0;
    int k = 3;
};

struct RunConfig {
    std::filesystem::path dataset;
    Json pipeline;                     // array of stage specs
    SplitSpec split;
    std::optional<ParamGrid> grid;
    int grid_folds = 2;                // temporal folds over the train side when searching
    std::optional<std::filesystem::path> output;
};

/// Relative dataset/output paths resolve against `base_dir`.
RunConfig parse_config(const Json& config, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// The normalized config: every stage with all of its parameters, absolute paths.
Json echo_config(const RunConfig& config);

/// Split, optional grid search, fit, score. Returns the metrics report.
Json fit_eval(const RunConfig& config, const SequenceDataset& dataset);

/// Runs fit + score `repeats` times on pre-loaded data and reports per-stage
/// and total wall-clock times. Loading and splitting are not timed.
Json bench(const RunConfig& config, const SequenceDataset& dataset, int repeats);

/// Human-readable dataset summary.
std::string inspect(const SequenceDataset& dataset);

// Command entry points: return the process exit code and report through the streams.
int cmd_fit_eval(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);
int cmd_generate(const GenerateOptions& options, const std::filesystem::path& out_path, std::ostream& out,
                 std::ostream& err);
int cmd_bench(const std::filesystem::path& config_path, int repeats, std::ostream& out, std::ostream& err);
int cmd_inspect(const std::filesystem::path& dataset_path, std::ostream& out, std::ostream& err);

/// Full command line dispatch (argv[0] is the program name).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace seqml::cli
