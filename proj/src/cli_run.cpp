#include "seqml/cli.hpp"

#include <CLI11.hpp>

#include <ostream>

namespace seqml::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"seqml: sliding-window sequence learning toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path;
    auto* fit_eval_cmd = app.add_subcommand("fit-eval", "split, fit and score a pipeline from a JSON config");
    fit_eval_cmd->add_option("--config", config_path, "run config (JSON)")->required();

    GenerateOptions gen;
    std::string gen_out;
    auto* generate_cmd = app.add_subcommand("generate", "write a synthetic multi-class sinusoid dataset (NDJSON)");
    generate_cmd->add_option("--out", gen_out, "output NDJSON path")->required();
    generate_cmd->add_option("--n", gen.series, "number of series")->capture_default_str();
    generate_cmd->add_option("--t", gen.length, "samples per series")->capture_default_str();
    generate_cmd->add_option("--d", gen.channels, "channels")->capture_default_str();
    generate_cmd->add_option("--classes", gen.classes, "number of classes")->capture_default_str();
    generate_cmd->add_option("--seed", gen.seed, "random seed")->capture_default_str();

    int repeats = 5;
    auto* bench_cmd = app.add_subcommand("bench", "time fit + score of a pipeline (data loading excluded)");
    bench_cmd->add_option("--config", config_path, "run config (JSON)")->required();
    bench_cmd->add_option("--repeats", repeats, "number of timed runs")->capture_default_str();

    std::string dataset_path;
    auto* inspect_cmd = app.add_subcommand("inspect", "summarize an NDJSON dataset");
    inspect_cmd->add_option("dataset", dataset_path, "NDJSON dataset")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    if (*fit_eval_cmd) return cmd_fit_eval(config_path, out, err);
    if (*generate_cmd) return cmd_generate(gen, gen_out, out, err);
    if (*bench_cmd) return cmd_bench(config_path, repeats, out, err);
    if (*inspect_cmd) return cmd_inspect(dataset_path, out, err);
    return kConfigError;
}

}  // namespace seqml::cli
