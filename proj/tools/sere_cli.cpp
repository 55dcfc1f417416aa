// Command-line front end for the experiment harness.
//
// Exit codes: 0 verification passed, 1 verification failed, 2 config or input error.

#include "sere/config.hpp"
#include "sere/error.hpp"
#include "sere/experiments.hpp"
#include "sere/report.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kInputError = 2;

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "csv";
    unsigned jobs = 1;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config, "experiment config file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", opts.seed, "root seed (overrides the config)");
    cmd->add_option("--out", opts.out, "output path (default: config output_path, else stdout)");
    cmd->add_option("--format", opts.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--jobs", opts.jobs, "worker threads")->check(CLI::PositiveNumber);
}

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("sere");
    spdlog::set_default_logger(logger);
    const char* level = std::getenv("SERE_LOG");
    const std::string value = level ? level : "off";
    if (value == "debug") spdlog::set_level(spdlog::level::debug);
    else if (value == "info") spdlog::set_level(spdlog::level::info);
    else spdlog::set_level(spdlog::level::off);
}

void write_output(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw sere::Error(sere::Errc::IoError, "cannot open " + path + " for writing");
    out << text;
    if (!out) throw sere::Error(sere::Errc::IoError, "failed writing " + path);
}

sere::ExperimentConfig load(const CommonOptions& opts) {
    auto config = sere::load_config(opts.config);
    if (opts.seed) config.seed = *opts.seed;
    return config;
}

int run_verification(const CommonOptions& opts, const char* command,
                     sere::VerificationReport (*verify)(const sere::ExperimentConfig&, unsigned)) {
    const auto config = load(opts);
    spdlog::info("{}: config {}, seed {}, jobs {}", command, opts.config, config.seed, opts.jobs);
    const auto report = verify(config, opts.jobs);
    for (const auto& c : report.criteria)
        spdlog::info("{} {} ({})", c.passed ? "PASS" : "FAIL", c.name, c.detail);
    write_output(sere::render_report(report, sere::parse_report_format(opts.format)),
                 opts.out.empty() ? config.output_path : opts.out);
    return report.passed() ? kPass : kFail;
}

sere::VerificationReport verify_lln_checked(const sere::ExperimentConfig& c, unsigned jobs) {
    if (c.kind && *c.kind != sere::ExperimentKind::Lln) throw sere::Error(sere::Errc::ConfigError, "verify-lln needs kind lln");
    return sere::verify_lln(c, jobs);
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();
    CLI::App app{"Monte Carlo toolkit for Hawkes-driven random evolutions"};
    app.require_subcommand(1);

    CommonOptions simulate_opts, lln_opts, averaging_opts, diffusion_opts, ruin_opts;
    auto* simulate = app.add_subcommand("simulate", "emit one trajectory as time,value,state");
    auto* lln = app.add_subcommand("verify-lln", "law of large numbers for the Hawkes event rate");
    auto* averaging = app.add_subcommand("verify-averaging", "averaging limits on an epsilon ladder");
    auto* diffusion = app.add_subcommand("verify-diffusion", "diffusion limits on an epsilon ladder");
    auto* ruin = app.add_subcommand("ruin", "ruin probabilities of the risk process");
    add_common(simulate, simulate_opts);
    add_common(lln, lln_opts);
    add_common(averaging, averaging_opts);
    add_common(diffusion, diffusion_opts);
    add_common(ruin, ruin_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kInputError;
    }

    try {
        if (simulate->parsed()) {
            const auto config = load(simulate_opts);
            const auto path = sere::simulate_path(config);
            const auto format = sere::parse_report_format(simulate_opts.format);
            write_output(format == sere::ReportFormat::Csv ? sere::path_to_csv(path) : sere::path_to_json(path),
                         simulate_opts.out.empty() ? config.output_path : simulate_opts.out);
            return kPass;
        }
        if (lln->parsed()) return run_verification(lln_opts, "verify-lln", verify_lln_checked);
        if (averaging->parsed()) return run_verification(averaging_opts, "verify-averaging", sere::verify_averaging);
        if (diffusion->parsed()) return run_verification(diffusion_opts, "verify-diffusion", sere::verify_diffusion);
        if (ruin->parsed()) return run_verification(ruin_opts, "ruin", sere::verify_ruin);
    } catch (const sere::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.is_input_error() ? kInputError : kFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFail;
    }
    return kInputError;
}
