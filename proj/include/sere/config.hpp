#pragma once

#include "sere/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sere {

enum class ExperimentKind {
    Lln,
    AveragingTraffic,
    AveragingSummation,
    AveragingOperator,
    DiffusionSummation,
    DiffusionTraffic,
    DiffusionOperator,
    Ruin,
};

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

enum class PathType { Swish, Compound, ImpulseTraffic, Risk, Geometric, SwitchedDiffusion };

/// Flat typed experiment description. Parsed from `key = value` lines with
/// TOML value syntax: numbers, "strings", true/false and (nested) arrays.
struct ExperimentConfig {
    std::optional<ExperimentKind> kind;

    double lambda = 1.0;
    double alpha = 0.0;
    double beta = 1.0;
    Matrix transition = Matrix::Identity(1, 1);
    State x0 = 0;

    Vector marks;  // a(x); claim sizes for ruin; c(x) for geometric paths
    Vector rate_c0;
    Vector rate_c1;
    Vector vol;

    std::vector<Matrix> gamma;
    std::vector<Matrix> d1;
    std::vector<Matrix> d2;
    Vector f;

    std::vector<double> epsilon_ladder{0.2, 0.1, 0.05, 0.02};
    std::vector<double> horizons{1e2, 1e3, 1e4};
    double t = 1.0;
    double dt = 1e-3;
    double z0 = 0.0;
    std::size_t n_replicas = 1000;
    std::uint64_t seed = 0;
    std::string output_path;

    std::optional<double> m;
    std::optional<double> m2;
    std::size_t moment_events = 200000;

    std::vector<double> capitals{0.0, 1.0, 2.0, 5.0, 10.0};
    double premium = 1.0;
    double horizon = 10.0;

    std::size_t ks_batches = 20;
    std::size_t max_events = 100000000;

    PathType path_type = PathType::Swish;
    double s0 = 1.0;
    std::optional<bool> include_initial_mark;

    /// Throws ConfigError for structurally invalid experiment settings.
    void validate() const;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace sere
