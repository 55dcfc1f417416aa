#pragma once

#include "sere/config.hpp"
#include "sere/report.hpp"
#include "sere/types.hpp"

#include <string>

namespace sere {

/// Dispatches on config.kind. Replicas are spread over `jobs` threads;
/// the report does not depend on `jobs`.
VerificationReport run_ensemble(const ExperimentConfig& config, unsigned jobs = 1);

VerificationReport verify_lln(const ExperimentConfig& config, unsigned jobs = 1);
VerificationReport verify_averaging(const ExperimentConfig& config, unsigned jobs = 1);
VerificationReport verify_diffusion(const ExperimentConfig& config, unsigned jobs = 1);
VerificationReport verify_ruin(const ExperimentConfig& config, unsigned jobs = 1);

/// True when the sequence is non-increasing apart from at most one inversion.
bool non_increasing_with_one_inversion(const std::vector<double>& errors);

struct SampledPath {
    Trajectory trajectory;
    std::vector<State> states;  // x(t) at each trajectory time
};

/// One trajectory of config.path_type over (0, config.horizon].
SampledPath simulate_path(const ExperimentConfig& config);

std::string path_to_csv(const SampledPath& path);
std::string path_to_json(const SampledPath& path);

}  // namespace sere
