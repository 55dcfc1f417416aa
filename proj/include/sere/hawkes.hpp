#pragma once

#include "sere/seed.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace sere {

/// Exponential-kernel Hawkes intensity
///   lambda(t) = lambda_base + alpha * sum_{tau_k < t} exp(-beta (t - tau_k)).
/// Construction enforces the stability condition alpha / beta < 1.
class ExpHawkesKernel {
public:
    ExpHawkesKernel(double lambda_base, double alpha, double beta);

    double lambda_base() const { return lambda_base_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

    /// Branching ratio, the integral of the excitation kernel.
    double branching_ratio() const { return alpha_ / beta_; }
    /// Long-run event rate lambda_base / (1 - branching_ratio).
    double long_run_rate() const { return lambda_base_ / (1.0 - branching_ratio()); }

    /// Expected N(T) for a process started with no history.
    double expected_count(double horizon) const;

private:
    double lambda_base_;
    double alpha_;
    double beta_;
};

ExpHawkesKernel validate_kernel(double lambda_base, double alpha, double beta);

struct EventSequence {
    double horizon = 0.0;
    std::vector<double> times;

    std::size_t count() const { return times.size(); }
    /// N(t): number of events in (0, t].
    std::size_t count_until(double t) const;
};

/// Left-continuous intensity: an event exactly at t does not contribute.
double intensity_at(const ExpHawkesKernel& kernel, const EventSequence& events, double t);

/// Incremental Ogata thinning for the exponential kernel. The intensity
/// decays between events, so the current intensity bounds it until the next
/// candidate; the excitation state is updated in O(1) per candidate.
class HawkesSampler {
public:
    HawkesSampler(const ExpHawkesKernel& kernel, const Seed& seed);

    /// Time of the next event.
    double next();

    double now() const { return t_; }

private:
    ExpHawkesKernel kernel_;
    Engine rng_;
    double t_ = 0.0;
    double excess_ = 0.0;  // lambda(t+) - lambda_base
};

/// Events of a Hawkes process with no history on (0, horizon]. Throws
/// EventCapExceeded when more than max_events events would be produced.
EventSequence simulate_hawkes(const ExpHawkesKernel& kernel, double horizon, const Seed& seed,
                              std::size_t max_events = std::numeric_limits<std::size_t>::max());

struct MomentEstimate {
    double m = 0.0;
    double m2 = 0.0;
    std::size_t n_samples = 0;
    double std_err_m = 0.0;
};

/// Sample moments of stationary inter-arrival times. The first burn_in
/// events are discarded.
MomentEstimate estimate_interarrival_moments(const ExpHawkesKernel& kernel, std::size_t n_events,
                                             std::size_t burn_in, const Seed& seed);

}  // namespace sere
