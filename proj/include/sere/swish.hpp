#pragma once

#include "sere/hawkes.hpp"
#include "sere/markov.hpp"
#include "sere/types.hpp"

#include <limits>
#include <vector>

namespace sere {

/// Markov chain read at Hawkes event counts: x(t) = x_{N(t)}.
struct SwishPath {
    EventSequence events;
    std::vector<State> states;  // x_0 .. x_{N(horizon)}

    double horizon() const { return events.horizon; }
};

/// Events and chain are drawn from independent children of seed.
SwishPath simulate_swish(const ExpHawkesKernel& kernel, const FiniteMarkovChain<double>& chain, State x0,
                         double horizon, const Seed& seed,
                         std::size_t max_events = std::numeric_limits<std::size_t>::max());

/// Right-continuous: a state change at tau_k is visible at t = tau_k.
State state_at(const SwishPath& path, double t);

/// v(z, x) = c0(x) + c1(x) z.
struct AffineRateFamily {
    Vector c0;
    Vector c1;

    double rate(double z, State x) const { return c0(x) + c1(x) * z; }
    double slope(State x) const { return c1(x); }

    /// Exact flow of dz/ds = c0 + c1 z for duration s.
    double flow(double z, State x, double s) const;
};

/// z0 + sum_{k=1}^{N(t)} a(x_k), sampled at 0, every event and the horizon.
/// include_initial_mark also adds a(x_0) at t = 0.
Trajectory compound_path(const SwishPath& path, const Vector& marks, double z0, bool include_initial_mark = false);

/// Affine flow between events plus jumps a(x_k) at tau_k; output grid is at
/// most dt apart and contains every event time.
Trajectory impulse_traffic_path(const SwishPath& path, const AffineRateFamily& v, const Vector& marks, double z0,
                                double dt, bool include_initial_mark = false);

/// R(t) = u + c t - sum_{k=1}^{N(t)} a(x_k).
Trajectory risk_path(const SwishPath& path, double capital, double premium, const Vector& claims);

/// True when the risk process drops below zero on [0, horizon]. Checks both
/// sides of every jump, which is exact for linear motion between events.
bool is_ruined(const SwishPath& path, double capital, double premium, const Vector& claims);

struct ProbabilityEstimate {
    double p = 0.0;
    double std_err = 0.0;
    std::size_t n = 0;
};

ProbabilityEstimate ruin_probability_mc(const ExpHawkesKernel& kernel, const FiniteMarkovChain<double>& chain,
                                        State x0, double capital, double premium, const Vector& claims,
                                        double horizon, std::size_t n_replicas, const Seed& seed,
                                        unsigned jobs = 1);

/// S0 * prod_{k=0}^{N(t)} (1 + c(x_k)); the k = 0 factor is applied at t = 0
/// unless include_initial_mark is false.
Trajectory geometric_compound_path(const SwishPath& path, const Vector& growth, double s0,
                                   bool include_initial_mark = true);

/// Euler-Maruyama for d xi = (c0(x) + c1(x) xi) dt + vol(x) dW with steps at
/// most dt, aligned to the switching times.
Trajectory switched_diffusion_path(const SwishPath& path, const AffineRateFamily& drift, const Vector& vol,
                                   double xi0, double dt, const Seed& seed);

}  // namespace sere
