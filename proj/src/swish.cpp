#include "sere/swish.hpp"

#include "sere/parallel.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

namespace sere {

namespace {

enum Substream : std::uint64_t { kEvents = 0, kChain = 1 };

void check_marks(const Vector& marks, std::size_t n_states, const char* what) {
    if (static_cast<std::size_t>(marks.size()) < n_states)
        throw Error(Errc::ConfigError, std::string(what) + " needs one value per state");
}

std::size_t max_state(const SwishPath& path) {
    return path.states.empty() ? 0 : *std::max_element(path.states.begin(), path.states.end()) + 1;
}

// Appends grid points in (a, b] at most dt apart, following `value_at`.
template <typename F>
void fill_grid(Trajectory& out, double a, double b, double dt, F&& value_at) {
    const auto steps = std::max<long>(1, static_cast<long>(std::ceil((b - a) / dt - 1e-9)));
    const double h = (b - a) / static_cast<double>(steps);
    for (long j = 1; j <= steps; ++j) {
        const double s = j == steps ? b : a + h * static_cast<double>(j);
        out.push(s, value_at(s - a));
    }
}

}  // namespace

SwishPath simulate_swish(const ExpHawkesKernel& kernel, const FiniteMarkovChain<double>& chain, State x0,
                         double horizon, const Seed& seed, std::size_t max_events) {
    SwishPath path;
    path.events = simulate_hawkes(kernel, horizon, seed.child(kEvents), max_events);
    path.states = simulate_chain(chain, x0, path.events.count() + 1, seed.child(kChain));
    return path;
}

State state_at(const SwishPath& path, double t) {
    if (t < 0.0 || t > path.horizon()) throw Error(Errc::OutOfHorizon, "t = " + std::to_string(t));
    return path.states[path.events.count_until(t)];
}

double AffineRateFamily::flow(double z, State x, double s) const {
    const double a = c0(x);
    const double b = c1(x);
    if (b == 0.0) return z + a * s;
    return z + (a + b * z) * std::expm1(b * s) / b;
}

Trajectory compound_path(const SwishPath& path, const Vector& marks, double z0, bool include_initial_mark) {
    check_marks(marks, max_state(path), "marks");
    Trajectory out;
    double z = z0 + (include_initial_mark ? marks(path.states[0]) : 0.0);
    out.push(0.0, z);
    const auto& times = path.events.times;
    for (std::size_t k = 0; k < times.size(); ++k) {
        z += marks(path.states[k + 1]);
        out.push(times[k], z);
    }
    if (times.empty() || times.back() < path.horizon()) out.push(path.horizon(), z);
    return out;
}

Trajectory impulse_traffic_path(const SwishPath& path, const AffineRateFamily& v, const Vector& marks, double z0,
                                double dt, bool include_initial_mark) {
    if (!(dt > 0.0)) throw Error(Errc::ConfigError, "dt must be positive");
    const auto n = max_state(path);
    check_marks(marks, n, "marks");
    check_marks(v.c0, n, "rate c0");
    check_marks(v.c1, n, "rate c1");
    Trajectory out;
    double z = z0 + (include_initial_mark ? marks(path.states[0]) : 0.0);
    out.push(0.0, z);
    double previous = 0.0;
    const auto& times = path.events.times;
    for (std::size_t k = 0; k <= times.size(); ++k) {
        const double next = k < times.size() ? times[k] : path.horizon();
        const State x = path.states[k];
        if (next > previous) {
            const double start = z;
            fill_grid(out, previous, next, dt, [&](double s) { return v.flow(start, x, s); });
            z = out.values.back();
        }
        if (k < times.size()) {
            z += marks(path.states[k + 1]);
            out.values.back() = z;
        }
        previous = next;
    }
    return out;
}

Trajectory risk_path(const SwishPath& path, double capital, double premium, const Vector& claims) {
    check_marks(claims, max_state(path), "claims");
    Trajectory out;
    double paid = 0.0;
    out.push(0.0, capital);
    const auto& times = path.events.times;
    for (std::size_t k = 0; k < times.size(); ++k) {
        paid += claims(path.states[k + 1]);
        out.push(times[k], capital + premium * times[k] - paid);
    }
    if (times.empty() || times.back() < path.horizon())
        out.push(path.horizon(), capital + premium * path.horizon() - paid);
    return out;
}

bool is_ruined(const SwishPath& path, double capital, double premium, const Vector& claims) {
    if (capital < 0.0) return true;
    double paid = 0.0;
    for (std::size_t k = 0; k < path.events.times.size(); ++k) {
        const double before = capital + premium * path.events.times[k] - paid;
        paid += claims(path.states[k + 1]);
        if (before < 0.0 || before - claims(path.states[k + 1]) < 0.0) return true;
    }
    return capital + premium * path.horizon() - paid < 0.0;
}

ProbabilityEstimate ruin_probability_mc(const ExpHawkesKernel& kernel, const FiniteMarkovChain<double>& chain,
                                        State x0, double capital, double premium, const Vector& claims,
                                        double horizon, std::size_t n_replicas, const Seed& seed, unsigned jobs) {
    if (n_replicas < 100) throw Error(Errc::ConfigError, "ruin estimation needs at least 100 replicas");
    check_marks(claims, static_cast<std::size_t>(chain.n_states()), "claims");
    if ((claims.array() < 0.0).any()) spdlog::warn("negative claim sizes act as income in the risk process");
    const auto ruined = parallel_map(n_replicas, jobs, [&](std::size_t r) {
        const SwishPath path = simulate_swish(kernel, chain, x0, horizon, seed.child(r));
        return is_ruined(path, capital, premium, claims) ? 1 : 0;
    });
    ProbabilityEstimate est;
    est.n = n_replicas;
    std::size_t hits = 0;
    for (int r : ruined) hits += static_cast<std::size_t>(r);
    est.p = static_cast<double>(hits) / static_cast<double>(n_replicas);
    est.std_err = std::sqrt(est.p * (1.0 - est.p) / static_cast<double>(n_replicas));
    return est;
}

Trajectory geometric_compound_path(const SwishPath& path, const Vector& growth, double s0,
                                   bool include_initial_mark) {
    if (!(s0 > 0.0)) throw Error(Errc::NonPositiveParameter, "initial price must be positive");
    if ((growth.array() <= -1.0).any()) throw Error(Errc::InvalidMark, "growth marks must exceed -1");
    check_marks(growth, max_state(path), "growth marks");
    Trajectory out;
    double s = s0 * (include_initial_mark ? 1.0 + growth(path.states[0]) : 1.0);
    out.push(0.0, s);
    const auto& times = path.events.times;
    for (std::size_t k = 0; k < times.size(); ++k) {
        s *= 1.0 + growth(path.states[k + 1]);
        out.push(times[k], s);
    }
    if (times.empty() || times.back() < path.horizon()) out.push(path.horizon(), s);
    return out;
}

Trajectory switched_diffusion_path(const SwishPath& path, const AffineRateFamily& drift, const Vector& vol,
                                   double xi0, double dt, const Seed& seed) {
    if (!(dt > 0.0)) throw Error(Errc::ConfigError, "dt must be positive");
    const auto n = max_state(path);
    check_marks(drift.c0, n, "drift c0");
    check_marks(drift.c1, n, "drift c1");
    check_marks(vol, n, "vol");
    Engine rng = make_engine(seed);
    std::normal_distribution<double> normal;
    Trajectory out;
    double xi = xi0;
    out.push(0.0, xi);
    double previous = 0.0;
    const auto& times = path.events.times;
    for (std::size_t k = 0; k <= times.size(); ++k) {
        const double next = k < times.size() ? times[k] : path.horizon();
        const State x = path.states[k];
        if (next > previous) {
            const auto steps = std::max<long>(1, static_cast<long>(std::ceil((next - previous) / dt - 1e-9)));
            const double h = (next - previous) / static_cast<double>(steps);
            const double sqrt_h = std::sqrt(h);
            for (long j = 1; j <= steps; ++j) {
                xi += drift.rate(xi, x) * h + vol(x) * sqrt_h * normal(rng);
                out.push(j == steps ? next : previous + h * static_cast<double>(j), xi);
            }
        }
        previous = next;
    }
    return out;
}

}  // namespace sere
