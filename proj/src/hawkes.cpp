#include "sere/hawkes.hpp"

#include "sere/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sere {

ExpHawkesKernel::ExpHawkesKernel(double lambda_base, double alpha, double beta)
    : lambda_base_(lambda_base), alpha_(alpha), beta_(beta) {
    if (!(lambda_base > 0.0)) throw Error(Errc::NonPositiveParameter, "lambda must be positive");
    if (!(beta > 0.0)) throw Error(Errc::NonPositiveParameter, "beta must be positive");
    if (!(alpha >= 0.0)) throw Error(Errc::NonPositiveParameter, "alpha must be non-negative");
    if (!(alpha / beta < 1.0))
        throw Error(Errc::StabilityViolation, "branching ratio alpha/beta = " + std::to_string(alpha / beta) +
                                                  " must be below 1");
}

double ExpHawkesKernel::expected_count(double horizon) const {
    // E lambda(t) relaxes from lambda_base to long_run_rate at rate beta - alpha.
    const double kappa = beta_ - alpha_;
    return long_run_rate() * horizon - (long_run_rate() - lambda_base_) * -std::expm1(-kappa * horizon) / kappa;
}

ExpHawkesKernel validate_kernel(double lambda_base, double alpha, double beta) {
    return ExpHawkesKernel(lambda_base, alpha, beta);
}

std::size_t EventSequence::count_until(double t) const {
    return static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
}

double intensity_at(const ExpHawkesKernel& kernel, const EventSequence& events, double t) {
    double excitation = 0.0;
    for (double tau : events.times) {
        if (tau >= t) break;
        excitation += std::exp(-kernel.beta() * (t - tau));
    }
    return kernel.lambda_base() + kernel.alpha() * excitation;
}

HawkesSampler::HawkesSampler(const ExpHawkesKernel& kernel, const Seed& seed)
    : kernel_(kernel), rng_(make_engine(seed)) {}

double HawkesSampler::next() {
    const double base = kernel_.lambda_base();
    for (;;) {
        const double bound = base + excess_;
        const double wait = -std::log(uniform_open(rng_)) / bound;
        t_ += wait;
        excess_ *= std::exp(-kernel_.beta() * wait);
        if (uniform_open(rng_) * bound <= base + excess_) {
            excess_ += kernel_.alpha();
            return t_;
        }
    }
}

EventSequence simulate_hawkes(const ExpHawkesKernel& kernel, double horizon, const Seed& seed,
                              std::size_t max_events) {
    if (!(horizon > 0.0)) throw Error(Errc::NonPositiveParameter, "horizon must be positive");
    EventSequence events;
    events.horizon = horizon;
    events.times.reserve(static_cast<std::size_t>(std::min(1e7, 1.2 * kernel.long_run_rate() * horizon + 16)));
    HawkesSampler sampler(kernel, seed);
    for (double t = sampler.next(); t <= horizon; t = sampler.next()) {
        if (events.times.size() == max_events)
            throw Error(Errc::EventCapExceeded, "more than " + std::to_string(max_events) + " events");
        events.times.push_back(t);
    }
    return events;
}

MomentEstimate estimate_interarrival_moments(const ExpHawkesKernel& kernel, std::size_t n_events,
                                             std::size_t burn_in, const Seed& seed) {
    const std::size_t first = std::max<std::size_t>(burn_in, 1);
    if (n_events <= first || n_events - first < 100)
        throw Error(Errc::InsufficientSamples, "need at least 100 inter-arrivals after burn-in");
    HawkesSampler sampler(kernel, seed);
    double previous = 0.0;
    for (std::size_t i = 0; i < burn_in; ++i) previous = sampler.next();
    if (burn_in == 0) previous = sampler.next();

    std::vector<double> gaps;
    gaps.reserve(n_events - first);
    for (std::size_t i = first; i < n_events; ++i) {
        const double t = sampler.next();
        gaps.push_back(t - previous);
        previous = t;
    }
    const double n = static_cast<double>(gaps.size());
    double s1 = 0.0;
    double s2 = 0.0;
    for (double g : gaps) {
        s1 += g;
        s2 += g * g;
    }
    MomentEstimate est;
    est.n_samples = gaps.size();
    est.m = s1 / n;
    est.m2 = s2 / n;
    // Inter-arrivals of a Hawkes process are correlated; batch means keep the
    // standard error honest.
    const std::size_t batches = std::min<std::size_t>(50, gaps.size() / 2);
    const std::size_t per_batch = gaps.size() / batches;
    double ss = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
        double mean = 0.0;
        for (std::size_t i = b * per_batch; i < (b + 1) * per_batch; ++i) mean += gaps[i];
        mean /= static_cast<double>(per_batch);
        ss += (mean - est.m) * (mean - est.m);
    }
    est.std_err_m = std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
    return est;
}

}  // namespace sere
