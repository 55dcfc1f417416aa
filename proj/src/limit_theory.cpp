#include "sere/limit_theory.hpp"

#include <cmath>

namespace sere {

namespace {

constexpr double kBalanceTolerance = 1e-10;

void require_balanced(double weighted_sum, const char* what) {
    if (!(std::abs(weighted_sum) < kBalanceTolerance))
        throw Error(Errc::BalanceViolated, std::string(what) + " has rho-average " + std::to_string(weighted_sum));
}

void require_size(const Vector& v, const LimitSpec<double>& spec, const char* what) {
    if (v.size() != spec.n_states()) throw Error(Errc::ConfigError, std::string(what) + " needs one value per state");
}

}  // namespace

namespace detail {

double sandwich(const Vector& u, const Vector& w, const LimitSpec<double>& spec) {
    const Matrix mix = spec.r0 - Matrix::Identity(spec.r0.rows(), spec.r0.cols());
    const Vector mixed = mix * w;
    const Vector pointwise =
        spec.m * spec.m * u.cwiseProduct(mixed) + spec.m2 * u.cwiseProduct(w) / 2.0;
    return spec.lambda_hat * spec.rho.dot(pointwise);
}

}  // namespace detail

Trajectory averaged_traffic_ode(const AffineRateFamily& v, const LimitSpec<double>& spec, double z0, double t,
                                double dt) {
    if (!(dt > 0.0)) throw Error(Errc::ConfigError, "dt must be positive");
    require_size(v.c0, spec, "rate c0");
    require_size(v.c1, spec, "rate c1");
    // The averaged rate is affine as well, so the flow is exact.
    const double scale = spec.lambda_hat * spec.m;
    AffineRateFamily averaged{Vector::Constant(1, scale * spec.rho.dot(v.c0)),
                              Vector::Constant(1, scale * spec.rho.dot(v.c1))};
    Trajectory out;
    out.push(0.0, z0);
    const auto steps = std::max<long>(1, static_cast<long>(std::ceil(t / dt - 1e-9)));
    for (long j = 1; j <= steps; ++j) {
        const double s = j == steps ? t : t * static_cast<double>(j) / static_cast<double>(steps);
        out.push(s, averaged.flow(z0, 0, s));
    }
    return out;
}

double averaged_summation_drift(const Vector& marks, const LimitSpec<double>& spec) {
    require_size(marks, spec, "marks");
    return spec.lambda_hat * spec.rho.dot(marks);
}

SDECoefficients traffic_diffusion_coeffs(const AffineRateFamily& v, const LimitSpec<double>& spec) {
    require_size(v.c0, spec, "rate c0");
    require_size(v.c1, spec, "rate c1");
    require_balanced(spec.rho.dot(v.c0), "rate c0");
    require_balanced(spec.rho.dot(v.c1), "rate c1");
    SDECoefficients coeffs;
    coeffs.drift = [v, spec](double z) {
        const Vector rate = v.c0 + v.c1 * z;
        return detail::sandwich(rate, v.c1, spec);
    };
    coeffs.variance = [v, spec](double z) {
        const Vector rate = v.c0 + v.c1 * z;
        return 2.0 * detail::sandwich(rate, rate, spec);
    };
    return coeffs;
}

SummationVariance summation_sigma2(const Vector& marks, const FiniteMarkovChain<double>& chain,
                                   const LimitSpec<double>& spec) {
    require_size(marks, spec, "marks");
    require_balanced(spec.rho.dot(marks), "marks");
    SummationVariance out;
    out.closed_form = 2.0 * detail::sandwich(marks, marks, spec);
    out.oracle = spec.lambda_hat * chain_step_variance(chain, marks);
    return out;
}

Trajectory euler_maruyama(const SDECoefficients& coeffs, double z0, double t, double dt, const Seed& seed) {
    if (!(dt > 0.0)) throw Error(Errc::ConfigError, "dt must be positive");
    Engine rng = make_engine(seed);
    std::normal_distribution<double> normal;
    const auto steps = std::max<long>(1, static_cast<long>(std::ceil(t / dt - 1e-9)));
    const double h = t / static_cast<double>(steps);
    const double sqrt_h = std::sqrt(h);
    Trajectory out;
    out.times.reserve(static_cast<std::size_t>(steps) + 1);
    out.values.reserve(static_cast<std::size_t>(steps) + 1);
    double z = z0;
    out.push(0.0, z);
    for (long j = 1; j <= steps; ++j) {
        const double var = coeffs.variance(z);
        if (var < 0.0) throw Error(Errc::NegativeVariance, "sigma^2(" + std::to_string(z) + ") = " + std::to_string(var));
        z += coeffs.drift(z) * h + std::sqrt(var) * sqrt_h * normal(rng);
        out.push(j == steps ? t : h * static_cast<double>(j), z);
    }
    return out;
}

}  // namespace sere
