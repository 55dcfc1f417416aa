#pragma once

#include "sere/error.hpp"
#include "sere/evolution.hpp"
#include "sere/hawkes.hpp"
#include "sere/markov.hpp"
#include "sere/matrix_exponential.hpp"
#include "sere/swish.hpp"
#include "sere/types.hpp"

#include <functional>
#include <limits>

namespace sere {

/// Ingredients shared by the averaging and diffusion limits.
template <typename Scalar = double>
struct LimitSpec {
    Scalar lambda_hat;
    Scalar m;   // mean inter-arrival time
    Scalar m2;  // second moment of inter-arrival time
    Vec<Scalar> rho;
    Mat<Scalar> r0;

    LimitSpec(Scalar lambda_hat_, Scalar m_, Scalar m2_, Vec<Scalar> rho_, Mat<Scalar> r0_)
        : lambda_hat(lambda_hat_), m(m_), m2(m2_), rho(std::move(rho_)), r0(std::move(r0_)) {
        if (!(lambda_hat > Scalar(0)) || !(m > Scalar(0)))
            throw Error(Errc::NonPositiveParameter, "limit spec needs lambda_hat > 0 and m > 0");
        if (m2 < m * m) throw Error(Errc::ConfigError, "m2 must be at least m^2");
    }

    Eigen::Index n_states() const { return rho.size(); }
};

/// Builds the spec from a kernel, an ergodic chain and inter-arrival moments.
inline LimitSpec<double> make_limit_spec(const ExpHawkesKernel& kernel, const FiniteMarkovChain<double>& chain,
                                         double m, double m2) {
    Vector rho = stationary_distribution(chain);
    Matrix r0 = potential_matrix(chain, rho);
    return LimitSpec<double>(kernel.long_run_rate(), m, m2, std::move(rho), std::move(r0));
}

/// G = lambda_hat (m sum rho Gamma + sum rho D1).
template <typename Scalar>
Mat<Scalar> averaged_generator(const MatrixFamily<Scalar>& family, const LimitSpec<Scalar>& spec) {
    const auto d = family.dim();
    Mat<Scalar> gamma_hat = Mat<Scalar>::Zero(d, d);
    Mat<Scalar> d_hat = Mat<Scalar>::Zero(d, d);
    for (std::size_t x = 0; x < family.n_states(); ++x) {
        const Scalar w = spec.rho(static_cast<Eigen::Index>(x));
        gamma_hat += w * family.gamma[x];
        d_hat += w * family.d1[x];
    }
    return spec.lambda_hat * (spec.m * gamma_hat + d_hat);
}

template <typename Scalar>
Vec<Scalar> averaged_evolution(const Mat<Scalar>& generator, Scalar t, const Vec<Scalar>& f) {
    return matrix_exponential(generator, t) * f;
}

/// L = sum_x rho(x) L(x) with
///   L(x) = A(x) sum_y (R0 - I)(x, y) A(y) + m2 Gamma(x)^2 / 2 + m D1(x) Gamma(x) + D2(x),
///   A(x) = m Gamma(x) + D1(x).
/// Requires the balance condition sum rho A = 0.
template <typename Scalar>
Mat<Scalar> diffusion_generator(const MatrixFamily<Scalar>& family, const LimitSpec<Scalar>& spec) {
    if (balance_residual(family, spec.rho, spec.m) >= Scalar(1e-8))
        throw Error(Errc::BalanceViolated, "sum rho (m Gamma + D1) must vanish");
    const auto d = family.dim();
    const auto n = family.n_states();
    std::vector<Mat<Scalar>> a(n);
    for (std::size_t x = 0; x < n; ++x) a[x] = spec.m * family.gamma[x] + family.d1[x];
    const Mat<Scalar> mix = spec.r0 - Mat<Scalar>::Identity(spec.r0.rows(), spec.r0.cols());

    Mat<Scalar> l_hat = Mat<Scalar>::Zero(d, d);
    for (std::size_t x = 0; x < n; ++x) {
        Mat<Scalar> mixed = Mat<Scalar>::Zero(d, d);
        for (std::size_t y = 0; y < n; ++y) mixed += mix(Eigen::Index(x), Eigen::Index(y)) * a[y];
        const Mat<Scalar> lx = a[x] * mixed + spec.m2 * family.gamma[x] * family.gamma[x] / Scalar(2) +
                               spec.m * family.d1[x] * family.gamma[x] + family.d2[x];
        l_hat += spec.rho(Eigen::Index(x)) * lx;
    }
    return l_hat;
}

/// z(t) for dz/dt = lambda_hat m sum_x rho(x) v(z, x), sampled every dt.
Trajectory averaged_traffic_ode(const AffineRateFamily& v, const LimitSpec<double>& spec, double z0, double t,
                                double dt);

/// a_hat = lambda_hat sum rho a.
double averaged_summation_drift(const Vector& marks, const LimitSpec<double>& spec);

struct SDECoefficients {
    std::function<double(double)> drift;
    std::function<double(double)> variance;
};

/// b(z)  = lambda_hat sum rho [m^2 v (R0 - I) v' + m2 v v' / 2],
/// s2(z) = 2 lambda_hat sum rho [m^2 v (R0 - I) v + m2 v^2 / 2],
/// with (R0 - I) acting on the state index. Requires rho[c0] = rho[c1] = 0.
SDECoefficients traffic_diffusion_coeffs(const AffineRateFamily& v, const LimitSpec<double>& spec);

struct SummationVariance {
    double closed_form = 0.0;   // 2 lambda_hat rho[m^2 a (R0 - I) a + m2 a^2 / 2]
    double oracle = 0.0;  // lambda_hat * chain_step_variance(chain, a)
    double ratio() const { return oracle == 0.0 ? std::numeric_limits<double>::quiet_NaN() : closed_form / oracle; }
};

/// Variance rate of the balanced summation limit. Requires |rho[a]| < 1e-10.
SummationVariance summation_sigma2(const Vector& marks, const FiniteMarkovChain<double>& chain,
                                   const LimitSpec<double>& spec);

/// Strong order 0.5 stepping of dz = b(z) dt + s(z) dW on a grid of at most dt.
Trajectory euler_maruyama(const SDECoefficients& coeffs, double z0, double t, double dt, const Seed& seed);

namespace detail {

/// lambda_hat rho[m^2 u (R0 - I) w + m2 u w / 2].
double sandwich(const Vector& u, const Vector& w, const LimitSpec<double>& spec);

}  // namespace detail

}  // namespace sere
