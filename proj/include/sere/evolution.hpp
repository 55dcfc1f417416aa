#pragma once

#include "sere/error.hpp"
#include "sere/matrix_exponential.hpp"
#include "sere/swish.hpp"
#include "sere/types.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <vector>

namespace sere {

/// Per-state d x d generators Gamma(x) and jump expansion terms D1(x), D2(x)
/// of a random evolution on R^d.
template <typename Scalar = double>
struct MatrixFamily {
    std::vector<Mat<Scalar>> gamma;
    std::vector<Mat<Scalar>> d1;
    std::vector<Mat<Scalar>> d2;

    MatrixFamily() = default;
    MatrixFamily(std::vector<Mat<Scalar>> g, std::vector<Mat<Scalar>> j1, std::vector<Mat<Scalar>> j2 = {})
        : gamma(std::move(g)), d1(std::move(j1)), d2(std::move(j2)) {
        if (d2.empty())
            for (const auto& m : gamma) d2.push_back(Mat<Scalar>::Zero(m.rows(), m.cols()));
        validate();
    }

    Eigen::Index dim() const { return gamma.empty() ? 0 : gamma.front().rows(); }
    std::size_t n_states() const { return gamma.size(); }

    /// D^eps(x) = I + eps D1(x) (order 1) or I + eps D1(x) + eps^2 D2(x) (order 2).
    Mat<Scalar> jump(State x, Scalar eps, int order) const {
        Mat<Scalar> d = Mat<Scalar>::Identity(dim(), dim()) + eps * d1[x];
        if (order == 2) d += eps * eps * d2[x];
        return d;
    }

    void validate() const {
        if (gamma.empty() || gamma.size() != d1.size() || gamma.size() != d2.size())
            throw Error(Errc::ConfigError, "matrix family needs one Gamma, D1, D2 per state");
        const auto d = dim();
        for (const auto* fam : {&gamma, &d1, &d2})
            for (const auto& m : *fam) {
                if (m.rows() != d || m.cols() != d)
                    throw Error(Errc::ConfigError, "matrix family entries must all be d x d");
                if (!m.allFinite()) throw Error(Errc::ConfigError, "matrix family has non-finite entries");
            }
    }
};

template <typename Scalar>
MatrixFamily<Scalar> operator+(const MatrixFamily<Scalar>& a, const MatrixFamily<Scalar>& b) {
    MatrixFamily<Scalar> r = a;
    for (std::size_t x = 0; x < r.n_states(); ++x) {
        r.gamma[x] += b.gamma[x];
        r.d1[x] += b.d1[x];
        r.d2[x] += b.d2[x];
    }
    return r;
}

namespace detail {

inline void warn_norm_growth(double norm) {
    static thread_local bool warned = false;
    if (norm > 1e6 && !warned) {
        warned = true;
        spdlog::warn("random evolution norm {:.3g} exceeds 1e6", norm);
    }
}

/// Product of semigroup and jump factors over the event window (0, horizon],
/// oldest factor on the left. Semigroup times are scaled by eps. When
/// include_last_jump is false, an event exactly at horizon is left out
/// (left limit).
template <typename Scalar>
Mat<Scalar> product_until(const SwishPath& path, const MatrixFamily<Scalar>& family, Scalar eps, double horizon,
                          int order, bool include_last_jump) {
    const auto d = family.dim();
    Mat<Scalar> v = Mat<Scalar>::Identity(d, d);
    double previous = 0.0;
    std::size_t k = 0;
    const auto& times = path.events.times;
    for (; k < times.size(); ++k) {
        const double tau = times[k];
        if (tau > horizon || (!include_last_jump && tau == horizon)) break;
        v = v * matrix_exponential(family.gamma[path.states[k]], eps * Scalar(tau - previous));
        v = v * family.jump(path.states[k + 1], eps, order);
        previous = tau;
    }
    v = v * matrix_exponential(family.gamma[path.states[k]], eps * Scalar(horizon - previous));
    warn_norm_growth(static_cast<double>(v.cwiseAbs().rowwise().sum().maxCoeff()));
    return v;
}

}  // namespace detail

/// Scaled random evolution V_eps(t): the path is read on the time window
/// (0, t / eps^order] and every semigroup factor runs for eps times its
/// holding time. With eps = 1, order 1 this is the unscaled product
///   Gamma_{x_0}(theta_1) D(x_1) Gamma_{x_1}(theta_2) ... D(x_N) Gamma_{x_N}(t - tau_N),
/// which solves V(t) = I + int V(s) Gamma(x(s)) ds + sum V(tau_k-) [D(x_k) - I].
template <typename Scalar>
Mat<Scalar> evolve_product(const SwishPath& path, const MatrixFamily<Scalar>& family, Scalar eps, double t,
                           int order) {
    if (order != 1 && order != 2) throw Error(Errc::ConfigError, "order must be 1 or 2");
    if (!(eps > Scalar(0))) throw Error(Errc::ConfigError, "epsilon must be positive");
    const double window = t / std::pow(static_cast<double>(eps), order);
    if (window > path.horizon() * (1.0 + 1e-12))
        throw Error(Errc::HorizonTooShort, "path horizon " + std::to_string(path.horizon()) + " < " +
                                               std::to_string(window));
    return detail::product_until(path, family, eps, std::min(window, path.horizon()), order, true);
}

struct IntegralResidual {
    /// max-norm residual of V(t)f = f + int V(s) Gamma(x(s)) f ds + sum V(tau_k-) [D(x_k) - I] f.
    double residual = 0.0;
    /// Same with the operators on the left, Gamma(x(s)) V(s) f and [D(x_k) - I] V(tau_k-) f.
    /// Vanishes only when the family commutes.
    double left_ordered_residual = 0.0;
};

/// Trapezoidal check of the integral equation for the unscaled evolution
/// (eps = 1, D = I + D1). The grid contains every event time.
template <typename Scalar>
IntegralResidual integral_equation_residual(const SwishPath& path, const MatrixFamily<Scalar>& family,
                                            const Vec<Scalar>& f, double t, double dt) {
    if (!(dt > 0.0)) throw Error(Errc::ConfigError, "dt must be positive");
    if (t > path.horizon() * (1.0 + 1e-12)) throw Error(Errc::HorizonTooShort, "t beyond path horizon");
    const auto d = family.dim();
    const Mat<Scalar> ident = Mat<Scalar>::Identity(d, d);
    Vec<Scalar> right = f;
    Vec<Scalar> left = f;
    auto v_at = [&](double s, bool include_jump) {
        return detail::product_until(path, family, Scalar(1), s, 1, include_jump);
    };

    std::vector<double> knots{0.0};
    for (double tau : path.events.times) {
        if (tau >= t) break;
        knots.push_back(tau);
    }
    knots.push_back(t);

    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double a = knots[i];
        const double b = knots[i + 1];
        const bool ends_at_event = i + 2 < knots.size();
        const Mat<Scalar>& g = family.gamma[state_at(path, a)];
        const auto steps = std::max<long>(1, static_cast<long>(std::ceil((b - a) / dt - 1e-9)));
        const double h = (b - a) / static_cast<double>(steps);
        for (long j = 0; j <= steps; ++j) {
            const double s = j == steps ? b : a + h * static_cast<double>(j);
            const Scalar w = Scalar((j == 0 || j == steps) ? 0.5 * h : h);
            // An interval ending at an event uses the left limit there.
            const Mat<Scalar> v = v_at(s, !(j == steps && ends_at_event));
            right += w * (v * (g * f));
            left += w * (g * (v * f));
        }
        if (ends_at_event) {
            const Mat<Scalar> jump = family.jump(state_at(path, b), Scalar(1), 1) - ident;
            const Mat<Scalar> v_minus = v_at(b, false);
            right += v_minus * (jump * f);
            left += jump * (v_minus * f);
        }
    }
    const Vec<Scalar> vt = v_at(t, true) * f;
    return {static_cast<double>((vt - right).cwiseAbs().maxCoeff()),
            static_cast<double>((vt - left).cwiseAbs().maxCoeff())};
}

/// One replica of V_eps(t) f on a freshly simulated SwishP of horizon t / eps^order.
template <typename Scalar>
Vec<Scalar> simulate_scaled_evolution(const ExpHawkesKernel& kernel, const FiniteMarkovChain<double>& chain,
                                      State x0, const MatrixFamily<Scalar>& family, const Vec<Scalar>& f,
                                      Scalar eps, double t, int order, const Seed& seed) {
    const double horizon = t / std::pow(static_cast<double>(eps), order);
    const SwishPath path = simulate_swish(kernel, chain, x0, horizon, seed);
    return evolve_product(path, family, eps, t, order) * f;
}

/// max-norm of sum_x rho(x) [m Gamma(x) + D1(x)].
template <typename Scalar>
Scalar balance_residual(const MatrixFamily<Scalar>& family, const Vec<Scalar>& rho, Scalar m) {
    Mat<Scalar> acc = Mat<Scalar>::Zero(family.dim(), family.dim());
    for (std::size_t x = 0; x < family.n_states(); ++x)
        acc += rho(static_cast<Eigen::Index>(x)) * (m * family.gamma[x] + family.d1[x]);
    return acc.cwiseAbs().maxCoeff();
}

}  // namespace sere
