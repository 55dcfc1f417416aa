#include "sere/error.hpp"
#include "sere/limit_theory.hpp"
#include "sere/statistics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace sere;

namespace {

Matrix two_state(double p00, double p01, double p10, double p11) {
    Matrix m(2, 2);
    m << p00, p01, p10, p11;
    return m;
}

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

LimitSpec<double> spec_for(const Matrix& p, double lambda_hat, double m, double m2) {
    return make_limit_spec(ExpHawkesKernel(lambda_hat, 0.0, 1.0), validate_chain(p), m, m2);
}

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no sere::Error thrown";
    return Errc::IoError;
}

const Matrix kIid = two_state(0.5, 0.5, 0.5, 0.5);
const Matrix kSwap = two_state(0, 1, 1, 0);

// Exact mean of the n-step product
//   Gamma_{x0}(eps theta_1) D(x_1) Gamma_{x1}(eps theta_2) ... D(x_n)
// for x0 ~ rho and i.i.d. exponential(rate) holding times, via the block
// transfer matrix T[x][y] = P(x, y) E[exp(eps theta Gamma(x))] D(y).
Matrix exact_step_mean(const MatrixFamily<double>& fam, const Matrix& p, const Vector& rho, double rate, double eps,
                       long n) {
    const auto d = fam.dim();
    const auto s = p.rows();
    Matrix t = Matrix::Zero(s * d, s * d);
    for (Eigen::Index x = 0; x < s; ++x) {
        const Matrix laplace = rate * (rate * Matrix::Identity(d, d) - eps * fam.gamma[x]).inverse();
        for (Eigen::Index y = 0; y < s; ++y)
            t.block(x * d, y * d, d, d) = p(x, y) * laplace * fam.jump(State(y), eps, 2);
    }
    Matrix power = Matrix::Identity(s * d, s * d);
    Matrix base = t;
    for (long k = n; k > 0; k >>= 1) {
        if (k & 1) power = power * base;
        base = base * base;
    }
    Matrix out = Matrix::Zero(d, d);
    for (Eigen::Index x = 0; x < s; ++x)
        for (Eigen::Index y = 0; y < s; ++y) out += rho(x) * power.block(x * d, y * d, d, d);
    return out;
}

}  // namespace

TEST(LimitSpecTest, Invariants) {
    const Vector rho = Vector::Constant(2, 0.5);
    const Matrix r0 = Matrix::Identity(2, 2);
    EXPECT_EQ(code_of([&] { LimitSpec<double>(0.0, 1.0, 2.0, rho, r0); }), Errc::NonPositiveParameter);
    EXPECT_EQ(code_of([&] { LimitSpec<double>(1.0, 0.0, 2.0, rho, r0); }), Errc::NonPositiveParameter);
    EXPECT_EQ(code_of([&] { LimitSpec<double>(1.0, 1.0, 0.5, rho, r0); }), Errc::ConfigError);
    EXPECT_NO_THROW(LimitSpec<double>(1.0, 1.0, 1.0, rho, r0));

    const auto spec = make_limit_spec(ExpHawkesKernel(1.0, 1.0, 2.0), validate_chain(kSwap), 0.5, 0.4);
    EXPECT_DOUBLE_EQ(spec.lambda_hat, 2.0);
    EXPECT_TRUE(spec.r0.isApprox(two_state(0.75, 0.25, 0.25, 0.75)));
    EXPECT_EQ(code_of([] { make_limit_spec(ExpHawkesKernel(1, 0, 1), validate_chain(Matrix::Identity(2, 2).eval()), 1, 2); }),
              Errc::NotErgodic);
}

TEST(AveragedGenerator, Examples) {
    Matrix g(2, 2);
    g << 0.1, 0.2, -0.3, 0.4;
    const auto unit = spec_for(kIid, 2.0, 0.5, 0.5);
    EXPECT_TRUE(averaged_generator(MatrixFamily<double>({g, g}, {Matrix::Zero(2, 2), Matrix::Zero(2, 2)}), unit).isApprox(g));
    EXPECT_TRUE(averaged_generator(MatrixFamily<double>({g, -g}, {Matrix::Zero(2, 2), Matrix::Zero(2, 2)}), unit).isZero());

    // gamma = (4, 2), delta = (3, -1): rho[gamma] = 3, rho[delta] = 1.
    const auto spec = spec_for(kIid, 2.0, 0.5, 0.5);
    const Matrix id = Matrix::Identity(2, 2);
    const MatrixFamily<double> fam({4 * id, 2 * id}, {3 * id, -1 * id});
    EXPECT_TRUE(averaged_generator(fam, spec).isApprox(5 * id, 1e-15));
}

TEST(AveragedGenerator, LinearInFamily) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z;
    auto random = [&] {
        Matrix m(2, 2);
        for (auto& v : m.reshaped()) v = z(rng);
        return m;
    };
    const MatrixFamily<double> a({random(), random()}, {random(), random()});
    const MatrixFamily<double> b({random(), random()}, {random(), random()});
    const auto spec = spec_for(two_state(0.9, 0.1, 0.5, 0.5), 2.0, 0.5, 0.4);
    EXPECT_TRUE(averaged_generator(a + b, spec).isApprox(averaged_generator(a, spec) + averaged_generator(b, spec), 1e-14));
}

TEST(AveragedEvolution, Examples) {
    const Vector f = vec({1, 0});
    const Matrix g = 5 * Matrix::Identity(2, 2);
    EXPECT_EQ(averaged_evolution(g, 0.0, f), f);
    EXPECT_TRUE(averaged_evolution(g, 1.0, f).isApprox(vec({std::exp(5.0), 0.0}), 1e-14));

    Matrix h(2, 2);
    h << -0.5, 1.2, -0.7, 0.1;
    const Vector f2 = vec({0.3, -2.0});
    EXPECT_TRUE(averaged_evolution(h, 1.7, f2).isApprox(matrix_exponential(h, 0.4) * averaged_evolution(h, 1.3, f2), 1e-10));
}

TEST(DiffusionGenerator, Examples) {
    const double m = 0.5, m2 = 0.4;
    const auto spec = spec_for(two_state(0.9, 0.1, 0.5, 0.5), 2.0, m, m2);
    Matrix g0(2, 2), g1(2, 2);
    g0 << 0.3, 0.1, 0.0, -0.2;
    g1 << -0.1, 0.5, 0.4, 0.2;
    const MatrixFamily<double> cancelled({g0, g1}, {-m * g0, -m * g1});
    const Matrix expected = spec.rho(0) * (m2 * g0 * g0 / 2 + m * (-m * g0) * g0) +
                            spec.rho(1) * (m2 * g1 * g1 / 2 + m * (-m * g1) * g1);
    EXPECT_TRUE(diffusion_generator(cancelled, spec).isApprox(expected, 1e-14));

    const MatrixFamily<double> scalar_fam({scalar(1.5), scalar(-2.0)}, {scalar(-m * 1.5), scalar(m * 2.0)});
    const double rho_g2 = spec.rho(0) * 2.25 + spec.rho(1) * 4.0;
    EXPECT_NEAR(diffusion_generator(scalar_fam, spec)(0, 0), (m2 / 2 - m * m) * rho_g2, 1e-14);

    const auto alt = spec_for(kSwap, 1.0, 1.0, 1.0);
    const MatrixFamily<double> alternating({scalar(1.0), scalar(-1.0)}, {scalar(0.0), scalar(0.0)});
    EXPECT_NEAR(diffusion_generator(alternating, alt)(0, 0), 0.0, 1e-14);
}

TEST(DiffusionGenerator, RejectsUnbalanced) {
    const auto spec = spec_for(kIid, 1.0, 1.0, 2.0);
    const MatrixFamily<double> fam({scalar(1.0), scalar(0.5)}, {scalar(0.0), scalar(0.0)});
    EXPECT_EQ(code_of([&] { diffusion_generator(fam, spec); }), Errc::BalanceViolated);
}

TEST(DiffusionGenerator, IidChainHasNoSandwich) {
    const auto spec = spec_for(stationary_projector(vec({0.3, 0.7})), 1.5, 0.8, 1.1);
    EXPECT_TRUE(spec.r0.isIdentity(1e-14));
    Matrix g0(2, 2), d0(2, 2);
    g0 << 0.3, 0.1, 0.0, -0.2;
    d0 << 0.1, 0.0, 0.2, 0.1;
    const double w = 0.3 / 0.7;
    const MatrixFamily<double> fam({g0, -w * g0}, {d0, -w * d0});
    Matrix expected = Matrix::Zero(2, 2);
    for (std::size_t x = 0; x < 2; ++x)
        expected += spec.rho(Eigen::Index(x)) * (1.1 * fam.gamma[x] * fam.gamma[x] / 2 + 0.8 * fam.d1[x] * fam.gamma[x]);
    EXPECT_TRUE(diffusion_generator(fam, spec).isApprox(expected, 1e-14));
}

// The exact n-step mean of the evolution under the diffusion scaling
// approaches exp(lambda_hat L t) at rate eps, for a correlated chain and a
// non-commuting family.
TEST(DiffusionGenerator, MatchesExactStepMean) {
    const Matrix p = two_state(0.7, 0.3, 0.6, 0.4);
    const double rate = 1.0;  // exponential holding times: m = 1, m2 = 2
    const auto spec = spec_for(p, rate, 1.0, 2.0);
    Matrix g0(2, 2), d0(2, 2), e0(2, 2);
    g0 << 0.3, 0.1, 0.0, -0.2;
    d0 << 0.1, 0.0, 0.2, 0.1;
    e0 << 0.05, -0.02, 0.0, 0.03;
    const double w = spec.rho(0) / spec.rho(1);
    const MatrixFamily<double> fam({g0, -w * g0}, {d0, -w * d0}, {e0, Matrix::Zero(2, 2)});
    const Matrix target = matrix_exponential(diffusion_generator(fam, spec), spec.lambda_hat);

    std::vector<double> errors;
    for (double eps : {0.02, 0.01, 0.005}) {
        const long n = std::lround(spec.lambda_hat / (eps * eps));
        errors.push_back((exact_step_mean(fam, p, spec.rho, rate, eps, n) - target).norm());
    }
    EXPECT_NEAR(errors[0] / errors[1], 2.0, 0.3);
    EXPECT_NEAR(errors[1] / errors[2], 2.0, 0.3);
    EXPECT_LT(errors[2], 0.01 * target.norm());
}

TEST(DiffusionGenerator, AveragedGeneratorMatchesExactStepMean) {
    const Matrix p = two_state(0.7, 0.3, 0.6, 0.4);
    const auto spec = spec_for(p, 1.0, 1.0, 2.0);
    Matrix g0(2, 2), g1(2, 2), d0(2, 2);
    g0 << 0.3, 0.1, 0.0, -0.2;
    g1 << -0.1, 0.5, 0.4, 0.2;
    d0 << 0.1, 0.0, 0.2, 0.1;
    const MatrixFamily<double> fam({g0, g1}, {d0, Matrix::Zero(2, 2)});
    const Matrix target = matrix_exponential(averaged_generator(fam, spec), 1.0);
    const double eps = 1e-3;
    const Matrix mean = exact_step_mean(fam, p, spec.rho, 1.0, eps, std::lround(1.0 / eps));
    EXPECT_LT((mean - target).norm(), 0.01 * target.norm());
}

TEST(TrafficOde, Examples) {
    const auto spec = spec_for(kIid, 2.0, 0.5, 0.5);  // lambda_hat m = 1
    const auto flat = averaged_traffic_ode({vec({0, 0}), vec({0, 0})}, spec, 1.5, 1.0, 0.1);
    for (double v : flat.values) EXPECT_EQ(v, 1.5);

    const auto linear = averaged_traffic_ode({vec({3, 1}), vec({0, 0})}, spec, 1.0, 2.0, 0.01);
    EXPECT_EQ(linear.times.back(), 2.0);
    for (std::size_t i = 0; i < linear.size(); ++i) EXPECT_NEAR(linear.values[i], 1.0 + 2.0 * linear.times[i], 1e-12);

    const auto decay = averaged_traffic_ode({vec({0, 0}), vec({-1, -1})}, spec, 2.0, 3.0, 0.01);
    for (std::size_t i = 0; i < decay.size(); ++i) EXPECT_NEAR(decay.values[i], 2.0 * std::exp(-decay.times[i]), 1e-12);
}

TEST(SummationDrift, Examples) {
    const auto spec = spec_for(kIid, 2.0, 0.5, 0.5);
    EXPECT_EQ(averaged_summation_drift(vec({0, 0}), spec), 0.0);
    EXPECT_DOUBLE_EQ(averaged_summation_drift(vec({2, 0}), spec), 2.0);
    EXPECT_EQ(averaged_summation_drift(vec({1, -1}), spec), 0.0);
    EXPECT_EQ(code_of([&] { averaged_summation_drift(vec({1, 2, 3}), spec); }), Errc::ConfigError);
}

TEST(TrafficDiffusion, Examples) {
    const auto spec = spec_for(kIid, 2.0, 0.5, 0.4);
    const auto zero = traffic_diffusion_coeffs({vec({0, 0}), vec({0, 0})}, spec);
    EXPECT_EQ(zero.drift(3.0), 0.0);
    EXPECT_EQ(zero.variance(3.0), 0.0);

    const Vector a = vec({1.3, -1.3});
    const auto constant = traffic_diffusion_coeffs({a, vec({0, 0})}, spec);
    const auto sigma = summation_sigma2(a, validate_chain(kIid), spec);
    for (double z : {-2.0, 0.0, 5.0}) {
        EXPECT_EQ(constant.drift(z), 0.0);
        EXPECT_EQ(constant.variance(z), sigma.closed_form);
    }

    const auto alt = spec_for(kSwap, 1.0, 1.0, 1.0);
    EXPECT_NEAR(traffic_diffusion_coeffs({vec({1, -1}), vec({0, 0})}, alt).variance(0.7), 0.0, 1e-15);
}

TEST(TrafficDiffusion, AffineCoefficients) {
    const auto spec = spec_for(two_state(0.9, 0.1, 0.5, 0.5), 2.0, 0.5, 0.4);
    // rho = (5/6, 1/6): balanced rates need c(0) = -c(1) / 5.
    const AffineRateFamily v{vec({1.0, -5.0}), vec({-0.2, 1.0})};
    const auto coeffs = traffic_diffusion_coeffs(v, spec);
    const Matrix mix = spec.r0 - Matrix::Identity(2, 2);
    for (double z : {-1.0, 0.0, 2.5}) {
        const Vector rate = v.c0 + v.c1 * z;
        double b = 0.0, s2 = 0.0;
        for (Eigen::Index x = 0; x < 2; ++x) {
            double mixed_slope = 0.0, mixed_rate = 0.0;
            for (Eigen::Index y = 0; y < 2; ++y) {
                mixed_slope += mix(x, y) * v.c1(y);
                mixed_rate += mix(x, y) * rate(y);
            }
            b += spec.rho(x) * (0.25 * rate(x) * mixed_slope + 0.2 * rate(x) * v.c1(x));
            s2 += spec.rho(x) * (0.25 * rate(x) * mixed_rate + 0.2 * rate(x) * rate(x));
        }
        EXPECT_NEAR(coeffs.drift(z), 2.0 * b, 1e-13);
        EXPECT_NEAR(coeffs.variance(z), 4.0 * s2, 1e-13);
    }
}

TEST(TrafficDiffusion, BalanceThreshold) {
    const auto spec = spec_for(kIid, 1.0, 1.0, 2.0);
    EXPECT_NO_THROW(traffic_diffusion_coeffs({vec({1.0, -1.0 + 1.5e-10}), vec({0, 0})}, spec));
    EXPECT_EQ(code_of([&] { traffic_diffusion_coeffs({vec({1.0, -1.0 + 2.5e-10}), vec({0, 0})}, spec); }),
              Errc::BalanceViolated);
    EXPECT_EQ(code_of([&] { traffic_diffusion_coeffs({vec({0, 0}), vec({1, 0})}, spec); }), Errc::BalanceViolated);
}

TEST(SummationSigma2, Examples) {
    const auto iid_chain = validate_chain(kIid);
    const auto spec = spec_for(kIid, 2.0, 0.5, 0.4);
    const auto zero = summation_sigma2(vec({0, 0}), iid_chain, spec);
    EXPECT_EQ(zero.closed_form, 0.0);
    EXPECT_EQ(zero.oracle, 0.0);

    const Vector a = vec({1.0, -1.0});
    const auto iid = summation_sigma2(a, iid_chain, spec);
    EXPECT_NEAR(iid.closed_form, 2.0 * 0.4 * 1.0, 1e-14);
    EXPECT_NEAR(iid.oracle, 2.0 * 1.0, 1e-14);
    EXPECT_NEAR(iid.ratio(), 0.4, 1e-14);

    const double m = 0.498, m2 = 0.762;
    const auto swap = validate_chain(kSwap);
    const auto alt = summation_sigma2(a, swap, make_limit_spec(ExpHawkesKernel(1, 1, 2), swap, m, m2));
    EXPECT_NEAR(alt.closed_form, 2.0 * (m2 - m * m), 1e-14);
    EXPECT_EQ(alt.oracle, 0.0);
    EXPECT_TRUE(std::isnan(alt.ratio()));

    EXPECT_EQ(code_of([&] { summation_sigma2(vec({1.0, -0.5}), iid_chain, spec); }), Errc::BalanceViolated);
}

TEST(EulerMaruyama, Examples) {
    SDECoefficients still{[](double) { return 0.0; }, [](double) { return 0.0; }};
    for (double v : euler_maruyama(still, 1.25, 1.0, 0.01, 1).values) EXPECT_EQ(v, 1.25);

    SDECoefficients decay{[](double z) { return -z; }, [](double) { return 0.0; }};
    const auto path = euler_maruyama(decay, 1.0, 1.0, 1e-3, 1);
    EXPECT_NEAR(path.values.back(), std::exp(-1.0), 1e-3);
    EXPECT_EQ(path.size(), 1001u);

    SDECoefficients wiener{[](double) { return 0.0; }, [](double) { return 1.0; }};
    std::vector<double> ends;
    for (std::uint64_t r = 0; r < 10000; ++r) ends.push_back(euler_maruyama(wiener, 0.0, 1.0, 0.02, Seed(r)).values.back());
    EXPECT_NEAR(stats::summarize(ends).variance, 1.0, 0.05);

    EXPECT_EQ(euler_maruyama(wiener, 0.0, 1.0, 0.01, 5).values, euler_maruyama(wiener, 0.0, 1.0, 0.01, 5).values);
}

TEST(EulerMaruyama, NegativeVariance) {
    SDECoefficients bad{[](double) { return 0.0; }, [](double z) { return 1.0 - z; }};
    EXPECT_EQ(code_of([&] { euler_maruyama(bad, 2.0, 1.0, 0.1, 1); }), Errc::NegativeVariance);
    EXPECT_EQ(code_of([&] { euler_maruyama(bad, 0.0, 1.0, 0.0, 1); }), Errc::ConfigError);
}
