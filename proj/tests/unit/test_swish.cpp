#include "sere/error.hpp"
#include "sere/statistics.hpp"
#include "sere/swish.hpp"

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

// Piecewise-constant trajectory value at t (right-continuous).
double value_at(const Trajectory& tr, double t) {
    const auto it = std::upper_bound(tr.times.begin(), tr.times.end(), t);
    return tr.values[static_cast<std::size_t>(it - tr.times.begin()) - 1];
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

const ExpHawkesKernel kKernel(1.0, 1.0, 2.0);
const auto kSticky = validate_chain(two_state(0.9, 0.1, 0.5, 0.5));
const auto kSwap = validate_chain(two_state(0, 1, 1, 0));

}  // namespace

TEST(SwishPath, StructureAndStateLookup) {
    const auto path = simulate_swish(kKernel, kSticky, 1, 50.0, 4);
    ASSERT_EQ(path.states.size(), path.events.count() + 1);
    ASSERT_GE(path.events.count(), 2u);
    EXPECT_EQ(state_at(path, 0.0), 1u);
    const double tau1 = path.events.times[0];
    EXPECT_EQ(state_at(path, std::nextafter(tau1, 0.0)), 1u);
    EXPECT_EQ(state_at(path, tau1), path.states[1]);
    EXPECT_EQ(state_at(path, 50.0), path.states.back());
    for (std::size_t k = 0; k + 1 < path.events.count(); ++k) {
        const double mid = 0.5 * (path.events.times[k] + path.events.times[k + 1]);
        EXPECT_EQ(state_at(path, mid), path.states[k + 1]);
    }
    EXPECT_EQ(code_of([&] { state_at(path, 50.1); }), Errc::OutOfHorizon);
    EXPECT_EQ(code_of([&] { state_at(path, -1e-9); }), Errc::OutOfHorizon);
}

TEST(SwishPath, Deterministic) {
    const auto a = simulate_swish(kKernel, kSticky, 0, 100.0, 8);
    const auto b = simulate_swish(kKernel, kSticky, 0, 100.0, 8);
    EXPECT_EQ(a.events.times, b.events.times);
    EXPECT_EQ(a.states, b.states);
}

// Events and chain come from separate streams: the chain does not change
// when only the kernel changes.
TEST(SwishPath, IndependentSubstreams) {
    const auto a = simulate_swish(kKernel, kSticky, 0, 100.0, 8);
    const auto b = simulate_swish(ExpHawkesKernel(3.0, 0.0, 1.0), kSticky, 0, 100.0, 8);
    const std::size_t n = std::min(a.states.size(), b.states.size());
    EXPECT_TRUE(std::equal(a.states.begin(), a.states.begin() + long(n), b.states.begin()));
}

TEST(SwishPath, OccupationLaw) {
    auto occupation = [](const SwishPath& path) {
        Vector time = Vector::Zero(2);
        double prev = 0.0;
        for (std::size_t k = 0; k < path.events.count(); ++k) {
            time(Eigen::Index(path.states[k])) += path.events.times[k] - prev;
            prev = path.events.times[k];
        }
        time(Eigen::Index(path.states.back())) += path.horizon() - prev;
        return Vector(time / path.horizon());
    };
    Vector q = vec({0.3, 0.7});
    const auto iid = validate_chain(Matrix(Vector::Ones(2) * q.transpose()));
    const Vector occ_iid = occupation(simulate_swish(ExpHawkesKernel(1.0, 0.0, 1.0), iid, 0, 1e4, 1));
    EXPECT_LT((occ_iid - q).cwiseAbs().maxCoeff(), 0.02);

    const Vector occ = occupation(simulate_swish(kKernel, kSticky, 0, 1e4, 2));
    EXPECT_LT((occ - vec({5.0 / 6.0, 1.0 / 6.0})).cwiseAbs().maxCoeff(), 0.02);
}

TEST(CompoundPath, Reductions) {
    const auto path = simulate_swish(kKernel, kSticky, 0, 30.0, 3);
    const auto zero = compound_path(path, vec({0, 0}), 2.5);
    for (double v : zero.values) EXPECT_EQ(v, 2.5);

    const auto counting = compound_path(path, vec({1, 1}), 1.0);
    for (std::size_t i = 0; i < counting.size(); ++i)
        EXPECT_EQ(counting.values[i], 1.0 + double(path.events.count_until(counting.times[i])));
    EXPECT_EQ(counting.times.front(), 0.0);
    EXPECT_EQ(counting.times.back(), 30.0);

    const auto with_initial = compound_path(path, vec({1, 1}), 1.0, true);
    EXPECT_EQ(with_initial.values.front(), 2.0);
}

TEST(CompoundPath, AlternationBounded) {
    for (State x0 : {State(0), State(1)}) {
        const auto path = simulate_swish(kKernel, kSwap, x0, 200.0, 10 + x0);
        const auto tr = compound_path(path, vec({1, -1}), 0.0);
        for (double v : tr.values) EXPECT_TRUE(v == -1.0 || v == 0.0 || v == 1.0);
    }
}

TEST(CompoundPath, LinearInMarks) {
    const auto path = simulate_swish(kKernel, kSticky, 0, 100.0, 12);
    const Vector a = vec({0.3, -1.7});
    const Vector b = vec({2.0, 0.25});
    const auto za = compound_path(path, a, 4.0);
    const auto zb = compound_path(path, b, 0.0);
    const auto zab = compound_path(path, a + b, 4.0);
    for (std::size_t i = 0; i < za.size(); ++i) EXPECT_NEAR(za.values[i] + zb.values[i], zab.values[i], 1e-10);
}

TEST(ImpulseTraffic, Reductions) {
    const auto path = simulate_swish(kKernel, kSticky, 0, 20.0, 13);
    const Vector a = vec({0.5, -2.0});
    const AffineRateFamily still{vec({0, 0}), vec({0, 0})};
    const auto traffic = impulse_traffic_path(path, still, a, 1.0, 0.01);
    const auto compound = compound_path(path, a, 1.0);
    for (std::size_t i = 0; i < traffic.size(); ++i)
        EXPECT_DOUBLE_EQ(traffic.values[i], value_at(compound, traffic.times[i]));

    const AffineRateFamily drift{vec({0.75, 0.75}), vec({0, 0})};
    const auto linear = impulse_traffic_path(path, drift, vec({0, 0}), 1.0, 0.01);
    for (std::size_t i = 0; i < linear.size(); ++i) EXPECT_NEAR(linear.values[i], 1.0 + 0.75 * linear.times[i], 1e-10);

    const AffineRateFamily decay{vec({0, 0}), vec({-1, -1})};
    const auto expo = impulse_traffic_path(path, decay, vec({0, 0}), 3.0, 0.01);
    for (std::size_t i = 0; i < expo.size(); ++i) EXPECT_NEAR(expo.values[i], 3.0 * std::exp(-expo.times[i]), 1e-9);
}

TEST(ImpulseTraffic, GridAndJumpConsistency) {
    const auto path = simulate_swish(kKernel, kSticky, 0, 10.0, 14);
    const AffineRateFamily v{vec({1.0, -2.0}), vec({-0.5, 0.3})};
    const Vector a = vec({0.4, -0.9});
    const double dt = 0.05;
    const auto tr = impulse_traffic_path(path, v, a, 0.0, dt);
    for (std::size_t i = 1; i < tr.size(); ++i) {
        EXPECT_GT(tr.times[i], tr.times[i - 1]);
        EXPECT_LE(tr.times[i] - tr.times[i - 1], dt + 1e-12);
    }
    for (std::size_t k = 0; k < path.events.count(); ++k) {
        const double tau = path.events.times[k];
        const auto it = std::lower_bound(tr.times.begin(), tr.times.end(), tau);
        ASSERT_TRUE(it != tr.times.end() && *it == tau);
        const auto i = static_cast<std::size_t>(it - tr.times.begin());
        const double before = v.flow(tr.values[i - 1], path.states[k], tau - tr.times[i - 1]);
        EXPECT_NEAR(tr.values[i] - before, a(Eigen::Index(path.states[k + 1])), 1e-12);
    }
}

TEST(RiskProcess, PathAndTrivialRuin) {
    const auto path = simulate_swish(kKernel, kSticky, 0, 10.0, 15);
    const Vector claims = vec({1.0, 2.0});
    const auto tr = risk_path(path, 5.0, 1.5, claims);
    double paid = 0.0;
    for (std::size_t k = 0; k < path.events.count(); ++k) {
        paid += claims(Eigen::Index(path.states[k + 1]));
        EXPECT_NEAR(tr.values[k + 1], 5.0 + 1.5 * path.events.times[k] - paid, 1e-12);
    }
    const auto never = ruin_probability_mc(kKernel, kSticky, 0, 1e6, 1.0, claims, 10.0, 200, 1);
    EXPECT_EQ(never.p, 0.0);
    const auto always = ruin_probability_mc(kKernel, kSticky, 0, 0.0, 0.0, vec({1, 1}), 10.0, 200, 1);
    EXPECT_EQ(always.p, 1.0);
    EXPECT_EQ(code_of([&] { ruin_probability_mc(kKernel, kSticky, 0, 1, 1, claims, 10, 99, 1); }),
              Errc::ConfigError);
}

TEST(RiskProcess, RuinDetectedOnEitherSideOfJump) {
    SwishPath path;
    path.events = EventSequence{10.0, {1.0, 2.0}};
    path.states = {0, 0, 0};
    // 0.5 + 1 - 2 < 0 right after the first claim.
    EXPECT_TRUE(is_ruined(path, 0.5, 1.0, vec({2.0})));
    // 1 + 2 - 3 touches zero at the second claim but never goes below it.
    EXPECT_FALSE(is_ruined(path, 1.0, 1.0, vec({1.5})));
    EXPECT_TRUE(is_ruined(path, 1.0, 1.0, vec({2.0})));
    EXPECT_TRUE(is_ruined(path, -0.1, 1.0, vec({0.0})));
}

// Straightforward compound-Poisson simulator written independently of the library.
TEST(RiskProcess, MatchesBruteForcePoisson) {
    const auto single = validate_chain(Matrix::Ones(1, 1).eval());
    const auto est = ruin_probability_mc(ExpHawkesKernel(1.0, 0.0, 1.0), single, 0, 2.0, 1.5, vec({1.0}), 50.0, 10000,
                                         Seed(31), 4);
    std::mt19937_64 rng(4242);
    std::exponential_distribution<double> gap(1.0);
    int ruined = 0;
    const int n = 10000;
    for (int r = 0; r < n; ++r) {
        double t = 0.0;
        int claims = 0;
        while (true) {
            t += gap(rng);
            if (t > 50.0) break;
            ++claims;
            if (2.0 + 1.5 * t - claims < 0.0) {
                ++ruined;
                break;
            }
        }
    }
    const double p_brute = double(ruined) / n;
    const double se = std::sqrt(est.p * (1 - est.p) / n + p_brute * (1 - p_brute) / n);
    EXPECT_LT(std::abs(est.p - p_brute), 2.0 * se) << est.p << " vs " << p_brute;
}

TEST(RiskProcess, JobsDoNotChangeEstimate) {
    const Vector claims = vec({1.0, 2.0});
    const auto a = ruin_probability_mc(kKernel, kSticky, 0, 2.0, 3.0, claims, 20.0, 500, 9, 1);
    const auto b = ruin_probability_mc(kKernel, kSticky, 0, 2.0, 3.0, claims, 20.0, 500, 9, 4);
    EXPECT_EQ(a.p, b.p);
}

TEST(GeometricPath, Examples) {
    const auto path = simulate_swish(kKernel, kSticky, 0, 5.0, 16);
    for (double v : geometric_compound_path(path, vec({0, 0}), 3.0).values) EXPECT_EQ(v, 3.0);

    const auto doubling = geometric_compound_path(path, vec({1, 1}), 1.5);
    for (std::size_t i = 0; i < doubling.size(); ++i)
        EXPECT_EQ(doubling.values[i], 1.5 * std::ldexp(1.0, int(path.events.count_until(doubling.times[i])) + 1));

    const Vector c = vec({0.05, -0.3});
    const auto geo = geometric_compound_path(path, c, 2.0);
    const auto logs = compound_path(path, c.array().log1p().matrix(), std::log(2.0), true);
    for (std::size_t i = 0; i < geo.size(); ++i) EXPECT_NEAR(std::log(geo.values[i]), logs.values[i], 1e-12);

    EXPECT_EQ(geometric_compound_path(path, vec({1, 1}), 1.0, false).values.front(), 1.0);
}

TEST(GeometricPath, RejectsInvalidInput) {
    const auto path = simulate_swish(kKernel, kSticky, 0, 5.0, 16);
    EXPECT_EQ(code_of([&] { geometric_compound_path(path, vec({0.1, -1.0}), 1.0); }), Errc::InvalidMark);
    EXPECT_EQ(code_of([&] { geometric_compound_path(path, vec({0.1, -1.5}), 1.0); }), Errc::InvalidMark);
    EXPECT_EQ(code_of([&] { geometric_compound_path(path, vec({0.1, 0.1}), 0.0); }), Errc::NonPositiveParameter);
}

TEST(SwitchedDiffusion, DeterministicReductions) {
    const auto path = simulate_swish(kKernel, kSticky, 0, 5.0, 17);
    const auto flat = switched_diffusion_path(path, {vec({0, 0}), vec({0, 0})}, vec({0, 0}), 1.25, 0.01, 3);
    for (double v : flat.values) EXPECT_EQ(v, 1.25);

    const AffineRateFamily drift{vec({1.0, -0.5}), vec({-0.4, 0.2})};
    for (double dt : {1e-2, 1e-3}) {
        const auto euler = switched_diffusion_path(path, drift, vec({0, 0}), 0.5, dt, 3);
        const auto exact = impulse_traffic_path(path, drift, vec({0, 0}), 0.5, dt);
        ASSERT_EQ(euler.size(), exact.size());
        double err = 0.0;
        for (std::size_t i = 0; i < euler.size(); ++i) err = std::max(err, std::abs(euler.values[i] - exact.values[i]));
        EXPECT_LT(err, 5.0 * dt);
    }
}

TEST(SwitchedDiffusion, WienerVariance) {
    const auto single = validate_chain(Matrix::Ones(1, 1).eval());
    std::vector<double> ends;
    for (std::uint64_t r = 0; r < 10000; ++r) {
        const auto path = simulate_swish(kKernel, single, 0, 1.0, Seed(r));
        const auto tr = switched_diffusion_path(path, {vec({0}), vec({0})}, vec({1}), 0.0, 0.05, Seed(r).child(2));
        ends.push_back(tr.values.back());
    }
    EXPECT_NEAR(stats::summarize(ends).variance, 1.0, 0.05);
}
