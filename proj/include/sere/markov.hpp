#pragma once

#include "sere/error.hpp"
#include "sere/seed.hpp"
#include "sere/types.hpp"

#include <cmath>
#include <numeric>
#include <queue>
#include <vector>

namespace sere {

/// Finite-state Markov chain with row-stochastic transition matrix.
template <typename Scalar = double>
class FiniteMarkovChain {
public:
    FiniteMarkovChain(Mat<Scalar> transition, bool irreducible, bool aperiodic)
        : transition_(std::move(transition)), irreducible_(irreducible), aperiodic_(aperiodic) {}

    Eigen::Index n_states() const { return transition_.rows(); }
    const Mat<Scalar>& transition() const { return transition_; }

    bool irreducible() const { return irreducible_; }
    bool aperiodic() const { return aperiodic_; }
    /// Irreducible and aperiodic.
    bool ergodic() const { return irreducible_ && aperiodic_; }

    /// A unique stationary law and an invertible I - P + Pi need only
    /// irreducibility; periodic chains are accepted.
    void require_irreducible(const char* op) const {
        if (!irreducible_) throw Error(Errc::NotErgodic, std::string(op) + " requires an irreducible chain");
    }

private:
    Mat<Scalar> transition_;
    bool irreducible_;
    bool aperiodic_;
};

namespace detail {

struct SupportGraph {
    bool irreducible = false;
    bool aperiodic = false;
};

// Strong connectivity and period of the support graph of P.
template <typename Scalar>
SupportGraph classify_support_graph(const Mat<Scalar>& p) {
    const Eigen::Index n = p.rows();
    auto bfs = [&](bool forward) {
        std::vector<long> level(n, -1);
        std::queue<Eigen::Index> q;
        level[0] = 0;
        q.push(0);
        while (!q.empty()) {
            const auto u = q.front();
            q.pop();
            for (Eigen::Index v = 0; v < n; ++v) {
                const Scalar w = forward ? p(u, v) : p(v, u);
                if (w > Scalar(0) && level[v] < 0) {
                    level[v] = level[u] + 1;
                    q.push(v);
                }
            }
        }
        return level;
    };
    const auto level = bfs(true);
    const auto back = bfs(false);
    for (Eigen::Index i = 0; i < n; ++i)
        if (level[i] < 0 || back[i] < 0) return {};

    // The period divides level(u) + 1 - level(v) for every edge u -> v.
    long period = 0;
    for (Eigen::Index u = 0; u < n; ++u)
        for (Eigen::Index v = 0; v < n; ++v)
            if (p(u, v) > Scalar(0)) period = std::gcd(period, std::labs(level[u] + 1 - level[v]));
    return {true, period == 1};
}

}  // namespace detail

template <typename Scalar>
FiniteMarkovChain<Scalar> validate_chain(const Mat<Scalar>& transition) {
    using std::abs;
    if (transition.rows() < 1 || transition.rows() != transition.cols())
        throw Error(Errc::NotStochastic, "transition matrix must be square with at least one state");
    for (Eigen::Index i = 0; i < transition.rows(); ++i) {
        for (Eigen::Index j = 0; j < transition.cols(); ++j) {
            const Scalar p = transition(i, j);
            if (!(p >= Scalar(0) && p <= Scalar(1)))
                throw Error(Errc::NotStochastic, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                                     ") outside [0, 1]");
        }
        if (abs(transition.row(i).sum() - Scalar(1)) > Scalar(1e-12))
            throw Error(Errc::NotStochastic, "row " + std::to_string(i) + " does not sum to 1");
    }
    const auto graph = detail::classify_support_graph(transition);
    return FiniteMarkovChain<Scalar>(transition, graph.irreducible, graph.aperiodic);
}

inline FiniteMarkovChain<double> validate_chain(const Matrix& transition) {
    return validate_chain<double>(transition);
}

/// Stationary law rho with rho P = rho, from the linear system
/// (P^T - I) rho = 0 with one equation replaced by sum(rho) = 1.
template <typename Scalar>
Vec<Scalar> stationary_distribution(const FiniteMarkovChain<Scalar>& chain) {
    chain.require_irreducible("stationary_distribution");
    const Eigen::Index n = chain.n_states();
    Mat<Scalar> a = chain.transition().transpose() - Mat<Scalar>::Identity(n, n);
    a.row(n - 1).setOnes();
    Vec<Scalar> rhs = Vec<Scalar>::Zero(n);
    rhs(n - 1) = Scalar(1);
    Vec<Scalar> rho = a.fullPivLu().solve(rhs);
    for (Eigen::Index i = 0; i < n; ++i)
        if (rho(i) < Scalar(0)) rho(i) = Scalar(0);  // round-off only
    return rho / rho.sum();
}

/// Rank-one projector Pi with every row equal to rho.
template <typename Scalar>
Mat<Scalar> stationary_projector(const Vec<Scalar>& rho) {
    return Vec<Scalar>::Ones(rho.size()) * rho.transpose();
}

/// Fundamental matrix R0 = (I - P + Pi)^{-1}. Satisfies R0 (I - P) = I - Pi.
template <typename Scalar>
Mat<Scalar> potential_matrix(const FiniteMarkovChain<Scalar>& chain, const Vec<Scalar>& rho) {
    chain.require_irreducible("potential_matrix");
    const Eigen::Index n = chain.n_states();
    const Mat<Scalar> a = Mat<Scalar>::Identity(n, n) - chain.transition() + stationary_projector(rho);
    const auto lu = a.fullPivLu();
    if (!lu.isInvertible()) throw Error(Errc::SingularSystem, "I - P + Pi is singular");
    return lu.inverse();
}

template <typename Scalar>
Mat<Scalar> potential_matrix(const FiniteMarkovChain<Scalar>& chain) {
    return potential_matrix(chain, stationary_distribution(chain));
}

/// Asymptotic variance of n^{-1/2} sum_{k<=n} (a(x_k) - rho[a]):
///   rho[ abar (2 R0 - I - Pi) abar ].
template <typename Scalar>
Scalar chain_step_variance(const FiniteMarkovChain<Scalar>& chain, const Vec<Scalar>& marks) {
    const Vec<Scalar> rho = stationary_distribution(chain);
    const Mat<Scalar> r0 = potential_matrix(chain, rho);
    const Eigen::Index n = chain.n_states();
    const Vec<Scalar> centered = marks.array() - rho.dot(marks);
    const Mat<Scalar> kernel = Scalar(2) * r0 - Mat<Scalar>::Identity(n, n) - stationary_projector(rho);
    const Scalar var = rho.dot((centered.array() * (kernel * centered).array()).matrix());
    const Scalar scale = rho.dot(centered.cwiseAbs2()) + Scalar(1);
    return var < Scalar(0) && -var < Scalar(64) * Eigen::NumTraits<Scalar>::epsilon() * scale ? Scalar(0) : var;
}

/// States x_0 = x0, x_1, ..., x_{n-1}.
std::vector<State> simulate_chain(const FiniteMarkovChain<double>& chain, State x0, std::size_t n, const Seed& seed);

/// Samples chain transitions one at a time using per-row cumulative tables.
class ChainSampler {
public:
    ChainSampler(const FiniteMarkovChain<double>& chain, State x0, const Seed& seed);

    State current() const { return state_; }
    State step();

private:
    std::vector<std::vector<double>> cumulative_;
    Engine rng_;
    State state_;
};

}  // namespace sere
