#include "sere/markov.hpp"

#include <algorithm>

namespace sere {

ChainSampler::ChainSampler(const FiniteMarkovChain<double>& chain, State x0, const Seed& seed)
    : rng_(make_engine(seed)), state_(x0) {
    const auto n = static_cast<std::size_t>(chain.n_states());
    if (x0 >= n) throw Error(Errc::InvalidState, "initial state " + std::to_string(x0) + " out of range");
    cumulative_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            acc += chain.transition()(Eigen::Index(i), Eigen::Index(j));
            cumulative_[i].push_back(acc);
        }
        cumulative_[i].back() = 1.0;
    }
}

State ChainSampler::step() {
    const auto& row = cumulative_[state_];
    const double u = uniform_open(rng_);
    auto it = std::upper_bound(row.begin(), row.end(), u);
    // upper_bound never lands on a zero-probability state.
    state_ = static_cast<State>(std::min<std::ptrdiff_t>(it - row.begin(), std::ssize(row) - 1));
    return state_;
}

std::vector<State> simulate_chain(const FiniteMarkovChain<double>& chain, State x0, std::size_t n, const Seed& seed) {
    ChainSampler sampler(chain, x0, seed);
    std::vector<State> states;
    states.reserve(n);
    if (n == 0) return states;
    states.push_back(x0);
    while (states.size() < n) states.push_back(sampler.step());
    return states;
}

}  // namespace sere
