#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace sere {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = Mat<double>;
using Vector = Vec<double>;

/// Index into the finite phase space of a Markov chain.
using State = std::size_t;

/// A piecewise trajectory sampled on an increasing time grid. Values at jump
/// times are right limits.
struct Trajectory {
    std::vector<double> times;
    std::vector<double> values;

    void push(double t, double v) {
        times.push_back(t);
        values.push_back(v);
    }
    std::size_t size() const { return times.size(); }
};

}  // namespace sere
