#pragma once

#include "sere/error.hpp"
#include "sere/types.hpp"

#include <array>
#include <cmath>

namespace sere {

namespace detail {

template <typename Scalar, std::size_t N>
Mat<Scalar> pade_approximant(const Mat<Scalar>& a, const std::array<double, N>& b) {
    // Odd/even split: U = A * sum b_{2j+1} A^{2j}, V = sum b_{2j} A^{2j}.
    const Eigen::Index n = a.rows();
    const Mat<Scalar> ident = Mat<Scalar>::Identity(n, n);
    const Mat<Scalar> a2 = a * a;
    Mat<Scalar> u = Mat<Scalar>::Zero(n, n);
    Mat<Scalar> v = Mat<Scalar>::Zero(n, n);
    Mat<Scalar> power = ident;
    for (std::size_t j = 0; 2 * j < N; ++j) {
        v += Scalar(b[2 * j]) * power;
        if (2 * j + 1 < N) u += Scalar(b[2 * j + 1]) * power;
        power = power * a2;
    }
    u = a * u;
    return (v - u).partialPivLu().solve(v + u);
}

template <typename Scalar>
Mat<Scalar> pade13(const Mat<Scalar>& a) {
    static constexpr std::array<double, 14> b = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0, 129060195264000.0,
        10559470521600.0,    670442572800.0,      33522128640.0,      1323241920.0,       40840800.0,
        960960.0,            16380.0,             182.0,              1.0};
    const Eigen::Index n = a.rows();
    const Mat<Scalar> ident = Mat<Scalar>::Identity(n, n);
    const Mat<Scalar> a2 = a * a;
    const Mat<Scalar> a4 = a2 * a2;
    const Mat<Scalar> a6 = a4 * a2;
    const Mat<Scalar> u = a * (a6 * (Scalar(b[13]) * a6 + Scalar(b[11]) * a4 + Scalar(b[9]) * a2) +
                               Scalar(b[7]) * a6 + Scalar(b[5]) * a4 + Scalar(b[3]) * a2 + Scalar(b[1]) * ident);
    const Mat<Scalar> v = a6 * (Scalar(b[12]) * a6 + Scalar(b[10]) * a4 + Scalar(b[8]) * a2) + Scalar(b[6]) * a6 +
                          Scalar(b[4]) * a4 + Scalar(b[2]) * a2 + Scalar(b[0]) * ident;
    return (v - u).partialPivLu().solve(v + u);
}

}  // namespace detail

/// e^{tM} by scaling and squaring around diagonal Pade approximants of
/// degree 3, 5, 7, 9 or 13, selected from the 1-norm of tM.
template <typename Derived>
Mat<typename Derived::Scalar> matrix_exponential(const Eigen::MatrixBase<Derived>& m,
                                                 typename Derived::Scalar t = 1) {
    using Scalar = typename Derived::Scalar;
    using std::ceil;
    using std::frexp;
    using std::isfinite;
    using std::ldexp;
    using std::log2;

    Mat<Scalar> a = t * m;
    const Eigen::Index n = a.rows();
    if (n == 0) return a;
    const Scalar norm = a.cwiseAbs().colwise().sum().maxCoeff();
    if (!a.allFinite() || !isfinite(static_cast<double>(norm))) throw Error(Errc::Overflow, "matrix exponential of non-finite matrix");
    if (norm == Scalar(0)) return Mat<Scalar>::Identity(n, n);

    static constexpr std::array<double, 4> theta = {1.495585217958292e-2, 2.539398330063230e-1,
                                                    9.504178996162932e-1, 2.097847961257068e0};
    if (norm <= Scalar(theta[0]))
        return detail::pade_approximant<Scalar>(a, std::array<double, 4>{120.0, 60.0, 12.0, 1.0});
    if (norm <= Scalar(theta[1]))
        return detail::pade_approximant<Scalar>(a, std::array<double, 6>{30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0});
    if (norm <= Scalar(theta[2]))
        return detail::pade_approximant<Scalar>(
            a, std::array<double, 8>{17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0});
    if (norm <= Scalar(theta[3]))
        return detail::pade_approximant<Scalar>(
            a, std::array<double, 10>{17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                                      2162160.0, 110880.0, 3960.0, 90.0, 1.0});

    constexpr double theta13 = 5.371920351148152;
    const int squarings = std::max(0, static_cast<int>(ceil(log2(static_cast<double>(norm) / theta13))));
    a = a * Scalar(ldexp(1.0, -squarings));
    Mat<Scalar> r = detail::pade13<Scalar>(a);
    for (int i = 0; i < squarings; ++i) r = r * r;
    if (!r.allFinite()) throw Error(Errc::Overflow, "matrix exponential overflowed");
    return r;
}

}  // namespace sere
