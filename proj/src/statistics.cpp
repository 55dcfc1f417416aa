#include "sere/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sere::stats {

double Summary::std_err() const { return n > 1 ? std::sqrt(variance / static_cast<double>(n)) : 0.0; }

Summary summarize(std::span<const double> xs) {
    Summary s;
    s.n = xs.size();
    if (xs.empty()) return s;
    double sum = 0.0;
    s.min = xs.front();
    s.max = xs.front();
    for (double x : xs) {
        sum += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    const double n = static_cast<double>(s.n);
    s.mean = sum / n;
    if (s.n < 2) return s;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double x : xs) {
        const double d = (x - s.mean) * (x - s.mean);
        m2 += d;
        m4 += d * d;
    }
    s.variance = m2 / (n - 1.0);
    const double mu2 = m2 / n;
    const double mu4 = m4 / n;
    s.variance_std_err = std::sqrt(std::max(0.0, mu4 - mu2 * mu2) / n);
    return s;
}

double kolmogorov_survival(double x) {
    if (x < 0.2) return 1.0;  // series is numerically 1 there
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> xs, const std::function<double(double)>& cdf) {
    KsResult r;
    if (xs.empty()) return r;
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    r.statistic = d;
    const double root = std::sqrt(n);
    r.p_value = kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
    return r;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double exponential_cdf(double x, double rate) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); }

}  // namespace sere::stats
