#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sere::stats {

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double min = 0.0;
    double max = 0.0;

    double std_err() const;
    /// Standard error of the sample variance, from the fourth central moment.
    double variance_std_err = 0.0;
};

/// Two-pass summary in input order; identical inputs give identical bits.
Summary summarize(std::span<const double> xs);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Asymptotic Kolmogorov survival function Q(x) = 2 sum (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_survival(double x);

/// One-sample Kolmogorov-Smirnov test against a continuous CDF, with
/// Stephens' small-sample correction of the asymptotic p-value.
KsResult ks_test(std::vector<double> xs, const std::function<double(double)>& cdf);

double normal_cdf(double x);
double exponential_cdf(double x, double rate);

}  // namespace sere::stats
