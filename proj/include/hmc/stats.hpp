#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace hmc::stats {

struct MeanSe {
    double value = 0.0;
    double se = 0.0;
};

double normal_pdf(double x);
double normal_cdf(double x);

// Inverse of normal_cdf on (0, 1).  Rational initial guess polished with two
// Halley steps; accurate to full double precision over the open interval.
double normal_quantile(double p);

double mean(std::span<const double> x);
double sample_variance(std::span<const double> x);  // ddof = 1

// Unbiased k-statistics for the first four cumulants.
std::array<double, 4> k_statistics(std::span<const double> x);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double residual_rms = 0.0;
};

// Ordinary least squares of y on x.  When sigma is nonempty it must match x in
// length; the slope SE is then propagated from the per-point errors instead of
// being estimated from the residuals.
SlopeFit fit_line(std::span<const double> x, std::span<const double> y,
                  std::span<const double> sigma = {});

struct InterceptFit {
    double intercept = 0.0;
    double residual_rms = 0.0;
};

// Fit y = intercept + slope * x with the slope held fixed.
InterceptFit fit_intercept(std::span<const double> x, std::span<const double> y, double slope);

// Minimum of a unimodal function on [lo, hi] to within tol.
double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          double tol);

// Bootstrap standard error of an arbitrary statistic of one sample.
double bootstrap_se(std::span<const double> x, int n_resamples, std::uint64_t seed,
                    const std::function<double(std::span<const double>)>& statistic);

}  // namespace hmc::stats
