#include "hmc/stats.hpp"

#include <cmath>
#include <numbers>

#include "hmc/errors.hpp"
#include "hmc/rng.hpp"

namespace hmc::stats {

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
}  // namespace

double normal_pdf(double x) {
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");

    // Acklam's rational approximation, then Halley refinement.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    for (int i = 0; i < 2; ++i) {
        double e = normal_cdf(x) - p;
        double u = e / normal_pdf(x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double mean(std::span<const double> x) {
    if (x.empty()) throw ContractViolation("mean: empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
    if (x.size() < 2) throw ContractViolation("sample_variance: need at least 2 points");
    double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

std::array<double, 4> k_statistics(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    if (x.size() < 4) throw ContractViolation("k_statistics: need at least 4 points");
    double m = mean(x);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        double d = v - m;
        double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    double k1 = m;
    double k2 = n / (n - 1.0) * m2;
    double k3 = n * n / ((n - 1.0) * (n - 2.0)) * m3;
    double k4 = n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2) /
                ((n - 1.0) * (n - 2.0) * (n - 3.0));
    return {k1, k2, k3, k4};
}

SlopeFit fit_line(std::span<const double> x, std::span<const double> y,
                  std::span<const double> sigma) {
    if (x.size() != y.size() || x.size() < 2)
        throw ContractViolation("fit_line: need matching x/y with at least 2 points");
    if (!sigma.empty() && sigma.size() != x.size())
        throw ContractViolation("fit_line: sigma length mismatch");

    const double n = static_cast<double>(x.size());
    double xbar = mean(x), ybar = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxy += (x[i] - xbar) * (y[i] - ybar);
    }
    if (sxx == 0.0) throw ContractViolation("fit_line: degenerate x grid");

    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;

    double rss = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (fit.intercept + fit.slope * x[i]);
        rss += r * r;
    }
    fit.residual_rms = std::sqrt(rss / n);

    if (!sigma.empty()) {
        double var = 0.0;
        for (size_t i = 0; i < x.size(); ++i) {
            double c = (x[i] - xbar) / sxx;
            var += c * c * sigma[i] * sigma[i];
        }
        fit.slope_se = std::sqrt(var);
    } else if (x.size() > 2) {
        fit.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
    }
    return fit;
}

InterceptFit fit_intercept(std::span<const double> x, std::span<const double> y, double slope) {
    if (x.size() != y.size() || x.empty())
        throw ContractViolation("fit_intercept: need matching nonempty x/y");
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += y[i] - slope * x[i];
    InterceptFit fit;
    fit.intercept = s / static_cast<double>(x.size());
    double rss = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (fit.intercept + slope * x[i]);
        rss += r * r;
    }
    fit.residual_rms = std::sqrt(rss / static_cast<double>(x.size()));
    return fit;
}

double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          double tol) {
    if (!(lo < hi)) throw ContractViolation("golden_section_min: lo must be < hi");
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

double bootstrap_se(std::span<const double> x, int n_resamples, std::uint64_t seed,
                    const std::function<double(std::span<const double>)>& statistic) {
    if (x.size() < 2 || n_resamples < 2)
        throw ContractViolation("bootstrap_se: need data and at least 2 resamples");
    std::vector<double> stats(static_cast<size_t>(n_resamples));
    std::vector<double> resample(x.size());
    for (int r = 0; r < n_resamples; ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        for (size_t i = 0; i < x.size(); ++i) resample[i] = x[rng.integer(x.size())];
        stats[static_cast<size_t>(r)] = statistic(resample);
    }
    return std::sqrt(sample_variance(stats));
}

}  // namespace hmc::stats
