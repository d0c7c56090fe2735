#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace kolmo::stats {

struct MeanSe {
  double value = 0.0;
  double se = 0.0;
};

double mean(std::span<const double> v);
double variance(std::span<const double> v);  // unbiased, 0 for n < 2
MeanSe mean_se(std::span<const double> v);

/// q-quantile of a sample (linear interpolation between order statistics).
double quantile(std::vector<double> v, double q);

/// Bootstrap standard error of an arbitrary statistic of one sample.
/// Replicates draw their indices from the (seed, Bootstrap-purpose) streams,
/// so the result is independent of thread count.
double bootstrap_se(std::span<const double> data,
                    const std::function<double(std::span<const double>)>& stat,
                    int replicates, uint64_t seed, uint64_t series_id);

/// Paired bootstrap: resamples row indices shared by both columns. Use when
/// the two samples are slices of the same particle flow.
double paired_bootstrap_se(
    std::span<const double> a, std::span<const double> b,
    const std::function<double(std::span<const double>, std::span<const double>)>& stat,
    int replicates, uint64_t seed, uint64_t series_id);

/// Kolmogorov-Smirnov distance between the empirical law of `sample` and the
/// continuous CDF `cdf`.
double ks_distance(std::vector<double> sample,
                   const std::function<double(double)>& cdf);

/// Exact 1-d Wasserstein-1 distance between two empirical measures with
/// uniform weights (sample sizes may differ).
double wasserstein1(std::vector<double> a, std::vector<double> b);

/// Sliced Wasserstein-1 for d >= 2: average of 1-d distances over random
/// unit-vector projections.
double sliced_wasserstein1(std::span<const double> a, std::span<const double> b,
                           int dim, int projections, uint64_t seed);

double silverman_bandwidth(std::span<const double> x);

double normal_pdf(double x, double mean = 0.0, double sd = 1.0);
double normal_cdf(double x, double mean = 0.0, double sd = 1.0);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit linear_fit(std::span<const double> x, std::span<const double> y);
/// Least-squares slope of log(y) against log(x).
LineFit loglog_fit(std::span<const double> x, std::span<const double> y);

/// Adaptive Simpson quadrature on [a,b] to absolute tolerance tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12);

}  // namespace kolmo::stats
