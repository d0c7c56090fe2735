#include "kolmo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "kolmo/common.hpp"
#include "kolmo/rng.hpp"

namespace kolmo::stats {

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
  const size_t n = v.size();
  if (n < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(n - 1);
}

MeanSe mean_se(std::span<const double> v) {
  MeanSe r;
  r.value = mean(v);
  r.se = v.empty() ? 0.0 : std::sqrt(variance(v) / static_cast<double>(v.size()));
  return r;
}

double quantile(std::vector<double> v, double q) {
  require(!v.empty(), "quantile: empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, v.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * v[lo] + w * v[hi];
}

double bootstrap_se(std::span<const double> data,
                    const std::function<double(std::span<const double>)>& stat,
                    int replicates, uint64_t seed, uint64_t series_id) {
  const size_t n = data.size();
  if (n < 2 || replicates < 2) return 0.0;
  std::vector<double> reps(replicates);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < replicates; ++r) {
    const uint64_t stream =
        rng::stream_id(rng::Purpose::Bootstrap, series_id * 0x10000u + r);
    std::vector<double> sample(n);
    for (size_t i = 0; i < n; ++i)
      sample[i] = data[rng::uniform_index(seed, stream, i, n)];
    reps[r] = stat(sample);
  }
  return std::sqrt(variance(reps));
}

double paired_bootstrap_se(
    std::span<const double> a, std::span<const double> b,
    const std::function<double(std::span<const double>, std::span<const double>)>&
        stat,
    int replicates, uint64_t seed, uint64_t series_id) {
  require(a.size() == b.size(), "paired_bootstrap_se: size mismatch");
  const size_t n = a.size();
  if (n < 2 || replicates < 2) return 0.0;
  std::vector<double> reps(replicates);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < replicates; ++r) {
    const uint64_t stream =
        rng::stream_id(rng::Purpose::Bootstrap, series_id * 0x10000u + r);
    std::vector<double> sa(n), sb(n);
    for (size_t i = 0; i < n; ++i) {
      const uint64_t j = rng::uniform_index(seed, stream, i, n);
      sa[i] = a[j];
      sb[i] = b[j];
    }
    reps[r] = stat(sa, sb);
  }
  return std::sqrt(variance(reps));
}

double ks_distance(std::vector<double> sample,
                   const std::function<double(double)>& cdf) {
  require(!sample.empty(), "ks_distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (size_t i = 0; i < sample.size(); ++i) {
    const double F = cdf(sample[i]);
    d = std::max(d, F - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - F);
  }
  return d;
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), "wasserstein1: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a.size() == b.size()) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s / static_cast<double>(a.size());
  }
  // General case: integral of |F_a - F_b| over the merged support.
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  size_t ia = 0, ib = 0;
  double w = 0.0, prev = std::min(a[0], b[0]);
  while (ia < a.size() || ib < b.size()) {
    const double Fa = static_cast<double>(ia) / na;
    const double Fb = static_cast<double>(ib) / nb;
    const double xa = ia < a.size() ? a[ia] : std::numeric_limits<double>::infinity();
    const double xb = ib < b.size() ? b[ib] : std::numeric_limits<double>::infinity();
    const double x = std::min(xa, xb);
    w += std::abs(Fa - Fb) * (x - prev);
    prev = x;
    if (xa <= xb) ++ia;
    else ++ib;
  }
  return w;
}

double sliced_wasserstein1(std::span<const double> a, std::span<const double> b,
                           int dim, int projections, uint64_t seed) {
  require(dim >= 1, "sliced_wasserstein1: dim >= 1");
  require(a.size() % dim == 0 && b.size() % dim == 0,
          "sliced_wasserstein1: ragged positions");
  const size_t na = a.size() / dim, nb = b.size() / dim;
  if (dim == 1)
    return wasserstein1(std::vector<double>(a.begin(), a.end()),
                        std::vector<double>(b.begin(), b.end()));
  double acc = 0.0;
  for (int p = 0; p < projections; ++p) {
    const uint64_t stream = rng::stream_id(rng::Purpose::Projection, p);
    Vec u(dim);
    for (int k = 0; k < dim; k += 2) {
      double z0, z1;
      rng::normal_pair(seed, stream, k, z0, z1);
      u[k] = z0;
      if (k + 1 < dim) u[k + 1] = z1;
    }
    u.normalize();
    std::vector<double> pa(na), pb(nb);
    for (size_t i = 0; i < na; ++i) {
      double s = 0.0;
      for (int k = 0; k < dim; ++k) s += u[k] * a[i * dim + k];
      pa[i] = s;
    }
    for (size_t i = 0; i < nb; ++i) {
      double s = 0.0;
      for (int k = 0; k < dim; ++k) s += u[k] * b[i * dim + k];
      pb[i] = s;
    }
    acc += wasserstein1(std::move(pa), std::move(pb));
  }
  return acc / projections;
}

double silverman_bandwidth(std::span<const double> x) {
  require(x.size() >= 2, "silverman_bandwidth: need >= 2 points");
  const double sd = std::sqrt(variance(x));
  std::vector<double> v(x.begin(), x.end());
  const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
  double scale = sd;
  if (iqr > 0.0) scale = std::min(sd, iqr / 1.349);
  if (scale <= 0.0) scale = sd > 0.0 ? sd : 1.0;
  return 0.9 * scale * std::pow(static_cast<double>(x.size()), -0.2);
}

double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
}

double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

LineFit linear_fit(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "linear_fit: need >= 2 points");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

LineFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, "loglog_fit: nonpositive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return linear_fit(lx, ly);
}

namespace {
double simpson(const std::function<double(double)>& f, double a, double fa,
               double b, double fb, double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa,
                double b, double fb, double m, double fm, double whole,
                double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, fa, m, fm, lm, flm);
  const double right = simpson(f, m, fm, b, fb, rm, frm);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive(f, a, fa, m, fm, lm, flm, left, tol * 0.5, depth - 1) +
         adaptive(f, m, fm, b, fb, rm, frm, right, tol * 0.5, depth - 1);
}
}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  return adaptive(f, a, fa, b, fb, m, fm, simpson(f, a, fa, b, fb, m, fm), tol,
                  48);
}

}  // namespace kolmo::stats
