#include "kolmo/test_functions.hpp"

#include <cmath>

namespace kolmo {

Jet TestFunction::jet(const Vec& x) const {
  require(smooth, "test function '" + name + "' has no usable jet");
  Jet j;
  j.value = value(x);
  j.gradient = gradient(x);
  j.hessian = hessian(x);
  return j;
}

namespace {

// Radial helper: f(x) = g(|x|) with g'(0) = 0.
// grad = g'(r) x/r, hess = g''(r) xx^T/r^2 + g'(r)/r (I - xx^T/r^2).
TestFunction radial(std::string name, double sup,
                    std::function<double(double)> g,
                    std::function<double(double)> dg,
                    std::function<double(double)> ddg, int dim) {
  TestFunction f;
  f.name = std::move(name);
  f.sup_norm = sup;
  f.value = [g](const Vec& x) { return g(x.norm()); };
  f.gradient = [dg, ddg, dim](const Vec& x) -> Vec {
    const double r = x.norm();
    if (r < 1e-10) return Vec::Zero(dim);
    return (dg(r) / r) * x;
  };
  f.hessian = [dg, ddg, dim](const Vec& x) -> Mat {
    const double r = x.norm();
    if (r < 1e-10) return ddg(0.0) * Mat::Identity(dim, dim);
    const Mat P = (x * x.transpose()) / (r * r);
    return ddg(r) * P + (dg(r) / r) * (Mat::Identity(dim, dim) - P);
  };
  return f;
}

}  // namespace

TestFunction clipped_coordinate(int dim, double clip) {
  TestFunction f;
  f.name = "clip-x";
  f.sup_norm = clip;
  f.smooth = false;  // kinks at |x_1| = clip
  f.value = [clip](const Vec& x) { return std::clamp(x[0], -clip, clip); };
  f.gradient = [clip, dim](const Vec& x) -> Vec {
    Vec g = Vec::Zero(dim);
    g[0] = std::abs(x[0]) < clip ? 1.0 : 0.0;
    return g;
  };
  f.hessian = [dim](const Vec&) { return Mat::Zero(dim, dim); };
  return f;
}

TestFunction tanh_bump(int dim) {
  auto g = [](double r) { return 0.5 * (std::tanh(r + 1.0) - std::tanh(r - 1.0)); };
  auto sech2 = [](double u) {
    const double c = std::cosh(u);
    return 1.0 / (c * c);
  };
  auto dg = [sech2](double r) {
    return 0.5 * (sech2(r + 1.0) - sech2(r - 1.0));
  };
  auto ddg = [sech2](double r) {
    return -(std::tanh(r + 1.0) * sech2(r + 1.0) -
             std::tanh(r - 1.0) * sech2(r - 1.0));
  };
  return radial("tanh-bump", std::tanh(1.0), g, dg, ddg, dim);
}

TestFunction gaussian_bump(int dim) {
  auto g = [](double r) { return std::exp(-0.5 * r * r); };
  auto dg = [g](double r) { return -r * g(r); };
  auto ddg = [g](double r) { return (r * r - 1.0) * g(r); };
  return radial("gauss-bump", 1.0, g, dg, ddg, dim);
}

TestFunction mollified_indicator(int dim, double radius, double scale) {
  auto g = [radius, scale](double r) {
    return 0.5 * (1.0 - std::tanh((r - radius) / scale));
  };
  auto sech2 = [](double u) {
    const double c = std::cosh(u);
    return 1.0 / (c * c);
  };
  auto dg = [radius, scale, sech2](double r) {
    return -0.5 / scale * sech2((r - radius) / scale);
  };
  auto ddg = [radius, scale, sech2](double r) {
    const double z = (r - radius) / scale;
    return std::tanh(z) * sech2(z) / (scale * scale);
  };
  return radial("moll-ind", 1.0, g, dg, ddg, dim);
}

TestFunction tanh_sigmoid(int dim, double steepness) {
  TestFunction f;
  f.name = "tanh-" + std::to_string(static_cast<int>(steepness)) + "x";
  f.sup_norm = 1.0;
  const double k = steepness;
  f.value = [k](const Vec& x) { return std::tanh(k * x[0]); };
  f.gradient = [k, dim](const Vec& x) -> Vec {
    Vec g = Vec::Zero(dim);
    const double c = std::cosh(k * x[0]);
    g[0] = k / (c * c);
    return g;
  };
  f.hessian = [k, dim](const Vec& x) -> Mat {
    Mat h = Mat::Zero(dim, dim);
    const double t = std::tanh(k * x[0]);
    const double c = std::cosh(k * x[0]);
    h(0, 0) = -2.0 * k * k * t / (c * c);
    return h;
  };
  return f;
}

std::vector<TestFunction> test_battery(int dim) {
  return {clipped_coordinate(dim), tanh_bump(dim), gaussian_bump(dim),
          mollified_indicator(dim)};
}

TestFunction battery_function(const std::string& name, int dim) {
  for (auto& f : test_battery(dim))
    if (f.name == name) return f;
  if (name == "tanh-5x") return tanh_sigmoid(dim, 5.0);
  if (name == "tanh-50x") return tanh_sigmoid(dim, 50.0);
  throw ConfigError("unknown test function '" + name + "'");
}

}  // namespace kolmo
