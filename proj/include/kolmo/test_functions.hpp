#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kolmo/common.hpp"

namespace kolmo {

/// A bounded continuous test function with optional analytic jet.
struct TestFunction {
  std::string name;
  double sup_norm = 1.0;
  bool smooth = true;  // has usable gradient/Hessian everywhere
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;

  Jet jet(const Vec& x) const;
};

/// The fixed battery: clipped coordinate, tanh bump, Gaussian bump and an
/// indicator of the unit ball mollified at scale 0.1.
std::vector<TestFunction> test_battery(int dim);
TestFunction battery_function(const std::string& name, int dim);

TestFunction clipped_coordinate(int dim, double clip = 2.0);
TestFunction tanh_bump(int dim);
TestFunction gaussian_bump(int dim);
TestFunction mollified_indicator(int dim, double radius = 1.0,
                                 double scale = 0.1);
/// tanh(k x_1); the steep sigmoid used by the gradient probes.
TestFunction tanh_sigmoid(int dim, double steepness);

}  // namespace kolmo
