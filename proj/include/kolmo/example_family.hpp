#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kolmo/coefficient_model.hpp"
#include "kolmo/common.hpp"

namespace kolmo {

/// Bounded positive-ish time profiles b0(t) used by the model families.
/// Evaluation clamps t to [0, inf); integral() is exact (closed form).
struct TimeProfile {
  enum class Kind { Constant, Sin, ExpDecay, Linear };
  Kind kind = Kind::Constant;
  double p0 = 1.0;
  double p1 = 0.0;

  static TimeProfile constant(double c) { return {Kind::Constant, c, 0.0}; }
  static TimeProfile sine(double c0, double c1) { return {Kind::Sin, c0, c1}; }
  static TimeProfile exp_decay(double c0, double c1) {
    return {Kind::ExpDecay, c0, c1};
  }
  // Unbounded ramp p0 + p1*t; only for oracle comparisons on finite windows.
  static TimeProfile linear(double c0, double c1) { return {Kind::Linear, c0, c1}; }

  double operator()(double t) const;
  /// Exact integral of the clamped profile over [s, t].
  double integral(double s, double t) const;
  double infimum() const;  // over t >= 0
  bool bounded() const { return kind != Kind::Linear; }
  bool converges() const { return kind != Kind::Sin; }
  double limit() const;  // value as t -> +inf (requires converges())
};

/// Base diffusion q0(t,x): bounded, symmetric, uniformly elliptic forms.
struct Q0Spec {
  enum class Form { Identity, IsoGaussCos, AnisoTanh };
  Form form = Form::Identity;
  double a0 = 1.0;
  double a1 = 0.0;

  Mat eval(int dim, double t, const Vec& x) const;
  std::vector<Mat> grad(int dim, double t, const Vec& x) const;
  double lambda_min_bound() const;  // uniform lower bound on eigenvalues
  double norm_bound(int dim) const; // uniform Frobenius-norm upper bound
  bool time_independent() const { return form != Form::IsoGaussCos; }
};

/// Parameters of the polynomial-growth family
///   A(t) = (1+|x|^2)^gamma Tr(Q0(t,x) D^2) - b0(t) (1+|x|^2)^r <x, grad>.
struct ExampleParams {
  int dim = 1;
  double gamma = 0.0;
  double r = 1.0;
  double delta = 1.0;  // Lyapunov exponent, in (0, 2(r+1-gamma))
  Q0Spec q0;
  TimeProfile b0 = TimeProfile::constant(1.0);

  double beta() const { return b0.infimum(); }
};

/// Ornstein-Uhlenbeck family: Q = I, drift -b0(t) x.
struct OUParams {
  int dim = 1;
  TimeProfile b0 = TimeProfile::constant(1.0);
};

/// All violated §-family constraints (empty means valid).
std::vector<std::string> validate_params(const ExampleParams& p);
std::vector<std::string> validate_params(const OUParams& p);

CoefficientModel build_example_model(const ExampleParams& p);
CoefficientModel build_ou_model(const OUParams& p);

/// V(x) = exp(|x|^delta) outside the unit ball, blended inside by the
/// quintic a + b|x|^2 + c|x|^5 matched to value and two radial derivatives
/// at |x| = 1 (even and C^2 at the origin).
LyapunovSpec default_lyapunov(const ExampleParams& p);
LyapunovSpec exp_lyapunov(double delta);

/// V(x) = 1 + |x|^2; the natural choice for the OU presets.
LyapunovSpec quadratic_lyapunov();

/// Closed-form answers for the OU family (l the independent oracle used all
/// over the test suite). Quadratures are adaptive to ~1e-12.
class OuOracle {
 public:
  explicit OuOracle(OUParams p) : p_(std::move(p)) {}
  const OUParams& params() const { return p_; }

  /// B(s,t) = int_s^t b0 (clamped profile), s <= t.
  double B(double s, double t) const { return p_.b0.integral(s, t); }
  double mean_factor(double s, double t) const { return std::exp(-B(s, t)); }
  /// Terminal variance of the reversed-schedule representation of G(t,s):
  /// 2 int_s^t exp(-2 B(s, sigma)) dsigma.
  double var_reversed(double s, double t) const;
  /// Terminal variance of the forward flow started at time s.
  double var_forward(double s, double t) const;
  /// Variance v(t) of the evolution measure mu_t = N(0, v(t) I).
  double measure_variance(double t) const;

  /// (G(t,s)f)(x) for scalar f of one coordinate, by Gauss quadrature over
  /// the terminal law; exact for the closed-form cases below.
  double action(double s, double t, double x,
                const std::function<double(double)>& f) const;
  double action_identity() const { return 1.0; }          // G(t,s) 1 = 1
  double action_coordinate(double s, double t, double x) const;  // f = x
  double action_square(double s, double t, double x) const;      // f = x^2

  /// m_t(f) for scalar f of one coordinate under N(0, v(t)).
  double measure_mean(double t, const std::function<double(double)>& f) const;
  double measure_cdf(double t, double x) const;

 private:
  OUParams p_;
};

/// A shipped, named model with everything attached that experiments need.
struct Preset {
  std::string name;
  CoefficientModel model;
  HypothesisConstants consts;
  LyapunovSpec lyapunov;
  std::optional<OuOracle> oracle;  // present for the OU members
  bool hypothesis_compliant = true;
};

std::vector<std::string> preset_names();
Preset make_preset(const std::string& name);

}  // namespace kolmo
