#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kolmo/common.hpp"

namespace kolmo {

using DiffusionFn = std::function<Mat(double, const Vec&)>;
using DriftFn = std::function<Vec(double, const Vec&)>;
// dQ[k](i,j) = d Q_ij / d x_k
using DiffusionGradFn = std::function<std::vector<Mat>(double, const Vec&)>;
// J(i,k) = d b_i / d x_k
using DriftJacFn = std::function<Mat(double, const Vec&)>;

/// The operator family A(t)phi = Tr(Q(t,x) D^2 phi) + <b(t,x), grad phi>.
///
/// Evaluations at t < 0 use the t = 0 coefficients (constant-in-time
/// extension to the past). Q is symmetrized on evaluation; asymmetry beyond
/// kSymTol is an evaluation error. Evaluators must be safe for concurrent
/// read-only use.
class CoefficientModel {
 public:
  static constexpr double kSymTol = 1e-12;

  CoefficientModel(int dim, DiffusionFn diffusion, DriftFn drift);

  void set_analytic_derivatives(DiffusionGradFn dq, DriftJacFn db);
  void set_limits(DiffusionFn q_limit, DriftFn b_limit);
  void set_jacobian_step(double h) { h_jac_ = h; }

  int dim() const { return dim_; }
  bool has_analytic_derivatives() const { return static_cast<bool>(db_); }
  bool has_limits() const { return static_cast<bool>(b_limit_); }

  Mat diffusion(double t, const Vec& x) const;
  Vec drift(double t, const Vec& x) const;

  /// d b_i / d x_k; central differences with step h_jac*(1+|x|) when no
  /// analytic Jacobian was supplied.
  Mat drift_jacobian(double t, const Vec& x) const;
  std::vector<Mat> diffusion_gradient(double t, const Vec& x) const;

  /// Autonomous model frozen at the limit coefficients (requires limits).
  CoefficientModel limit_model() const;

 private:
  int dim_;
  DiffusionFn q_;
  DriftFn b_;
  DiffusionGradFn dq_;
  DriftJacFn db_;
  DiffusionFn q_limit_;
  DriftFn b_limit_;
  double h_jac_ = 1e-5;
};

enum class GrowthVariant { BoundedQ, VWeighted };

/// Constants of the standing hypotheses; see hypothesis_scan for the checks
/// each one feeds.
struct HypothesisConstants {
  double eta0 = 1.0;    // ellipticity floor, > 0
  double a = 0.0;       // Lyapunov offset, >= 0
  double kappa = 1.0;   // Lyapunov rate, > 0
  double c0 = 0.0;      // diffusion-gradient bound, >= 0
  double r0 = 0.0;      // dissipativity bound
  double c = 1.0;       // growth constant, > 0
  GrowthVariant growth = GrowthVariant::BoundedQ;

  void validate() const;
};

/// Lyapunov function V > 0 with V(x) -> +inf as |x| -> +inf.
struct LyapunovSpec {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;

  Jet jet(const Vec& x) const;
};

/// (A(t)phi)(x) from the jet of phi at x.
double apply_generator(const CoefficientModel& model, double t, const Vec& x,
                       const Jet& jet);

struct EllipticityResult {
  double eta = 0.0;     // smallest eigenvalue of Q(t,x)
  double margin = 0.0;  // eta - eta0; >= 0 means the floor holds here
};
EllipticityResult ellipticity_margin(const CoefficientModel& model,
                                     const HypothesisConstants& consts,
                                     double t, const Vec& x);

/// A(t)V(x) - a + kappa V(x); the Lyapunov inequality holds at (t,x) iff <= 0.
double lyapunov_residual(const CoefficientModel& model, const LyapunovSpec& lyap,
                         const HypothesisConstants& consts, double t,
                         const Vec& x);

struct DissipativityResult {
  double drift_residual = 0.0;  // lambda_max(sym grad b) - r0; <= 0 good
  double dq_residual = 0.0;     // |grad Q| - c0 * eta;        <= 0 good
};
DissipativityResult dissipativity_margin(const CoefficientModel& model,
                                         const HypothesisConstants& consts,
                                         double t, const Vec& x);

/// Sampling plan for hypothesis_scan: all shell radii at every time, with
/// dirs_per_shell pseudo-random unit directions per shell (seeded, so scans
/// are reproducible), plus the origin.
struct ScanPlan {
  std::vector<double> times;
  std::vector<double> radii;
  int dirs_per_shell = 8;
  uint64_t seed = 0;

  std::string describe() const;
};

struct CheckSummary {
  std::string name;
  bool pass = true;
  double worst_margin = 0.0;  // residual convention: <= 0 passes
  double worst_t = 0.0;
  Vec worst_x;
};

struct HypothesisReport {
  bool pass = false;
  std::vector<CheckSummary> checks;
  size_t samples = 0;
  std::string plan;
  std::vector<std::string> errors;  // per-sample evaluation failures

  const CheckSummary* find(const std::string& name) const;
};

/// Samples every quantitative hypothesis on the plan's point set and
/// aggregates worst-case margins. A "pass" is sampled evidence, not a proof;
/// the report header says so.
HypothesisReport hypothesis_scan(const CoefficientModel& model,
                                 const LyapunovSpec& lyap,
                                 const HypothesisConstants& consts,
                                 const ScanPlan& plan,
                                 ExecPolicy exec = ExecPolicy::Parallel);

}  // namespace kolmo
