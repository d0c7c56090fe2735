#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kolmo/pde_engine.hpp"
#include "kolmo/sde_engine.hpp"
#include "kolmo/stats.hpp"
#include "kolmo/test_functions.hpp"

namespace kolmo {

/// How a burn-in flow is initialized at time t - T_burn.
struct InitDescriptor {
  enum class Kind { PointMass, Gaussian, Cloud };
  Kind kind = Kind::PointMass;
  Vec point;          // PointMass
  double sd = 1.0;    // Gaussian N(0, sd^2 I)
  std::string cloud_path;  // Cloud: ensemble snapshot file

  static InitDescriptor point_mass(const Vec& x);
  static InitDescriptor gaussian(double sd);
  std::string describe() const;
};

enum class DensityEstimator { Histogram, Kernel };

/// Nonnegative density values on a grid; integrates to ~1 over the hull.
struct DensityEstimate {
  SpatialGrid grid;
  std::vector<double> values;
  DensityEstimator estimator = DensityEstimator::Histogram;
  double bandwidth = 0.0;  // kernel only
  size_t particles = 0;

  double integral() const;
  double value_at(const Vec& x) const;
};

/// A particle approximation of mu_t (uniform weights summing to 1).
struct MeasureEstimate {
  ParticleEnsemble ensemble;
  double t_burn = 0.0;
  std::string init;
  std::optional<DensityEstimate> density;

  double time() const { return ensemble.time; }
};

/// Realization of the space-time measure nu on the window [T0,T1]: slices on
/// a uniform grid with trapezoid quadrature weights (summing to T1-T0).
struct SpaceTimeWindowMeasure {
  double T0 = 0.0;
  double T1 = 1.0;
  std::vector<MeasureEstimate> slices;
  std::vector<double> weights;
  double sim_start = 0.0;  // earliest time touched while building the flow
};

/// mu_t estimate: spawn N particles per `init` at t - T_burn and flow them
/// forward to t.
MeasureEstimate estimate_measure(const CoefficientModel& model, double t,
                                 double t_burn, size_t n,
                                 const InitDescriptor& init,
                                 const IntegratorConfig& cfg, uint64_t seed);

/// One continuous flow snapshotted at each requested slice time (ascending).
/// Slices share particles, which is exactly the evolution-family coupling.
std::vector<MeasureEstimate> measure_series(const CoefficientModel& model,
                                            const std::vector<double>& times,
                                            double t_burn, size_t n,
                                            const InitDescriptor& init,
                                            const IntegratorConfig& cfg,
                                            uint64_t seed);

SpaceTimeWindowMeasure build_window(const CoefficientModel& model, double T0,
                                    double T1, int slices, double t_burn,
                                    size_t n, const InitDescriptor& init,
                                    const IntegratorConfig& cfg, uint64_t seed);

/// Weighted mean of f over the cloud with bootstrap standard error.
stats::MeanSe mean_functional(const MeasureEstimate& m,
                              const std::function<double(const Vec&)>& f,
                              int bootstrap = 100);

DensityEstimate density_estimate(const MeasureEstimate& m,
                                 const SpatialGrid& grid,
                                 DensityEstimator estimator,
                                 ExecPolicy exec = ExecPolicy::Parallel);

struct DensityFloor {
  double floor = 0.0;
  double arg_time = 0.0;
  Vec arg_x;
};

/// min over slices and over grid nodes inside B_k of the estimated density.
DensityFloor density_floor(const std::vector<MeasureEstimate>& series, double k,
                           const SpatialGrid& grid,
                           DensityEstimator estimator = DensityEstimator::Histogram);

struct TightnessRow {
  double radius = 0.0;
  double sup_outside_mass = 0.0;
};
std::vector<TightnessRow> tightness_profile(
    const std::vector<MeasureEstimate>& series, const std::vector<double>& radii);

enum class GEngine { Fd, Mc };

struct InvarianceConfig {
  GEngine engine = GEngine::Fd;
  SpatialGrid grid;                 // FD evaluation grid
  FdConfig fd;
  IntegratorConfig integrator;      // inner MC runs
  size_t mc_outer = 2000;           // cloud subsample for nested MC
  size_t mc_inner = 1000;
  int bootstrap = 100;
};

struct ResidualResult {
  double residual = 0.0;
  double se = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// | int G(t,s)f dmu_t - m_s(f) | with G by FD interpolation (d <= 2) or
/// reversed-schedule MC at subsampled cloud points. mu_s and mu_t must come
/// from the same flow (paired bootstrap SE).
ResidualResult invariance_residual(const CoefficientModel& model,
                                   const TestFunction& f,
                                   const MeasureEstimate& mu_s,
                                   const MeasureEstimate& mu_t,
                                   const InvarianceConfig& cfg, uint64_t seed);

/// Quadrature of int psi(s) m_s(A(s)phi) ds - int psi'(s) m_s(phi) ds over
/// the window slices; psi must vanish at the window ends.
ResidualResult infinitesimal_invariance_residual(
    const CoefficientModel& model, const SpaceTimeWindowMeasure& window,
    const std::function<double(double)>& psi,
    const std::function<double(double)>& dpsi, const TestFunction& phi,
    int bootstrap = 100);

}  // namespace kolmo
