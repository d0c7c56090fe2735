#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kolmo/coefficient_model.hpp"
#include "kolmo/common.hpp"

namespace kolmo {

/// Uniform tensor grid on [-L, L]^d, d in {1,2}, symmetric about the origin
/// (odd node count per axis).
struct SpatialGrid {
  int dim = 1;
  double L = 8.0;
  int nodes_per_axis = 801;

  SpatialGrid() = default;
  SpatialGrid(int d, double radius, int nodes);
  double dx() const { return 2.0 * L / (nodes_per_axis - 1); }
  size_t size() const;
  double coord(int i) const { return -L + i * dx(); }
  Vec node(size_t flat) const;
  SpatialGrid refined() const;   // half the spacing, same L
  SpatialGrid extended() const;  // doubled L, same spacing
};

using ScalarField = std::function<double(const Vec&)>;

/// Nodal values on a SpatialGrid; off-node evaluation is multilinear with
/// clamping to the box.
struct GridFunction {
  SpatialGrid grid;
  std::vector<double> values;
  double time = 0.0;

  double operator()(const Vec& x) const;
  double max_abs(double radius) const;  // sup over nodes with |x|_inf <= radius
};

enum class UpwindMode { Auto, Always, Never };
enum class BoundaryKind { Neumann, Dirichlet };

struct FdConfig {
  double theta = 0.5;  // 1 = implicit Euler, 0.5 = Crank-Nicolson
  double dt = 1e-3;
  UpwindMode upwind = UpwindMode::Auto;
  BoundaryKind bc = BoundaryKind::Neumann;

  void validate() const;
};

struct SolveStats {
  int steps = 0;
  double max_upwind_fraction = 0.0;
  bool cfl_warning = false;  // upwinding engaged on > 50% of cells
};

/// Theta-scheme solution of D_t u = A(t) u on [s,t] x grid with u(s,.) = f.
/// Second derivatives (cross terms included) are centered; advection is
/// centered, switching to first-order upwind where |b| dx / (2 lambda_min(Q))
/// exceeds 1.
GridFunction solve_forward(const CoefficientModel& model, const ScalarField& f,
                           double s, double t, const SpatialGrid& grid,
                           const FdConfig& cfg, SolveStats* stats = nullptr);
GridFunction solve_forward(const CoefficientModel& model, const GridFunction& f,
                           double s, double t, const FdConfig& cfg,
                           SolveStats* stats = nullptr);

/// Componentwise centered gradient (second-order one-sided at the boundary).
std::vector<GridFunction> gradient(const GridFunction& u);

/// Max-norm difference on the inner half of the grid between the direct
/// solve s -> t and the restarted solve s -> r -> t.
double evolution_law_residual(const CoefficientModel& model, const ScalarField& f,
                              double s, double r, double t,
                              const SpatialGrid& grid, const FdConfig& cfg);

struct RefineReport {
  double diff_resolution = 0.0;  // (dx/2, dt/2, L)  vs (dx, dt, L) on B_{L/2}
  double diff_domain = 0.0;      // (dx/2, dt/2, 2L) vs (dx/2, dt/2, L)
  bool converged = false;
  GridFunction fine;  // the (dx/2, dt/2, 2L) solution
};

/// Runs the base, space/time-refined and domain-extended solves and reports
/// successive max-norm differences on B_{L/2}.
RefineReport refine_check(const CoefficientModel& model, const ScalarField& f,
                          double s, double t, const SpatialGrid& grid,
                          const FdConfig& cfg, double tol_resolution = 1e-3,
                          double tol_domain = 1e-4);

}  // namespace kolmo
