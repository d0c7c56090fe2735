#include "kolmo/pde_engine.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <array>
#include <cmath>

#include "kolmo/sde_engine.hpp"  // TimeGrid

namespace kolmo {

SpatialGrid::SpatialGrid(int d, double radius, int nodes)
    : dim(d), L(radius), nodes_per_axis(nodes) {
  require(dim == 1 || dim == 2, "SpatialGrid: FD engine supports d in {1,2}");
  require(L > 0.0, "SpatialGrid: L must be > 0");
  require(nodes_per_axis >= 3 && nodes_per_axis % 2 == 1,
          "SpatialGrid: need an odd node count >= 3 (origin-symmetric grid)");
}

size_t SpatialGrid::size() const {
  size_t s = nodes_per_axis;
  return dim == 1 ? s : s * s;
}

Vec SpatialGrid::node(size_t flat) const {
  Vec x(dim);
  if (dim == 1) {
    x[0] = coord(static_cast<int>(flat));
  } else {
    const int n = nodes_per_axis;
    x[0] = coord(static_cast<int>(flat) / n);
    x[1] = coord(static_cast<int>(flat) % n);
  }
  return x;
}

SpatialGrid SpatialGrid::refined() const {
  return SpatialGrid(dim, L, 2 * (nodes_per_axis - 1) + 1);
}

SpatialGrid SpatialGrid::extended() const {
  return SpatialGrid(dim, 2.0 * L, 2 * (nodes_per_axis - 1) + 1);
}

double GridFunction::operator()(const Vec& x) const {
  const int n = grid.nodes_per_axis;
  const double dx = grid.dx();
  auto locate = [&](double xi, int& i, double& w) {
    const double c = std::clamp(xi, -grid.L, grid.L);
    double pos = (c + grid.L) / dx;
    i = std::min(static_cast<int>(pos), n - 2);
    w = pos - i;
  };
  if (grid.dim == 1) {
    int i;
    double w;
    locate(x[0], i, w);
    return (1.0 - w) * values[i] + w * values[i + 1];
  }
  int i, j;
  double wi, wj;
  locate(x[0], i, wi);
  locate(x[1], j, wj);
  auto v = [&](int a, int b) { return values[static_cast<size_t>(a) * n + b]; };
  return (1.0 - wi) * ((1.0 - wj) * v(i, j) + wj * v(i, j + 1)) +
         wi * ((1.0 - wj) * v(i + 1, j) + wj * v(i + 1, j + 1));
}

double GridFunction::max_abs(double radius) const {
  double m = 0.0;
  for (size_t f = 0; f < grid.size(); ++f) {
    const Vec x = grid.node(f);
    if (x.cwiseAbs().maxCoeff() <= radius + 1e-12)
      m = std::max(m, std::abs(values[f]));
  }
  return m;
}

void FdConfig::validate() const {
  require(theta >= 0.5 && theta <= 1.0, "FdConfig: theta must lie in [1/2, 1]");
  require(dt > 0.0, "FdConfig: dt must be > 0");
}

namespace {

// Spatial operator as a per-node stencil: 3 entries in 1d, 9 in 2d, with
// Neumann mirror ghosts already folded in (Dirichlet rows are zeroed).
struct Stencil {
  int dim = 1;
  int n = 0;
  std::vector<std::array<double, 9>> rows;
  double upwind_fraction = 0.0;
};

int reflect(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * (n - 1) - i;
  return i;
}

bool is_boundary(int i, int n) { return i == 0 || i == n - 1; }

Stencil assemble(const CoefficientModel& model, double tau,
                 const SpatialGrid& grid, const FdConfig& cfg) {
  Stencil st;
  st.dim = grid.dim;
  st.n = grid.nodes_per_axis;
  st.rows.assign(grid.size(), {});
  const double dx = grid.dx();
  const int n = st.n;
  long long upwound = 0;

  if (grid.dim == 1) {
#pragma omp parallel for schedule(static) reduction(+ : upwound)
    for (int i = 0; i < n; ++i) {
      if (cfg.bc == BoundaryKind::Dirichlet && is_boundary(i, n)) continue;
      Vec x(1);
      x[0] = grid.coord(i);
      const double q = model.diffusion(tau, x)(0, 0);
      const double b = model.drift(tau, x)[0];
      double lo = q / (dx * dx), di = -2.0 * q / (dx * dx), up = q / (dx * dx);
      const bool upwind =
          cfg.upwind == UpwindMode::Always ||
          (cfg.upwind == UpwindMode::Auto && std::abs(b) * dx > 2.0 * q);
      if (upwind) {
        ++upwound;
        if (b >= 0.0) {
          up += b / dx;
          di -= b / dx;
        } else {
          di += b / dx;
          lo -= b / dx;
        }
      } else {
        up += b / (2.0 * dx);
        lo -= b / (2.0 * dx);
      }
      // Neumann mirror: ghost value equals the inner neighbour.
      if (i == 0) {
        up += lo;
        lo = 0.0;
      }
      if (i == n - 1) {
        lo += up;
        up = 0.0;
      }
      st.rows[i] = {lo, di, up};
    }
    st.upwind_fraction = static_cast<double>(upwound) / n;
    return st;
  }

  // d = 2: slots are (di+1)*3 + (dj+1) for offsets di,dj in {-1,0,1}.
#pragma omp parallel for schedule(static) reduction(+ : upwound)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const size_t row = static_cast<size_t>(i) * n + j;
      if (cfg.bc == BoundaryKind::Dirichlet &&
          (is_boundary(i, n) || is_boundary(j, n)))
        continue;
      Vec x(2);
      x[0] = grid.coord(i);
      x[1] = grid.coord(j);
      const Mat Q = model.diffusion(tau, x);
      const Vec b = model.drift(tau, x);
      const double q11 = Q(0, 0), q22 = Q(1, 1), q12 = Q(0, 1);
      // Eigenvalues of a symmetric 2x2.
      const double mean = 0.5 * (q11 + q22);
      const double rad = std::sqrt(0.25 * (q11 - q22) * (q11 - q22) + q12 * q12);
      const double lam_min = mean - rad;

      std::array<double, 9> acc{};
      auto at = [&](int di, int dj) -> double& {
        return acc[(di + 1) * 3 + (dj + 1)];
      };
      const double idx2 = 1.0 / (dx * dx);
      at(-1, 0) += q11 * idx2;
      at(1, 0) += q11 * idx2;
      at(0, -1) += q22 * idx2;
      at(0, 1) += q22 * idx2;
      at(0, 0) += -2.0 * (q11 + q22) * idx2;
      const double cx = 2.0 * q12 / (4.0 * dx * dx);
      at(1, 1) += cx;
      at(-1, -1) += cx;
      at(1, -1) -= cx;
      at(-1, 1) -= cx;

      bool any_upwind = false;
      for (int k = 0; k < 2; ++k) {
        const double bk = b[k];
        const bool upwind = cfg.upwind == UpwindMode::Always ||
                            (cfg.upwind == UpwindMode::Auto &&
                             std::abs(bk) * dx > 2.0 * std::max(lam_min, 1e-300));
        auto nb = [&](int off) -> double& { return k == 0 ? at(off, 0) : at(0, off); };
        if (upwind) {
          any_upwind = true;
          if (bk >= 0.0) {
            nb(1) += bk / dx;
            at(0, 0) -= bk / dx;
          } else {
            at(0, 0) += bk / dx;
            nb(-1) -= bk / dx;
          }
        } else {
          nb(1) += bk / (2.0 * dx);
          nb(-1) -= bk / (2.0 * dx);
        }
      }
      if (any_upwind) ++upwound;

      // Fold Neumann ghosts back into the interior by mirror reflection.
      std::array<double, 9> folded{};
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const double c = acc[(di + 1) * 3 + (dj + 1)];
          if (c == 0.0) continue;
          const int ri = reflect(i + di, n) - i;
          const int rj = reflect(j + dj, n) - j;
          folded[(ri + 1) * 3 + (rj + 1)] += c;
        }
      st.rows[row] = folded;
    }
  }
  st.upwind_fraction = static_cast<double>(upwound) / (static_cast<double>(n) * n);
  return st;
}

// y = u + w * (A u) with A given by the stencil.
void apply_operator(const Stencil& st, const std::vector<double>& u, double w,
                    std::vector<double>& y) {
  const int n = st.n;
  if (st.dim == 1) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      const auto& r = st.rows[i];
      double au = r[1] * u[i];
      if (i > 0) au += r[0] * u[i - 1];
      if (i < n - 1) au += r[2] * u[i + 1];
      y[i] = u[i] + w * au;
    }
    return;
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const size_t row = static_cast<size_t>(i) * n + j;
      const auto& r = st.rows[row];
      double au = 0.0;
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const double c = r[(di + 1) * 3 + (dj + 1)];
          if (c == 0.0) continue;
          au += c * u[static_cast<size_t>(i + di) * n + (j + dj)];
        }
      y[row] = u[row] + w * au;
    }
  }
}

// Tridiagonal solve of (I - w A) u = rhs, A given by the stencil.
void solve_tridiag(const Stencil& st, double w, std::vector<double>& rhs,
                   std::vector<double>& scratch) {
  const int n = st.n;
  scratch.resize(n);
  double diag0 = 1.0 - w * st.rows[0][1];
  scratch[0] = -w * st.rows[0][2] / diag0;
  rhs[0] /= diag0;
  for (int i = 1; i < n; ++i) {
    const double lo = -w * st.rows[i][0];
    const double di = 1.0 - w * st.rows[i][1];
    const double up = -w * st.rows[i][2];
    const double m = 1.0 / (di - lo * scratch[i - 1]);
    scratch[i] = up * m;
    rhs[i] = (rhs[i] - lo * rhs[i - 1]) * m;
  }
  for (int i = n - 2; i >= 0; --i) rhs[i] -= scratch[i] * rhs[i + 1];
}

using SpMat = Eigen::SparseMatrix<double>;

void build_lhs(const Stencil& st, double w, SpMat& A,
               std::vector<Eigen::Triplet<double>>& trip) {
  const int n = st.n;
  trip.clear();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int row = i * n + j;
      const auto& r = st.rows[row];
      bool has_diag = false;
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const double c = r[(di + 1) * 3 + (dj + 1)];
          const int col = (i + di) * n + (j + dj);
          if (di == 0 && dj == 0) {
            trip.emplace_back(row, col, 1.0 - w * c);
            has_diag = true;
          } else if (c != 0.0 && i + di >= 0 && i + di < n && j + dj >= 0 &&
                     j + dj < n) {
            trip.emplace_back(row, col, -w * c);
          }
        }
      (void)has_diag;
    }
  A.setFromTriplets(trip.begin(), trip.end());
}

}  // namespace

GridFunction solve_forward(const CoefficientModel& model, const ScalarField& f,
                           double s, double t, const SpatialGrid& grid,
                           const FdConfig& cfg, SolveStats* stats) {
  GridFunction u0;
  u0.grid = grid;
  u0.time = s;
  u0.values.resize(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    u0.values[i] = f(grid.node(i));
    if (!std::isfinite(u0.values[i]))
      throw ContractError("solve_forward: initial data not finite on the grid");
  }
  return solve_forward(model, u0, s, t, cfg, stats);
}

GridFunction solve_forward(const CoefficientModel& model, const GridFunction& f,
                           double s, double t, const FdConfig& cfg,
                           SolveStats* stats) {
  cfg.validate();
  require(t >= s, "solve_forward: needs t >= s");
  require(model.dim() == f.grid.dim, "solve_forward: model/grid dim mismatch");
  const SpatialGrid& grid = f.grid;

  GridFunction u = f;
  u.time = s;
  const TimeGrid tg(s, t, cfg.dt);
  SolveStats local;
  local.steps = tg.steps();

  Stencil old_st = assemble(model, s, grid, cfg);
  local.max_upwind_fraction = old_st.upwind_fraction;

  std::vector<double> rhs(grid.size()), scratch;
  SpMat A;
  Eigen::SparseLU<SpMat> lu;
  std::vector<Eigen::Triplet<double>> trip;
  bool pattern_ready = false;
  if (grid.dim == 2) A.resize(static_cast<int>(grid.size()), static_cast<int>(grid.size()));

  for (int k = 0; k < tg.steps(); ++k) {
    const double tau = tg.time_at(k);
    const double h = tg.step_len(k);
    const double tau1 = std::min(tau + h, t);

    Stencil new_st = assemble(model, tau1, grid, cfg);
    local.max_upwind_fraction =
        std::max(local.max_upwind_fraction, new_st.upwind_fraction);

    apply_operator(old_st, u.values, (1.0 - cfg.theta) * h, rhs);

    if (grid.dim == 1) {
      solve_tridiag(new_st, cfg.theta * h, rhs, scratch);
      u.values = rhs;
    } else {
      build_lhs(new_st, cfg.theta * h, A, trip);
      if (!pattern_ready) {
        lu.analyzePattern(A);
        pattern_ready = true;
      }
      lu.factorize(A);
      if (lu.info() != Eigen::Success)
        throw EvalError("solve_forward: sparse LU factorization failed");
      Eigen::Map<const Eigen::VectorXd> bmap(rhs.data(), rhs.size());
      Eigen::VectorXd sol = lu.solve(bmap);
      if (lu.info() != Eigen::Success)
        throw EvalError("solve_forward: sparse solve failed");
      std::copy(sol.data(), sol.data() + sol.size(), u.values.begin());
    }
    old_st = std::move(new_st);
  }

  u.time = t;
  local.cfl_warning = local.max_upwind_fraction > 0.5;
  if (stats) *stats = local;
  return u;
}

std::vector<GridFunction> gradient(const GridFunction& u) {
  const SpatialGrid& g = u.grid;
  const int n = g.nodes_per_axis;
  const double dx = g.dx();
  std::vector<GridFunction> out(g.dim);
  for (auto& c : out) {
    c.grid = g;
    c.time = u.time;
    c.values.resize(g.size());
  }
  auto d1 = [&](auto value, int i) {
    if (i == 0) return (-3.0 * value(0) + 4.0 * value(1) - value(2)) / (2.0 * dx);
    if (i == n - 1)
      return (3.0 * value(n - 1) - 4.0 * value(n - 2) + value(n - 3)) / (2.0 * dx);
    return (value(i + 1) - value(i - 1)) / (2.0 * dx);
  };
  if (g.dim == 1) {
    auto v = [&](int i) { return u.values[i]; };
    for (int i = 0; i < n; ++i) out[0].values[i] = d1(v, i);
    return out;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto vx = [&](int a) { return u.values[static_cast<size_t>(a) * n + j]; };
      auto vy = [&](int b) { return u.values[static_cast<size_t>(i) * n + b]; };
      out[0].values[static_cast<size_t>(i) * n + j] = d1(vx, i);
      out[1].values[static_cast<size_t>(i) * n + j] = d1(vy, j);
    }
  return out;
}

double evolution_law_residual(const CoefficientModel& model, const ScalarField& f,
                              double s, double r, double t,
                              const SpatialGrid& grid, const FdConfig& cfg) {
  require(s <= r && r <= t, "evolution_law_residual: needs s <= r <= t");
  GridFunction direct = solve_forward(model, f, s, t, grid, cfg);
  GridFunction mid = solve_forward(model, f, s, r, grid, cfg);
  GridFunction restarted = solve_forward(model, mid, r, t, cfg);
  double m = 0.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    const Vec x = grid.node(i);
    if (x.cwiseAbs().maxCoeff() <= 0.5 * grid.L + 1e-12)
      m = std::max(m, std::abs(direct.values[i] - restarted.values[i]));
  }
  return m;
}

RefineReport refine_check(const CoefficientModel& model, const ScalarField& f,
                          double s, double t, const SpatialGrid& grid,
                          const FdConfig& cfg, double tol_resolution,
                          double tol_domain) {
  FdConfig half = cfg;
  half.dt = 0.5 * cfg.dt;
  GridFunction base = solve_forward(model, f, s, t, grid, cfg);
  GridFunction fine = solve_forward(model, f, s, t, grid.refined(), half);
  GridFunction wide = solve_forward(model, f, s, t, grid.refined().extended(), half);

  RefineReport rep;
  for (size_t i = 0; i < grid.size(); ++i) {
    const Vec x = grid.node(i);
    if (x.cwiseAbs().maxCoeff() > 0.5 * grid.L + 1e-12) continue;
    rep.diff_resolution =
        std::max(rep.diff_resolution, std::abs(fine(x) - base.values[i]));
    rep.diff_domain = std::max(rep.diff_domain, std::abs(wide(x) - fine(x)));
  }
  rep.converged =
      rep.diff_resolution <= tol_resolution && rep.diff_domain <= tol_domain;
  rep.fine = std::move(wide);
  return rep;
}

}  // namespace kolmo
