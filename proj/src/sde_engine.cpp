#include "kolmo/sde_engine.hpp"

#include <Eigen/Eigenvalues>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kolmo/rng.hpp"

namespace kolmo {

TimeGrid::TimeGrid(double s, double e, double step) : start(s), end(e), dt(step) {
  require(e >= s, "TimeGrid: end must be >= start");
  require(step > 0.0, "TimeGrid: dt must be > 0");
}

int TimeGrid::steps() const {
  if (end == start) return 0;
  return static_cast<int>(std::ceil((end - start) / dt - 1e-12));
}

double TimeGrid::time_at(int k) const { return std::min(start + k * dt, end); }

double TimeGrid::step_len(int k) const {
  return std::min(dt, end - (start + k * dt));
}

Vec ParticleEnsemble::at(size_t i) const {
  Vec x(dim);
  for (int k = 0; k < dim; ++k) x[k] = positions[i * dim + k];
  return x;
}

std::vector<double> ParticleEnsemble::component(int k) const {
  std::vector<double> v(count());
  for (size_t i = 0; i < v.size(); ++i) v[i] = positions[i * dim + k];
  return v;
}

Mat diffusion_factor(const Mat& Q, double eps_psd) {
  require(eps_psd >= 0.0, "diffusion_factor: eps_psd must be >= 0");
  const int d = static_cast<int>(Q.rows());
  if (d == 1) {
    const double two_q = 2.0 * Q(0, 0);
    if (two_q < eps_psd)
      throw EvalError("diffusion_factor: degenerate diffusion (1d)");
    Mat s(1, 1);
    s(0, 0) = std::sqrt(two_q);
    return s;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(2.0 * Q);
  Vec lam = es.eigenvalues();
  if (lam.minCoeff() < eps_psd)
    throw EvalError("diffusion_factor: eigenvalue below PSD floor");
  return es.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

namespace {

struct StepFailure {
  bool failed = false;
  size_t particle = 0;
  double sim_time = 0.0;
};

// One Euler step of particle state x in place. `coef_time` is where the
// coefficients are evaluated (natural or reversed schedule).
inline void step_particle(const CoefficientModel& model, Vec& x,
                          double coef_time, double coef_time_next, double h,
                          const IntegratorConfig& cfg, uint64_t seed,
                          uint64_t stream, uint64_t ctr_base) {
  const int d = model.dim();
  const double sqh = std::sqrt(h);

  Vec noise(d);
  const int pairs = (d + 1) / 2;
  for (int j = 0; j < pairs; ++j) {
    double z0, z1;
    rng::normal_pair(seed, stream, ctr_base + j, z0, z1);
    noise[2 * j] = z0;
    if (2 * j + 1 < d) noise[2 * j + 1] = z1;
  }

  const Mat sigma = diffusion_factor(model.diffusion(coef_time, x), cfg.eps_psd);
  const Vec diff_incr = sqh * (sigma * noise);

  if (cfg.scheme == Scheme::TamedEuler) {
    const Vec b = model.drift(coef_time, x);
    x += h * b / (1.0 + h * b.norm()) + diff_incr;
    return;
  }

  // Semi-implicit drift: solve y = x + h b(t_next, y) + noise by Newton,
  // starting from the tamed predictor.
  const Vec rhs = x + diff_incr;
  const Vec b0 = model.drift(coef_time, x);
  Vec y = x + h * b0 / (1.0 + h * b0.norm()) + diff_incr;
  for (int it = 0; it < 4; ++it) {
    const Vec g = y - rhs - h * model.drift(coef_time_next, y);
    const Mat J =
        Mat::Identity(d, d) - h * model.drift_jacobian(coef_time_next, y);
    y -= J.partialPivLu().solve(g);
  }
  x = y;
}

ParticleEnsemble run(const CoefficientModel& model, const ParticleEnsemble& ens,
                     const TimeGrid& tg, bool reversed,
                     const IntegratorConfig& cfg) {
  require(model.dim() == ens.dim, "evolve: model/ensemble dimension mismatch");
  ParticleEnsemble out = ens;
  const size_t n = ens.count();
  const int d = ens.dim;
  const int nsteps = tg.steps();
  const int pairs = (d + 1) / 2;
  const double s = tg.start, t = tg.end;

  StepFailure fail;

  auto advance = [&](size_t i) {
    Vec x(d);
    for (int k = 0; k < d; ++k) x[k] = out.positions[i * d + k];
    const uint64_t stream =
        rng::stream_id(rng::Purpose::Evolve, ens.streams.stream_base + i);
    for (int k = 0; k < nsteps; ++k) {
      const double tau = tg.time_at(k);
      const double h = tg.step_len(k);
      const double tau1 = std::min(tau + h, t);
      const double ct = reversed ? s + t - tau : tau;
      const double ct1 = reversed ? s + t - tau1 : tau1;
      const uint64_t ctr = (ens.step_counter + k) * pairs;
      step_particle(model, x, ct, ct1, h, cfg, ens.streams.root_seed, stream,
                    ctr);
      if (!x.allFinite()) {
#pragma omp critical
        {
          if (!fail.failed) {
            fail.failed = true;
            fail.particle = i;
            fail.sim_time = tau1;
          }
        }
        return;
      }
    }
    for (int k = 0; k < d; ++k) out.positions[i * d + k] = x[k];
  };

  if (cfg.exec == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      advance(static_cast<size_t>(i));
  } else {
    for (size_t i = 0; i < n; ++i) advance(i);
  }

  if (fail.failed) {
    std::ostringstream os;
    os << "particle " << fail.particle << " became non-finite at sim time "
       << fail.sim_time << " (dt=" << cfg.dt << ", scheme="
       << (cfg.scheme == Scheme::TamedEuler ? "tamed-euler" : "semi-implicit")
       << ")";
    throw EvalError(os.str());
  }

  out.time = t;
  out.step_counter = ens.step_counter + nsteps;
  return out;
}

}  // namespace

ParticleEnsemble make_point_ensemble(const Vec& x0, size_t n, uint64_t seed,
                                     uint64_t stream_base) {
  ParticleEnsemble e;
  e.dim = static_cast<int>(x0.size());
  e.streams = {seed, stream_base};
  e.positions.resize(n * e.dim);
  for (size_t i = 0; i < n; ++i)
    for (int k = 0; k < e.dim; ++k) e.positions[i * e.dim + k] = x0[k];
  return e;
}

ParticleEnsemble make_gaussian_ensemble(int dim, double sd, size_t n,
                                        uint64_t seed, uint64_t stream_base) {
  ParticleEnsemble e;
  e.dim = dim;
  e.streams = {seed, stream_base};
  e.positions.resize(n * dim);
  const int pairs = (dim + 1) / 2;
  for (size_t i = 0; i < n; ++i) {
    const uint64_t stream = rng::stream_id(rng::Purpose::Init, stream_base + i);
    for (int j = 0; j < pairs; ++j) {
      double z0, z1;
      rng::normal_pair(seed, stream, j, z0, z1);
      e.positions[i * dim + 2 * j] = sd * z0;
      if (2 * j + 1 < dim) e.positions[i * dim + 2 * j + 1] = sd * z1;
    }
  }
  return e;
}

ParticleEnsemble evolve_forward(const CoefficientModel& model,
                                const ParticleEnsemble& ens, double to_time,
                                const IntegratorConfig& cfg) {
  require(to_time >= ens.time, "evolve_forward: to_time must be >= ensemble time");
  return run(model, ens, TimeGrid(ens.time, to_time, cfg.dt), false, cfg);
}

ParticleEnsemble evolve_reversed(const CoefficientModel& model,
                                 const ParticleEnsemble& start, double s,
                                 double t, const IntegratorConfig& cfg) {
  require(t >= s, "evolve_reversed: needs t >= s");
  return run(model, start, TimeGrid(s, t, cfg.dt), true, cfg);
}

ParticleEnsemble evolve_reversed(const CoefficientModel& model, const Vec& x0,
                                 size_t n, double s, double t,
                                 const IntegratorConfig& cfg, uint64_t seed,
                                 uint64_t stream_base) {
  auto ens = make_point_ensemble(x0, n, seed, stream_base);
  ens.time = s;
  return evolve_reversed(model, ens, s, t, cfg);
}

void save_ensemble(const ParticleEnsemble& ens, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw EvalError("save_ensemble: cannot open " + path);
  std::fprintf(f,
               "# kolmo-ensemble v1 time=%.17g dim=%d count=%zu seed=%" PRIu64
               " stream_base=%" PRIu64 " steps=%" PRIu64 "\n",
               ens.time, ens.dim, ens.count(), ens.streams.root_seed,
               ens.streams.stream_base, ens.step_counter);
  for (size_t i = 0; i < ens.count(); ++i) {
    for (int k = 0; k < ens.dim; ++k)
      std::fprintf(f, k ? ",%.17g" : "%.17g", ens.positions[i * ens.dim + k]);
    std::fputc('\n', f);
  }
  std::fclose(f);
}

ParticleEnsemble load_ensemble(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw EvalError("load_ensemble: cannot open " + path);
  std::string header;
  std::getline(in, header);
  ParticleEnsemble e;
  size_t count = 0;
  if (std::sscanf(header.c_str(),
                  "# kolmo-ensemble v1 time=%lg dim=%d count=%zu seed=%" SCNu64
                  " stream_base=%" SCNu64 " steps=%" SCNu64,
                  &e.time, &e.dim, &count, &e.streams.root_seed,
                  &e.streams.stream_base, &e.step_counter) != 6)
    throw EvalError("load_ensemble: bad header in " + path);
  e.positions.reserve(count * e.dim);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) e.positions.push_back(std::stod(cell));
  }
  if (e.positions.size() != count * static_cast<size_t>(e.dim))
    throw EvalError("load_ensemble: truncated data in " + path);
  return e;
}

}  // namespace kolmo
