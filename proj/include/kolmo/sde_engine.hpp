#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kolmo/coefficient_model.hpp"
#include "kolmo/common.hpp"

namespace kolmo {

/// Uniform step grid over [start, end]; the last step is shortened so the
/// grid covers the interval exactly.
struct TimeGrid {
  double start = 0.0;
  double end = 0.0;
  double dt = 1e-2;

  TimeGrid(double s, double e, double step);
  int steps() const;
  double time_at(int k) const;   // clamped to end
  double step_len(int k) const;  // final step may be < dt
};

enum class Scheme { TamedEuler, SemiImplicitDrift };

struct IntegratorConfig {
  Scheme scheme = Scheme::TamedEuler;
  double dt = 1e-2;
  double eps_psd = 1e-10;
  ExecPolicy exec = ExecPolicy::Parallel;
};

/// Identifies the per-particle Philox streams: particle i draws from stream
/// (Evolve, stream_base + i) under root_seed, with the step counter as the
/// block index. Identical (root_seed, config) gives identical ensembles for
/// any worker count.
struct RngStreamSpec {
  uint64_t root_seed = 0;
  uint64_t stream_base = 0;
};

/// Time-stamped uniform-weight point cloud approximating a measure.
struct ParticleEnsemble {
  double time = 0.0;
  int dim = 1;
  std::vector<double> positions;  // count x dim, row-major
  RngStreamSpec streams;
  uint64_t step_counter = 0;

  size_t count() const { return dim > 0 ? positions.size() / dim : 0; }
  Vec at(size_t i) const;
  std::vector<double> component(int k) const;
};

/// Symmetric PSD factor sigma with sigma sigma^T = 2Q; eigenvalues of 2Q
/// below eps_psd are a degenerate-diffusion error.
Mat diffusion_factor(const Mat& Q, double eps_psd);

ParticleEnsemble make_point_ensemble(const Vec& x0, size_t n, uint64_t seed,
                                     uint64_t stream_base = 0);
ParticleEnsemble make_gaussian_ensemble(int dim, double sd, size_t n,
                                        uint64_t seed,
                                        uint64_t stream_base = 0);

/// Advances every particle to `to_time` with coefficients at natural times.
ParticleEnsemble evolve_forward(const CoefficientModel& model,
                                const ParticleEnsemble& ens, double to_time,
                                const IntegratorConfig& cfg);

/// Runs the simulation clock over [s,t] with coefficients evaluated at the
/// reversed times s+t-tau. The terminal cloud's f-average estimates
/// (G(t,s)f)(x) when started from the point x.
ParticleEnsemble evolve_reversed(const CoefficientModel& model,
                                 const ParticleEnsemble& start, double s,
                                 double t, const IntegratorConfig& cfg);
ParticleEnsemble evolve_reversed(const CoefficientModel& model, const Vec& x0,
                                 size_t n, double s, double t,
                                 const IntegratorConfig& cfg, uint64_t seed,
                                 uint64_t stream_base = 0);

/// Snapshot persistence (CSV with a header line; round trips bit-exactly).
void save_ensemble(const ParticleEnsemble& ens, const std::string& path);
ParticleEnsemble load_ensemble(const std::string& path);

}  // namespace kolmo
