#include "kolmo/coefficient_model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "kolmo/rng.hpp"

namespace kolmo {

CoefficientModel::CoefficientModel(int dim, DiffusionFn diffusion, DriftFn drift)
    : dim_(dim), q_(std::move(diffusion)), b_(std::move(drift)) {
  require(dim_ >= 1 && dim_ <= kMaxDim, "CoefficientModel: dimension out of range");
  require(static_cast<bool>(q_) && static_cast<bool>(b_),
          "CoefficientModel: missing evaluator");
}

void CoefficientModel::set_analytic_derivatives(DiffusionGradFn dq, DriftJacFn db) {
  dq_ = std::move(dq);
  db_ = std::move(db);
}

void CoefficientModel::set_limits(DiffusionFn q_limit, DriftFn b_limit) {
  q_limit_ = std::move(q_limit);
  b_limit_ = std::move(b_limit);
}

Mat CoefficientModel::diffusion(double t, const Vec& x) const {
  require(x.size() == dim_, "diffusion: dimension mismatch");
  Mat Q = q_(std::max(t, 0.0), x);
  if (Q.rows() != dim_ || Q.cols() != dim_)
    throw EvalError("diffusion evaluator returned wrong shape");
  if (!Q.allFinite()) throw EvalError("diffusion evaluator returned non-finite entries");
  const double scale = 1.0 + Q.cwiseAbs().maxCoeff();
  const double asym = (Q - Q.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymTol * scale)
    throw EvalError("diffusion matrix asymmetric beyond tolerance");
  return 0.5 * (Q + Q.transpose());
}

Vec CoefficientModel::drift(double t, const Vec& x) const {
  require(x.size() == dim_, "drift: dimension mismatch");
  Vec b = b_(std::max(t, 0.0), x);
  if (b.size() != dim_) throw EvalError("drift evaluator returned wrong shape");
  if (!b.allFinite()) throw EvalError("drift evaluator returned non-finite entries");
  return b;
}

Mat CoefficientModel::drift_jacobian(double t, const Vec& x) const {
  if (db_) {
    Mat J = db_(std::max(t, 0.0), x);
    if (!J.allFinite()) throw EvalError("drift Jacobian non-finite");
    return J;
  }
  const double h = h_jac_ * (1.0 + x.norm());
  Mat J(dim_, dim_);
  for (int k = 0; k < dim_; ++k) {
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    J.col(k) = (drift(t, xp) - drift(t, xm)) / (2.0 * h);
  }
  return J;
}

std::vector<Mat> CoefficientModel::diffusion_gradient(double t, const Vec& x) const {
  if (dq_) {
    auto g = dq_(std::max(t, 0.0), x);
    require(static_cast<int>(g.size()) == dim_, "diffusion gradient: wrong arity");
    return g;
  }
  const double h = h_jac_ * (1.0 + x.norm());
  std::vector<Mat> g(dim_);
  for (int k = 0; k < dim_; ++k) {
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    g[k] = (diffusion(t, xp) - diffusion(t, xm)) / (2.0 * h);
  }
  return g;
}

CoefficientModel CoefficientModel::limit_model() const {
  require(has_limits(), "limit_model: no limit coefficients supplied");
  auto ql = q_limit_;
  auto bl = b_limit_;
  return CoefficientModel(dim_, [ql](double, const Vec& x) { return ql(0.0, x); },
                          [bl](double, const Vec& x) { return bl(0.0, x); });
}

void HypothesisConstants::validate() const {
  require(eta0 > 0.0, "HypothesisConstants: eta0 must be > 0");
  require(kappa > 0.0, "HypothesisConstants: kappa must be > 0");
  require(a >= 0.0, "HypothesisConstants: a must be >= 0");
  require(c0 >= 0.0, "HypothesisConstants: c0 must be >= 0");
  require(c > 0.0, "HypothesisConstants: c must be > 0");
}

Jet LyapunovSpec::jet(const Vec& x) const {
  Jet j;
  j.value = value(x);
  if (!(j.value > 0.0) || !std::isfinite(j.value))
    throw EvalError("Lyapunov function not positive/finite at queried point");
  j.gradient = gradient(x);
  j.hessian = hessian(x);
  if (!j.gradient.allFinite() || !j.hessian.allFinite())
    throw EvalError("Lyapunov derivatives non-finite");
  return j;
}

double apply_generator(const CoefficientModel& model, double t, const Vec& x,
                       const Jet& jet) {
  require(jet.gradient.size() == model.dim(), "apply_generator: gradient dim mismatch");
  require(jet.hessian.rows() == model.dim() && jet.hessian.cols() == model.dim(),
          "apply_generator: Hessian dim mismatch");
  const double hess_scale = 1.0 + jet.hessian.cwiseAbs().maxCoeff();
  require((jet.hessian - jet.hessian.transpose()).cwiseAbs().maxCoeff() <=
              1e-10 * hess_scale,
          "apply_generator: Hessian not symmetric");
  const Mat Q = model.diffusion(t, x);
  const Vec b = model.drift(t, x);
  return (Q * jet.hessian).trace() + b.dot(jet.gradient);
}

EllipticityResult ellipticity_margin(const CoefficientModel& model,
                                     const HypothesisConstants& consts, double t,
                                     const Vec& x) {
  const Mat Q = model.diffusion(t, x);
  Eigen::SelfAdjointEigenSolver<Mat> es(Q, Eigen::EigenvaluesOnly);
  EllipticityResult r;
  r.eta = es.eigenvalues().minCoeff();
  r.margin = r.eta - consts.eta0;
  return r;
}

double lyapunov_residual(const CoefficientModel& model, const LyapunovSpec& lyap,
                         const HypothesisConstants& consts, double t,
                         const Vec& x) {
  const Jet j = lyap.jet(x);
  const double av = apply_generator(model, t, x, j);
  if (!std::isfinite(av)) throw EvalError("A(t)V non-finite");
  return av - consts.a + consts.kappa * j.value;
}

DissipativityResult dissipativity_margin(const CoefficientModel& model,
                                         const HypothesisConstants& consts,
                                         double t, const Vec& x) {
  DissipativityResult r;
  const Mat J = model.drift_jacobian(t, x);
  const Mat S = 0.5 * (J + J.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  r.drift_residual = es.eigenvalues().maxCoeff() - consts.r0;

  const auto dQ = model.diffusion_gradient(t, x);
  double norm2 = 0.0;
  for (const Mat& g : dQ) norm2 += g.squaredNorm();
  const double eta = ellipticity_margin(model, consts, t, x).eta;
  r.dq_residual = std::sqrt(norm2) - consts.c0 * eta;
  return r;
}

std::string ScanPlan::describe() const {
  std::ostringstream os;
  os << "times=" << times.size() << " shells=" << radii.size()
     << " dirs/shell=" << dirs_per_shell << " seed=" << seed
     << " (sampled evidence, not a proof)";
  return os.str();
}

const CheckSummary* HypothesisReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

Vec unit_direction(int dim, uint64_t seed, uint64_t id) {
  Vec u(dim);
  if (dim == 1) {
    u[0] = (rng::uniform01(seed, rng::stream_id(rng::Purpose::ScanDir, id), 0) <
            0.5)
               ? -1.0
               : 1.0;
    return u;
  }
  const uint64_t stream = rng::stream_id(rng::Purpose::ScanDir, id);
  for (int k = 0; k < dim; k += 2) {
    double z0, z1;
    rng::normal_pair(seed, stream, k, z0, z1);
    u[k] = z0;
    if (k + 1 < dim) u[k + 1] = z1;
  }
  if (u.norm() < 1e-12) u.setOnes();
  u.normalize();
  return u;
}

struct SampleMargins {
  double ellipticity;   // eta0 - eta          (<= 0 good)
  double lyapunov;      // residual            (<= 0 good)
  double dissipativity; // lambda_max - r0     (<= 0 good)
  double dq_bound;      // |grad Q| - c0 eta   (<= 0 good)
  double growth;        // variant residual    (<= 0 good)
  bool ok = false;
  std::string error;
};

SampleMargins eval_sample(const CoefficientModel& model, const LyapunovSpec& lyap,
                          const HypothesisConstants& consts, double t,
                          const Vec& x) {
  SampleMargins m{};
  try {
    const auto ell = ellipticity_margin(model, consts, t, x);
    m.ellipticity = -ell.margin;
    m.lyapunov = lyapunov_residual(model, lyap, consts, t, x);
    const auto dis = dissipativity_margin(model, consts, t, x);
    m.dissipativity = dis.drift_residual;
    m.dq_bound = dis.dq_residual;
    const Mat Q = model.diffusion(t, x);
    const double qn = Q.norm();
    if (consts.growth == GrowthVariant::BoundedQ) {
      m.growth = qn - consts.c;
    } else {
      const double V = lyap.value(x);
      const double r1 = qn - consts.c * (1.0 + x.norm()) * V;
      const double r2 =
          model.drift(t, x).dot(x) - consts.c * (1.0 + x.squaredNorm()) * V;
      m.growth = std::max(r1, r2);
    }
    m.ok = true;
  } catch (const std::exception& e) {
    m.error = e.what();
  }
  return m;
}

}  // namespace

HypothesisReport hypothesis_scan(const CoefficientModel& model,
                                 const LyapunovSpec& lyap,
                                 const HypothesisConstants& consts,
                                 const ScanPlan& plan, ExecPolicy exec) {
  consts.validate();
  require(!plan.times.empty() && !plan.radii.empty(), "hypothesis_scan: empty plan");

  std::vector<std::pair<double, Vec>> points;
  {
    Vec origin = Vec::Zero(model.dim());
    uint64_t dir_id = 0;
    std::vector<Vec> xs;
    xs.push_back(origin);
    for (double r : plan.radii)
      for (int j = 0; j < plan.dirs_per_shell; ++j)
        xs.push_back(r * unit_direction(model.dim(), plan.seed, dir_id++));
    for (double t : plan.times)
      for (const auto& x : xs) points.emplace_back(t, x);
  }

  std::vector<SampleMargins> margins(points.size());
  const int n = static_cast<int>(points.size());
  if (exec == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 0; i < n; ++i)
      margins[i] = eval_sample(model, lyap, consts, points[i].first, points[i].second);
  } else {
    for (int i = 0; i < n; ++i)
      margins[i] = eval_sample(model, lyap, consts, points[i].first, points[i].second);
  }

  // Single-writer aggregation.
  HypothesisReport rep;
  rep.samples = points.size();
  rep.plan = plan.describe();
  const char* names[5] = {"ellipticity", "lyapunov", "dissipativity", "dq_bound",
                          "growth"};
  std::vector<CheckSummary> checks(5);
  for (int c = 0; c < 5; ++c) {
    checks[c].name = names[c];
    checks[c].worst_margin = -std::numeric_limits<double>::infinity();
  }
  for (int i = 0; i < n; ++i) {
    const auto& m = margins[i];
    if (!m.ok) {
      rep.errors.push_back(m.error);
      continue;
    }
    const double vals[5] = {m.ellipticity, m.lyapunov, m.dissipativity,
                            m.dq_bound, m.growth};
    for (int c = 0; c < 5; ++c) {
      if (vals[c] > checks[c].worst_margin) {
        checks[c].worst_margin = vals[c];
        checks[c].worst_t = points[i].first;
        checks[c].worst_x = points[i].second;
      }
    }
  }
  bool all = rep.errors.empty();
  for (auto& c : checks) {
    c.pass = c.worst_margin <= 0.0;
    all = all && c.pass;
  }
  rep.checks = std::move(checks);
  rep.pass = all;
  return rep;
}

}  // namespace kolmo
