#include "kolmo/example_family.hpp"

#include <cmath>
#include <sstream>

#include "kolmo/stats.hpp"

namespace kolmo {

double TimeProfile::operator()(double t) const {
  t = std::max(t, 0.0);
  switch (kind) {
    case Kind::Constant: return p0;
    case Kind::Sin: return p0 + p1 * std::sin(t);
    case Kind::ExpDecay: return p0 + p1 * std::exp(-t);
    case Kind::Linear: return p0 + p1 * t;
  }
  return p0;
}

double TimeProfile::integral(double s, double t) const {
  if (s > t) return -integral(t, s);
  // Clamp: on (-inf, 0) the profile is frozen at its t=0 value.
  if (s < 0.0) return (*this)(0.0) * (std::min(t, 0.0) - s) + integral(0.0, std::max(t, 0.0));
  switch (kind) {
    case Kind::Constant: return p0 * (t - s);
    case Kind::Sin: return p0 * (t - s) + p1 * (std::cos(s) - std::cos(t));
    case Kind::ExpDecay: return p0 * (t - s) + p1 * (std::exp(-s) - std::exp(-t));
    case Kind::Linear: return p0 * (t - s) + 0.5 * p1 * (t * t - s * s);
  }
  return 0.0;
}

double TimeProfile::infimum() const {
  switch (kind) {
    case Kind::Constant: return p0;
    case Kind::Sin: return p0 - std::abs(p1);
    case Kind::ExpDecay: return std::min(p0, p0 + p1);
    case Kind::Linear: return p1 >= 0.0 ? p0 : -std::numeric_limits<double>::infinity();
  }
  return p0;
}

double TimeProfile::limit() const {
  require(converges(), "TimeProfile: profile does not converge");
  switch (kind) {
    case Kind::Constant: return p0;
    case Kind::ExpDecay: return p0;
    default: break;
  }
  return p0;
}

Mat Q0Spec::eval(int dim, double t, const Vec& x) const {
  Mat Q = Mat::Identity(dim, dim);
  switch (form) {
    case Form::Identity:
      Q *= a0;
      break;
    case Form::IsoGaussCos:
      Q *= a0 + a1 * std::exp(-x.squaredNorm()) * std::cos(t);
      break;
    case Form::AnisoTanh: {
      Q *= a0;
      if (dim >= 2) {
        const double s = a1 * std::tanh(x[0]);
        Q(0, 1) += s;
        Q(1, 0) += s;
      } else {
        Q(0, 0) += a1 * std::tanh(x[0]);
      }
      break;
    }
  }
  return Q;
}

std::vector<Mat> Q0Spec::grad(int dim, double t, const Vec& x) const {
  std::vector<Mat> g(dim, Mat::Zero(dim, dim));
  switch (form) {
    case Form::Identity:
      break;
    case Form::IsoGaussCos: {
      const double common = a1 * std::exp(-x.squaredNorm()) * std::cos(t);
      for (int k = 0; k < dim; ++k)
        g[k] = -2.0 * x[k] * common * Mat::Identity(dim, dim);
      break;
    }
    case Form::AnisoTanh: {
      const double th = std::tanh(x[0]);
      const double ds = a1 * (1.0 - th * th);
      if (dim >= 2) {
        g[0](0, 1) = ds;
        g[0](1, 0) = ds;
      } else {
        g[0](0, 0) = ds;
      }
      break;
    }
  }
  return g;
}

double Q0Spec::lambda_min_bound() const {
  switch (form) {
    case Form::Identity: return a0;
    case Form::IsoGaussCos: return a0 - std::abs(a1);
    case Form::AnisoTanh: return a0 - std::abs(a1);
  }
  return a0;
}

double Q0Spec::norm_bound(int dim) const {
  const double base = a0 * std::sqrt(static_cast<double>(dim));
  switch (form) {
    case Form::Identity: return base;
    case Form::IsoGaussCos:
      return (a0 + std::abs(a1)) * std::sqrt(static_cast<double>(dim));
    case Form::AnisoTanh: return base + std::sqrt(2.0) * std::abs(a1);
  }
  return base;
}

std::vector<std::string> validate_params(const ExampleParams& p) {
  std::vector<std::string> v;
  if (p.dim < 1 || p.dim > kMaxDim) v.push_back("dimension out of range");
  if (!(p.r > p.gamma - 1.0)) v.push_back("requires r > gamma - 1");
  const double hi = 2.0 * (p.r + 1.0 - p.gamma);
  if (!(p.delta > 0.0 && p.delta < hi)) {
    std::ostringstream os;
    os << "delta must lie strictly inside (0, " << hi << ")";
    v.push_back(os.str());
  }
  if (!p.b0.bounded()) v.push_back("b0 profile must be bounded");
  if (!(p.beta() > 0.0)) v.push_back("requires inf b0 > 0");
  if (!(p.q0.lambda_min_bound() > 0.0))
    v.push_back("base diffusion q0 is not uniformly elliptic");
  return v;
}

std::vector<std::string> validate_params(const OUParams& p) {
  std::vector<std::string> v;
  if (p.dim < 1 || p.dim > kMaxDim) v.push_back("dimension out of range");
  if (!p.b0.bounded()) v.push_back("b0 profile must be bounded");
  if (!(p.b0.infimum() > 0.0)) v.push_back("requires inf b0 > 0");
  return v;
}

namespace {
void throw_if_invalid(const std::vector<std::string>& violations,
                      const char* what) {
  if (violations.empty()) return;
  std::ostringstream os;
  os << what << ":";
  for (const auto& s : violations) os << " [" << s << "]";
  throw ContractError(os.str());
}
}  // namespace

CoefficientModel build_example_model(const ExampleParams& p) {
  throw_if_invalid(validate_params(p), "invalid example-family parameters");
  const int d = p.dim;
  const double gamma = p.gamma, r = p.r;
  const Q0Spec q0 = p.q0;
  const TimeProfile b0 = p.b0;

  CoefficientModel m(
      d,
      [d, gamma, q0](double t, const Vec& x) -> Mat {
        return std::pow(1.0 + x.squaredNorm(), gamma) * q0.eval(d, t, x);
      },
      [r, b0](double t, const Vec& x) -> Vec {
        return -b0(t) * std::pow(1.0 + x.squaredNorm(), r) * x;
      });

  m.set_analytic_derivatives(
      [d, gamma, q0](double t, const Vec& x) {
        const double w = 1.0 + x.squaredNorm();
        const double wg = std::pow(w, gamma);
        const Mat base = q0.eval(d, t, x);
        std::vector<Mat> g = q0.grad(d, t, x);
        for (int k = 0; k < d; ++k)
          g[k] = 2.0 * gamma * x[k] * std::pow(w, gamma - 1.0) * base + wg * g[k];
        return g;
      },
      [d, r, b0](double t, const Vec& x) -> Mat {
        const double w = 1.0 + x.squaredNorm();
        const double bt = b0(t);
        Mat J = -bt * std::pow(w, r) * Mat::Identity(d, d);
        J -= 2.0 * r * bt * std::pow(w, r - 1.0) * (x * x.transpose());
        return J;
      });

  if (p.b0.converges() && p.q0.time_independent()) {
    const double blim = p.b0.limit();
    m.set_limits(
        [d, gamma, q0](double, const Vec& x) -> Mat {
          return std::pow(1.0 + x.squaredNorm(), gamma) * q0.eval(d, 0.0, x);
        },
        [r, blim](double, const Vec& x) -> Vec {
          return -blim * std::pow(1.0 + x.squaredNorm(), r) * x;
        });
  }
  return m;
}

CoefficientModel build_ou_model(const OUParams& p) {
  throw_if_invalid(validate_params(p), "invalid OU parameters");
  const int d = p.dim;
  const TimeProfile b0 = p.b0;
  CoefficientModel m(
      d, [d](double, const Vec&) -> Mat { return Mat::Identity(d, d); },
      [b0](double t, const Vec& x) -> Vec { return -b0(t) * x; });
  m.set_analytic_derivatives(
      [d](double, const Vec&) { return std::vector<Mat>(d, Mat::Zero(d, d)); },
      [d, b0](double t, const Vec&) -> Mat {
        return -b0(t) * Mat::Identity(d, d);
      });
  if (p.b0.converges()) {
    const double blim = p.b0.limit();
    m.set_limits([d](double, const Vec&) -> Mat { return Mat::Identity(d, d); },
                 [blim](double, const Vec& x) -> Vec { return -blim * x; });
  }
  return m;
}

LyapunovSpec exp_lyapunov(double delta) {
  require(delta > 0.0, "exp_lyapunov: delta must be positive");
  const double e = std::exp(1.0);
  // Quintic blend a + b rho^2 + c rho^5 matching exp(rho^delta) at rho = 1
  // up to second radial derivatives.
  const double c5 = 2.0 * e * delta * (delta - 1.0) / 15.0;
  const double b2 = 0.5 * (delta * e - 5.0 * c5);
  const double a0 = e - b2 - c5;
  for (int i = 0; i <= 20; ++i) {
    const double rho = i / 20.0;
    const double v = a0 + b2 * rho * rho + c5 * std::pow(rho, 5);
    require(v > 0.0, "exp_lyapunov: blend not positive on the unit ball");
  }

  LyapunovSpec s;
  s.value = [=](const Vec& x) -> double {
    const double rho = x.norm();
    if (rho >= 1.0) return std::exp(std::pow(rho, delta));
    return a0 + b2 * rho * rho + c5 * std::pow(rho, 5);
  };
  s.gradient = [=](const Vec& x) -> Vec {
    const double rho = x.norm();
    if (rho >= 1.0) {
      const double V = std::exp(std::pow(rho, delta));
      return delta * std::pow(rho, delta - 2.0) * V * x;
    }
    return (2.0 * b2 + 5.0 * c5 * std::pow(rho, 3)) * x;
  };
  s.hessian = [=](const Vec& x) -> Mat {
    const int d = static_cast<int>(x.size());
    const double rho = x.norm();
    if (rho >= 1.0) {
      const double V = std::exp(std::pow(rho, delta));
      const double s1 = delta * std::pow(rho, delta - 2.0);
      const double s2 = delta * (delta - 2.0) * std::pow(rho, delta - 4.0) +
                        delta * delta * std::pow(rho, 2.0 * delta - 4.0);
      return V * (s1 * Mat::Identity(d, d) + s2 * (x * x.transpose()));
    }
    return (2.0 * b2 + 5.0 * c5 * std::pow(rho, 3)) * Mat::Identity(d, d) +
           15.0 * c5 * rho * (x * x.transpose());
  };
  return s;
}

LyapunovSpec default_lyapunov(const ExampleParams& p) {
  throw_if_invalid(validate_params(p), "invalid example-family parameters");
  return exp_lyapunov(p.delta);
}

LyapunovSpec quadratic_lyapunov() {
  LyapunovSpec s;
  s.value = [](const Vec& x) { return 1.0 + x.squaredNorm(); };
  s.gradient = [](const Vec& x) -> Vec { return 2.0 * x; };
  s.hessian = [](const Vec& x) -> Mat {
    const int d = static_cast<int>(x.size());
    return 2.0 * Mat::Identity(d, d);
  };
  return s;
}

double OuOracle::var_reversed(double s, double t) const {
  require(t >= s, "var_reversed: needs t >= s");
  return 2.0 * stats::integrate(
                   [&](double sigma) { return std::exp(-2.0 * B(s, sigma)); }, s,
                   t, 1e-12);
}

double OuOracle::var_forward(double s, double t) const {
  require(t >= s, "var_forward: needs t >= s");
  return 2.0 * stats::integrate(
                   [&](double u) { return std::exp(-2.0 * B(u, t)); }, s, t,
                   1e-12);
}

double OuOracle::measure_variance(double t) const {
  require(p_.b0.infimum() > 0.0,
          "measure_variance: needs inf b0 > 0 for the far-past integral");
  const double tail = std::exp(-2.0 * B(0.0, t)) / p_.b0(-1.0);
  if (t <= 0.0) return std::exp(2.0 * p_.b0(-1.0) * t) / p_.b0(-1.0);
  return 2.0 * stats::integrate(
                   [&](double u) { return std::exp(-2.0 * B(u, t)); }, 0.0, t,
                   1e-12) +
         tail;
}

double OuOracle::action(double s, double t, double x,
                        const std::function<double(double)>& f) const {
  const double m = mean_factor(s, t) * x;
  const double sd = std::sqrt(var_reversed(s, t));
  if (sd == 0.0) return f(m);
  return stats::integrate(
      [&](double z) { return f(m + sd * z) * stats::normal_pdf(z); }, -10.0,
      10.0, 1e-12);
}

double OuOracle::action_coordinate(double s, double t, double x) const {
  return mean_factor(s, t) * x;
}

double OuOracle::action_square(double s, double t, double x) const {
  const double m = mean_factor(s, t);
  return m * m * x * x + var_reversed(s, t);
}

double OuOracle::measure_mean(double t,
                              const std::function<double(double)>& f) const {
  const double sd = std::sqrt(measure_variance(t));
  return stats::integrate(
      [&](double z) { return f(sd * z) * stats::normal_pdf(z); }, -10.0, 10.0,
      1e-12);
}

double OuOracle::measure_cdf(double t, double x) const {
  return stats::normal_cdf(x, 0.0, std::sqrt(measure_variance(t)));
}

std::vector<std::string> preset_names() {
  return {"ou-const",  "ou-sin",    "ou-converging", "ou-linear-t",
          "sec5-1d-a", "sec5-1d-g", "sec5-2d-a",     "ou-const-3d"};
}

Preset make_preset(const std::string& name) {
  auto ou_preset = [&](TimeProfile profile, int dim) {
    OUParams p{dim, profile};
    Preset ps{name, build_ou_model(p), {}, quadratic_lyapunov(), OuOracle(p)};
    const double beta = profile.infimum();
    ps.consts.eta0 = 0.9;
    ps.consts.a = 2.0 * dim + 2.0;
    ps.consts.kappa = std::min(1.0, 2.0 * beta);
    ps.consts.c0 = 0.0;
    ps.consts.r0 = -beta;
    ps.consts.c = std::sqrt(static_cast<double>(dim)) + 0.5;
    ps.consts.growth = GrowthVariant::BoundedQ;
    return ps;
  };

  if (name == "ou-const") return ou_preset(TimeProfile::constant(1.0), 1);
  if (name == "ou-sin") return ou_preset(TimeProfile::sine(1.0, 0.5), 1);
  if (name == "ou-converging")
    return ou_preset(TimeProfile::exp_decay(1.0, 1.0), 1);
  if (name == "ou-const-3d") return ou_preset(TimeProfile::constant(1.0), 3);

  if (name == "ou-linear-t") {
    // Oracle-only model A(t) = D^2 - t x D; inf b0 = 0, so it is not a
    // member of the hypothesis class and ships without constants.
    OUParams p{1, TimeProfile::linear(0.0, 1.0)};
    const int d = p.dim;
    const TimeProfile b0 = p.b0;
    CoefficientModel m(
        d, [d](double, const Vec&) -> Mat { return Mat::Identity(d, d); },
        [b0](double t, const Vec& x) -> Vec { return -b0(t) * x; });
    m.set_analytic_derivatives(
        [d](double, const Vec&) { return std::vector<Mat>(d, Mat::Zero(d, d)); },
        [d, b0](double t, const Vec&) -> Mat {
          return -b0(t) * Mat::Identity(d, d);
        });
    Preset ps{name, std::move(m), {}, quadratic_lyapunov(), OuOracle(p)};
    ps.hypothesis_compliant = false;
    return ps;
  }

  if (name == "sec5-1d-a") {
    ExampleParams p;
    p.dim = 1;
    p.gamma = 0.0;
    p.r = 1.0;
    p.delta = 1.0;
    p.q0 = {Q0Spec::Form::IsoGaussCos, 1.0, 0.5};
    p.b0 = TimeProfile::sine(1.0, 0.5);
    Preset ps{name, build_example_model(p), {}, default_lyapunov(p), {}};
    ps.consts.eta0 = 0.5;
    ps.consts.a = 8.0;
    ps.consts.kappa = 0.5;
    ps.consts.c0 = 0.9;
    ps.consts.r0 = -0.5;
    ps.consts.c = 1.6;
    ps.consts.growth = GrowthVariant::BoundedQ;
    return ps;
  }

  if (name == "sec5-1d-g") {
    ExampleParams p;
    p.dim = 1;
    p.gamma = 0.5;
    p.r = 1.0;
    p.delta = 1.0;
    p.q0 = {Q0Spec::Form::Identity, 1.0, 0.0};
    p.b0 = TimeProfile::constant(1.0);
    Preset ps{name, build_example_model(p), {}, default_lyapunov(p), {}};
    ps.consts.eta0 = 1.0;
    ps.consts.a = 12.0;
    ps.consts.kappa = 0.5;
    ps.consts.c0 = 0.6;
    ps.consts.r0 = -1.0;
    ps.consts.c = 1.0;
    ps.consts.growth = GrowthVariant::VWeighted;
    return ps;
  }

  if (name == "sec5-2d-a") {
    ExampleParams p;
    p.dim = 2;
    p.gamma = 0.0;
    p.r = 1.0;
    p.delta = 1.0;
    p.q0 = {Q0Spec::Form::AnisoTanh, 1.0, 0.25};
    p.b0 = TimeProfile::sine(1.0, 0.5);
    Preset ps{name, build_example_model(p), {}, default_lyapunov(p), {}};
    ps.consts.eta0 = 0.75;
    ps.consts.a = 16.0;
    ps.consts.kappa = 0.5;
    ps.consts.c0 = 0.5;
    ps.consts.r0 = -0.5;
    ps.consts.c = 2.0;
    ps.consts.growth = GrowthVariant::BoundedQ;
    return ps;
  }

  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace kolmo
