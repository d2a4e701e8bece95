#include "ermakov/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ermakov/error.hpp"

namespace ermakov {

namespace {

Expr k_const(double v) { return Expr::constant(v); }

std::vector<double> uniform_grid(double t0, double t1, std::size_t points) {
  if (points < 2) throw ConfigError("grid needs at least two points");
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i) {
    out[i] = (i + 1 == points) ? t1 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return out;
}

std::string at_time(double t) {
  std::ostringstream os;
  os.precision(17);
  os << t;
  return os.str();
}

}  // namespace

Field second_order_field(const SecondOrderSystem& sys) {
  return [sys](double t, std::span<const double> y, std::span<double> dy) {
    const double x = y[0];
    const double v = y[1];
    dy[0] = v;
    dy[1] = sys.a.eval(t) * v + sys.b.eval(t) * x + sys.c.eval(t) / (x * x * x);
  };
}

Trajectory integrate_system(const SecondOrderSystem& sys, double t0, double t1, double step, double x0, double v0,
                            double x_min) {
  IntegrateOptions opts;
  opts.singular_components = {0};
  opts.x_min = x_min;
  const double init[] = {x0, v0};
  return rk4_integrate(second_order_field(sys), t0, t1, step, init, opts);
}

// ---------------------------------------------------------------------------

ZetaFactor::ZetaFactor(const Expr& gamma, double zeta0, double t0, double t1, double step)
    : gamma_(gamma), zeta0_(zeta0), step_(step), samples_(cumulative_integral(gamma, t0, t1, step)) {
  if (zeta0 == 0.0) throw DomainError("zeta0 must be nonzero");
}

double ZetaFactor::integral(double t) const {
  const auto& ts = samples_.t;
  const std::size_t n = ts.size();
  const double tol = 1e-12 * (1.0 + std::abs(t));
  if (t < ts.front() - tol || t > ts.back() + tol) {
    throw DomainError("zeta factor evaluated at t=" + at_time(t) + " outside its grid");
  }
  auto i = static_cast<std::size_t>(std::max(0.0, std::floor((t - ts.front()) / step_)));
  i = std::min(i, n - 2);
  if (t == ts[i]) return samples_.value[i];
  const double a = ts[i];
  const double b = ts[i + 1];
  const double h = b - a;
  const double u = (t - a) / h;
  const double u2 = u * u;
  const double u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * samples_.value[i] + (u3 - 2 * u2 + u) * h * samples_.rate[i] +
         (-2 * u3 + 3 * u2) * samples_.value[i + 1] + (u3 - u2) * h * samples_.rate[i + 1];
}

double ZetaFactor::operator()(double t) const { return zeta0_ * std::exp(-0.5 * integral(t)); }

double ZetaFactor::derivative(double t) const { return -0.5 * gamma_.eval(t) * (*this)(t); }

ZetaFactor zeta_factor(const Expr& gamma, double zeta0, double t0, double t1, double step) {
  return ZetaFactor(gamma, zeta0, t0, t1, step);
}

Expr omega_reduced(const Expr& omega, const Expr& gamma) {
  return pow(omega, 2.0) - pow(gamma, 2.0) / k_const(4.0) - derivative(gamma) / k_const(2.0);
}

SecondOrderSystem DampedPinney::as_system() const { return {-gamma, -pow(omega, 2.0), k}; }

ReducedPinney::ReducedPinney(DampedPinney original, Expr omega2, ZetaFactor zeta)
    : original_(std::move(original)), omega2_(std::move(omega2)), zeta_(std::move(zeta)) {}

double ReducedPinney::coupling(double t) const {
  const double z = zeta_(t);
  const double z2 = z * z;
  return original_.k.eval(t) / (z2 * z2);
}

Field ReducedPinney::field() const {
  return [self = *this](double t, std::span<const double> y, std::span<double> dy) {
    const double q = y[0];
    dy[0] = y[1];
    dy[1] = -self.omega2_.eval(t) * q + self.coupling(t) / (q * q * q);
  };
}

std::pair<double, double> ReducedPinney::push_forward(double t, double x, double xdot) const {
  const double z = zeta_(t);
  const double y = x / z;
  return {y, (xdot - zeta_.derivative(t) * y) / z};
}

std::pair<double, double> ReducedPinney::pull_back(double t, double y, double ydot) const {
  return {zeta_(t) * y, zeta_.derivative(t) * y + zeta_(t) * ydot};
}

ReducedPinney remove_damping(const DampedPinney& sys, double t0, double t1, double step, double zeta0) {
  return ReducedPinney(sys, omega_reduced(sys.omega, sys.gamma), ZetaFactor(sys.gamma, zeta0, t0, t1, step));
}

// ---------------------------------------------------------------------------

ReparametrizedSystem::ReparametrizedSystem(SecondOrderSystem in_t, Expr alpha, MonotoneMap s_of_t)
    : in_t_(std::move(in_t)), alpha_(std::move(alpha)), map_(std::move(s_of_t)) {}

Field ReparametrizedSystem::field() const {
  return [self = *this](double s, std::span<const double> y, std::span<double> dy) {
    const double t = self.t_of_s(s);
    const double x = y[0];
    dy[0] = y[1];
    dy[1] = self.in_t_.a.eval(t) * y[1] + self.in_t_.b.eval(t) * x + self.in_t_.c.eval(t) / (x * x * x);
  };
}

ReparametrizedSystem reparametrize(const SecondOrderSystem& sys, const Expr& alpha, double t0, double t1, double step) {
  CumulativeSamples samples = cumulative_integral(alpha, t0, t1, step);
  const double sign0 = samples.rate.front();
  for (std::size_t i = 0; i < samples.rate.size(); ++i) {
    const double r = samples.rate[i];
    if (r == 0.0 || (r > 0.0) != (sign0 > 0.0)) {
      throw DomainError("reparametrization: alpha changes sign or vanishes near t=" + at_time(samples.t[i]));
    }
  }
  const Expr alpha2 = pow(alpha, 2.0);
  SecondOrderSystem in_s{
      (sys.a - derivative(alpha) / alpha) / alpha,
      sys.b / alpha2,
      sys.c / alpha2,
  };
  return ReparametrizedSystem(std::move(in_s), alpha, MonotoneMap::from_cumulative(samples));
}

// ---------------------------------------------------------------------------

GaugeTransform GaugeTransform::inverse() const { return {k_const(1.0) / alpha, -(beta / alpha)}; }

TransformedCoefficients TransformedCoefficients::from_system(const SecondOrderSystem& sys) {
  return {sys.a, sys.b, sys.c, k_const(1.0), Expr()};
}

TransformedCoefficients quasi_lie_transform(const TransformedCoefficients& in, const GaugeTransform& g) {
  const Expr& alpha = g.alpha;
  const Expr& beta = g.beta;
  TransformedCoefficients out;
  out.a = in.a - derivative(alpha) / alpha - beta * in.d;
  out.b = (in.b + in.a * beta - derivative(beta) - beta * (in.d * beta + in.e)) / alpha;
  out.c = in.c / alpha;
  out.d = in.d * alpha;
  out.e = in.d * beta + in.e;
  return out;
}

TransformedCoefficients quasi_lie_transform(const SecondOrderSystem& sys, const GaugeTransform& g) {
  return quasi_lie_transform(TransformedCoefficients::from_system(sys), g);
}

ReducibilityReport reducibility_check(const SecondOrderSystem& sys, double t0, double t1,
                                      const ReducibilityOptions& options) {
  if (!(t1 > t0)) throw ConfigError("reducibility check requires t1 > t0");
  ReducibilityReport report;
  report.residual_expr = derivative(sys.c) / (k_const(2.0) * sys.c) - sys.a;

  const std::vector<double> grid = uniform_grid(t0, t1, options.grid_points);
  const double c0 = sys.c.eval(grid.front());
  double max_a = 0.0;
  for (double t : grid) {
    const double c = sys.c.eval(t);
    if (c == 0.0 || (c > 0.0) != (c0 > 0.0)) {
      throw DomainError("reducibility check: c(t) changes sign or vanishes near t=" + at_time(t));
    }
    max_a = std::max(max_a, std::abs(sys.a.eval(t)));
    const double r = std::abs(report.residual_expr.eval(t));
    if (r > report.max_residual || t == grid.front()) {
      report.max_residual = r;
      report.max_residual_at = t;
    }
  }
  report.threshold = options.tolerance * (1.0 + max_a);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> dist(t0, t1);
  report.symbolic_zero = true;
  for (std::size_t i = 0; i < options.random_points; ++i) {
    const double t = dist(rng);
    const double r = std::abs(report.residual_expr.eval(t));
    if (r > options.random_agreement * (1.0 + std::abs(sys.a.eval(t)))) report.symbolic_zero = false;
  }

  report.pass = report.max_residual <= report.threshold;
  if (report.pass) {
    // alpha(t0) = 1 fixes the scale, so k = c(t0) and sign(k) = sign(c).
    report.k = c0;
    report.gauge = GaugeTransform{sqrt(sys.c / k_const(c0)), Expr()};
  }
  return report;
}

ErmakovSystem ermakov_form(const SecondOrderSystem& sys, const ReducibilityReport& report) {
  if (!report.pass || !report.gauge || !report.k) {
    throw VerificationError("Ermakov form requires a passing reducibility check");
  }
  const TransformedCoefficients tc = quasi_lie_transform(sys, *report.gauge);
  return {report.gauge->alpha, -tc.b, *report.k};
}

double ermakov_coupling_deviation(const SecondOrderSystem& sys, const ReducibilityReport& report, double t0,
                                  double t1, std::size_t grid_points) {
  if (!report.pass || !report.gauge || !report.k) {
    throw VerificationError("coupling deviation requires a passing reducibility check");
  }
  const TransformedCoefficients tc = quasi_lie_transform(sys, *report.gauge);
  const Expr coupling = tc.c / report.gauge->alpha;
  double worst = 0.0;
  for (double t : uniform_grid(t0, t1, grid_points)) worst = std::max(worst, std::abs(coupling.eval(t) - *report.k));
  return worst;
}

// ---------------------------------------------------------------------------

SecondOrderSystem named_system(std::string_view name, const NamedParams& params) {
  const Expr& p = params.p;
  const Expr& q = params.q;
  const Expr dp = derivative(p);
  const Expr k = k_const(params.k);
  if (name == "chini") {
    return {-(dp / (k_const(2.0) * p)), -(q / p), k / p};
  }
  if (name == "walter") {
    return {-(dp / p), -(q / p), k / pow(p, 2.0)};
  }
  if (name == "colegrave-abdalla") {
    return {k_const(2.0) * dp / p, -pow(p, 2.0), k * pow(p, 4.0)};
  }
  if (name == "caldirola-kanai") {
    return caldirola_kanai(params.gamma0, params.omega, params.k0).as_system();
  }
  throw ConfigError("unknown named system '" + std::string(name) + "'");
}

DampedPinney caldirola_kanai(double gamma0, const Expr& omega, double k0) {
  const Expr k = k_const(k0) * exp(k_const(-2.0 * gamma0) * Expr::variable());
  return {k_const(gamma0), omega, k};
}

}  // namespace ermakov
