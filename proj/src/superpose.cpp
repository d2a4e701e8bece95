#include "ermakov/superpose.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ermakov/error.hpp"

namespace ermakov {

namespace {

// Rounding slack for boundary cases such as 4 I1 I2 = k W^2.
constexpr double kBoundarySlack = 1e-12;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void check_pair(const Trajectory& a, const Trajectory& b) {
  if (!a.same_grid(b)) throw ConfigError("trajectories do not share a grid");
  if (a.dimension() < 2 || b.dimension() < 2) throw ConfigError("trajectories need (position, velocity) states");
}

}  // namespace

double ermakov_invariant(PhasePoint xp, PhasePoint yp, double k, double F_at_t) {
  if (xp.x == 0.0) throw DomainError("Ermakov invariant undefined at x = 0");
  const double cross = yp.x * xp.v - xp.x * yp.v;
  const double ratio = yp.x / xp.x;
  return 0.5 * (std::exp(2.0 * F_at_t) * cross * cross + k * ratio * ratio);
}

double wronskian(PhasePoint yp, PhasePoint zp, double F_at_t) {
  return std::exp(F_at_t) * (yp.x * zp.v - zp.x * yp.v);
}

double SuperpositionConstants::discriminant(double k) const {
  if (k > 0.0 && (I1 < 0.0 || I2 < 0.0)) {
    throw VerificationError("invariants must be non-negative for k > 0 (I1=" + fmt(I1) + ", I2=" + fmt(I2) + ")");
  }
  const double lhs = 4.0 * I1 * I2;
  const double rhs = k * W * W;
  const double d = lhs - rhs;
  if (d >= 0.0) return std::sqrt(d);
  if (d >= -kBoundarySlack * (std::abs(lhs) + std::abs(rhs))) return 0.0;
  throw VerificationError("reality condition violated: 4*I1*I2 = " + fmt(lhs) + " < k*W^2 = " + fmt(rhs));
}

PhasePoint superpose_with_rate(PhasePoint y, PhasePoint z, const SuperpositionConstants& c, double k) {
  if (c.W == 0.0) throw DomainError("superposition requires W != 0");
  if (c.sign != 1 && c.sign != -1) throw ConfigError("branch sign must be +1 or -1");
  const double d = c.discriminant(k);
  const double mixed = c.sign * d;
  const double radicand = c.I2 * y.x * y.x + c.I1 * z.x * z.x + mixed * y.x * z.x;
  const double scale = std::abs(c.I2 * y.x * y.x) + std::abs(c.I1 * z.x * z.x) + std::abs(mixed * y.x * z.x);
  double r = radicand;
  if (r < 0.0) {
    if (r < -kBoundarySlack * scale) {
      throw DomainError("superposition radicand negative (" + fmt(radicand) + ")");
    }
    r = 0.0;
  }
  const double w2 = c.W * c.W;
  const double x = std::sqrt(2.0) / std::abs(c.W) * std::sqrt(r);
  const double rate = 2.0 * c.I2 * y.x * y.v + 2.0 * c.I1 * z.x * z.v + mixed * (y.v * z.x + y.x * z.v);
  const double xdot = x != 0.0 ? rate / (w2 * x) : 0.0;
  return {x, xdot};
}

double superpose(double y, double z, const SuperpositionConstants& consts, double k) {
  return superpose_with_rate({y, 0.0}, {z, 0.0}, consts, k).x;
}

SuperpositionConstants constants_from_state(PhasePoint x, PhasePoint y, PhasePoint z, double k, double F_at_t) {
  SuperpositionConstants c;
  c.I1 = ermakov_invariant(x, y, k, F_at_t);
  c.I2 = ermakov_invariant(x, z, k, F_at_t);
  c.W = wronskian(y, z, F_at_t);
  c.sign = +1;
  const double d = c.discriminant(k);
  // Choose the branch whose rate matches x's velocity.
  const double base = 2.0 * c.I2 * y.x * y.v + 2.0 * c.I1 * z.x * z.v;
  const double target = c.W * c.W * x.x * x.v;
  const double branch = d * (y.v * z.x + y.x * z.v);
  if ((target - base) * branch < 0.0) c.sign = -1;
  return c;
}

Field linear_oscillator_field(const Expr& q, const Expr& F) {
  return [q, F](double t, std::span<const double> s, std::span<double> ds) {
    const double f = F.eval(t);
    ds[0] = std::exp(-f) * s[1];
    ds[1] = -q.eval(t) * std::exp(f) * s[0];
  };
}

Field milne_pinney_field(const Expr& q, const Expr& F, double k) {
  return [q, F, k](double t, std::span<const double> s, std::span<double> ds) {
    const double f = F.eval(t);
    const double x = s[0];
    const double em = std::exp(-f);
    ds[0] = em * s[1];
    ds[1] = -q.eval(t) * std::exp(f) * x + em * k / (x * x * x);
  };
}

namespace {

// Phase (x, v) -> velocity (x, dx/dt) on the same grid.
Trajectory to_velocity_form(const Trajectory& phase, const Expr& F) {
  Trajectory out(phase.t0(), phase.step(), 2);
  for (std::size_t i = 0; i < phase.size(); ++i) {
    const double t = phase.time(i);
    const double row[] = {phase.value(i, 0), std::exp(-F.eval(t)) * phase.value(i, 1)};
    out.push_back(row);
  }
  out.set_end_time(phase.time(phase.size() - 1));
  return out;
}

}  // namespace

Trajectory integrate_milne_pinney(const Expr& q, const Expr& F, double k, double t0, double t1, double step,
                                  PhasePoint x0, double x_min) {
  IntegrateOptions opts;
  opts.singular_components = {0};
  opts.x_min = x_min;
  const double init[] = {x0.x, std::exp(F.eval(t0)) * x0.v};
  return to_velocity_form(rk4_integrate(milne_pinney_field(q, F, k), t0, t1, step, init, opts), F);
}

Trajectory integrate_linear(const Expr& q, const Expr& F, double t0, double t1, double step, PhasePoint phase0) {
  const double init[] = {phase0.x, phase0.v};
  return to_velocity_form(rk4_integrate(linear_oscillator_field(q, F), t0, t1, step, init), F);
}

GeneralSolution general_solution(const Expr& q, const Expr& F, double k, SuperpositionConstants consts, double t0,
                                 double t1, double step, const LinearPairOptions& pair) {
  Trajectory y = integrate_linear(q, F, t0, t1, step, pair.y0);
  Trajectory z = integrate_linear(q, F, t0, t1, step, pair.z0);
  consts.W = pair.y0.x * pair.z0.v - pair.z0.x * pair.y0.v;
  if (consts.W == 0.0) throw DomainError("linear pair is dependent (W = 0 at t0)");
  consts.discriminant(k);

  Trajectory x(t0, step, 2);
  GeneralSolution out{x, y, z, consts, {}, {}, {}};
  out.I1.reserve(y.size());
  out.I2.reserve(y.size());
  out.W.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double t = y.time(i);
    const double f = F.eval(t);
    const PhasePoint yp{y.value(i, 0), y.value(i, 1)};
    const PhasePoint zp{z.value(i, 0), z.value(i, 1)};
    const PhasePoint xp = superpose_with_rate(yp, zp, consts, k);
    const double row[] = {xp.x, xp.v};
    out.x.push_back(row);
    out.I1.push_back(xp.x != 0.0 ? ermakov_invariant(xp, yp, k, f) : std::nan(""));
    out.I2.push_back(xp.x != 0.0 ? ermakov_invariant(xp, zp, k, f) : std::nan(""));
    out.W.push_back(wronskian(yp, zp, f));
  }
  out.x.set_end_time(y.time(y.size() - 1));
  return out;
}

GeneralSolution general_solution(const ErmakovSystem& sys, SuperpositionConstants consts, double t0, double t1,
                                 double step, const LinearPairOptions& pair) {
  const Expr F = -log(sys.f);
  const Expr q = sys.omega2 * sys.f;
  return general_solution(q, F, sys.k, consts, t0, t1, step, pair);
}

double invariant_drift(const Trajectory& x, const Trajectory& y, double k, const Expr& F) {
  check_pair(x, y);
  auto at = [&](std::size_t i) {
    const double xv = x.value(i, 0);
    if (xv == 0.0) throw DomainError("x vanishes at t=" + fmt(x.time(i)));
    return ermakov_invariant({xv, x.value(i, 1)}, {y.value(i, 0), y.value(i, 1)}, k, F.eval(x.time(i)));
  };
  const double first = at(0);
  double worst = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) worst = std::max(worst, std::abs(at(i) - first));
  return worst;
}

double wronskian_drift(const Trajectory& y, const Trajectory& z, const Expr& F) {
  check_pair(y, z);
  auto at = [&](std::size_t i) {
    return wronskian({y.value(i, 0), y.value(i, 1)}, {z.value(i, 0), z.value(i, 1)}, F.eval(y.time(i)));
  };
  const double first = at(0);
  double worst = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) worst = std::max(worst, std::abs(at(i) - first));
  return worst;
}

}  // namespace ermakov
