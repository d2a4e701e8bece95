#pragma once

// Reductions of x'' = a(t) x' + b(t) x + c(t) / x^3 towards Milne-Pinney form:
// damping removal by the rescaling x = zeta(t) y, time reparametrization
// ds/dt = alpha(t), and the gauge x = x', v = alpha v' + beta x' together
// with the reducibility condition a = c' / (2c).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "ermakov/expr.hpp"
#include "ermakov/odeint.hpp"

namespace ermakov {

/// x'' = a x' + b x + c / x^3.
struct SecondOrderSystem {
  Expr a;
  Expr b;
  Expr c;
};

/// First-order form x' = v, v' = a v + b x + c / x^3 on state (x, v).
Field second_order_field(const SecondOrderSystem& sys);

/// Integrates `sys` with the 1/x^3 guard on component 0. Rows are (x, v).
Trajectory integrate_system(const SecondOrderSystem& sys, double t0, double t1, double step, double x0, double v0,
                            double x_min = kDefaultXMin);

// ---------------------------------------------------------------------------
// Damping removal.

/// zeta(t) = zeta0 * exp(-1/2 * integral_{t0}^{t} gamma), sampled on a grid
/// and interpolated with the exact slopes -gamma * zeta / 2.
class ZetaFactor {
 public:
  ZetaFactor(const Expr& gamma, double zeta0, double t0, double t1, double step = kDefaultStep);

  double operator()(double t) const;
  /// d zeta / dt = -gamma(t) zeta(t) / 2.
  double derivative(double t) const;

  double zeta0() const noexcept { return zeta0_; }
  double t0() const noexcept { return samples_.t.front(); }
  double t1() const noexcept { return samples_.t.back(); }

  /// integral_{t0}^{t} gamma, cubic Hermite between samples.
  double integral(double t) const;

 private:
  Expr gamma_;
  double zeta0_;
  double step_;
  CumulativeSamples samples_;
};

ZetaFactor zeta_factor(const Expr& gamma, double zeta0, double t0, double t1, double step = kDefaultStep);

/// Omega^2 = omega^2 - gamma^2 / 4 - gamma' / 2.
Expr omega_reduced(const Expr& omega, const Expr& gamma);

/// x'' + gamma x' + omega^2 x = k(t) / x^3.
struct DampedPinney {
  Expr gamma;
  Expr omega;
  Expr k;

  SecondOrderSystem as_system() const;
};

/// y'' + Omega^2 y = k(t) / (zeta^4 y^3) together with the map x = zeta y.
class ReducedPinney {
 public:
  ReducedPinney(DampedPinney original, Expr omega2, ZetaFactor zeta);

  const Expr& omega2() const noexcept { return omega2_; }
  const ZetaFactor& zeta() const noexcept { return zeta_; }
  const DampedPinney& original() const noexcept { return original_; }

  /// k(t) / zeta(t)^4.
  double coupling(double t) const;

  /// y' = w, w' = -Omega^2 y + coupling / y^3 on state (y, w).
  Field field() const;

  /// (x, x') -> (y, y') and back, at time t.
  std::pair<double, double> push_forward(double t, double x, double xdot) const;
  std::pair<double, double> pull_back(double t, double y, double ydot) const;

 private:
  DampedPinney original_;
  Expr omega2_;
  ZetaFactor zeta_;
};

ReducedPinney remove_damping(const DampedPinney& sys, double t0, double t1, double step = kDefaultStep,
                             double zeta0 = 1.0);

// ---------------------------------------------------------------------------
// Time reparametrization.

/// x'' = A x' + B x + C / x^3 in s, with the coefficients assembled as
/// expressions in t and evaluated at t(s).
class ReparametrizedSystem {
 public:
  ReparametrizedSystem(SecondOrderSystem in_t, Expr alpha, MonotoneMap s_of_t);

  /// A = (a - alpha'/alpha)/alpha, B = b/alpha^2, C = c/alpha^2, all in t.
  const SecondOrderSystem& coefficients_in_t() const noexcept { return in_t_; }
  const Expr& alpha() const noexcept { return alpha_; }
  const MonotoneMap& map() const noexcept { return map_; }

  double s_of_t(double t) const { return map_(t); }
  double t_of_s(double s) const { return map_.invert(s); }

  /// Coefficients at parameter value s.
  double A(double s) const { return in_t_.a.eval(t_of_s(s)); }
  double B(double s) const { return in_t_.b.eval(t_of_s(s)); }
  double C(double s) const { return in_t_.c.eval(t_of_s(s)); }

  /// State (x, dx/ds) in the s domain.
  Field field() const;

  /// dx/ds = (dx/dt) / alpha(t).
  double to_s_velocity(double t, double xdot) const { return xdot / alpha_.eval(t); }

  double s_begin() const noexcept { return map_.s_min(); }
  double s_end() const noexcept { return map_.s_max(); }

 private:
  SecondOrderSystem in_t_;
  Expr alpha_;
  MonotoneMap map_;
};

/// s(t) = integral_{t0}^{t} alpha. Throws DomainError if alpha changes sign
/// (or vanishes) on the grid.
ReparametrizedSystem reparametrize(const SecondOrderSystem& sys, const Expr& alpha, double t0, double t1,
                                   double step = kDefaultStep);

// ---------------------------------------------------------------------------
// Quasi-Lie gauge.

/// x = x', v = alpha(t) v' + beta(t) x'.
struct GaugeTransform {
  Expr alpha;
  Expr beta;

  /// x' = x, v' = -(beta/alpha) x + v / alpha.
  GaugeTransform inverse() const;
};

/// Coefficients of X' = a X1 + b X2 + c X3 + d X4 + e X5, i.e. the system
/// x' = d v + e x, v' = a v + b x + c / x^3.
struct TransformedCoefficients {
  Expr a;
  Expr b;
  Expr c;
  Expr d;
  Expr e;

  static TransformedCoefficients from_system(const SecondOrderSystem& sys);
};

/// Coefficients of the system after the gauge (general V-form input).
TransformedCoefficients quasi_lie_transform(const TransformedCoefficients& coeffs, const GaugeTransform& g);

/// a' = a - beta - alpha'/alpha, b' = (b + a beta - beta^2 - beta')/alpha,
/// c' = c/alpha, d' = alpha, e' = beta.
TransformedCoefficients quasi_lie_transform(const SecondOrderSystem& sys, const GaugeTransform& g);

struct ReducibilityOptions {
  std::size_t grid_points = 1001;
  double tolerance = 1e-9;
  std::size_t random_points = 20;
  double random_agreement = 1e-13;
  std::uint64_t seed = 0x5eed;
};

struct ReducibilityReport {
  bool pass = false;
  /// c'/(2c) - a as an expression.
  Expr residual_expr;
  double max_residual = 0.0;
  double max_residual_at = 0.0;
  /// tol * (1 + max |a|) on the grid.
  double threshold = 0.0;
  /// Residual below random_agreement at all random points.
  bool symbolic_zero = false;
  /// Set on pass: alpha(t0) = 1, so k = c(t0); beta = 0.
  std::optional<double> k;
  std::optional<GaugeTransform> gauge;
};

ReducibilityReport reducibility_check(const SecondOrderSystem& sys, double t0, double t1,
                                      const ReducibilityOptions& options = {});

/// x' = f v, v' = -omega^2 x + f k / x^3 with f = alpha.
struct ErmakovSystem {
  Expr f;
  Expr omega2;
  double k = 0.0;
};

/// Ermakov form from a passing reducibility report: f = alpha, omega^2 = -b/alpha.
ErmakovSystem ermakov_form(const SecondOrderSystem& sys, const ReducibilityReport& report);

/// max over the grid of |c'(t)/alpha(t) - k|.
double ermakov_coupling_deviation(const SecondOrderSystem& sys, const ReducibilityReport& report, double t0,
                                  double t1, std::size_t grid_points = 1001);

// ---------------------------------------------------------------------------
// Named literature systems.

struct NamedParams {
  Expr p = Expr::constant(1.0);
  Expr q = Expr::constant(1.0);
  double k = 1.0;
  // Caldirola-Kanai.
  double gamma0 = 0.0;
  Expr omega = Expr::constant(1.0);
  double k0 = 1.0;
};

/// "chini", "walter", "colegrave-abdalla", "caldirola-kanai".
SecondOrderSystem named_system(std::string_view name, const NamedParams& params);

/// The Caldirola-Kanai damped Pinney equation with k(t) = k0 exp(-2 gamma0 t).
DampedPinney caldirola_kanai(double gamma0, const Expr& omega, double k0);

}  // namespace ermakov
