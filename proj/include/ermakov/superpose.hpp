#pragma once

// Ermakov invariants, the Wronskian and the nonlinear superposition rule
//
//   x = sqrt(2)/|W| * (I2 y^2 + I1 z^2 +- sqrt(4 I1 I2 - k W^2) y z)^(1/2)
//
// expressing Milne-Pinney solutions through two solutions y, z of the
// associated linear oscillator x'' + F' x' + q x = 0.
//
// Phase convention: the linear system is x' = e^-F v, v' = -q e^F x, so the
// phase momentum is v = e^F dx/dt. Trajectories returned here hold the
// velocity form (x, dx/dt); with F = 0 both forms coincide.

#include <vector>

#include "ermakov/expr.hpp"
#include "ermakov/odeint.hpp"
#include "ermakov/reduce.hpp"

namespace ermakov {

/// Position and time derivative at one instant.
struct PhasePoint {
  double x = 0.0;
  double v = 0.0;
};

/// 1/2 (e^{2F} (y xdot - x ydot)^2 + k (y/x)^2). Throws DomainError if x = 0.
double ermakov_invariant(PhasePoint xp, PhasePoint yp, double k, double F_at_t = 0.0);

/// e^F (y zdot - z ydot), which is y v_z - z v_y in phase variables.
double wronskian(PhasePoint yp, PhasePoint zp, double F_at_t = 0.0);

struct SuperpositionConstants {
  double I1 = 0.0;
  double I2 = 0.0;
  double W = 1.0;
  int sign = +1;

  /// sqrt(4 I1 I2 - k W^2); throws VerificationError when the reality
  /// condition fails. Equality (up to rounding) gives zero.
  double discriminant(double k) const;
};

/// x per the superposition formula for the stored branch.
double superpose(double y, double z, const SuperpositionConstants& consts, double k);

/// (x, xdot) from (y, ydot) and (z, zdot).
PhasePoint superpose_with_rate(PhasePoint y, PhasePoint z, const SuperpositionConstants& consts, double k);

/// Constants (I1, I2, W, branch) matching the Milne-Pinney state `x` given
/// the linear states `y`, `z` at the same instant (velocity form).
SuperpositionConstants constants_from_state(PhasePoint x, PhasePoint y, PhasePoint z, double k, double F_at_t = 0.0);

/// x'' + F' x' + q x = 0 as a phase-space field on (x, v).
Field linear_oscillator_field(const Expr& q, const Expr& F);

/// x' = e^-F v, v' = -q e^F x + e^-F k / x^3 on (x, v).
Field milne_pinney_field(const Expr& q, const Expr& F, double k);

/// Integrates the Milne-Pinney partner from velocity-form initial data.
Trajectory integrate_milne_pinney(const Expr& q, const Expr& F, double k, double t0, double t1, double step,
                                  PhasePoint x0, double x_min = kDefaultXMin);

/// Integrates the linear oscillator from phase-form initial data (position, v).
Trajectory integrate_linear(const Expr& q, const Expr& F, double t0, double t1, double step, PhasePoint phase0);

struct GeneralSolution {
  Trajectory x;  // (x, dx/dt)
  Trajectory y;  // (y, dy/dt)
  Trajectory z;  // (z, dz/dt)
  SuperpositionConstants constants;
  std::vector<double> I1;  // per-sample invariant diagnostics
  std::vector<double> I2;
  std::vector<double> W;
};

struct LinearPairOptions {
  /// Phase-form data at t0; the defaults give W = 1.
  PhasePoint y0{1.0, 0.0};
  PhasePoint z0{0.0, 1.0};
};

/// Integrates two linear solutions, takes W from them at t0 (consts.W is
/// overwritten) and applies the superposition rule pointwise.
GeneralSolution general_solution(const Expr& q, const Expr& F, double k, SuperpositionConstants consts, double t0,
                                 double t1, double step, const LinearPairOptions& pair = {});

/// Same for an Ermakov system x' = f v, v' = -omega^2 x + f k / x^3
/// (f > 0), i.e. q = omega^2 f and F = -log f.
GeneralSolution general_solution(const ErmakovSystem& sys, SuperpositionConstants consts, double t0, double t1,
                                 double step, const LinearPairOptions& pair = {});

/// max_i |I(t_i) - I(t_0)| for the invariant of (x, y).
double invariant_drift(const Trajectory& x, const Trajectory& y, double k, const Expr& F);

/// max_i |W(t_i) - W(t_0)| for the pair (y, z).
double wronskian_drift(const Trajectory& y, const Trajectory& z, const Expr& F);

}  // namespace ermakov
