#pragma once

// Fixed-step classical Runge-Kutta integration, cumulative quadrature of
// coefficient expressions, and monotone maps with inversion.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ermakov/expr.hpp"

namespace ermakov {

using State = std::vector<double>;

/// Right-hand side f(t, y) written into dydt (same length as y).
using Field = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

inline constexpr double kDefaultStep = 1e-3;
inline constexpr double kDefaultXMin = 1e-8;

/// Uniform samples t0 + i*step. When (t1 - t0) is not a multiple of step the
/// last sample sits at t1 after a shortened final step.
class Trajectory {
 public:
  Trajectory(double t0, double step, std::size_t dimension);

  double t0() const noexcept { return t0_; }
  double step() const noexcept { return step_; }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return dimension_ == 0 ? 0 : data_.size() / dimension_; }
  bool empty() const noexcept { return data_.empty(); }

  double time(std::size_t i) const noexcept;
  std::span<const double> state(std::size_t i) const noexcept;
  double value(std::size_t i, std::size_t component) const noexcept { return data_[i * dimension_ + component]; }

  /// Cubic Hermite value of component `position` at t, using component
  /// `rate` as its time derivative. t must lie within the sampled range.
  double hermite(double t, std::size_t position, std::size_t rate) const;

  void push_back(std::span<const double> state);
  void set_end_time(double t1) noexcept { t_end_ = t1; }

  /// Same grid and length (the precondition of pairwise diagnostics).
  bool same_grid(const Trajectory& other) const noexcept;

 private:
  double t0_;
  double step_;
  std::size_t dimension_;
  double t_end_;
  std::vector<double> data_;
};

struct IntegrateOptions {
  /// Components whose magnitude must stay above x_min (the 1/x^3 guard).
  std::vector<std::size_t> singular_components;
  double x_min = kDefaultXMin;
};

/// Sample times t0 + i*step with a final (possibly partial) step onto t1.
std::vector<double> grid_times(double t0, double t1, double step);

/// Classical RK4 from t0 to t1 inclusive.
Trajectory rk4_integrate(const Field& field, double t0, double t1, double step, std::span<const double> initial,
                         const IntegrateOptions& options = {});

/// Samples of I(t) = integral of e from t0 to t, with I(t0) = 0, produced by
/// running the quadrature as an extra RK4 state component.
struct CumulativeSamples {
  std::vector<double> t;
  std::vector<double> value;
  std::vector<double> rate;  // e(t_i), the exact slope of I at each sample
};

CumulativeSamples cumulative_integral(const Expr& e, double t0, double t1, double step = kDefaultStep);

enum class Interpolation { Linear, Cubic };

/// Strictly monotone sampled map t -> s. Decreasing samples are accepted
/// and handled by orientation; the invariant is strictness.
class MonotoneMap {
 public:
  /// Slopes ds/dt at the samples are optional; cubic interpolation estimates
  /// them by finite differences when absent.
  MonotoneMap(std::vector<double> t, std::vector<double> s, Interpolation order = Interpolation::Cubic,
              std::optional<std::vector<double>> slopes = std::nullopt);

  /// Map built from cumulative samples, using the integrand as exact slopes.
  static MonotoneMap from_cumulative(const CumulativeSamples& samples, Interpolation order = Interpolation::Cubic);

  static MonotoneMap identity(double t0, double t1, std::size_t points = 2);

  double operator()(double t) const;
  /// ds/dt of the interpolant.
  double slope(double t) const;

  double t_min() const noexcept { return t_.front(); }
  double t_max() const noexcept { return t_.back(); }
  double s_min() const noexcept { return increasing_ ? s_.front() : s_.back(); }
  double s_max() const noexcept { return increasing_ ? s_.back() : s_.front(); }
  bool increasing() const noexcept { return increasing_; }
  Interpolation order() const noexcept { return order_; }

  std::span<const double> t_samples() const noexcept { return t_; }
  std::span<const double> s_samples() const noexcept { return s_; }

  /// Returns t with |m(t) - s| <= 1e-10 * (1 + |s|).
  double invert(double s) const;

 private:
  std::size_t segment_for_t(double t) const;
  double eval_segment(std::size_t i, double t) const;
  double slope_segment(std::size_t i, double t) const;

  std::vector<double> t_;
  std::vector<double> s_;
  std::vector<double> slopes_;
  Interpolation order_;
  bool increasing_;
};

double invert_monotone(const MonotoneMap& m, double s);

}  // namespace ermakov
