#include "ermakov/odeint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ermakov/error.hpp"

namespace ermakov {

namespace {

struct Grid {
  std::size_t steps;  // number of intervals
  bool partial_last;  // final interval shorter than step
};

Grid make_grid(double t0, double t1, double step) {
  const double ratio = (t1 - t0) / step;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) {
    return {static_cast<std::size_t>(nearest), false};
  }
  return {static_cast<std::size_t>(std::floor(ratio)) + 1, true};
}

void guard(const IntegrateOptions& options, double t, std::span<const double> y) {
  for (std::size_t j : options.singular_components) {
    if (std::abs(y[j]) < options.x_min) {
      std::ostringstream os;
      os.precision(17);
      os << "singularity guard: |y[" << j << "]| = " << std::abs(y[j]) << " < " << options.x_min << " at t=" << t;
      throw SingularityError(os.str(), t, y[j]);
    }
  }
}

// Cubic Hermite basis on [a, b].
double hermite_value(double a, double b, double ya, double yb, double da, double db, double t) {
  const double h = b - a;
  const double u = (t - a) / h;
  const double u2 = u * u;
  const double u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * ya + (u3 - 2 * u2 + u) * h * da + (-2 * u3 + 3 * u2) * yb + (u3 - u2) * h * db;
}

double hermite_slope(double a, double b, double ya, double yb, double da, double db, double t) {
  const double h = b - a;
  const double u = (t - a) / h;
  const double u2 = u * u;
  return ((6 * u2 - 6 * u) * ya + (-6 * u2 + 6 * u) * yb) / h + (3 * u2 - 4 * u + 1) * da + (3 * u2 - 2 * u) * db;
}

}  // namespace

Trajectory::Trajectory(double t0, double step, std::size_t dimension)
    : t0_(t0), step_(step), dimension_(dimension), t_end_(t0) {
  if (!(step > 0.0)) throw DomainError("trajectory step must be positive");
  if (dimension == 0) throw DomainError("trajectory dimension must be at least 1");
}

double Trajectory::time(std::size_t i) const noexcept {
  if (i + 1 == size() && i > 0) return t_end_;
  return t0_ + static_cast<double>(i) * step_;
}

std::span<const double> Trajectory::state(std::size_t i) const noexcept {
  return {data_.data() + i * dimension_, dimension_};
}

void Trajectory::push_back(std::span<const double> state) {
  if (state.size() != dimension_) throw DomainError("state dimension does not match trajectory");
  data_.insert(data_.end(), state.begin(), state.end());
}

bool Trajectory::same_grid(const Trajectory& other) const noexcept {
  return t0_ == other.t0_ && step_ == other.step_ && size() == other.size() && t_end_ == other.t_end_;
}

double Trajectory::hermite(double t, std::size_t position, std::size_t rate) const {
  const std::size_t n = size();
  if (n < 2) throw DomainError("hermite interpolation needs at least two samples");
  const double tol = 1e-12 * (1.0 + std::abs(t));
  if (t < time(0) - tol || t > time(n - 1) + tol) {
    throw DomainError("interpolation time outside trajectory range");
  }
  auto i = static_cast<std::size_t>(std::max(0.0, std::floor((t - t0_) / step_)));
  i = std::min(i, n - 2);
  const double a = time(i);
  const double b = time(i + 1);
  return hermite_value(a, b, value(i, position), value(i + 1, position), value(i, rate), value(i + 1, rate), t);
}

std::vector<double> grid_times(double t0, double t1, double step) {
  if (!(step > 0.0)) throw DomainError("integration step must be positive");
  if (!(t1 > t0)) throw DomainError("integration requires t1 > t0");
  const Grid grid = make_grid(t0, t1, step);
  std::vector<double> out;
  out.reserve(grid.steps + 1);
  for (std::size_t i = 0; i < grid.steps; ++i) out.push_back(t0 + static_cast<double>(i) * step);
  out.push_back(t1);
  return out;
}

Trajectory rk4_integrate(const Field& field, double t0, double t1, double step, std::span<const double> initial,
                         const IntegrateOptions& options) {
  if (!(step > 0.0)) throw DomainError("integration step must be positive");
  if (!(t1 > t0)) throw DomainError("integration requires t1 > t0");
  const std::size_t d = initial.size();
  for (std::size_t j : options.singular_components) {
    if (j >= d) throw DomainError("singular component index out of range");
  }

  Trajectory traj(t0, step, d);
  const Grid grid = make_grid(t0, t1, step);

  State y(initial.begin(), initial.end());
  State k1(d), k2(d), k3(d), k4(d), tmp(d);
  guard(options, t0, y);
  traj.push_back(y);

  auto eval = [&](double t, const State& state, State& out) {
    guard(options, t, state);
    field(t, state, out);
  };

  for (std::size_t i = 0; i < grid.steps; ++i) {
    const double ta = t0 + static_cast<double>(i) * step;
    const double tb = (i + 1 == grid.steps) ? t1 : t0 + static_cast<double>(i + 1) * step;
    const double h = tb - ta;

    eval(ta, y, k1);
    for (std::size_t j = 0; j < d; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
    eval(ta + 0.5 * h, tmp, k2);
    for (std::size_t j = 0; j < d; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
    eval(ta + 0.5 * h, tmp, k3);
    for (std::size_t j = 0; j < d; ++j) tmp[j] = y[j] + h * k3[j];
    eval(tb, tmp, k4);
    for (std::size_t j = 0; j < d; ++j) y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);

    guard(options, tb, y);
    traj.push_back(y);
  }
  traj.set_end_time(t1);
  return traj;
}

CumulativeSamples cumulative_integral(const Expr& e, double t0, double t1, double step) {
  const Field quadrature = [&e](double t, std::span<const double>, std::span<double> dydt) { dydt[0] = e.eval(t); };
  const double start[] = {0.0};
  const Trajectory traj = rk4_integrate(quadrature, t0, t1, step, start);

  CumulativeSamples out;
  out.t.reserve(traj.size());
  out.value.reserve(traj.size());
  out.rate.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out.t.push_back(traj.time(i));
    out.value.push_back(traj.value(i, 0));
    out.rate.push_back(e.eval(traj.time(i)));
  }
  return out;
}

MonotoneMap::MonotoneMap(std::vector<double> t, std::vector<double> s, Interpolation order,
                         std::optional<std::vector<double>> slopes)
    : t_(std::move(t)), s_(std::move(s)), order_(order), increasing_(true) {
  const std::size_t n = t_.size();
  if (n < 2 || s_.size() != n) throw DomainError("monotone map needs at least two (t, s) pairs of equal count");
  increasing_ = s_[1] > s_[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (!(t_[i] > t_[i - 1])) throw DomainError("monotone map: t samples must be strictly increasing");
    const bool ok = increasing_ ? s_[i] > s_[i - 1] : s_[i] < s_[i - 1];
    if (!ok) {
      std::ostringstream os;
      os.precision(17);
      os << "monotone map: s samples not strictly monotone near t=" << t_[i];
      throw DomainError(os.str());
    }
  }

  if (slopes) {
    if (slopes->size() != n) throw DomainError("monotone map: slope count does not match samples");
    slopes_ = std::move(*slopes);
    return;
  }
  slopes_.resize(n);
  if (n == 2) {
    slopes_[0] = slopes_[1] = (s_[1] - s_[0]) / (t_[1] - t_[0]);
    return;
  }
  // Three-point derivative estimates, exact for quadratics.
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = t_[i] - t_[i - 1];
    const double h1 = t_[i + 1] - t_[i];
    slopes_[i] = (h1 * h1 * (s_[i] - s_[i - 1]) + h0 * h0 * (s_[i + 1] - s_[i])) / (h0 * h1 * (h0 + h1));
  }
  {
    const double h0 = t_[1] - t_[0];
    const double h1 = t_[2] - t_[1];
    const double d0 = (s_[1] - s_[0]) / h0;
    const double d1 = (s_[2] - s_[1]) / h1;
    slopes_[0] = d0 - h0 * (d1 - d0) / (h0 + h1);
  }
  {
    const double h0 = t_[n - 2] - t_[n - 3];
    const double h1 = t_[n - 1] - t_[n - 2];
    const double d0 = (s_[n - 2] - s_[n - 3]) / h0;
    const double d1 = (s_[n - 1] - s_[n - 2]) / h1;
    slopes_[n - 1] = d1 + h1 * (d1 - d0) / (h0 + h1);
  }
}

MonotoneMap MonotoneMap::from_cumulative(const CumulativeSamples& samples, Interpolation order) {
  return MonotoneMap(samples.t, samples.value, order, samples.rate);
}

MonotoneMap MonotoneMap::identity(double t0, double t1, std::size_t points) {
  points = std::max<std::size_t>(points, 2);
  std::vector<double> t(points);
  for (std::size_t i = 0; i < points; ++i) {
    t[i] = (i + 1 == points) ? t1 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  std::vector<double> slopes(points, 1.0);
  return MonotoneMap(t, t, Interpolation::Linear, std::move(slopes));
}

std::size_t MonotoneMap::segment_for_t(double t) const {
  const double tol = 1e-12 * (1.0 + std::abs(t));
  if (t < t_.front() - tol || t > t_.back() + tol) {
    std::ostringstream os;
    os.precision(17);
    os << "monotone map: t=" << t << " outside [" << t_.front() << ", " << t_.back() << "]";
    throw DomainError(os.str());
  }
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
  return std::min(i, t_.size() - 2);
}

double MonotoneMap::eval_segment(std::size_t i, double t) const {
  const double a = t_[i];
  const double b = t_[i + 1];
  if (order_ == Interpolation::Linear) return s_[i] + (s_[i + 1] - s_[i]) * (t - a) / (b - a);
  return hermite_value(a, b, s_[i], s_[i + 1], slopes_[i], slopes_[i + 1], t);
}

double MonotoneMap::slope_segment(std::size_t i, double t) const {
  const double a = t_[i];
  const double b = t_[i + 1];
  if (order_ == Interpolation::Linear) return (s_[i + 1] - s_[i]) / (b - a);
  return hermite_slope(a, b, s_[i], s_[i + 1], slopes_[i], slopes_[i + 1], t);
}

double MonotoneMap::operator()(double t) const { return eval_segment(segment_for_t(t), t); }

double MonotoneMap::slope(double t) const { return slope_segment(segment_for_t(t), t); }

double MonotoneMap::invert(double s) const {
  const double tol = 1e-12 * (1.0 + std::abs(s));
  if (s < s_min() - tol || s > s_max() + tol) {
    std::ostringstream os;
    os.precision(17);
    os << "monotone map: s=" << s << " outside sampled range [" << s_min() << ", " << s_max() << "]";
    throw DomainError(os.str());
  }
  const std::size_t n = s_.size();

  // Bracketing bisection over the samples.
  std::size_t lo = 0;
  std::size_t hi = n - 1;
  auto before = [&](std::size_t i) { return increasing_ ? s_[i] <= s : s_[i] >= s; };
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (before(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const std::size_t i = lo;
  const double a = t_[i];
  const double b = t_[i + 1];
  const double sa = s_[i];
  const double sb = s_[i + 1];
  if (s == sa) return a;
  if (s == sb) return b;

  double guess = a + (b - a) * std::clamp((s - sa) / (sb - sa), 0.0, 1.0);
  if (order_ == Interpolation::Linear) return guess;

  // Safeguarded Newton on the local cubic, falling back to bisection.
  double left = a;
  double right = b;
  const double target = 1e-13 * (1.0 + std::abs(s));
  const double sign = increasing_ ? 1.0 : -1.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double g = eval_segment(i, guess) - s;
    if (std::abs(g) <= target) break;
    if (sign * g > 0.0) {
      right = guess;
    } else {
      left = guess;
    }
    const double dg = slope_segment(i, guess);
    double next = dg != 0.0 ? guess - g / dg : 0.5 * (left + right);
    if (!(next > left && next < right)) next = 0.5 * (left + right);
    if (right - left <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(left), std::abs(right))) {
      guess = next;
      break;
    }
    guess = next;
  }
  return guess;
}

double invert_monotone(const MonotoneMap& m, double s) { return m.invert(s); }

}  // namespace ermakov
