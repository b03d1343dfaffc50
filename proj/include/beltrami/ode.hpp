/// @file ode.hpp
/// @brief Dormand-Prince 5(4) integrator with cubic Hermite dense output.
#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "beltrami/errors.hpp"

namespace beltrami::ode {

template <int Dim>
using State = Eigen::Matrix<double, Dim, 1>;

/// One accepted step; hermite() interpolates between its end points.
template <int Dim>
struct Step {
  double t0 = 0, t1 = 0;
  State<Dim> y0, y1, f0, f1;

  State<Dim> hermite(double t) const {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * f0 + (-2 * s3 + 3 * s2) * y1 +
           (s3 - s2) * h * f1;
  }
};

struct Stats {
  long steps = 0;
  long rejected = 0;
  long evaluations = 0;
  double tolerance = 0.0;
};

struct Options {
  double rtol = 1e-10;
  double atol = 1e-10;
  double h_init = 0.0;  // 0 picks a starting step automatically
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 50'000'000;
};

/// Integrates y' = f(t, y) from t0 towards t1 (either direction). The
/// observer sees every accepted step and may return false to stop early.
/// Returns the time reached; y holds the state there.
template <int Dim>
class DormandPrince {
 public:
  using Vec = State<Dim>;
  using Rhs = std::function<Vec(double, const Vec&)>;
  using Observer = std::function<bool(const Step<Dim>&)>;

  DormandPrince(Rhs f, Options opt) : f_(std::move(f)), opt_(opt) {}

  double integrate(double t0, Vec& y, double t1, const Observer& observe = {}) {
    stats_.tolerance = std::max(opt_.rtol, opt_.atol);
    if (t1 == t0) return t0;
    const double dir = t1 > t0 ? 1.0 : -1.0;
    double t = t0;
    Vec f0 = eval(t, y);
    double h = opt_.h_init > 0 ? opt_.h_init : initial_step(t, y, f0, dir);
    h = std::min(h, opt_.h_max);
    const double h_floor = 1e-15 * std::max(1.0, std::abs(t1 - t0));
    while (dir * (t1 - t) > 0) {
      if (stats_.steps + stats_.rejected > opt_.max_steps) throw NumericalError("ode: step budget exhausted");
      bool last = false;
      if (h >= std::abs(t1 - t)) {
        h = std::abs(t1 - t);
        last = true;
      }
      Vec y1, f1;
      const double err = attempt(t, y, f0, dir * h, y1, f1);
      if (!(err <= 1.0)) {
        if (!std::isfinite(err)) {
          h *= 0.2;
        } else {
          h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
        ++stats_.rejected;
        if (h < h_floor) throw NumericalError("ode: step size underflow");
        continue;
      }
      Step<Dim> st{t, last ? t1 : t + dir * h, y, y1, f0, f1};
      t = st.t1;
      y = y1;
      f0 = f1;
      ++stats_.steps;
      if (observe && !observe(st)) return t;
      const double grow = err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
      h = std::min(h * grow, opt_.h_max);
    }
    return t;
  }

  /// Integrates with no observer and returns the end state.
  Vec advance(double t0, Vec y, double t1) {
    integrate(t0, y, t1);
    return y;
  }

  const Stats& stats() const { return stats_; }
  const Options& options() const { return opt_; }

 private:
  Vec eval(double t, const Vec& y) {
    ++stats_.evaluations;
    return f_(t, y);
  }

  double initial_step(double t, const Vec& y, const Vec& f0, double dir) {
    const Vec scale = (opt_.atol + opt_.rtol * y.array().abs()).matrix();
    const double d0 = (y.array() / scale.array()).matrix().norm();
    const double d1 = (f0.array() / scale.array()).matrix().norm();
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    const Vec y1 = y + dir * h0 * f0;
    const Vec f1 = eval(t + dir * h0, y1);
    const double d2 = ((f1 - f0).array() / scale.array()).matrix().norm() / h0;
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                 : std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::min(100 * h0, h1);
  }

  // Returns the scaled error norm; writes the fifth-order solution and its slope.
  double attempt(double t, const Vec& y, const Vec& k1, double h, Vec& y5, Vec& k7) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    try {
      const Vec k2 = eval(t + c2 * h, y + h * a21 * k1);
      const Vec k3 = eval(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      const Vec k4 = eval(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const Vec k5 = eval(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Vec k6 = eval(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7 = eval(t + h, y5);
      const Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double worst = 0.0;
      for (int i = 0; i < y.size(); ++i) {
        const double sc = opt_.atol + opt_.rtol * std::max(std::abs(y(i)), std::abs(y5(i)));
        worst = std::max(worst, std::abs(err(i)) / sc);
      }
      return std::isfinite(worst) ? worst : std::numeric_limits<double>::infinity();
    } catch (const ArgumentError&) {
      // A stage left the right-hand side's domain: shrink the step.
      return std::numeric_limits<double>::infinity();
    }
  }

  Rhs f_;
  Options opt_;
  Stats stats_;
};

/// Root of g along a step: bracketed on the Hermite interpolant, then
/// polished by re-integrating from the step start to the candidate time.
/// Returns the crossing time; y_cross receives the re-integrated state.
template <int Dim>
double locate_crossing(DormandPrince<Dim>& solver, const Step<Dim>& st,
                       const std::function<double(const State<Dim>&)>& g, State<Dim>& y_cross,
                       double time_tol = 1e-13) {
  double a = st.t0, b = st.t1;
  double ga = g(st.y0), gb = g(st.y1);
  // bisection + secant on the interpolant
  for (int it = 0; it < 200 && std::abs(b - a) > time_tol; ++it) {
    double m = b - gb * (b - a) / (gb - ga);
    if (!(std::min(a, b) < m && m < std::max(a, b)) || it % 3 == 2) m = 0.5 * (a + b);
    const double gm = g(st.hermite(m));
    if ((gm < 0) == (ga < 0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
      gb = gm;
    }
  }
  double t = std::abs(ga) < std::abs(gb) ? a : b;
  // secant polish on exactly integrated states
  auto exact = [&](double tt) { return solver.advance(st.t0, st.y0, tt); };
  State<Dim> y1 = exact(t);
  double g1 = g(y1);
  const double dt = std::max(1e-9, 1e-6 * std::abs(st.t1 - st.t0));
  double t0 = t + (t + dt <= std::max(st.t0, st.t1) ? dt : -dt);
  State<Dim> y0 = exact(t0);
  double g0 = g(y0);
  for (int it = 0; it < 20 && g1 != 0.0 && g1 != g0; ++it) {
    const double tn = t - g1 * (t - t0) / (g1 - g0);
    t0 = t;
    g0 = g1;
    t = tn;
    y1 = exact(t);
    g1 = g(y1);
    if (std::abs(t - t0) < time_tol) break;
  }
  y_cross = y1;
  return t;
}

}  // namespace beltrami::ode
