#include "beltrami/melnikov.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <optional>

#include "beltrami/axisym_dynamics.hpp"
#include "beltrami/errors.hpp"
#include "beltrami/ode.hpp"

namespace beltrami::melnikov {

namespace {
constexpr double kPi = std::numbers::pi;
// Offset from the saddle along the local eigenvector at which integration starts.
constexpr double kSaddleOffset = 1e-8;

double J0(double r) { return std::cyl_bessel_j(0.0, r); }
double J1(double r) { return std::cyl_bessel_j(1.0, r); }

void check_branch(int k) {
  if (k != 1 && k != 2) throw ArgumentError("melnikov: branch must be 1 or 2");
}

ode::Options options_for(double tol) {
  ode::Options o;
  o.rtol = tol;
  o.atol = tol;
  return o;
}

struct SaddleData {
  Vec2 source, target;
  Vec2 unstable, stable;  // unit eigenvectors pointing into the branch side
  double lambda;
};

// Jacobian of reduced_rhs at (+-pi, j01) is [[0, -a], [-b, 0]].
SaddleData saddle_data(int k) {
  const double j = axisym::bessel_j0_first_zero();
  const double c0 = axisym::separatrix_level();
  const double a = 3.0 * j * j * J1(j) / c0;
  const double b = j / c0;
  const double lambda = std::sqrt(a * b);
  const double side = k == 1 ? -1.0 : 1.0;
  const Vec2 pm(-kPi, j), pp(kPi, j);
  SaddleData s;
  s.lambda = lambda;
  s.unstable = side * Vec2(-a, lambda).normalized();
  s.stable = side * Vec2(a, lambda).normalized();
  s.source = k == 1 ? pm : pp;
  s.target = k == 1 ? pp : pm;
  return s;
}

double level_residual(double z, double r) {
  return axisym::stream_function(z, r).value - axisym::separatrix_level();
}

// Integrand pieces: R^2 J1 sin Z and 3 R^2 J0 J1.
struct Pieces {
  double s, c;
};
Pieces pieces(double Z, double R) {
  const double j1 = J1(R);
  return {R * R * j1 * std::sin(Z), 3.0 * R * R * J0(R) * j1};
}

double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size() - 1;
  double s = f.front() + f.back();
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
  return s * h / 3.0;
}

// Half of the separatrix. dir = -1 integrates backward from the target,
// dir = +1 forward from the source. Fills samples at times dir * (-t_j),
// i.e. t_j >= 0 on the target half and t_j <= 0 on the source half,
// indexed by j = 0..n.
struct Half {
  std::vector<Vec2> points;
  double crossing_time;  // |s_c|
};

Half integrate_half(const SaddleData& sd, int dir, int n, double dt, double tol) {
  const Vec2 base = dir < 0 ? sd.target : sd.source;
  const Vec2 vec = dir < 0 ? sd.stable : sd.unstable;
  // The state is the displacement from the saddle so that the absolute
  // tolerance can follow the initial offset.
  ode::Options opt = options_for(tol);
  opt.atol = tol * kSaddleOffset;
  ode::DormandPrince<2> solver(
      [base](double, const Vec2& d) { return reduced_rhs(base(0) + d(0), base(1) + d(1)); }, opt);
  auto g = [base](const ode::State<2>& d) { return base(0) + d(0); };
  const double horizon = 200.0;
  Vec2 y = kSaddleOffset * vec;
  std::optional<ode::Step<2>> hit;
  solver.integrate(0.0, y, dir * horizon, [&](const ode::Step<2>& st) {
    if ((g(st.y0) < 0) != (g(st.y1) < 0) || g(st.y1) == 0.0) {
      hit = st;
      return false;
    }
    return true;
  });
  if (!hit) throw NumericalError("separatrix_orbit: no crossing of z = 0");
  Vec2 y_cross;
  const double sc = ode::locate_crossing<2>(solver, *hit, g, y_cross);
  Half h;
  h.crossing_time = std::abs(sc);
  h.points.assign(static_cast<std::size_t>(n) + 1, Vec2::Zero());
  h.points[0] = base + y_cross;
  // Sample on a second pass from the saddle towards the crossing, the
  // direction in which the manifold attracts nearby solutions. Beyond |s_c|
  // use the linearized approach.
  Vec2 cur = kSaddleOffset * vec;
  double s_cur = 0.0;
  for (int j = n; j >= 1; --j) {
    const double tau = j * dt;  // distance in time from the crossing
    if (tau < h.crossing_time) {
      const double s_next = sc - dir * tau;
      cur = solver.advance(s_cur, cur, s_next);
      s_cur = s_next;
      h.points[j] = base + cur;
    } else {
      h.points[j] = base + kSaddleOffset * std::exp(-sd.lambda * (tau - h.crossing_time)) * vec;
    }
  }
  return h;
}

// Fixed point of the time-2pi map of the perturbed reduced system, with the
// monodromy matrix for the given time direction.
struct PeriodicPoint {
  Vec2 x;
  Eigen::Matrix2d forward, backward;
};

using Rhs2 = std::function<Vec2(double, const Vec2&)>;

Eigen::Matrix2d rhs_jacobian(const Rhs2& f, double t, const Vec2& x) {
  Eigen::Matrix2d J;
  const double h = 1e-6;
  for (int c = 0; c < 2; ++c) {
    Vec2 e = Vec2::Zero();
    e(c) = h;
    J.col(c) = (f(t, x + e) - f(t, x - e)) / (2.0 * h);
  }
  return J;
}

std::pair<Vec2, Eigen::Matrix2d> flow_with_jacobian(const Rhs2& f, double t0, const Vec2& x, double t1,
                                                    double tol) {
  using S = ode::State<6>;
  ode::DormandPrince<6> solver(
      [&f](double t, const S& y) {
        const Vec2 p = y.head<2>();
        const Eigen::Matrix2d J = rhs_jacobian(f, t, p);
        Eigen::Matrix2d M;
        M << y(2), y(4), y(3), y(5);
        const Eigen::Matrix2d dM = J * M;
        S out;
        out << f(t, p), dM(0, 0), dM(1, 0), dM(0, 1), dM(1, 1);
        return out;
      },
      options_for(tol));
  S y;
  y << x, 1.0, 0.0, 0.0, 1.0;
  solver.integrate(t0, y, t1);
  Eigen::Matrix2d M;
  M << y(2), y(4), y(3), y(5);
  return {y.head<2>(), M};
}

// Multiple shooting over kSegments pieces of the period; the time-2pi map
// itself expands by exp(2 pi lambda) ~ 4e4 and defeats plain Newton. The
// starting guess is the periodic solution of the system linearized at the
// unperturbed saddle.
constexpr int kSegments = 8;

PeriodicPoint periodic_point(const Rhs2& f, const Vec2& saddle, double t0, double tol) {
  const double seg = 2.0 * kPi / kSegments;
  // x' = A x + u sin t + v cos t has the periodic solution P sin t + Q cos t
  // with (I + A^2) P = v - A u, Q = -A P - u; here A^2 = lambda^2 I.
  const Eigen::Matrix2d A = rhs_jacobian(f, 0.0, saddle);
  std::vector<Vec2> x(kSegments);
  {
    const Vec2 f0 = f(0.0, saddle), fh = f(kPi / 2, saddle);
    const Vec2 v = f0, u = fh;  // the unperturbed field vanishes at the saddle
    const Eigen::Matrix2d I2 = Eigen::Matrix2d::Identity();
    const Vec2 P = (I2 + A * A).fullPivLu().solve(v - A * u);
    const Vec2 Q = -A * P - u;
    for (int i = 0; i < kSegments; ++i) {
      const double t = t0 + i * seg;
      x[i] = saddle + P * std::sin(t) + Q * std::cos(t);
    }
  }
  std::vector<Eigen::Matrix2d> J(kSegments);
  constexpr int n = 2 * kSegments;
  for (int it = 0;; ++it) {
    Eigen::Matrix<double, n, 1> F;
    Eigen::Matrix<double, n, n> DF = Eigen::Matrix<double, n, n>::Zero();
    for (int i = 0; i < kSegments; ++i) {
      const int next = (i + 1) % kSegments;
      auto [y, Ji] = flow_with_jacobian(f, t0 + i * seg, x[i], t0 + (i + 1) * seg, tol);
      J[i] = Ji;
      F.segment<2>(2 * i) = y - x[next];
      DF.block<2, 2>(2 * i, 2 * i) = Ji;
      DF.block<2, 2>(2 * i, 2 * next) -= Eigen::Matrix2d::Identity();
    }
    const Eigen::Matrix<double, n, 1> dx = DF.fullPivLu().solve(-F);
    for (int i = 0; i < kSegments; ++i) x[i] += dx.segment<2>(2 * i);
    if (dx.norm() < 1e-13) break;
    if (it == 30 || !dx.allFinite())
      throw NumericalError("splitting_check: Newton for the periodic orbit did not converge");
  }
  PeriodicPoint pp;
  pp.x = x[0];
  pp.forward.setIdentity();
  pp.backward.setIdentity();
  for (int i = 0; i < kSegments; ++i) {
    const Eigen::Matrix2d Ji = flow_with_jacobian(f, t0 + i * seg, x[i], t0 + (i + 1) * seg, tol).second;
    pp.forward = Ji * pp.forward;
    pp.backward = pp.backward * Ji.inverse();
  }
  return pp;
}

// Eigenvector of the dominant eigenvalue of a real 2x2 hyperbolic matrix,
// oriented along `hint`.
std::pair<Vec2, double> dominant(const Eigen::Matrix2d& M, const Vec2& hint) {
  Eigen::EigenSolver<Eigen::Matrix2d> es(M);
  int i = std::abs(es.eigenvalues()(0)) > std::abs(es.eigenvalues()(1)) ? 0 : 1;
  if (std::abs(es.eigenvalues()(i).imag()) > 0)
    throw NumericalError("splitting_check: periodic orbit is not hyperbolic");
  Vec2 v = es.eigenvectors().col(i).real().normalized();
  if (v.dot(hint) < 0) v = -v;
  return {v, es.eigenvalues()(i).real()};
}
}  // namespace

Vec2 reduced_rhs(double z, double r) {
  if (!axisym::in_domain(z, r)) throw ArgumentError("reduced_rhs: point outside the domain");
  return axisym::reduced_flow(z, r);
}

Vec3 perturbation_w(double z, double r, double theta) {
  (void)z;
  if (!(r > 0.0)) throw ArgumentError("perturbation_w: r must be positive");
  const double j1 = J1(r);
  const double dj1 = J0(r) - j1 / r;
  return {j1 * std::sin(theta), j1 * std::cos(theta) / r, -dj1 * std::sin(theta) / r};
}

Vec2 perturbed_rhs_correction(double z, double r, double t) {
  if (!axisym::in_domain(z, r)) throw ArgumentError("perturbed_rhs_correction: point outside the domain");
  const double psi = axisym::stream_function(z, r).value;
  const Vec3 w = perturbation_w(z, r, t);
  const double r2 = r * r;
  return {r2 * w(0) / psi - 3.0 * r2 * r2 * J0(r) * w(2) / (psi * psi),
          r2 * w(1) / psi - r2 * r * std::sin(z) * w(2) / (psi * psi)};
}

double reduced_saddle_exponent() { return saddle_data(1).lambda; }

std::pair<double, double> separatrix_radii() {
  static const std::pair<double, double> radii = [] {
    const double j = axisym::bessel_j0_first_zero();
    auto f = [](double r) { return level_residual(0.0, r); };
    auto solve = [&](double lo, double hi) {
      if ((f(lo) < 0) == (f(hi) < 0)) throw std::logic_error("separatrix_radii: root not bracketed");
      boost::uintmax_t iters = 200;
      const auto res = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
      return 0.5 * (res.first + res.second);
    };
    return std::pair{solve(0.9, j - 1e-9), solve(j + 1e-9, 3.6)};
  }();
  return radii;
}

SeparatrixOrbit separatrix_orbit(int k, double T_max, double tol, double dt) {
  check_branch(k);
  if (!(T_max > 0.0)) throw ArgumentError("separatrix_orbit: T_max must be positive");
  if (!(dt > 0.0) || !(tol > 0.0)) throw ArgumentError("separatrix_orbit: dt and tol must be positive");
  int n = static_cast<int>(std::ceil(T_max / dt - 1e-9));
  if (n % 2) ++n;  // keep an even count per half for Simpson
  dt = T_max / n;
  const SaddleData sd = saddle_data(k);
  const Half fwd = integrate_half(sd, -1, n, dt, tol);  // t >= 0
  const Half bwd = integrate_half(sd, +1, n, dt, tol);  // t <= 0
  SeparatrixOrbit o;
  o.branch = k;
  o.r_k = k == 1 ? separatrix_radii().first : separatrix_radii().second;
  o.T_max = T_max;
  o.tol = tol;
  o.dt = dt;
  o.saddle_exponent = sd.lambda;
  o.integrated_window = std::min(fwd.crossing_time, bwd.crossing_time);
  const std::size_t total = 2 * static_cast<std::size_t>(n) + 1;
  o.t.resize(total);
  o.Z.resize(total);
  o.R.resize(total);
  for (int j = -n; j <= n; ++j) {
    const Vec2& p = j >= 0 ? fwd.points[j] : bwd.points[-j];
    const std::size_t idx = static_cast<std::size_t>(j + n);
    o.t[idx] = j * dt;
    o.Z[idx] = p(0);
    o.R[idx] = p(1);
    o.hamiltonian_drift = std::max(o.hamiltonian_drift, std::abs(level_residual(p(0), p(1))));
  }
  return o;
}

MelnikovResult melnikov_coefficients(int k, double T_max, double tol, double dt) {
  const SeparatrixOrbit o = separatrix_orbit(k, T_max, tol, dt);
  std::vector<double> fa(o.t.size()), fb(o.t.size());
  for (std::size_t i = 0; i < o.t.size(); ++i) {
    const Pieces p = pieces(o.Z[i], o.R[i]);
    fa[i] = p.s * std::cos(o.t[i]) + p.c * std::sin(o.t[i]);
    fb[i] = p.s * std::sin(o.t[i]) - p.c * std::cos(o.t[i]);
  }
  MelnikovResult m;
  m.branch = k;
  m.T_max = o.T_max;
  m.tol = tol;
  m.dt = o.dt;
  m.a = simpson(fa, o.dt);
  m.b = simpson(fb, o.dt);
  // The integrand envelope decays like exp(-lambda |t|) beyond the window.
  for (std::size_t i : {std::size_t{0}, o.t.size() - 1}) {
    const Pieces p = pieces(o.Z[i], o.R[i]);
    m.tail_bound += (std::abs(p.s) + std::abs(p.c)) / o.saddle_exponent;
  }
  if (m.tail_bound > 1e-6)
    throw NumericalError("melnikov_coefficients: T_max too small, tail bound " + std::to_string(m.tail_bound));
  return m;
}

double melnikov_function(double t0, const MelnikovResult& m) { return m.a * std::sin(t0) + m.b * std::cos(t0); }

double melnikov_derivative(double t0, const MelnikovResult& m) {
  return m.a * std::cos(t0) - m.b * std::sin(t0);
}

double displacement_prediction(double t0, const MelnikovResult& m) {
  const auto [r1, r2] = separatrix_radii();
  const double r = m.branch == 1 ? r1 : r2;
  const double c0 = axisym::separatrix_level();
  const double speed = reduced_rhs(0.0, r).norm();
  return -r * melnikov_function(t0, m) / (c0 * c0 * speed);
}

double displacement_integral(double t0, const SeparatrixOrbit& o) {
  std::vector<double> f(o.t.size());
  const double r0 = o.R[o.t.size() / 2];
  for (std::size_t i = 0; i < o.t.size(); ++i) {
    const Vec2 y0 = reduced_rhs(o.Z[i], o.R[i]);
    const Vec2 y1 = perturbed_rhs_correction(o.Z[i], o.R[i], o.t[i] + t0);
    f[i] = (y0(0) * y1(1) - y0(1) * y1(0)) * r0 / o.R[i];
  }
  return simpson(f, o.dt) / reduced_rhs(0.0, r0).norm();
}

SplittingResult splitting_check(double eps, int k, double t0, double tol, int periods) {
  check_branch(k);
  if (!(eps >= 0.0 && eps <= 0.05)) throw ArgumentError("splitting_check: eps must lie in [0, 0.05]");
  if (periods < 1) throw ArgumentError("splitting_check: periods must be positive");
  const SaddleData sd = saddle_data(k);
  const Rhs2 rhs = [eps](double t, const Vec2& y) {
    Vec2 v = reduced_rhs(y(0), y(1));
    if (eps != 0.0) v += eps * perturbed_rhs_correction(y(0), y(1), t);
    return v;
  };
  const double r_k = k == 1 ? separatrix_radii().first : separatrix_radii().second;
  const Vec2 p0(0.0, r_k);
  const Vec2 tangent = reduced_rhs(0.0, r_k).normalized();
  const Vec2 normal(-tangent(1), tangent(0));

  // Distance from the saddles of the unperturbed orbit `periods` periods
  // away from the section sets the size of the fundamental domains.
  const double span = 2.0 * kPi * periods;
  const SeparatrixOrbit orbit = separatrix_orbit(k, span + 1.0, 1e-12, 0.01);
  auto sample_at = [&](double t) {
    const std::size_t n = (orbit.t.size() - 1) / 2;
    const long idx = std::lround(t / orbit.dt) + static_cast<long>(n);
    return Vec2(orbit.Z[idx], orbit.R[idx]);
  };
  const double d_u = (sample_at(-span) - sd.source).norm();
  const double d_s = (sample_at(span) - sd.target).norm();

  const PeriodicPoint src = periodic_point(rhs, sd.source, t0, tol);
  const PeriodicPoint tgt = periodic_point(rhs, sd.target, t0, tol);
  const auto [vu, mu_u] = dominant(src.forward, sd.unstable);
  const auto [vs, mu_s] = dominant(tgt.backward, sd.stable);
  (void)mu_s;
  // The periodic point at phase t0 - span is the same as at t0.

  ode::DormandPrince<2> solver(rhs, options_for(tol));
  auto tracked = [&](const Vec2& base, const Vec2& v, double d, double sigma, double t_start) {
    Vec2 y = base + sigma * d * v;
    solver.integrate(t_start, y, t0);
    return y;
  };
  auto find = [&](const Vec2& base, const Vec2& v, double d, double t_start, double mu) {
    auto G = [&](double ls) { return (tracked(base, v, d, std::exp(ls), t_start) - p0).dot(tangent); };
    const double half = 0.5 * std::log(std::abs(mu));
    // scan the fundamental domain for a sign change
    const int pieces = 8;
    double lo = -half, glo = G(lo);
    for (int i = 1; i <= pieces; ++i) {
      const double hi = -half + 2.0 * half * i / pieces;
      const double ghi = G(hi);
      if ((glo < 0) != (ghi < 0)) {
        boost::uintmax_t iters = 100;
        const auto res = boost::math::tools::toms748_solve(G, lo, hi, glo, ghi,
                                                          boost::math::tools::eps_tolerance<double>(50), iters);
        return tracked(base, v, d, std::exp(0.5 * (res.first + res.second)), t_start);
      }
      lo = hi;
      glo = ghi;
    }
    throw NumericalError("splitting_check: manifold did not reach the section near p0");
  };
  SplittingResult out;
  out.source_orbit = src.x;
  out.target_orbit = tgt.x;
  out.unstable_point = find(src.x, vu, d_u, t0 - span, mu_u);
  out.stable_point = find(tgt.x, vs, d_s, t0 + span, dominant(tgt.backward, sd.stable).second);
  out.measured = (out.unstable_point - out.stable_point).dot(normal);
  const MelnikovResult m = melnikov_coefficients(k);
  out.predicted = eps * displacement_prediction(t0, m);
  out.ratio = out.predicted != 0.0 ? out.measured / out.predicted : 0.0;
  return out;
}

}  // namespace beltrami::melnikov
