#include "beltrami/axisym_dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <complex>
#include <numbers>

#include "beltrami/errors.hpp"

namespace beltrami::axisym {

namespace {
constexpr double kPi = std::numbers::pi;

double J0(double r) { return std::cyl_bessel_j(0.0, r); }
double J1(double r) { return std::cyl_bessel_j(1.0, r); }

double wrap_pi(double a) { return std::remainder(a, 2.0 * kPi); }

template <class F>
double bracketed_root(F f, double lo, double hi) {
  boost::uintmax_t iters = 200;
  const auto res = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (res.first + res.second);
}

ode::Options options_for(double tol) {
  ode::Options o;
  o.rtol = tol;
  o.atol = tol;
  return o;
}

Eigen::Matrix3d field_jacobian(const VectorField& f, const Vec3& x, double h = 1e-6) {
  Eigen::Matrix3d J;
  for (int j = 0; j < 3; ++j) {
    Vec3 e = Vec3::Zero();
    e(j) = h;
    J.col(j) = (f(x + e) - f(x - e)) / (2.0 * h);
  }
  return J;
}
}  // namespace

double bessel_j0_first_zero() {
  static const double j01 = bracketed_root([](double r) { return J0(r); }, 2.0, 3.0);
  return j01;
}

double separatrix_level() {
  const double j = bessel_j0_first_zero();
  return 3.0 * j * J1(j) - 1.0;
}

double elliptic_level() { return separatrix_level() + 2.0; }

StreamValue stream_function(double z, double r) {
  if (!(r > 0.0)) throw ArgumentError("stream_function: r must be positive");
  return {std::cos(z) + 3.0 * r * J1(r), -std::sin(z), 3.0 * r * J0(r)};
}

bool in_domain(double z, double r) { return z > -10.0 && z < 10.0 && r > 0.9 && r < 3.6; }

Eigen::Vector3d to_cylindrical(const Vec3& x) {
  return {x(2), std::hypot(x(0), x(1)), std::atan2(x(1), x(0))};
}

Vec3 from_cylindrical(double z, double r, double theta) {
  return {r * std::cos(theta), r * std::sin(theta), z};
}

Vec3 axi_field(const Vec3& x) {
  const double r = std::hypot(x(0), x(1));
  if (!(r > 0.0)) throw ArgumentError("axi_field: point on the symmetry axis");
  const StreamValue s = stream_function(x(2), r);
  const Vec3 er(x(0) / r, x(1) / r, 0.0);
  const Vec3 etheta(-x(1), x(0), 0.0);  // coordinate field d/dtheta, length r
  return Vec3(0.0, 0.0, s.dr / r) - (s.dz / r) * er + (s.value / (r * r)) * etheta;
}

bool axi_domain(const Vec3& x) { return in_domain(x(2), std::hypot(x(0), x(1))); }

std::pair<Vec2, Vec2> fixed_points() {
  const double j = bessel_j0_first_zero();
  return {Vec2(kPi, j), Vec2(-kPi, j)};
}

Eigen::Matrix2d normal_variational_matrix() {
  const double j = bessel_j0_first_zero();
  Eigen::Matrix2d A;
  A << 0.0, -3.0 * J1(j), -1.0 / j, 0.0;  // J0'(j01) = -J1(j01)
  return A;
}

std::pair<double, double> monodromy_eigenvalues() {
  const double j = bessel_j0_first_zero();
  const double lam = std::sqrt(3.0 * J1(j) / j);
  return {lam, -lam};
}

double saddle_orbit_period() {
  const double j = bessel_j0_first_zero();
  return 2.0 * kPi * j * j / separatrix_level();
}

Trajectory integrate_flow(const VectorField& field, const Vec3& x0, double T, double tol,
                          const std::function<bool(const Vec3&)>& domain) {
  if (!(tol > 0.0)) throw ArgumentError("integrate_flow: tol must be positive");
  if (domain && !domain(x0)) throw ArgumentError("integrate_flow: initial point outside the domain");
  Trajectory tr;
  tr.times.push_back(0.0);
  tr.states.push_back(x0);
  ode::DormandPrince<3> solver([&](double, const Vec3& y) { return field(y); }, options_for(tol));
  Vec3 y = x0;
  solver.integrate(0.0, y, T, [&](const ode::Step<3>& st) {
    if (domain && !domain(st.y1)) {
      tr.exited_domain = true;
      return false;
    }
    tr.times.push_back(st.t1);
    tr.states.push_back(st.y1);
    return true;
  });
  tr.stats = solver.stats();
  return tr;
}

Eigen::Matrix3d flow_jacobian(const VectorField& field, const Vec3& x0, double T, double tol) {
  using S = ode::State<12>;
  ode::DormandPrince<12> solver(
      [&](double, const S& s) {
        const Vec3 x = s.head<3>();
        const Eigen::Map<const Eigen::Matrix3d> phi(s.data() + 3);
        S out;
        out.head<3>() = field(x);
        Eigen::Map<Eigen::Matrix3d>(out.data() + 3) = field_jacobian(field, x) * phi;
        return out;
      },
      options_for(tol));
  S s;
  s.head<3>() = x0;
  Eigen::Map<Eigen::Matrix3d>(s.data() + 3) = Eigen::Matrix3d::Identity();
  solver.integrate(0.0, s, T);
  return Eigen::Map<const Eigen::Matrix3d>(s.data() + 3);
}

std::pair<double, double> variational_saddle_exponents(double tol) {
  const auto [pp, pm] = fixed_points();
  const double T = saddle_orbit_period();
  const Eigen::Matrix3d M = flow_jacobian(axi_field, from_cylindrical(pp(0), pp(1), 0.0), T, tol);
  const Eigen::EigenSolver<Eigen::Matrix3d> es(M);
  double big = 0.0, small = 1e300;
  for (int i = 0; i < 3; ++i) {
    const double a = std::abs(es.eigenvalues()(i));
    big = std::max(big, a);
    small = std::min(small, a);
  }
  return {std::log(big) / T, std::log(small) / T};
}

Vec2 reduced_flow(double z, double r) {
  const double psi = stream_function(z, r).value;
  return {3.0 * r * r * J0(r) / psi, r * std::sin(z) / psi};
}

// ---------------------------------------------------------------------------
// Level chart

LevelChart::LevelChart(double psi0, double tol) : psi0_(psi0), tol_(tol) {
  if (!(psi0 > separatrix_level() && psi0 < elliptic_level()))
    throw ArgumentError("LevelChart: level must lie strictly between the separatrix and elliptic values");
}

double LevelChart::reference_radius(double value) const {
  if (!(value > separatrix_level() && value < elliptic_level()))
    throw ArgumentError("LevelChart: level outside the torus family");
  return bracketed_root([value](double r) { return 1.0 + 3.0 * r * J1(r) - value; },
                        bessel_j0_first_zero(), 3.6);
}

namespace {
ode::DormandPrince<2> reduced_solver(double tol) {
  return ode::DormandPrince<2>([](double, const Vec2& y) { return reduced_flow(y(0), y(1)); }, options_for(tol));
}

// First time the reduced orbit from y0 crosses z = 0 on the outer side
// (r > j01) in the given time direction, in the sense that matches the
// reference crossing (z decreasing forward in time).
double outer_crossing_time(const Vec2& y0, double direction, double tol) {
  auto solver = reduced_solver(tol);
  const double j = bessel_j0_first_zero();
  Vec2 y = y0;
  double t_cross = std::numeric_limits<double>::quiet_NaN();
  bool skip_start = y0(0) == 0.0;
  solver.integrate(0.0, y, direction * 1e4, [&](const ode::Step<2>& st) {
    const double za = st.y0(0), zb = st.y1(0);
    const bool forward_hit = direction > 0 ? (za > 0 && zb <= 0) : (za < 0 && zb >= 0);
    if (skip_start && st.t0 == 0.0) return true;
    if (forward_hit && 0.5 * (st.y0(1) + st.y1(1)) > j) {
      Vec2 yc;
      t_cross = ode::locate_crossing<2>(solver, st, [](const Vec2& v) { return v(0); }, yc);
      return false;
    }
    return true;
  });
  if (!std::isfinite(t_cross)) throw NumericalError("LevelChart: reference crossing not found");
  return std::abs(t_cross);
}
}  // namespace

double LevelChart::period(double value) const {
  return outer_crossing_time(Vec2(0.0, reference_radius(value)), 1.0, tol_);
}

Vec2 LevelChart::to_chart(double z, double r) const {
  const double value = stream_function(z, r).value;
  const double rho = value - psi0_;
  if (z == 0.0 && r > bessel_j0_first_zero()) return {rho, 0.0};
  const double tau = outer_crossing_time(Vec2(z, r), -1.0, tol_);
  double th = tau / period(value);
  th -= std::floor(th);
  if (th >= 1.0) th -= 1.0;
  return {rho, th};
}

Vec2 LevelChart::from_chart(double rho, double theta1) const {
  const double value = psi0_ + rho;
  const double frac = theta1 - std::floor(theta1);
  const Vec2 start(0.0, reference_radius(value));
  if (frac == 0.0) return start;
  auto solver = reduced_solver(tol_);
  return solver.advance(0.0, start, frac * period(value));
}

double LevelChart::area_factor(double rho, double theta1, double h) const {
  const Vec2 p = from_chart(rho, theta1);
  Eigen::Matrix2d J;
  for (int k = 0; k < 2; ++k) {
    Vec2 e = Vec2::Zero();
    e(k) = h;
    const Vec2 a = to_chart(p(0) + e(0), p(1) + e(1));
    const Vec2 b = to_chart(p(0) - e(0), p(1) - e(1));
    Vec2 d = a - b;
    d(1) = std::remainder(d(1), 1.0);
    J.col(k) = d / (2.0 * h);
  }
  const double psi = stream_function(p(0), p(1)).value;
  return psi / (p(1) * std::abs(J.determinant()));
}

// ---------------------------------------------------------------------------
// Return maps

PoincareOrbit poincare_orbit(const VectorField& field, double z0, double r0, int iterates, double tol) {
  if (iterates < 0) throw ArgumentError("poincare_orbit: negative iterate count");
  PoincareOrbit out;
  if (iterates == 0) return out;
  const double j = bessel_j0_first_zero();
  ode::DormandPrince<3> solver([&](double, const Vec3& y) { return field(y); }, options_for(tol));
  Vec3 y = from_cylindrical(z0, r0, 0.0);
  double theta_lift = 0.0;
  double alpha = std::atan2(r0 - j, z0);
  double alpha_lift = 0.0;
  double target = 2.0 * kPi;
  solver.integrate(0.0, y, 1e8, [&](const ode::Step<3>& st) {
    const Eigen::Vector3d c1 = to_cylindrical(st.y1);
    const double theta_next = theta_lift + wrap_pi(c1(2) - std::remainder(theta_lift, 2.0 * kPi));
    while (theta_next >= target) {
      Vec3 yc;
      const double tgt = target;
      const double tc = ode::locate_crossing<3>(solver, st, [tgt](const Vec3& v) {
        return wrap_pi(std::atan2(v(1), v(0)) - tgt);
      }, yc);
      const Eigen::Vector3d cc = to_cylindrical(yc);
      const Vec3 vc = field(yc);
      const double theta_dot = (yc(0) * vc(1) - yc(1) * vc(0)) / (cc(1) * cc(1));
      if (!(theta_dot > 1e-8)) out.transversality_lost = true;
      const double a = std::atan2(cc(1) - j, cc(0));
      SectionHit hit;
      hit.z = cc(0);
      hit.r = cc(1);
      hit.time = tc;
      hit.poloidal_turns = (alpha_lift + wrap_pi(a - alpha)) / (2.0 * kPi);
      out.hits.push_back(hit);
      target += 2.0 * kPi;
      if (static_cast<int>(out.hits.size()) == iterates) return false;
    }
    theta_lift = theta_next;
    const double a1 = std::atan2(c1(1) - j, c1(0));
    alpha_lift += wrap_pi(a1 - alpha);
    alpha = a1;
    return true;
  });
  if (static_cast<int>(out.hits.size()) < iterates) throw NumericalError("poincare_orbit: returns not reached");
  return out;
}

Vec2 poincare_map(const LevelChart& chart, double rho, double theta1, int iterates, double tol) {
  const Vec2 p = chart.from_chart(rho, theta1);
  const PoincareOrbit orbit = poincare_orbit(axi_field, p(0), p(1), iterates, tol);
  if (orbit.transversality_lost) throw NumericalError("poincare_map: section not transverse");
  const SectionHit& h = orbit.hits.back();
  return chart.to_chart(h.z, h.r);
}

double section_area(const std::vector<Vec2>& loop) {
  const int M = static_cast<int>(loop.size());
  if (M < 3) throw ArgumentError("section_area: need at least three loop points");
  // Trigonometric derivative of r along the loop parameter s in [0, 2 pi).
  std::vector<std::complex<double>> c(M);
  for (int k = 0; k < M; ++k) {
    std::complex<double> s = 0.0;
    for (int n = 0; n < M; ++n) s += loop[n](1) * std::polar(1.0, -2.0 * kPi * k * n / M);
    c[k] = s / static_cast<double>(M);
  }
  double area = 0.0;
  for (int n = 0; n < M; ++n) {
    std::complex<double> dr = 0.0;
    for (int k = 0; k < M; ++k) {
      int freq = k <= M / 2 ? k : k - M;
      if (M % 2 == 0 && k == M / 2) freq = 0;  // drop the unpaired Nyquist mode
      dr += std::complex<double>(0.0, freq) * c[k] * std::polar(1.0, 2.0 * kPi * k * n / M);
    }
    const double z = loop[n](0), r = loop[n](1);
    const double G = (std::sin(z) + 3.0 * r * J1(r) * z) / r;
    area += G * dr.real();
  }
  return area * 2.0 * kPi / M;
}

RotationEstimate rotation_number(double psi0, int iterates, double theta1_start, double tol) {
  if (iterates < 4) throw ArgumentError("rotation_number: need at least four iterates");
  const LevelChart chart(psi0, tol);
  const Vec2 p = chart.from_chart(0.0, theta1_start);
  const PoincareOrbit orbit = poincare_orbit(axi_field, p(0), p(1), iterates, tol);
  if (orbit.transversality_lost) throw NumericalError("rotation_number: section not transverse");
  std::vector<double> inc(iterates);
  double prev = 0.0;
  for (int k = 0; k < iterates; ++k) {
    inc[k] = orbit.hits[k].poloidal_turns - prev;
    prev = orbit.hits[k].poloidal_turns;
  }
  auto weighted = [&](int n) {
    double num = 0.0, den = 0.0;
    for (int k = 0; k < n; ++k) {
      const double s = (k + 1.0) / (n + 1.0);
      const double w = std::exp(-1.0 / (s * (1.0 - s)));
      num += w * inc[k];
      den += w;
    }
    return num / den;
  };
  const double full = std::abs(weighted(iterates));
  const double half = std::abs(weighted(iterates / 2));
  RotationEstimate est;
  est.iterates = iterates;
  est.omega = full - std::floor(full);
  est.convergence = std::abs(full - half);
  est.converged = est.convergence <= 1e-5;
  const double pred = 2.0 * kPi / chart.period(psi0);
  est.period_prediction = pred - std::floor(pred);
  return est;
}

double estimate_twist(double psi0, double h, int samples, double tol) {
  if (!(h > 0.0) || samples < 1) throw ArgumentError("estimate_twist: invalid step or sample count");
  const LevelChart chart(psi0, tol);
  double acc = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double th = static_cast<double>(s) / samples;
    auto diff = [&](double step) {
      const double up = poincare_map(chart, step, th, 1, tol)(1);
      const double dn = poincare_map(chart, -step, th, 1, tol)(1);
      return std::remainder(up - dn, 1.0) / (2.0 * step);
    };
    const double d = (4.0 * diff(0.5 * h) - diff(h)) / 3.0;
    acc += d / chart.area_factor(0.0, th);
  }
  return acc / samples;
}

}  // namespace beltrami::axisym
