#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "beltrami/errors.hpp"
#include "beltrami/sphere_math.hpp"
#include "beltrami/torus_ensemble.hpp"

using namespace beltrami;
using namespace beltrami::torus;

namespace {
constexpr double kPi = std::numbers::pi;

Vec3 random_torus_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  return {u(rng), u(rng), u(rng)};
}

double periodic_distance(const Vec3& a, const Vec3& b) {
  Vec3 d = a - b;
  for (int i = 0; i < 3; ++i) d(i) = std::remainder(d(i), 2.0 * kPi);
  return d.norm();
}

// Independent zero count: local minima of |u| on a fine periodic grid,
// polished by Newton and deduplicated.
int brute_force_zero_count(const TorusField& f, int n) {
  const double h = 2.0 * kPi / n;
  std::vector<double> mag(static_cast<std::size_t>(n) * n * n);
  auto idx = [n](int a, int b, int c) {
    auto w = [n](int i) { return ((i % n) + n) % n; };
    return (static_cast<std::size_t>(w(a)) * n + w(b)) * n + w(c);
  };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) mag[idx(a, b, c)] = f.value(h * Vec3(a, b, c)).norm();
  std::vector<Vec3> found;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        const double v = mag[idx(a, b, c)];
        bool minimum = true;
        for (int da = -1; da <= 1 && minimum; ++da)
          for (int db = -1; db <= 1 && minimum; ++db)
            for (int dc = -1; dc <= 1 && minimum; ++dc)
              if ((da || db || dc) && mag[idx(a + da, b + db, c + dc)] < v) minimum = false;
        if (!minimum) continue;
        Vec3 x = h * Vec3(a, b, c);
        for (int it = 0; it < 60; ++it) {
          const auto j = f.jet(x);
          const Vec3 dx = j.grad.fullPivLu().solve(-j.u);
          x += dx.norm() > h ? Vec3(dx * (h / dx.norm())) : dx;
          if (dx.norm() < 1e-13) break;
        }
        if (f.value(x).norm() > 1e-9) continue;
        for (int i = 0; i < 3; ++i) x(i) -= 2.0 * kPi * std::floor(x(i) / (2.0 * kPi));
        bool dup = false;
        for (const Vec3& y : found) dup = dup || periodic_distance(x, y) < 1e-6;
        if (!dup) found.push_back(x);
      }
  return static_cast<int>(found.size());
}
}  // namespace

TEST_CASE("lattice shells") {
  const LatticeShell s7 = lattice_shell(7);
  CHECK(s7.empty());
  CHECK_FALSE(s7.admissible);
  const LatticeShell s2 = lattice_shell(2);
  CHECK(s2.d == 12);
  CHECK(s2.admissible);
  const LatticeShell s4 = lattice_shell(4);
  CHECK(s4.d == 6);
  CHECK_FALSE(s4.admissible);
  CHECK(lattice_shell(1).d == 6);
  CHECK(lattice_shell(3).d == 8);
  CHECK_THROWS_AS(lattice_shell(0), ArgumentError);

  for (int L : {1, 2, 3, 5, 6, 9, 33, 129}) {
    const LatticeShell s = lattice_shell(L);
    std::set<std::array<int, 3>> pts;
    for (const IVec3& k : s.points) {
      CHECK(k.squaredNorm() == L);
      pts.insert({k(0), k(1), k(2)});
    }
    CHECK(pts.size() == s.points.size());
    for (const IVec3& k : s.points) CHECK(pts.count({-k(0), -k(1), -k(2)}) == 1);
  }

  int mismatches = 0, admissible_mismatch = 0;
  for (int L = 1; L <= 10000; ++L) {
    const LatticeShell s = lattice_shell(L);
    if (s.empty() != is_three_square_excluded(L)) ++mismatches;
    const int r = L % 8;
    if (s.admissible != (r != 0 && r != 4 && r != 7)) ++admissible_mismatch;
    if (s.admissible && s.empty()) ++admissible_mismatch;
  }
  CHECK(mismatches == 0);
  CHECK(admissible_mismatch == 0);
}

TEST_CASE("torus samples") {
  CHECK_THROWS_AS(sample_torus_field(7, 1), ArgumentError);
  const TorusSample a = sample_torus_field(9, 42), b = sample_torus_field(9, 42);
  CHECK(a.coefficients == b.coefficients);
  CHECK(a.modes == b.modes);
  CHECK(sample_torus_field(9, 43).coefficients != a.coefficients);
  // bitwise Hermitian pairing
  for (std::size_t i = 0; i < a.modes.size(); ++i)
    for (std::size_t j = 0; j < a.modes.size(); ++j)
      if (a.modes[j] == IVec3(-a.modes[i])) CHECK(a.coefficients[j] == std::conj(a.coefficients[i]));

  // half-shell parts look like independent standard normals
  std::vector<double> parts;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const TorusSample s = sample_torus_field(33, seed);
    for (std::size_t i = 0; i < s.modes.size(); ++i)
      if (in_half_shell(s.modes[i])) {
        parts.push_back(s.coefficients[i].real());
        parts.push_back(s.coefficients[i].imag());
      }
  }
  double m = 0, v = 0, cross = 0;
  for (double x : parts) m += x;
  m /= parts.size();
  for (double x : parts) v += (x - m) * (x - m);
  v /= parts.size();
  for (std::size_t i = 0; i + 1 < parts.size(); i += 2) cross += parts[i] * parts[i + 1];
  cross /= parts.size() / 2.0;
  const double tol = 5.0 / std::sqrt(static_cast<double>(parts.size()));
  CHECK(std::abs(m) < tol);
  CHECK(std::abs(v - 1.0) < 2.0 * tol);
  CHECK(std::abs(cross) < 2.0 * tol);

  // L = 1: the pole modes (+-1, 0, 0) carry p = 0
  const TorusSample one = sample_torus_field(1, 7);
  const TorusField f1(one);
  TorusSample without = one;
  for (std::size_t i = 0; i < without.modes.size(); ++i)
    if (std::abs(without.modes[i](0)) == 1) without.coefficients[i] = 0.0;
  const TorusField f0(without);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10; ++i) {
    const Vec3 x = random_torus_point(rng);
    CHECK((f1.value(x) - f0.value(x)).norm() == 0.0);
  }
}

TEST_CASE("torus fields are real curl eigenfields") {
  std::mt19937_64 rng(17);
  for (int L : {1, 2, 3, 5, 6, 9}) {
    const TorusField f(sample_torus_field(L, 100 + L));
    const double root = std::sqrt(static_cast<double>(L));
    double curl = 0.0, div = 0.0, imag = 0.0, fd = 0.0;
    for (int i = 0; i < 50; ++i) {
      const Vec3 x = random_torus_point(rng);
      const auto j = f.jet(x);
      curl = std::max(curl, (j.curl() - root * j.u).norm() / (root * j.u.norm()));
      div = std::max(div, std::abs(j.divergence()));
      if (i < 20) imag = std::max(imag, f.imaginary_residue(x));
      for (int c = 0; c < 3; ++c) {
        const double h = 1e-4;
        Vec3 e = Vec3::Zero();
        e(c) = h;
        const Vec3 d4 = (8.0 * (f.value(x + e / 2) - f.value(x - e / 2)) - (f.value(x + e) - f.value(x - e))) / (6.0 * h);
        fd = std::max(fd, (d4 - j.grad.col(c)).norm());
      }
    }
    CHECK(curl < 1e-10);
    CHECK(div < 1e-10);
    CHECK(imag < 1e-12);
    CHECK(fd < 1e-7);
    CHECK(evaluate_torus_field(sample_torus_field(L, 100 + L), Vec3(0.1, 0.2, 0.3)).u ==
          f.value(Vec3(0.1, 0.2, 0.3)));

    // zero mean: the trapezoid rule on n^3 nodes is exact for |k_i| < n
    const int n = 8;
    Vec3 mean = Vec3::Zero();
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) mean += f.value((2.0 * kPi / n) * Vec3(a, b, c));
    CHECK(mean.norm() / (n * n * n) < 1e-14);
  }
}

TEST_CASE("rescaled kernel") {
  CHECK_THROWS_AS(rescaled_kernel(7, Vec3::Zero()), ArgumentError);
  for (int L : {1, 9, 33}) {
    const LatticeShell s = lattice_shell(L);
    const Mat3 k0 = rescaled_kernel(L, Vec3::Zero());
    double trace = 0.0;
    for (const IVec3& k : s.points)
      trace += field::p_vector(k.cast<double>() / std::sqrt(static_cast<double>(L))).squaredNorm();
    CHECK(k0.trace() == doctest::Approx(4.0 * kPi / s.d * trace).epsilon(1e-13));
    CHECK((k0 - k0.transpose()).norm() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Mat3> es(k0);
    CHECK(es.eigenvalues().minCoeff() > -1e-13);
    const Vec3 w(0.3, -1.1, 0.7);
    CHECK((rescaled_kernel(L, -w) - rescaled_kernel(L, w).transpose()).norm() < 1e-13);
  }

  // Monte Carlo covariance of the rescaled field at two base points
  const int L = 9, M = 3000;
  const double root = 3.0;
  const Vec3 x(0.4, -0.2, 0.9), y(-0.5, 0.3, 0.1);
  const Mat3 expected = rescaled_kernel(L, x - y);
  Mat3 cov[2] = {Mat3::Zero(), Mat3::Zero()};
  const Vec3 base[2] = {Vec3(0.1, 0.2, 0.3), Vec3(4.0, 1.0, 5.5)};
  for (int s = 0; s < M; ++s) {
    const TorusField f(sample_torus_field(L, 5000 + s));
    for (int b = 0; b < 2; ++b)
      cov[b] += f.value(base[b] + x / root) * f.value(base[b] + y / root).transpose();
  }
  for (int b = 0; b < 2; ++b) cov[b] /= M;
  const double tol = 5.0 / std::sqrt(static_cast<double>(M));
  CHECK((cov[0] - expected).cwiseAbs().maxCoeff() < tol);
  CHECK((cov[1] - expected).cwiseAbs().maxCoeff() < tol);
  CHECK((cov[0] - cov[1]).cwiseAbs().maxCoeff() < 2.0 * tol);
}

TEST_CASE("kernel convergence and equidistribution") {
  const std::vector<Vec3> grid = ball_grid(5.0, 1.25);
  CHECK(grid.size() > 100);
  for (const Vec3& w : grid) CHECK(w.norm() <= 5.0);
  const std::vector<int> Ls = {9, 33, 129, 513};
  const KernelConvergence kc = kernel_convergence_diagnostic(Ls, grid);
  REQUIRE(kc.sup_error.size() == 4);
  CHECK(kc.sup_error.back() < kc.sup_error.front());
  for (double e : kc.sup_error) CHECK(std::isfinite(e));
  const std::vector<int> squares = {9, 25, 81};
  const KernelConvergence sq = kernel_convergence_diagnostic(squares, grid);
  for (double e : sq.sup_error) CHECK(std::isfinite(e));
  const std::vector<int> bad = {4};
  CHECK_THROWS_AS(kernel_convergence_diagnostic(bad, grid), ArgumentError);

  // diagonal value at w = 0 approaches the identity
  const Mat3 d9 = rescaled_kernel(9, Vec3::Zero()), d513 = rescaled_kernel(513, Vec3::Zero());
  CHECK((d513 - Mat3::Identity()).cwiseAbs().maxCoeff() < (d9 - Mat3::Identity()).cwiseAbs().maxCoeff());

  // L = 1: the octahedron, summed directly
  double direct = 0.0;
  const Vec3 octa[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  for (int l = 1; l <= 6; ++l)
    for (int m = -l; m <= l; ++m) {
      double s = 0.0;
      for (const Vec3& v : octa) s += sphere::real_spherical_harmonic(l, m, v);
      direct = std::max(direct, std::abs(4.0 * kPi / 6.0 * s));
    }
  double y40 = 0.0;
  for (const Vec3& v : octa) y40 += sphere::real_spherical_harmonic(4, 0, v);
  CHECK(4.0 * kPi / 6.0 * y40 == doctest::Approx(3.5 * std::sqrt(kPi)).epsilon(1e-13));
  CHECK(equidistribution_discrepancy(1) == doctest::Approx(direct).epsilon(1e-13));
  CHECK(equidistribution_discrepancy(1) > 0.0);
  for (int L : {2, 3, 5}) CHECK(equidistribution_discrepancy(L) >= 0.0);
  CHECK(equidistribution_discrepancy(513) < equidistribution_discrepancy(9));
}

TEST_CASE("torus zero counts") {
  // Zeros of an L = 1 field need |a_2| = |a_3|, so almost surely there are none.
  for (std::uint64_t seed : {1, 2, 3}) {
    const TorusSample s = sample_torus_field(1, seed);
    CHECK(torus_zeros(s).size() == 0);
    CHECK(brute_force_zero_count(TorusField(s), 32) == 0);
  }
  int total = 0;
  for (int L : {2, 3}) {
    for (std::uint64_t seed : {1, 2, 3, 4}) {
      const TorusSample s = sample_torus_field(L, seed);
      const zeros::ZeroSet z = torus_zeros(s);
      total += static_cast<int>(z.size());
      CHECK(static_cast<int>(z.size()) == brute_force_zero_count(TorusField(s), 48));
      CHECK(torus_zeros(s, 0.35).size() == z.size());
      for (const Vec3& p : z.points) {
        for (int i = 0; i < 3; ++i) {
          CHECK(p(i) >= 0.0);
          CHECK(p(i) < 2.0 * kPi);
        }
      }
    }
  }
  CHECK(total > 0);

  const std::vector<std::uint64_t> seeds = {1, 2, 3};
  const TorusCensus c = torus_zero_census(5, seeds);
  CHECK(c.counts.size() == 3);
  CHECK(c.scaled == doctest::Approx(c.mean_count / std::pow(5.0, 1.5)));
  CHECK(c.standard_error >= 0.0);
  const std::vector<std::uint64_t> one = {1};
  CHECK_THROWS_AS(torus_zero_census(5, one), ArgumentError);
  CHECK_THROWS_AS(torus_zero_census(4, seeds), ArgumentError);
}
