#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "beltrami/errors.hpp"
#include "beltrami/sphere_math.hpp"

using namespace beltrami::sphere;
using Eigen::Vector3d;

namespace {
Vector3d random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vector3d v(n(rng), n(rng), n(rng));
  return v.normalized();
}

double grid_sum(const SphericalGrid& g, const MultiIndex& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& x = g.nodes[i];
    s += g.weights[i] * std::pow(x(0), a.a1) * std::pow(x(1), a.a2) * std::pow(x(2), a.a3);
  }
  return s;
}

// Power series j_l(r) = r^l / (2l+1)!! * sum_k (-r^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1)).
double bessel_series(int l, double r) {
  double pref = 1.0;
  for (int k = 1; k <= 2 * l + 1; k += 2) pref /= k;
  pref *= std::pow(r, l);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -0.5 * r * r / (k * (2.0 * l + 2.0 * k + 1.0));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return pref * sum;
}
}  // namespace

TEST_CASE("constant harmonic and argument checks") {
  CHECK(real_spherical_harmonic(0, 0, Vector3d(0, 0, 1)) == doctest::Approx(1.0 / std::sqrt(4 * std::numbers::pi)).epsilon(1e-15));
  CHECK_THROWS_AS(real_spherical_harmonic(2, 3, Vector3d(0, 0, 1)), beltrami::ArgumentError);
  CHECK_THROWS_AS(real_spherical_harmonic(-1, 0, Vector3d(0, 0, 1)), beltrami::ArgumentError);
  CHECK_THROWS_AS(real_spherical_harmonic(1, 0, Vector3d(0, 0, 1.1)), beltrami::ArgumentError);
}

TEST_CASE("harmonic parity under antipodal map") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    const Vector3d xi = random_unit(rng);
    CHECK(std::abs(real_spherical_harmonic(3, 2, -xi) + real_spherical_harmonic(3, 2, xi)) < 1e-14);
  }
}

TEST_CASE("harmonic Gram matrix up to degree 8 is the identity") {
  const int lmax = 8;
  const auto g = build_quadrature(2 * lmax);
  const int n = (lmax + 1) * (lmax + 1);
  std::vector<double> y(n);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    real_spherical_harmonics(lmax, g.nodes[i], y);
    const Eigen::Map<Eigen::VectorXd> v(y.data(), n);
    gram += g.weights[i] * v * v.transpose();
  }
  CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-9);
  // single entry Y_{2,1} Y_{2,1}
  CHECK(std::abs(gram(harmonic_index(2, 1), harmonic_index(2, 1)) - 1.0) < 1e-10);
}

TEST_CASE("high-degree harmonics stay orthonormal") {
  const int lmax = 40;
  const auto g = build_quadrature(2 * lmax);
  const int n = (lmax + 1) * (lmax + 1);
  std::vector<double> y(n);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    real_spherical_harmonics(lmax, g.nodes[i], y);
    const Eigen::Map<Eigen::VectorXd> v(y.data(), n);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(v, g.weights[i]);
  }
  Eigen::MatrixXd full = gram.selfadjointView<Eigen::Lower>();
  CHECK((full - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("spherical Bessel closed forms and origin values") {
  for (double r : {0.5, 1.0, 2.0, 7.0}) CHECK(std::abs(spherical_bessel(0, r) - std::sin(r) / r) < 1e-13);
  CHECK(spherical_bessel(0, 0.0) == 1.0);
  CHECK(spherical_bessel(1, 0.0) == 0.0);
  CHECK_THROWS_AS(spherical_bessel(1, -0.1), beltrami::ArgumentError);
}

TEST_CASE("spherical Bessel against series and std::sph_bessel") {
  CHECK(std::abs(spherical_bessel(20, 5.0) - bessel_series(20, 5.0)) < 1e-11 * std::abs(bessel_series(20, 5.0)) + 1e-25);
  CHECK(std::abs(spherical_bessel(20, 5.0) - std::sph_bessel(20u, 5.0)) < 1e-11 * std::abs(bessel_series(20, 5.0)));
  for (int l = 0; l <= 40; l += 3)
    for (double r : {1e-3, 0.3, 2.5, 9.0, 17.5, 31.0}) {
      const double ref = r < 12 ? bessel_series(l, r) : std::sph_bessel(static_cast<unsigned>(l), r);
      CHECK(std::abs(spherical_bessel(l, r) - ref) <= 1e-12 * std::max(std::abs(ref), 1e-3 * std::pow(r, l) / std::max(1.0, std::tgamma(l + 1.5))) + 1e-300);
    }
}

TEST_CASE("spherical Bessel three-term recurrence") {
  for (double r = 0.1; r <= 30.0; r += 0.37) {
    const auto j = spherical_bessels(26, r);
    for (int l = 1; l <= 25; ++l)
      CHECK(std::abs(j[l - 1] + j[l + 1] - (2 * l + 1) * j[l] / r) < 1e-10);
  }
}

TEST_CASE("spherical Bessel derivative identity under finite differences") {
  // j_l' = j_{l-1} - (l+1)/r j_l
  const double h = 1e-3;
  for (int l = 1; l <= 12; ++l)
    for (double r : {0.7, 3.3, 11.0}) {
      const double fd = (-spherical_bessel(l, r + 2 * h) + 8 * spherical_bessel(l, r + h) -
                         8 * spherical_bessel(l, r - h) + spherical_bessel(l, r - 2 * h)) / (12 * h);
      const double exact = spherical_bessel(l - 1, r) - (l + 1) / r * spherical_bessel(l, r);
      CHECK(std::abs(fd - exact) < 1e-10);
    }
}

TEST_CASE("monomial integrals") {
  CHECK(std::abs(sphere_monomial_integral({0, 0, 0}) - 4 * std::numbers::pi) < 1e-14);
  CHECK(std::abs(sphere_monomial_integral({2, 0, 0}) - 4 * std::numbers::pi / 3) < 1e-14);
  CHECK(sphere_monomial_integral({1, 2, 0}) == 0.0);
}

TEST_CASE("quadrature exactness") {
  const auto g0 = build_quadrature(0);
  double s = 0.0;
  for (double w : g0.weights) s += w;
  CHECK(std::abs(s - 4 * std::numbers::pi) < 1e-12);

  const auto g7 = build_quadrature(7);
  CHECK(std::abs(grid_sum(g7, {2, 4, 0}) - sphere_monomial_integral({2, 4, 0})) < 1e-12);

  for (int deg : {5, 13, 20}) {
    const auto g = build_quadrature(deg);
    for (const auto& x : g.nodes) CHECK(std::abs(x.norm() - 1.0) < 1e-14);
    double err = 0.0;
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; a + b <= deg; ++b)
        for (int c = 0; a + b + c <= deg; ++c)
          err = std::max(err, std::abs(grid_sum(g, {a, b, c}) - sphere_monomial_integral({a, b, c})));
    CHECK(err < 1e-11);
  }
}

TEST_CASE("hemisphere indices pair every node with its antipode") {
  for (int deg : {6, 7, 12}) {
    const auto g = build_quadrature(deg);
    const auto half = g.hemisphere_indices();
    CHECK(half.size() * 2 == g.size());
    std::vector<int> hit(g.size(), 0);
    for (auto i : half) {
      hit[i]++;
      for (std::size_t j = 0; j < g.size(); ++j)
        if ((g.nodes[j] + g.nodes[i]).norm() < 1e-14) hit[j]++;
    }
    for (int h : hit) CHECK(h == 1);
  }
}
