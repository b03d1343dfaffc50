#include "beltrami/sphere_math.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "beltrami/errors.hpp"

namespace beltrami::sphere {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kUnitTol = 1e-10;

void check_unit(const Eigen::Vector3d& xi) {
  if (!std::isfinite(xi.norm()) || std::abs(xi.norm() - 1.0) > kUnitTol)
    throw ArgumentError("real_spherical_harmonic: direction must be a unit vector");
}
}  // namespace

std::vector<std::size_t> SphericalGrid::hemisphere_indices() const {
  std::vector<std::size_t> out;
  out.reserve(size() / 2);
  for (int i = 0; i < n_polar; ++i) {
    const int mirror = n_polar - 1 - i;
    for (int j = 0; j < n_azimuth; ++j) {
      if (i < mirror || (i == mirror && j < n_azimuth / 2))
        out.push_back(static_cast<std::size_t>(i) * n_azimuth + j);
    }
  }
  return out;
}

void real_spherical_harmonics(int lmax, const Eigen::Vector3d& xi, std::span<double> out) {
  // P~_lm = P_lm / sin^m(theta), so the azimuthal factor becomes Re/Im of
  // (x1 + i x2)^m and nothing divides by sin(theta) near the poles.
  const double t = xi(2);
  const std::complex<double> e(xi(0), xi(1));
  std::complex<double> em(1.0, 0.0);
  double pmm = std::sqrt(1.0 / (4.0 * kPi));
  for (int m = 0; m <= lmax; ++m) {
    if (m > 0) {
      pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m));
      em *= e;
    }
    const double cm = m == 0 ? 1.0 : std::numbers::sqrt2 * em.real();
    const double sm = std::numbers::sqrt2 * em.imag();
    double p_prev = 0.0;
    double p_cur = pmm;
    for (int l = m; l <= lmax; ++l) {
      if (l == m + 1) {
        p_prev = p_cur;
        p_cur = t * std::sqrt(2.0 * m + 3.0) * pmm;
      } else if (l > m + 1) {
        const double ll = l, mm = m;
        const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
        const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) /
                                   (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
        const double next = a * (t * p_cur - b * p_prev);
        p_prev = p_cur;
        p_cur = next;
      }
      out[harmonic_index(l, m)] = p_cur * cm;
      if (m > 0) out[harmonic_index(l, -m)] = p_cur * sm;
    }
  }
}

double real_spherical_harmonic(int l, int m, const Eigen::Vector3d& xi) {
  if (l < 0 || m < -l || m > l) throw ArgumentError("real_spherical_harmonic: invalid (l, m)");
  check_unit(xi);
  std::vector<double> y(static_cast<std::size_t>((l + 1) * (l + 1)));
  real_spherical_harmonics(l, xi, y);
  return y[harmonic_index(l, m)];
}

std::vector<double> spherical_bessels(int lmax, double r) {
  if (lmax < 0) throw ArgumentError("spherical_bessels: negative order");
  if (!(r >= 0.0)) throw ArgumentError("spherical_bessel: r must be nonnegative");
  std::vector<double> j(static_cast<std::size_t>(lmax) + 1, 0.0);
  if (r == 0.0) {
    j[0] = 1.0;
    return j;
  }
  const double s = std::sin(r), c = std::cos(r);
  const double j0 = r < 1e-4 ? 1.0 - r * r / 6.0 : s / r;
  const double j1 = r < 1e-4 ? r / 3.0 - r * r * r / 30.0 : (s / r - c) / r;
  if (r > lmax) {
    j[0] = j0;
    if (lmax >= 1) j[1] = j1;
    for (int l = 1; l < lmax; ++l) j[l + 1] = (2.0 * l + 1.0) / r * j[l] - j[l - 1];
    return j;
  }
  // Miller: start well above max(lmax, r) with an arbitrary seed and
  // rescale on overflow; normalize against the larger of j0, j1.
  const int start = lmax + 16 + static_cast<int>(std::sqrt(40.0 * (lmax + r)));
  std::vector<double> f(static_cast<std::size_t>(start) + 2, 0.0);
  f[start] = 1e-300;
  for (int l = start; l > 0; --l) {
    f[l - 1] = (2.0 * l + 1.0) / r * f[l] - f[l + 1];
    if (std::abs(f[l - 1]) > 1e250)
      for (int k = l - 1; k <= start; ++k) f[k] *= 1e-250;
  }
  const double scale = std::abs(j0) >= std::abs(j1) ? j0 / f[0] : j1 / f[1];
  for (int l = 0; l <= lmax; ++l) j[l] = f[l] * scale;
  return j;
}

double spherical_bessel(int l, double r) {
  if (l < 0) throw ArgumentError("spherical_bessel: negative order");
  if (!(r >= 0.0)) throw ArgumentError("spherical_bessel: r must be nonnegative");
  if (l == 0) return r == 0.0 ? 1.0 : (r < 1e-4 ? 1.0 - r * r / 6.0 : std::sin(r) / r);
  return spherical_bessels(std::max(l, 1), r)[l];
}

double sphere_monomial_integral(const MultiIndex& a) {
  if (a.a1 < 0 || a.a2 < 0 || a.a3 < 0) throw ArgumentError("sphere_monomial_integral: negative exponent");
  if (a.a1 % 2 || a.a2 % 2 || a.a3 % 2) return 0.0;
  const double b1 = 0.5 * (a.a1 + 1), b2 = 0.5 * (a.a2 + 1), b3 = 0.5 * (a.a3 + 1);
  return 2.0 * std::exp(std::lgamma(b1) + std::lgamma(b2) + std::lgamma(b3) -
                        std::lgamma(b1 + b2 + b3));
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  if (n == 1) {
    w[0] = 2.0;
    return;
  }
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute the derivative at the converged node
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

SphericalGrid build_quadrature(int exact_degree) {
  if (exact_degree < 0) throw ArgumentError("build_quadrature: negative degree");
  SphericalGrid g;
  g.exact_degree = exact_degree;
  g.n_polar = exact_degree / 2 + 1;
  g.n_azimuth = exact_degree + 1 + ((exact_degree + 1) % 2);  // even, for antipodal pairing
  std::vector<double> t, wt;
  gauss_legendre(g.n_polar, t, wt);
  g.nodes.reserve(static_cast<std::size_t>(g.n_polar) * g.n_azimuth);
  const double dphi = 2.0 * kPi / g.n_azimuth;
  for (int i = 0; i < g.n_polar; ++i) {
    const double s = std::sqrt(std::max(0.0, 1.0 - t[i] * t[i]));
    for (int j = 0; j < g.n_azimuth; ++j) {
      const double phi = dphi * (j + 0.5);
      g.nodes.emplace_back(s * std::cos(phi), s * std::sin(phi), t[i]);
      g.weights.push_back(wt[i] * dphi);
    }
  }
  return g;
}

}  // namespace beltrami::sphere
