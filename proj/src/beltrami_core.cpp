#include "beltrami/beltrami_core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "beltrami/errors.hpp"
#include "beltrami/parallel.hpp"
#include "beltrami/rng.hpp"

namespace beltrami::field {

namespace {
constexpr double kPi = std::numbers::pi;
const double kQScale = 0.125 * std::sqrt(15.0 / kPi);
const double kSqrt7 = std::sqrt(7.0);
constexpr std::complex<double> kI(0.0, 1.0);

// Extra spherical-harmonic degree needed before the plane wave e^{i xi.x}
// is resolved to round-off; grows like r + c r^{1/3}.
int plane_wave_bandwidth(double r) {
  if (r <= 0.0) return 0;
  return static_cast<int>(std::ceil(r + 11.4 * std::cbrt(r))) + 2;
}

std::complex<double> i_pow(int l) {
  switch (l & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

std::complex<double> density_at(const SpectralDensityCoefficients& c, const Vec3& xi,
                                std::vector<double>& ybuf) {
  sphere::real_spherical_harmonics(c.truncation, xi, ybuf);
  std::complex<double> phi = 0.0;
  for (int l = 0; l <= c.truncation; ++l) {
    double s = 0.0;
    for (int m = -l; m <= l; ++m) s += c.at(l, m) * ybuf[sphere::harmonic_index(l, m)];
    phi += i_pow(l) * s;
  }
  return phi;
}
}  // namespace

CVec3 p_vector(const Vec3& xi) {
  const std::complex<double> q = kQScale * (1.0 + kSqrt7 * kI * xi(0));
  return q * CVec3(xi(0) * xi(0) - 1.0, xi(0) * xi(1) - kI * xi(2), xi(0) * xi(2) + kI * xi(1));
}

CMat3 m_matrix(const Vec3& xi) {
  CMat3 m;
  m << -1.0, -kI * xi(2), kI * xi(1),
       kI * xi(2), -1.0, -kI * xi(0),
       -kI * xi(1), kI * xi(0), -1.0;
  return m;
}

SpectralDensityCoefficients sample_coefficients(int N, std::uint64_t seed) {
  if (N < 0) throw ArgumentError("sample_coefficients: N must be nonnegative");
  SpectralDensityCoefficients c;
  c.truncation = N;
  c.seed = seed;
  c.a.resize(static_cast<std::size_t>((N + 1) * (N + 1)));
  for (int l = 0; l <= N; ++l)
    for (int m = -l; m <= l; ++m)
      c.a[sphere::harmonic_index(l, m)] =
          normal_pair(seed, kDomainCoefficients, static_cast<std::uint32_t>(l),
                      static_cast<std::uint32_t>(m + l), 0)[0];
  return c;
}

int required_field_degree(int N, double radius) {
  const int floor_rule = 2 * N + 8 + static_cast<int>(std::ceil(1.4 * radius));
  return std::max(floor_rule, N + 4 + plane_wave_bandwidth(radius));
}

int required_kernel_degree(double radius) {
  return std::max(6 + static_cast<int>(std::ceil(1.4 * radius)), 6 + plane_wave_bandwidth(radius));
}

double supported_radius(int N, int degree) {
  if (required_field_degree(N, 0.0) > degree) return -1.0;
  double lo = 0.0, hi = 1.0;
  while (required_field_degree(N, hi) <= degree) hi *= 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (required_field_degree(N, mid) <= degree ? lo : hi) = mid;
  }
  return lo;
}

BeltramiField::BeltramiField(const SpectralDensityCoefficients& c, const sphere::SphericalGrid& grid) {
  build(c, grid);
}

BeltramiField::BeltramiField(const SpectralDensityCoefficients& c, double radius) {
  build(c, sphere::build_quadrature(required_field_degree(c.truncation, radius)));
}

void BeltramiField::build(const SpectralDensityCoefficients& c, const sphere::SphericalGrid& grid) {
  truncation_ = c.truncation;
  seed_ = c.seed;
  grid_ = grid;
  max_radius_ = supported_radius(c.truncation, grid.exact_degree);
  if (max_radius_ < 0.0)
    throw PreconditionError("BeltramiField: grid degree " + std::to_string(grid.exact_degree) +
                            " too low for truncation " + std::to_string(c.truncation));
  std::vector<double> ybuf(static_cast<std::size_t>((c.truncation + 1) * (c.truncation + 1)));
  g_full_.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    g_full_[i] = grid.weights[i] * density_at(c, grid.nodes[i], ybuf) * p_vector(grid.nodes[i]);
  for (std::size_t i : grid.hemisphere_indices()) {
    xi_.push_back(grid.nodes[i]);
    g_.push_back(2.0 * g_full_[i]);
  }
}

void BeltramiField::check_radius(const Vec3& x) const {
  if (x.norm() > max_radius_)
    throw PreconditionError("BeltramiField: |x| = " + std::to_string(x.norm()) +
                            " exceeds the radius " + std::to_string(max_radius_) +
                            " resolved by the grid");
}

FieldJet BeltramiField::jet(const Vec3& x) const {
  check_radius(x);
  double u0 = 0, u1 = 0, u2 = 0;
  double gd[3][3] = {};
  const std::size_t n = xi_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3& xi = xi_[k];
    const double ph = xi(0) * x(0) + xi(1) * x(1) + xi(2) * x(2);
    const double cs = std::cos(ph), sn = std::sin(ph);
    const CVec3& g = g_[k];
    // t = g e^{i ph}
    const double tr0 = g(0).real() * cs - g(0).imag() * sn, ti0 = g(0).real() * sn + g(0).imag() * cs;
    const double tr1 = g(1).real() * cs - g(1).imag() * sn, ti1 = g(1).real() * sn + g(1).imag() * cs;
    const double tr2 = g(2).real() * cs - g(2).imag() * sn, ti2 = g(2).real() * sn + g(2).imag() * cs;
    u0 += tr0;
    u1 += tr1;
    u2 += tr2;
    // Re(i xi_j t_i) = -xi_j Im t_i
    for (int j = 0; j < 3; ++j) {
      gd[0][j] -= xi(j) * ti0;
      gd[1][j] -= xi(j) * ti1;
      gd[2][j] -= xi(j) * ti2;
    }
  }
  FieldJet out;
  out.x = x;
  out.u = Vec3(u0, u1, u2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.grad(i, j) = gd[i][j];
  return out;
}

Vec3 BeltramiField::value(const Vec3& x) const {
  check_radius(x);
  Vec3 u = Vec3::Zero();
  for (std::size_t k = 0; k < xi_.size(); ++k) {
    const std::complex<double> e = std::polar(1.0, xi_[k].dot(x));
    u += (g_[k] * e).real();
  }
  return u;
}

double BeltramiField::imaginary_residue(const Vec3& x) const {
  CVec3 s = CVec3::Zero();
  for (std::size_t i = 0; i < grid_.size(); ++i) s += g_full_[i] * std::polar(1.0, grid_.nodes[i].dot(x));
  return s.imag().cwiseAbs().maxCoeff();
}

FieldJet evaluate_field(const SpectralDensityCoefficients& c, const Vec3& x,
                        const sphere::SphericalGrid& grid) {
  const int need = required_field_degree(c.truncation, x.norm());
  if (grid.exact_degree < need)
    throw PreconditionError("evaluate_field: grid degree " + std::to_string(grid.exact_degree) +
                            " below required " + std::to_string(need));
  return BeltramiField(c, grid).jet(x);
}

double series_scalar(const SpectralDensityCoefficients& c, const Vec3& x) {
  const double r = x.norm();
  const int N = c.truncation;
  const Vec3 dir = r > 0.0 ? Vec3(x / r) : Vec3(0.0, 0.0, 1.0);
  std::vector<double> y(static_cast<std::size_t>((N + 1) * (N + 1)));
  sphere::real_spherical_harmonics(N, dir, y);
  const std::vector<double> j = sphere::spherical_bessels(N, r);
  double s = 0.0;
  for (int l = 0; l <= N; ++l) {
    double t = 0.0;
    for (int m = -l; m <= l; ++m) t += c.at(l, m) * y[sphere::harmonic_index(l, m)];
    s += (l % 2 ? -t : t) * j[l];
  }
  return 4.0 * kPi * s;
}

namespace {
// Sixth-order central first derivative along `axis`.
double central_d1(const std::function<double(const Vec3&)>& f, const Vec3& x, int axis, double h) {
  static constexpr double w[3] = {3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};
  double s = 0.0;
  for (int k = 1; k <= 3; ++k) {
    Vec3 xp = x, xm = x;
    xp(axis) += k * h;
    xm(axis) -= k * h;
    s += w[k - 1] * (f(xp) - f(xm));
  }
  return s / h;
}

std::function<double(const Vec3&)> differentiate(std::function<double(const Vec3&)> f, int axis, double h) {
  return [f = std::move(f), axis, h](const Vec3& x) { return central_d1(f, x, axis, h); };
}
}  // namespace

Vec3 evaluate_field_series(const SpectralDensityCoefficients& c, const Vec3& x, double h) {
  using Fn = std::function<double(const Vec3&)>;
  const Fn psi = [&c](const Vec3& p) { return series_scalar(c, p); };
  const Fn d1psi = differentiate(psi, 0, h);
  const Fn F = [&](const Vec3& p) { return kQScale * (psi(p) + kSqrt7 * d1psi(p)); };
  const Fn dF[3] = {differentiate(F, 0, h), differentiate(F, 1, h), differentiate(F, 2, h)};
  // curl curl (F e1) = grad(d1 F) - lap(F) e1, curl (F e1) = (0, d3 F, -d2 F)
  double d1dj[3];
  for (int j = 0; j < 3; ++j) d1dj[j] = central_d1(dF[0], x, j, h);
  const double lap = d1dj[0] + central_d1(dF[1], x, 1, h) + central_d1(dF[2], x, 2, h);
  const double d2F = dF[1](x), d3F = dF[2](x);
  return -Vec3(d1dj[0] - lap, d1dj[1] + d3F, d1dj[2] - d2F);
}

Mat3 covariance_kernel(const Vec3& x, const sphere::SphericalGrid& grid) {
  const int need = required_kernel_degree(x.norm());
  if (grid.exact_degree < need)
    throw PreconditionError("covariance_kernel: grid degree " + std::to_string(grid.exact_degree) +
                            " below required " + std::to_string(need));
  CMat3 k = CMat3::Zero();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const CVec3 p = p_vector(grid.nodes[i]);
    k += (grid.weights[i] * std::polar(1.0, grid.nodes[i].dot(x))) * (p * p.adjoint());
  }
  return k.real();
}

Mat3 covariance_kernel(const Vec3& x) {
  return covariance_kernel(x, sphere::build_quadrature(required_kernel_degree(x.norm())));
}

Mat3 empirical_covariance(int N, int M, const Vec3& x, const Vec3& y, std::uint64_t seed, int threads) {
  if (M < 2) throw ArgumentError("empirical_covariance: M must be at least 2");
  if (N < 0) throw ArgumentError("empirical_covariance: N must be nonnegative");
  // u(x) is linear in the coefficients: u(x) = sum a_lm U_lm(x). Precompute
  // U_lm at both points once and reuse them for every sample.
  const double radius = std::max(x.norm(), y.norm());
  const auto grid = sphere::build_quadrature(required_field_degree(N, radius));
  const std::size_t nc = static_cast<std::size_t>((N + 1) * (N + 1));
  Eigen::MatrixXd Ux = Eigen::MatrixXd::Zero(3, static_cast<Eigen::Index>(nc));
  Eigen::MatrixXd Uy = Ux;
  std::vector<double> ybuf(nc);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3& xi = grid.nodes[i];
    const CVec3 wp = grid.weights[i] * p_vector(xi);
    const CVec3 ex = wp * std::polar(1.0, xi.dot(x));
    const CVec3 ey = wp * std::polar(1.0, xi.dot(y));
    sphere::real_spherical_harmonics(N, xi, ybuf);
    for (int l = 0; l <= N; ++l) {
      const std::complex<double> il = i_pow(l);
      const Vec3 ax = (il * ex).real(), ay = (il * ey).real();
      for (int m = -l; m <= l; ++m) {
        const std::size_t idx = sphere::harmonic_index(l, m);
        Ux.col(static_cast<Eigen::Index>(idx)) += ybuf[idx] * ax;
        Uy.col(static_cast<Eigen::Index>(idx)) += ybuf[idx] * ay;
      }
    }
  }
  std::vector<Mat3> outer(static_cast<std::size_t>(M));
  parallel_for(outer.size(), threads, [&](std::size_t s) {
    const auto c = sample_coefficients(N, seed + s);
    const Eigen::Map<const Eigen::VectorXd> a(c.a.data(), static_cast<Eigen::Index>(nc));
    const Vec3 ux = Ux * a, uy = Uy * a;
    outer[s] = ux * uy.transpose();
  });
  Mat3 sum = Mat3::Zero();
  for (const auto& o : outer) sum += o;
  return sum / static_cast<double>(M);
}

}  // namespace beltrami::field
