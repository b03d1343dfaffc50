/// @file beltrami_core.hpp
/// @brief Gaussian random Beltrami fields on R^3 (curl u = u) built as
///        sphere integrals of a random Hermitian density times the fixed
///        polarization p.
#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <vector>

#include "beltrami/sphere_math.hpp"

namespace beltrami::field {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;

/// Polarization p(xi) = q(xi1) (xi1^2 - 1, xi1 xi2 - i xi3, xi1 xi3 + i xi2),
/// q(t) = (1/8) sqrt(15/pi) (1 + sqrt(7) i t). On the unit sphere it spans
/// the kernel of m_matrix(xi) and is orthogonal to xi.
CVec3 p_vector(const Vec3& xi);

/// M_xi V = i xi x V - V, whose kernel on |xi| = 1 is spanned by p(xi);
/// det M_xi = |xi|^2 - 1.
CMat3 m_matrix(const Vec3& xi);

struct SpectralDensityCoefficients {
  int truncation = 0;
  std::uint64_t seed = 0;
  std::vector<double> a;  // packed by sphere::harmonic_index

  double at(int l, int m) const { return a[sphere::harmonic_index(l, m)]; }
};

/// (N+1)^2 standard normals, each keyed by (seed, l, m).
SpectralDensityCoefficients sample_coefficients(int N, std::uint64_t seed);

struct FieldJet {
  Vec3 x = Vec3::Zero();
  Vec3 u = Vec3::Zero();
  Mat3 grad = Mat3::Zero();  // grad(i, j) = d_j u_i

  double divergence() const { return grad.trace(); }
  Vec3 curl() const {
    return {grad(2, 1) - grad(1, 2), grad(0, 2) - grad(2, 0), grad(1, 0) - grad(0, 1)};
  }
};

/// Smallest grid degree accepted for evaluating a truncation-N field at
/// distance `radius` from the origin. Combines 2N + 8 + ceil(1.4 r) with an
/// excess-bandwidth term for the plane wave that keeps the quadrature
/// error near round-off when N is small compared with r.
int required_field_degree(int N, double radius);

/// Same for the covariance kernel integrand p (x) conj(p) e^{i xi.x}.
int required_kernel_degree(double radius);

/// Largest |x| supported by a grid of the given degree for truncation N.
double supported_radius(int N, int degree);

/// Field sampled from given coefficients with node weights precomputed.
/// Thread safe after construction.
class BeltramiField {
 public:
  BeltramiField(const SpectralDensityCoefficients& c, const sphere::SphericalGrid& grid);
  /// Builds its own grid sized for points with |x| <= radius.
  BeltramiField(const SpectralDensityCoefficients& c, double radius);

  FieldJet jet(const Vec3& x) const;
  Vec3 value(const Vec3& x) const;
  /// Largest |imag| of the full (unpaired) quadrature sum.
  double imaginary_residue(const Vec3& x) const;
  double max_radius() const { return max_radius_; }
  int truncation() const { return truncation_; }
  std::uint64_t seed() const { return seed_; }

 private:
  void build(const SpectralDensityCoefficients& c, const sphere::SphericalGrid& grid);
  void check_radius(const Vec3& x) const;

  int truncation_ = 0;
  std::uint64_t seed_ = 0;
  double max_radius_ = 0.0;
  // One node per antipodal pair with doubled weight: u = Re sum 2 g e^{i xi.x}.
  std::vector<Vec3> xi_;
  std::vector<CVec3> g_;
  sphere::SphericalGrid grid_;
  std::vector<CVec3> g_full_;
};

/// u(x) and grad u(x); throws PreconditionError when the grid degree is
/// below required_field_degree(N, |x|).
FieldJet evaluate_field(const SpectralDensityCoefficients& c, const Vec3& x,
                        const sphere::SphericalGrid& grid);

/// Independent evaluation through the Bessel series: u = -(curl curl + curl)(F, 0, 0)
/// with F = q(d_1) psi, psi = 4 pi sum (-1)^l a_lm Y_lm(x/|x|) j_l(|x|), and all
/// derivatives taken by nested sixth-order central differences.
Vec3 evaluate_field_series(const SpectralDensityCoefficients& c, const Vec3& x, double h = 0.06);

/// Scalar psi of the series route, exposed for tests.
double series_scalar(const SpectralDensityCoefficients& c, const Vec3& x);

/// Re of the sphere integral of p (x) conj(p) e^{i xi.x}.
Mat3 covariance_kernel(const Vec3& x, const sphere::SphericalGrid& grid);
Mat3 covariance_kernel(const Vec3& x);

/// Monte Carlo mean of u(x) (x) u(y) over M fields with seeds seed, seed+1, ...
Mat3 empirical_covariance(int N, int M, const Vec3& x, const Vec3& y, std::uint64_t seed,
                          int threads = 0);

}  // namespace beltrami::field
