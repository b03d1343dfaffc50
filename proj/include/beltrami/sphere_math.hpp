/// @file sphere_math.hpp
/// @brief Spherical harmonics, spherical Bessel functions and product
///        quadrature on the unit sphere.
#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <vector>

namespace beltrami::sphere {

struct MultiIndex {
  int a1 = 0, a2 = 0, a3 = 0;
  int order() const { return a1 + a2 + a3; }
};

/// Gauss-Legendre in the polar cosine times a uniform azimuthal rule.
/// Node (i, j) sits at index i * n_azimuth + j; the antipode of (i, j) is
/// (n_polar-1-i, j + n_azimuth/2), which the field evaluator exploits.
struct SphericalGrid {
  std::vector<Eigen::Vector3d> nodes;
  std::vector<double> weights;
  int exact_degree = 0;
  int n_polar = 0;
  int n_azimuth = 0;

  std::size_t size() const { return nodes.size(); }
  /// One representative per antipodal pair (pairs with itself excluded,
  /// which cannot occur since no node lies at its own antipode).
  std::vector<std::size_t> hemisphere_indices() const;
};

/// Index of (l, m) in a packed array ordered by l, then m = -l..l.
constexpr std::size_t harmonic_index(int l, int m) {
  return static_cast<std::size_t>(l * l + l + m);
}

/// Real orthonormal harmonic with x3 as polar axis:
/// sqrt(2) P_lm cos(m phi) for m > 0, P_l0 for m = 0, sqrt(2) P_l|m| sin(|m| phi) for m < 0.
double real_spherical_harmonic(int l, int m, const Eigen::Vector3d& xi);

/// All Y_lm with l <= lmax at a unit vector, packed by harmonic_index.
/// `out` must hold (lmax+1)^2 values. No range checks on xi.
void real_spherical_harmonics(int lmax, const Eigen::Vector3d& xi, std::span<double> out);

/// j_l(r) = sqrt(pi/2) J_{l+1/2}(r)/sqrt(r).
double spherical_bessel(int l, double r);

/// j_0 .. j_lmax at r via Miller's downward recurrence (upward when r > lmax).
std::vector<double> spherical_bessels(int lmax, double r);

/// Closed-form integral of xi^alpha over the unit sphere.
double sphere_monomial_integral(const MultiIndex& alpha);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

SphericalGrid build_quadrature(int exact_degree);

}  // namespace beltrami::sphere
