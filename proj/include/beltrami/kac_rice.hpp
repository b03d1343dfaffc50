/// @file kac_rice.hpp
/// @brief Gradient covariance at a zero and the expected zero density
///        of the random Beltrami field.
#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>

#include "beltrami/sphere_math.hpp"

namespace beltrami::kac_rice {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;

/// An exact rational p/q with small integer parts.
struct Fraction {
  long long num = 0;
  long long den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Covariance of the flattened Jacobian (index 3i+j holds d_j u_i)
/// conditioned on u = 0. The reduced block keeps the five free entries
/// (d1u1, d2u1, d3u1, d2u2, d3u2) of the symmetric traceless Jacobian.
struct ZetaCovariance {
  std::array<std::array<Fraction, 9>, 9> sigma_exact{};
  Mat9 sigma;
  Mat5 sigma_prime;
  std::array<Vec9, 4> kernel_basis;
  /// det sigma_prime as an exact fraction num/den.
  std::string det_sigma_prime_exact;
  double det_sigma_prime = 0.0;
};

/// Indices of the reduced block inside the flattened Jacobian.
inline constexpr std::array<int, 5> kReducedIndices = {0, 1, 2, 4, 5};

/// det [[z1, z2, z3], [z2, z4, z5], [z3, z5, -z1-z4]].
double q_cubic(const Vec5& z);

/// (189/65) z1^2 + (42/11)(z2^2 + z3^2) + (42/13)(z4^2 + z1 z4 + z5^2) = z.Sigma'^{-1}z / 2.
double q_tilde(const Vec5& z);

ZetaCovariance sigma_matrices();

/// Sigma = E[grad u (x) grad u] - E[grad u (x) u] E[u (x) u]^{-1} E[u (x) grad u]
/// from sphere integrals of xi-weighted p (x) conj(p) moments.
Mat9 sigma_from_spectral(const sphere::SphericalGrid& grid);

/// c_z = 21^{5/2} / (143 sqrt(5) pi^4) = (2 pi)^{-4} det(Sigma')^{-1/2}.
double density_prefactor();

enum class DensityMethod { quadrature, monte_carlo };
std::string to_string(DensityMethod m);

struct DensityEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  DensityMethod method = DensityMethod::quadrature;
  long long samples_or_nodes = 0;
};

/// Quadrature: `budget` Gauss-Hermite nodes per axis after whitening; the
/// error bar is |I(n) - I(n/2)| / 3, which assumes the O(n^-2) decay
/// observed for the kinked integrand |Q|.
/// Monte Carlo: `budget` draws of Normal(0, Sigma'), mean |Q| times (2 pi)^{-3/2}.
DensityEstimate nu_z(DensityMethod method, long long budget, std::uint64_t seed = 0, int threads = 0);

/// Physicists' Gauss-Hermite rule (weight e^{-x^2}) by Golub-Welsch.
void gauss_hermite(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

}  // namespace beltrami::kac_rice
