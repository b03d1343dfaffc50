/// @file torus_ensemble.hpp
/// @brief Gaussian Beltrami fields on the flat torus [0, 2 pi)^3 with
///        frequency sqrt(L): lattice shells |k|^2 = L, sampling, the
///        rescaled covariance, shell equidistribution and zero counts.
#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "beltrami/beltrami_core.hpp"
#include "beltrami/zero_census.hpp"

namespace beltrami::torus {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using IVec3 = Eigen::Vector3i;

/// L mod 8 in {1, 2, 3, 5, 6}.
bool is_admissible(int L);

/// L = 4^a (8b + 7), the integers that are not sums of three squares.
bool is_three_square_excluded(int L);

struct LatticeShell {
  int L = 0;
  std::vector<IVec3> points;  // lexicographic order
  int d = 0;                  // number of points
  bool admissible = false;

  bool empty() const { return points.empty(); }
};

/// All k in Z^3 with |k|^2 = L by exhaustive search.
LatticeShell lattice_shell(int L);

/// k is in the canonical half of the shell: first nonzero component positive.
bool in_half_shell(const IVec3& k);

struct TorusSample {
  int L = 0;
  std::uint64_t seed = 0;
  std::vector<IVec3> modes;                        // the full shell
  std::vector<std::complex<double>> coefficients;  // a_k, a_{-k} = conj(a_k)
};

/// Re and Im of a_k on the half shell are standard normals addressed by
/// (seed, L, k); the other half is filled by conjugation.
TorusSample sample_torus_field(int L, std::uint64_t seed);

/// u^L = (2 pi / d_L)^{1/2} sum_k a_k p(k / sqrt L) e^{i k.x}, summed over
/// conjugate pairs so the result is real by construction.
class TorusField {
 public:
  explicit TorusField(const TorusSample& s);

  field::FieldJet jet(const Vec3& x) const;
  Vec3 value(const Vec3& x) const;
  /// Imaginary part of the plain sum over the full shell.
  double imaginary_residue(const Vec3& x) const;
  int L() const { return L_; }

 private:
  int L_;
  std::vector<Vec3> k_;                      // half shell
  std::vector<field::CVec3> g_;              // 2 (2 pi / d)^{1/2} a_k p(k / sqrt L)
  std::vector<Vec3> k_full_;
  std::vector<field::CVec3> g_full_;
};

field::FieldJet evaluate_torus_field(const TorusSample& s, const Vec3& x);

/// (4 pi / d_L) sum_k p(k / sqrt L) p(k / sqrt L)^* e^{i k.w / sqrt L}; the
/// sum is real because the shell is symmetric.
Mat3 rescaled_kernel(int L, const Vec3& w);
Mat3 rescaled_kernel(const LatticeShell& shell, const Vec3& w);

/// Cubic lattice of points with spacing `step` inside the closed ball B_radius.
std::vector<Vec3> ball_grid(double radius, double step);

struct KernelConvergence {
  std::vector<int> L;
  std::vector<double> sup_error;  // max over grid and entries
};

/// Sup-norm distance between the rescaled torus kernel and the R^3 kernel
/// over the grid, per L. All L must be admissible.
KernelConvergence kernel_convergence_diagnostic(std::span<const int> Ls, std::span<const Vec3> grid,
                                                int threads = 0);

/// max over real harmonics Y_lm, 1 <= l <= lmax, of |(4 pi / d_L) sum_k Y_lm(k / sqrt L)|.
double equidistribution_discrepancy(int L, int lmax = 6);

struct TorusCensus {
  int L = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<int> counts;
  double mean_count = 0.0;
  double standard_error = 0.0;
  double scaled = 0.0;  // mean / L^{3/2}
  double scaled_error = 0.0;
};

struct TorusCensusOptions {
  double spacing_factor = 0.7;  // seed spacing is spacing_factor / sqrt(L)
  double newton_tol = 1e-10;
  int threads = 0;
};

/// Zeros of u^L over one period cell for each seed.
TorusCensus torus_zero_census(int L, std::span<const std::uint64_t> seeds, const TorusCensusOptions& options = {});

/// Zeros of one sample over the period cell.
zeros::ZeroSet torus_zeros(const TorusSample& s, double spacing_factor = 0.7, double newton_tol = 1e-10,
                           int threads = 0);

}  // namespace beltrami::torus
