/// @file melnikov.hpp
/// @brief Heteroclinic separatrices of the reduced planar system of the
///        axisymmetric field, their Melnikov coefficients, and a direct
///        measurement of manifold splitting under the periodic
///        perturbation w.
#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

namespace beltrami::melnikov {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// (3 r^2 J0(r) / psi, r sin z / psi); argument error outside the domain.
Vec2 reduced_rhs(double z, double r);

/// Cylindrical components (w_z, w_r, w_theta) of the perturbation
/// w = J1 sin(theta) E_z + (J1 cos(theta) / r) E_r - (J1'(r) sin(theta) / r) E_theta,
/// with E_theta the coordinate field of length r.
Vec3 perturbation_w(double z, double r, double theta);

/// First-order correction to the reduced system when v becomes v + eps w
/// (time is still the azimuth; theta = t).
Vec2 perturbed_rhs_correction(double z, double r, double t);

/// Unstable exponent of the reduced system at p+-.
double reduced_saddle_exponent();

/// (r1, r2): crossings of z = 0 by the two separatrix branches,
/// r1 < j01 < r2.
std::pair<double, double> separatrix_radii();

struct SeparatrixOrbit {
  int branch = 1;
  double r_k = 0.0;
  double T_max = 0.0;
  double tol = 0.0;
  double dt = 0.0;
  std::vector<double> t, Z, R;  // uniform grid on [-T_max, T_max]
  double hamiltonian_drift = 0.0;
  double saddle_exponent = 0.0;
  double integrated_window = 0.0;  // |t| beyond this uses the linearized approach to the saddle
};

/// Branch 1 runs below j01 from p- to p+, branch 2 above j01 from p+ to
/// p-. Each half is integrated away from its saddle (backward from the
/// target, forward from the source) and shifted so Z(0) = 0.
SeparatrixOrbit separatrix_orbit(int k, double T_max = 40.0, double tol = 1e-12, double dt = 0.01);

struct MelnikovResult {
  int branch = 1;
  double a = 0.0;
  double b = 0.0;
  double T_max = 0.0;
  double tol = 0.0;
  double dt = 0.0;
  double tail_bound = 0.0;
};

/// a_k = int R^2 [J1(R) sin Z cos t + 3 J0(R) J1(R) sin t] dt and
/// b_k = int R^2 [J1(R) sin Z sin t - 3 J0(R) J1(R) cos t] dt by
/// composite Simpson on the separatrix samples. The 1/c0^2 factor of the
/// Melnikov function is not included.
MelnikovResult melnikov_coefficients(int k, double T_max = 40.0, double tol = 1e-12, double dt = 0.01);

/// a sin t0 + b cos t0.
double melnikov_function(double t0, const MelnikovResult& m);
double melnikov_derivative(double t0, const MelnikovResult& m);

/// Signed distance of the perturbed unstable manifold from the stable one,
/// per unit eps, along the normal (-Y0_r, Y0_z)/|Y0| at p0 = (0, r_k):
/// -r_k (a sin t0 + b cos t0) / (c0^2 |Y0(p0)|).
double displacement_prediction(double t0, const MelnikovResult& m);

/// The same displacement as a direct integral of Y0 ^ Y1 along the
/// separatrix with the weight R(0)/R(s) from the invariant measure dz dr / r.
double displacement_integral(double t0, const SeparatrixOrbit& orbit);

struct SplittingResult {
  double measured = 0.0;
  double predicted = 0.0;
  double ratio = 0.0;
  Vec2 unstable_point = Vec2::Zero();
  Vec2 stable_point = Vec2::Zero();
  Vec2 source_orbit = Vec2::Zero();  // perturbed periodic points at phase t0
  Vec2 target_orbit = Vec2::Zero();
};

/// Integrates the first-order perturbed system from the local unstable
/// manifold of the perturbed source orbit and the local stable manifold of
/// the perturbed target orbit to the normal line through p0 at time t0.
SplittingResult splitting_check(double eps, int k, double t0, double tol = 1e-13, int periods = 2);

}  // namespace beltrami::melnikov
