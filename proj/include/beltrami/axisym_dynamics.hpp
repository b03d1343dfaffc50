/// @file axisym_dynamics.hpp
/// @brief The explicit axisymmetric Beltrami field v built from the stream
///        function psi(z, r) = cos z + 3 r J1(r), plus flow tools: adaptive
///        integration, Poincare return maps, rotation number and twist.
#pragma once

#include <Eigen/Core>
#include <functional>
#include <utility>
#include <vector>

#include "beltrami/ode.hpp"

namespace beltrami::axisym {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using VectorField = std::function<Vec3(const Vec3&)>;

/// First positive zero of J0, by bracketed root finding.
double bessel_j0_first_zero();

/// psi at the saddles p+-: 3 j01 J1(j01) - 1.
double separatrix_level();

/// psi at the elliptic point (0, j01): the top of the torus family.
double elliptic_level();

struct StreamValue {
  double value = 0.0;
  double dz = 0.0;  // -sin z
  double dr = 0.0;  // 3 r J0(r)
};

StreamValue stream_function(double z, double r);

/// Open domain -10 < z < 10, 9/10 < r < 18/5 of the (z, r) half plane.
bool in_domain(double z, double r);

/// v = (d_r psi / r) E_z - (d_z psi / r) E_r + (psi / r^2) E_theta in
/// Cartesian components, with z = x3 and r the distance to the x3 axis.
Vec3 axi_field(const Vec3& x);

/// Cylindrical coordinates (z, r, theta) of a Cartesian point.
Eigen::Vector3d to_cylindrical(const Vec3& x);
Vec3 from_cylindrical(double z, double r, double theta);

/// p+ = (pi, j01) and p- = (-pi, j01) in (z, r).
std::pair<Vec2, Vec2> fixed_points();

/// Linearization of the normal dynamics along the circles through p+-.
Eigen::Matrix2d normal_variational_matrix();

/// +- sqrt(-3 J0'(j01) / j01), returned as (positive, negative).
std::pair<double, double> monodromy_eigenvalues();

/// Period 2 pi j01^2 / c0 of the circular orbits through p+-.
double saddle_orbit_period();

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec3> states;
  ode::Stats stats;
  bool exited_domain = false;
};

/// Adaptive Dormand-Prince integration recording every accepted step.
/// `domain` (optional) is checked on accepted states; leaving it truncates
/// the trajectory and sets exited_domain.
Trajectory integrate_flow(const VectorField& field, const Vec3& x0, double T, double tol,
                          const std::function<bool(const Vec3&)>& domain = {});

/// Domain predicate for v: (z, r) inside the open domain above.
bool axi_domain(const Vec3& x);

/// Derivative of the time-T flow map by integrating the variational
/// equation, with the field Jacobian from central differences.
Eigen::Matrix3d flow_jacobian(const VectorField& field, const Vec3& x0, double T, double tol);

/// Saddle exponents of the circular orbit through p+ from the monodromy
/// matrix of the 3-D flow: log|mu| / T for the largest and smallest
/// multipliers, returned as (positive, negative).
std::pair<double, double> variational_saddle_exponents(double tol = 1e-12);

/// Level-set chart around the elliptic point (0, j01) for levels psi0 in
/// (c0, c0 + 2): rho = psi - psi0 and theta1 = time since the orbit last
/// crossed the outer half of z = 0 (in the reduced flow whose time is the
/// azimuth), divided by the poloidal period. theta2 is the azimuth / 2 pi.
class LevelChart {
 public:
  explicit LevelChart(double psi0, double tol = 1e-12);

  double level() const { return psi0_; }
  /// Reduced-flow period of the level curve psi = value.
  double period(double value) const;
  /// Outer crossing r > j01 of z = 0 on the level psi = value.
  double reference_radius(double value) const;
  /// (rho, theta1) with theta1 in [0, 1).
  Vec2 to_chart(double z, double r) const;
  /// (z, r) for the chart point.
  Vec2 from_chart(double rho, double theta1) const;
  /// Area density F with sigma = F d rho ^ d theta1 the flux form.
  double area_factor(double rho, double theta1, double h = 1e-5) const;

 private:
  double psi0_;
  double tol_;
};

/// Reduced planar flow (z, r) with the azimuth as time.
Vec2 reduced_flow(double z, double r);

struct SectionHit {
  double z = 0.0, r = 0.0;
  double time = 0.0;           // flow time of the crossing
  double poloidal_turns = 0.0; // lifted angle about (0, j01) / 2 pi since the start
};

struct PoincareOrbit {
  std::vector<SectionHit> hits;
  bool transversality_lost = false;
};

/// Successive returns of the flow of `field` from (z0, r0) on the half
/// plane theta = 0 back to theta = 0 (mod 2 pi), crossing located to 1e-10.
PoincareOrbit poincare_orbit(const VectorField& field, double z0, double r0, int iterates, double tol = 1e-12);

/// Return map in chart coordinates: (rho, theta1) -> (pi1, pi2).
Vec2 poincare_map(const LevelChart& chart, double rho, double theta1, int iterates = 1, double tol = 1e-12);

/// Flux of v through the region bounded by a closed loop in the section,
/// sampled at equally spaced parameter values (trigonometric quadrature).
double section_area(const std::vector<Vec2>& loop);

struct RotationEstimate {
  double omega = 0.0;              // rotation number mod 1
  double convergence = 0.0;        // |estimate(n) - estimate(n/2)|
  bool converged = false;          // convergence <= 1e-5
  double period_prediction = 0.0;  // 2 pi / T_pol mod 1, independent check
  int iterates = 0;
};

/// Weighted Birkhoff average of lifted poloidal increments of the 3-D
/// return map on the torus psi = psi0, starting at chart angle theta1_start.
RotationEstimate rotation_number(double psi0, int iterates = 10000, double theta1_start = 0.0,
                                 double tol = 1e-12);

/// tau = integral over theta1 of d_rho pi2(0, theta1) / F(0, theta1), with
/// the rho derivative by centered differences of step h and one
/// Richardson step.
double estimate_twist(double psi0, double h = 1e-4, int samples = 8, double tol = 1e-12);

}  // namespace beltrami::axisym
