/// @file zero_census.hpp
/// @brief Newton-based zero location for vector fields with analytic
///        Jacobians, window counts and the small-ball sandwich bounds.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "beltrami/beltrami_core.hpp"

namespace beltrami::zeros {

using Vec3 = Eigen::Vector3d;

struct Ball {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

/// Axis-aligned box [lo, hi). With periodic = true the field is assumed
/// periodic with period hi - lo in each coordinate.
struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();
  bool periodic = false;
};

using SearchRegion = std::variant<Ball, Box>;

struct FieldProvenance {
  std::string kind = "beltrami";  // "beltrami", "torus", or a free label
  int truncation = -1;            // N for R^3 fields, L for torus fields
  std::uint64_t seed = 0;
};

struct ZeroTolerances {
  double residual = 0.0;
  double dedup_radius = 0.0;
};

struct ZeroDiagnostics {
  std::size_t seeds = 0;
  std::size_t converged = 0;
  std::size_t diverged = 0;
  std::size_t singular = 0;
  std::size_t outside = 0;
  std::size_t duplicates = 0;
};

struct ZeroSet {
  std::vector<Vec3> points;
  std::vector<double> jacobian_dets;
  std::vector<double> residuals;
  FieldProvenance provenance;
  SearchRegion region;
  ZeroTolerances tolerances;
  ZeroDiagnostics diagnostics;

  std::size_t size() const { return points.size(); }
};

using JetEvaluator = std::function<field::FieldJet(const Vec3&)>;

struct ZeroSearchOptions {
  int max_iterations = 40;
  double singular_det = 1e-10;  // |det J| at or below this counts as degenerate
  int threads = 0;
  FieldProvenance provenance;
};

/// Newton from every node of a cubic seed lattice covering the region.
/// Converged points are kept when inside the region, nondegenerate and at
/// least 1e-4 seed_spacing from every earlier point in lexicographic order.
ZeroSet find_zeros(const JetEvaluator& field, const SearchRegion& region, double seed_spacing,
                   double newton_tol, const ZeroSearchOptions& options = {});

struct CountingWindow {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

/// Number of points strictly inside the open ball.
int count_in_window(std::span<const Vec3> points, const CountingWindow& w);
int count_in_window(const ZeroSet& zs, const CountingWindow& w);

/// Volume of B_a(0) intersected with B_b(d e1).
double ball_intersection_volume(double a, double b, double d);
double ball_volume(double r);

struct SandwichResult {
  double lower = 0.0;  // average of N(y, r)/|B_r| over B_{R-r}, times |B_{R-r}|
  double mid = 0.0;    // exact count in B_R
  double upper = 0.0;  // same average over B_{R+r}
  double lower_error = 0.0;  // Monte Carlo standard errors
  double upper_error = 0.0;
  double exact_lower = 0.0;  // closed form through ball intersections
  double exact_upper = 0.0;
  bool holds = false;        // chain holds within 3 standard errors
};

SandwichResult sandwich_check(std::span<const Vec3> points, double R, double r, long long mc_nodes,
                              std::uint64_t seed = 0);

struct ZeroDensityOptions {
  double seed_spacing = 0.7;
  double newton_tol = 1e-9;
  bool allow_large_radius = false;
  int threads = 0;
};

struct ZeroDensityResult {
  double mean_density = 0.0;
  double standard_error = 0.0;
  std::vector<int> counts;
  double volume = 0.0;
};

/// Counts zeros of truncation-N fields (one per seed) in B_R and averages
/// count / |B_R|.
ZeroDensityResult empirical_zero_density(int N, int n_samples, double R, std::span<const std::uint64_t> seeds,
                                         const ZeroDensityOptions& options = {});

}  // namespace beltrami::zeros
