#include "beltrami/zero_census.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <unordered_map>

#include "beltrami/errors.hpp"
#include "beltrami/parallel.hpp"
#include "beltrami/rng.hpp"

namespace beltrami::zeros {

namespace {
constexpr double kPi = std::numbers::pi;
// Newton limits for one zero agree to far better than this; genuine pairs at
// a quarter of the lattice spacing do occur and must stay distinct.
constexpr double kDedupFraction = 1e-4;

struct Candidate {
  Vec3 x;
  double residual;
  double det;
};

// Lattice nodes covering the region, with one extra layer of margin.
std::vector<Vec3> seed_lattice(const SearchRegion& region, double h) {
  std::vector<Vec3> seeds;
  if (const auto* b = std::get_if<Ball>(&region)) {
    const double reach = b->radius + h;
    const int n = static_cast<int>(std::ceil(reach / h));
    for (int i = -n; i <= n; ++i)
      for (int j = -n; j <= n; ++j)
        for (int k = -n; k <= n; ++k) {
          const Vec3 off(i * h, j * h, k * h);
          if (off.norm() <= reach) seeds.push_back(b->center + off);
        }
  } else {
    const auto& box = std::get<Box>(region);
    std::array<int, 3> n{};
    std::array<double, 3> step{};
    for (int d = 0; d < 3; ++d) {
      const double len = box.hi(d) - box.lo(d);
      if (box.periodic) {
        n[d] = std::max(1, static_cast<int>(std::ceil(len / h)));
        step[d] = len / n[d];
      } else {
        n[d] = static_cast<int>(std::ceil(len / h)) + 3;
        step[d] = h;
      }
    }
    for (int i = 0; i < n[0]; ++i)
      for (int j = 0; j < n[1]; ++j)
        for (int k = 0; k < n[2]; ++k) {
          Vec3 x(i * step[0], j * step[1], k * step[2]);
          x += box.lo;
          if (!box.periodic) x -= Vec3::Constant(h);
          seeds.push_back(x);
        }
  }
  return seeds;
}

Vec3 wrap(const Box& box, Vec3 x) {
  for (int d = 0; d < 3; ++d) {
    const double len = box.hi(d) - box.lo(d);
    double t = std::fmod(x(d) - box.lo(d), len);
    if (t < 0) t += len;
    if (t >= len) t -= len;
    x(d) = box.lo(d) + t;
  }
  return x;
}

bool inside(const SearchRegion& region, const Vec3& x) {
  if (const auto* b = std::get_if<Ball>(&region)) return (x - b->center).norm() < b->radius;
  const auto& box = std::get<Box>(region);
  for (int d = 0; d < 3; ++d)
    if (x(d) < box.lo(d) || x(d) >= box.hi(d)) return false;
  return true;
}

// Iterates that wander this far outside the region are abandoned.
bool far_outside(const SearchRegion& region, const Vec3& x, double margin) {
  if (const auto* b = std::get_if<Ball>(&region)) return (x - b->center).norm() > b->radius + margin;
  const auto& box = std::get<Box>(region);
  if (box.periodic) return false;
  for (int d = 0; d < 3; ++d)
    if (x(d) < box.lo(d) - margin || x(d) > box.hi(d) + margin) return true;
  return false;
}

enum class Outcome { converged, diverged, singular };

Outcome newton(const JetEvaluator& f, const SearchRegion& region, Vec3 x, double h, double tol,
               const ZeroSearchOptions& opt, Candidate& out) {
  const Box* periodic_box = nullptr;
  if (const auto* b = std::get_if<Box>(&region); b && b->periodic) periodic_box = b;
  try {
    field::FieldJet j = f(x);
    for (int it = 0; it < opt.max_iterations; ++it) {
      const double res = j.u.norm();
      if (res < tol) {
        // one polishing step, kept only if it improves the residual
        const Eigen::PartialPivLU<Eigen::Matrix3d> lu(j.grad);
        Vec3 y = x - lu.solve(j.u);
        if (periodic_box) y = wrap(*periodic_box, y);
        const field::FieldJet jy = f(y);
        if (jy.u.norm() < res) {
          x = y;
          j = jy;
        }
        const double det = j.grad.determinant();
        out = {periodic_box ? wrap(*periodic_box, x) : x, j.u.norm(), det};
        return std::abs(det) <= opt.singular_det ? Outcome::singular : Outcome::converged;
      }
      const double det = j.grad.determinant();
      if (!std::isfinite(det) || std::abs(det) < 1e-300) return Outcome::diverged;
      Vec3 step = j.grad.partialPivLu().solve(j.u);
      if (step.norm() > h) step *= h / step.norm();  // trust radius of one lattice cell
      x -= step;
      if (periodic_box) x = wrap(*periodic_box, x);
      if (far_outside(region, x, 2.0 * h)) return Outcome::diverged;
      j = f(x);
    }
  } catch (const PreconditionError&) {
    return Outcome::diverged;
  }
  return Outcome::diverged;
}

// Greedy lexicographic dedup with a uniform cell hash.
std::vector<Candidate> deduplicate(std::vector<Candidate> c, double radius, const SearchRegion& region,
                                   std::size_t& duplicates) {
  std::sort(c.begin(), c.end(), [](const Candidate& a, const Candidate& b) {
    return std::lexicographical_compare(a.x.data(), a.x.data() + 3, b.x.data(), b.x.data() + 3);
  });
  const Box* pbox = nullptr;
  if (const auto* b = std::get_if<Box>(&region); b && b->periodic) pbox = b;
  std::array<long long, 3> ncell{1 << 20, 1 << 20, 1 << 20};
  std::array<double, 3> cell{radius, radius, radius};
  Vec3 origin = Vec3::Constant(-1e6 * radius);
  if (pbox) {
    origin = pbox->lo;
    for (int d = 0; d < 3; ++d) {
      const double len = pbox->hi(d) - pbox->lo(d);
      ncell[d] = std::max(1LL, static_cast<long long>(std::floor(len / radius)));
      cell[d] = len / ncell[d];
    }
  }
  auto key = [&](long long i, long long j, long long k) {
    auto m = [](long long v, long long n) { return ((v % n) + n) % n; };
    return (m(i, ncell[0]) * ncell[1] + m(j, ncell[1])) * ncell[2] + m(k, ncell[2]);
  };
  auto distance = [&](const Vec3& a, const Vec3& b) {
    Vec3 d = a - b;
    if (pbox)
      for (int k = 0; k < 3; ++k) {
        const double len = pbox->hi(k) - pbox->lo(k);
        d(k) -= len * std::round(d(k) / len);
      }
    return d.norm();
  };
  std::unordered_map<long long, std::vector<std::size_t>> cells;
  std::vector<Candidate> kept;
  for (const auto& cand : c) {
    const long long ci = static_cast<long long>(std::floor((cand.x(0) - origin(0)) / cell[0]));
    const long long cj = static_cast<long long>(std::floor((cand.x(1) - origin(1)) / cell[1]));
    const long long ck = static_cast<long long>(std::floor((cand.x(2) - origin(2)) / cell[2]));
    bool dup = false;
    for (int a = -1; a <= 1 && !dup; ++a)
      for (int b = -1; b <= 1 && !dup; ++b)
        for (int e = -1; e <= 1 && !dup; ++e) {
          const auto it = cells.find(key(ci + a, cj + b, ck + e));
          if (it == cells.end()) continue;
          for (std::size_t idx : it->second)
            if (distance(kept[idx].x, cand.x) < radius) {
              dup = true;
              break;
            }
        }
    if (dup) {
      ++duplicates;
      continue;
    }
    cells[key(ci, cj, ck)].push_back(kept.size());
    kept.push_back(cand);
  }
  return kept;
}
}  // namespace

ZeroSet find_zeros(const JetEvaluator& field, const SearchRegion& region, double seed_spacing, double newton_tol,
                   const ZeroSearchOptions& options) {
  if (!(seed_spacing > 0.0)) throw ArgumentError("find_zeros: seed_spacing must be positive");
  if (!(newton_tol > 0.0)) throw ArgumentError("find_zeros: newton_tol must be positive");
  if (const auto* b = std::get_if<Ball>(&region); b && !(b->radius > 0.0))
    throw ArgumentError("find_zeros: ball radius must be positive");

  ZeroSet zs;
  zs.region = region;
  zs.provenance = options.provenance;
  zs.tolerances = {newton_tol, kDedupFraction * seed_spacing};
  const std::vector<Vec3> seeds = seed_lattice(region, seed_spacing);
  zs.diagnostics.seeds = seeds.size();

  std::vector<std::optional<Candidate>> found(seeds.size());
  std::vector<Outcome> outcome(seeds.size(), Outcome::diverged);
  parallel_for(seeds.size(), options.threads, [&](std::size_t i) {
    Candidate c;
    outcome[i] = newton(field, region, seeds[i], seed_spacing, newton_tol, options, c);
    if (outcome[i] == Outcome::converged) found[i] = c;
  });

  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    switch (outcome[i]) {
      case Outcome::diverged: ++zs.diagnostics.diverged; break;
      case Outcome::singular: ++zs.diagnostics.singular; break;
      case Outcome::converged:
        ++zs.diagnostics.converged;
        if (inside(region, found[i]->x))
          candidates.push_back(*found[i]);
        else
          ++zs.diagnostics.outside;
        break;
    }
  }
  for (const auto& c : deduplicate(std::move(candidates), zs.tolerances.dedup_radius, region,
                                   zs.diagnostics.duplicates)) {
    zs.points.push_back(c.x);
    zs.residuals.push_back(c.residual);
    zs.jacobian_dets.push_back(c.det);
  }
  return zs;
}

int count_in_window(std::span<const Vec3> points, const CountingWindow& w) {
  if (!(w.radius > 0.0)) throw ArgumentError("count_in_window: radius must be positive");
  int n = 0;
  for (const auto& p : points) n += (p - w.center).norm() < w.radius;
  return n;
}

int count_in_window(const ZeroSet& zs, const CountingWindow& w) { return count_in_window(zs.points, w); }

double ball_volume(double r) { return 4.0 / 3.0 * kPi * r * r * r; }

double ball_intersection_volume(double a, double b, double d) {
  d = std::abs(d);
  if (d >= a + b) return 0.0;
  if (d <= std::abs(a - b)) return ball_volume(std::min(a, b));
  const double s = a + b - d;
  return kPi * s * s * (d * d + 2.0 * d * (a + b) - 3.0 * (a - b) * (a - b)) / (12.0 * d);
}

SandwichResult sandwich_check(std::span<const Vec3> points, double R, double r, long long mc_nodes,
                              std::uint64_t seed) {
  if (!(r > 0.0) || !(r < R)) throw ArgumentError("sandwich_check: need 0 < r < R");
  if (mc_nodes < 2) throw ArgumentError("sandwich_check: need at least two integration nodes");
  SandwichResult out;
  out.mid = count_in_window(points, {Vec3::Zero(), R});
  const double vr = ball_volume(r);
  for (const auto& p : points) {
    out.exact_lower += ball_intersection_volume(R - r, r, p.norm()) / vr;
    out.exact_upper += ball_intersection_volume(R + r, r, p.norm()) / vr;
  }
  auto mc = [&](double rho, std::uint64_t stream, double& err) {
    NormalStream rng(seed, kDomainSynthetic, stream);
    double s = 0.0, s2 = 0.0;
    for (long long k = 0; k < mc_nodes; ++k) {
      // uniform point in B_rho: Gaussian direction, radius by inverse CDF
      Vec3 g(rng.next(), rng.next(), rng.next());
      const Vec3 y = rho * std::cbrt(rng.uniform()) * g.normalized();
      const double v = count_in_window(points, {y, r});
      s += v;
      s2 += v * v;
    }
    const double n = static_cast<double>(mc_nodes);
    const double mean = s / n;
    const double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1.0));
    const double scale = ball_volume(rho) / vr;
    err = scale * std::sqrt(var / n);
    return scale * mean;
  };
  out.lower = mc(R - r, 0, out.lower_error);
  out.upper = mc(R + r, 1, out.upper_error);
  out.holds = out.lower <= out.mid + 3.0 * out.lower_error && out.mid <= out.upper + 3.0 * out.upper_error;
  return out;
}

ZeroDensityResult empirical_zero_density(int N, int n_samples, double R, std::span<const std::uint64_t> seeds,
                                         const ZeroDensityOptions& opt) {
  if (n_samples < 2) throw ArgumentError("empirical_zero_density: need at least two samples");
  if (static_cast<int>(seeds.size()) < n_samples) throw ArgumentError("empirical_zero_density: not enough seeds");
  if (!(R > 0.0)) throw ArgumentError("empirical_zero_density: R must be positive");
  if (R > 10.0 && !opt.allow_large_radius)
    throw ArgumentError("empirical_zero_density: R > 10 requires allow_large_radius");
  ZeroDensityResult out;
  out.volume = ball_volume(R);
  const double reach = R + 3.0 * opt.seed_spacing;
  std::vector<double> dens;
  for (int s = 0; s < n_samples; ++s) {
    const field::BeltramiField f(field::sample_coefficients(N, seeds[s]), reach);
    ZeroSearchOptions zo;
    zo.threads = opt.threads;
    zo.provenance = {"beltrami", N, seeds[s]};
    const ZeroSet zs = find_zeros([&f](const Vec3& x) { return f.jet(x); }, Ball{Vec3::Zero(), R},
                                  opt.seed_spacing, opt.newton_tol, zo);
    out.counts.push_back(static_cast<int>(zs.size()));
    dens.push_back(zs.size() / out.volume);
  }
  double mean = 0.0;
  for (double d : dens) mean += d;
  mean /= n_samples;
  double var = 0.0;
  for (double d : dens) var += (d - mean) * (d - mean);
  var /= (n_samples - 1);
  out.mean_density = mean;
  out.standard_error = std::sqrt(var / n_samples);
  return out;
}

}  // namespace beltrami::zeros
