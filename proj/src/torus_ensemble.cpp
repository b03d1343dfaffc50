#include "beltrami/torus_ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "beltrami/errors.hpp"
#include "beltrami/parallel.hpp"
#include "beltrami/rng.hpp"
#include "beltrami/sphere_math.hpp"

namespace beltrami::torus {

namespace {
constexpr double kPi = std::numbers::pi;

std::uint32_t offset_component(int c) { return static_cast<std::uint32_t>(c + 32768); }

const LatticeShell& nonempty_shell(int L, LatticeShell& storage) {
  storage = lattice_shell(L);
  if (storage.empty()) throw ArgumentError("torus: the shell |k|^2 = " + std::to_string(L) + " is empty");
  return storage;
}
}  // namespace

bool is_admissible(int L) {
  if (L < 1) return false;
  const int r = L % 8;
  return r == 1 || r == 2 || r == 3 || r == 5 || r == 6;
}

bool is_three_square_excluded(int L) {
  if (L < 1) return false;
  while (L % 4 == 0) L /= 4;
  return L % 8 == 7;
}

LatticeShell lattice_shell(int L) {
  if (L < 1) throw ArgumentError("lattice_shell: L must be positive");
  LatticeShell s;
  s.L = L;
  s.admissible = is_admissible(L);
  const int m = static_cast<int>(std::floor(std::sqrt(static_cast<double>(L)))) + 1;
  for (int a = -m; a <= m; ++a)
    for (int b = -m; b <= m; ++b) {
      const int rest = L - a * a - b * b;
      if (rest < 0) continue;
      int c = static_cast<int>(std::lround(std::sqrt(static_cast<double>(rest))));
      if (c * c != rest) continue;
      if (c == 0) {
        s.points.emplace_back(a, b, 0);
      } else {
        s.points.emplace_back(a, b, -c);
        s.points.emplace_back(a, b, c);
      }
    }
  s.d = static_cast<int>(s.points.size());
  return s;
}

bool in_half_shell(const IVec3& k) {
  if (k(0) != 0) return k(0) > 0;
  if (k(1) != 0) return k(1) > 0;
  return k(2) > 0;
}

TorusSample sample_torus_field(int L, std::uint64_t seed) {
  LatticeShell storage;
  const LatticeShell& shell = nonempty_shell(L, storage);
  TorusSample s;
  s.L = L;
  s.seed = seed;
  s.modes = shell.points;
  s.coefficients.resize(s.modes.size());
  for (std::size_t i = 0; i < s.modes.size(); ++i) {
    const IVec3& k = s.modes[i];
    const IVec3 h = in_half_shell(k) ? k : IVec3(-k);
    const auto n = normal_pair(seed, kDomainTorus, static_cast<std::uint32_t>(L), offset_component(h(0)),
                               (offset_component(h(1)) << 16) | offset_component(h(2)));
    const std::complex<double> a(n[0], n[1]);
    s.coefficients[i] = in_half_shell(k) ? a : std::conj(a);
  }
  return s;
}

TorusField::TorusField(const TorusSample& s) : L_(s.L) {
  if (s.modes.empty()) throw ArgumentError("TorusField: empty sample");
  const double scale = std::sqrt(2.0 * kPi / static_cast<double>(s.modes.size()));
  const double root = std::sqrt(static_cast<double>(s.L));
  for (std::size_t i = 0; i < s.modes.size(); ++i) {
    const Vec3 k = s.modes[i].cast<double>();
    const field::CVec3 g = scale * s.coefficients[i] * field::p_vector(k / root);
    k_full_.push_back(k);
    g_full_.push_back(g);
    if (in_half_shell(s.modes[i])) {
      k_.push_back(k);
      g_.push_back(2.0 * g);
    }
  }
}

field::FieldJet TorusField::jet(const Vec3& x) const {
  double u[3] = {}, gd[3][3] = {};
  for (std::size_t n = 0; n < k_.size(); ++n) {
    const Vec3& k = k_[n];
    const double ph = k.dot(x);
    const double cs = std::cos(ph), sn = std::sin(ph);
    for (int i = 0; i < 3; ++i) {
      const std::complex<double> g = g_[n](i);
      const double tr = g.real() * cs - g.imag() * sn, ti = g.real() * sn + g.imag() * cs;
      u[i] += tr;
      for (int j = 0; j < 3; ++j) gd[i][j] -= k(j) * ti;
    }
  }
  field::FieldJet out;
  out.x = x;
  out.u = Vec3(u[0], u[1], u[2]);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.grad(i, j) = gd[i][j];
  return out;
}

Vec3 TorusField::value(const Vec3& x) const { return jet(x).u; }

double TorusField::imaginary_residue(const Vec3& x) const {
  field::CVec3 s = field::CVec3::Zero();
  for (std::size_t n = 0; n < k_full_.size(); ++n) s += g_full_[n] * std::polar(1.0, k_full_[n].dot(x));
  return s.imag().cwiseAbs().maxCoeff();
}

field::FieldJet evaluate_torus_field(const TorusSample& s, const Vec3& x) { return TorusField(s).jet(x); }

Mat3 rescaled_kernel(const LatticeShell& shell, const Vec3& w) {
  if (shell.empty()) throw ArgumentError("rescaled_kernel: empty shell");
  const double root = std::sqrt(static_cast<double>(shell.L));
  field::CMat3 acc = field::CMat3::Zero();
  for (const IVec3& ki : shell.points) {
    const Vec3 xi = ki.cast<double>() / root;
    const field::CVec3 p = field::p_vector(xi);
    acc += (p * p.adjoint()) * std::polar(1.0, xi.dot(w));
  }
  return (4.0 * kPi / shell.d) * acc.real();
}

Mat3 rescaled_kernel(int L, const Vec3& w) {
  LatticeShell storage;
  return rescaled_kernel(nonempty_shell(L, storage), w);
}

std::vector<Vec3> ball_grid(double radius, double step) {
  if (!(radius >= 0.0) || !(step > 0.0)) throw ArgumentError("ball_grid: invalid radius or step");
  std::vector<Vec3> out;
  const int n = static_cast<int>(std::floor(radius / step));
  for (int a = -n; a <= n; ++a)
    for (int b = -n; b <= n; ++b)
      for (int c = -n; c <= n; ++c) {
        const Vec3 w = step * Vec3(a, b, c);
        if (w.norm() <= radius) out.push_back(w);
      }
  return out;
}

KernelConvergence kernel_convergence_diagnostic(std::span<const int> Ls, std::span<const Vec3> grid, int threads) {
  for (int L : Ls)
    if (!is_admissible(L)) throw ArgumentError("kernel_convergence_diagnostic: L = " + std::to_string(L) + " is not admissible");
  std::vector<Mat3> reference(grid.size());
  parallel_for(grid.size(), resolve_threads(threads), [&](std::size_t i) { reference[i] = field::covariance_kernel(grid[i]); });
  KernelConvergence out;
  for (int L : Ls) {
    const LatticeShell shell = lattice_shell(L);
    std::vector<double> err(grid.size());
    parallel_for(grid.size(), resolve_threads(threads), [&](std::size_t i) {
      err[i] = (rescaled_kernel(shell, grid[i]) - reference[i]).cwiseAbs().maxCoeff();
    });
    out.L.push_back(L);
    out.sup_error.push_back(err.empty() ? 0.0 : *std::max_element(err.begin(), err.end()));
  }
  return out;
}

double equidistribution_discrepancy(int L, int lmax) {
  if (lmax < 1) throw ArgumentError("equidistribution_discrepancy: lmax must be at least 1");
  LatticeShell storage;
  const LatticeShell& shell = nonempty_shell(L, storage);
  const double root = std::sqrt(static_cast<double>(L));
  const std::size_t count = sphere::harmonic_index(lmax, lmax) + 1;
  std::vector<double> sums(count, 0.0), y(count);
  for (const IVec3& k : shell.points) {
    sphere::real_spherical_harmonics(lmax, k.cast<double>() / root, y);
    for (std::size_t i = 0; i < count; ++i) sums[i] += y[i];
  }
  double worst = 0.0;
  for (std::size_t i = 1; i < count; ++i) worst = std::max(worst, std::abs(sums[i]));
  return 4.0 * kPi / shell.d * worst;
}

zeros::ZeroSet torus_zeros(const TorusSample& s, double spacing_factor, double newton_tol, int threads) {
  if (!(spacing_factor > 0.0)) throw ArgumentError("torus_zeros: spacing factor must be positive");
  const TorusField f(s);
  zeros::Box box;
  box.lo = Vec3::Zero();
  box.hi = Vec3::Constant(2.0 * kPi);
  box.periodic = true;
  zeros::ZeroSearchOptions opt;
  opt.threads = threads;
  opt.provenance = {"torus", s.L, s.seed};
  return zeros::find_zeros([&f](const Vec3& x) { return f.jet(x); }, box,
                           spacing_factor / std::sqrt(static_cast<double>(s.L)), newton_tol, opt);
}

TorusCensus torus_zero_census(int L, std::span<const std::uint64_t> seeds, const TorusCensusOptions& options) {
  if (!is_admissible(L)) throw ArgumentError("torus_zero_census: L = " + std::to_string(L) + " is not admissible");
  if (seeds.size() < 2) throw ArgumentError("torus_zero_census: need at least two samples");
  TorusCensus c;
  c.L = L;
  c.seeds.assign(seeds.begin(), seeds.end());
  for (std::uint64_t seed : seeds) {
    const zeros::ZeroSet z = torus_zeros(sample_torus_field(L, seed), options.spacing_factor, options.newton_tol,
                                         options.threads);
    c.counts.push_back(static_cast<int>(z.size()));
  }
  const double n = static_cast<double>(c.counts.size());
  double mean = 0.0;
  for (int k : c.counts) mean += k;
  mean /= n;
  double var = 0.0;
  for (int k : c.counts) var += (k - mean) * (k - mean);
  var /= (n - 1.0);
  c.mean_count = mean;
  c.standard_error = std::sqrt(var / n);
  const double scale = std::pow(static_cast<double>(L), 1.5);
  c.scaled = mean / scale;
  c.scaled_error = c.standard_error / scale;
  return c;
}

}  // namespace beltrami::torus
