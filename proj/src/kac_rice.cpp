#include "beltrami/kac_rice.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numbers>
#include <tuple>
#include <vector>

#include "beltrami/beltrami_core.hpp"
#include "beltrami/errors.hpp"
#include "beltrami/parallel.hpp"
#include "beltrami/rng.hpp"

namespace beltrami::kac_rice {

namespace {
constexpr double kPi = std::numbers::pi;
using Rational = boost::multiprecision::cpp_rational;

Rational to_rational(const Fraction& f) { return Rational(f.num, f.den); }
}  // namespace

double q_cubic(const Vec5& z) {
  const double z1 = z(0), z2 = z(1), z3 = z(2), z4 = z(3), z5 = z(4);
  return z1 * z2 * z2 + z2 * z2 * z4 - z1 * z1 * z4 - z1 * z4 * z4 - z3 * z3 * z4 +
         2.0 * z2 * z3 * z5 - z1 * z5 * z5;
}

double q_tilde(const Vec5& z) {
  return 189.0 / 65.0 * z(0) * z(0) + 42.0 / 11.0 * (z(1) * z(1) + z(2) * z(2)) +
         42.0 / 13.0 * (z(3) * z(3) + z(0) * z(3) + z(4) * z(4));
}

ZetaCovariance sigma_matrices() {
  ZetaCovariance zc;
  for (auto& row : zc.sigma_exact) row.fill(Fraction{0, 1});
  auto set = [&](int i, int j, Fraction f) {
    zc.sigma_exact[i][j] = f;
    zc.sigma_exact[j][i] = f;
  };
  // Diagonal entries d1u1, d2u2, d3u3 and their couplings.
  set(0, 0, {5, 21});
  set(4, 4, {3, 14});
  set(8, 8, {3, 14});
  set(0, 4, {-5, 42});
  set(0, 8, {-5, 42});
  set(4, 8, {-2, 21});
  // Off-diagonal pairs d_j u_i, d_i u_j are fully correlated.
  for (auto [a, b, f] : {std::tuple{1, 3, Fraction{11, 84}}, std::tuple{2, 6, Fraction{11, 84}},
                         std::tuple{5, 7, Fraction{13, 84}}}) {
    set(a, a, f);
    set(b, b, f);
    set(a, b, f);
  }
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) zc.sigma(i, j) = zc.sigma_exact[i][j].value();
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) zc.sigma_prime(i, j) = zc.sigma(kReducedIndices[i], kReducedIndices[j]);

  auto basis = [](std::initializer_list<std::pair<int, double>> entries) {
    Vec9 v = Vec9::Zero();
    for (auto [i, x] : entries) v(i) = x;
    return v;
  };
  zc.kernel_basis = {basis({{0, 1}, {4, 1}, {8, 1}}), basis({{1, 1}, {3, -1}}),
                     basis({{2, 1}, {6, -1}}), basis({{5, 1}, {7, -1}})};

  // Exact determinant of the reduced block by fraction-exact elimination.
  std::array<std::array<Rational, 5>, 5> m;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) m[i][j] = to_rational(zc.sigma_exact[kReducedIndices[i]][kReducedIndices[j]]);
  Rational det = 1;
  for (int c = 0; c < 5; ++c) {
    int piv = c;
    while (piv < 5 && m[piv][c] == 0) ++piv;
    if (piv == 5) {
      det = 0;
      break;
    }
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (int r = c + 1; r < 5; ++r) {
      const Rational f = m[r][c] / m[c][c];
      for (int k = c; k < 5; ++k) m[r][k] -= f * m[c][k];
    }
  }
  zc.det_sigma_prime_exact = numerator(det).str() + "/" + denominator(det).str();
  zc.det_sigma_prime = static_cast<double>(det);
  return zc;
}

Mat9 sigma_from_spectral(const sphere::SphericalGrid& grid) {
  if (grid.exact_degree < 8) throw PreconditionError("sigma_from_spectral: grid degree must be at least 8");
  Eigen::Matrix<std::complex<double>, 9, 9> G = Eigen::Matrix<std::complex<double>, 9, 9>::Zero();
  Eigen::Matrix<std::complex<double>, 9, 3> B = Eigen::Matrix<std::complex<double>, 9, 3>::Zero();
  Eigen::Matrix3cd K = Eigen::Matrix3cd::Zero();
  const std::complex<double> I(0.0, 1.0);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const auto& xi = grid.nodes[n];
    const double w = grid.weights[n];
    const Eigen::Vector3cd p = field::p_vector(xi);
    K += w * p * p.adjoint();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
          B(3 * i + j, k) += w * I * xi(j) * p(i) * std::conj(p(k));
          for (int l = 0; l < 3; ++l) G(3 * i + j, 3 * k + l) += w * xi(j) * xi(l) * p(i) * std::conj(p(k));
        }
      }
  }
  const Eigen::Matrix<std::complex<double>, 9, 9> S = G - B * K.inverse() * B.adjoint();
  return S.real();
}

double density_prefactor() {
  return std::pow(21.0, 2.5) / (143.0 * std::sqrt(5.0) * std::pow(kPi, 4));
}

std::string to_string(DensityMethod m) {
  return m == DensityMethod::quadrature ? "quadrature" : "monte_carlo";
}

void gauss_hermite(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (n < 1) throw ArgumentError("gauss_hermite: order must be positive");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  nodes = es.eigenvalues();
  weights = std::sqrt(kPi) * es.eigenvectors().row(0).transpose().array().square();
}

namespace {
double hermite_integral(int order, const Mat5& A, int threads) {
  Eigen::VectorXd x, w;
  gauss_hermite(order, x, w);
  // Column k of A scaled by sqrt(2) x_i, precomputed per axis.
  std::vector<std::vector<Vec5>> axis(5, std::vector<Vec5>(order));
  for (int k = 0; k < 5; ++k)
    for (int i = 0; i < order; ++i) axis[k][i] = A.col(k) * (std::numbers::sqrt2 * x(i));
  std::vector<double> partial(order);
  parallel_for(static_cast<std::size_t>(order), threads, [&](std::size_t i0) {
    double acc0 = 0.0;
    for (int i1 = 0; i1 < order; ++i1) {
      const Vec5 z01 = axis[0][i0] + axis[1][i1];
      double acc1 = 0.0;
      for (int i2 = 0; i2 < order; ++i2) {
        const Vec5 z012 = z01 + axis[2][i2];
        double acc2 = 0.0;
        for (int i3 = 0; i3 < order; ++i3) {
          const Vec5 z0123 = z012 + axis[3][i3];
          double acc3 = 0.0;
          for (int i4 = 0; i4 < order; ++i4) acc3 += w(i4) * std::abs(q_cubic(z0123 + axis[4][i4]));
          acc2 += w(i3) * acc3;
        }
        acc1 += w(i2) * acc2;
      }
      acc0 += w(i1) * acc1;
    }
    partial[i0] = w(static_cast<Eigen::Index>(i0)) * acc0;
  });
  double s = 0.0;
  for (double p : partial) s += p;
  // z = sqrt(2) A x maps e^{-Q~(z)} dz to |det A| 2^{5/2} e^{-|x|^2} dx.
  const double jac = std::abs(A.determinant()) * std::pow(2.0, 2.5);
  return density_prefactor() * jac * s;
}
}  // namespace

DensityEstimate nu_z(DensityMethod method, long long budget, std::uint64_t seed, int threads) {
  if (budget <= 0) throw ArgumentError("nu_z: budget must be positive");
  const ZetaCovariance zc = sigma_matrices();
  const Mat5 A = zc.sigma_prime.llt().matrixL();
  DensityEstimate est;
  est.method = method;
  if (method == DensityMethod::quadrature) {
    const int n = static_cast<int>(budget);
    est.value = hermite_integral(n, A, threads);
    est.standard_error = n >= 2 ? std::abs(est.value - hermite_integral(n / 2, A, threads)) / 3.0 : 0.0;
    est.samples_or_nodes = static_cast<long long>(std::pow(n, 5));
    return est;
  }
  constexpr long long kChunk = 1 << 16;
  const long long chunks = (budget + kChunk - 1) / kChunk;
  std::vector<double> sum(static_cast<std::size_t>(chunks)), sumsq(sum.size());
  parallel_for(sum.size(), threads, [&](std::size_t c) {
    NormalStream rng(seed, kDomainMonteCarlo, c);
    const long long count = std::min(kChunk, budget - static_cast<long long>(c) * kChunk);
    double s = 0.0, s2 = 0.0;
    Vec5 g;
    for (long long k = 0; k < count; ++k) {
      for (int i = 0; i < 5; ++i) g(i) = rng.next();
      const double q = std::abs(q_cubic(A * g));
      s += q;
      s2 += q * q;
    }
    sum[c] = s;
    sumsq[c] = s2;
  });
  double s = 0.0, s2 = 0.0;
  for (std::size_t c = 0; c < sum.size(); ++c) {
    s += sum[c];
    s2 += sumsq[c];
  }
  const double n = static_cast<double>(budget);
  const double mean = s / n;
  const double var = budget > 1 ? std::max(0.0, (s2 - n * mean * mean) / (n - 1.0)) : 0.0;
  const double scale = std::pow(2.0 * kPi, -1.5);
  est.value = scale * mean;
  est.standard_error = scale * std::sqrt(var / n);
  est.samples_or_nodes = budget;
  return est;
}

}  // namespace beltrami::kac_rice
