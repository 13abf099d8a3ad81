#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace qmpcert;

namespace {

// One-sample Kolmogorov–Smirnov statistic against a CDF given by quadrature of f.
double ks_statistic(std::vector<double> xs, const std::function<double(double)>& f, double lo) {
  std::sort(xs.begin(), xs.end());
  double cdf = 0, prev = lo, worst = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    cdf += adaptive_simpson(f, prev, xs[i], 1e-10);
    prev = xs[i];
    worst = std::max({worst, std::abs(cdf - static_cast<double>(i) / xs.size()),
                      std::abs(cdf - static_cast<double>(i + 1) / xs.size())});
  }
  return worst;
}

}  // namespace

TEST(Types, MultinomialNormalizes) {
  auto t = multinomial_type_dist({0.2, 0.3, 0.5}, 15);
  EXPECT_NEAR(t.total(), 1.0, 1e-12);
  EXPECT_EQ(t.support.size(), compositions(15, 3).size());
}

TEST(Spectral, NormalizationAndModeTrend) {
  const Spectrum s({0.6, 0.3, 0.1});
  for (int n : {1, 5, 20, 50}) EXPECT_NEAR(spectral_dist(s, n).total(), 1.0, 1e-9);
  auto t = spectral_dist(s, 50);
  const auto& mode = t.mode().first;
  const double l1 = std::abs(mode[0] / 50.0 - 0.6) + std::abs(mode[1] / 50.0 - 0.3) + std::abs(mode[2] / 50.0 - 0.1);
  EXPECT_LE(l1, 0.1);
}

TEST(Spectral, QubitSchurWeylOracle) {
  // p(λ) = f_λ·s_λ(s), with the two-variable Schur polynomial written out as a monomial sum
  const Spectrum s({0.7, 0.3});
  auto t = spectral_dist(s, 6);
  for (const auto& [l, p] : t.support) {
    const int a = l[0], b = l[1];
    double sch = 0;
    for (int i = b; i <= a; ++i) sch += std::pow(0.7, i) * std::pow(0.3, a + b - i);
    const double f = static_cast<double>(specht_dim(Partition(l)));
    EXPECT_NEAR(p, f * sch, 1e-12);
  }
}

TEST(Densities, NondegenerateIntegratesToOne) {
  std::mt19937_64 rng(1);
  for (int d = 2; d <= 5; ++d) {
    std::vector<double> lam(d);
    std::uniform_real_distribution<double> u(-1, 1);
    for (auto& x : lam) x = u(rng);
    auto f = [&](double x) { return density_nondegenerate(lam, x); };
    const double lo = *std::min_element(lam.begin(), lam.end()), hi = *std::max_element(lam.begin(), lam.end());
    EXPECT_NEAR(adaptive_simpson(f, lo, hi, 1e-10), 1.0, 1e-5);
  }
  EXPECT_NEAR(density_nondegenerate({1.0, 0.0}, 0.4), 1.0, 1e-14);
}

TEST(Densities, DegenerateIntegratesAndMatchesProjectorCase) {
  std::vector<Eigenvalue> e{{1.0, 1}, {0.0, 2}};
  auto f = [&](double x) { return density_degenerate(e, x); };
  EXPECT_NEAR(adaptive_simpson(f, 0, 1, 1e-10), 1.0, 1e-5);
  // rank-one projector in d = 3: |⟨ψ|φ⟩|² ~ Beta(1, 2)
  for (double x : {0.1, 0.5, 0.9}) EXPECT_NEAR(f(x), 2 * (1 - x), 1e-10);
  std::vector<Eigenvalue> g{{-0.5, 2}, {0.2, 1}, {1.0, 1}};
  EXPECT_NEAR(adaptive_simpson([&](double x) { return density_degenerate(g, x); }, -0.5, 1.0, 1e-10), 1.0, 1e-5);
}

TEST(Densities, DegenerateIsLimitOfNondegenerate) {
  std::vector<Eigenvalue> e{{0.0, 1}, {0.4, 2}, {1.0, 1}};
  for (double x : {0.2, 0.7})
    EXPECT_NEAR(density_degenerate(e, x), density_nondegenerate({0.0, 0.4 - 1e-4, 0.4 + 1e-4, 1.0}, x), 1e-3);
}

TEST(Densities, MonteCarloKs) {
  std::vector<double> lam{-1.0, 0.2, 0.5, 1.0};
  CMatrix X = oracle::diag(lam);
  std::vector<double> samples;
  for (int t = 0; t < 4000; ++t) {
    auto p = haar_random_pure(4, derive_seed(99, t));
    samples.push_back((p.amp.adjoint() * X * p.amp)(0).real());
  }
  const double D = ks_statistic(samples, [&](double x) { return density_nondegenerate(lam, x); }, -1);
  // 1% critical value 1.63/√N
  EXPECT_LT(D, 1.63 / std::sqrt(4000.0));
}

TEST(Densities, QubitPairXzMonteCarloChiSquare) {
  CMatrix X(2, 2), Z(2, 2);
  X << 0, 1, 1, 0;
  Z << 1, 0, 0, -1;
  const int N = 40000, B = 6;
  std::vector<double> counts(B * B, 0);
  for (int t = 0; t < N; ++t) {
    auto p = haar_random_pure(2, derive_seed(7, t));
    const double x = (p.amp.adjoint() * X * p.amp)(0).real(), z = (p.amp.adjoint() * Z * p.amp)(0).real();
    const int i = std::min(B - 1, static_cast<int>((x + 1) / 2 * B)), j = std::min(B - 1, static_cast<int>((z + 1) / 2 * B));
    counts[i * B + j] += 1;
  }
  double chi2 = 0;
  int cells = 0;
  for (int i = 0; i < B; ++i)
    for (int j = 0; j < B; ++j) {
      const double xl = -1 + 2.0 * i / B, xh = xl + 2.0 / B, zl = -1 + 2.0 * j / B, zh = zl + 2.0 / B;
      const double mass = oracle::disk_cell_mass([&](double a, double b) { return density_qubit_pair(X, Z, a, b); }, xl, xh, zl, zh);
      if (mass * N < 5) continue;
      chi2 += std::pow(counts[i * B + j] - mass * N, 2) / (mass * N);
      ++cells;
    }
  // χ² 0.1% critical value for ≤ 35 degrees of freedom is below 67
  EXPECT_LT(chi2, 67.0) << cells << " cells";
}

TEST(Densities, QubitObservableUniform) {
  std::vector<double> lam{0.8, -0.3};
  for (double x : {-0.2, 0.0, 0.5}) EXPECT_NEAR(density_nondegenerate(lam, x), 1 / 1.1, 1e-12);
}

TEST(Born, MatchesSymmetrizerOracle) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 6; ++t) {
    const int d = 2 + t % 2;
    const int rank = 1 + static_cast<int>(rng() % (d - 1));
    CMatrix u = haar_unitary(d, rng);
    CMatrix P = u.leftCols(rank) * u.leftCols(rank).adjoint();
    CMatrix Q = oracle::random_hermitian(d, rng);
    for (int n = 1; n <= 3; ++n) {
      std::vector<CMatrix> fac(n, P);
      CMatrix PnQ = oracle::kron_all([&] { auto f = fac; f.push_back(Q); return f; }());
      const double num = (oracle::sym_projector(d, n + 1) * PnQ).trace().real() /
                         static_cast<double>(binomial(n + d, n + 1));
      const double den = (oracle::sym_projector(d, n) * oracle::kron_all(fac)).trace().real() /
                         static_cast<double>(binomial(n + d - 1, n));
      EXPECT_NEAR(born_ratio(P, Q, n), num / den, 1e-10);
    }
  }
}

TEST(Born, ClosedFormEndpoints) {
  CMatrix P = oracle::diag({1, 0, 0}), Q = oracle::diag({0.2, 0.5, 1.0});
  EXPECT_DOUBLE_EQ(born_ratio(P, Q, 0), Q.trace().real() / 3);
  EXPECT_DOUBLE_EQ(born_ratio(P, CMatrix::Identity(3, 3), 7), 1.0);
  EXPECT_DOUBLE_EQ(born_ratio(P, oracle::diag({0, 1, 0}), 5), 1.0 / 8);
  EXPECT_THROW(born_ratio(oracle::diag({0.5, 0, 0}), Q, 1), PreconditionError);
}

TEST(ToyXz, CornerBoundAndBalancedValues) {
  auto b2 = toy_xz_exact_bounds(2);
  EXPECT_NEAR(b2.corner_prob, 13.0 / 120, 1e-9);
  EXPECT_TRUE(b2.corner_ok);
  // C(2,1)²·E[(1−z²)(1−x²)]/16 = 4·(2/5)/16
  EXPECT_NEAR(b2.balanced_prob, 0.1, 1e-9);
  auto b3 = toy_xz_exact_bounds(3);
  EXPECT_FALSE(b3.balanced_checked);
  EXPECT_EQ(b3.balanced_prob, 0.0);
}

TEST(ToyXz, SimulatorIsDeterministicAndUnbiased) {
  auto a = toy_xz_simulate(8, 2000, 5), b = toy_xz_simulate(8, 2000, 5);
  ASSERT_EQ(a.size(), b.size());
  double bias_x = 0, bias_z = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].x_est, b[i].x_est);
    bias_x += a[i].x_est - a[i].x_true;
    bias_z += a[i].z_est - a[i].z_true;
  }
  EXPECT_LT(std::abs(bias_x / a.size()), 0.03);
  EXPECT_LT(std::abs(bias_z / a.size()), 0.03);
}
