#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace qmpcert;

TEST(Projectors, SymmetricMatchesPermutationAverage) {
  for (int d = 1; d <= 3; ++d)
    for (int k = 1; k <= 4; ++k) {
      auto h = sym_projector(d, k);
      ASSERT_TRUE(h.dense.has_value());
      CMatrix want = oracle::sym_projector(d, k);
      EXPECT_LT((h.dense->mat - want).cwiseAbs().maxCoeff(), 1e-13);
      EXPECT_EQ(h.trace(), binomial(d + k - 1, k));
      std::mt19937_64 rng(d * 10 + k);
      CVector v = gaussian_vector(h.dim(), rng);
      EXPECT_LT((h.apply(v) - want * v).norm(), 1e-12);
    }
}

TEST(Projectors, AntisymmetricTraceAndIdempotence) {
  for (int d = 1; d <= 3; ++d)
    for (int k = 1; k <= 4; ++k) {
      auto a = antisym_projector(d, k);
      EXPECT_NEAR(a.trace().real(), static_cast<double>(binomial(d, k)), 1e-12);
      EXPECT_LT((a.mat * a.mat - a.mat).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Projectors, IsotypicDecomposition) {
  for (int d = 2; d <= 3; ++d)
    for (int n = 2; n <= 4; ++n) {
      const auto dim = static_cast<Eigen::Index>(std::pow(d, n));
      CMatrix sum = CMatrix::Zero(dim, dim);
      for (const auto& l : partitions_of(n)) {
        auto p = isotypic_projector(l, d, n);
        EXPECT_LT((p.mat * p.mat - p.mat).cwiseAbs().maxCoeff(), 1e-11);
        EXPECT_NEAR(p.trace().real(), static_cast<double>(specht_dim(l) * weyl_dim(l, d)), 1e-10);
        sum += p.mat;
      }
      EXPECT_LT((sum - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff(), 1e-11);
    }
  EXPECT_LT((isotypic_projector(Partition({3}), 2, 3).mat - oracle::sym_projector(2, 3)).cwiseAbs().maxCoeff(), 1e-12);
}

namespace {

// Tr_dropped(Π_J^{(N)}) densely: average permutation matrices of J-slots, then digit-loop trace.
CMatrix dense_traced_sym(const std::vector<int>& label_dims, const std::vector<std::vector<int>>& kept) {
  int dJ = 1;
  for (int d : label_dims) dJ *= d;
  const int N = static_cast<int>(kept.size());
  CMatrix pi = oracle::sym_projector(dJ, N);
  std::vector<int> dims;
  std::vector<bool> drop;
  for (int c = 0; c < N; ++c)
    for (int x = 0; x < static_cast<int>(label_dims.size()); ++x) {
      dims.push_back(label_dims[x]);
      drop.push_back(std::find(kept[c].begin(), kept[c].end(), x) == kept[c].end());
    }
  return oracle::partial_trace(pi, dims, drop);
}

}  // namespace

TEST(Wiring, TracedSymmetrizerMatchesDenseOracle) {
  struct Case {
    std::vector<int> dims;
    std::vector<std::vector<int>> kept;
  };
  const std::vector<Case> cases{
      {{2, 2}, {{0, 1}}},
      {{2, 2}, {{0}, {1}}},
      {{2, 3}, {{0}, {1}}},
      {{2, 2}, {{0}, {1}, {0}, {1}}},
      {{2, 2, 2}, {{0, 1}, {1, 2}}},
      {{2, 2, 2}, {{0, 1}, {0, 2}, {1, 2}}},
      {{3, 2}, {{0}, {0, 1}, {1}}},
      {{2, 2}, {{}, {0, 1}}},
  };
  for (const auto& c : cases) {
    TraceLayout lay{c.dims, c.kept};
    auto ts = traced_symmetrizer(lay);
    CMatrix want = dense_traced_sym(c.dims, c.kept);
    ASSERT_EQ(static_cast<Eigen::Index>(ts.dim()), want.rows());
    EXPECT_LT((ts.dense() - want).cwiseAbs().maxCoeff(), 1e-12);
    std::mt19937_64 rng(7);
    CVector v = gaussian_vector(ts.dim(), rng), out;
    ts.apply(v, out);
    EXPECT_LT((out - want * v).norm(), 1e-11);
  }
}

TEST(Wiring, SingleTraceLoopCounts) {
  // Tr_B over a fully dropped cycle gives the label dimension
  TraceLayout lay{{2, 3}, {{0}, {0}}};
  auto w = traced_permutation({1, 0}, lay);
  EXPECT_DOUBLE_EQ(w.scalar, 3.0);
  auto e = traced_permutation({0, 1}, lay);
  EXPECT_DOUBLE_EQ(e.scalar, 9.0);
}

TEST(Wiring, IsotypicSumAtFullRankIsIdentitySum) {
  TraceLayout lay{{2, 2}, {{0}, {1}}};
  auto full = traced_isotypic_sum(lay, 4);
  CMatrix want = oracle::partial_trace(CMatrix::Identity(16, 16), {2, 2, 2, 2}, {false, true, true, false});
  EXPECT_LT((full.dense() - want).cwiseAbs().maxCoeff(), 1e-12);
  auto sym = traced_isotypic_sum(lay, 1);
  EXPECT_LT((sym.dense() - traced_symmetrizer(lay).dense()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Wiring, BudgetExceededThrows) {
  TraceLayout lay{{2}, std::vector<std::vector<int>>(12, {0})};
  EXPECT_THROW(traced_symmetrizer(lay), ResourceError);
}

TEST(Biriffle, MatchesBruteForce) {
  std::mt19937_64 rng(11);
  for (int d = 1; d <= 2; ++d)
    for (int n = 1; n <= 2; ++n)
      for (int k = 1; k <= 3; ++k) {
        const int dim = static_cast<int>(std::pow(d, n));
        std::vector<CMatrix> xs;
        for (int i = 0; i < k; ++i) xs.push_back(oracle::random_psd(dim, rng));
        auto sym = symmetrize_inputs(xs, d, n);
        EXPECT_NEAR(biriffle_value(xs, d, n, true), biriffle_bruteforce(sym, n, d), 1e-10);
      }
}

TEST(Biriffle, RejectsUnsymmetrizedInputs) {
  std::mt19937_64 rng(12);
  std::vector<CMatrix> xs{oracle::random_psd(4, rng), oracle::random_psd(4, rng)};
  EXPECT_THROW(biriffle_terms(xs, 2, 2, false), PreconditionError);
}

TEST(Biriffle, TraceNormalizationSingleFactor) {
  // k = 1: p_n = Tr(Σ̄_n X) for X inside the symmetric subspace
  CMatrix pi = oracle::sym_projector(2, 2);
  EXPECT_NEAR(biriffle_value({pi}, 2, 2, false), 1.0, 1e-12);
}
