#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace qmpcert;

namespace {

using P2 = std::array<long long, 2>;

long long cross(P2 a, P2 b, P2 c) { return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]); }

bool on_segment(P2 a, P2 b, P2 p) {
  return cross(a, b, p) == 0 && std::min(a[0], b[0]) <= p[0] && p[0] <= std::max(a[0], b[0]) &&
         std::min(a[1], b[1]) <= p[1] && p[1] <= std::max(a[1], b[1]);
}

// non-degenerate triangles only; collinear triples are covered by the segment test
bool in_triangle(P2 a, P2 b, P2 c, P2 p) {
  if (cross(a, b, c) == 0) return false;
  const long long d1 = cross(a, b, p), d2 = cross(b, c, p), d3 = cross(c, a, p);
  const bool neg = d1 < 0 || d2 < 0 || d3 < 0, pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(neg && pos);
}

// Carathéodory in the plane: the origin lies in the hull iff it lies in a point, segment or triangle of weights.
bool origin_in_hull(const std::vector<std::vector<int>>& w) {
  const P2 o{0, 0};
  std::vector<P2> p;
  for (const auto& x : w) p.push_back({x[0], x[1]});
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == o) return true;
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      if (on_segment(p[i], p[j], o)) return true;
      for (std::size_t k = j + 1; k < p.size(); ++k)
        if (in_triangle(p[i], p[j], p[k], o)) return true;
    }
  }
  return false;
}

TorusVector scalars(const std::vector<cplx>& a) {
  TorusVector v;
  for (auto x : a) v.push_back(CVector::Constant(1, x));
  return v;
}

}  // namespace

TEST(MomentMap, WeightedAverage) {
  TorusRep rep(2, {{1, 0}, {0, 1}, {-1, -1}});
  auto mu = moment_map(rep, scalars({1.0, 1.0, 1.0}));
  EXPECT_LT(mu.norm(), 1e-15);
  mu = moment_map(rep, scalars({1.0, 0.0, 0.0}));
  EXPECT_NEAR(mu(0), 1.0, 1e-15);
}

TEST(MomentMap, IsGradientOfLogNorm) {
  TorusRep rep(2, {{2, -1}, {-1, 1}, {0, -1}, {1, 1}});
  auto v = scalars({0.3, cplx(0.5, 0.2), 0.7, 0.1});
  KempfNess kn(rep, v);
  RVector x(2);
  x << 0.2, -0.4;
  RVector g;
  kn.value(x, &g);
  for (int i = 0; i < 2; ++i) {
    RVector e = RVector::Zero(2);
    e(i) = 1e-6;
    const double fd = (kn.value(x + e) - kn.value(x - e)) / 2e-6;
    EXPECT_NEAR(g(i), fd, 1e-8);
  }
  // gradient at x is the moment map of the transformed vector
  EXPECT_LT((g - moment_map(rep, act(rep, v, x))).norm(), 1e-12);
}

TEST(Capacity, PrototypeClosedForm) {
  TorusRep rep(1, {{1}, {-1}});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  for (int t = 0; t < 50; ++t) {
    const double a = u(rng), b = u(rng);
    auto c = capacity(rep, scalars({a, cplx(0, b)}));
    EXPECT_NEAR(c.value, std::sqrt(2 * a * b), 1e-9);
    EXPECT_LT(c.moment_map.norm(), 1e-8);
    EXPECT_FALSE(c.unbounded);
  }
}

TEST(Capacity, AgreesWithGridMinimum) {
  TorusRep rep(2, {{1, 0}, {0, 1}, {-1, -1}, {1, 1}});
  auto v = scalars({0.4, 0.9, 0.3, 0.2});
  auto c = capacity(rep, v);
  KempfNess kn(rep, v);
  double best = 1e9;
  for (double x = -4; x <= 4; x += 0.01)
    for (double y = -4; y <= 4; y += 0.01) {
      RVector p(2);
      p << x, y;
      best = std::min(best, kn.value(p));
    }
  EXPECT_NEAR(c.value, std::exp(0.5 * best), 1e-4);
  EXPECT_LE(c.value, std::exp(0.5 * best) + 1e-12);
}

TEST(Capacity, BoundaryCaseInfimumNotAttained) {
  TorusRep rep(1, {{0}, {1}});
  auto c = capacity(rep, scalars({0.6, 0.8}));
  EXPECT_NEAR(c.value, 0.6, 1e-6);
}

TEST(Hull, DichotomyAgainstCaratheodoryOracle) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> coord(-3, 3);
  int inside = 0, outside = 0;
  for (int t = 0; t < 400; ++t) {
    std::set<std::vector<int>> ws;
    const int k = 1 + static_cast<int>(rng() % 5);
    while (static_cast<int>(ws.size()) < k) ws.insert({coord(rng), coord(rng)});
    std::vector<std::vector<int>> w(ws.begin(), ws.end());
    const bool want = origin_in_hull(w);
    auto h = hull_membership(w, {0.0, 0.0});
    ASSERT_EQ(h.inside, want);
    EXPECT_TRUE(h.exact);
    if (h.inside) {
      ++inside;
      RVector c = RVector::Zero(2);
      for (std::size_t i = 0; i < w.size(); ++i) c += h.coefficients[i] * weight_vec(w[i]);
      EXPECT_LT(c.norm(), 1e-12);
    } else {
      ++outside;
      for (const auto& x : w) EXPECT_GT(h.separating.dot(weight_vec(x)), 0.0);
    }
    TorusRep rep(2, w);
    TorusVector v(w.size(), CVector::Constant(1, cplx(1.0)));
    auto c = capacity(rep, v);
    EXPECT_EQ(c.value > 0, want);
    EXPECT_EQ(c.unbounded, !want);
  }
  EXPECT_GT(inside, 20);
  EXPECT_GT(outside, 20);
}

TEST(Hull, IterativePathInHigherRank) {
  std::vector<std::vector<int>> w{{1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}, {0, 0, 1, 0, 0},
                                  {0, 0, 0, 1, 0}, {0, 0, 0, 0, 1}, {-1, -1, -1, -1, -1}};
  auto h = hull_membership(w, std::vector<double>(5, 0.0));
  EXPECT_TRUE(h.inside);
  EXPECT_FALSE(h.exact);
  w.pop_back();
  auto g = hull_membership(w, std::vector<double>(5, 0.0));
  EXPECT_FALSE(g.inside);
}

TEST(FixedSubspace, FiniteGroupCharacterCount) {
  // Z₂ acting on C² by diag(1, −1): dim of invariants in (C²)^{⊗n} is 2^{n−1}
  FiniteGroupRep g{{CMatrix::Identity(2, 2), oracle::diag({1, -1})}};
  for (int n = 1; n <= 4; ++n) {
    auto p = fixed_subspace_projector(g, n);
    EXPECT_LT((p.mat * p.mat - p.mat).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(p.trace().real(), std::pow(2.0, n - 1), 1e-12);
  }
  FiniteGroupRep bad{{oracle::diag({1, -1})}};
  EXPECT_THROW(fixed_subspace_projector(bad, 1), PreconditionError);
}

TEST(FixedSubspace, TorusWeightZero) {
  auto p = fixed_subspace_projector(std::vector<std::vector<int>>{{1}, {-1}}, 4);
  EXPECT_NEAR(p.trace().real(), 6.0, 1e-12);  // C(4,2)
}

TEST(Occasionality, PrototypeClosedFormAndDecay) {
  TorusRep rep(1, {{1}, {-1}});
  const double h = 1 / std::sqrt(2.0);
  auto r = occasionality_probe(rep, scalars({h, h}), {2, 10, 400});
  EXPECT_EQ(r.regime, OccasionalityRegime::Occasional);
  EXPECT_EQ(r.c, 1);
  for (const auto& row : r.rows) {
    const int k = row.n / 2;
    const double exact = std::exp(log_factorial(2 * k) - 2 * log_factorial(k) - 2 * k * std::log(2.0));
    EXPECT_NEAR(row.p, exact, 1e-12);
  }
  EXPECT_NEAR(r.rows.back().scaled, std::sqrt(2 / M_PI), 0.02 * std::sqrt(2 / M_PI));
  auto ctl = occasionality_probe(rep, scalars({1.0, 0.0}), {10, 100});
  EXPECT_EQ(ctl.regime, OccasionalityRegime::ExponentialDecay);
  for (const auto& row : ctl.rows) EXPECT_EQ(row.p, 0.0);
}

TEST(Occasionality, DenseProjectorOracle) {
  // p_n = ⟨ψ^{⊗n}|P_fixed|ψ^{⊗n}⟩ directly
  TorusRep rep(1, {{2}, {-1}, {0}});
  auto psi = scalars({0.4, cplx(0.5, 0.3), 0.0});
  psi[2](0) = std::sqrt(1 - 0.16 - 0.34);
  auto probe = occasionality_probe(rep, psi, {3, 6});
  CVector v(3);
  for (int i = 0; i < 3; ++i) v(i) = psi[i](0);
  for (const auto& row : probe.rows) {
    auto p = fixed_subspace_projector(std::vector<std::vector<int>>{{2}, {-1}, {0}}, row.n);
    CVector vn = v;
    for (int c = 1; c < row.n; ++c) vn = kron(vn, v);
    EXPECT_NEAR(row.p, (vn.adjoint() * p.mat * vn)(0).real(), 1e-12);
  }
}

TEST(Occasionality, StrongDualityTrend) {
  // ‖P v^{⊗n}‖^{1/n} → cap(v) for the prototype
  TorusRep rep(1, {{1}, {-1}});
  auto v = scalars({0.9, 0.4});
  const double cap = capacity(rep, v).value;
  const double norm2 = 0.81 + 0.16;
  auto r = occasionality_probe(rep, v, {20, 200});
  std::vector<double> err;
  for (const auto& row : r.rows) err.push_back(std::abs(std::pow(row.p * std::pow(norm2, row.n), 0.5 / row.n) - cap));
  EXPECT_LT(err[1], err[0]);
  EXPECT_LT(err[1] / cap, 0.02);
}
