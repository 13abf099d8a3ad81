#pragma once

#include "tensor_core.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <map>

namespace qmpcert {

using Rational = boost::multiprecision::cpp_rational;

// Diagonal torus action on ⊕_λ V_λ: t acts on the block of weight λ by t^λ.
struct TorusRep {
  int rank = 1;
  std::vector<std::vector<int>> weights;

  TorusRep() = default;
  TorusRep(int r, std::vector<std::vector<int>> w) : rank(r), weights(std::move(w)) {
    if (rank < 1) throw ArgumentError("torus rank must be >= 1");
    std::set<std::vector<int>> seen;
    for (const auto& l : weights) {
      if (static_cast<int>(l.size()) != rank) throw ArgumentError("weight length differs from the rank");
      if (!seen.insert(l).second) throw ArgumentError("weights must be distinct");
    }
  }
  std::size_t size() const { return weights.size(); }
};

// One amplitude block per weight.
using TorusVector = std::vector<CVector>;

inline std::vector<double> block_norms2(const TorusRep& rep, const TorusVector& v) {
  if (v.size() != rep.size()) throw ArgumentError("one amplitude block per weight required");
  std::vector<double> w;
  for (const auto& b : v) w.push_back(b.squaredNorm());
  return w;
}

inline RVector weight_vec(const std::vector<int>& l) {
  RVector r(static_cast<Eigen::Index>(l.size()));
  for (std::size_t i = 0; i < l.size(); ++i) r(static_cast<Eigen::Index>(i)) = l[i];
  return r;
}

// μ([v]) = Σ_λ (‖v_λ‖²/‖v‖²)·λ
inline RVector moment_map(const TorusRep& rep, const TorusVector& v) {
  const auto w = block_norms2(rep, v);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (total <= 0) throw ArgumentError("moment_map: zero vector");
  RVector mu = RVector::Zero(rep.rank);
  for (std::size_t i = 0; i < rep.size(); ++i) mu += (w[i] / total) * weight_vec(rep.weights[i]);
  return mu;
}

struct HullResult {
  bool inside = false;
  std::vector<double> coefficients;  // convex combination when inside
  RVector separating;                // h with ⟨h, λ − target⟩ > 0 for all λ when outside
  double margin = 0;
  bool exact = false;
};

namespace detail {

// Phase-one simplex over the rationals with Bland's rule: find α ≥ 0 with Aα = b.
inline std::optional<std::vector<Rational>> rational_feasible(const std::vector<std::vector<Rational>>& A,
                                                              std::vector<Rational> b) {
  const std::size_t m = A.size(), n = A[0].size();
  // tableau columns: n originals, m artificials, rhs
  std::vector<std::vector<Rational>> t(m + 1, std::vector<Rational>(n + m + 1, 0));
  for (std::size_t i = 0; i < m; ++i) {
    const bool flip = b[i] < 0;
    for (std::size_t j = 0; j < n; ++j) t[i][j] = flip ? Rational(-A[i][j]) : A[i][j];
    t[i][n + i] = 1;
    t[i][n + m] = flip ? Rational(-b[i]) : b[i];
  }
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;
  // objective row: minimize the sum of artificials, reduced costs stored as −(Σ rows)
  for (std::size_t j = 0; j <= n + m; ++j) {
    Rational s = 0;
    if (j < n || j == n + m)
      for (std::size_t i = 0; i < m; ++i) s += t[i][j];
    t[m][j] = -s;
  }
  for (;;) {
    std::size_t enter = n + m;
    for (std::size_t j = 0; j < n + m; ++j)
      if (t[m][j] < 0) {
        enter = j;
        break;
      }
    if (enter == n + m) break;
    std::size_t leave = m;
    Rational best;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= 0) continue;
      Rational ratio = t[i][n + m] / t[i][enter];
      if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) break;  // unbounded cannot happen in phase one
    const Rational piv = t[leave][enter];
    for (auto& x : t[leave]) x /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || t[i][enter] == 0) continue;
      const Rational f = t[i][enter];
      for (std::size_t j = 0; j <= n + m; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }
  if (t[m][n + m] != 0) return std::nullopt;
  std::vector<Rational> x(n, 0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) x[basis[i]] = t[i][n + m];
  return x;
}

// Nearest point of conv(points) to the origin by Gilbert's algorithm.
inline std::pair<RVector, std::vector<double>> gilbert(const std::vector<RVector>& pts, int iters = 200000,
                                                       double tol = 1e-12) {
  std::vector<double> lam(pts.size(), 0.0);
  std::size_t start = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].squaredNorm() < pts[start].squaredNorm()) start = i;
  lam[start] = 1;
  RVector x = pts[start];
  for (int it = 0; it < iters; ++it) {
    std::size_t s = 0;
    double best = x.dot(pts[0]);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      double v = x.dot(pts[i]);
      if (v < best) {
        best = v;
        s = i;
      }
    }
    const double gap = x.squaredNorm() - best;
    if (gap <= tol) break;
    const RVector dir = pts[s] - x;
    const double step = std::clamp(-x.dot(dir) / dir.squaredNorm(), 0.0, 1.0);
    if (step <= 0) break;
    x += step * dir;
    for (auto& l : lam) l *= (1 - step);
    lam[s] += step;
  }
  return {x, lam};
}

}  // namespace detail

// Decides target ∈ conv(weights). Exact rational arithmetic for rank ≤ 4 and ≤ 32 weights,
// otherwise Gilbert's distance iteration with tolerance 1e−9.
inline HullResult hull_membership(const std::vector<std::vector<int>>& weights, const std::vector<double>& target) {
  if (weights.empty()) throw ArgumentError("hull_membership: at least one weight required");
  const std::size_t r = target.size(), n = weights.size();
  std::vector<RVector> pts;
  for (const auto& w : weights) {
    if (w.size() != r) throw ArgumentError("hull_membership: dimension mismatch");
    RVector p(static_cast<Eigen::Index>(r));
    for (std::size_t i = 0; i < r; ++i) p(static_cast<Eigen::Index>(i)) = w[i] - target[i];
    pts.push_back(p);
  }
  HullResult res;
  const bool integral_target =
      std::all_of(target.begin(), target.end(), [](double t) { return t == std::round(t) && std::abs(t) < 1e9; });
  if (r <= 4 && n <= 32 && integral_target) {
    std::vector<std::vector<Rational>> A(r + 1, std::vector<Rational>(n));
    std::vector<Rational> b(r + 1, 0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < r; ++i) A[i][j] = weights[j][i] - static_cast<long long>(target[i]);
      A[r][j] = 1;
    }
    b[r] = 1;
    auto sol = detail::rational_feasible(A, b);
    res.exact = true;
    if (sol) {
      res.inside = true;
      for (const auto& x : *sol) res.coefficients.push_back(static_cast<double>(x));
      return res;
    }
  }
  auto [near, lam] = detail::gilbert(pts);
  if (!res.exact && near.norm() <= 1e-9) {
    res.inside = true;
    res.coefficients = lam;
    return res;
  }
  res.inside = false;
  res.separating = near;
  res.margin = 1e300;
  for (const auto& p : pts) res.margin = std::min(res.margin, near.dot(p));
  if (res.margin <= 0) {
    if (res.exact) throw NumericError("hull_membership: separating direction failed verification");
    res.inside = true;
    res.coefficients = lam;
  }
  return res;
}

struct CapacityOptions {
  double tau_grad = 1e-8;
  int max_iter = 500;
  double divergence_norm = 1e3;
};

struct CapacityResult {
  double value = 0;
  bool unbounded = false;
  RVector minimizer;     // x*, or the separating direction when unbounded
  RVector moment_map;    // at the transformed vector
  int iterations = 0;
};

// Kempf–Ness potential f(x) = ln Σ_λ e^{λ·x}‖v_λ‖², with gradient and Hessian.
struct KempfNess {
  std::vector<RVector> lam;
  std::vector<double> logw;

  KempfNess(const TorusRep& rep, const TorusVector& v) {
    const auto w = block_norms2(rep, v);
    for (std::size_t i = 0; i < rep.size(); ++i)
      if (w[i] > 0) {
        lam.push_back(weight_vec(rep.weights[i]));
        logw.push_back(std::log(w[i]));
      }
    if (lam.empty()) throw ArgumentError("capacity: zero vector");
  }

  double value(const RVector& x, RVector* grad = nullptr, Eigen::MatrixXd* hess = nullptr) const {
    std::vector<double> e(lam.size());
    double mx = -1e300;
    for (std::size_t i = 0; i < lam.size(); ++i) {
      e[i] = lam[i].dot(x) + logw[i];
      mx = std::max(mx, e[i]);
    }
    double s = 0;
    for (auto& v : e) s += (v = std::exp(v - mx));
    if (grad || hess) {
      const auto r = x.size();
      RVector g = RVector::Zero(r);
      for (std::size_t i = 0; i < lam.size(); ++i) g += (e[i] / s) * lam[i];
      if (grad) *grad = g;
      if (hess) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(r, r);
        for (std::size_t i = 0; i < lam.size(); ++i) h += (e[i] / s) * (lam[i] - g) * (lam[i] - g).transpose();
        *hess = h;
      }
    }
    return mx + std::log(s);
  }
};

// cap(v)² = inf_x Σ_λ e^{λ·x}‖v_λ‖², minimized by damped Newton with Armijo backtracking.
inline CapacityResult capacity(const TorusRep& rep, const TorusVector& v, const CapacityOptions& opt = {}) {
  KempfNess kn(rep, v);
  std::vector<std::vector<int>> support;
  const auto w = block_norms2(rep, v);
  for (std::size_t i = 0; i < rep.size(); ++i)
    if (w[i] > 0) support.push_back(rep.weights[i]);
  CapacityResult res;
  const auto hull = hull_membership(support, std::vector<double>(rep.rank, 0.0));
  if (!hull.inside) {
    res.unbounded = true;
    res.value = 0;
    res.minimizer = -hull.separating;
    res.moment_map = moment_map(rep, v);
    return res;
  }
  RVector x = RVector::Zero(rep.rank), g;
  Eigen::MatrixXd H;
  double f = kn.value(x, &g, &H);
  for (int it = 0; it < opt.max_iter; ++it) {
    res.iterations = it;
    if (g.norm() <= opt.tau_grad) break;
    Eigen::MatrixXd Hr = H + 1e-12 * Eigen::MatrixXd::Identity(rep.rank, rep.rank);
    RVector step = -Hr.completeOrthogonalDecomposition().solve(g);
    if (step.dot(g) >= 0) step = -g;
    double t = 1;
    RVector gn;
    Eigen::MatrixXd Hn;
    double fn = kn.value(x + step, &gn, &Hn);
    while (fn > f + 1e-4 * t * g.dot(step) && t > 1e-12) {
      t *= 0.5;
      fn = kn.value(x + t * step, &gn, &Hn);
    }
    if (fn > f) break;
    x += t * step;
    f = fn;
    g = gn;
    H = Hn;
    if (x.norm() > opt.divergence_norm) break;
  }
  if (g.norm() > opt.tau_grad && x.norm() <= opt.divergence_norm)
    throw NumericError("capacity: Newton did not converge (gradient " + std::to_string(g.norm()) + ")");
  res.value = std::exp(0.5 * f);
  res.minimizer = x;
  res.moment_map = g;
  return res;
}

// Image of v under the real torus element e^{x/2}: block λ scaled by e^{λ·x/2}.
inline TorusVector act(const TorusRep& rep, const TorusVector& v, const RVector& x) {
  TorusVector out = v;
  for (std::size_t i = 0; i < rep.size(); ++i) out[i] *= std::exp(0.5 * weight_vec(rep.weights[i]).dot(x));
  return out;
}

struct FiniteGroupRep {
  std::vector<CMatrix> elements;
};

// (1/|G|)·Σ_g Φ(g)^{⊗n}; the matrix set must be closed under multiplication.
inline Operator fixed_subspace_projector(const FiniteGroupRep& g, int n, double tol = 1e-9) {
  if (g.elements.empty()) throw ArgumentError("fixed_subspace_projector: empty group");
  if (n < 1) throw ArgumentError("fixed_subspace_projector: n >= 1 required");
  auto member = [&](const CMatrix& m) {
    return std::any_of(g.elements.begin(), g.elements.end(),
                       [&](const CMatrix& e) { return (e - m).cwiseAbs().maxCoeff() <= tol; });
  };
  for (const auto& a : g.elements)
    for (const auto& b : g.elements)
      if (!member(a * b)) throw PreconditionError("fixed_subspace_projector: matrices not closed under products");
  const auto d = static_cast<int>(g.elements[0].rows());
  std::size_t dim = 1;
  for (int c = 0; c < n; ++c) dim *= d;
  check_dense_dim(dim);
  CMatrix p = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& e : g.elements) {
    CMatrix k = e;
    for (int c = 1; c < n; ++c) k = kron(k, e);
    p += k;
  }
  p /= static_cast<double>(g.elements.size());
  return Operator(LabeledSpace::of_dim(d).power(n), std::move(p));
}

// Torus case: projector onto multi-indices whose weights sum to zero; basis_weights[i] is the
// weight of basis vector i.
inline Operator fixed_subspace_projector(const std::vector<std::vector<int>>& basis_weights, int n) {
  if (basis_weights.empty() || n < 1) throw ArgumentError("fixed_subspace_projector: bad arguments");
  const auto d = static_cast<int>(basis_weights.size());
  const std::size_t r = basis_weights[0].size();
  std::size_t dim = 1;
  for (int c = 0; c < n; ++c) dim *= d;
  check_dense_dim(dim);
  CMatrix p = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t idx = 0; idx < dim; ++idx) {
    std::vector<int> sum(r, 0);
    std::size_t rem = idx;
    for (int c = 0; c < n; ++c) {
      const auto& w = basis_weights[rem % d];
      rem /= d;
      for (std::size_t i = 0; i < r; ++i) sum[i] += w[i];
    }
    if (std::all_of(sum.begin(), sum.end(), [](int s) { return s == 0; }))
      p(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx)) = 1;
  }
  return Operator(LabeledSpace::of_dim(d).power(n), std::move(p));
}

enum class OccasionalityRegime { Occasional, ExponentialDecay };

struct OccasionalityRow {
  int n;
  double p;
  double scaled;  // n^{c/2}·p_n
};

struct OccasionalityResult {
  OccasionalityRegime regime = OccasionalityRegime::Occasional;
  int c = 0;  // dimension of the span of the supported weights
  std::vector<OccasionalityRow> rows;
};

// p_n = Tr(P_ψ^{⊗n}·P_fixed(n)): the chance that n independent weight draws, with
// probabilities ‖ψ_λ‖²/‖ψ‖², sum to zero. Computed by dynamic programming over partial sums.
inline OccasionalityResult occasionality_probe(const TorusRep& rep, const TorusVector& psi, const std::vector<int>& n_list,
                                               double tau_grad = 1e-8, std::size_t max_states = 5000000) {
  OccasionalityResult res;
  const RVector mu = moment_map(rep, psi);
  res.regime = mu.norm() <= tau_grad ? OccasionalityRegime::Occasional : OccasionalityRegime::ExponentialDecay;
  const auto w = block_norms2(rep, psi);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<std::pair<std::vector<int>, double>> draws;
  Eigen::MatrixXd span(rep.rank, 0);
  for (std::size_t i = 0; i < rep.size(); ++i)
    if (w[i] > 0) {
      draws.emplace_back(rep.weights[i], w[i] / total);
      span.conservativeResize(Eigen::NoChange, span.cols() + 1);
      span.col(span.cols() - 1) = weight_vec(rep.weights[i]);
    }
  res.c = span.cols() ? static_cast<int>(span.fullPivLu().rank()) : 0;
  const int nmax = n_list.empty() ? 0 : *std::max_element(n_list.begin(), n_list.end());
  std::map<std::vector<int>, double> dist{{std::vector<int>(rep.rank, 0), 1.0}};
  std::set<int> wanted(n_list.begin(), n_list.end());
  for (int n = 1; n <= nmax; ++n) {
    std::map<std::vector<int>, double> next;
    for (const auto& [s, p] : dist)
      for (const auto& [l, q] : draws) {
        std::vector<int> t = s;
        for (int i = 0; i < rep.rank; ++i) t[i] += l[i];
        next[t] += p * q;
      }
    if (next.size() > max_states) throw ResourceError("occasionality_probe: state budget exceeded");
    dist.swap(next);
    if (wanted.count(n)) {
      auto it = dist.find(std::vector<int>(rep.rank, 0));
      const double p = it == dist.end() ? 0.0 : it->second;
      res.rows.push_back({n, p, std::pow(static_cast<double>(n), res.c / 2.0) * p});
    }
  }
  return res;
}

}  // namespace qmpcert
