#pragma once

#include "partitions.hpp"

#include <limits>

namespace qmpcert {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ρ = U·diag(s)·U†, s non-increasing; each column of U has its first non-negligible entry real positive.
struct DiagonalizingFrame {
  CMatrix U;
  std::vector<double> s;
};

inline DiagonalizingFrame diagonalize(const CMatrix& rho, const Tolerances& tol = {}) {
  require_hermitian(rho, tol.herm);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((rho + rho.adjoint()) * 0.5);
  if (es.info() != Eigen::Success) throw NumericError("diagonalize: eigensolver failed");
  const auto d = rho.rows();
  DiagonalizingFrame f{CMatrix(d, d), std::vector<double>(d)};
  for (Eigen::Index j = 0; j < d; ++j) {
    const Eigen::Index src = d - 1 - j;  // eigenvalues come ascending
    CVector col = es.eigenvectors().col(src);
    for (Eigen::Index i = 0; i < d; ++i)
      if (std::abs(col(i)) > 1e-12) {
        col *= std::conj(col(i)) / std::abs(col(i));
        break;
      }
    f.U.col(j) = col;
    f.s[j] = std::max(0.0, es.eigenvalues()(src));
  }
  return f;
}

// Determinants of the upper-left i×i blocks, i = 1..d; |values| below 1e−300 become 0.
inline std::vector<double> leading_principal_minors(const CMatrix& x) {
  if (x.rows() != x.cols()) throw ArgumentError("leading_principal_minors: not square");
  std::vector<double> out;
  for (Eigen::Index i = 1; i <= x.rows(); ++i) {
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(x.topLeftCorner(i, i));
    double v = lu.determinant().real();
    out.push_back(std::abs(v) < 1e-300 ? 0.0 : v);
  }
  return out;
}

// Δ_x(ρ) = Π lpm_i(ρ)^{δ_i(x)}, with 0⁰ = 1.
inline double gen_power(const std::vector<double>& x, const CMatrix& rho) {
  if (static_cast<Eigen::Index>(x.size()) != rho.rows()) throw ArgumentError("gen_power: length mismatch");
  const auto dx = finite_difference(x);
  const auto lpm = leading_principal_minors(rho);
  double v = 1;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    if (dx[i] == 0) continue;
    if (lpm[i] < 0 && std::abs(dx[i] - std::round(dx[i])) > 0)
      throw DomainError("gen_power: negative minor with non-integer exponent");
    v *= std::pow(lpm[i], dx[i]);
  }
  return v;
}

inline double gen_power(const Partition& l, const CMatrix& rho) {
  const auto p = l.padded(static_cast<int>(rho.rows()));
  if (static_cast<Eigen::Index>(p.size()) != rho.rows()) return 0.0;
  return gen_power(std::vector<double>(p.begin(), p.end()), rho);
}

inline double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw ArgumentError("kl_divergence: length mismatch");
  double acc = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0) continue;
    if (q[i] <= 0) return kInf;
    acc += p[i] * (std::log(p[i]) - std::log(q[i]));
  }
  return std::max(acc, 0.0);
}

// K(ρ‖σ) = Σ_i s_i ln s_i − δ_i(s)·ln lpm_i(U†σU) in the given frame of ρ.
inline double keyl_divergence(const DiagonalizingFrame& f, const CMatrix& sigma) {
  if (f.U.rows() != sigma.rows()) throw ArgumentError("keyl_divergence: dimension mismatch");
  const CMatrix rotated = f.U.adjoint() * sigma * f.U;
  const auto lpm = leading_principal_minors(rotated);
  const auto ds = finite_difference(f.s);
  double k = 0;
  for (std::size_t i = 0; i < f.s.size(); ++i) {
    if (f.s[i] > 0) k += f.s[i] * std::log(f.s[i]);
    if (ds[i] > 0) {
      if (lpm[i] <= 0) return kInf;
      k -= ds[i] * std::log(lpm[i]);
    }
  }
  return std::max(k, 0.0);
}

inline double keyl_divergence(const CMatrix& rho, const CMatrix& sigma, const Tolerances& tol = {}) {
  if (rho.rows() != sigma.rows()) throw ArgumentError("keyl_divergence: dimension mismatch");
  return keyl_divergence(diagonalize(rho, tol), sigma);
}

// Tr ρ(ln ρ − ln σ); +∞ when the support of ρ is not inside the support of σ.
inline double quantum_relative_entropy(const CMatrix& rho, const CMatrix& sigma, double support_tol = 1e-12) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> er((rho + rho.adjoint()) * 0.5), es((sigma + sigma.adjoint()) * 0.5);
  double a = 0;
  for (Eigen::Index i = 0; i < er.eigenvalues().size(); ++i) {
    double l = er.eigenvalues()(i);
    if (l > 0) a += l * std::log(l);
  }
  double b = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const CVector v = es.eigenvectors().col(i);
    const double w = (v.adjoint() * rho * v)(0).real();
    const double mu = es.eigenvalues()(i);
    if (mu <= support_tol) {
      if (w > support_tol) return kInf;
      continue;
    }
    b += w * std::log(mu);
  }
  return a - b;
}

struct SanovCheck {
  double lower = 0, value = 0, upper = 0;
  bool ok = false;
};

// m_q(λ) against (n+1)^{−d}·e^{−n·KL(λ/n‖q)} ≤ m_q(λ) ≤ e^{−n·KL(λ/n‖q)}.
inline SanovCheck sanov_bounds_check(const std::vector<double>& q, const std::vector<int>& lambda, int n) {
  if (q.size() != lambda.size()) throw ArgumentError("sanov_bounds_check: length mismatch");
  if (std::accumulate(lambda.begin(), lambda.end(), 0) != n) throw ArgumentError("sanov_bounds_check: |lambda| != n");
  const int d = static_cast<int>(q.size());
  double logm = log_factorial(n);
  bool zero = false;
  for (int i = 0; i < d; ++i) {
    logm -= log_factorial(lambda[i]);
    if (lambda[i] > 0) {
      if (q[i] <= 0) zero = true;
      else logm += lambda[i] * std::log(q[i]);
    }
  }
  std::vector<double> p(d);
  for (int i = 0; i < d; ++i) p[i] = n ? static_cast<double>(lambda[i]) / n : 0.0;
  const double kl = n ? kl_divergence(p, q) : 0.0;
  SanovCheck c;
  c.value = zero ? 0.0 : std::exp(logm);
  c.upper = std::exp(-n * kl);
  c.lower = std::pow(n + 1.0, -d) * c.upper;
  const double slack = 1e-12;
  c.ok = c.lower <= c.value * (1 + slack) && c.value <= c.upper * (1 + slack);
  return c;
}

inline int triangular(int d) { return d * (d + 1) / 2; }

// λⁿ = (μ^k₁ + n − |μ^k|, μ^k₂, …) for the largest k with |μ^k| ≤ n, μ^k = approx_partition(s, k).
inline Partition discrimination_sequence(const Spectrum& s, int n) {
  if (n < 1) throw ArgumentError("discrimination_sequence: n >= 1 required");
  const int d = s.dim();
  std::vector<int> best(d, 0);
  int best_size = 0;
  for (int k = 1; k <= n; ++k) {
    Partition mu = approx_partition(s, k);
    if (mu.size() > n) break;
    best = mu.padded(d);
    best_size = mu.size();
  }
  best[0] += n - best_size;
  return Partition(best);
}

// D(s) = s₁^{1−C(d+1,2)}·Π_i (s₁⋯s_i)^{−⌈δ_i(s)⌉}
inline double discrimination_constant(const Spectrum& s) {
  const int d = s.dim();
  const Partition mu1 = approx_partition(s, 1);
  std::vector<double> diag(s.values());
  CMatrix ds = CMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) ds(i, i) = diag[i];
  return std::pow(s[0], 1 - triangular(d)) / gen_power(mu1, ds);
}

struct DiscriminationCheck {
  Partition lambda;
  double ratio = 0, bound = 0, keyl = 0;
  bool ok = false;
};

inline DiscriminationCheck discrimination_ratio_bound(const CMatrix& rho, const CMatrix& sigma, int n,
                                                      const Tolerances& tol = {}) {
  if (rho.rows() != sigma.rows()) throw ArgumentError("discrimination_ratio_bound: dimension mismatch");
  const auto f = diagonalize(rho, tol);
  const Spectrum s = Spectrum::sorted(f.s, 1e-8);
  const int d = s.dim();
  DiscriminationCheck c;
  c.lambda = discrimination_sequence(s, n);
  c.keyl = keyl_divergence(f, sigma);
  CMatrix diag = CMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) diag(i, i) = s[i];
  const double num = gen_power(c.lambda, f.U.adjoint() * sigma * f.U);
  const double den = gen_power(c.lambda, diag);
  const int e = n - triangular(d) + 1;
  double decay;
  if (std::isinf(c.keyl)) decay = e > 0 ? 0.0 : (e == 0 ? 1.0 : kInf);
  else decay = std::exp(-e * c.keyl);
  c.bound = discrimination_constant(s) * decay;
  if (den <= 0) {
    c.ratio = kInf;
    c.ok = std::isinf(c.bound);
    return c;
  }
  c.ratio = num / den;
  c.ok = c.ratio <= c.bound * (1 + 1e-9);
  return c;
}

}  // namespace qmpcert
