#pragma once

#include "divergence.hpp"
#include "partitions.hpp"

#include <array>

namespace qmpcert {

struct TypeDistribution {
  int n = 0;
  int d = 0;
  std::vector<std::pair<std::vector<int>, double>> support;

  double total() const {
    double t = 0;
    for (const auto& [l, p] : support) t += p;
    return t;
  }
  const std::pair<std::vector<int>, double>& mode() const {
    return *std::max_element(support.begin(), support.end(),
                             [](const auto& a, const auto& b) { return a.second < b.second; });
  }
};

namespace detail {

inline void compositions_rec(int n, int d, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == d - 1) {
    cur.push_back(n);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = n; v >= 0; --v) {
    cur.push_back(v);
    compositions_rec(n - v, d, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

inline std::vector<std::vector<int>> compositions(int n, int d) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  if (d >= 1) detail::compositions_rec(n, d, cur, out);
  return out;
}

// m_q(λ) = n!/(λ₁!⋯λ_d!)·Π q_i^{λ_i} over all compositions λ of n.
inline TypeDistribution multinomial_type_dist(const std::vector<double>& q, int n) {
  if (n < 0) throw ArgumentError("multinomial_type_dist: n >= 0 required");
  TypeDistribution t{n, static_cast<int>(q.size()), {}};
  for (auto& l : compositions(n, t.d)) {
    double logp = log_factorial(n);
    bool zero = false;
    for (int i = 0; i < t.d; ++i) {
      logp -= log_factorial(l[i]);
      if (l[i] > 0) {
        if (q[i] <= 0) zero = true;
        else logp += l[i] * std::log(q[i]);
      }
    }
    t.support.emplace_back(std::move(l), zero ? 0.0 : std::exp(logp));
  }
  return t;
}

// p(λ) = specht_dim(λ)·s_λ(spec) over λ ⊢ n with ℓ(λ) ≤ d.
inline TypeDistribution spectral_dist(const Spectrum& s, int n) {
  if (n < 0) throw ArgumentError("spectral_dist: n >= 0 required");
  const int d = s.dim();
  TypeDistribution t{n, d, {}};
  SchurEvaluator schur(s.values());
  for (const auto& l : partitions_of(n, d)) {
    const double sl = schur(l);
    const double p = sl > 0 ? std::exp(log_specht_dim(l) + std::log(sl)) : 0.0;
    t.support.emplace_back(l.padded(d), p);
  }
  return t;
}

inline TypeDistribution spectral_dist(const CMatrix& rho, int n, const Tolerances& tol = {}) {
  const auto f = diagonalize(rho, tol);
  return spectral_dist(Spectrum::sorted(f.s, 1e-8), n);
}

namespace detail {

inline double heaviside(double v) { return v > 0 ? 1.0 : (v < 0 ? 0.0 : 0.5); }
inline double sign(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

}  // namespace detail

// Density of ⟨ψ|X|ψ⟩ for Haar ψ, X with pairwise distinct eigenvalues λ.
inline double density_nondegenerate(const std::vector<double>& lam, double x) {
  const int d = static_cast<int>(lam.size());
  if (d < 2) throw ArgumentError("density_nondegenerate: need d >= 2");
  const double scale = std::max(1.0, *std::max_element(lam.begin(), lam.end()) - *std::min_element(lam.begin(), lam.end()));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(lam[i] - lam[j]) <= 1e-12 * scale)
        throw PreconditionError("density_nondegenerate: repeated eigenvalues, use density_degenerate");
  double f = 0;
  for (int i = 0; i < d; ++i) {
    const double h = detail::heaviside(x - lam[i]);
    if (h == 0) continue;
    double den = 1;
    for (int j = 0; j < d; ++j)
      if (j != i) den *= lam[j] - lam[i];
    f += std::pow(x - lam[i], d - 2) * h / den;
  }
  return (d - 1) * f;
}

struct Eigenvalue {
  double value;
  int multiplicity;
};

// Degenerate generalization: double sum over distinct eigenvalues λ_k and orders M_k < d_k.
inline double density_degenerate(const std::vector<Eigenvalue>& eigs, double x) {
  const int L = static_cast<int>(eigs.size());
  int d = 0;
  for (const auto& e : eigs) {
    if (e.multiplicity < 1) throw ArgumentError("density_degenerate: multiplicity >= 1 required");
    d += e.multiplicity;
  }
  if (L < 2) throw ArgumentError("density_degenerate: need at least two distinct eigenvalues");
  double total = 0;
  for (int k = 0; k < L; ++k) {
    const double lk = eigs[k].value;
    const int dk = eigs[k].multiplicity;
    const double sg = detail::sign(lk - x);
    if (sg == 0) continue;
    for (int M = 0; M <= dk - 1; ++M) {
      const int p = d + M - dk - 1;
      double lead = std::pow(lk - x, p) * sg * (M % 2 ? -1.0 : 1.0) /
                    (2.0 * std::exp(log_factorial(p) + log_factorial(dk - 1 - M)));
      // Σ over (m_j)_{j≠k} with Σ m_j = M of Π C(d_j+m_j−1, m_j)/(λ_k−λ_j)^{d_j+m_j}
      std::vector<int> others;
      for (int j = 0; j < L; ++j)
        if (j != k) others.push_back(j);
      double inner = 0;
      std::vector<int> m(others.size(), 0);
      std::function<void(std::size_t, int)> rec = [&](std::size_t idx, int left) {
        if (idx + 1 == others.size()) {
          m[idx] = left;
          double prod = 1;
          for (std::size_t t = 0; t < others.size(); ++t) {
            const auto& e = eigs[others[t]];
            prod *= static_cast<double>(binomial(e.multiplicity + m[t] - 1, m[t])) /
                    std::pow(lk - e.value, e.multiplicity + m[t]);
          }
          inner += prod;
          return;
        }
        for (int v = 0; v <= left; ++v) {
          m[idx] = v;
          rec(idx + 1, left - v);
        }
      };
      rec(0, M);
      total += lead * inner;
    }
  }
  return std::exp(log_factorial(d - 1)) * total;
}

// Joint density of (⟨A⟩,⟨B⟩) for traceless, independent qubit observables A, B.
// Gram matrix T_ij = ½·Tr(A_i A_j), the normalization under which X, Z give T = I.
inline double density_qubit_pair(const CMatrix& A, const CMatrix& B, double a, double b) {
  if (A.rows() != 2 || B.rows() != 2) throw ArgumentError("density_qubit_pair: qubit observables required");
  if (std::abs(A.trace()) > 1e-10 || std::abs(B.trace()) > 1e-10)
    throw PreconditionError("density_qubit_pair: observables must be traceless");
  Eigen::Matrix2d T;
  T(0, 0) = 0.5 * (A * A).trace().real();
  T(0, 1) = T(1, 0) = 0.5 * (A * B).trace().real();
  T(1, 1) = 0.5 * (B * B).trace().real();
  const double det = T.determinant();
  if (det <= 1e-12) throw PreconditionError("density_qubit_pair: observables linearly dependent");
  const Eigen::Vector2d v(a, b);
  const double w2 = v.dot(T.inverse() * v);
  if (w2 >= 1) return 0.0;
  return 1.0 / (2 * M_PI * std::sqrt(det * (1 - w2)));
}

// (Tr Q + n·Tr(ρ_P Q))/(d + n) with ρ_P = P/Tr P.
inline double born_ratio(const CMatrix& P, const CMatrix& Q, int n) {
  if (P.rows() != Q.rows()) throw ArgumentError("born_ratio: dimension mismatch");
  if ((P * P - P).cwiseAbs().maxCoeff() > 1e-9 || (P - P.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
    throw PreconditionError("born_ratio: P is not an orthogonal projector");
  const double trp = P.trace().real();
  if (trp < 0.5) throw PreconditionError("born_ratio: P is zero");
  const auto d = static_cast<double>(P.rows());
  return (Q.trace().real() + n * (P * Q).trace().real() / trp) / (d + n);
}

// Adaptive Simpson on [a,b] with absolute tolerance.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                               int max_depth = 40) {
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double eps, int depth) {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        const double flm = f(lm), frm = f(rm);
        const double left = (mid - lo) / 6 * (flo + 4 * flm + fmid);
        const double right = (hi - mid) / 6 * (fmid + 4 * frm + fhi);
        const double diff = left + right - whole;
        if (depth <= 0 || std::abs(diff) <= 15 * eps) return left + right + diff / 15;
        return rec(lo, mid, flo, flm, fmid, left, eps / 2, depth - 1) +
               rec(mid, hi, fmid, frm, fhi, right, eps / 2, depth - 1);
      };
  // a fixed initial split keeps narrow peaks from being skipped
  const int panels = 16;
  double total = 0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + (b - a) * p / panels, hi = a + (b - a) * (p + 1) / panels;
    const double flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
    total += rec(lo, hi, flo, fmid, fhi, (hi - lo) / 6 * (flo + 4 * fmid + fhi), tol / panels, max_depth);
  }
  return total;
}

// ∫ over the Bloch sphere with the uniform probability measure; g takes (x, y, z).
inline double bloch_average(const std::function<double(double, double, double)>& g, double tol = 1e-10) {
  auto over_z = [&](double z) {
    const double r = std::sqrt(std::max(0.0, 1 - z * z));
    return adaptive_simpson([&](double phi) { return g(r * std::cos(phi), r * std::sin(phi), z); }, 0, 2 * M_PI,
                            tol);
  };
  return adaptive_simpson(over_z, -1, 1, tol) / (4 * M_PI);
}

struct ToyXzBounds {
  int m = 0;
  double corner_prob = 0, corner_bound = 0;
  bool corner_ok = false;
  double balanced_prob = 0, balanced_bound = 0;
  bool balanced_checked = false, balanced_ok = false;
};

inline ToyXzBounds toy_xz_exact_bounds(int m) {
  if (m < 1) throw ArgumentError("toy_xz_exact_bounds: m >= 1 required");
  ToyXzBounds r;
  r.m = m;
  r.corner_prob = bloch_average([m](double x, double, double z) { return std::pow((1 + z) / 2 * (1 + x) / 2, m); });
  r.corner_bound = std::pow((3 + 2 * std::sqrt(2.0)) / 8, m);
  r.corner_ok = r.corner_prob <= r.corner_bound;
  if (m % 2 == 0) {
    const double c = static_cast<double>(binomial(m, m / 2));
    r.balanced_prob = bloch_average([m, c](double x, double, double z) {
      return c * c * std::pow((1 - z * z) / 4, m / 2) * std::pow((1 - x * x) / 4, m / 2);
    });
    r.balanced_bound = 1.0 / (2 * m);
    r.balanced_checked = true;
    r.balanced_ok = r.balanced_prob >= r.balanced_bound;
  }
  return r;
}

struct ToyXzSample {
  double x_true, z_true, x_est, z_est;
};

// Per trial: Haar qubit, m X-basis shots and m Z-basis shots, empirical means.
inline std::vector<ToyXzSample> toy_xz_simulate(int m, int trials, std::uint64_t seed) {
  if (m < 1) throw ArgumentError("toy_xz_simulate: m >= 1 required");
  std::vector<ToyXzSample> out;
  out.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    CVector v = gaussian_vector(2, rng);
    v.normalize();
    const double x = 2 * (std::conj(v(0)) * v(1)).real();
    const double z = std::norm(v(0)) - std::norm(v(1));
    std::binomial_distribution<int> bx(m, std::clamp((1 + x) / 2, 0.0, 1.0)), bz(m, std::clamp((1 + z) / 2, 0.0, 1.0));
    const int kx = bx(rng), kz = bz(rng);
    out.push_back({x, z, 2.0 * kx / m - 1, 2.0 * kz / m - 1});
  }
  return out;
}

// Same shot model for a fixed Bloch vector (x, z).
inline std::pair<double, double> toy_xz_estimate(double x, double z, int m, std::mt19937_64& rng) {
  std::binomial_distribution<int> bx(m, std::clamp((1 + x) / 2, 0.0, 1.0)), bz(m, std::clamp((1 + z) / 2, 0.0, 1.0));
  const int kx = bx(rng), kz = bz(rng);
  return {2.0 * kx / m - 1, 2.0 * kz / m - 1};
}

}  // namespace qmpcert
