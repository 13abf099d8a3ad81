#pragma once

#include "partitions.hpp"

#include <Eigen/Sparse>

#include <optional>

namespace qmpcert {

// Every permutation of k slots in lexicographic order.
inline std::vector<Perm> all_permutations(int k) {
  std::vector<Perm> out;
  Perm p = identity_perm(k);
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

namespace detail {

// For each basis index of (C^d)^{⊗k}: the sorted digit tuple, encoded as an integer key.
inline std::vector<std::size_t> multiset_keys(int d, int k) {
  std::size_t total = 1;
  for (int i = 0; i < k; ++i) total *= d;
  std::vector<std::size_t> keys(total);
  std::vector<int> digit(k);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (int s = k - 1; s >= 0; --s) {
      digit[s] = static_cast<int>(r % d);
      r /= d;
    }
    std::sort(digit.begin(), digit.end());
    std::size_t key = 0;
    for (int s = 0; s < k; ++s) key = key * d + digit[s];
    keys[idx] = key;
  }
  return keys;
}

inline std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace detail

// Projector onto the symmetric subspace of (C^d)^{⊗k}, dense when within the cap.
struct SymmetrizerHandle {
  int d = 1;
  int k = 1;
  std::optional<Operator> dense;

  std::size_t dim() const { return detail::ipow(static_cast<std::size_t>(d), k); }
  BigInt trace() const { return binomial(k + d - 1, k); }

  // Π v: average of v over each permutation orbit of basis states.
  CVector apply(const CVector& v) const {
    if (dense) return dense->mat * v;
    const auto keys = detail::multiset_keys(d, k);
    std::map<std::size_t, std::pair<cplx, int>> acc;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      auto& [s, c] = acc[keys[i]];
      s += v(static_cast<Eigen::Index>(i));
      ++c;
    }
    CVector out(v.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const auto& [s, c] = acc[keys[i]];
      out(static_cast<Eigen::Index>(i)) = s / static_cast<double>(c);
    }
    return out;
  }
};

inline SymmetrizerHandle sym_projector(int d, int k) {
  if (d < 1 || k < 1) throw ArgumentError("sym_projector: d, k >= 1 required");
  SymmetrizerHandle h{d, k, std::nullopt};
  const std::size_t n = h.dim();
  if (n > dense_dim_cap()) return h;
  const auto keys = detail::multiset_keys(d, k);
  std::map<std::size_t, std::vector<Eigen::Index>> orbit;
  for (std::size_t i = 0; i < n; ++i) orbit[keys[i]].push_back(static_cast<Eigen::Index>(i));
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& [key, idx] : orbit) {
    const double w = 1.0 / static_cast<double>(idx.size());
    for (auto r : idx)
      for (auto c : idx) m(r, c) = w;
  }
  h.dense = Operator(LabeledSpace::of_dim(d).power(k), std::move(m));
  return h;
}

inline Operator antisym_projector(int d, int k) {
  if (d < 1 || k < 1) throw ArgumentError("antisym_projector: d, k >= 1 required");
  const std::size_t n = detail::ipow(static_cast<std::size_t>(d), k);
  check_dense_dim(n);
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (k <= d) {
    // Basis states with distinct digits; sign relative to the sorted arrangement.
    std::map<std::size_t, std::vector<std::pair<Eigen::Index, int>>> orbit;
    std::vector<int> digit(k);
    for (std::size_t idx = 0; idx < n; ++idx) {
      std::size_t r = idx;
      for (int s = k - 1; s >= 0; --s) {
        digit[s] = static_cast<int>(r % d);
        r /= d;
      }
      std::vector<int> sorted = digit;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
      int inversions = 0;
      for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
          if (digit[a] > digit[b]) ++inversions;
      std::size_t key = 0;
      for (int v : sorted) key = key * d + v;
      orbit[key].emplace_back(static_cast<Eigen::Index>(idx), inversions % 2 ? -1 : 1);
    }
    for (const auto& [key, idx] : orbit) {
      const double w = 1.0 / static_cast<double>(idx.size());
      for (auto [r, sr] : idx)
        for (auto [c, sc] : idx) m(r, c) = w * sr * sc;
    }
  }
  return Operator(LabeledSpace::of_dim(d).power(k), std::move(m));
}

// Σ̄_k = Π^{(k)} / C(k+d−1, k)
inline DensityOperator uniform_sym_state(int d, int k) {
  auto h = sym_projector(d, k);
  if (!h.dense) throw ResourceError("uniform_sym_state: dimension beyond dense cap");
  Operator op = *h.dense;
  op.mat /= static_cast<double>(h.trace());
  return DensityOperator(std::move(op));
}

// Σ_π c(π) T(π) on (C^d)^{⊗n}.
inline CMatrix permutation_sum(int d, int n, const std::function<double(const Perm&)>& coeff) {
  const std::size_t dim = detail::ipow(static_cast<std::size_t>(d), n);
  check_dense_dim(dim);
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const std::vector<int> dims(n, d);
  for (const auto& p : all_permutations(n)) {
    const double c = coeff(p);
    if (c == 0.0) continue;
    const auto map = permutation_index_map(dims, p);
    for (std::size_t j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(map[j]), static_cast<Eigen::Index>(j)) += c;
  }
  return m;
}

// Π^λ = (f_λ/n!)·Σ_π χ_λ(π) T(π)
inline Operator isotypic_projector(const Partition& l, int d, int n) {
  if (l.size() != n) throw ArgumentError("isotypic_projector: |lambda| != n");
  if (d < 1 || n < 1) throw ArgumentError("isotypic_projector: d, n >= 1 required");
  const double scale = static_cast<double>(specht_dim(l)) / static_cast<double>(factorial(n));
  std::map<std::vector<int>, double> chi;
  CMatrix m = permutation_sum(d, n, [&](const Perm& p) {
    auto ct = cycle_type(p);
    auto it = chi.find(ct);
    if (it == chi.end()) it = chi.emplace(ct, static_cast<double>(mn_character(l, Partition(ct)))).first;
    return scale * it->second;
  });
  return Operator(LabeledSpace::of_dim(d).power(n), std::move(m));
}

// Slot layout for permutation-wise partial traces: N slots, each carrying a copy of every
// label; kept[c] lists, in output order, the labels that survive in slot c.
struct TraceLayout {
  std::vector<int> label_dims;
  std::vector<std::vector<int>> kept;

  int slots() const { return static_cast<int>(kept.size()); }
  std::vector<int> position_dims() const {
    std::vector<int> d;
    for (const auto& ks : kept)
      for (int x : ks) d.push_back(label_dims[x]);
    return d;
  }
  std::size_t output_dim() const {
    std::size_t t = 1;
    for (int d : position_dims()) t *= static_cast<std::size_t>(d);
    return t;
  }
};

// Partial trace of T_J(π): a loop factor times a relabelling of the kept positions.
// `sigma` maps output position p (slot, label) to the position that receives its factor.
struct WiringOperator {
  double scalar = 1.0;
  Perm sigma;

  // Basis map source index -> target index on the output space.
  std::vector<std::size_t> index_map(const std::vector<int>& position_dims) const {
    return permutation_index_map(position_dims, sigma);
  }

  CMatrix materialize(const std::vector<int>& position_dims) const {
    const auto map = index_map(position_dims);
    const auto n = static_cast<Eigen::Index>(map.size());
    CMatrix m = CMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) m(static_cast<Eigen::Index>(map[j]), j) = scalar;
    return m;
  }
};

inline WiringOperator traced_permutation(const Perm& pi, const TraceLayout& lay) {
  const int N = lay.slots();
  if (static_cast<int>(pi.size()) != N || !is_permutation(pi)) throw ArgumentError("traced_permutation: bad permutation");
  const int L = static_cast<int>(lay.label_dims.size());
  // position index of (slot, label), or −1 when dropped
  std::vector<std::vector<int>> pos(N, std::vector<int>(L, -1));
  int np = 0;
  for (int c = 0; c < N; ++c)
    for (int x : lay.kept[c]) {
      if (x < 0 || x >= L || pos[c][x] >= 0) throw ArgumentError("traced_permutation: bad layout");
      pos[c][x] = np++;
    }
  WiringOperator w;
  w.sigma.assign(np, -1);
  std::vector<char> seen(N, 0);
  std::vector<std::vector<int>> cycles;
  for (int s = 0; s < N; ++s) {
    if (seen[s]) continue;
    cycles.emplace_back();
    for (int t = s; !seen[t]; t = pi[t]) {
      seen[t] = 1;
      cycles.back().push_back(t);
    }
  }
  for (int x = 0; x < L; ++x) {
    for (const auto& cyc : cycles) {
      bool closed = std::all_of(cyc.begin(), cyc.end(), [&](int s) { return pos[s][x] < 0; });
      if (closed) w.scalar *= lay.label_dims[x];
    }
    for (int s = 0; s < N; ++s) {
      if (pos[s][x] < 0) continue;
      int t = pi[s];
      while (pos[t][x] < 0) t = pi[t];
      w.sigma[pos[s][x]] = pos[t][x];
    }
  }
  return w;
}

struct Budget {
  double max_perms_dense = 5040;
  double max_perms_free = 5e5;
  std::size_t max_dim_dense = 4096;
  std::size_t max_dim_free = 300000;
};

// Σ_π c(π)·Tr_dropped(T_J(π)) stored as a real sparse matrix (all wiring entries are real).
struct TracedSum {
  TraceLayout layout;
  Eigen::SparseMatrix<double, Eigen::RowMajor> op;
  std::size_t distinct_wirings = 0;

  std::size_t dim() const { return static_cast<std::size_t>(op.rows()); }
  CMatrix dense() const { return CMatrix(op.cast<cplx>()); }
  void apply(const CVector& in, CVector& out) const {
    const Eigen::VectorXd re = op * in.real(), im = op * in.imag();
    out.resize(in.size());
    out.real() = re;
    out.imag() = im;
  }
};

inline TracedSum traced_sum(const TraceLayout& lay, const std::function<double(const Perm&)>& coeff,
                            const Budget& budget = {}) {
  const int N = lay.slots();
  const double perms = static_cast<double>(factorial(N));
  const std::size_t dim = lay.output_dim();
  if (perms > budget.max_perms_free)
    throw ResourceError("permutation count " + std::to_string(static_cast<long long>(perms)) +
                        " exceeds budget " + std::to_string(static_cast<long long>(budget.max_perms_free)));
  if (dim > budget.max_dim_free)
    throw ResourceError("output dimension " + std::to_string(dim) + " exceeds budget " +
                        std::to_string(budget.max_dim_free));
  if (dim > budget.max_dim_dense && perms > budget.max_perms_dense && perms * static_cast<double>(dim) > 1e10)
    throw ResourceError("permutation count times output dimension beyond budget");
  std::map<std::pair<Perm, double>, double> wirings;
  Perm p = identity_perm(N);
  do {
    const double c = coeff(p);
    if (c == 0.0) continue;
    auto w = traced_permutation(p, lay);
    wirings[{w.sigma, w.scalar}] += c;
  } while (std::next_permutation(p.begin(), p.end()));
  const auto pdims = lay.position_dims();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(wirings.size() * dim);
  for (const auto& [key, c] : wirings) {
    const double v = key.second * c;
    if (v == 0.0) continue;
    const auto map = permutation_index_map(pdims, key.first);
    for (std::size_t j = 0; j < dim; ++j)
      trip.emplace_back(static_cast<int>(map[j]), static_cast<int>(j), v);
  }
  TracedSum out{lay, Eigen::SparseMatrix<double, Eigen::RowMajor>(static_cast<Eigen::Index>(dim),
                                                                  static_cast<Eigen::Index>(dim)),
                wirings.size()};
  out.op.setFromTriplets(trip.begin(), trip.end());
  out.op.prune(0.0);
  return out;
}

// (1/N!)·Σ_π Tr_dropped(T_J(π)) = Tr_dropped(Π^{(N)}_J).
inline TracedSum traced_symmetrizer(const TraceLayout& lay, const Budget& budget = {}) {
  const double inv = 1.0 / static_cast<double>(factorial(lay.slots()));
  return traced_sum(lay, [inv](const Perm&) { return inv; }, budget);
}

// Σ_{λ ⊢ N, ℓ(λ) ≤ v} Tr_dropped(Π^λ_J), via class-function coefficients.
inline TracedSum traced_isotypic_sum(const TraceLayout& lay, int v, const Budget& budget = {}) {
  const int N = lay.slots();
  const double inv = 1.0 / static_cast<double>(factorial(N));
  std::map<std::vector<int>, double> coeff;
  for (const auto& cls : partitions_of(N)) {
    double c = 0;
    for (const auto& l : partitions_of(N, v))
      c += static_cast<double>(specht_dim(l)) * static_cast<double>(mn_character(l, cls));
    coeff[cls.parts()] = c * inv;
  }
  return traced_sum(lay, [&](const Perm& p) { return coeff.at(cycle_type(p)); }, budget);
}

// Tr(T(π)·(X₁⊗…⊗X_k)) with each X_i on (C^d)^{⊗n}, summed index by index.
inline cplx trace_perm_product(const Perm& pi, const std::vector<CMatrix>& xs, int d, int n) {
  const int k = static_cast<int>(xs.size());
  const int N = n * k;
  const std::size_t block = detail::ipow(static_cast<std::size_t>(d), n);
  const auto map = permutation_index_map(std::vector<int>(N, d), pi);
  cplx acc = 0;
  for (std::size_t b = 0; b < map.size(); ++b) {
    std::size_t rb = b, ra = map[b];
    cplx term = 1;
    for (int i = k - 1; i >= 0 && term != 0.0; --i) {
      term *= xs[i](static_cast<Eigen::Index>(rb % block), static_cast<Eigen::Index>(ra % block));
      rb /= block;
      ra /= block;
    }
    acc += term;
  }
  return acc;
}

namespace detail {

inline void check_biriffle_inputs(const std::vector<CMatrix>& xs, int d, int n) {
  if (xs.empty()) throw ArgumentError("biriffle: no inputs");
  const auto dim = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(d), n));
  for (const auto& x : xs)
    if (x.rows() != dim || x.cols() != dim) throw ArgumentError("biriffle: dimension mismatch");
}

inline double real_or_throw(cplx v, double scale) {
  if (std::abs(v.imag()) > 1e-9 * std::max(1.0, scale)) throw NumericError("biriffle: value not real");
  return v.real();
}

}  // namespace detail

// Π X Π for each input.
inline std::vector<CMatrix> symmetrize_inputs(const std::vector<CMatrix>& xs, int d, int n) {
  const auto h = sym_projector(d, n);
  if (!h.dense) throw ResourceError("symmetrize_inputs: dimension beyond dense cap");
  std::vector<CMatrix> out;
  for (const auto& x : xs) out.push_back(h.dense->mat * x * h.dense->mat);
  return out;
}

struct CosetTerm {
  DoubleCoset coset;
  cplx coupling;  // B_ℓ
};

struct BiriffleResult {
  double value = 0;
  std::vector<CosetTerm> terms;
};

// p_n = ((d−1)!/(nk+d−1)!)·Σ_ℓ |ℓ|·B_ℓ with B_ℓ = Tr(T(b_ℓ)(X₁⊗…⊗X_k)).
inline BiriffleResult biriffle_terms(std::vector<CMatrix> xs, int d, int n, bool symmetrize) {
  detail::check_biriffle_inputs(xs, d, n);
  if (symmetrize) {
    xs = symmetrize_inputs(xs, d, n);
  } else if (n > 1) {
    // inputs must be absorbed by T(σ) on both sides for adjacent transpositions σ
    const std::vector<int> dims(n, d);
    for (int s = 0; s + 1 < n; ++s) {
      Perm t = identity_perm(n);
      std::swap(t[s], t[s + 1]);
      const auto map = permutation_index_map(dims, t);
      for (const auto& x : xs) {
        CMatrix tx(x.rows(), x.cols()), xt(x.rows(), x.cols());
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
          tx.row(static_cast<Eigen::Index>(map[r])) = x.row(r);
          xt.col(r) = x.col(static_cast<Eigen::Index>(map[r]));
        }
        if ((tx - x).cwiseAbs().maxCoeff() > 1e-9 || (xt - x).cwiseAbs().maxCoeff() > 1e-9)
          throw PreconditionError("biriffle: input not fixed by the permutation action; set symmetrize");
      }
    }
  }
  const int k = static_cast<int>(xs.size());
  BiriffleResult res;
  cplx total = 0;
  for (auto& c : double_cosets(n, k)) {
    cplx b = trace_perm_product(c.representative, xs, d, n);
    total += static_cast<double>(c.cardinality) * b;
    res.terms.push_back({std::move(c), b});
  }
  const double pref = static_cast<double>(factorial(d - 1)) / static_cast<double>(factorial(n * k + d - 1));
  res.value = detail::real_or_throw(total * pref, std::abs(total * pref));
  return res;
}

inline double biriffle_value(const std::vector<CMatrix>& xs, int d, int n, bool symmetrize) {
  return biriffle_terms(xs, d, n, symmetrize).value;
}

// Direct Σ over S_{nk}, normalized as Tr(Σ̄_{nk}·X₁⊗…⊗X_k).
inline double biriffle_bruteforce(const std::vector<CMatrix>& xs, int n, int d, double max_perms = 1e5) {
  detail::check_biriffle_inputs(xs, d, n);
  const int N = n * static_cast<int>(xs.size());
  if (static_cast<double>(factorial(N)) > max_perms) throw ResourceError("biriffle_bruteforce: (nk)! beyond budget");
  cplx total = 0;
  Perm p = identity_perm(N);
  do total += trace_perm_product(p, xs, d, n);
  while (std::next_permutation(p.begin(), p.end()));
  const double pref = static_cast<double>(factorial(d - 1)) / static_cast<double>(factorial(N + d - 1));
  return detail::real_or_throw(total * pref, std::abs(total * pref));
}

}  // namespace qmpcert
