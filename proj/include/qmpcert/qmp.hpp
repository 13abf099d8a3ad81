#pragma once

#include "divergence.hpp"
#include "symmetrizer.hpp"

#include <array>

namespace qmpcert {

// Joint context J plus contexts S_1..S_m, each an order-preserving sublist of J's labels.
// Repeated contexts are allowed.
class MarginalScenario {
 public:
  MarginalScenario() = default;
  MarginalScenario(LabeledSpace joint, std::vector<std::vector<std::string>> contexts)
      : joint_(std::move(joint)), names_(std::move(contexts)) {
    if (names_.empty()) throw ArgumentError("scenario needs at least one context");
    for (const auto& ctx : names_) {
      if (ctx.empty()) throw ArgumentError("empty context");
      std::vector<int> idx;
      for (const auto& nm : ctx) {
        int i = joint_.index_of(nm);
        if (i < 0) throw ArgumentError("context label '" + nm + "' not in the joint space");
        if (!idx.empty() && i <= idx.back()) throw ArgumentError("context labels must follow the joint order");
        idx.push_back(i);
      }
      idx_.push_back(std::move(idx));
    }
  }

  const LabeledSpace& joint() const { return joint_; }
  int m() const { return static_cast<int>(idx_.size()); }
  const std::vector<int>& context(int i) const { return idx_[i]; }
  const std::vector<std::vector<std::string>>& context_names() const { return names_; }

  LabeledSpace context_space(int i) const {
    std::vector<Label> ls;
    for (int x : idx_[i]) ls.push_back(joint_[x]);
    return LabeledSpace(std::move(ls));
  }

  std::size_t context_dim(int i) const { return context_space(i).total_dim(); }

  std::size_t product_dim() const {
    std::size_t t = 1;
    for (int i = 0; i < m(); ++i) t *= context_dim(i);
    return t;
  }

  // Slot c of the nm copies of J carries context c mod m.
  TraceLayout layout(int n) const {
    TraceLayout lay;
    lay.label_dims = joint_.dims();
    for (int c = 0; c < n * m(); ++c) lay.kept.push_back(idx_[c % m()]);
    return lay;
  }

  // Reduced states of a joint pure state on each context.
  std::vector<DensityOperator> marginals_of(const PureState& psi) const {
    if (!(psi.space == joint_)) throw ArgumentError("state space does not match the joint context");
    Operator proj = psi.projector();
    std::vector<DensityOperator> out;
    for (int i = 0; i < m(); ++i) {
      std::set<int> drop;
      for (int x = 0; x < static_cast<int>(joint_.size()); ++x)
        if (std::find(idx_[i].begin(), idx_[i].end(), x) == idx_[i].end()) drop.insert(x);
      Operator r = partial_trace(proj, drop);
      r.mat = (r.mat + r.mat.adjoint()) * 0.5;
      out.emplace_back(std::move(r));
    }
    return out;
  }

 private:
  LabeledSpace joint_;
  std::vector<std::vector<std::string>> names_;
  std::vector<std::vector<int>> idx_;
};

struct MProductState {
  std::vector<DensityOperator> marginals;

  MProductState() = default;
  MProductState(const MarginalScenario& sc, std::vector<DensityOperator> ms) : marginals(std::move(ms)) {
    if (static_cast<int>(marginals.size()) != sc.m()) throw ArgumentError("one marginal per context required");
    for (int i = 0; i < sc.m(); ++i)
      if (marginals[i].op.dim() != sc.context_dim(i) || marginals[i].space().dims() != sc.context_space(i).dims())
        throw ArgumentError("marginal " + std::to_string(i) + " does not match its context dims");
  }

  CMatrix product() const {
    CMatrix p = marginals[0].mat();
    for (std::size_t i = 1; i < marginals.size(); ++i) p = kron(p, marginals[i].mat());
    return p;
  }
};

enum class Verdict { ConsistentAtLevel, Violated };

inline const char* to_string(Verdict v) { return v == Verdict::Violated ? "VIOLATED" : "CONSISTENT_AT_LEVEL"; }

struct RealizabilityCertificate {
  int level = 0;
  double gap = 0;
  Verdict verdict = Verdict::ConsistentAtLevel;
  CVector witness;            // set when VIOLATED
  double witness_value = 0;   // ⟨w|(RHS − LHS)|w⟩
  bool near_zero_warning = false;
  bool matrix_free = false;
};

struct HierarchyOptions {
  Tolerances tol;
  Budget budget;
  IterativeOptions iterative{IterativeMethod::Lanczos, 1e-11, 10000, 160, 0, 0x5eed};
  std::size_t dense_solver_max = 1024;  // larger outputs go through the iterative solver
};

// v ↦ (M ⊗ … ⊗ M) v with n factors of the d×d matrix M.
inline CVector apply_kron_power(const CMatrix& M, int n, const CVector& v) {
  const auto d = M.rows();
  CVector cur = v;
  Eigen::Index pre = 1, post = 1;
  for (int c = 0; c < n; ++c) post *= d;
  for (int c = 0; c < n; ++c) {
    post /= d;
    CVector next(cur.size());
    for (Eigen::Index a = 0; a < pre; ++a)
      for (Eigen::Index b = 0; b < post; ++b) {
        CVector slice(d);
        for (Eigen::Index i = 0; i < d; ++i) slice(i) = cur((a * d + i) * post + b);
        CVector r = M * slice;
        for (Eigen::Index i = 0; i < d; ++i) next((a * d + i) * post + b) = r(i);
      }
    cur.swap(next);
    pre *= d;
  }
  return cur;
}

namespace detail {

inline RealizabilityCertificate certify(const TracedSum& rhs, const CMatrix& lhs_factor, int n, int level,
                                        double lhs_scale, const HierarchyOptions& opt) {
  RealizabilityCertificate cert;
  cert.level = level;
  const std::size_t dim = rhs.dim();
  if (dim <= opt.dense_solver_max && dim <= opt.budget.max_dim_dense) {
    CMatrix lhs = lhs_factor;
    for (int c = 1; c < n; ++c) lhs = kron(lhs, lhs_factor);
    CMatrix h = rhs.dense() - lhs_scale * lhs;
    auto ep = min_eigen_pair(h, opt.tol);
    cert.gap = ep.value;
    cert.witness = ep.vector;
    cert.witness_value = (ep.vector.adjoint() * h * ep.vector)(0).real();
  } else {
    ApplyFn apply = [&](const CVector& in, CVector& out) {
      rhs.apply(in, out);
      out -= lhs_scale * apply_kron_power(lhs_factor, n, in);
    };
    auto r = min_eigenvalue_iterative(dim, apply, opt.iterative);
    if (!r.converged) throw NumericError("iterative eigensolver did not converge");
    cert.gap = r.value;
    cert.witness = r.vector;
    CVector hw(static_cast<Eigen::Index>(dim));
    apply(r.vector, hw);
    cert.witness_value = r.vector.dot(hw).real();
    cert.matrix_free = true;
  }
  cert.verdict = cert.gap < -opt.tol.psd ? Verdict::Violated : Verdict::ConsistentAtLevel;
  cert.near_zero_warning = cert.verdict == Verdict::ConsistentAtLevel && cert.gap < 0;
  if (cert.verdict != Verdict::Violated) cert.witness.resize(0);
  return cert;
}

}  // namespace detail

// Level-n check ρ_M^{⊗n} ≤ Tr^{⊗n}(Π^{(nm)}_J). The right side is built once and reused.
class HierarchyChecker {
 public:
  HierarchyChecker(MarginalScenario sc, int n, HierarchyOptions opt = {})
      : sc_(std::move(sc)), n_(n), opt_(opt), rhs_(traced_symmetrizer(sc_.layout(n), opt.budget)) {
    if (n < 1) throw ArgumentError("hierarchy level must be >= 1");
  }

  RealizabilityCertificate check(const MProductState& st) const {
    return detail::certify(rhs_, st.product(), n_, n_, 1.0, opt_);
  }

  const TracedSum& rhs() const { return rhs_; }

 private:
  MarginalScenario sc_;
  int n_;
  HierarchyOptions opt_;
  TracedSum rhs_;
};

inline RealizabilityCertificate hierarchy_check(const MarginalScenario& sc, const MProductState& st, int n,
                                                const HierarchyOptions& opt = {}) {
  return HierarchyChecker(sc, n, opt).check(st);
}

// v^{nm}·ρ_M^{⊗n} ≤ Σ_{λ ⊢ nm, ℓ(λ) ≤ v} Tr^{⊗n}(Π^λ_J)
inline RealizabilityCertificate ortho_bound_check(const MarginalScenario& sc, const MProductState& st, int v, int n,
                                                  const HierarchyOptions& opt = {}) {
  if (n < 1) throw ArgumentError("hierarchy level must be >= 1");
  if (v < 1 || static_cast<std::size_t>(v) > sc.joint().total_dim()) throw ArgumentError("v must lie in [1, d_J]");
  auto rhs = traced_isotypic_sum(sc.layout(n), v, opt.budget);
  const double scale = std::pow(static_cast<double>(v), n * sc.m());
  return detail::certify(rhs, st.product(), n, n, scale, opt);
}

// Hierarchy with Π^{(nm)} replaced by the projector onto ∨^{nm} H_V, H_V = range(P_V).
inline RealizabilityCertificate subspace_hierarchy_check(const MarginalScenario& sc, const MProductState& st,
                                                         const Operator& pv, int n, const HierarchyOptions& opt = {}) {
  if (n < 1) throw ArgumentError("hierarchy level must be >= 1");
  const auto dJ = static_cast<Eigen::Index>(sc.joint().total_dim());
  if (pv.mat.rows() != dJ) throw ArgumentError("P_V does not act on the joint space");
  require_hermitian(pv.mat, opt.tol.herm);
  if ((pv.mat * pv.mat - pv.mat).cwiseAbs().maxCoeff() > 1e-9) throw PreconditionError("P_V is not a projector");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((pv.mat + pv.mat.adjoint()) * 0.5);
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < dJ; ++i)
    if (es.eigenvalues()(i) > 0.5) cols.push_back(i);
  const int r = static_cast<int>(cols.size());
  const int N = n * sc.m();
  const std::size_t full = detail::ipow(static_cast<std::size_t>(dJ), N);
  if (full > opt.budget.max_dim_dense * opt.budget.max_dim_dense / 16 || full > dense_dim_cap())
    throw ResourceError("subspace check: joint power dimension " + std::to_string(full) + " beyond dense budget");
  CMatrix pi_v = CMatrix::Zero(static_cast<Eigen::Index>(full), static_cast<Eigen::Index>(full));
  if (r > 0) {
    CMatrix V(dJ, r);
    for (int j = 0; j < r; ++j) V.col(j) = es.eigenvectors().col(cols[j]);
    CMatrix VN = V;
    for (int c = 1; c < N; ++c) VN = kron(VN, V);
    auto sym = sym_projector(r, N);
    pi_v = VN * sym.dense->mat * VN.adjoint();
  }
  const LabeledSpace jN = sc.joint().power(N);
  const int p = static_cast<int>(sc.joint().size());
  std::set<int> drop;
  for (int c = 0; c < N; ++c)
    for (int x = 0; x < p; ++x) {
      const auto& ctx = sc.context(c % sc.m());
      if (std::find(ctx.begin(), ctx.end(), x) == ctx.end()) drop.insert(c * p + x);
    }
  Operator rhs_op = partial_trace(Operator(jN, std::move(pi_v)), drop);
  CMatrix lhs = st.product();
  CMatrix lhsN = lhs;
  for (int c = 1; c < n; ++c) lhsN = kron(lhsN, lhs);
  RealizabilityCertificate cert;
  cert.level = n;
  CMatrix h = rhs_op.mat - lhsN;
  auto ep = min_eigen_pair(h, opt.tol);
  cert.gap = ep.value;
  cert.witness_value = (ep.vector.adjoint() * h * ep.vector)(0).real();
  cert.verdict = cert.gap < -opt.tol.psd ? Verdict::Violated : Verdict::ConsistentAtLevel;
  cert.near_zero_warning = cert.verdict == Verdict::ConsistentAtLevel && cert.gap < 0;
  if (cert.verdict == Verdict::Violated) cert.witness = ep.vector;
  return cert;
}

inline CVector singlet() {
  CVector s = CVector::Zero(4);
  s(1) = 1.0 / std::sqrt(2.0);
  s(2) = -1.0 / std::sqrt(2.0);
  return s;
}

// Tr[(ρ_AB ⊗ ρ_AC ⊗ ρ_BC)(Φ_{A₁A₂} ⊗ Φ_{B₁B₃} ⊗ Φ_{C₂C₃})], Φ the singlet projector.
// Slot order of the product: A₁ B₁ A₂ C₂ B₃ C₃.
inline CVector triple_singlet_vector() {
  const std::array<std::pair<int, int>, 3> pairs{{{0, 2}, {1, 4}, {3, 5}}};
  CVector w = CVector::Zero(64);
  const CVector s = singlet();
  for (int idx = 0; idx < 64; ++idx) {
    cplx amp = 1;
    for (auto [a, b] : pairs) {
      int ba = (idx >> (5 - a)) & 1, bb = (idx >> (5 - b)) & 1;
      amp *= s(2 * ba + bb);
    }
    w(idx) = amp;
  }
  return w;
}

inline double three_qubit_witness(const CMatrix& rho_ab, const CMatrix& rho_ac, const CMatrix& rho_bc) {
  for (const auto* r : {&rho_ab, &rho_ac, &rho_bc})
    if (r->rows() != 4 || r->cols() != 4) throw ArgumentError("three_qubit_witness: inputs must be 4x4");
  // ±1 amplitudes with the 1/√2 factors pulled out as a single 1/8
  const CVector w = triple_singlet_vector() * (2.0 * std::sqrt(2.0));
  CVector u = w.unaryExpr([](cplx z) { return cplx(std::round(z.real()), 0.0); });
  const CMatrix prod = kron(kron(rho_ab, rho_ac), rho_bc);
  return (u.adjoint() * prod * u)(0).real() / 8.0;
}

inline std::vector<double> sorted_spectrum(const CMatrix& rho, const Tolerances& tol = {}) {
  RVector ev = eigenvalues(rho, tol);
  std::vector<double> s(ev.data(), ev.data() + ev.size());
  for (auto& x : s) x = std::max(x, 0.0);
  std::sort(s.rbegin(), s.rend());
  return s;
}

struct BipartiteResult {
  bool realizable = false;
  double omega = 0;          // inf_r KL(s_A‖r) + KL(s_B‖r)
  double pinsker_lower = 0;  // ‖s_A − s_B‖₁² / 6
  std::vector<double> s_a, s_b, minimizer;
};

// Spectra padded to max(a,b); r ranges over spectra of length ℓ = min(a,b).
inline BipartiteResult bipartite_check(const CMatrix& rho_a, const CMatrix& rho_b, double tol = 1e-9) {
  BipartiteResult res;
  res.s_a = sorted_spectrum(rho_a);
  res.s_b = sorted_spectrum(rho_b);
  const std::size_t a = res.s_a.size(), b = res.s_b.size(), ell = std::min(a, b), big = std::max(a, b);
  res.s_a.resize(big, 0.0);
  res.s_b.resize(big, 0.0);
  double l1 = 0;
  bool tail = false;
  res.realizable = true;
  for (std::size_t i = 0; i < big; ++i) {
    l1 += std::abs(res.s_a[i] - res.s_b[i]);
    if (std::abs(res.s_a[i] - res.s_b[i]) > tol) res.realizable = false;
    if (i >= ell && (res.s_a[i] > tol || res.s_b[i] > tol)) tail = true;
  }
  res.pinsker_lower = l1 * l1 / 6.0;
  if (tail) {
    res.realizable = false;
    res.omega = kInf;
    return res;
  }
  // round-off beyond ℓ would otherwise meet a zero of r
  for (std::size_t i = ell; i < big; ++i) res.s_a[i] = res.s_b[i] = 0.0;
  // Σ_i (p_i + q_i)·ln r_i is maximized on the simplex by r ∝ p + q.
  res.minimizer.assign(big, 0.0);
  for (std::size_t i = 0; i < ell; ++i) res.minimizer[i] = 0.5 * (res.s_a[i] + res.s_b[i]);
  double mass = std::accumulate(res.minimizer.begin(), res.minimizer.end(), 0.0);
  if (mass > 0)
    for (auto& x : res.minimizer) x /= mass;
  res.omega = kl_divergence(res.s_a, res.minimizer) + kl_divergence(res.s_b, res.minimizer);
  return res;
}

struct LrEntry {
  Partition alpha, beta;
  double lhs = 0, rhs = 0;
  bool ok = true;
};

// s_α(r_A)·s_β(r_B) ≤ Σ_{λ ⊢ 2n, ℓ(λ) ≤ min(a,b)} c^λ_{αβ}·weyl(λ,a)·weyl(λ,b)/specht(λ)
inline std::vector<LrEntry> lr_inequality_check(const CMatrix& rho_a, const CMatrix& rho_b, int n) {
  const int a = static_cast<int>(rho_a.rows()), b = static_cast<int>(rho_b.rows());
  const auto ra = sorted_spectrum(rho_a), rb = sorted_spectrum(rho_b);
  SchurEvaluator sa(ra), sb(rb);
  const auto lams = partitions_of(2 * n, std::min(a, b));
  std::vector<LrEntry> out;
  for (const auto& al : partitions_of(n, a))
    for (const auto& be : partitions_of(n, b)) {
      LrEntry e{al, be, sa(al) * sb(be), 0, true};
      for (const auto& l : lams) {
        long long c = littlewood_richardson(al, be, l);
        if (!c) continue;
        e.rhs += static_cast<double>(c) * static_cast<double>(weyl_dim(l, a)) * static_cast<double>(weyl_dim(l, b)) /
                 static_cast<double>(specht_dim(l));
      }
      e.ok = e.lhs <= e.rhs + 1e-9;
      out.push_back(std::move(e));
    }
  return out;
}

struct UniformityResult {
  bool uniform = false;
  double deviation = 0;
};

// ‖Tr_{¬S}(ψ) − I/d_S‖_F
inline UniformityResult is_k_uniform(const PureState& psi, const std::vector<std::string>& subset,
                                     double tol = 1e-10) {
  std::set<int> keep;
  for (const auto& nm : subset) {
    int i = psi.space.index_of(nm);
    if (i < 0) throw ArgumentError("is_k_uniform: unknown label '" + nm + "'");
    keep.insert(i);
  }
  std::set<int> drop;
  for (int x = 0; x < static_cast<int>(psi.space.size()); ++x)
    if (!keep.count(x)) drop.insert(x);
  Operator r = partial_trace(psi.projector(), drop);
  const auto d = r.mat.rows();
  const double dev = (r.mat - CMatrix::Identity(d, d) / static_cast<double>(d)).norm();
  return {dev < tol, dev};
}

}  // namespace qmpcert
