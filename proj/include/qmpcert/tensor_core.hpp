#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qmpcert {

using cplx = std::complex<double>;
using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;
using RVector = Eigen::VectorXd;

struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct PreconditionError : std::logic_error {
  using std::logic_error::logic_error;
};
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double herm = 1e-10;
  double tr = 1e-10;
  double psd = 1e-9;
  double eig = 1e-10;
};

inline std::size_t& dense_dim_cap() {
  static std::size_t cap = std::size_t{1} << 18;
  return cap;
}

// One-line permutation notation, 0-based: p[s] is the image of slot s.
using Perm = std::vector<int>;

inline Perm identity_perm(int k) {
  Perm p(k);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

inline bool is_permutation(const Perm& p) {
  std::vector<char> seen(p.size(), 0);
  for (int x : p) {
    if (x < 0 || x >= static_cast<int>(p.size()) || seen[x]) return false;
    seen[x] = 1;
  }
  return true;
}

// (a∘b)(s) = a(b(s))
inline Perm compose(const Perm& a, const Perm& b) {
  Perm c(b.size());
  for (std::size_t s = 0; s < b.size(); ++s) c[s] = a[b[s]];
  return c;
}

inline Perm inverse(const Perm& p) {
  Perm q(p.size());
  for (std::size_t s = 0; s < p.size(); ++s) q[p[s]] = static_cast<int>(s);
  return q;
}

inline std::vector<int> cycle_type(const Perm& p) {
  std::vector<char> seen(p.size(), 0);
  std::vector<int> out;
  for (std::size_t s = 0; s < p.size(); ++s) {
    if (seen[s]) continue;
    int len = 0;
    for (std::size_t t = s; !seen[t]; t = p[t]) {
      seen[t] = 1;
      ++len;
    }
    out.push_back(len);
  }
  std::sort(out.rbegin(), out.rend());
  return out;
}

inline int perm_sign(const Perm& p) {
  int sign = 1;
  for (int len : cycle_type(p))
    if (len % 2 == 0) sign = -sign;
  return sign;
}

struct Label {
  std::string name;
  int dim = 1;
  bool operator==(const Label&) const = default;
};

class LabeledSpace {
 public:
  LabeledSpace() = default;
  explicit LabeledSpace(std::vector<Label> labels) : labels_(std::move(labels)) {
    std::set<std::string> names;
    for (const auto& l : labels_) {
      if (l.dim < 1) throw ArgumentError("label '" + l.name + "' has dimension < 1");
      if (!names.insert(l.name).second) throw ArgumentError("duplicate label '" + l.name + "'");
    }
  }
  LabeledSpace(std::initializer_list<Label> labels) : LabeledSpace(std::vector<Label>(labels)) {}

  // Anonymous single-factor space.
  static LabeledSpace of_dim(int d, const std::string& name = "H") { return LabeledSpace({{name, d}}); }

  const std::vector<Label>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  const Label& operator[](std::size_t i) const { return labels_[i]; }

  std::vector<int> dims() const {
    std::vector<int> d;
    for (const auto& l : labels_) d.push_back(l.dim);
    return d;
  }

  std::size_t total_dim() const {
    std::size_t t = 1;
    for (const auto& l : labels_) t *= static_cast<std::size_t>(l.dim);
    return t;
  }

  int index_of(const std::string& name) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i].name == name) return static_cast<int>(i);
    return -1;
  }

  // k copies, labels suffixed with the copy index.
  LabeledSpace power(int k) const {
    std::vector<Label> out;
    for (int c = 0; c < k; ++c)
      for (const auto& l : labels_) out.push_back({l.name + "#" + std::to_string(c), l.dim});
    return LabeledSpace(std::move(out));
  }

  bool operator==(const LabeledSpace&) const = default;

 private:
  std::vector<Label> labels_;
};

// Concatenation; clashing names on the right get primes appended.
inline LabeledSpace concat(const LabeledSpace& a, const LabeledSpace& b) {
  std::vector<Label> out = a.labels();
  std::set<std::string> names;
  for (const auto& l : out) names.insert(l.name);
  for (auto l : b.labels()) {
    while (names.count(l.name)) l.name += "'";
    names.insert(l.name);
    out.push_back(l);
  }
  return LabeledSpace(std::move(out));
}

inline void check_dense_dim(std::size_t dim) {
  if (dim > dense_dim_cap())
    throw ResourceError("dense dimension " + std::to_string(dim) + " exceeds cap " +
                        std::to_string(dense_dim_cap()));
}

struct Operator {
  LabeledSpace space;
  CMatrix mat;

  Operator() = default;
  Operator(LabeledSpace s, CMatrix m) : space(std::move(s)), mat(std::move(m)) {
    if (mat.rows() != mat.cols() || static_cast<std::size_t>(mat.rows()) != space.total_dim())
      throw ArgumentError("operator matrix does not match its space");
  }

  static Operator identity(const LabeledSpace& s) {
    check_dense_dim(s.total_dim());
    auto n = static_cast<Eigen::Index>(s.total_dim());
    return Operator(s, CMatrix::Identity(n, n));
  }
  static Operator zero(const LabeledSpace& s) {
    check_dense_dim(s.total_dim());
    auto n = static_cast<Eigen::Index>(s.total_dim());
    return Operator(s, CMatrix::Zero(n, n));
  }

  std::size_t dim() const { return static_cast<std::size_t>(mat.rows()); }
  cplx trace() const { return mat.trace(); }
  double hermiticity_defect() const { return (mat - mat.adjoint()).cwiseAbs().maxCoeff(); }
};

inline Operator kron(const Operator& a, const Operator& b) {
  LabeledSpace s = concat(a.space, b.space);
  check_dense_dim(s.total_dim());
  const Eigen::Index na = a.mat.rows(), nb = b.mat.rows();
  CMatrix m(na * nb, na * nb);
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index j = 0; j < na; ++j) m.block(i * nb, j * nb, nb, nb) = a.mat(i, j) * b.mat;
  return Operator(std::move(s), std::move(m));
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const Eigen::Index ra = a.rows(), ca = a.cols(), rb = b.rows(), cb = b.cols();
  CMatrix m(ra * rb, ca * cb);
  for (Eigen::Index i = 0; i < ra; ++i)
    for (Eigen::Index j = 0; j < ca; ++j) m.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
  return m;
}

inline CVector kron(const CVector& a, const CVector& b) {
  CVector v(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) v.segment(i * b.size(), b.size()) = a(i) * b;
  return v;
}

inline Operator kron_power(const Operator& a, int k) {
  if (k < 1) throw ArgumentError("kron_power needs k >= 1");
  Operator out = a;
  out.space = a.space.power(1);
  for (int c = 1; c < k; ++c) {
    check_dense_dim(out.dim() * a.dim());
    out = Operator(a.space.power(c + 1), kron(out.mat, a.mat));
  }
  return out;
}

namespace detail {

// Offsets of every multi-index over `slots` inside a row-major layout with `dims`.
inline std::vector<std::size_t> slot_offsets(const std::vector<int>& dims, const std::vector<int>& slots) {
  std::vector<std::size_t> stride(dims.size(), 1);
  for (int s = static_cast<int>(dims.size()) - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];
  std::vector<std::size_t> off{0};
  for (int s : slots) {
    std::vector<std::size_t> next;
    next.reserve(off.size() * dims[s]);
    for (std::size_t o : off)
      for (int i = 0; i < dims[s]; ++i) next.push_back(o + i * stride[s]);
    off.swap(next);
  }
  return off;
}

}  // namespace detail

inline Operator partial_trace(const Operator& x, const std::set<int>& drop) {
  const int k = static_cast<int>(x.space.size());
  for (int s : drop)
    if (s < 0 || s >= k) throw ArgumentError("partial_trace: invalid slot index " + std::to_string(s));
  std::vector<int> kept, traced;
  std::vector<Label> kept_labels;
  for (int s = 0; s < k; ++s) {
    if (drop.count(s)) {
      traced.push_back(s);
    } else {
      kept.push_back(s);
      kept_labels.push_back(x.space[s]);
    }
  }
  const auto dims = x.space.dims();
  const auto ko = detail::slot_offsets(dims, kept);
  const auto to = detail::slot_offsets(dims, traced);
  const auto n = static_cast<Eigen::Index>(ko.size());
  CMatrix m = CMatrix::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) {
      cplx acc = 0;
      for (std::size_t t : to) acc += x.mat(ko[r] + t, ko[c] + t);
      m(r, c) = acc;
    }
  return Operator(LabeledSpace(std::move(kept_labels)), std::move(m));
}

inline Operator partial_trace(const Operator& x, const std::vector<std::string>& drop_names) {
  std::set<int> drop;
  for (const auto& nm : drop_names) {
    int i = x.space.index_of(nm);
    if (i < 0) throw ArgumentError("partial_trace: unknown label '" + nm + "'");
    drop.insert(i);
  }
  return partial_trace(x, drop);
}

// Basis map of T(π) on (C^d)^{⊗k} (per-slot dims allowed, must be π-invariant):
// the factor in slot s moves to slot π(s). Returns target index for every source index.
inline std::vector<std::size_t> permutation_index_map(const std::vector<int>& dims, const Perm& pi) {
  const int k = static_cast<int>(dims.size());
  for (int s = 0; s < k; ++s)
    if (dims[pi[s]] != dims[s]) throw ArgumentError("permutation mixes slots of different dimension");
  std::vector<std::size_t> stride(k, 1);
  for (int s = k - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];
  std::size_t total = k ? stride[0] * dims[0] : 1;
  std::vector<std::size_t> out(total);
  std::vector<int> digit(k, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t t = 0;
    for (int s = 0; s < k; ++s) t += digit[s] * stride[pi[s]];
    out[idx] = t;
    for (int s = k - 1; s >= 0; --s) {
      if (++digit[s] < dims[s]) break;
      digit[s] = 0;
    }
  }
  return out;
}

// T(π) on space^{⊗k}; T(π)T(σ) = T(π∘σ).
inline Operator permutation_operator(const LabeledSpace& space, int k, const Perm& pi) {
  if (static_cast<int>(pi.size()) != k || !is_permutation(pi))
    throw ArgumentError("permutation_operator: not a bijection on k slots");
  LabeledSpace full = space.power(k);
  check_dense_dim(full.total_dim());
  const auto d = static_cast<int>(space.total_dim());
  const auto map = permutation_index_map(std::vector<int>(k, d), pi);
  const auto n = static_cast<Eigen::Index>(map.size());
  CMatrix m = CMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) m(static_cast<Eigen::Index>(map[j]), j) = 1.0;
  return Operator(std::move(full), std::move(m));
}

inline void require_hermitian(const CMatrix& h, double tol) {
  if (h.rows() != h.cols()) throw PreconditionError("operator is not square");
  double defect = h.rows() ? (h - h.adjoint()).cwiseAbs().maxCoeff() : 0.0;
  if (defect > tol)
    throw PreconditionError("operator not Hermitian (defect " + std::to_string(defect) + ")");
}

struct EigenPair {
  double value = 0;
  CVector vector;
};

inline EigenPair min_eigen_pair(const CMatrix& h, const Tolerances& tol = {}) {
  require_hermitian(h, tol.herm);
  CMatrix herm = (h + h.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
  if (es.info() != Eigen::Success) throw NumericError("dense eigensolver failed");
  return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

inline double min_eigenvalue(const Operator& h, const Tolerances& tol = {}) {
  return min_eigen_pair(h.mat, tol).value;
}

inline RVector eigenvalues(const CMatrix& h, const Tolerances& tol = {}) {
  require_hermitian(h, tol.herm);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((h + h.adjoint()) * 0.5, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

using ApplyFn = std::function<void(const CVector& in, CVector& out)>;

enum class IterativeMethod { Lanczos, PowerIteration };

struct IterativeOptions {
  IterativeMethod method = IterativeMethod::Lanczos;
  double tol = 1e-8;
  int max_iter = 10000;
  int krylov_dim = 160;
  double upper_bound = 0;  // power iteration shift c, e.g. a Gershgorin bound
  std::uint64_t seed = 0x5eed;
};

struct IterativeResult {
  double value = 0;
  CVector vector;
  double residual = 0;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

inline CVector start_vector(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CVector v(static_cast<Eigen::Index>(dim));
  for (auto& x : v) x = cplx(g(rng), g(rng));
  return v.normalized();
}

inline IterativeResult power_min(std::size_t dim, const ApplyFn& apply, const IterativeOptions& o) {
  IterativeResult r;
  CVector v = start_vector(dim, o.seed), w(static_cast<Eigen::Index>(dim));
  const double c = o.upper_bound;
  for (int it = 1; it <= o.max_iter; ++it) {
    apply(v, w);
    double theta = v.dot(w).real();
    r.residual = (w - theta * v).norm();
    r.value = theta;
    r.iterations = it;
    if (r.residual <= o.tol * std::max(1.0, std::abs(theta))) {
      r.converged = true;
      break;
    }
    CVector next = c * v - w;
    double nn = next.norm();
    if (nn == 0) break;
    v = next / nn;
  }
  r.vector = v;
  return r;
}

// Restarted Lanczos with full reorthogonalization; restarts from the current Ritz vector.
inline IterativeResult lanczos_min(std::size_t dim, const ApplyFn& apply, const IterativeOptions& o) {
  const auto n = static_cast<Eigen::Index>(dim);
  const int m = static_cast<int>(std::min<std::size_t>(dim, static_cast<std::size_t>(o.krylov_dim)));
  IterativeResult r;
  CVector x = start_vector(dim, o.seed), w(n);
  int total = 0;
  while (total < o.max_iter) {
    CMatrix V(n, m);
    std::vector<double> alpha, beta;
    V.col(0) = x;
    int built = 0;
    for (int j = 0; j < m; ++j) {
      apply(V.col(j), w);
      ++total;
      double a = V.col(j).dot(w).real();
      alpha.push_back(a);
      ++built;
      for (int pass = 0; pass < 2; ++pass)
        w -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * w);
      double b = w.norm();
      if (j + 1 == m || b < 1e-13) break;
      beta.push_back(b);
      V.col(j + 1) = w / b;
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(built, built);
    for (int j = 0; j < built; ++j) {
      T(j, j) = alpha[j];
      if (j + 1 < built) T(j, j + 1) = T(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    Eigen::VectorXd y = es.eigenvectors().col(0);
    x = V.leftCols(built) * y.cast<cplx>();
    x.normalize();
    apply(x, w);
    ++total;
    r.value = x.dot(w).real();
    r.residual = (w - r.value * x).norm();
    r.iterations = total;
    if (r.residual <= o.tol * std::max(1.0, std::abs(r.value)) || built == static_cast<int>(dim)) {
      r.converged = true;
      break;
    }
  }
  r.vector = x;
  return r;
}

}  // namespace detail

// Matrix-free minimum eigenvalue of a Hermitian operator given by its action.
inline IterativeResult min_eigenvalue_iterative(std::size_t dim, const ApplyFn& apply,
                                                const IterativeOptions& opts = {}) {
  if (dim == 0) throw ArgumentError("empty operator");
  return opts.method == IterativeMethod::Lanczos ? detail::lanczos_min(dim, apply, opts)
                                                 : detail::power_min(dim, apply, opts);
}

inline double gershgorin_upper(const CMatrix& h) {
  double best = -1e300;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    double radius = h.row(i).cwiseAbs().sum() - std::abs(h(i, i));
    best = std::max(best, h(i, i).real() + radius);
  }
  return best;
}

struct DensityOperator {
  Operator op;

  DensityOperator() = default;
  explicit DensityOperator(Operator o, const Tolerances& tol = {}) : op(std::move(o)) {
    require_hermitian(op.mat, tol.herm);
    if (std::abs(op.trace() - cplx(1.0)) > tol.tr) throw PreconditionError("density operator trace != 1");
    if (min_eigenvalue(op, tol) < -tol.psd) throw PreconditionError("density operator not PSD");
  }
  const CMatrix& mat() const { return op.mat; }
  const LabeledSpace& space() const { return op.space; }
};

struct PureState {
  LabeledSpace space;
  CVector amp;

  PureState() = default;
  PureState(LabeledSpace s, CVector a, const Tolerances& tol = {}) : space(std::move(s)), amp(std::move(a)) {
    if (static_cast<std::size_t>(amp.size()) != space.total_dim())
      throw ArgumentError("amplitude count does not match space");
    if (std::abs(amp.squaredNorm() - 1.0) > tol.tr) throw PreconditionError("pure state not normalized");
  }

  Operator projector() const { return Operator(space, amp * amp.adjoint()); }
  DensityOperator density() const { return DensityOperator(projector()); }
};

// splitmix64 step; used to derive independent per-trial seeds from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline CVector gaussian_vector(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector v(static_cast<Eigen::Index>(dim));
  for (auto& x : v) {
    double re = g(rng);
    x = cplx(re, g(rng));
  }
  return v;
}

inline PureState haar_random_pure(const LabeledSpace& space, std::uint64_t seed) {
  if (space.total_dim() == 0) throw ArgumentError("haar_random_pure: dim = 0");
  std::mt19937_64 rng(seed);
  CVector v = gaussian_vector(space.total_dim(), rng);
  return PureState(space, v / v.norm());
}

inline PureState haar_random_pure(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw ArgumentError("haar_random_pure: dim = 0");
  return haar_random_pure(LabeledSpace::of_dim(static_cast<int>(dim)), seed);
}

// Mixed state from a Haar purification with an environment of dimension env_dim.
inline DensityOperator random_density(const LabeledSpace& space, std::size_t env_dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto d = static_cast<Eigen::Index>(space.total_dim());
  CMatrix g(d, static_cast<Eigen::Index>(env_dim));
  for (Eigen::Index j = 0; j < g.cols(); ++j) g.col(j) = gaussian_vector(space.total_dim(), rng);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = (rho + rho.adjoint()) * 0.5;
  return DensityOperator(Operator(space, rho));
}

inline CMatrix haar_unitary(int d, std::mt19937_64& rng) {
  CMatrix g(d, d);
  for (int j = 0; j < d; ++j) g.col(j) = gaussian_vector(d, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  CMatrix rdiag = qr.matrixQR();
  for (int j = 0; j < d; ++j) {
    cplx r = rdiag(j, j);
    q.col(j) *= (std::abs(r) > 0 ? r / std::abs(r) : cplx(1.0));
  }
  return q;
}

}  // namespace qmpcert
