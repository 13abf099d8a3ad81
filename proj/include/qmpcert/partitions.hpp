#pragma once

#include "tensor_core.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <mutex>
#include <ostream>

namespace qmpcert {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

inline BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

inline double log_factorial(int n) { return std::lgamma(n + 1.0); }

class Partition {
 public:
  Partition() = default;
  Partition(std::vector<int> parts) : parts_(std::move(parts)) {  // NOLINT: implicit by design
    while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (parts_[i] <= 0) throw ArgumentError("partition parts must be positive");
      if (i && parts_[i] > parts_[i - 1]) throw ArgumentError("partition parts must be non-increasing");
    }
  }
  Partition(std::initializer_list<int> parts) : Partition(std::vector<int>(parts)) {}

  const std::vector<int>& parts() const { return parts_; }
  int length() const { return static_cast<int>(parts_.size()); }
  int size() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }
  int operator[](int i) const { return i < length() ? parts_[i] : 0; }

  std::vector<int> padded(int d) const {
    std::vector<int> v(std::max(d, length()), 0);
    std::copy(parts_.begin(), parts_.end(), v.begin());
    return v;
  }

  Partition conjugate() const {
    std::vector<int> c(length() ? parts_[0] : 0, 0);
    for (int p : parts_)
      for (int j = 0; j < p; ++j) ++c[j];
    return Partition(c);
  }

  bool contains(const Partition& a) const {
    if (a.length() > length()) return false;
    for (int i = 0; i < a.length(); ++i)
      if (a[i] > (*this)[i]) return false;
    return true;
  }

  auto operator<=>(const Partition&) const = default;
  bool operator==(const Partition&) const = default;

 private:
  std::vector<int> parts_;
};

inline std::ostream& operator<<(std::ostream& os, const Partition& p) {
  os << '(';
  for (int i = 0; i < p.length(); ++i) os << (i ? "," : "") << p[i];
  return os << ')';
}

// Sorted non-increasing probability vector.
class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(std::vector<double> v, double tol_tr = 1e-10) : v_(std::move(v)) {
    for (std::size_t i = 0; i < v_.size(); ++i) {
      if (v_[i] < 0) throw ArgumentError("spectrum entries must be non-negative");
      if (i && v_[i] > v_[i - 1]) throw ArgumentError("spectrum must be sorted non-increasing");
    }
    double s = std::accumulate(v_.begin(), v_.end(), 0.0);
    if (std::abs(s - 1.0) > tol_tr) throw ArgumentError("spectrum does not sum to 1");
  }
  static Spectrum sorted(std::vector<double> v, double tol_tr = 1e-10) {
    for (auto& x : v)
      if (x < 0 && x > -1e-12) x = 0;
    std::sort(v.rbegin(), v.rend());
    return Spectrum(std::move(v), tol_tr);
  }
  const std::vector<double>& values() const { return v_; }
  int dim() const { return static_cast<int>(v_.size()); }
  double operator[](int i) const { return v_[i]; }

 private:
  std::vector<double> v_;
};

namespace detail {

inline void partitions_rec(int n, int max_part, int max_len, std::vector<int>& cur, std::vector<Partition>& out) {
  if (n == 0) {
    out.emplace_back(cur);
    return;
  }
  if (max_len == 0) return;
  for (int p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    partitions_rec(n - p, p, max_len - 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

// Reverse lexicographic order: (3) before (2,1) before (1,1,1).
inline std::vector<Partition> partitions_of(int n, int max_len) {
  if (n < 0 || max_len < 1) throw ArgumentError("partitions_of: need n >= 0, max_len >= 1");
  std::vector<Partition> out;
  std::vector<int> cur;
  detail::partitions_rec(n, n, max_len, cur, out);
  return out;
}

inline std::vector<Partition> partitions_of(int n) { return partitions_of(n, std::max(n, 1)); }

inline int hook_length(const Partition& l, int i, int j) {
  const Partition c = l.conjugate();
  return (l[i] - j - 1) + (c[j] - i - 1) + 1;
}

inline BigInt specht_dim(const Partition& l) {
  const Partition c = l.conjugate();
  BigInt hooks = 1;
  for (int i = 0; i < l.length(); ++i)
    for (int j = 0; j < l[i]; ++j) hooks *= (l[i] - j - 1) + (c[j] - i - 1) + 1;
  return factorial(l.size()) / hooks;
}

inline double log_specht_dim(const Partition& l) {
  const Partition c = l.conjugate();
  double s = log_factorial(l.size());
  for (int i = 0; i < l.length(); ++i)
    for (int j = 0; j < l[i]; ++j) s -= std::log(static_cast<double>((l[i] - j - 1) + (c[j] - i - 1) + 1));
  return s;
}

inline double specht_dim_double(const Partition& l) {
  if (l.size() <= 20) return static_cast<double>(specht_dim(l));
  return std::exp(log_specht_dim(l));
}

inline BigInt weyl_dim(const Partition& l, int d) {
  if (d < 1) throw ArgumentError("weyl_dim: d >= 1 required");
  if (l.length() > d) return 0;
  const Partition c = l.conjugate();
  BigInt num = 1, den = 1;
  for (int i = 0; i < l.length(); ++i)
    for (int j = 0; j < l[i]; ++j) {
      num *= d + j - i;
      den *= (l[i] - j - 1) + (c[j] - i - 1) + 1;
    }
  return num / den;
}

// Schur polynomial by the branching rule s_λ(x₁..x_k) = Σ_μ s_μ(x₁..x_{k−1}) x_k^{|λ|−|μ|}
// over μ interlacing λ. Each term is a Gelfand–Tsetlin pattern, i.e. a semistandard tableau,
// so the sum has no cancellation for non-negative x. Memoized across shapes.
class SchurEvaluator {
 public:
  explicit SchurEvaluator(std::vector<double> x) : x_(std::move(x)) {}

  double operator()(const Partition& l) { return eval(l.parts(), static_cast<int>(x_.size())); }

 private:
  double eval(const std::vector<int>& lam, int k) {
    if (static_cast<int>(lam.size()) > k) return 0.0;
    if (lam.empty()) return 1.0;
    if (k == 1) return std::pow(x_[0], lam[0]);
    std::vector<int> key = lam;
    key.push_back(-k);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const int total = std::accumulate(lam.begin(), lam.end(), 0);
    const double xk = x_[k - 1];
    double acc = 0;
    std::vector<int> mu;
    // μ_i ∈ [λ_{i+1}, λ_i] for i < k−1
    std::function<void(int, int)> rec = [&](int i, int size) {
      const int top = i < static_cast<int>(lam.size()) ? lam[i] : 0;
      if (i == k - 1 || top == 0) {
        std::vector<int> m = mu;
        while (!m.empty() && m.back() == 0) m.pop_back();
        double w = std::pow(xk, total - size);
        if (w != 0.0) acc += eval(m, k - 1) * w;
        return;
      }
      const int low = i + 1 < static_cast<int>(lam.size()) ? lam[i + 1] : 0;
      for (int v = top; v >= low; --v) {
        mu.push_back(v);
        rec(i + 1, size + v);
        mu.pop_back();
      }
    };
    rec(0, 0);
    memo_.emplace(std::move(key), acc);
    return acc;
  }

  std::vector<double> x_;
  std::map<std::vector<int>, double> memo_;
};

inline double schur_polynomial(const Partition& l, const std::vector<double>& x) {
  if (l.length() > static_cast<int>(x.size())) return 0.0;
  SchurEvaluator ev(x);
  return ev(l);
}

inline double schur_polynomial(const Partition& l, const Spectrum& s) { return schur_polynomial(l, s.values()); }

// Bialternant ratio det(x_i^{λ_j+d−j}) / det(x_i^{d−j}); coincident points are split by a small shift.
inline double schur_bialternant(const Partition& l, std::vector<double> x, double split = 1e-6) {
  const int d = static_cast<int>(x.size());
  if (l.length() > d) return 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(x[i] - x[j]) < split) x[i] = x[j] - split * (1 + i);
  Eigen::MatrixXd num(d, d), den(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      num(i, j) = std::pow(x[i], l[j] + d - 1 - j);
      den(i, j) = std::pow(x[i], d - 1 - j);
    }
  return num.determinant() / den.determinant();
}

inline BigInt class_size(const Partition& cls) {
  std::map<int, int> mult;
  for (int p : cls.parts()) ++mult[p];
  BigInt den = 1;
  for (auto [len, m] : mult) {
    for (int i = 0; i < m; ++i) den *= len;
    den *= factorial(m);
  }
  return factorial(cls.size()) / den;
}

namespace detail {

inline std::mutex& mn_mutex() {
  static std::mutex m;
  return m;
}
inline std::map<std::pair<std::vector<int>, std::vector<int>>, long long>& mn_memo() {
  static std::map<std::pair<std::vector<int>, std::vector<int>>, long long> m;
  return m;
}

inline long long mn_rec(const std::vector<int>& lam, const std::vector<int>& cls, std::size_t ci) {
  if (ci == cls.size()) return lam.empty() ? 1 : 0;
  std::pair key{lam, std::vector<int>(cls.begin() + static_cast<long>(ci), cls.end())};
  {
    std::lock_guard lock(mn_mutex());
    auto it = mn_memo().find(key);
    if (it != mn_memo().end()) return it->second;
  }
  const int r = cls[ci];
  const int len = static_cast<int>(lam.size());
  std::vector<int> beta(len);
  for (int i = 0; i < len; ++i) beta[i] = lam[i] + len - 1 - i;
  std::set<int> beads(beta.begin(), beta.end());
  long long total = 0;
  for (int b : beta) {
    const int t = b - r;
    if (t < 0 || beads.count(t)) continue;
    int between = 0;
    for (int c : beta)
      if (c > t && c < b) ++between;
    std::vector<int> nb;
    for (int c : beta) nb.push_back(c == b ? t : c);
    std::sort(nb.rbegin(), nb.rend());
    std::vector<int> nl;
    for (int i = 0; i < len; ++i) {
      int part = nb[i] - (len - 1 - i);
      if (part > 0) nl.push_back(part);
    }
    long long sub = mn_rec(nl, cls, ci + 1);
    total += (between % 2 ? -sub : sub);
  }
  std::lock_guard lock(mn_mutex());
  mn_memo().emplace(std::move(key), total);
  return total;
}

}  // namespace detail

// Murnaghan–Nakayama rule on beta-sets: removing a border strip of length r moves one bead
// from b to b−r; the height is the number of beads jumped over.
inline long long mn_character(const Partition& l, const Partition& cls) {
  if (l.size() != cls.size()) throw ArgumentError("mn_character: size mismatch");
  return detail::mn_rec(l.parts(), cls.parts(), 0);
}

inline long long character_of_perm(const Partition& l, const Perm& pi) {
  return mn_character(l, Partition(cycle_type(pi)));
}

// c^λ_{αβ}: skew tableaux of shape λ/α, content β, whose reverse reading word is a lattice word.
inline long long littlewood_richardson(const Partition& a, const Partition& b, const Partition& l) {
  if (l.size() != a.size() + b.size()) return 0;
  if (!l.contains(a) || !l.contains(b)) return 0;
  std::vector<std::pair<int, int>> cells;  // reading order: rows top-down, right to left
  for (int i = 0; i < l.length(); ++i)
    for (int j = l[i] - 1; j >= a[i]; --j) cells.emplace_back(i, j);
  std::vector<std::vector<int>> t(l.length());
  for (int i = 0; i < l.length(); ++i) t[i].assign(l[i], -1);
  const int nv = b.length();
  std::vector<int> count(nv, 0);
  long long found = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t idx) {
    if (idx == cells.size()) {
      ++found;
      return;
    }
    auto [i, j] = cells[idx];
    int hi = nv - 1;
    if (j + 1 < l[i]) hi = std::min(hi, t[i][j + 1]);
    int lo = 0;
    if (i > 0 && j >= a[i - 1]) lo = t[i - 1][j] + 1;
    for (int v = lo; v <= hi; ++v) {
      if (count[v] >= b[v]) continue;
      if (v > 0 && count[v] + 1 > count[v - 1]) continue;
      t[i][j] = v;
      ++count[v];
      rec(idx + 1);
      --count[v];
    }
    t[i][j] = -1;
  };
  rec(0);
  return found;
}

// δ_i(x) = x_i − x_{i+1}, last entry x_d.
template <typename T>
std::vector<T> finite_difference(const std::vector<T>& x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0) throw PreconditionError("finite_difference: negative entry");
    if (i && x[i] > x[i - 1]) throw PreconditionError("finite_difference: input not non-increasing");
  }
  std::vector<T> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - (i + 1 < x.size() ? x[i + 1] : T(0));
  return d;
}

// γ_i(y) = y_i + … + y_d.
template <typename T>
std::vector<T> cumulative(const std::vector<T>& y) {
  for (const T& v : y)
    if (v < 0) throw PreconditionError("cumulative: negative entry");
  std::vector<T> g(y.size());
  T acc = 0;
  for (std::size_t i = y.size(); i-- > 0;) {
    acc += y[i];
    g[i] = acc;
  }
  return g;
}

// δ_i(λ) = ⌈δ_i(n·s)⌉. Values within 1e−9 of an integer are treated as that integer.
inline Partition approx_partition(const Spectrum& s, int n) {
  if (n < 1) throw ArgumentError("approx_partition: n >= 1 required");
  std::vector<double> ns(s.values());
  for (auto& v : ns) v *= n;
  auto dl = finite_difference(ns);
  std::vector<int> di(dl.size());
  for (std::size_t i = 0; i < dl.size(); ++i) {
    double r = std::round(dl[i]);
    di[i] = std::abs(dl[i] - r) <= 1e-9 * std::max(1.0, std::abs(dl[i])) ? static_cast<int>(r)
                                                                          : static_cast<int>(std::ceil(dl[i]));
  }
  return Partition(cumulative(di));
}

struct DoubleCoset {
  std::vector<std::vector<int>> l;  // k×k, row and column sums n
  BigInt cardinality;
  Perm representative;
};

// Canonical riffle representative: domain block i sends its first ℓ_{i0} elements to block 0,
// the next ℓ_{i1} to block 1, ...; target blocks are filled in increasing order.
inline Perm coset_representative(const std::vector<std::vector<int>>& l, int n) {
  const int k = static_cast<int>(l.size());
  Perm b(static_cast<std::size_t>(n * k));
  std::vector<int> fill(k, 0);
  for (int i = 0; i < k; ++i) {
    int src = i * n;
    for (int j = 0; j < k; ++j)
      for (int c = 0; c < l[i][j]; ++c) b[src++] = j * n + fill[j]++;
  }
  return b;
}

inline std::vector<std::vector<int>> coset_matrix(const Perm& p, int n, int k) {
  std::vector<std::vector<int>> l(k, std::vector<int>(k, 0));
  for (int s = 0; s < n * k; ++s) ++l[s / n][p[s] / n];
  return l;
}

inline std::vector<DoubleCoset> double_cosets(int n, int k) {
  if (n < 1 || k < 1) throw ArgumentError("double_cosets: n, k >= 1 required");
  std::vector<DoubleCoset> out;
  std::vector<std::vector<int>> l(k, std::vector<int>(k, 0));
  std::vector<int> colsum(k, 0);
  const BigInt nf2k = [&] {
    BigInt f = factorial(n), r = 1;
    for (int i = 0; i < 2 * k; ++i) r *= f;
    return r;
  }();
  std::function<void(int, int, int)> rec = [&](int i, int j, int rowleft) {
    if (i == k) {
      BigInt den = 1;
      for (const auto& row : l)
        for (int v : row) den *= factorial(v);
      out.push_back({l, nf2k / den, coset_representative(l, n)});
      return;
    }
    if (j == k - 1) {
      if (colsum[j] + rowleft > n) return;
      l[i][j] = rowleft;
      colsum[j] += rowleft;
      bool ok = true;
      if (i == k - 1)
        for (int c = 0; c < k; ++c) ok = ok && colsum[c] == n;
      if (ok) rec(i + 1, 0, n);
      colsum[j] -= rowleft;
      l[i][j] = 0;
      return;
    }
    for (int v = std::min(rowleft, n - colsum[j]); v >= 0; --v) {
      l[i][j] = v;
      colsum[j] += v;
      rec(i, j + 1, rowleft - v);
      colsum[j] -= v;
    }
    l[i][j] = 0;
  };
  rec(0, 0, n);
  return out;
}

}  // namespace qmpcert
