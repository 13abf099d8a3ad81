#pragma once

// Independent reference computations for the test suites. These deliberately avoid the
// library's index maps and wiring engine: everything is an explicit digit loop.

#include "qmpcert/qmpcert.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <random>

namespace oracle {

using namespace qmpcert;

inline std::vector<int> digits(std::size_t idx, const std::vector<int>& dims) {
  std::vector<int> d(dims.size());
  for (int s = static_cast<int>(dims.size()) - 1; s >= 0; --s) {
    d[s] = static_cast<int>(idx % dims[s]);
    idx /= dims[s];
  }
  return d;
}

inline std::size_t index(const std::vector<int>& d, const std::vector<int>& dims) {
  std::size_t idx = 0;
  for (std::size_t s = 0; s < dims.size(); ++s) idx = idx * dims[s] + d[s];
  return idx;
}

// Partial trace over the factors flagged in `drop`, by summing matching digit strings.
inline CMatrix partial_trace(const CMatrix& x, const std::vector<int>& dims, const std::vector<bool>& drop) {
  std::vector<int> kept_dims;
  for (std::size_t s = 0; s < dims.size(); ++s)
    if (!drop[s]) kept_dims.push_back(dims[s]);
  std::size_t out = 1;
  for (int d : kept_dims) out *= d;
  CMatrix r = CMatrix::Zero(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(out));
  const auto n = static_cast<std::size_t>(x.rows());
  for (std::size_t i = 0; i < n; ++i) {
    const auto di = digits(i, dims);
    for (std::size_t j = 0; j < n; ++j) {
      const auto dj = digits(j, dims);
      bool match = true;
      std::vector<int> ki, kj;
      for (std::size_t s = 0; s < dims.size(); ++s) {
        if (drop[s]) {
          if (di[s] != dj[s]) {
            match = false;
            break;
          }
        } else {
          ki.push_back(di[s]);
          kj.push_back(dj[s]);
        }
      }
      if (match)
        r(static_cast<Eigen::Index>(index(ki, kept_dims)), static_cast<Eigen::Index>(index(kj, kept_dims))) +=
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return r;
}

// Matrix of the factor permutation moving slot s to slot pi[s], all slots of dimension d.
inline CMatrix perm_matrix(const Perm& pi, int d) {
  const std::vector<int> dims(pi.size(), d);
  std::size_t n = 1;
  for (std::size_t s = 0; s < pi.size(); ++s) n *= d;
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto in = digits(i, dims);
    std::vector<int> out(pi.size());
    for (std::size_t s = 0; s < pi.size(); ++s) out[pi[s]] = in[s];
    m(static_cast<Eigen::Index>(index(out, dims)), static_cast<Eigen::Index>(i)) = 1;
  }
  return m;
}

inline std::vector<Perm> perms(int k) {
  std::vector<Perm> out;
  Perm p(k);
  std::iota(p.begin(), p.end(), 0);
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Symmetric-subspace projector as the plain permutation average.
inline CMatrix sym_projector(int d, int k) {
  CMatrix s;
  int count = 0;
  for (const auto& p : perms(k)) {
    CMatrix m = perm_matrix(p, d);
    s = count++ ? CMatrix(s + m) : m;
  }
  return s / static_cast<double>(count);
}

inline CMatrix kron_all(const std::vector<CMatrix>& ms) {
  CMatrix r = CMatrix::Identity(1, 1);
  for (const auto& m : ms) {
    CMatrix t(r.rows() * m.rows(), r.cols() * m.cols());
    for (Eigen::Index i = 0; i < r.rows(); ++i)
      for (Eigen::Index j = 0; j < r.cols(); ++j) t.block(i * m.rows(), j * m.cols(), m.rows(), m.cols()) = r(i, j) * m;
    r = t;
  }
  return r;
}

inline CMatrix random_hermitian(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cplx(g(rng), g(rng));
  return (a + a.adjoint()) * 0.5;
}

inline CMatrix random_psd(int d, std::mt19937_64& rng) {
  CMatrix a = random_hermitian(d, rng);
  return a * a.adjoint();
}

inline CMatrix random_density(int d, std::mt19937_64& rng) {
  CMatrix a = random_psd(d, rng);
  return a / a.trace().real();
}

inline CMatrix diag(const std::vector<double>& v) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = v[i];
  return m;
}

inline std::vector<double> random_simplex(int d, std::mt19937_64& rng) {
  std::exponential_distribution<double> e;
  std::vector<double> v(d);
  double s = 0;
  for (auto& x : v) s += (x = e(rng));
  for (auto& x : v) x /= s;
  return v;
}

// Mass of a density f(a, b) supported on the unit disk over the cell [xl,xh]×[zl,zh].
// Inner variable z = c·sin θ with c = √(1−x²) cancels the inverse-square-root edge; the outer
// range is split where √(1−x²) meets a z edge so every piece is smooth inside.
template <class F>
double disk_cell_mass(F f, double xl, double xh, double zl, double zh) {
  xl = std::max(-1.0, xl);
  xh = std::min(1.0, xh);
  if (xh <= xl) return 0.0;
  auto inner = [&](double x) {
    const double c = std::sqrt(std::max(0.0, 1 - x * x));
    if (c <= 0) return 0.0;
    const double t0 = std::asin(std::clamp(zl / c, -1.0, 1.0)), t1 = std::asin(std::clamp(zh / c, -1.0, 1.0));
    if (t1 <= t0) return 0.0;
    return boost::math::quadrature::gauss<double, 10>::integrate(
        [&](double th) { return f(x, c * std::sin(th)) * c * std::cos(th); }, t0, t1);
  };
  std::vector<double> cuts{xl, xh};
  for (double z : {zl, zh})
    if (std::abs(z) < 1)
      for (double x : {-std::sqrt(1 - z * z), std::sqrt(1 - z * z)})
        if (x > xl && x < xh) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  boost::math::quadrature::tanh_sinh<double> ts;
  double total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) total += ts.integrate(inner, cuts[i], cuts[i + 1], 1e-10);
  return total;
}

}  // namespace oracle
