#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "autogowers/group.hpp"

namespace autogowers {

/// Dense complex matrix, row-major. Sizes here stay tiny (<= a few hundred).
struct CMat {
  int rows = 0, cols = 0;
  std::vector<Complex> a;

  CMat() = default;
  CMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}
  static CMat eye(int n) {
    CMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  Complex& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  Complex operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  friend CMat operator*(const CMat& x, const CMat& y) {
    CMat z(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
      for (int k = 0; k < x.cols; ++k) {
        Complex v = x(i, k);
        if (v == Complex(0.0, 0.0)) continue;
        for (int j = 0; j < y.cols; ++j) z(i, j) += v * y(k, j);
      }
    return z;
  }
  friend CMat operator+(const CMat& x, const CMat& y) {
    CMat z = x;
    for (size_t i = 0; i < z.a.size(); ++i) z.a[i] += y.a[i];
    return z;
  }
  friend CMat operator*(Complex c, const CMat& x) {
    CMat z = x;
    for (auto& v : z.a) v *= c;
    return z;
  }

  CMat adjoint() const {
    CMat z(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) z(j, i) = std::conj((*this)(i, j));
    return z;
  }
  CMat conj() const {
    CMat z = *this;
    for (auto& v : z.a) v = std::conj(v);
    return z;
  }

  double frobenius() const {
    double s = 0;
    for (auto& v : a) s += std::norm(v);
    return std::sqrt(s);
  }

  /// Spectral norm via power iteration on A*A.
  double norm2(double tol = 1e-10, int max_iter = 1000) const {
    if (rows == 0 || cols == 0) return 0.0;
    double fro = frobenius();
    if (fro == 0.0) return 0.0;
    if (rows == 1 || cols == 1) return fro;
    std::vector<Complex> v(cols);
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> u(-1, 1);
    for (auto& x : v) x = Complex(u(rng), u(rng));
    double prev = 0;
    for (int it = 0; it < max_iter; ++it) {
      std::vector<Complex> w(rows, 0.0), v2(cols, 0.0);
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) w[i] += (*this)(i, j) * v[j];
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) v2[j] += std::conj((*this)(i, j)) * w[i];
      double n2 = 0;
      for (auto& x : v2) n2 += std::norm(x);
      n2 = std::sqrt(n2);
      if (n2 == 0.0) return 0.0;
      for (auto& x : v2) x /= n2;
      v = std::move(v2);
      double est = std::sqrt(n2);
      if (std::abs(est - prev) < tol * std::max(1.0, est)) return est;
      prev = est;
    }
    return prev;
  }

  friend CMat kron(const CMat& x, const CMat& y) {
    CMat z(x.rows * y.rows, x.cols * y.cols);
    for (int i = 0; i < x.rows; ++i)
      for (int j = 0; j < x.cols; ++j) {
        Complex v = x(i, j);
        if (v == Complex(0.0, 0.0)) continue;
        for (int p = 0; p < y.rows; ++p)
          for (int q = 0; q < y.cols; ++q) z(i * y.rows + p, j * y.cols + q) = v * y(p, q);
      }
    return z;
  }

  double max_abs_diff(const CMat& o) const {
    double m = 0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - o.a[i]));
    return m;
  }
};

/// Unitary representation: one matrix per group element id.
struct UnitaryRep {
  const PermGroup* group = nullptr;
  int dim = 0;
  std::vector<CMat> mats;

  const CMat& operator()(int id) const { return mats[id]; }

  bool check(double tol = 1e-9) const {
    for (size_t a = 0; a < group->size(); ++a) {
      CMat uu = mats[a] * mats[a].adjoint();
      if (uu.max_abs_diff(CMat::eye(dim)) > tol) return false;
    }
    for (size_t a = 0; a < group->size(); ++a)
      for (size_t b = 0; b < group->size(); ++b) {
        CMat lhs = mats[a] * mats[b];
        if (lhs.max_abs_diff(mats[group->mul(static_cast<int>(a), static_cast<int>(b))]) > tol)
          return false;
      }
    return true;
  }
};

inline UnitaryRep trivial_rep(const PermGroup& g) {
  UnitaryRep r{&g, 1, {}};
  r.mats.assign(g.size(), CMat::eye(1));
  return r;
}

inline int perm_sign(const Perm& p) {
  std::vector<char> done(p.degree(), 0);
  int sign = 1;
  for (int i = 0; i < p.degree(); ++i) {
    if (done[i]) continue;
    int len = 0, j = i;
    while (!done[j]) {
      done[j] = 1;
      j = p(j);
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

inline UnitaryRep sign_rep(const PermGroup& g) {
  UnitaryRep r{&g, 1, {}};
  r.mats.reserve(g.size());
  for (size_t i = 0; i < g.size(); ++i) {
    CMat m(1, 1);
    m(0, 0) = static_cast<double>(perm_sign(g.element(static_cast<int>(i))));
    r.mats.push_back(m);
  }
  return r;
}

/// Permutation matrices of the natural degree-m action restricted to the
/// orthogonal complement of the all-ones vector; for Sym(3) this is the
/// standard 2-dimensional representation.
inline UnitaryRep standard_rep(const PermGroup& g) {
  int m = g.degree();
  if (m < 2) throw std::invalid_argument("standard rep needs degree >= 2");
  // orthonormal basis of the complement of (1,..,1)
  std::vector<std::vector<double>> basis;
  for (int i = 0; i < m - 1; ++i) {
    // u_i proportional to (1,..,1,-(i+1),0,..,0) with i+1 leading ones
    std::vector<double> u(m, 0.0);
    for (int j = 0; j <= i; ++j) u[j] = 1.0;
    u[i + 1] = -(i + 1.0);
    double norm = std::sqrt((i + 1.0) + (i + 1.0) * (i + 1.0));
    for (auto& x : u) x /= norm;
    basis.push_back(std::move(u));
  }
  UnitaryRep r{&g, m - 1, {}};
  for (size_t e = 0; e < g.size(); ++e) {
    const Perm& p = g.element(static_cast<int>(e));
    CMat mat(m - 1, m - 1);
    for (int i = 0; i < m - 1; ++i)
      for (int j = 0; j < m - 1; ++j) {
        // <u_i, P u_j> with (P u)_x = u_{p^{-1}(x)}
        double s = 0;
        for (int x = 0; x < m; ++x) s += basis[i][x] * basis[j][p.inverse()(x)];
        mat(i, j) = s;
      }
    r.mats.push_back(mat);
  }
  return r;
}

inline UnitaryRep regular_rep(const PermGroup& g) {
  int n = static_cast<int>(g.size());
  UnitaryRep r{&g, n, {}};
  for (int a = 0; a < n; ++a) {
    CMat m(n, n);
    for (int b = 0; b < n; ++b) m(g.mul(a, b), b) = 1.0;
    r.mats.push_back(m);
  }
  return r;
}

/// Cyclic group of order m as the m-cycle in Sym(m).
inline PermGroup cyclic_group(int m) {
  if (m == 1) return PermGroup(1);
  std::vector<int> img(m);
  for (int i = 0; i < m; ++i) img[i] = (i + 1) % m;
  return PermGroup(std::vector<Perm>{Perm(img)});
}

/// Character g^j -> e(rj/m) of the cyclic group of order m.
inline UnitaryRep cyclic_character(const PermGroup& g, int r) {
  int m = static_cast<int>(g.size());
  UnitaryRep rep{&g, 1, {}};
  rep.mats.resize(g.size());
  // discrete log against the generator (any element of order m when cyclic)
  int gen = -1;
  for (int a = 0; a < m; ++a)
    if (g.order_of(a) == m) {
      gen = a;
      break;
    }
  if (gen < 0) throw std::invalid_argument("group is not cyclic");
  int x = g.identity();
  for (int j = 0; j < m; ++j) {
    CMat mm(1, 1);
    double th = 2.0 * M_PI * (static_cast<double>(r) * j / m);
    mm(0, 0) = Complex(std::cos(th), std::sin(th));
    rep.mats[x] = mm;
    x = g.mul(x, gen);
  }
  return rep;
}

struct BuiltinRepSpec {
  std::string name;      // trivial | sign | cyclic_character | sym3_standard | regular
  int m = 0, r = 0;      // parameters of cyclic_character(m, r)
};

/// Small built-in representation library; general character theory is out of
/// scope for this artifact.
inline UnitaryRep builtin_rep(const BuiltinRepSpec& spec, const PermGroup& g) {
  if (spec.name == "trivial") return trivial_rep(g);
  if (spec.name == "sign") return sign_rep(g);
  if (spec.name == "regular") return regular_rep(g);
  if (spec.name == "sym3_standard" || spec.name == "standard") return standard_rep(g);
  if (spec.name == "cyclic_character") return cyclic_character(g, spec.r);
  throw std::invalid_argument("unknown representation: " + spec.name);
}

/// True iff || E_{g in G0} rho(g) || <= tol; by Prop. on rho-averages this
/// holds exactly when rho is irreducible and G0 is not inside ker rho.
inline bool rho_average_check(const UnitaryRep& rho, const Subgroup& g0, double tol = 1e-9) {
  CMat sum(rho.dim, rho.dim);
  for (int h : g0.elems) sum = sum + rho(h);
  sum = Complex(1.0 / static_cast<double>(g0.size()), 0.0) * sum;
  return sum.frobenius() <= tol;
}

}  // namespace autogowers
