#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "autogowers/cube.hpp"
#include "autogowers/gea.hpp"
#include "autogowers/gowers.hpp"
#include "autogowers/rep.hpp"

namespace autogowers {

/// Counting transfer layer over the cube category: morphism counts evolve by
/// one digit layer per step (exact big-integer arithmetic).
class CountingDp {
 public:
  CountingDp(const Automaton& a0, int d) : a_(prolongate(a0)), d_(d) {
    gea_ = gea_from_automaton(a_);
    cat_ = build_cube_category(gea_, d);
    int n_obj = static_cast<int>(cat_.objects.size());
    // object-level degree-1 edges (with multiplicity), grouped by source
    edges_.assign(n_obj, {});
    for (int v = 0; v < n_obj; ++v)
      for (auto& e : cat_.offset_edges[cat_.objects[v].second])
        edges_[v].push_back(cat_.apply(v, e).first);
    counts_.assign(n_obj, 0);
    for (int rp : cat_.rprime) {
      std::vector<int> diag(cat_.V, gea_.initial);
      counts_[cat_.obj_index.at({cat_.stuple_index.at(diag), rp})] = 1;
    }
    // leaf weights at zero-offset objects
    int r0 = cat_.r_index.at(std::vector<int>(cat_.V, 0));
    exact_ = true;
    for (auto& v : a_.outputs)
      if (!v.is_exact()) exact_ = false;
    for (int v = 0; v < n_obj; ++v) {
      if (cat_.objects[v].second != r0) continue;
      const auto& st = cat_.stuples[cat_.objects[v].first];
      if (exact_) {
        BigRat w = 1;
        for (int o = 0; o < cat_.V; ++o) w *= a_.outputs[st[o]].to_rational();
        exact_leaves_.push_back({v, w});
      } else {
        Complex w = 1;
        for (int o = 0; o < cat_.V; ++o) {
          Complex z = a_.outputs[st[o]].to_complex();
          w *= (__builtin_popcount(static_cast<unsigned>(o)) % 2) ? std::conj(z) : z;
        }
        complex_leaves_.push_back({v, w});
      }
    }
  }

  int layers() const { return layer_; }
  int dimension() const { return d_; }
  size_t object_count() const { return cat_.objects.size(); }
  const Automaton& automaton() const { return a_; }

  void step() {
    std::vector<BigInt> next(counts_.size(), 0);
    for (size_t v = 0; v < counts_.size(); ++v) {
      if (counts_[v] == 0) continue;
      for (int w : edges_[v]) next[w] += counts_[v];
    }
    counts_ = std::move(next);
    ++layer_;
  }

  /// total morphism count into zero-offset targets = |Pi(k^L)|
  BigInt zero_offset_total() const {
    int r0 = cat_.r_index.at(std::vector<int>(cat_.V, 0));
    BigInt total = 0;
    for (size_t v = 0; v < counts_.size(); ++v)
      if (cat_.objects[v].second == r0) total += counts_[v];
    return total;
  }

  /// ||a||_{U^d[k^L]} at the current layer L
  NormResult norm() const {
    NormResult r;
    r.d = d_;
    r.method = "dp";
    std::uint64_t n = 1;
    for (int i = 0; i < layer_; ++i) n *= static_cast<std::uint64_t>(a_.base);
    r.n = n;
    r.ntilde = embedding_prime(n, d_);
    BigInt pi = pi_count_cached();
    if (exact_) {
      BigRat num = 0;
      for (auto& [v, w] : exact_leaves_) num += BigRat(counts_[v]) * w;
      if (num < 0) throw std::logic_error("U^d average negative in exact arithmetic");
      r.value = std::pow(to_double(num / BigRat(pi)), 1.0 / (1 << d_));
    } else {
      Complex num = 0;
      for (auto& [v, w] : complex_leaves_) num += static_cast<double>(counts_[v]) * w;
      double avg = std::abs(num) / static_cast<double>(pi);
      r.value = std::pow(avg, 1.0 / (1 << d_));
    }
    return r;
  }

 private:
  BigInt pi_count_cached() const {
    BigInt n = 1;
    for (int i = 0; i < layer_; ++i) n *= a_.base;
    return pi_count(n, d_);
  }

  Automaton a_;
  GEA gea_;
  int d_;
  CubeCategory cat_;
  std::vector<std::vector<int>> edges_;
  std::vector<BigInt> counts_;
  std::vector<std::pair<int, BigRat>> exact_leaves_;
  std::vector<std::pair<int, Complex>> complex_leaves_;
  int layer_ = 0;
  bool exact_ = true;
};

/// Exact U^d[k^L] via the counting transfer; polynomial in L.
inline NormResult gowers_norm_dp(const Automaton& a, int d, int L) {
  auto t0 = std::chrono::steady_clock::now();
  CountingDp dp(a, d);
  for (int i = 0; i < L; ++i) dp.step();
  NormResult r = dp.norm();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline std::vector<NormResult> gowers_norm_dp_range(const Automaton& a, int d, int L_lo, int L_hi) {
  CountingDp dp(a, d);
  std::vector<NormResult> out;
  for (int l = 1; l <= L_hi; ++l) {
    dp.step();
    if (l >= L_lo) out.push_back(dp.norm());
  }
  return out;
}

/// W(1): |Mor_1(v,v')| / k^{d+1} as exact integer counts over the object set.
struct CountingTransfer {
  int d = 0;
  std::uint64_t denom = 1;  // k^{d+1}
  std::vector<std::vector<BigInt>> counts1;
  std::vector<std::pair<int, int>> objects;
  int base_object = -1;

  std::vector<std::vector<BigInt>> power(int l) const {
    size_t n = counts1.size();
    std::vector<std::vector<BigInt>> r(n, std::vector<BigInt>(n, 0)), cur = counts1;
    for (size_t i = 0; i < n; ++i) r[i][i] = 1;
    // l-fold product; exact counts of Mor_l
    for (int step = 0; step < l; ++step) {
      std::vector<std::vector<BigInt>> nxt(n, std::vector<BigInt>(n, 0));
      for (size_t i = 0; i < n; ++i)
        for (size_t k2 = 0; k2 < n; ++k2) {
          if (r[i][k2] == 0) continue;
          for (size_t j = 0; j < n; ++j)
            if (counts1[k2][j] != 0) nxt[i][j] += r[i][k2] * counts1[k2][j];
        }
      r = std::move(nxt);
    }
    return r;
  }
};

inline CountingTransfer counting_transfer(const GEA& t, int d, size_t object_cap = 4096) {
  CubeCategory cat = build_cube_category(t, d);
  size_t n = cat.objects.size();
  if (n > object_cap) throw std::runtime_error("counting transfer object cap exceeded");
  CountingTransfer ct;
  ct.d = d;
  ct.denom = ipow(t.base, d + 1);
  ct.objects = cat.objects;
  ct.base_object = cat.base_object;
  ct.counts1.assign(n, std::vector<BigInt>(n, 0));
  for (size_t v = 0; v < n; ++v)
    for (auto& e : cat.offset_edges[cat.objects[v].second])
      ct.counts1[v][cat.apply(static_cast<int>(v), e).first] += 1;
  return ct;
}

inline CountingTransfer counting_transfer(const Automaton& a, int d, size_t cap = 4096) {
  return counting_transfer(gea_from_automaton(prolongate(a)), d, cap);
}

/// Operator-valued transfer: blocks M(1)_{v,v'} in End(E(V)) with
/// E(V) the tensor space of rho/rho* over the cube vertices.
struct OperatorTransfer {
  int d = 0;
  int dim = 1;  // dim E(V)
  std::vector<std::pair<int, int>> objects;
  int base_object = -1;
  std::vector<int> seeds;  // objects (s0^{[d]}, r'), r' in R'
  std::vector<std::vector<CMat>> m1;

  std::vector<std::vector<CMat>> power(int l) const {
    size_t n = m1.size();
    std::vector<std::vector<CMat>> r(n, std::vector<CMat>(n));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) r[i][j] = (i == j) ? CMat::eye(dim) : CMat(dim, dim);
    for (int s = 0; s < l; ++s) {
      std::vector<std::vector<CMat>> nxt(n, std::vector<CMat>(n, CMat(dim, dim)));
      for (size_t i = 0; i < n; ++i)
        for (size_t k2 = 0; k2 < n; ++k2) {
          if (r[i][k2].frobenius() == 0.0) continue;
          for (size_t j = 0; j < n; ++j)
            if (m1[k2][j].frobenius() != 0.0) nxt[i][j] = nxt[i][j] + r[i][k2] * m1[k2][j];
        }
      r = std::move(nxt);
    }
    return r;
  }

  /// A(v;L) = sum_{r' in R'} M((s0^{[d]},r'), v; L)
  std::vector<CMat> a_vector(int l) const {
    size_t n = m1.size();
    std::vector<CMat> a(n, CMat(dim, dim));
    for (int s : seeds) a[s] = CMat::eye(dim);
    for (int step = 0; step < l; ++step) {
      std::vector<CMat> nxt(n, CMat(dim, dim));
      for (size_t v = 0; v < n; ++v) {
        if (a[v].frobenius() == 0.0) continue;
        for (size_t w = 0; w < n; ++w)
          if (m1[v][w].frobenius() != 0.0) nxt[w] = nxt[w] + a[v] * m1[v][w];
      }
      a = std::move(nxt);
    }
    return a;
  }
};

/// bbrho(lab) = tensor over vertex ordinals of rho(g) (even |w|) or its
/// conjugate (odd |w|).
inline CMat cube_rep(const UnitaryRep& rho, int d, const std::vector<int>& lab) {
  CMat m = CMat::eye(1);
  for (int o = 0; o < vertex_count(d); ++o) {
    const CMat& r = rho(lab[o]);
    m = kron(m, (__builtin_popcount(static_cast<unsigned>(o)) % 2) ? r.conj() : r);
  }
  return m;
}

inline OperatorTransfer operator_transfer(const GEA& t, const UnitaryRep& rho, int d,
                                          std::uint64_t cap = 1ull << 26) {
  CubeCategory cat = build_cube_category(t, d);
  size_t n = cat.objects.size();
  OperatorTransfer ot;
  ot.d = d;
  ot.dim = 1;
  for (int o = 0; o < vertex_count(d); ++o) ot.dim *= rho.dim;
  if (static_cast<std::uint64_t>(n) * n * ot.dim * ot.dim > cap)
    throw std::runtime_error("operator transfer cap exceeded");
  ot.objects = cat.objects;
  ot.base_object = cat.base_object;
  for (int rp : cat.rprime) {
    std::vector<int> diag(vertex_count(d), t.initial);
    ot.seeds.push_back(cat.obj_index.at({cat.stuple_index.at(diag), rp}));
  }
  ot.m1.assign(n, std::vector<CMat>(n, CMat(ot.dim, ot.dim)));
  double inv = 1.0 / static_cast<double>(ipow(t.base, d + 1));
  for (size_t v = 0; v < n; ++v)
    for (auto& e : cat.offset_edges[cat.objects[v].second]) {
      auto [w, lab] = cat.apply(static_cast<int>(v), e);
      ot.m1[v][w] = ot.m1[v][w] + Complex(inv, 0.0) * cube_rep(rho, d, lab);
    }
  return ot;
}

struct DecayFit {
  int d = 0;
  double c = 0;         // fitted exponent: value ~ k^{-cL}
  double r2 = 0;
  bool exact_zero = false;
  std::vector<std::pair<int, double>> points;
};

/// Least-squares slope of log(value) against L; c = -slope / log k.
inline DecayFit decay_fit(const std::vector<std::pair<int, double>>& points, int k, int d = 0) {
  DecayFit f;
  f.d = d;
  f.points = points;
  std::vector<std::pair<int, double>> pos;
  for (auto& [l, v] : points)
    if (v > 0) pos.push_back({l, v});
  if (pos.empty()) {
    f.exact_zero = true;
    f.c = std::numeric_limits<double>::infinity();
    f.r2 = 1.0;
    return f;
  }
  if (pos.size() < 4) throw std::invalid_argument("decay fit needs >= 4 positive points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [l, v] : pos) {
    double x = l, y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double m = pos.size();
  double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  double icpt = (sy - slope * sx) / m;
  double ss_res = 0, ss_tot = 0, mean = sy / m;
  for (auto& [l, v] : pos) {
    double y = std::log(v), pred = slope * l + icpt;
    ss_res += (y - pred) * (y - pred);
    ss_tot += (y - mean) * (y - mean);
  }
  f.c = -slope / std::log(static_cast<double>(k));
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

struct NormMatrixDecay {
  std::vector<std::vector<std::vector<double>>> n_tables;  // [L-1][v][v'] = ||M(L)_{v,v'}||_2
  bool submultiplicative = true;
  DecayFit gamma_fit;      // on the (v0, v0) entry
  double gamma = 0;
};

/// N(L) tables with the submultiplicativity check and a gamma fit on the
/// base-object entry, starting the fit at L_min (stabilisation length).
inline NormMatrixDecay norm_matrix_decay(const GEA& t, const UnitaryRep& rho, int d, int l_max,
                                         int l_min = 1) {
  OperatorTransfer ot = operator_transfer(t, rho, d);
  size_t n = ot.m1.size();
  NormMatrixDecay out;
  std::vector<std::vector<CMat>> cur = ot.m1;
  for (int l = 1; l <= l_max; ++l) {
    std::vector<std::vector<double>> tab(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) tab[i][j] = cur[i][j].norm2();
    out.n_tables.push_back(std::move(tab));
    if (l < l_max) {
      std::vector<std::vector<CMat>> nxt(n, std::vector<CMat>(n, CMat(ot.dim, ot.dim)));
      for (size_t i = 0; i < n; ++i)
        for (size_t k2 = 0; k2 < n; ++k2) {
          if (cur[i][k2].frobenius() == 0.0) continue;
          for (size_t j = 0; j < n; ++j)
            if (ot.m1[k2][j].frobenius() != 0.0) nxt[i][j] = nxt[i][j] + cur[i][k2] * ot.m1[k2][j];
        }
      cur = std::move(nxt);
    }
  }
  // submultiplicativity N(l+l') <= N(l) N(l') entrywise (sampled splits)
  for (int l = 1; l + 1 <= l_max && out.submultiplicative; ++l) {
    const auto& a = out.n_tables[l - 1];
    const auto& b = out.n_tables[0];
    const auto& c = out.n_tables[l];
    for (size_t i = 0; i < n && out.submultiplicative; ++i)
      for (size_t j = 0; j < n; ++j) {
        double bound = 0;
        for (size_t k2 = 0; k2 < n; ++k2) bound += a[i][k2] * b[k2][j];
        if (c[i][j] > bound + 1e-9) {
          out.submultiplicative = false;
          break;
        }
      }
  }
  std::vector<std::pair<int, double>> pts;
  for (int l = std::max(1, l_min); l <= l_max; ++l)
    pts.push_back({l, out.n_tables[l - 1][ot.base_object][ot.base_object]});
  int positive = 0;
  for (auto& [l, v] : pts) positive += v > 0;
  if (positive >= 4) {
    out.gamma_fit = decay_fit(pts, t.base, d);
    out.gamma = std::exp(-out.gamma_fit.c * std::log(static_cast<double>(t.base)));
  } else {
    out.gamma_fit.exact_zero = true;
    out.gamma = 0.0;
  }
  return out;
}

struct FrobeniusPerronReport {
  bool powers_bounded = true;
  double spectral_radius = 0;
  std::vector<std::vector<int>> classes;
  std::vector<char> basic;
  double gamma = 1.0, c_const = 0.0;
  bool decays = false;
};

/// Classes and basic classes of a nonnegative matrix W, plus the empirical
/// decay (M^l)_{ij} <= C gamma^l into a chosen basic class J with M[J] != W[J].
inline FrobeniusPerronReport frobenius_perron_check(const std::vector<std::vector<double>>& w,
                                                    const std::vector<std::vector<double>>& m,
                                                    int j_class = -1) {
  int n = static_cast<int>(w.size());
  FrobeniusPerronReport rep;
  // bounded powers up to 64
  {
    auto cur = w;
    double w_max = 0;
    for (auto& row : w)
      for (double x : row) w_max = std::max(w_max, x);
    for (int l = 1; l <= 64 && rep.powers_bounded; ++l) {
      double mx = 0;
      for (auto& row : cur)
        for (double x : row) mx = std::max(mx, x);
      if (mx > 1e9 * std::max(1.0, w_max)) rep.powers_bounded = false;
      if (l < 64) {
        std::vector<std::vector<double>> nxt(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i)
          for (int k2 = 0; k2 < n; ++k2) {
            if (cur[i][k2] == 0) continue;
            for (int j = 0; j < n; ++j) nxt[i][j] += cur[i][k2] * w[k2][j];
          }
        cur = std::move(nxt);
      }
    }
    if (!rep.powers_bounded) return rep;
  }
  // classes: SCCs of the positivity digraph (simple iterative Kosaraju)
  {
    std::vector<std::vector<int>> adj(n), radj(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (w[i][j] > 0) {
          adj[i].push_back(j);
          radj[j].push_back(i);
        }
    std::vector<int> order;
    std::vector<char> vis(n, 0);
    std::function<void(int)> dfs1 = [&](int u) {
      vis[u] = 1;
      for (int v : adj[u])
        if (!vis[v]) dfs1(v);
      order.push_back(u);
    };
    for (int i = 0; i < n; ++i)
      if (!vis[i]) dfs1(i);
    std::vector<int> comp(n, -1);
    int nc = 0;
    std::function<void(int, int)> dfs2 = [&](int u, int c) {
      comp[u] = c;
      for (int v : radj[u])
        if (comp[v] == -1) dfs2(v, c);
    };
    for (int i = n - 1; i >= 0; --i)
      if (comp[order[i]] == -1) dfs2(order[i], nc++);
    rep.classes.assign(nc, {});
    for (int i = 0; i < n; ++i) rep.classes[comp[i]].push_back(i);
  }
  auto spectral = [&](const std::vector<int>& idx, const std::vector<std::vector<double>>& mat) {
    // power iteration on the principal submatrix
    int k2 = static_cast<int>(idx.size());
    std::vector<double> v(k2, 1.0);
    double lam = 0;
    for (int it = 0; it < 2000; ++it) {
      std::vector<double> nv(k2, 0.0);
      for (int i = 0; i < k2; ++i)
        for (int j = 0; j < k2; ++j) nv[i] += mat[idx[i]][idx[j]] * v[j];
      double norm = 0;
      for (double x : nv) norm = std::max(norm, std::abs(x));
      if (norm == 0) return 0.0;
      for (double& x : nv) x /= norm;
      if (std::abs(norm - lam) < 1e-12 * std::max(1.0, norm)) {
        v = std::move(nv);
        lam = norm;
        break;
      }
      lam = norm;
      v = std::move(nv);
    }
    return lam;
  };
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  rep.spectral_radius = spectral(all, w);
  rep.basic.assign(rep.classes.size(), 0);
  for (size_t c = 0; c < rep.classes.size(); ++c)
    rep.basic[c] = std::abs(spectral(rep.classes[c], w) - rep.spectral_radius) <= 1e-9;
  // pick J: given index or the first basic class where M differs from W
  int chosen = j_class;
  if (chosen < 0) {
    for (size_t c = 0; c < rep.classes.size(); ++c) {
      if (!rep.basic[c]) continue;
      bool differs = false;
      for (int i : rep.classes[c])
        for (int j : rep.classes[c])
          if (std::abs(m[i][j] - w[i][j]) > 1e-12) differs = true;
      if (differs) {
        chosen = static_cast<int>(c);
        break;
      }
    }
  }
  if (chosen < 0) return rep;  // nothing to test
  const auto& jm = rep.classes[chosen];
  std::vector<std::pair<int, double>> pts;
  auto cur = m;
  for (int l = 1; l <= 64; ++l) {
    double mx = 0;
    for (int i = 0; i < n; ++i)
      for (int j : jm) mx = std::max(mx, cur[i][j]);
    pts.push_back({l, mx});
    if (l < 64) {
      std::vector<std::vector<double>> nxt(n, std::vector<double>(n, 0.0));
      for (int i = 0; i < n; ++i)
        for (int k2 = 0; k2 < n; ++k2) {
          if (cur[i][k2] == 0) continue;
          for (int j = 0; j < n; ++j) nxt[i][j] += cur[i][k2] * m[k2][j];
        }
      cur = std::move(nxt);
    }
  }
  // fit on the tail (l >= 16), gamma = exp(slope)
  std::vector<std::pair<int, double>> tail(pts.begin() + 15, pts.end());
  bool allz = true;
  for (auto& [l, v] : tail) allz = allz && v == 0;
  if (allz) {
    rep.gamma = 0.0;
    rep.decays = true;
    return rep;
  }
  DecayFit f = decay_fit(tail, 2);  // c relative to log 2; gamma below
  rep.gamma = std::exp(-f.c * std::log(2.0));
  rep.c_const = 0;
  for (auto& [l, v] : tail) rep.c_const = std::max(rep.c_const, v / std::pow(rep.gamma, l));
  rep.decays = rep.gamma < 1.0;
  return rep;
}

}  // namespace autogowers
