#pragma once

#include <deque>
#include <array>
#include <functional>
#include <numeric>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "autogowers/efficient.hpp"
#include "autogowers/rep.hpp"
#include "autogowers/gea.hpp"

namespace autogowers {

/// Factor map between GEAs: phi on states, pi on group element ids.
struct GeaFactor {
  GEA gea;               // the factor GEA (no outputs)
  std::vector<int> phi;  // source state -> factor state
  std::vector<int> pi;   // source element id -> factor element id
};

inline std::vector<int> compose_map(const std::vector<int>& first, const std::vector<int>& then) {
  std::vector<int> r(first.size());
  for (size_t i = 0; i < first.size(); ++i) r[i] = then[first[i]];
  return r;
}

/// Quotient T/H: same states, group G/H, labels projected.
inline GeaFactor factor_quotient(const GEA& t, const Subgroup& h) {
  Quotient q = quotient(t.group, h);
  GeaFactor f;
  f.gea = GEA::make(t.base, t.num_states(), t.initial, q.group);
  f.gea.names = t.names;
  for (int s = 0; s < t.num_states(); ++s)
    for (int j = 0; j < t.base; ++j) {
      f.gea.delta[s][j] = t.delta[s][j];
      f.gea.label[s][j] = q.proj[t.label[s][j]];
    }
  f.phi.resize(t.num_states());
  std::iota(f.phi.begin(), f.phi.end(), 0);
  f.pi = q.proj;
  return f;
}

/// Reduced GEA: merge states along the coarsest relation with identical label
/// rows and compatible transitions (s ~ s' iff lambda(s,u) = lambda(s',u)
/// for every word u).
inline GeaFactor factor_reduce(const GEA& t) {
  int n = t.num_states();
  std::vector<int> cls(n, 0);
  {
    std::map<std::vector<int>, int> by_labels;
    for (int s = 0; s < n; ++s) {
      auto it = by_labels.find(t.label[s]);
      if (it == by_labels.end()) it = by_labels.emplace(t.label[s], by_labels.size()).first;
      cls[s] = it->second;
    }
  }
  while (true) {
    std::map<std::vector<int>, int> sig_to;
    std::vector<int> next(n);
    for (int s = 0; s < n; ++s) {
      std::vector<int> sig{cls[s]};
      for (int j = 0; j < t.base; ++j) sig.push_back(cls[t.delta[s][j]]);
      auto it = sig_to.find(sig);
      if (it == sig_to.end()) it = sig_to.emplace(sig, sig_to.size()).first;
      next[s] = it->second;
    }
    if (next == cls) break;
    cls = next;
  }
  int n_cls = *std::max_element(cls.begin(), cls.end()) + 1;
  std::vector<int> rep(n_cls, -1);
  for (int s = 0; s < n; ++s)
    if (rep[cls[s]] == -1) rep[cls[s]] = s;
  GeaFactor f;
  f.gea = GEA::make(t.base, n_cls, cls[t.initial], t.group);
  for (int c = 0; c < n_cls; ++c) {
    for (int j = 0; j < t.base; ++j) {
      f.gea.delta[c][j] = cls[t.delta[rep[c]][j]];
      f.gea.label[c][j] = t.label[rep[c]][j];
    }
    f.gea.names[c] = t.names[rep[c]];
  }
  f.phi = cls;
  f.pi.resize(t.group.size());
  std::iota(f.pi.begin(), f.pi.end(), 0);
  return f;
}

namespace detail {

// distinct state pairs (s,s') admitting a nonempty word w with
// delta(s,w)=s, delta(s',w)=s', lambda(s,w)=lambda(s',w)=id
inline std::vector<std::pair<int, int>> strongly_mistakable_pairs(const GEA& t) {
  int n = t.num_states(), gs = static_cast<int>(t.group.size());
  auto key = [&](int a, int g, int b, int h) {
    return ((static_cast<std::uint64_t>(a) * gs + g) * n + b) * gs + h;
  };
  std::vector<std::pair<int, int>> out;
  for (int s = 0; s < n; ++s)
    for (int s2 = s + 1; s2 < n; ++s2) {
      auto target = key(s, t.group.identity(), s2, t.group.identity());
      // BFS from the one-step successors of the target node
      std::set<std::uint64_t> vis;
      std::deque<std::array<int, 4>> q;
      for (int j = 0; j < t.base; ++j) {
        std::array<int, 4> nx{t.delta[s][j], t.group.mul(t.group.identity(), t.label[s][j]),
                              t.delta[s2][j], t.group.mul(t.group.identity(), t.label[s2][j])};
        auto kk = key(nx[0], nx[1], nx[2], nx[3]);
        if (vis.insert(kk).second) q.push_back(nx);
      }
      bool found = false;
      while (!q.empty() && !found) {
        auto [a, g, b, h] = q.front();
        q.pop_front();
        if (key(a, g, b, h) == target) {
          found = true;
          break;
        }
        for (int j = 0; j < t.base; ++j) {
          std::array<int, 4> nx{t.delta[a][j], t.group.mul(g, t.label[a][j]), t.delta[b][j],
                                t.group.mul(h, t.label[b][j])};
          auto kk = key(nx[0], nx[1], nx[2], nx[3]);
          if (vis.insert(kk).second) q.push_back(nx);
        }
      }
      if (found) out.push_back({s, s2});
    }
  return out;
}

// all values lambda(s,u)^{-1} lambda(s',u) over u, for a given start pair
inline void collect_label_discrepancies(const GEA& t, int s, int s2, std::set<int>& gens) {
  int n = t.num_states(), gs = static_cast<int>(t.group.size());
  auto key = [&](int a, int b, int x) {
    return (static_cast<std::uint64_t>(a) * n + b) * gs + x;
  };
  std::vector<char> vis(static_cast<size_t>(n) * n * gs, 0);
  std::deque<std::array<int, 3>> q{{s, s2, t.group.identity()}};
  vis[key(s, s2, t.group.identity())] = 1;
  while (!q.empty()) {
    auto [a, b, x] = q.front();
    q.pop_front();
    gens.insert(x);
    for (int j = 0; j < t.base; ++j) {
      int x2 = t.group.mul(t.group.mul(t.group.inv(t.label[a][j]), x), t.label[b][j]);
      std::array<int, 3> nx{t.delta[a][j], t.delta[b][j], x2};
      auto kk = key(nx[0], nx[1], nx[2]);
      if (!vis[kk]) {
        vis[kk] = 1;
        q.push_back(nx);
      }
    }
  }
}

}  // namespace detail

/// Iterates T <- (T/H)_red with H generated by the label discrepancies of
/// strongly mistakable pairs, until every sufficiently long word synchronises
/// the underlying automaton.
inline GeaFactor strong_sync_factor(const GEA& t0) {
  GeaFactor total;
  total.gea = t0;
  total.phi.resize(t0.num_states());
  std::iota(total.phi.begin(), total.phi.end(), 0);
  total.pi.resize(t0.group.size());
  std::iota(total.pi.begin(), total.pi.end(), 0);
  while (true) {
    auto pairs = detail::strongly_mistakable_pairs(total.gea);
    if (pairs.empty()) return total;
    std::set<int> gens;
    for (auto [s, s2] : pairs) detail::collect_label_discrepancies(total.gea, s, s2, gens);
    Subgroup h = normal_closure(total.gea.group, std::vector<int>(gens.begin(), gens.end()));
    GeaFactor q = factor_quotient(total.gea, h);
    GeaFactor r = factor_reduce(q.gea);
    total.phi = compose_map(compose_map(total.phi, q.phi), r.phi);
    total.pi = compose_map(compose_map(total.pi, q.pi), r.pi);
    total.gea = r.gea;
  }
}

/// Quotient collapsing all states: valid once every sufficiently long word
/// synchronises the underlying automaton. Result has a single state.
inline GeaFactor invertible_factor(const GEA& t) {
  int n = t.num_states(), gs = static_cast<int>(t.group.size());
  // the non-diagonal pair graph must be acyclic; its longest path gives L
  int L = 1;
  {
    std::map<std::pair<int, int>, int> depth;
    std::vector<std::pair<int, int>> nodes;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (a != b) nodes.push_back({a, b});
    // longest path by DFS with cycle detection
    std::map<std::pair<int, int>, int> state;  // 0 new, 1 active, 2 done
    std::function<int(std::pair<int, int>)> dfs = [&](std::pair<int, int> v) -> int {
      auto& st = state[v];
      if (st == 1) throw std::invalid_argument("underlying automaton keeps unsynchronised pairs");
      if (st == 2) return depth[v];
      st = 1;
      int best = 0;
      for (int j = 0; j < t.base; ++j) {
        std::pair<int, int> w{t.delta[v.first][j], t.delta[v.second][j]};
        if (w.first != w.second) best = std::max(best, 1 + dfs(w));
      }
      st = 2;
      depth[v] = best;
      return best;
    };
    for (auto& v : nodes) L = std::max(L, dfs(v) + 1);
  }
  // discrepancies over words of exactly length L, all start pairs, via DP
  std::set<int> gens;
  {
    auto key = [&](int a, int b, int x) {
      return (static_cast<std::uint64_t>(a) * n + b) * gs + x;
    };
    std::vector<char> cur(static_cast<size_t>(n) * n * gs, 0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) cur[key(a, b, t.group.identity())] = 1;
    for (int l = 0; l < L; ++l) {
      std::vector<char> nxt(cur.size(), 0);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int x = 0; x < gs; ++x)
            if (cur[key(a, b, x)])
              for (int j = 0; j < t.base; ++j) {
                int x2 = t.group.mul(t.group.mul(t.group.inv(t.label[a][j]), x), t.label[b][j]);
                nxt[key(t.delta[a][j], t.delta[b][j], x2)] = 1;
              }
      cur = std::move(nxt);
    }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int x = 0; x < gs; ++x)
          if (cur[key(a, b, x)]) gens.insert(x);
  }
  Subgroup h = normal_closure(t.group, std::vector<int>(gens.begin(), gens.end()));
  GeaFactor q = factor_quotient(t, h);
  GeaFactor r = factor_reduce(q.gea);
  if (r.gea.num_states() != 1)
    throw std::logic_error("nondiscriminating quotient did not collapse the state set");
  GeaFactor total;
  total.gea = r.gea;
  total.phi = compose_map(q.phi, r.phi);
  total.pi = compose_map(q.pi, r.pi);
  return total;
}

/// For an invertible GEA: quotient by the normal closure of
/// lambda(n+1) lambda(1)^{-1} lambda(n)^{-1}, enumerated on the finite graph
/// of reachable pairs (lambda(n), lambda(n+1)). The result is cyclic of
/// order m | k-1.
inline GeaFactor cyclic_factor(const GEA& t) {
  if (t.num_states() != 1) throw std::invalid_argument("cyclic_factor needs an invertible gea");
  int k = t.base;
  std::vector<int> lam(k);
  for (int j = 0; j < k; ++j) lam[j] = t.label[0][j];
  if (lam[0] != t.group.identity())
    throw std::invalid_argument("invertible gea must have identity zero label");
  std::set<std::pair<int, int>> pairs;
  std::deque<std::pair<int, int>> q{{t.group.identity(), lam[1 % k]}};
  pairs.insert(q.front());
  while (!q.empty()) {
    auto [a, b] = q.front();
    q.pop_front();
    for (int j = 0; j < k; ++j) {
      std::pair<int, int> nx = (j + 1 < k)
                                   ? std::make_pair(t.group.mul(a, lam[j]), t.group.mul(a, lam[j + 1]))
                                   : std::make_pair(t.group.mul(a, lam[k - 1]), b);
      if (pairs.insert(nx).second) q.push_back(nx);
    }
  }
  std::set<int> gens;
  for (auto [a, b] : pairs)
    gens.insert(t.group.mul(t.group.mul(b, t.group.inv(lam[1])), t.group.inv(a)));
  Subgroup h = normal_closure(t.group, std::vector<int>(gens.begin(), gens.end()));
  GeaFactor f = factor_quotient(t, h);
  int m = static_cast<int>(f.gea.group.size());
  if ((k - 1) % m != 0) throw std::logic_error("cyclic factor order does not divide k-1");
  // lambda(j) = lambda(1)^j in the quotient
  int g1 = f.gea.label[0][1 % k], acc = f.gea.group.identity();
  for (int j = 0; j < k; ++j) {
    if (f.gea.label[0][j] != acc) throw std::logic_error("quotient is not the cyclic gea Z(m)");
    acc = f.gea.group.mul(acc, g1);
  }
  return f;
}

struct CharacteristicChain {
  std::vector<GeaFactor> steps;  // each relative to the previous gea
  GEA terminal;                  // isomorphic to Z(d')
  std::vector<int> phi;          // source -> terminal, composed
  std::vector<int> pi;
};

/// strong_sync_factor -> invertible_factor -> cyclic_factor; the terminal
/// group is cyclic of order d'.
inline CharacteristicChain characteristic_chain(const GEA& t) {
  CharacteristicChain c;
  GeaFactor s1 = strong_sync_factor(t);
  GeaFactor s2 = invertible_factor(s1.gea);
  GeaFactor s3 = cyclic_factor(s2.gea);
  c.phi = compose_map(compose_map(s1.phi, s2.phi), s3.phi);
  c.pi = compose_map(compose_map(s1.pi, s2.pi), s3.pi);
  c.terminal = s3.gea;
  c.steps = {std::move(s1), std::move(s2), std::move(s3)};
  return c;
}

/// The cyclic GEA Z(m) over base k (requires m | k-1 for efficiency).
inline GEA make_Zm(int k, int m) {
  PermGroup g = cyclic_group(m);
  // generator = the m-cycle (identity when m = 1)
  int gen = g.identity();
  for (int a = 0; a < static_cast<int>(g.size()); ++a)
    if (g.order_of(a) == m) {
      gen = a;
      break;
    }
  GEA t = GEA::make(k, 1, 0, g);
  int acc = g.identity();
  for (int j = 0; j < k; ++j) {
    t.delta[0][j] = 0;
    t.label[0][j] = acc;
    acc = t.group.mul(acc, gen);
  }
  t.names[0] = "z";
  return t;
}

}  // namespace autogowers
