#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "autogowers/digits.hpp"
#include "autogowers/value.hpp"

namespace autogowers {

constexpr int kMaxBase = 1 << 20;

/// DFA with output over the digit alphabet Sigma_k.
/// States are dense indices; display names live in `names`.
struct Automaton {
  int base = 2;
  int initial = 0;
  std::vector<std::vector<int>> delta;  // delta[s][digit]
  std::vector<Value> outputs;           // empty when the automaton has no output
  std::vector<std::string> names;

  int num_states() const { return static_cast<int>(delta.size()); }
  bool has_outputs() const { return !outputs.empty(); }

  static Automaton make(int k, int n, int s0) {
    Automaton a;
    a.base = k;
    a.initial = s0;
    a.delta.assign(n, std::vector<int>(k, 0));
    a.names.resize(n);
    for (int i = 0; i < n; ++i) a.names[i] = "s" + std::to_string(i);
    return a;
  }

  int step(int s, int digit) const { return delta[s][digit]; }

  int run(int s, const DigitWord& w) const {
    for (int d : w.digits) s = delta[s][d];
    return s;
  }
  int run(int s, const std::vector<int>& digits) const {
    for (int d : digits) s = delta[s][d];
    return s;
  }

  /// State reached from the initial state on (n)_k.
  int state_at(BigInt n) const { return run(initial, expand(std::move(n), base)); }

  Value eval(BigInt n) const {
    if (!has_outputs()) throw std::logic_error("automaton has no output table");
    return outputs[state_at(std::move(n))];
  }
  Value eval(std::uint64_t n) const { return eval(BigInt(n)); }

  /// States visited while reading (n)_k, starting with the initial state.
  std::vector<int> eval_trace(BigInt n) const {
    std::vector<int> tr{initial};
    for (int d : expand(std::move(n), base).digits) tr.push_back(delta[tr.back()][d]);
    return tr;
  }

  bool is_prolongable() const { return delta[initial][0] == initial; }

  bool is_idempotent() const {
    if (!is_prolongable()) return false;
    for (int s = 0; s < num_states(); ++s)
      if (delta[delta[s][0]][0] != delta[s][0]) return false;
    return true;
  }

  bool is_invertible() const {
    for (int s = 0; s < num_states(); ++s)
      if (delta[s][0] != s) return false;
    for (int j = 0; j < base; ++j) {
      std::vector<char> hit(num_states(), 0);
      for (int s = 0; s < num_states(); ++s) {
        if (hit[delta[s][j]]) return false;
        hit[delta[s][j]] = 1;
      }
    }
    return true;
  }
};

inline std::vector<int> reachable_states(const Automaton& a) {
  std::vector<char> seen(a.num_states(), 0);
  std::vector<int> order;
  std::deque<int> q{a.initial};
  seen[a.initial] = 1;
  while (!q.empty()) {
    int s = q.front();
    q.pop_front();
    order.push_back(s);
    for (int j = 0; j < a.base; ++j)
      if (!seen[a.delta[s][j]]) {
        seen[a.delta[s][j]] = 1;
        q.push_back(a.delta[s][j]);
      }
  }
  return order;
}

/// Drops unreachable states, renumbering in BFS order from the initial state.
inline Automaton trim(const Automaton& a) {
  auto order = reachable_states(a);
  std::vector<int> newid(a.num_states(), -1);
  for (size_t i = 0; i < order.size(); ++i) newid[order[i]] = static_cast<int>(i);
  Automaton b = Automaton::make(a.base, static_cast<int>(order.size()), 0);
  if (a.has_outputs()) b.outputs.resize(order.size());
  for (size_t i = 0; i < order.size(); ++i) {
    int s = order[i];
    for (int j = 0; j < a.base; ++j) b.delta[i][j] = newid[a.delta[s][j]];
    if (a.has_outputs()) b.outputs[i] = a.outputs[s];
    b.names[i] = a.names[s];
  }
  return b;
}

/// Moore partition refinement; merges nondistinguishable states.
/// Class numbering follows the smallest original state index, so the result
/// is reproducible.
inline Automaton trim_minimize(const Automaton& a0) {
  Automaton a = trim(a0);
  int n = a.num_states();
  std::vector<int> cls(n, 0);
  if (a.has_outputs()) {
    std::map<Value, int> by_out;
    std::vector<int> first;
    for (int s = 0; s < n; ++s) {
      auto it = by_out.find(a.outputs[s]);
      if (it == by_out.end()) {
        it = by_out.emplace(a.outputs[s], static_cast<int>(first.size())).first;
        first.push_back(s);
      }
      cls[s] = it->second;
    }
  }
  while (true) {
    std::map<std::vector<int>, int> sig_to_cls;
    std::vector<int> next(n);
    for (int s = 0; s < n; ++s) {
      std::vector<int> sig{cls[s]};
      for (int j = 0; j < a.base; ++j) sig.push_back(cls[a.delta[s][j]]);
      auto it = sig_to_cls.find(sig);
      if (it == sig_to_cls.end()) it = sig_to_cls.emplace(sig, static_cast<int>(sig_to_cls.size())).first;
      next[s] = it->second;
    }
    if (next == cls) break;
    cls = next;
  }
  // renumber classes by least member
  int n_cls = *std::max_element(cls.begin(), cls.end()) + 1;
  std::vector<int> least(n_cls, n);
  for (int s = 0; s < n; ++s) least[cls[s]] = std::min(least[cls[s]], s);
  std::vector<int> order(n_cls);
  for (int c = 0; c < n_cls; ++c) order[c] = c;
  std::sort(order.begin(), order.end(), [&](int x, int y) { return least[x] < least[y]; });
  std::vector<int> rank(n_cls);
  for (int i = 0; i < n_cls; ++i) rank[order[i]] = i;

  Automaton b = Automaton::make(a.base, n_cls, rank[cls[a.initial]]);
  if (a.has_outputs()) b.outputs.resize(n_cls);
  for (int c = 0; c < n_cls; ++c) {
    int rep = least[order[c]];
    for (int j = 0; j < a.base; ++j) b.delta[c][j] = rank[cls[a.delta[rep][j]]];
    if (a.has_outputs()) b.outputs[c] = a.outputs[rep];
    b.names[c] = a.names[rep];
  }
  return b;
}

struct SccResult {
  std::vector<int> component;        // state -> component id
  int n_components = 0;
  std::vector<int> topo_order;       // condensation, sources first
  std::vector<char> closed;          // component has no edge leaving it
  std::vector<std::vector<int>> members;
};

/// Tarjan strongly connected components + condensation order.
/// A "closed" component is a sub-automaton closed under every digit,
/// i.e. a strongly connected automaton in its own right.
inline SccResult scc_decompose(const Automaton& a) {
  int n = a.num_states();
  SccResult r;
  r.component.assign(n, -1);
  std::vector<int> low(n, -1), num(n, -1), stk;
  std::vector<char> on(n, 0);
  int counter = 0;
  // iterative tarjan
  struct Frame {
    int s, j;
  };
  for (int root = 0; root < n; ++root) {
    if (num[root] != -1) continue;
    std::vector<Frame> call{{root, 0}};
    num[root] = low[root] = counter++;
    stk.push_back(root);
    on[root] = 1;
    while (!call.empty()) {
      auto& f = call.back();
      if (f.j < a.base) {
        int t = a.delta[f.s][f.j++];
        if (num[t] == -1) {
          num[t] = low[t] = counter++;
          stk.push_back(t);
          on[t] = 1;
          call.push_back({t, 0});
        } else if (on[t]) {
          low[f.s] = std::min(low[f.s], num[t]);
        }
      } else {
        if (low[f.s] == num[f.s]) {
          int c = r.n_components++;
          while (true) {
            int t = stk.back();
            stk.pop_back();
            on[t] = 0;
            r.component[t] = c;
            if (t == f.s) break;
          }
        }
        int s = f.s;
        call.pop_back();
        if (!call.empty()) low[call.back().s] = std::min(low[call.back().s], low[s]);
      }
    }
  }
  r.members.assign(r.n_components, {});
  for (int s = 0; s < n; ++s) r.members[r.component[s]].push_back(s);
  r.closed.assign(r.n_components, 1);
  std::vector<std::set<int>> succ(r.n_components);
  for (int s = 0; s < n; ++s)
    for (int j = 0; j < a.base; ++j) {
      int c = r.component[s], c2 = r.component[a.delta[s][j]];
      if (c != c2) {
        r.closed[c] = 0;
        succ[c].insert(c2);
      }
    }
  // topological order of the condensation (tarjan emits reverse-topological)
  std::vector<int> indeg(r.n_components, 0);
  for (int c = 0; c < r.n_components; ++c)
    for (int c2 : succ[c]) ++indeg[c2];
  std::deque<int> q;
  for (int c = r.n_components - 1; c >= 0; --c)
    if (indeg[c] == 0) q.push_back(c);
  while (!q.empty()) {
    int c = q.front();
    q.pop_front();
    r.topo_order.push_back(c);
    for (int c2 : succ[c])
      if (--indeg[c2] == 0) q.push_back(c2);
  }
  return r;
}

inline bool is_strongly_connected(const Automaton& a) {
  return scc_decompose(a).n_components == 1;
}

namespace detail {

inline std::uint64_t pair_key(int x, int y, int n) {
  if (x > y) std::swap(x, y);
  return static_cast<std::uint64_t>(x) * n + y;
}

// BFS parents on the unordered-pair graph toward the diagonal.
// merge_digit[p] = digit making progress, -1 when a pair cannot merge.
inline bool pair_merge_table(const Automaton& a, std::vector<int>& merge_digit) {
  int n = a.num_states();
  merge_digit.assign(static_cast<size_t>(n) * n, -1);
  std::vector<int> dist(static_cast<size_t>(n) * n, -1);
  // reverse adjacency
  std::vector<std::vector<std::pair<std::uint64_t, int>>> radj(static_cast<size_t>(n) * n);
  for (int x = 0; x < n; ++x)
    for (int y = x; y < n; ++y)
      for (int j = 0; j < a.base; ++j) {
        auto to = pair_key(a.delta[x][j], a.delta[y][j], n);
        radj[to].push_back({pair_key(x, y, n), j});
      }
  std::deque<std::uint64_t> q;
  for (int s = 0; s < n; ++s) {
    auto p = pair_key(s, s, n);
    dist[p] = 0;
    q.push_back(p);
  }
  while (!q.empty()) {
    auto p = q.front();
    q.pop_front();
    for (auto [from, j] : radj[p])
      if (dist[from] == -1) {
        dist[from] = dist[p] + 1;
        merge_digit[from] = j;
        q.push_back(from);
      }
  }
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y)
      if (dist[pair_key(x, y, n)] == -1) return false;
  return true;
}

}  // namespace detail

/// Word w with delta(s,w) identical over all states, or nullopt when the
/// pair-automaton search proves none exists. Greedy quadratic construction.
inline std::optional<DigitWord> find_sync_word(const Automaton& a) {
  int n = a.num_states();
  if (n == 1) return DigitWord(a.base, {});
  std::vector<int> merge_digit;
  if (!detail::pair_merge_table(a, merge_digit)) return std::nullopt;
  std::set<int> cur;
  for (int s = 0; s < n; ++s) cur.insert(s);
  std::vector<int> word;
  while (cur.size() > 1) {
    auto it = cur.begin();
    int x = *it++;
    int y = *it;
    while (x != y) {
      int j = merge_digit[detail::pair_key(x, y, n)];
      word.push_back(j);
      std::set<int> next;
      for (int s : cur) next.insert(a.delta[s][j]);
      cur.swap(next);
      x = a.delta[x][j];
      y = a.delta[y][j];
    }
  }
  return DigitWord(a.base, std::move(word));
}

/// Reversed-reading automaton producing the same sequence: states are the
/// reachable elements of the transition monoid, read least significant digit
/// first. Requires a prolongable input so padding is harmless.
inline Automaton reverse_reading_automaton(const Automaton& a0) {
  Automaton a = a0;
  if (!a.is_prolongable()) {
    // standard prolongation: fresh initial state that ignores leading zeros
    int z = a.num_states();
    a.delta.push_back(a.delta[a.initial]);
    a.delta[z][0] = z;
    if (a.has_outputs()) a.outputs.push_back(a.outputs[a.initial]);
    a.names.push_back("z");
    a.initial = z;
  }
  int n = a.num_states();
  std::map<std::vector<int>, int> id;
  std::vector<std::vector<int>> funcs;
  std::vector<int> idf(n);
  for (int s = 0; s < n; ++s) idf[s] = s;
  id[idf] = 0;
  funcs.push_back(idf);
  std::vector<std::vector<int>> delta;
  for (size_t i = 0; i < funcs.size(); ++i) {
    delta.emplace_back(a.base);
    for (int j = 0; j < a.base; ++j) {
      // g_{uj}(s) = g_u(delta(s,j))
      std::vector<int> g(n);
      for (int s = 0; s < n; ++s) g[s] = funcs[i][a.delta[s][j]];
      auto it = id.find(g);
      if (it == id.end()) {
        it = id.emplace(g, static_cast<int>(funcs.size())).first;
        funcs.push_back(std::move(g));
      }
      delta[i][j] = it->second;
    }
  }
  Automaton b = Automaton::make(a.base, static_cast<int>(funcs.size()), 0);
  b.delta = std::move(delta);
  if (a.has_outputs()) {
    b.outputs.resize(funcs.size());
    for (size_t i = 0; i < funcs.size(); ++i) b.outputs[i] = a.outputs[funcs[i][a.initial]];
  }
  for (size_t i = 0; i < funcs.size(); ++i) b.names[i] = "f" + std::to_string(i);
  return b;
}

enum class ReadDirection { Forward, Backward };

struct SyncReport {
  bool synchronising = false;
  std::optional<DigitWord> witness;  // digits in the tested reading order
};

/// Lemma-style test: the minimal automaton reading in the given direction
/// admits a synchronising word iff the sequence is synchronising that way.
inline SyncReport is_sync_sequence(const Automaton& a, ReadDirection dir) {
  Automaton m = (dir == ReadDirection::Forward) ? trim_minimize(a)
                                                : trim_minimize(reverse_reading_automaton(a));
  SyncReport r;
  r.witness = find_sync_word(m);
  r.synchronising = r.witness.has_value();
  return r;
}

/// Ensures delta(s0,0)=s0 without changing the sequence.
inline Automaton prolongate(const Automaton& a) {
  if (a.is_prolongable()) return a;
  Automaton b = a;
  int z = b.num_states();
  b.delta.push_back(b.delta[b.initial]);
  b.delta[z][0] = z;
  if (b.has_outputs()) b.outputs.push_back(b.outputs[b.initial]);
  b.names.push_back("z");
  b.initial = z;
  return trim(b);
}

/// Same sequence over Sigma_{k^t}.
inline Automaton base_power_change(const Automaton& a0, int t) {
  if (t < 1) throw std::invalid_argument("power must be >= 1");
  Automaton a = prolongate(a0);
  std::int64_t kk = 1;
  for (int i = 0; i < t; ++i) {
    kk *= a.base;
    if (kk > kMaxBase) throw std::runtime_error("base power exceeds digit bound");
  }
  Automaton b = Automaton::make(static_cast<int>(kk), a.num_states(), a.initial);
  b.outputs = a.outputs;
  b.names = a.names;
  for (int s = 0; s < a.num_states(); ++s)
    for (int J = 0; J < b.base; ++J) b.delta[s][J] = a.run(s, expand(BigInt(J), a.base, t));
  return b;
}

/// Smallest t >= 1 with delta(.,0^t) idempotent, via the zero-map's
/// preperiod/period in the transformation monoid.
inline int idempotency_power(const Automaton& a) {
  std::map<std::vector<int>, int> seen;
  std::vector<int> f(a.num_states());
  for (int s = 0; s < a.num_states(); ++s) f[s] = a.delta[s][0];
  int i = 1;
  while (true) {
    auto it = seen.find(f);
    if (it != seen.end()) {
      int pre = it->second, period = i - it->second;
      int t = period;
      while (t < pre) t += period;
      return t;
    }
    seen[f] = i;
    std::vector<int> g(a.num_states());
    for (int s = 0; s < a.num_states(); ++s) g[s] = a.delta[f[s]][0];
    f = std::move(g);
    ++i;
    if (i > 100000) throw std::runtime_error("zero-map iteration runaway");
  }
}

/// Prolongable + idempotent automaton for the same sequence, in base k^t.
inline Automaton make_idempotent(const Automaton& a0) {
  Automaton a = prolongate(a0);
  if (a.is_idempotent()) return a;
  int t = idempotency_power(a);
  Automaton b = (t == 1) ? a : base_power_change(a, t);
  if (!b.is_idempotent()) throw std::logic_error("idempotency normalisation failed");
  return b;
}

/// Word w such that any input containing w as a factor ends inside a closed
/// strongly connected component; iterative w <- w u construction.
inline DigitWord killing_word(const Automaton& a) {
  auto scc = scc_decompose(a);
  int n = a.num_states();
  auto in_closed = [&](int s) { return scc.closed[scc.component[s]] != 0; };
  // shortest word from s into a closed component, by BFS
  auto word_to_closed = [&](int s) {
    std::vector<int> par(n, -1), pdig(n, -1);
    std::deque<int> q{s};
    par[s] = s;
    int found = in_closed(s) ? s : -1;
    while (!q.empty() && found == -1) {
      int x = q.front();
      q.pop_front();
      for (int j = 0; j < a.base && found == -1; ++j) {
        int y = a.delta[x][j];
        if (par[y] == -1) {
          par[y] = x;
          pdig[y] = j;
          if (in_closed(y)) found = y;
          q.push_back(y);
        }
      }
    }
    std::vector<int> w;
    for (int x = found; x != s; x = par[x]) w.push_back(pdig[x]);
    std::reverse(w.begin(), w.end());
    return w;
  };
  std::vector<int> w;
  for (int s = 0; s < n; ++s) {
    int cur = a.run(s, w);
    if (!in_closed(cur)) {
      auto u = word_to_closed(cur);
      w.insert(w.end(), u.begin(), u.end());
    }
  }
  return DigitWord(a.base, std::move(w));
}

/// b(n) = a([u (n)_k]_k): re-root at delta(s0, u).
inline Automaton prepend_word(const Automaton& a, const DigitWord& u) {
  if (u.base != a.base) throw std::invalid_argument("base mismatch");
  Automaton b = a;
  b.initial = a.run(a.initial, u);
  return trim(b);
}

// ---- text format ----

inline std::string to_text(const Automaton& a) {
  std::ostringstream os;
  os << "base " << a.base << "\n";
  os << "states";
  for (auto& n : a.names) os << " " << n;
  os << "\n";
  os << "initial " << a.names[a.initial] << "\n";
  for (int s = 0; s < a.num_states(); ++s)
    for (int j = 0; j < a.base; ++j)
      os << "transition " << a.names[s] << " " << j << " " << a.names[a.delta[s][j]] << "\n";
  if (a.has_outputs())
    for (int s = 0; s < a.num_states(); ++s)
      os << "output " << a.names[s] << " " << a.outputs[s].str() << "\n";
  return os.str();
}

inline Automaton automaton_from_text(std::istream& in) {
  Automaton a;
  std::map<std::string, int> state_id;
  std::vector<std::vector<char>> have;
  std::vector<char> have_out;
  bool saw_base = false, saw_states = false, saw_initial = false, any_out = false;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error("automaton parse error (line " + std::to_string(lineno) + "): " + msg);
  };
  auto lookup = [&](const std::string& s) {
    auto it = state_id.find(s);
    if (it == state_id.end()) fail("unknown state '" + s + "'");
    return it->second;
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "base") {
      if (!(ls >> a.base) || a.base < 2 || a.base > kMaxBase) fail("bad base");
      saw_base = true;
    } else if (kw == "states") {
      if (!saw_base) fail("states before base");
      std::string s;
      while (ls >> s) {
        if (state_id.count(s)) fail("duplicate state '" + s + "'");
        state_id[s] = static_cast<int>(a.names.size());
        a.names.push_back(s);
      }
      if (a.names.empty()) fail("empty state list");
      a.delta.assign(a.names.size(), std::vector<int>(a.base, -1));
      have.assign(a.names.size(), std::vector<char>(a.base, 0));
      have_out.assign(a.names.size(), 0);
      a.outputs.assign(a.names.size(), Value());
      saw_states = true;
    } else if (kw == "initial") {
      if (!saw_states) fail("initial before states");
      std::string s;
      if (!(ls >> s)) fail("missing initial state");
      a.initial = lookup(s);
      saw_initial = true;
    } else if (kw == "transition") {
      if (!saw_states) fail("transition before states");
      std::string from, to;
      int d;
      if (!(ls >> from >> d >> to)) fail("malformed transition");
      if (d < 0 || d >= a.base) fail("digit out of range");
      int f = lookup(from), t = lookup(to);
      if (have[f][d]) fail("duplicate edge");
      have[f][d] = 1;
      a.delta[f][d] = t;
    } else if (kw == "output") {
      if (!saw_states) fail("output before states");
      std::string s, v;
      if (!(ls >> s >> v)) fail("malformed output");
      int t = lookup(s);
      if (have_out[t]) fail("duplicate output");
      have_out[t] = 1;
      a.outputs[t] = Value::parse(v);
      any_out = true;
    } else {
      fail("unknown keyword '" + kw + "'");
    }
  }
  if (!saw_base || !saw_states || !saw_initial) fail("missing base/states/initial");
  for (size_t s = 0; s < have.size(); ++s)
    for (int j = 0; j < a.base; ++j)
      if (!have[s][j]) fail("missing edge from '" + a.names[s] + "' on digit " + std::to_string(j));
  if (any_out) {
    for (size_t s = 0; s < have_out.size(); ++s)
      if (!have_out[s]) fail("missing output for state '" + a.names[s] + "'");
  } else {
    a.outputs.clear();
  }
  return a;
}

inline Automaton automaton_from_text(const std::string& text) {
  std::istringstream is(text);
  return automaton_from_text(is);
}

}  // namespace autogowers
