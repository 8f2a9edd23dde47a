#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "autogowers/automaton.hpp"
#include "autogowers/group.hpp"

namespace autogowers {

/// Group extension automaton: transitions carry labels in a finite
/// permutation group; outputs (when present) depend on (state, label).
struct GEA {
  int base = 2;
  int initial = 0;
  std::vector<std::vector<int>> delta;            // [state][digit] -> state
  std::vector<std::vector<int>> label;            // [state][digit] -> group element id
  PermGroup group;
  std::vector<std::vector<Value>> outputs;        // [state][element id]; empty when absent
  std::vector<std::string> names;

  int num_states() const { return static_cast<int>(delta.size()); }
  bool has_outputs() const { return !outputs.empty(); }

  static GEA make(int k, int n, int s0, PermGroup g) {
    GEA t;
    t.base = k;
    t.initial = s0;
    t.delta.assign(n, std::vector<int>(k, 0));
    t.label.assign(n, std::vector<int>(k, g.identity()));
    t.group = std::move(g);
    t.names.resize(n);
    for (int i = 0; i < n; ++i) t.names[i] = "s" + std::to_string(i);
    return t;
  }

  std::pair<int, int> run(int s, int g, const std::vector<int>& digits) const {
    for (int d : digits) {
      g = group.mul(g, label[s][d]);
      s = delta[s][d];
    }
    return {s, g};
  }
  std::pair<int, int> run(int s, int g, const DigitWord& w) const { return run(s, g, w.digits); }

  /// a_T(n) = tau(delta(s0,(n)_k), lambda(s0,(n)_k))
  Value eval(BigInt n) const {
    if (!has_outputs()) throw std::logic_error("gea has no output table");
    auto [s, g] = run(initial, group.identity(), expand(std::move(n), base));
    return outputs[s][g];
  }
  Value eval(std::uint64_t n) const { return eval(BigInt(n)); }

  bool is_prolongable() const {
    return delta[initial][0] == initial && label[initial][0] == group.identity();
  }
  bool is_idempotent() const {
    if (!is_prolongable()) return false;
    for (int s = 0; s < num_states(); ++s) {
      int s1 = delta[s][0];
      if (delta[s1][0] != s1) return false;
      if (group.mul(label[s][0], label[s1][0]) != label[s][0]) return false;
    }
    return true;
  }
  bool labels_zero_identity() const {
    for (int s = 0; s < num_states(); ++s)
      if (label[s][0] != group.identity()) return false;
    return true;
  }

  Automaton underlying() const {
    Automaton a = Automaton::make(base, num_states(), initial);
    a.delta = delta;
    a.names = names;
    return a;
  }

  /// Word synchronising the GEA to (initial, id), if any: delta(s,w) = s0 and
  /// lambda(s,w) = id for every s.
  std::optional<DigitWord> find_gea_sync_word() const {
    // BFS over vectors of (state,label) pairs, one per start state
    int n = num_states();
    using Config = std::vector<std::pair<int, int>>;
    Config start(n);
    for (int s = 0; s < n; ++s) start[s] = {s, group.identity()};
    std::map<Config, std::pair<int, int>> par;  // config -> (parent index, digit)
    std::vector<Config> order{start};
    par[start] = {-1, -1};
    for (size_t i = 0; i < order.size(); ++i) {
      bool done = true;
      for (auto& [s, g] : order[i])
        if (s != initial || g != group.identity()) done = false;
      if (done && i > 0) {
        std::vector<int> w;
        int cur = static_cast<int>(i);
        std::vector<int> rev;
        Config c = order[i];
        // reconstruct by replay: store parent chain instead
        // (we stored parent index and digit in `par`)
        auto it = par.find(order[i]);
        while (it->second.first != -1) {
          rev.push_back(it->second.second);
          it = par.find(order[it->second.first]);
        }
        std::reverse(rev.begin(), rev.end());
        (void)cur;
        (void)c;
        return DigitWord(base, std::move(rev));
      }
      if (done && i == 0) return DigitWord(base, {});
      if (order.size() > 2000000) break;
      for (int j = 0; j < base; ++j) {
        Config next(n);
        for (int s = 0; s < n; ++s) {
          auto [x, g] = order[i][s];
          next[s] = {delta[x][j], group.mul(g, label[x][j])};
        }
        if (!par.count(next)) {
          par[next] = {static_cast<int>(i), j};
          order.push_back(std::move(next));
        }
      }
    }
    return std::nullopt;
  }
};

/// The automaton A_T on S x G with delta'((s,g),j) = (delta(s,j), g lambda(s,j)).
inline Automaton product_automaton(const GEA& t) {
  if (!t.has_outputs()) throw std::logic_error("product automaton needs outputs");
  int n = t.num_states(), m = static_cast<int>(t.group.size());
  Automaton a = Automaton::make(t.base, n * m, t.initial * m + t.group.identity());
  a.outputs.resize(static_cast<size_t>(n) * m);
  for (int s = 0; s < n; ++s)
    for (int g = 0; g < m; ++g) {
      for (int j = 0; j < t.base; ++j)
        a.delta[s * m + g][j] = t.delta[s][j] * m + t.group.mul(g, t.label[s][j]);
      a.outputs[s * m + g] = t.outputs[s][g];
      a.names[s * m + g] = t.names[s] + "_" + t.group.element(g).cycles();
    }
  return trim(a);
}

/// Plain automaton viewed as a GEA with trivial group.
inline GEA gea_from_automaton(const Automaton& a) {
  GEA t = GEA::make(a.base, a.num_states(), a.initial, PermGroup(1));
  t.delta = a.delta;
  t.names = a.names;
  if (a.has_outputs()) {
    t.outputs.assign(a.num_states(), std::vector<Value>(1));
    for (int s = 0; s < a.num_states(); ++s) t.outputs[s][0] = a.outputs[s];
  }
  return t;
}

// ---- text format: automaton lines plus group/label/geaoutput ----

inline std::string to_text(const GEA& t) {
  std::ostringstream os;
  os << "base " << t.base << "\n";
  os << "states";
  for (auto& n : t.names) os << " " << n;
  os << "\n";
  os << "initial " << t.names[t.initial] << "\n";
  os << "group degree " << t.group.degree() << "\n";
  for (int s = 0; s < t.num_states(); ++s)
    for (int j = 0; j < t.base; ++j) {
      os << "transition " << t.names[s] << " " << j << " " << t.names[t.delta[s][j]] << "\n";
      os << "label " << t.names[s] << " " << j << " " << t.group.element(t.label[s][j]).cycles()
         << "\n";
    }
  if (t.has_outputs())
    for (int s = 0; s < t.num_states(); ++s)
      for (size_t g = 0; g < t.group.size(); ++g)
        os << "geaoutput " << t.names[s] << " " << t.group.element(static_cast<int>(g)).cycles()
           << " " << t.outputs[s][g].str() << "\n";
  return os.str();
}

inline GEA gea_from_text(std::istream& in) {
  int base = -1, degree = -1, initial = -1;
  std::vector<std::string> names;
  std::map<std::string, int> state_id;
  std::vector<std::tuple<int, int, int>> transitions;           // from, digit, to
  std::vector<std::tuple<int, int, Perm>> labels;               // from, digit, perm
  std::vector<std::tuple<int, Perm, Value>> outs;               // state, perm, value
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& m) {
    throw std::runtime_error("gea parse error (line " + std::to_string(lineno) + "): " + m);
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
      if (!(ls >> base) || base < 2) fail("bad base");
    } else if (kw == "states") {
      std::string s;
      while (ls >> s) {
        if (state_id.count(s)) fail("duplicate state");
        state_id[s] = static_cast<int>(names.size());
        names.push_back(s);
      }
    } else if (kw == "initial") {
      std::string s;
      ls >> s;
      initial = lookup(s);
    } else if (kw == "group") {
      std::string sub;
      ls >> sub;
      if (sub != "degree" || !(ls >> degree) || degree < 1) fail("bad group line");
    } else if (kw == "transition") {
      std::string f, to;
      int d;
      if (!(ls >> f >> d >> to)) fail("malformed transition");
      if (d < 0 || d >= base) fail("digit out of range");
      transitions.emplace_back(lookup(f), d, lookup(to));
    } else if (kw == "label") {
      if (degree < 0) fail("label before group degree");
      std::string f, rest;
      int d;
      if (!(ls >> f >> d)) fail("malformed label");
      std::getline(ls, rest);
      labels.emplace_back(lookup(f), d, Perm::from_cycles(rest, degree));
    } else if (kw == "geaoutput") {
      if (degree < 0) fail("geaoutput before group degree");
      std::string f, rest;
      if (!(ls >> f)) fail("malformed geaoutput");
      std::getline(ls, rest);
      // perm cycles then value literal, separated by spaces; value is last token
      auto pos = rest.find_last_of(" \t");
      if (pos == std::string::npos) fail("malformed geaoutput");
      std::string vs = rest.substr(pos + 1);
      outs.emplace_back(lookup(f), Perm::from_cycles(rest.substr(0, pos), degree),
                        Value::parse(vs));
    } else {
      fail("unknown keyword '" + kw + "'");
    }
  }
  if (base < 0 || names.empty() || initial < 0 || degree < 0) fail("missing header lines");
  std::vector<Perm> gens;
  for (auto& [f, d, p] : labels) gens.push_back(p);
  if (gens.empty()) gens.push_back(Perm(degree));
  for (auto& [s, p, v] : outs) gens.push_back(p);
  GEA t = GEA::make(base, static_cast<int>(names.size()), initial, PermGroup(gens));
  t.names = names;
  std::vector<std::vector<char>> have(names.size(), std::vector<char>(base, 0)),
      havel(names.size(), std::vector<char>(base, 0));
  for (auto& [f, d, to] : transitions) {
    if (have[f][d]) fail("duplicate edge");
    have[f][d] = 1;
    t.delta[f][d] = to;
  }
  for (auto& [f, d, p] : labels) {
    if (havel[f][d]) fail("duplicate label");
    havel[f][d] = 1;
    t.label[f][d] = t.group.index_of(p);
  }
  for (size_t s = 0; s < names.size(); ++s)
    for (int j = 0; j < base; ++j)
      if (!have[s][j] || !havel[s][j]) fail("missing edge or label for '" + names[s] + "'");
  if (!outs.empty()) {
    t.outputs.assign(names.size(), std::vector<Value>(t.group.size()));
    std::vector<std::vector<char>> haveo(names.size(), std::vector<char>(t.group.size(), 0));
    for (auto& [s, p, v] : outs) {
      int g = t.group.index_of(p);
      if (haveo[s][g]) fail("duplicate geaoutput");
      haveo[s][g] = 1;
      t.outputs[s][g] = v;
    }
    for (size_t s = 0; s < names.size(); ++s)
      for (size_t g = 0; g < t.group.size(); ++g)
        if (!haveo[s][g]) fail("missing geaoutput for state '" + names[s] + "'");
  }
  return t;
}

inline GEA gea_from_text(const std::string& text) {
  std::istringstream is(text);
  return gea_from_text(is);
}

}  // namespace autogowers
