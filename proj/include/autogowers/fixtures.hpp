#pragma once

#include "autogowers/automaton.hpp"
#include "autogowers/factors.hpp"
#include "autogowers/gea.hpp"

namespace autogowers::fixtures {

/// 4-state automaton over Sigma_2 with outputs 4,1,1,2; a(26) = 2 through
/// the states s0,s1,s3,s3,s2,s3.
inline Automaton example_1_5() {
  Automaton a = Automaton::make(2, 4, 0);
  a.delta = {{0, 1}, {0, 3}, {3, 0}, {3, 2}};
  a.outputs = {Value::integer(4), Value::integer(1), Value::integer(1), Value::integer(2)};
  return a;
}

/// 2-state GEA over {+1,-1} producing the same sequence as example_1_5;
/// outputs tau(s_A, +)=4, tau(s_A, -)=2, tau(s_B, .)=1.
inline GEA example_1_5_gea() {
  PermGroup g(std::vector<Perm>{Perm(std::vector<int>{1, 0})});
  GEA t = GEA::make(2, 2, 0, g);
  int id = t.group.identity(), flip = 1 - id;
  t.delta = {{0, 1}, {0, 0}};
  t.label = {{id, id}, {id, flip}};
  t.outputs.assign(2, std::vector<Value>(2));
  t.outputs[0][id] = Value::integer(4);
  t.outputs[0][flip] = Value::integer(2);
  t.outputs[1][id] = Value::integer(1);
  t.outputs[1][flip] = Value::integer(1);
  t.names = {"sA", "sB"};
  return t;
}

/// 5-state automaton over Sigma_2 with outputs 1..5.
inline Automaton example_1_6() {
  Automaton a = Automaton::make(2, 5, 0);
  a.delta = {{0, 4}, {2, 3}, {1, 2}, {0, 0}, {2, 1}};
  for (int i = 0; i < 5; ++i) a.outputs.push_back(Value::integer(i + 1));
  return a;
}

/// 2-state GEA over Sym(3) producing the same sequence as example_1_6;
/// states are the tuples (s0,s1,s2) and (s3,s4,s2).
inline GEA example_1_6_gea() {
  PermGroup g(std::vector<Perm>{Perm(std::vector<int>{1, 0, 2}), Perm(std::vector<int>{0, 2, 1})});
  GEA t = GEA::make(2, 2, 0, g);
  int id = t.group.identity();
  int p12 = t.group.index_of(Perm(std::vector<int>{1, 0, 2}));  // (1 2)
  int p23 = t.group.index_of(Perm(std::vector<int>{0, 2, 1}));  // (2 3)
  t.delta = {{0, 1}, {0, 0}};
  t.label = {{p23, p12}, {p23, id}};
  // tau(s, g) = output of the first coordinate of g . tuple
  std::vector<std::vector<int>> tuples = {{0, 1, 2}, {3, 4, 2}};
  std::vector<int> out = {1, 2, 3, 4, 5};
  t.outputs.assign(2, std::vector<Value>(t.group.size()));
  for (int s = 0; s < 2; ++s)
    for (size_t ge = 0; ge < t.group.size(); ++ge) {
      const Perm& p = t.group.element(static_cast<int>(ge));
      t.outputs[s][ge] = Value::integer(out[tuples[s][p.inverse()(0)]]);
    }
  t.names = {"s012", "s342"};
  return t;
}

/// Thue-Morse, +-1 outputs (invertible automaton).
inline Automaton thue_morse() {
  Automaton a = Automaton::make(2, 2, 0);
  a.delta = {{0, 1}, {1, 0}};
  a.outputs = {Value::integer(1), Value::integer(-1)};
  return a;
}

/// Thue-Morse with 0/1 outputs (digit-sum parity).
inline Automaton thue_morse01() {
  Automaton a = thue_morse();
  a.outputs = {Value::integer(0), Value::integer(1)};
  return a;
}

/// Rudin-Shapiro: 4 states s_{ab} tracking (parity of 11-count, last digit).
inline Automaton rudin_shapiro() {
  Automaton a = Automaton::make(2, 4, 0);
  a.delta = {{0, 1}, {0, 3}, {2, 3}, {2, 1}};
  a.outputs = {Value::integer(1), Value::integer(1), Value::integer(-1), Value::integer(-1)};
  a.names = {"s00", "s01", "s10", "s11"};
  return a;
}

/// The classic 2-state Rudin-Shapiro GEA with tau(s,g) = g.
inline GEA rudin_shapiro_gea() {
  PermGroup g(std::vector<Perm>{Perm(std::vector<int>{1, 0})});
  GEA t = GEA::make(2, 2, 0, g);
  int id = t.group.identity(), flip = 1 - id;
  t.delta = {{0, 1}, {0, 1}};
  t.label = {{id, id}, {id, flip}};
  t.outputs.assign(2, std::vector<Value>(2));
  t.outputs[0][id] = t.outputs[1][id] = Value::integer(1);
  t.outputs[0][flip] = t.outputs[1][flip] = Value::integer(-1);
  return t;
}

inline GEA zm_gea(int k, int m) { return make_Zm(k, m); }

/// The strong-synchronisation example: base 3, states s0,s1,s2, labels
/// g = (1 2) and h = (1 3) in Sym(3) on the 1-loops at s1 and s2.
inline GEA str_sync_example() {
  Perm g12(std::vector<int>{1, 0, 2}), g13(std::vector<int>{2, 1, 0});
  PermGroup g(std::vector<Perm>{g12, g13});
  GEA t = GEA::make(3, 3, 0, g);
  int id = t.group.identity();
  int pg = t.group.index_of(g12), ph = t.group.index_of(g13);
  // s0: 0->s0, 1->s1, 2->s2 (all id)
  t.delta[0] = {0, 1, 2};
  t.label[0] = {id, id, id};
  // s1: 0->s0/id, 1->s1/g, 2->s2/id
  t.delta[1] = {0, 1, 2};
  t.label[1] = {id, pg, id};
  // s2: 0->s0/id, 1->s2/h, 2->s1/id
  t.delta[2] = {0, 2, 1};
  t.label[2] = {id, ph, id};
  return t;
}

/// length_k(n) mod l automaton (default k=2, l=2): backwards synchronising
/// only after a base change.
inline Automaton length_mod(int k, int l) {
  // state 0: no digits yet; state 1+r: current length = r mod l
  Automaton a = Automaton::make(k, l + 1, 0);
  a.outputs.resize(l + 1);
  for (int j = 0; j < k; ++j) a.delta[0][j] = (j == 0) ? 0 : 1 + (1 % l);
  for (int r = 0; r < l; ++r)
    for (int j = 0; j < k; ++j) a.delta[1 + r][j] = 1 + ((r + 1) % l);
  a.outputs[0] = Value::integer(0);
  for (int r = 0; r < l; ++r) a.outputs[1 + r] = Value::integer(r);
  return a;
}

/// Non-strongly-connected example: a transient initial component feeding
/// Thue-Morse through the digit 1.
inline Automaton transient_tm() {
  Automaton a = Automaton::make(2, 3, 0);
  // s0 -0-> s0, s0 -1-> tm0 ; tm states shifted by 1
  a.delta = {{0, 1}, {1, 2}, {2, 1}};
  a.outputs = {Value::integer(7), Value::integer(1), Value::integer(-1)};
  return a;
}

}  // namespace autogowers::fixtures
