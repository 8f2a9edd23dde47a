#pragma once

#include <algorithm>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "autogowers/perm.hpp"
#include "autogowers/value.hpp"

namespace autogowers {

constexpr size_t kGroupCap = 100000;

/// Finite permutation group with the element list materialised.
/// Elements are addressed by dense index; index 0 is the identity.
class PermGroup {
 public:
  PermGroup() { init({}, 1); }
  explicit PermGroup(int degree) { init({}, degree); }
  explicit PermGroup(std::vector<Perm> generators) {
    if (generators.empty()) throw std::invalid_argument("need a degree or generators");
    init(std::move(generators), -1);
  }

  int degree() const { return degree_; }
  size_t size() const { return elements_.size(); }
  const Perm& element(int i) const { return elements_[i]; }
  const std::vector<Perm>& elements() const { return elements_; }
  const std::vector<int>& generator_ids() const { return generator_ids_; }
  int identity() const { return 0; }

  int index_of(const Perm& p) const {
    auto it = index_.find(p);
    if (it == index_.end()) throw std::invalid_argument("element not in group");
    return it->second;
  }
  bool contains(const Perm& p) const { return index_.count(p) != 0; }

  int mul(int a, int b) const {
    if (!mul_table_.empty()) return mul_table_[static_cast<size_t>(a) * size() + b];
    return index_.at(elements_[a] * elements_[b]);
  }
  int inv(int a) const { return inverse_[a]; }

  int order_of(int a) const {
    int x = a, n = 1;
    while (x != 0) {
      x = mul(x, a);
      ++n;
    }
    return n;
  }

 private:
  void init(std::vector<Perm> gens, int degree) {
    if (degree < 0) degree = gens.front().degree();
    degree_ = degree;
    for (auto& g : gens)
      if (g.degree() != degree_) throw std::invalid_argument("generator degree mismatch");
    elements_.push_back(Perm(degree_));
    index_[elements_[0]] = 0;
    std::deque<int> q{0};
    while (!q.empty()) {
      int a = q.front();
      q.pop_front();
      for (auto& g : gens) {
        Perm b = elements_[a] * g;
        if (!index_.count(b)) {
          if (elements_.size() >= kGroupCap) throw std::runtime_error("group size cap exceeded");
          int id = static_cast<int>(elements_.size());
          index_[b] = id;
          elements_.push_back(std::move(b));
          q.push_back(id);
        }
      }
    }
    std::sort(elements_.begin() + 1, elements_.end());
    index_.clear();
    for (size_t i = 0; i < elements_.size(); ++i) index_[elements_[i]] = static_cast<int>(i);
    for (auto& g : gens) generator_ids_.push_back(index_[g]);
    inverse_.resize(elements_.size());
    for (size_t i = 0; i < elements_.size(); ++i) inverse_[i] = index_.at(elements_[i].inverse());
    if (elements_.size() <= 4096) {
      mul_table_.resize(elements_.size() * elements_.size());
      for (size_t a = 0; a < elements_.size(); ++a)
        for (size_t b = 0; b < elements_.size(); ++b)
          mul_table_[a * elements_.size() + b] = index_.at(elements_[a] * elements_[b]);
    }
  }

  int degree_ = 1;
  std::vector<Perm> elements_;
  std::vector<int> generator_ids_;
  std::vector<int> inverse_;
  std::vector<int> mul_table_;
  std::unordered_map<Perm, int, PermHash> index_;
};

inline PermGroup closure(std::vector<Perm> generators) { return PermGroup(std::move(generators)); }

/// Subgroup as a sorted element-id list plus membership mask.
struct Subgroup {
  std::vector<int> elems;
  std::vector<char> mask;

  static Subgroup from_elements(const PermGroup& g, std::vector<int> ids) {
    Subgroup h;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    h.elems = std::move(ids);
    h.mask.assign(g.size(), 0);
    for (int e : h.elems) h.mask[e] = 1;
    return h;
  }
  size_t size() const { return elems.size(); }
  bool contains(int id) const { return mask[id] != 0; }
};

/// Smallest subgroup containing the given element ids.
inline Subgroup subgroup_closure(const PermGroup& g, const std::vector<int>& seed) {
  std::vector<char> in(g.size(), 0);
  std::deque<int> q;
  auto add = [&](int x) {
    if (!in[x]) {
      in[x] = 1;
      q.push_back(x);
    }
  };
  add(g.identity());
  for (int s : seed) add(s);
  std::vector<int> members;
  while (!q.empty()) {
    int a = q.front();
    q.pop_front();
    members.push_back(a);
    add(g.inv(a));
    for (int b = 0; b < static_cast<int>(g.size()); ++b)
      if (in[b]) {
        add(g.mul(a, b));
        add(g.mul(b, a));
      }
  }
  return Subgroup::from_elements(g, members);
}

/// Smallest normal subgroup of g containing the seed elements.
inline Subgroup normal_closure(const PermGroup& g, const std::vector<int>& seed) {
  std::vector<int> gen = seed;
  while (true) {
    std::vector<int> conj = gen;
    for (int x : gen)
      for (int a = 0; a < static_cast<int>(g.size()); ++a)
        conj.push_back(g.mul(g.mul(a, x), g.inv(a)));
    Subgroup h = subgroup_closure(g, conj);
    bool normal = true;
    for (int x : h.elems) {
      for (int a = 0; a < static_cast<int>(g.size()) && normal; ++a)
        if (!h.contains(g.mul(g.mul(a, x), g.inv(a)))) normal = false;
      if (!normal) break;
    }
    if (normal) return h;
    gen = h.elems;
  }
}

inline bool is_normal(const PermGroup& g, const Subgroup& h) {
  for (int x : h.elems)
    for (int a = 0; a < static_cast<int>(g.size()); ++a)
      if (!h.contains(g.mul(g.mul(a, x), g.inv(a)))) return false;
  return true;
}

/// Group homomorphism recorded on every element of the domain.
struct GroupHom {
  const PermGroup* domain = nullptr;
  const PermGroup* codomain = nullptr;
  std::vector<int> image;  // domain element id -> codomain element id

  int operator()(int a) const { return image[a]; }

  bool check() const {
    for (size_t a = 0; a < domain->size(); ++a)
      for (size_t b = 0; b < domain->size(); ++b)
        if (codomain->mul(image[a], image[b]) !=
            image[domain->mul(static_cast<int>(a), static_cast<int>(b))])
          return false;
    return true;
  }

  std::vector<int> kernel() const {
    std::vector<int> k;
    for (size_t a = 0; a < domain->size(); ++a)
      if (image[a] == codomain->identity()) k.push_back(static_cast<int>(a));
    return k;
  }
};

struct Quotient {
  PermGroup group;          // acts on the coset table
  std::vector<int> proj;    // element id of G -> element id of G/H
};

/// G/H realised by the left-multiplication action on left cosets gH;
/// projection is a surjective homomorphism with kernel H.
inline Quotient quotient(const PermGroup& g, const Subgroup& h) {
  if (!is_normal(g, h)) throw std::invalid_argument("subgroup is not normal");
  int n = static_cast<int>(g.size());
  std::vector<int> coset_of(n, -1);
  std::vector<int> reps;
  for (int a = 0; a < n; ++a) {
    if (coset_of[a] != -1) continue;
    int c = static_cast<int>(reps.size());
    reps.push_back(a);
    for (int x : h.elems) coset_of[g.mul(a, x)] = c;
  }
  int m = static_cast<int>(reps.size());
  // permutation action of each element on cosets
  auto act = [&](int a) {
    std::vector<int> img(m);
    for (int c = 0; c < m; ++c) img[c] = coset_of[g.mul(a, reps[c])];
    return Perm(img);
  };
  std::vector<Perm> gens;
  for (int a = 0; a < n; ++a) gens.push_back(act(a));
  Quotient q{PermGroup(gens), {}};
  q.proj.resize(n);
  for (int a = 0; a < n; ++a) q.proj[a] = q.group.index_of(act(a));
  return q;
}

/// Lower central series G = G_1 >= G_2 >= ..., with the stabilised tail last.
inline std::vector<Subgroup> lower_central_series(const PermGroup& g) {
  std::vector<int> all(g.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<Subgroup> chain{Subgroup::from_elements(g, all)};
  while (true) {
    const Subgroup& gi = chain.back();
    std::vector<int> comms;
    for (int x : gi.elems)
      for (int y = 0; y < static_cast<int>(g.size()); ++y)
        comms.push_back(g.mul(g.mul(x, y), g.mul(g.inv(x), g.inv(y))));
    Subgroup next = normal_closure(g, comms);
    if (next.elems == chain.back().elems) break;
    chain.push_back(std::move(next));
    if (chain.size() > g.size() + 2) throw std::logic_error("lower central series runaway");
  }
  return chain;
}

/// mean over h in G0 of tau(s, g*h); constant on the cosets g G0.
/// tau is any callable (state, element id) -> Value.
template <typename F>
std::vector<std::vector<Value>> coset_average(const PermGroup& g, const Subgroup& g0, int n_states,
                                              F&& tau) {
  std::vector<std::vector<Value>> out(n_states, std::vector<Value>(g.size()));
  for (int s = 0; s < n_states; ++s)
    for (int a = 0; a < static_cast<int>(g.size()); ++a) {
      Value sum;
      bool first = true;
      for (int h : g0.elems) {
        Value v = tau(s, g.mul(a, h));
        sum = first ? v : sum + v;
        first = false;
      }
      if (sum.kind == Value::Kind::Cplx)
        out[s][a] = Value::complex(sum.to_complex() / static_cast<double>(g0.size()));
      else
        out[s][a] = Value::rational(sum.q / BigRat(static_cast<int>(g0.size())));
    }
  return out;
}

}  // namespace autogowers
