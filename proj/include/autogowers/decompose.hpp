#pragma once

#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "autogowers/efficient.hpp"
#include "autogowers/factors.hpp"
#include "autogowers/transfer.hpp"

namespace autogowers {

/// Weakly structured evaluator: a_str(n) = F(n mod M, a_fs(n), a_bs(n)).
/// The fs/bs automata output small integer codes; F is a dense table.
struct StructuredPart {
  std::uint64_t period = 1;               // M, coprime to the base
  std::vector<Value> periodic_table;      // r -> value of the periodic component
  Automaton fs;                           // forward synchronising component
  Automaton bs;                           // backward synchronising component
  // combiner[r][fs_code][bs_code]
  std::vector<std::vector<std::vector<Value>>> combiner;

  Value eval(BigInt n) const {
    std::uint64_t r = static_cast<std::uint64_t>(n % period);
    auto fs_code = static_cast<std::uint64_t>(fs.eval(n).to_rational());
    auto bs_code = static_cast<std::uint64_t>(bs.eval(std::move(n)).to_rational());
    return combiner[r][fs_code][bs_code];
  }
};

struct Decomposition {
  int base = 2;              // base of the certificate (a power of the input base)
  Automaton original;        // idempotent automaton in that base
  Automaton a_str;           // structured-part evaluator
  Automaton a_uni;           // uniform-part evaluator (a - a_str)
  StructuredPart str;
  bool strongly_connected_case = false;
  std::vector<std::uint64_t> dprimes;  // d' per component (single entry in the sc case)
  std::vector<DecayFit> fits;          // per requested d
  DigitWord word_y, word_z;            // general case: the y/z words of the construction
  double z_density = 0;                // measured density of the no-absorption set
};

namespace detail {

struct ComponentData {
  GEA gea;                                 // efficient GEA of the component
  EfficiencyCertificate cert;
  std::vector<std::vector<Value>> tau_str; // coset-averaged outputs
  std::vector<int> g0_powers;              // g0^r for r < d'
};

inline ComponentData component_pipeline(const Automaton& a) {
  ComponentData c;
  auto [gea, cert] = build_efficient_gea(a);
  c.gea = std::move(gea);
  c.cert = std::move(cert);
  Subgroup g0 = Subgroup::from_elements(c.gea.group, c.cert.g0_elements);
  c.tau_str = coset_average(c.gea.group, g0, c.gea.num_states(),
                            [&](int s, int g) { return c.gea.outputs[s][g]; });
  c.g0_powers.resize(c.cert.dprime);
  c.g0_powers[0] = c.gea.group.identity();
  for (std::uint64_t r = 1; r < c.cert.dprime; ++r)
    c.g0_powers[r] = c.gea.group.mul(c.g0_powers[r - 1], c.cert.g0);
  return c;
}

}  // namespace detail

/// Strongly connected, prolongable case: the structured part is
/// F(n mod d', fs(n)) with fs the synchronising state sequence of the
/// efficient GEA, computed by coset averaging of the output over G0.
inline Decomposition decompose_strongly_connected(const Automaton& a0,
                                                  const std::vector<int>& d_list = {},
                                                  int fit_lo = 8, int fit_hi = 16) {
  Automaton a1 = trim(a0);
  if (!a1.is_prolongable())
    throw std::invalid_argument("strongly connected decomposition needs a prolongable automaton");
  if (!is_strongly_connected(a1))
    throw std::invalid_argument("automaton is not strongly connected");
  Automaton a = make_idempotent(a1);
  a = trim(a);
  if (!is_strongly_connected(a))
    throw std::logic_error("base change broke strong connectivity");

  Decomposition dec;
  dec.base = a.base;
  dec.original = a;
  dec.strongly_connected_case = true;

  detail::ComponentData c = detail::component_pipeline(a);
  dec.dprimes = {c.cert.dprime};

  GEA str_gea = c.gea;
  str_gea.outputs = c.tau_str;
  GEA uni_gea = c.gea;
  for (int s = 0; s < c.gea.num_states(); ++s)
    for (size_t g = 0; g < c.gea.group.size(); ++g)
      uni_gea.outputs[s][g] = c.gea.outputs[s][g] - c.tau_str[s][g];
  dec.a_str = trim_minimize(product_automaton(str_gea));
  dec.a_uni = trim_minimize(product_automaton(uni_gea));

  // weakly structured data (strong structure: trivial bs component)
  dec.str.period = c.cert.dprime;
  for (std::uint64_t r = 0; r < dec.str.period; ++r)
    dec.str.periodic_table.push_back(Value::integer(BigInt(r)));
  dec.str.fs = c.gea.underlying();
  dec.str.fs.outputs.resize(c.gea.num_states());
  for (int s = 0; s < c.gea.num_states(); ++s) dec.str.fs.outputs[s] = Value::integer(s);
  dec.str.bs = Automaton::make(a.base, 1, 0);
  for (int j = 0; j < a.base; ++j) dec.str.bs.delta[0][j] = 0;
  dec.str.bs.outputs = {Value::integer(0)};
  dec.str.combiner.assign(
      dec.str.period,
      std::vector<std::vector<Value>>(c.gea.num_states(), std::vector<Value>(1)));
  for (std::uint64_t r = 0; r < dec.str.period; ++r)
    for (int s = 0; s < c.gea.num_states(); ++s)
      dec.str.combiner[r][s][0] = c.tau_str[s][c.g0_powers[r]];

  for (int d : d_list) {
    auto norms = gowers_norm_dp_range(dec.a_uni, d, fit_lo, fit_hi);
    std::vector<std::pair<int, double>> pts;
    int l = fit_lo;
    for (auto& r : norms) pts.push_back({l++, r.value});
    dec.fits.push_back(decay_fit(pts, a.base, d));
  }
  return dec;
}

/// General case: per-component decompositions stitched along the first
/// absorption into (S0, residue 0 mod M); a_str(n) = 0 on the set Z of n
/// whose expansion never absorbs.
inline Decomposition decompose_general(const Automaton& a0, const std::vector<int>& d_list = {},
                                       int fit_lo = 8, int fit_hi = 16,
                                       std::uint64_t z_probe = 1 << 16) {
  Automaton a = make_idempotent(trim(a0));
  a = trim(a);
  int k = a.base;

  Decomposition dec;
  dec.base = k;
  dec.original = a;

  SccResult scc = scc_decompose(a);
  std::vector<int> s0_states;  // states in closed components fixed by digit 0
  for (int s = 0; s < a.num_states(); ++s)
    if (scc.closed[scc.component[s]] && a.delta[s][0] == s) s0_states.push_back(s);
  if (s0_states.empty()) throw std::logic_error("no absorbing states (idempotence violated)");

  // per-component pipelines, on the induced closed sub-automata
  std::vector<detail::ComponentData> comp(s0_states.size());
  std::vector<std::vector<int>> comp_state_map(s0_states.size());  // global -> local
  for (size_t i = 0; i < s0_states.size(); ++i) {
    int root = s0_states[i];
    const auto& members = scc.members[scc.component[root]];
    std::vector<int> local(a.num_states(), -1);
    for (size_t j = 0; j < members.size(); ++j) local[members[j]] = static_cast<int>(j);
    Automaton sub = Automaton::make(k, static_cast<int>(members.size()), local[root]);
    sub.outputs.resize(members.size());
    for (size_t j = 0; j < members.size(); ++j) {
      for (int dg = 0; dg < k; ++dg) {
        int tgt = a.delta[members[j]][dg];
        if (local[tgt] < 0) throw std::logic_error("closed component has an escaping edge");
        sub.delta[j][dg] = local[tgt];
      }
      sub.outputs[j] = a.outputs[members[j]];
      sub.names[j] = a.names[members[j]];
    }
    comp[i] = detail::component_pipeline(sub);
    comp_state_map[i] = local;
    dec.dprimes.push_back(comp[i].cert.dprime);
  }

  std::uint64_t m = 1;
  for (auto d : dec.dprimes) m = std::lcm(m, d);
  if (std::gcd(m, static_cast<std::uint64_t>(k)) != 1)
    throw std::logic_error("period M not coprime to the base");
  dec.str.period = m;

  // the words y = y0 (0^{A-1} 1)^B and z = concatenated sync words (reported)
  {
    DigitWord y = killing_word(a);
    std::uint64_t ka = 1;
    int A = 0;
    do {
      ka = ka * k % m;
      ++A;
    } while (ka != 1 % m);
    if (m > 1) {
      for (std::uint64_t b = 0; b < m - 1; ++b) {  // B = M-1 repetitions
        for (int i = 0; i + 1 < A; ++i) y.digits.push_back(0);
        y.digits.push_back(1);
      }
    }
    dec.word_y = y;
    DigitWord z(k, {});
    for (auto& c : comp) z = z.concat(c.cert.sync_word);
    dec.word_z = z;
  }

  // absorption product automaton:
  // (live state, live residue mod M, absorb in {0..|S0|}, tracker states)
  int nc = static_cast<int>(comp.size());
  struct Key {
    int live;
    std::uint64_t res;
    int absorb;
    std::vector<int> track;
    bool operator<(const Key& o) const {
      return std::tie(live, res, absorb, track) < std::tie(o.live, o.res, o.absorb, o.track);
    }
  };
  std::map<Key, int> idx;
  std::vector<Key> states;
  auto intern = [&](const Key& key) {
    auto it = idx.find(key);
    if (it != idx.end()) return it->second;
    int id = static_cast<int>(states.size());
    idx.emplace(key, id);
    states.push_back(key);
    return id;
  };
  std::vector<int> s0_index(a.num_states(), -1);
  for (size_t i = 0; i < s0_states.size(); ++i) s0_index[s0_states[i]] = static_cast<int>(i);
  Key init;
  init.live = a.initial;
  init.res = 0;
  init.absorb = (s0_index[a.initial] >= 0) ? s0_index[a.initial] + 1 : 0;
  for (int i = 0; i < nc; ++i) init.track.push_back(comp[i].gea.initial);
  intern(init);
  std::vector<std::vector<int>> delta;
  for (size_t cur = 0; cur < states.size(); ++cur) {
    delta.emplace_back(k);
    for (int dg = 0; dg < k; ++dg) {
      Key nx = states[cur];
      nx.live = a.delta[states[cur].live][dg];
      nx.res = (states[cur].res * k + dg) % m;
      for (int i = 0; i < nc; ++i)
        nx.track[i] = comp[i].gea.delta[states[cur].track[i]][dg];
      if (nx.absorb == 0 && nx.res == 0 && s0_index[nx.live] >= 0)
        nx.absorb = s0_index[nx.live] + 1;
      delta[cur][dg] = intern(nx);
    }
  }
  auto str_value = [&](const Key& key) {
    if (key.absorb == 0) return Value::integer(0);
    const auto& c = comp[key.absorb - 1];
    std::uint64_t r = key.res % c.cert.dprime;
    int shat = key.track[key.absorb - 1];
    return c.tau_str[shat][c.g0_powers[r]];
  };
  dec.a_str = Automaton::make(k, static_cast<int>(states.size()), 0);
  dec.a_str.delta = delta;
  dec.a_uni = dec.a_str;
  dec.a_str.outputs.resize(states.size());
  dec.a_uni.outputs.resize(states.size());
  for (size_t i = 0; i < states.size(); ++i) {
    Value sv = str_value(states[i]);
    dec.a_str.outputs[i] = sv;
    dec.a_uni.outputs[i] = a.outputs[states[i].live] - sv;
  }
  dec.a_str = trim_minimize(dec.a_str);
  dec.a_uni = trim_minimize(dec.a_uni);

  // weakly structured components:
  // fs = product of the per-component tracker automata
  {
    std::map<std::vector<int>, int> fid;
    std::vector<std::vector<int>> fstates;
    std::vector<int> finit;
    for (int i = 0; i < nc; ++i) finit.push_back(comp[i].gea.initial);
    fid[finit] = 0;
    fstates.push_back(finit);
    std::vector<std::vector<int>> fdelta;
    for (size_t cur = 0; cur < fstates.size(); ++cur) {
      fdelta.emplace_back(k);
      for (int dg = 0; dg < k; ++dg) {
        std::vector<int> nx(nc);
        for (int i = 0; i < nc; ++i) nx[i] = comp[i].gea.delta[fstates[cur][i]][dg];
        auto it = fid.find(nx);
        if (it == fid.end()) {
          it = fid.emplace(nx, fstates.size()).first;
          fstates.push_back(nx);
        }
        fdelta[cur][dg] = it->second;
      }
    }
    dec.str.fs = Automaton::make(k, static_cast<int>(fstates.size()), 0);
    dec.str.fs.delta = fdelta;
    dec.str.fs.outputs.resize(fstates.size());
    for (size_t i = 0; i < fstates.size(); ++i)
      dec.str.fs.outputs[i] = Value::integer(static_cast<int>(i));
    // bs = absorption component (live state, residue, absorb), output absorb
    std::map<std::tuple<int, std::uint64_t, int>, int> bid;
    std::vector<std::tuple<int, std::uint64_t, int>> bstates;
    std::tuple<int, std::uint64_t, int> b0{a.initial, 0, init.absorb};
    bid[b0] = 0;
    bstates.push_back(b0);
    std::vector<std::vector<int>> bdelta;
    for (size_t cur = 0; cur < bstates.size(); ++cur) {
      bdelta.emplace_back(k);
      for (int dg = 0; dg < k; ++dg) {
        auto [live, res, absorb] = bstates[cur];
        int nlive = a.delta[live][dg];
        std::uint64_t nres = (res * k + dg) % m;
        int nabs = absorb;
        if (nabs == 0 && nres == 0 && s0_index[nlive] >= 0) nabs = s0_index[nlive] + 1;
        std::tuple<int, std::uint64_t, int> nx{nlive, nres, nabs};
        auto it = bid.find(nx);
        if (it == bid.end()) {
          it = bid.emplace(nx, bstates.size()).first;
          bstates.push_back(nx);
        }
        bdelta[cur][dg] = it->second;
      }
    }
    dec.str.bs = Automaton::make(k, static_cast<int>(bstates.size()), 0);
    dec.str.bs.delta = bdelta;
    dec.str.bs.outputs.resize(bstates.size());
    for (size_t i = 0; i < bstates.size(); ++i)
      dec.str.bs.outputs[i] = Value::integer(std::get<2>(bstates[i]));
    // combiner F(r, fs_code, bs_code)
    dec.str.periodic_table.clear();
    for (std::uint64_t r = 0; r < m; ++r) dec.str.periodic_table.push_back(Value::integer(BigInt(r)));
    dec.str.combiner.assign(
        m, std::vector<std::vector<Value>>(fstates.size(), std::vector<Value>(nc + 1)));
    for (std::uint64_t r = 0; r < m; ++r)
      for (size_t fs2 = 0; fs2 < fstates.size(); ++fs2) {
        dec.str.combiner[r][fs2][0] = Value::integer(0);
        for (int t = 1; t <= nc; ++t) {
          const auto& c = comp[t - 1];
          dec.str.combiner[r][fs2][t] =
              c.tau_str[fstates[fs2][t - 1]][c.g0_powers[r % c.cert.dprime]];
        }
      }
  }

  // measured density of the no-absorption set Z
  {
    std::uint64_t bad = 0;
    for (std::uint64_t n = 0; n < z_probe; ++n)
      if (dec.str.bs.eval(BigInt(n)).to_rational() == 0) ++bad;
    dec.z_density = static_cast<double>(bad) / static_cast<double>(z_probe);
  }

  for (int d : d_list) {
    auto norms = gowers_norm_dp_range(dec.a_uni, d, fit_lo, fit_hi);
    std::vector<std::pair<int, double>> pts;
    int l = fit_lo;
    for (auto& r : norms) pts.push_back({l++, r.value});
    dec.fits.push_back(decay_fit(pts, k, d));
  }
  return dec;
}

struct OrthogonalityReport {
  double corr_small = 0, corr_large = 0;
  bool orthogonal = false;
  double support_density_small = 0, support_density_large = 0;
  double support_exponent = 0;  // fitted c in |supp| ~ N^{1-c}
};

/// Correlation with periodic sequences at two scales; when it decays, the
/// structured part's support density must itself decay (uniqueness lemma).
/// The default threshold is generous because correlations of genuinely
/// orthogonal sequences can decay slowly (e.g. the Thue-Morse bias on
/// multiples of 3 shrinks only like N^{-0.2}).
inline OrthogonalityReport orthogonality_test(const Automaton& a, int p_max, std::uint64_t n,
                                              double threshold = 0.5) {
  OrthogonalityReport rep;
  std::uint64_t n_small = std::max<std::uint64_t>(n / 16, 16);
  std::vector<Complex> f_small, f_large;
  for (std::uint64_t i = 0; i < n; ++i) {
    Complex v = a.eval(BigInt(i)).to_complex();
    if (i < n_small) f_small.push_back(v);
    f_large.push_back(v);
  }
  rep.corr_small = periodic_correlation(f_small, p_max).max_corr;
  rep.corr_large = periodic_correlation(f_large, p_max).max_corr;
  rep.orthogonal = rep.corr_large <= threshold && rep.corr_large <= rep.corr_small + 1e-12;
  Decomposition dec = decompose_general(a);
  std::uint64_t s_small = 0, s_large = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    Value v = dec.a_str.eval(BigInt(i));
    bool nz = v.is_exact() ? v.q != 0 : std::abs(v.z) > 1e-12;
    if (i < n_small) s_small += nz;
    s_large += nz;
  }
  rep.support_density_small = static_cast<double>(s_small) / n_small;
  rep.support_density_large = static_cast<double>(s_large) / n;
  if (s_small > 0 && s_large > 0)
    rep.support_exponent = 1.0 - std::log(static_cast<double>(s_large) / s_small) /
                                     std::log(static_cast<double>(n) / n_small);
  else
    rep.support_exponent = 1.0;
  return rep;
}

struct UniquenessReport {
  double density_small = 0, density_large = 0;
  double exponent = 0;  // fitted c with disagreement ~ N^{1-c}
};

/// Density of {n < N : a_str != a'_str} at two scales, with the fitted
/// exponent; the inputs must decompose the same sequence.
inline UniquenessReport uniqueness_density(const Decomposition& d1, const Decomposition& d2,
                                           std::uint64_t n) {
  UniquenessReport rep;
  std::uint64_t n_small = std::max<std::uint64_t>(n / 16, 16);
  std::uint64_t c_small = 0, c_large = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    Value v1 = d1.original.eval(BigInt(i)), v2 = d2.original.eval(BigInt(i));
    if (!(v1 == v2)) throw std::invalid_argument("decompositions of different sequences");
    bool differ = !(d1.a_str.eval(BigInt(i)) == d2.a_str.eval(BigInt(i)));
    if (i < n_small) c_small += differ;
    c_large += differ;
  }
  rep.density_small = static_cast<double>(c_small) / n_small;
  rep.density_large = static_cast<double>(c_large) / n;
  if (c_small > 0 && c_large > 0)
    rep.exponent = 1.0 - std::log(static_cast<double>(c_large) / c_small) /
                             std::log(static_cast<double>(n) / n_small);
  else
    rep.exponent = 1.0;
  return rep;
}

}  // namespace autogowers
