#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "autogowers/decompose.hpp"
#include "autogowers/efficient.hpp"
#include "autogowers/fixtures.hpp"
#include "autogowers/transfer.hpp"

using namespace autogowers;
using namespace autogowers::fixtures;

namespace {

// direct evaluation of A(v; L) from the defining sum over the lattice,
// independent of the one-digit recursion
std::vector<CMat> a_direct(const GEA& t, const UnitaryRep& rho, int d, int L,
                           const CubeCategory& c) {
  int V = vertex_count(d);
  int dim = 1;
  for (int o = 0; o < V; ++o) dim *= rho.dim;
  std::int64_t kl = static_cast<std::int64_t>(ipow(t.base, L));
  std::vector<CMat> out(c.objects.size(), CMat(dim, dim));
  std::vector<std::int64_t> n(d + 1, 0);
  std::function<void(int)> rec = [&](int i) {
    if (i == d + 1) {
      for (size_t v = 0; v < c.objects.size(); ++v) {
        const auto& r = c.R[c.objects[v].second];
        const auto& st = c.stuples[c.objects[v].first];
        bool ok = true;
        std::vector<int> lab(V);
        for (int o = 0; o < V && ok; ++o) {
          std::int64_t m = n[0];
          for (int b = 1; b <= d; ++b)
            if ((o >> (d - b)) & 1) m += n[b];
          m += r[o];
          if (m < 0 || m >= kl) {
            ok = false;
            break;
          }
          auto w = expand(BigInt(m), t.base);
          auto [end, g] = t.run(t.initial, t.group.identity(), w);
          if (end != st[o]) {
            ok = false;
            break;
          }
          lab[o] = g;
        }
        if (ok) out[v] = out[v] + cube_rep(rho, d, lab);
      }
      return;
    }
    for (std::int64_t x = -kl; x <= kl; ++x) {
      n[i] = x;
      rec(i + 1);
    }
  };
  rec(0);
  double inv = 1.0 / std::pow(static_cast<double>(t.base), (d + 1) * L);
  for (auto& m : out) m = Complex(inv, 0.0) * m;
  return out;
}

}  // namespace

TEST_CASE("counting transfer") {
  SECTION("d = 0: W(1) is the transition-count matrix over k; powers count words") {
    Automaton tm = thue_morse();
    CountingTransfer ct = counting_transfer(tm, 0);
    // every object (state, r=0) has k outgoing morphisms in total
    for (size_t v = 0; v < ct.counts1.size(); ++v) {
      BigInt row = 0;
      for (size_t w = 0; w < ct.counts1.size(); ++w) row += ct.counts1[v][w];
      CHECK(row == 2);
    }
    auto w3 = ct.power(3);
    BigInt total = 0;
    for (size_t w = 0; w < w3.size(); ++w) total += w3[0][w];
    CHECK(total == 8);  // all length-3 words
  }
  SECTION("multiplicativity W(2) = W(1)^2 against direct degree-2 counts") {
    auto [t, cert] = build_efficient_gea(example_1_5());
    CountingTransfer ct = counting_transfer(t.underlying(), 1);
    auto w2 = ct.power(2);
    // direct: morphisms of degree 2 = pairs of composable degree-1 morphisms,
    // counted by brute force over e in [k^2]^{d+1}
    CubeCategory c = build_cube_category(gea_from_automaton(prolongate(t.underlying())), 1);
    for (size_t v = 0; v < c.objects.size(); ++v) {
      std::map<int, BigInt> direct;
      for (int e0 = 0; e0 < 4; ++e0)
        for (int e1 = 0; e1 < 4; ++e1)
          for (size_t vt = 0; vt < c.objects.size(); ++vt) {
            const auto& rt = c.R[c.objects[vt].second];
            const auto& rs = c.R[c.objects[v].second];
            bool ok = true;
            std::vector<int> tgt(2);
            for (int o = 0; o < 2; ++o) {
              int sum = e0 + (o ? e1 : 0) + rt[o];
              if (sum / 4 != rs[o]) {
                ok = false;
                break;
              }
              auto w = expand(BigInt(sum % 4), 2, 2);
              tgt[o] = t.underlying().run(c.stuples[c.objects[v].first][o], w);
            }
            if (!ok) continue;
            if (tgt != c.stuples[c.objects[vt].first]) continue;
            direct[static_cast<int>(vt)] += 1;
          }
      for (size_t vt = 0; vt < c.objects.size(); ++vt) {
        BigInt expect = direct.count(static_cast<int>(vt)) ? direct[static_cast<int>(vt)] : 0;
        CHECK(w2[v][vt] == expect);
      }
    }
  }
  SECTION("morphism counts into zero-offset targets equal |Pi(k^L)|") {
    // d=1, k=2, L=2 cross-checked with pi_count, then a 1-state automaton at d=2
    Automaton tm = thue_morse();
    CountingDp dp(tm, 1);
    dp.step();
    dp.step();
    CHECK(dp.zero_offset_total() == pi_count(4, 1));
    Automaton one = Automaton::make(2, 1, 0);
    one.delta = {{0, 0}};
    one.outputs = {Value::integer(1)};
    CountingDp dp2(one, 2);
    for (int l = 1; l <= 6; ++l) {
      dp2.step();
      CHECK(dp2.zero_offset_total() == pi_count(1ull << l, 2));
    }
  }
}

TEST_CASE("gowers_norm_dp") {
  SECTION("constant output: norm 1 for all d, L") {
    Automaton one = Automaton::make(2, 1, 0);
    one.delta = {{0, 0}};
    one.outputs = {Value::integer(1)};
    for (int d : {1, 2, 3})
      for (int l : {1, 4, 8}) CHECK(gowers_norm_dp(one, d, l).value == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("Thue-Morse d=2 L=6 equals the naive value") {
    NormResult dp = gowers_norm_dp(thue_morse(), 2, 6);
    CHECK(dp.value == Catch::Approx(0.580911096260291).margin(1e-9));
  }
  SECTION("Example 1.5 uniform part: strictly decreasing, L=4 pinned by the naive oracle") {
    // a_uni automaton = product of the GEA with coset-averaged outputs removed
    Decomposition dec = decompose_strongly_connected(example_1_5());
    auto norms = gowers_norm_dp_range(dec.a_uni, 2, 4, 20);
    for (size_t i = 1; i < norms.size(); ++i) CHECK(norms[i].value < norms[i - 1].value);
    CHECK(norms[0].value == Catch::Approx(0.5294568746627321).margin(1e-9));
    std::vector<Complex> f;
    for (int n = 0; n < 16; ++n) f.push_back(dec.a_uni.eval(BigInt(n)).to_complex());
    CHECK(norms[0].value == Catch::Approx(gowers_norm_interval_naive(f, 2).value).margin(1e-9));
  }
}

TEST_CASE("operator transfer") {
  SECTION("trivial representation reduces to the counting matrix") {
    auto [t, cert] = build_efficient_gea(example_1_5());
    UnitaryRep triv = trivial_rep(t.group);
    OperatorTransfer ot = operator_transfer(t, triv, 1);
    CountingTransfer ct = counting_transfer(t, 1);
    REQUIRE(ot.m1.size() == ct.counts1.size());
    double denom = static_cast<double>(ct.denom);
    for (size_t i = 0; i < ot.m1.size(); ++i)
      for (size_t j = 0; j < ot.m1.size(); ++j)
        CHECK(std::abs(ot.m1[i][j](0, 0) -
                       Complex(static_cast<double>(ct.counts1[i][j]) / denom, 0)) < 1e-12);
  }
  SECTION("d = 0: M(1) is the weighted adjacency matrix of the product automaton") {
    GEA rs = rudin_shapiro_gea();
    UnitaryRep sgn = sign_rep(rs.group);
    OperatorTransfer ot = operator_transfer(rs, sgn, 0);
    // entries are (1/k) sum over digits of rho(label)
    CubeCategory c = build_cube_category(rs, 0);
    for (size_t v = 0; v < c.objects.size(); ++v) {
      int s = c.stuples[c.objects[v].first][0];
      std::map<int, Complex> expect;
      for (int j = 0; j < rs.base; ++j) {
        int tgt = rs.delta[s][j];
        for (size_t w = 0; w < c.objects.size(); ++w)
          if (c.stuples[c.objects[w].first][0] == tgt && c.objects[w].second == c.objects[v].second)
            expect[static_cast<int>(w)] += sgn(rs.label[s][j])(0, 0) * 0.5;
      }
      for (size_t w = 0; w < c.objects.size(); ++w) {
        Complex e = expect.count(static_cast<int>(w)) ? expect[static_cast<int>(w)] : 0.0;
        CHECK(std::abs(ot.m1[v][w](0, 0) - e) < 1e-12);
      }
    }
  }
  SECTION("A recursion equals the direct lattice sum for L <= 3 (RS, sign rep, d=1)") {
    GEA rs = rudin_shapiro_gea();
    UnitaryRep sgn = sign_rep(rs.group);
    OperatorTransfer ot = operator_transfer(rs, sgn, 1);
    CubeCategory c = build_cube_category(rs, 1);
    for (int L : {1, 2, 3}) {
      auto rec = ot.a_vector(L);
      auto direct = a_direct(rs, sgn, 1, L, c);
      REQUIRE(rec.size() == direct.size());
      for (size_t v = 0; v < rec.size(); ++v) CHECK(rec[v].max_abs_diff(direct[v]) < 1e-9);
    }
  }
  SECTION("M multiplicativity against the direct degree-2 block sum") {
    GEA rs = rudin_shapiro_gea();
    UnitaryRep sgn = sign_rep(rs.group);
    OperatorTransfer ot = operator_transfer(rs, sgn, 1);
    auto m2 = ot.power(2);
    // direct: enumerate degree-2 morphisms per source object
    CubeCategory c = build_cube_category(rs, 1);
    for (size_t v = 0; v < c.objects.size(); ++v) {
      std::vector<CMat> direct(c.objects.size(), CMat(ot.dim, ot.dim));
      for (int e0 = 0; e0 < 4; ++e0)
        for (int e1 = 0; e1 < 4; ++e1)
          for (size_t vt = 0; vt < c.objects.size(); ++vt) {
            const auto& rt = c.R[c.objects[vt].second];
            const auto& rsrc = c.R[c.objects[v].second];
            bool ok = true;
            std::vector<int> tgt(2), lab(2);
            for (int o = 0; o < 2; ++o) {
              int sum = e0 + (o ? e1 : 0) + rt[o];
              if (sum / 4 != rsrc[o]) {
                ok = false;
                break;
              }
              auto w = expand(BigInt(sum % 4), 2, 2);
              auto [end, g] = rs.run(c.stuples[c.objects[v].first][o], rs.group.identity(), w);
              tgt[o] = end;
              lab[o] = g;
            }
            if (!ok || tgt != c.stuples[c.objects[vt].first]) continue;
            direct[vt] = direct[vt] + Complex(1.0 / 16.0, 0.0) * cube_rep(sgn, 1, lab);
          }
      for (size_t vt = 0; vt < c.objects.size(); ++vt)
        CHECK(m2[v][vt].max_abs_diff(direct[vt]) < 1e-12);
    }
  }
}

TEST_CASE("norm matrix decay") {
  auto [rs, cert] = build_efficient_gea(rudin_shapiro());
  SECTION("trivial representation: no decay (counting matrix keeps mass)") {
    // for the trivial rep N(L) = W(L) is row-stochastic: every digit vector
    // extends each source object to exactly one morphism, so the mass never
    // decays (G0 is inside the kernel)
    NormMatrixDecay nd = norm_matrix_decay(rs, trivial_rep(rs.group), 2, 12, 8);
    CHECK(nd.submultiplicative);
    for (size_t l = 0; l < nd.n_tables.size(); ++l)
      for (auto& row : nd.n_tables[l]) {
        double sum = 0;
        for (double x : row) sum += x;
        CHECK(sum == Catch::Approx(1.0).margin(1e-9));
      }
    double gamma = std::exp(-nd.gamma_fit.c * std::log(2.0));
    CHECK(gamma > 0.9);
  }
  SECTION("sign representation at d = 2: gamma < 1 on the base entry") {
    // rho_average_check holds for (sign, G0 = G), so the norms must decay
    Subgroup g0 = Subgroup::from_elements(rs.group, cert.g0_elements);
    REQUIRE(rho_average_check(sign_rep(rs.group), g0));
    NormMatrixDecay nd = norm_matrix_decay(rs, sign_rep(rs.group), 2, 12, 4);
    CHECK(nd.submultiplicative);
    CHECK(nd.gamma < 0.999);
    CHECK(nd.gamma_fit.c > 0);
  }
}

TEST_CASE("frobenius-perron checks") {
  SECTION("identity W with zero M decays instantly") {
    std::vector<std::vector<double>> w{{1, 0}, {0, 1}}, m{{0, 0}, {0, 0}};
    auto rep = frobenius_perron_check(w, m);
    CHECK(rep.powers_bounded);
    CHECK(rep.gamma == 0.0);
    CHECK(rep.decays);
  }
  SECTION("doubly stochastic W with a reduced entry decays") {
    std::vector<std::vector<double>> w{{.5, .5}, {.5, .5}}, m{{.4, .5}, {.5, .5}};
    auto rep = frobenius_perron_check(w, m);
    CHECK(rep.powers_bounded);
    CHECK(rep.spectral_radius == Catch::Approx(1.0).margin(1e-6));
    REQUIRE(rep.classes.size() == 1);
    CHECK(rep.basic[0]);
    CHECK(rep.decays);
    CHECK(rep.gamma < 1.0);
  }
  SECTION("counting W with the sign-representation N confirms decay (RS, d=2)") {
    // single-digit blocks carry no cancellation (N(1) = W(1)); the proposition
    // applies at the stabilisation length l0, where the base-object block of
    // N drops strictly below W because the cube group contains cancelling
    // labels
    auto [rs, cert] = build_efficient_gea(rudin_shapiro());
    int l0 = cube_group(rs, 2).stabilization;
    CountingTransfer ct = counting_transfer(rs, 2);
    auto wl = ct.power(l0);
    size_t n = ct.counts1.size();
    double denom = std::pow(static_cast<double>(ct.denom), l0);
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) w[i][j] = static_cast<double>(wl[i][j]) / denom;
    NormMatrixDecay nd = norm_matrix_decay(rs, sign_rep(rs.group), 2, l0);
    const auto& m = nd.n_tables[l0 - 1];
    // hypothesis: M <= W with a strict drop somewhere in the basic class
    bool strictly_below = false;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        CHECK(m[i][j] <= w[i][j] + 1e-9);
        if (m[i][j] < w[i][j] - 1e-9) strictly_below = true;
      }
    CHECK(strictly_below);
    auto rep = frobenius_perron_check(w, m);
    CHECK(rep.powers_bounded);
    CHECK(rep.decays);
    CHECK(rep.gamma < 1.0);
  }
}

TEST_CASE("decay_fit") {
  SECTION("exact geometric values fit with c = 1, R^2 = 1") {
    std::vector<std::pair<int, double>> pts;
    for (int l = 1; l <= 8; ++l) pts.push_back({l, std::pow(2.0, -l)});
    DecayFit f = decay_fit(pts, 2);
    CHECK(f.c == Catch::Approx(1.0).margin(1e-12));
    CHECK(f.r2 == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("constant values fit with c = 0") {
    std::vector<std::pair<int, double>> pts;
    for (int l = 1; l <= 8; ++l) pts.push_back({l, 0.25});
    DecayFit f = decay_fit(pts, 2);
    CHECK(f.c == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("Thue-Morse d=2 over L = 6..16: c > 0 with good fit") {
    auto norms = gowers_norm_dp_range(thue_morse(), 2, 6, 16);
    std::vector<std::pair<int, double>> pts;
    int l = 6;
    for (auto& r : norms) pts.push_back({l++, r.value});
    DecayFit f = decay_fit(pts, 2, 2);
    CHECK(f.c > 0);
    CHECK(f.r2 > 0.9);
  }
  SECTION("all-zero values short-circuit as exact uniformity") {
    DecayFit f = decay_fit({{1, 0.0}, {2, 0.0}, {3, 0.0}, {4, 0.0}}, 2);
    CHECK(f.exact_zero);
  }
  SECTION("too few points rejected") {
    CHECK_THROWS(decay_fit({{1, .5}, {2, .25}, {3, .125}}, 2));
  }
}
