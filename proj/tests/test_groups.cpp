#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "autogowers/group.hpp"
#include "autogowers/rep.hpp"

using namespace autogowers;

namespace {

Perm cyc(const std::string& s, int degree) { return Perm::from_cycles(s, degree); }

PermGroup sym3() { return PermGroup({cyc("(1 2)", 3), cyc("(2 3)", 3)}); }

// quaternion group Q8 inside Sym(8) via its left regular action
PermGroup quaternion8() {
  // elements in order: 1, -1, i, -i, j, -j, k, -k
  // left multiplication by i: 1->i, -1->-i, i->-1, -i->1, j->k, -j->-k, k->-j, -k->j
  Perm mi(std::vector<int>{2, 3, 1, 0, 6, 7, 5, 4});
  // left multiplication by j: 1->j, -1->-j, i->-k, -i->k, j->-1, -j->1, k->i, -k->-i
  Perm mj(std::vector<int>{4, 5, 7, 6, 1, 0, 2, 3});
  return PermGroup({mi, mj});
}

}  // namespace

TEST_CASE("closure sizes") {
  CHECK(PermGroup({cyc("(1 2)", 2)}).size() == 2);
  CHECK(PermGroup({cyc("(1 2)", 3), cyc("(1 2 3)", 3)}).size() == 6);
  CHECK(sym3().size() == 6);  // generators of the Sym(3) example
  CHECK(quaternion8().size() == 8);
}

TEST_CASE("closure is idempotent") {
  PermGroup g = sym3();
  PermGroup g2(g.elements());
  CHECK(g2.size() == g.size());
  for (size_t i = 0; i < g.size(); ++i) CHECK(g2.contains(g.element(static_cast<int>(i))));
}

TEST_CASE("normal closure") {
  PermGroup g = sym3();
  SECTION("of the identity is trivial") {
    CHECK(normal_closure(g, {g.identity()}).size() == 1);
  }
  SECTION("of the generators is everything") {
    std::vector<int> gens = g.generator_ids();
    CHECK(normal_closure(g, gens).size() == g.size());
  }
  SECTION("of a 3-cycle in Sym(3) is Alt(3), against a brute-force oracle") {
    int c3 = g.index_of(cyc("(1 2 3)", 3));
    Subgroup h = normal_closure(g, {c3});
    CHECK(h.size() == 3);
    // oracle: close under conjugation and products by exhaustive iteration
    std::set<int> oracle{g.identity(), c3};
    bool grown = true;
    while (grown) {
      grown = false;
      std::set<int> next = oracle;
      for (int x : oracle) {
        for (int a = 0; a < static_cast<int>(g.size()); ++a)
          next.insert(g.mul(g.mul(a, x), g.inv(a)));
        for (int y : oracle) next.insert(g.mul(x, y));
        next.insert(g.inv(x));
      }
      if (next != oracle) {
        oracle = next;
        grown = true;
      }
    }
    CHECK(std::set<int>(h.elems.begin(), h.elems.end()) == oracle);
  }
}

TEST_CASE("Lagrange: computed subgroup orders divide the group order") {
  PermGroup g = sym3();
  for (int a = 0; a < static_cast<int>(g.size()); ++a) {
    Subgroup h = subgroup_closure(g, {a});
    CHECK(g.size() % h.size() == 0);
  }
}

TEST_CASE("quotients") {
  PermGroup g = sym3();
  SECTION("by the trivial subgroup: isomorphic copy") {
    Subgroup triv = Subgroup::from_elements(g, {g.identity()});
    Quotient q = quotient(g, triv);
    CHECK(q.group.size() == g.size());
  }
  SECTION("by the whole group: trivial") {
    std::vector<int> all(g.size());
    std::iota(all.begin(), all.end(), 0);
    Quotient q = quotient(g, Subgroup::from_elements(g, all));
    CHECK(q.group.size() == 1);
  }
  SECTION("Sym(3)/Alt(3) has order 2 and kernel Alt(3) exactly") {
    Subgroup alt = normal_closure(g, {g.index_of(cyc("(1 2 3)", 3))});
    Quotient q = quotient(g, alt);
    CHECK(q.group.size() == 2);
    GroupHom hom{&g, &q.group, q.proj};
    CHECK(hom.check());
    auto ker = hom.kernel();
    CHECK(std::set<int>(ker.begin(), ker.end()) ==
          std::set<int>(alt.elems.begin(), alt.elems.end()));
  }
  SECTION("non-normal subgroup rejected") {
    Subgroup h = subgroup_closure(g, {g.index_of(cyc("(1 2)", 3))});
    CHECK_THROWS(quotient(g, h));
  }
}

TEST_CASE("coset averaging") {
  PermGroup z2({cyc("(1 2)", 2)});
  auto tau = [&](int s, int g) {
    (void)s;
    return g == z2.identity() ? Value::integer(4) : Value::integer(2);
  };
  SECTION("trivial G0 leaves the table unchanged") {
    Subgroup triv = Subgroup::from_elements(z2, {z2.identity()});
    auto avg = coset_average(z2, triv, 1, tau);
    CHECK(avg[0][0] == Value::rational(BigRat(4)));
  }
  SECTION("G0 = G averages everything; 4 and 2 average to 3") {
    Subgroup full = Subgroup::from_elements(z2, {0, 1});
    auto avg = coset_average(z2, full, 1, tau);
    CHECK(avg[0][0].q == BigRat(3));
    CHECK(avg[0][1].q == BigRat(3));
  }
  SECTION("averaging is a projection (exact rationals)") {
    Subgroup full = Subgroup::from_elements(z2, {0, 1});
    auto avg = coset_average(z2, full, 1, tau);
    auto twice = coset_average(z2, full, 1, [&](int s, int g) { return avg[s][g]; });
    for (int g = 0; g < 2; ++g) CHECK(twice[0][g].q == avg[0][g].q);
  }
}

TEST_CASE("rho averages vanish exactly off the kernel") {
  PermGroup z2({cyc("(1 2)", 2)});
  Subgroup z2full = Subgroup::from_elements(z2, {0, 1});
  CHECK(rho_average_check(sign_rep(z2), z2full));        // (1 + (-1))/2 = 0
  CHECK_FALSE(rho_average_check(trivial_rep(z2), z2full));  // average 1

  PermGroup g = sym3();
  Subgroup alt = normal_closure(g, {g.index_of(cyc("(1 2 3)", 3))});
  UnitaryRep std2 = standard_rep(g);
  CHECK(std2.dim == 2);
  CHECK(rho_average_check(std2, alt));
  // direct oracle: the three rotation matrices of order <= 3 sum to zero
  CMat sum(2, 2);
  for (int h : alt.elems) sum = sum + std2(h);
  CHECK(sum.frobenius() < 1e-9 * 3);
}

TEST_CASE("lower central series") {
  SECTION("abelian: G2 trivial") {
    PermGroup z4({cyc("(1 2 3 4)", 4)});
    auto chain = lower_central_series(z4);
    REQUIRE(chain.size() >= 2);
    CHECK(chain[1].size() == 1);
  }
  SECTION("Sym(3): stabilises at Alt(3)") {
    auto chain = lower_central_series(sym3());
    REQUIRE(chain.size() == 2);
    CHECK(chain[1].size() == 3);  // G2 = G3 = ... = Alt(3)
  }
  SECTION("quaternion group: G2 = center, G3 trivial") {
    PermGroup q8 = quaternion8();
    auto chain = lower_central_series(q8);
    REQUIRE(chain.size() == 3);
    CHECK(chain[1].size() == 2);
    CHECK(chain[2].size() == 1);
  }
}

TEST_CASE("builtin representations") {
  SECTION("cyclic character (4,1) maps the generator to i") {
    PermGroup z4 = cyclic_group(4);
    UnitaryRep chi = builtin_rep({"cyclic_character", 4, 1}, z4);
    int gen = -1;
    for (int a = 0; a < 4; ++a)
      if (z4.order_of(a) == 4) {
        gen = a;
        break;
      }
    REQUIRE(gen >= 0);
    CHECK(std::abs(chi(gen)(0, 0) - Complex(0, 1)) < 1e-12);
    CHECK(chi.check());
  }
  SECTION("regular representation of Sym(3) is 6-dimensional permutation matrices") {
    PermGroup g = sym3();
    UnitaryRep reg = builtin_rep({"regular"}, g);
    CHECK(reg.dim == 6);
    for (size_t e = 0; e < g.size(); ++e)
      for (int i = 0; i < 6; ++i) {
        double row = 0;
        for (int j = 0; j < 6; ++j) row += std::abs(reg(static_cast<int>(e))(i, j));
        CHECK(row == Catch::Approx(1.0));
      }
    CHECK(reg.check());
  }
  SECTION("standard rep of Sym(3) sends (1 2 3) to a rotation by 2 pi / 3") {
    PermGroup g = sym3();
    UnitaryRep std2 = builtin_rep({"sym3_standard"}, g);
    const CMat& rot = std2(g.index_of(cyc("(1 2 3)", 3)));
    double tr = (rot(0, 0) + rot(1, 1)).real();
    CHECK(tr == Catch::Approx(2 * std::cos(2 * M_PI / 3)).margin(1e-9));
    double det = (rot(0, 0) * rot(1, 1) - rot(0, 1) * rot(1, 0)).real();
    CHECK(det == Catch::Approx(1.0).margin(1e-9));
    CHECK(std2.check());  // exhaustive homomorphism + unitarity
  }
  SECTION("unknown name rejected") {
    CHECK_THROWS(builtin_rep({"bogus"}, sym3()));
  }
}

TEST_CASE("cycle notation round trip") {
  PermGroup g = sym3();
  for (size_t i = 0; i < g.size(); ++i) {
    const Perm& p = g.element(static_cast<int>(i));
    CHECK(Perm::from_cycles(p.cycles(), 3) == p);
  }
  CHECK(cyc("(1 2)(3 4 5)", 5).cycles() == "(1 2)(3 4 5)");
  CHECK(cyc("()", 3).is_identity());
  CHECK_THROWS(Perm::from_cycles("(1 9)", 3));
}

TEST_CASE("group cap enforced") {
  // Sym(9) has 362880 > 100000 elements
  std::vector<Perm> gens{cyc("(1 2)", 9), cyc("(1 2 3 4 5 6 7 8 9)", 9)};
  CHECK_THROWS_WITH(PermGroup(gens), Catch::Matchers::ContainsSubstring("cap"));
}
