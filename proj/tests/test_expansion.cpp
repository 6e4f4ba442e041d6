#include <doctest.h>

#include "helpers.hpp"
#include "ratpat/oracle.hpp"
#include "ratpat/expansion.hpp"

using namespace ratpat;

namespace {

SimpleType sp() { return base_type("sp"); }
SimpleType el() { return base_type("element"); }

Binder bel(const std::string& n) { return Binder{n, el()}; }

RecTerm rec(const std::string& head, std::vector<std::string> args, Binders bs = {}) {
  RecTerm n;
  n.binders = std::move(bs);
  n.head = head;
  n.args = std::move(args);
  return n;
}

ConTerm con(const std::string& head, std::vector<RecTerm> args, Binders bs = {}) {
  ConTerm u;
  u.binders = std::move(bs);
  u.head = head;
  u.args = std::move(args);
  return u;
}

// the flattened stream-processor substitution of the worked example
Substitution gamma_stream(const std::string& pz, const std::string& pw,
                          const std::string& r3, const std::string& r4) {
  Substitution g;
  g.eqs.push_back(SubstEq{"S", Mode::REC, {bel(pz), bel(pw)}, Term(rec(r3, {pw}))});
  g.defs["odd"] = con("get", {rec("even", {}, {bel("x")})});
  g.defs["even"] = con("get", {rec(r3, {"x"}, {bel("x")})});
  g.defs[r3] = con("put", {rec(r4, {"x"}), rec("odd", {})}, {bel("x")});
  g.defs[r4] = ConTerm{{bel("x")}, ConHead::Var, "x", {}, {}};
  g.rec_info["odd"] = RecConstInfo{sp(), 0};
  g.rec_info["even"] = RecConstInfo{sp(), 0};
  g.rec_info[r3] = RecConstInfo{arrow_type({el()}, "sp"), 1};
  g.rec_info[r4] = RecConstInfo{arrow_type({el()}, "element"), 1};
  g.meta_info["S"] = MetaInfo{Mode::REC, arrow_type({el(), el()}, "sp"), 2};
  return g;
}

}  // namespace

TEST_CASE("expansion depth semantics") {
  auto p = testing::pipeline_fixture("conat.rp");
  Term omega = Term(rec("omega", {}));
  CHECK(expand(p.flat, omega, 0).kind == BTerm::Bot);
  BTerm one = expand(p.flat, omega, 1);
  REQUIRE(one.kind == BTerm::Node);
  CHECK(one.head == "cosucc");
  REQUIRE(one.args.size() == 1);
  CHECK(one.args[0].kind == BTerm::Bot);  // the constructor consumed the depth

  Term h = Term(rec("H", {}));
  std::get<RecTerm>(h).meta_head = true;
  CHECK(expand(p.flat, h, 5).kind == BTerm::MetaLeaf);
  CHECK(expand(p.flat, h, 0).kind == BTerm::Bot);
}

TEST_CASE("expansion refines monotonically") {
  for (const char* f : {"conat.rp", "stream.rp", "consumer.rp"}) {
    auto p = testing::pipeline_fixture(f);
    for (const auto& e : p.flat.eqs) {
      for (int k = 0; k < 12; ++k) {
        CHECK(bterm_equal(truncate_bterm(expand(p.flat, e.lhs, k + 1), k),
                          expand(p.flat, e.lhs, k)));
      }
    }
  }
}

TEST_CASE("rational equality identifies a definition with its unfolding") {
  auto p = testing::pipeline_fixture("conat.rp");
  Term omega = Term(rec("omega", {}));
  Term unrolled = Term(con("cosucc", {rec("omega", {})}));
  CHECK(equal_rational(p.flat, omega, unrolled));
  CHECK(equal_rational(p.flat, unrolled, omega));
  RecTerm h;
  h.meta_head = true;
  h.head = "H";
  CHECK(!equal_rational(p.flat, omega, Term(con("cosucc", {h}))));
}

TEST_CASE("rational equality handles distinct cycles of equal expansion") {
  // r = c r   vs   s = c (c s): same infinite tree, different periods
  auto p = testing::pipeline(
      "i : type.\nc : i -> i.\n"
      "r : i = c r.\n"
      "s : i = c (c s).\n"
      "?- r = s.\n");
  CHECK(equation_holds(p.flat, p.flat.eqs[0]));
  // and it agrees with bounded expansion
  for (int k = 0; k <= 25; ++k)
    CHECK(bterm_equal(expand(p.flat, p.flat.eqs[0].lhs, k),
                      expand(p.flat, p.flat.eqs[0].rhs, k)));
}

TEST_CASE("rational equality distinguishes genuinely different streams") {
  auto p = testing::pipeline(
      "i : type.\na : i.\nb : i.\ng : i -> i -> i.\n"
      "r : i = g a r.\n"
      "s : i = g a (g b s).\n"
      "?- r = s.\n");
  CHECK(!equation_holds(p.flat, p.flat.eqs[0]));
  // the first divergence is at depth 3
  CHECK(bterm_equal(expand(p.flat, p.flat.eqs[0].lhs, 2),
                    expand(p.flat, p.flat.eqs[0].rhs, 2)));
  CHECK(!bterm_equal(expand(p.flat, p.flat.eqs[0].lhs, 3),
                     expand(p.flat, p.flat.eqs[0].rhs, 3)));
}

TEST_CASE("rational equality under binders") {
  auto p = testing::pipeline_fixture("stream.rp");
  // even = get (\x. r3 x), r3 = \x. put (r4 x) odd
  const ConTerm& even = p.flat.defs.at("even");
  REQUIRE(even.args.size() == 1);
  std::string r3 = even.args[0].head;
  Term a = Term(rec(r3, {"u"}, {bel("u")}));
  Term b = Term(rec(r3, {"v"}, {bel("v")}));
  CHECK(equal_rational(p.flat, a, b));
  // a recursion constant application equals its own definition body
  CHECK(equal_rational(p.flat, a, Term(p.flat.defs.at(r3))));
}

TEST_CASE("rational equality agrees with bounded expansion on random problems") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    GenConfig cfg;
    auto p = testing::pipeline(gen_problem(cfg, seed));
    for (const auto& e : p.flat.eqs) {
      bool exact = equal_rational(p.flat, e.lhs, e.rhs);
      bool bounded = true;
      for (int k = 0; k <= 25 && bounded; ++k)
        bounded = bterm_equal(expand(p.flat, e.lhs, k), expand(p.flat, e.rhs, k));
      CHECK_MESSAGE(exact == bounded, "seed " << seed);
    }
  }
}

TEST_CASE("substitution equality ignores pattern and constant renaming") {
  Substitution g = gamma_stream("z", "w", "r3", "r4");
  Substitution g1 = gamma_stream("y", "u", "r3", "r4");   // renamed pattern
  Substitution g2 = gamma_stream("w", "z", "r1", "r5");   // renamed constants
  CHECK(subst_equal(g, g1));
  CHECK(subst_equal(g, g2));
  CHECK(subst_equal(g1, g2));

  // projecting the wrong pattern variable is a different substitution
  Substitution bad = gamma_stream("z", "w", "r3", "r4");
  std::get<RecTerm>(bad.eqs[0].value).args = {"z"};
  CHECK(!subst_equal(g, bad));

  // domains must match
  Substitution extra = gamma_stream("z", "w", "r3", "r4");
  extra.eqs.push_back(SubstEq{"T", Mode::REC, {}, Term(rec("odd", {}))});
  CHECK(!subst_equal(g, extra));
}
