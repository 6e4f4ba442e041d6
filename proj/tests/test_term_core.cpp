#include <doctest.h>

#include "ratpat/subst.hpp"
#include "ratpat/term.hpp"

using namespace ratpat;

namespace {

SimpleType ty_o() { return base_type("o"); }

Binder b(const std::string& n) { return Binder{n, ty_o()}; }

RecTerm rec(const std::string& head, std::vector<std::string> args, Binders bs = {}) {
  RecTerm n;
  n.binders = std::move(bs);
  n.head = head;
  n.args = std::move(args);
  return n;
}

RecTerm meta(const std::string& head, std::vector<std::string> args, Binders bs = {}) {
  RecTerm n = rec(head, std::move(args), std::move(bs));
  n.meta_head = true;
  return n;
}

ConTerm con(const std::string& head, std::vector<RecTerm> args, Binders bs = {}) {
  ConTerm u;
  u.binders = std::move(bs);
  u.head = head;
  u.args = std::move(args);
  return u;
}

}  // namespace

TEST_CASE("simple types") {
  SimpleType t = arrow_type({ty_o(), ty_o()}, "o");
  CHECK(t.arity() == 2);
  CHECK(!t.is_base());
  CHECK(show_type(t) == "o -> o -> o");
  CHECK(show_type(arrow_type({t}, "o")) == "(o -> o -> o) -> o");
  CHECK(show_type(ty_o()) == "o");
  CHECK(t.result_after(1).arity() == 1);
}

TEST_CASE("free variables in first-occurrence order") {
  // [x] c (r y x) (H z y)
  ConTerm u = con("c", {rec("r", {"y", "x"}), meta("H", {"z", "y"})}, {b("x")});
  CHECK(free_vars(Term(u)) == std::vector<std::string>{"y", "z"});
  CHECK(free_vars(Term(con("c", {rec("r", {"y", "x"})}))) ==
        std::vector<std::string>{"y", "x"});
}

TEST_CASE("renaming avoids capture") {
  // [y] r x y  with x := y must not capture
  RecTerm n = rec("r", {"x", "y"}, {b("y")});
  RecTerm out = rename(n, make_renaming({"x"}, {"y"}));
  CHECK(out.binders.size() == 1);
  CHECK(out.binders[0].name != "y");      // bound y freshened
  CHECK(out.args[0] == "y");              // free x became y
  CHECK(out.args[1] == out.binders[0].name);
}

TEST_CASE("alpha equality and term keys") {
  Term a = Term(rec("r", {"x"}, {b("x")}));
  Term bterm = Term(rec("r", {"y"}, {b("y")}));
  CHECK(alpha_equal(a, bterm));
  CHECK(term_key(a) == term_key(bterm));
  Term c = Term(rec("r", {"z"}, {b("x")}));  // z free, not bound
  CHECK(!alpha_equal(a, c));
  CHECK(!alpha_equal(Term(rec("r", {})), Term(meta("r", {}))));
}

TEST_CASE("substitution application instantiates patterns") {
  Substitution g;
  // H x y := r y
  g.eqs.push_back(SubstEq{"H", Mode::REC, {b("x"), b("y")}, Term(rec("r", {"y"}))});
  RecTerm use = meta("H", {"u", "v"});
  RecTerm got = apply_subst(use, g);
  CHECK(!got.meta_head);
  CHECK(got.head == "r");
  CHECK(got.args == std::vector<std::string>{"v"});

  // binder prefixes are preserved
  RecTerm under = meta("H", {"u", "w"}, {b("w")});
  RecTerm got2 = apply_subst(under, g);
  CHECK(got2.binders.size() == 1);
  CHECK(got2.args == std::vector<std::string>{"w"});
}

TEST_CASE("composition acts as first-then-second") {
  NameSupply names;
  Substitution g1, g2;
  g1.eqs.push_back(SubstEq{"H", Mode::REC, {b("x")}, Term(meta("G", {"x"}))});
  g1.meta_info["H"] = MetaInfo{Mode::REC, arrow_type({ty_o()}, "o"), 1};
  g2.eqs.push_back(SubstEq{"G", Mode::REC, {b("x")}, Term(rec("r", {"x"}))});
  g2.meta_info["G"] = MetaInfo{Mode::REC, arrow_type({ty_o()}, "o"), 1};

  Substitution c = compose(g1, g2, names);
  const SubstEq* h = c.lookup("H");
  REQUIRE(h != nullptr);
  CHECK(as_rec(h->value).head == "r");
  CHECK(c.lookup("G") != nullptr);  // outside dom(g1), carried over

  std::set<std::string> keep{"H"};
  CHECK(restrict_domain(c, keep).domain() == keep);
}

TEST_CASE("composition renames colliding definitions") {
  NameSupply names;
  Substitution g1, g2;
  g1.defs["r"] = con("c", {});
  g1.rec_info["r"] = RecConstInfo{ty_o(), 0};
  g1.eqs.push_back(SubstEq{"H", Mode::REC, {}, Term(rec("r", {}))});
  g2.defs["r"] = con("d", {});
  g2.rec_info["r"] = RecConstInfo{ty_o(), 0};

  Substitution c = compose(g1, g2, names);
  CHECK(c.defs.size() == 2);
  const SubstEq* h = c.lookup("H");
  REQUIRE(h != nullptr);
  // H's value must reference the renamed copy whose body is c
  CHECK(c.defs.at(as_rec(h->value).head).head == "c");
  CHECK(c.defs.at("r").head == "d");
}

TEST_CASE("check_substitution rejects malformed substitutions") {
  Substitution bad;
  bad.eqs.push_back(SubstEq{"H", Mode::REC, {b("x")}, Term(rec("r", {"y"}))});
  CHECK_THROWS_AS(check_substitution(bad), InternalError);  // escaped variable

  Substitution dup;
  dup.eqs.push_back(SubstEq{"H", Mode::REC, {}, Term(rec("r", {}))});
  dup.eqs.push_back(SubstEq{"H", Mode::REC, {}, Term(rec("s", {}))});
  CHECK_THROWS_AS(check_substitution(dup), InternalError);

  Substitution sort;
  sort.eqs.push_back(SubstEq{"H", Mode::CON, {}, Term(rec("r", {}))});
  CHECK_THROWS_AS(check_substitution(sort), InternalError);
}

TEST_CASE("eta-long metavariable applications") {
  NameSupply names;
  RecTerm n = eta_long_meta("H", {"y"}, arrow_type({ty_o(), ty_o()}, "o"), 1, names);
  CHECK(n.meta_head);
  CHECK(n.binders.size() == 1);
  CHECK(n.args.size() == 2);
  CHECK(n.args[0] == "y");
  CHECK(n.args[1] == n.binders[0].name);
}

TEST_CASE("generated names never collide with surface names") {
  NameSupply names;
  CHECK(is_generated_name(names.fresh_rec()));
  CHECK(is_generated_name(names.fresh_meta()));
  CHECK(!is_generated_name("odd"));
  CHECK(names.fresh_var() != names.fresh_var());
}
