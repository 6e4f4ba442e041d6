#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "ratpat/driver.hpp"
#include "ratpat/mgu.hpp"
#include "ratpat/oracle.hpp"

using namespace ratpat;

namespace {

const char* kStreamSig =
    "element : type.\n"
    "sp : cotype.\n"
    "get : (element -> sp) -> sp.\n"
    "put : element -> sp -> sp.\n";

struct Solved {
  testing::Pipeline p;
  Substitution full;       // over every metavariable the engine touched
  Substitution restricted; // user metavariables only, dead defs dropped
};

Solved solve(const std::string& fixture) {
  Solved s;
  s.p = testing::pipeline_fixture(fixture);
  SatResult r = saturate(s.p.flat, s.p.names, {});
  REQUIRE(!r.ctx.contra);
  s.full = unif(r.ctx, s.p.names);
  std::set<std::string> user;
  for (const auto& [m, ty] : s.p.concrete.meta_types) user.insert(m);
  s.restricted = gc_defs(restrict_domain(s.full, user));
  return s;
}

Substitution expect(const std::string& text) {
  NameSupply names;
  return parse_substitution(text, names);
}

}  // namespace

TEST_CASE("conat: H is the infinite cosuccessor chain") {
  Solved s = solve("conat.rp");
  CHECK(subst_equal(s.restricted, expect("conat : cotype.\n"
                                         "cosucc : conat -> conat.\n"
                                         "omega : conat = cosucc omega.\n"
                                         "?- H = omega.\n")));
  // only omega's definition is reachable from the assignment
  CHECK(s.restricted.defs.size() == 1);
}

TEST_CASE("stream: S emits its second argument and loops") {
  Solved s = solve("stream.rp");
  // the expected answer in flat form, kept as one-level definitions
  CHECK(subst_equal(s.restricted,
                    expect(std::string(kStreamSig) +
                           "odd : sp = get ([x] even).\n"
                           "even : sp = get ([x] r3 x).\n"
                           "r3 : element -> sp = [x] put (r4 x) odd.\n"
                           "r4 : element -> element = [x] x.\n"
                           "?- [z : element] [w] S z w = [z] [w] r3 w.\n")));
  // and equally to its unflattened rendering
  CHECK(subst_equal(s.restricted,
                    expect(std::string(kStreamSig) +
                           "odd : sp = get ([x] get ([y] r3 y)).\n"
                           "r3 : element -> sp = [w] put w odd.\n"
                           "?- [z : element] [w] S z w = [z] [w] r3 w.\n")));
}

TEST_CASE("producer: H keeps emitting its argument") {
  Solved s = solve("producer.rp");
  CHECK(subst_equal(s.restricted,
                    expect(std::string(kStreamSig) +
                           "r1 : element -> sp = [x] put (r2 x) (r1 x).\n"
                           "r2 : element -> element = [x] x.\n"
                           "?- [z] H z = [z] r1 z.\n")));
}

TEST_CASE("consumer: S reads forever, regardless of argument plumbing") {
  Solved s = solve("consumer.rp");
  // a natural hand-written value passes its argument along; ours discards it -- the
  // infinite expansions coincide, so the substitutions are equal
  CHECK(subst_equal(s.restricted,
                    expect(std::string(kStreamSig) +
                           "r1 : element -> sp = [x] get ([y] r1 y).\n"
                           "?- [z] S z = [z] r1 z.\n")));
}

TEST_CASE("double consumer: S discards all arguments") {
  Solved s = solve("double-consumer.rp");
  CHECK(subst_equal(s.restricted,
                    expect(std::string(kStreamSig) +
                           "t : sp = get ([y] t).\n"
                           "?- [z : element] S z = [z] t.\n")));
}

TEST_CASE("variable dependency: H and S share an argumentless representative") {
  Solved s = solve("variable-dependency.rp");
  const SubstEq* h = s.restricted.lookup("H");
  const SubstEq* se = s.restricted.lookup("S");
  REQUIRE(h);
  REQUIRE(se);
  REQUIRE(!is_con(h->value));
  REQUIRE(!is_con(se->value));
  const RecTerm& hv = as_rec(h->value);
  const RecTerm& sv = as_rec(se->value);
  CHECK(hv.meta_head);
  CHECK(sv.meta_head);
  CHECK(hv.head == sv.head);
  CHECK(hv.args.empty());
  CHECK(sv.args.empty());
}

TEST_CASE("intro pattern: the shared representative keeps only the middle variable") {
  Solved s = solve("intro-pattern.rp");
  const SubstEq* f = s.restricted.lookup("F");
  const SubstEq* g = s.restricted.lookup("G");
  REQUIRE(f);
  REQUIRE(g);
  const RecTerm& fv = as_rec(f->value);
  const RecTerm& gv = as_rec(g->value);
  CHECK(fv.head == gv.head);
  // F x y -> rep applied to y; G y z -> rep applied to y
  REQUIRE(f->pattern.size() == 2);
  REQUIRE(g->pattern.size() == 2);
  CHECK(fv.args == std::vector<std::string>{f->pattern[1].name});
  CHECK(gv.args == std::vector<std::string>{g->pattern[0].name});
}

TEST_CASE("intro cyclic: F becomes a self-applying recursion constant") {
  Solved s = solve("intro-cyclic.rp");
  const SubstEq* f = s.restricted.lookup("F");
  REQUIRE(f);
  REQUIRE(!is_con(f->value));
  const RecTerm& fv = as_rec(f->value);
  REQUIRE(!fv.meta_head);
  const ConTerm& body = s.restricted.defs.at(fv.head);
  CHECK(body.kind == ConHead::Var);
  REQUIRE(body.binders.size() == 1);
  CHECK(body.head == body.binders[0].name);
  REQUIRE(body.args.size() == 1);
  CHECK(body.args[0].head == fv.head);

  VerifyReport rep = verify_unifier(s.p.flat, s.full, 25, s.p.names);
  CHECK(rep.ok);
}

TEST_CASE("every fixture unifier passes the depth-25 expansion check") {
  for (const char* f : {"conat.rp", "stream.rp", "producer.rp", "consumer.rp",
                        "double-consumer.rp", "variable-dependency.rp", "intro-cyclic.rp",
                        "intro-pattern.rp"}) {
    Solved s = solve(f);
    VerifyReport rep = verify_unifier(s.p.flat, s.full, 25, s.p.names);
    CHECK_MESSAGE(rep.ok, f);
  }
}

TEST_CASE("unif refuses a contradictory context") {
  testing::Pipeline p = testing::pipeline_fixture("no-solution.rp");
  SatResult r = saturate(p.flat, p.names, {});
  REQUIRE(r.ctx.contra);
  CHECK_THROWS_AS(unif(r.ctx, p.names), InternalError);
}

TEST_CASE("garbage collection keeps exactly the reachable definitions") {
  Solved s = solve("stream.rp");
  // full substitution carries the flattening scaffolding of the query sides
  CHECK(s.full.defs.size() > s.restricted.defs.size());
  for (const auto& e : s.restricted.eqs)
    for (const auto& r : rec_consts(e.value)) CHECK(s.restricted.defs.count(r));
  // closure: defs reachable from kept defs are kept too
  for (const auto& [r, body] : s.restricted.defs)
    for (const auto& r2 : rec_consts(Term(body))) CHECK(s.restricted.defs.count(r2));
}

TEST_CASE("a candidate unifier factors through the extracted one") {
  Solved s = solve("conat.rp");
  Substitution g2 = expect(
      "conat : cotype.\n"
      "cosucc : conat -> conat.\n"
      "u : conat = cosucc (cosucc u).\n"
      "?- H = u.\n");
  NameSupply names;
  Substitution gp = mediate(s.restricted, g2, names);
  Substitution back = restrict_domain(compose(s.restricted, gp, names), g2.domain());
  CHECK(subst_equal(back, g2));
}

TEST_CASE("factoring through assigns the generated representative") {
  Solved s = solve("variable-dependency.rp");
  std::set<std::string> avoid = {"element", "sp", "get", "put"};
  Substitution shown = display_rename(s.restricted, avoid);
  // the representative shows up as G1 in display names
  REQUIRE(value_metas(shown) == std::set<std::string>{"G1"});
  Substitution g2 = expect(std::string(kStreamSig) +
                           "t : sp = get ([y] t).\n"
                           "?- [z : element] H z = [z] t.\n"
                           "?- [w : element] S w = [w] t.\n"
                           "?- G1 = t.\n");
  NameSupply names;
  Substitution gp = mediate(shown, g2, names);
  CHECK(gp.domain() == std::set<std::string>{"G1"});
  Substitution back = restrict_domain(compose(shown, gp, names), g2.domain());
  CHECK(subst_equal(back, g2));
}

TEST_CASE("a substitution that is not an instance is rejected") {
  Solved s = solve("stream.rp");
  // ignores its second argument, which the unifier's value uses
  Substitution bad = expect(std::string(kStreamSig) +
                            "odd : sp = get ([x] get ([y] put y odd)).\n"
                            "?- [z : element] [w : element] S z w = [z] [w] odd.\n");
  NameSupply names;
  CHECK_THROWS_AS(mediate(s.restricted, bad, names), InputError);
}

TEST_CASE("a reversed schedule extracts an equal unifier") {
  for (const char* f : {"conat.rp", "stream.rp", "producer.rp", "consumer.rp",
                        "double-consumer.rp", "intro-cyclic.rp"}) {
    Solved a = solve(f);
    testing::Pipeline p = testing::pipeline_fixture(f);
    SatConfig cfg;
    cfg.reverse = true;
    SatResult r = saturate(p.flat, p.names, cfg);
    REQUIRE(!r.ctx.contra);
    Substitution full = unif(r.ctx, p.names);
    std::set<std::string> user;
    for (const auto& [m, ty] : p.concrete.meta_types) user.insert(m);
    Substitution restricted = gc_defs(restrict_domain(full, user));
    CHECK_MESSAGE(subst_equal(a.restricted, restricted), f);
  }
}
