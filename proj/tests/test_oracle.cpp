#include <doctest.h>

#include "helpers.hpp"
#include "ratpat/driver.hpp"
#include "ratpat/mgu.hpp"
#include "ratpat/oracle.hpp"

using namespace ratpat;

namespace {

Substitution solve_full(testing::Pipeline& p, bool ho = true) {
  SatConfig cfg;
  cfg.ho = ho;
  SatResult r = saturate(p.flat, p.names, cfg);
  REQUIRE(!r.ctx.contra);
  return unif(r.ctx, p.names);
}

}  // namespace

TEST_CASE("the expansion check accepts the engine's unifiers") {
  for (const char* f : {"conat.rp", "stream.rp", "producer.rp", "double-consumer.rp"}) {
    testing::Pipeline p = testing::pipeline_fixture(f);
    Substitution g = solve_full(p);
    VerifyReport rep = verify_unifier(p.flat, g, 25, p.names);
    CHECK_MESSAGE(rep.ok, f);
    for (int d : rep.failure_depth) CHECK(d == -1);
  }
}

TEST_CASE("the expansion check reports the first failing depth") {
  // odd and even differ in the constructor under the first get: two
  // observations are needed to tell them apart.
  testing::Pipeline p = testing::pipeline(
      "sp : cotype.\n"
      "element : type.\n"
      "get : (element -> sp) -> sp.\n"
      "put : element -> sp -> sp.\n"
      "odd : sp = get ([x] even).\n"
      "even : sp = get ([x] put x odd).\n"
      "?- H = odd.\n");
  NameSupply ns;
  Substitution wrong = parse_substitution(
      "sp : cotype.\n"
      "element : type.\n"
      "get : (element -> sp) -> sp.\n"
      "put : element -> sp -> sp.\n"
      "odd : sp = get ([x] even).\n"
      "even : sp = get ([x] put x odd).\n"
      "?- H = even.\n",
      ns);
  VerifyReport rep = verify_unifier(p.flat, wrong, 25, p.names);
  CHECK(!rep.ok);
  bool saw = false;
  for (int d : rep.failure_depth)
    if (d != -1) {
      CHECK(d == 2);
      saw = true;
    }
  CHECK(saw);
}

TEST_CASE("classical unification binds through constructors") {
  testing::Pipeline p = testing::pipeline(
      "i : type.\n"
      "a : i.\n"
      "f : i -> i.\n"
      "g : i -> i -> i.\n"
      "?- g (f H) G = g (f a) (f a).\n");
  RobinsonResult r = robinson_acyclic(p.concrete);
  REQUIRE(r.status == RobinsonResult::Status::Unifier);
  CHECK(r.assign.at("H").head == "a");
  CHECK(r.assign.at("G").head == "f");
  CHECK(robinson_verify(p.concrete, r, 25));

  NameSupply ns;
  Substitution g = robinson_to_subst(p.concrete, r, ns);
  check_substitution(g);
  VerifyReport rep = verify_unifier(p.flat, g, 25, p.names);
  CHECK(rep.ok);
}

TEST_CASE("occurs check fails where the saturation engine finds a cycle") {
  testing::Pipeline p = testing::pipeline(
      "i : type.\n"
      "f : i -> i.\n"
      "?- H = f H.\n");
  RobinsonResult r = robinson_acyclic(p.concrete);
  CHECK(r.status == RobinsonResult::Status::OccursFail);

  Substitution g = solve_full(p, /*ho=*/false);
  VerifyReport rep = verify_unifier(p.flat, g, 25, p.names);
  CHECK(rep.ok);
}

TEST_CASE("constructor clashes are clashes for both engines") {
  testing::Pipeline p = testing::pipeline(
      "i : type.\n"
      "a : i.\n"
      "b : i.\n"
      "f : i -> i.\n"
      "?- f H = f b.\n"
      "?- a = b.\n");
  RobinsonResult r = robinson_acyclic(p.concrete);
  CHECK(r.status == RobinsonResult::Status::Clash);
  SatConfig cfg;
  cfg.ho = false;
  SatResult sr = saturate(p.flat, p.names, cfg);
  CHECK(sr.ctx.contra);
}

TEST_CASE("generated problems are deterministic in the seed") {
  GenConfig fo;
  GenConfig ho;
  ho.ho = true;
  for (std::uint64_t seed : {1ull, 7ull, 42ull, 1234567ull}) {
    CHECK(gen_problem(fo, seed) == gen_problem(fo, seed));
    CHECK(gen_problem(ho, seed) == gen_problem(ho, seed));
  }
  CHECK(gen_problem(fo, 1) != gen_problem(fo, 2));
}

TEST_CASE("generated problems feed the whole pipeline") {
  GenConfig fo;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    testing::Pipeline p = testing::pipeline(gen_problem(fo, seed));
    std::string why;
    CHECK_MESSAGE(is_flat(p.flat, &why), "seed " << seed << ": " << why);
  }
  GenConfig ho;
  ho.ho = true;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    testing::Pipeline p = testing::pipeline(gen_problem(ho, seed));
    std::string why;
    CHECK_MESSAGE(is_flat(p.flat, &why), "seed " << seed << ": " << why);
  }
}

TEST_CASE("definition-free generated problems fit the classical engine") {
  GenConfig cfg;
  cfg.allow_defs = false;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    testing::Pipeline p = testing::pipeline(gen_problem(cfg, seed));
    CHECK(p.concrete.defs.empty());
    RobinsonResult r = robinson_acyclic(p.concrete);  // must not throw
    if (r.status == RobinsonResult::Status::Unifier)
      CHECK_MESSAGE(robinson_verify(p.concrete, r, 25), "seed " << seed);
  }
}
