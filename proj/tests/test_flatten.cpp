#include <doctest.h>

#include "helpers.hpp"
#include "ratpat/expansion.hpp"
#include "ratpat/flatten.hpp"

using namespace ratpat;

namespace {
const char* kFixtures[] = {"conat.rp",          "stream.rp",     "no-solution.rp",
                           "producer.rp",       "consumer.rp",   "double-consumer.rp",
                           "variable-dependency.rp", "intro-cyclic.rp", "intro-pattern.rp"};
}

TEST_CASE("flat images satisfy the flat-context checker") {
  for (const char* f : kFixtures) {
    auto p = testing::pipeline_fixture(f);
    std::string why;
    CHECK_MESSAGE(is_flat(p.flat, &why), f << ": " << why);
  }
}

TEST_CASE("definitions become exactly one level deep") {
  auto p = testing::pipeline_fixture("stream.rp");
  // odd, even keep their names; get (\x. get (\y. S x y)) introduces a chain
  // of fresh constants; put's variable argument gets an identity definition.
  CHECK(p.flat.defs.count("odd") == 1);
  CHECK(p.flat.defs.count("even") == 1);
  CHECK(p.flat.defs.size() == 6);
  for (const auto& [r, body] : p.flat.defs) {
    CHECK(body.kind != ConHead::Meta);
    for (const auto& arg : body.args) {
      // argument subterms are recursion constants or metavariables, never deep
      CHECK((arg.meta_head || p.flat.defs.count(arg.head) == 1));
    }
  }
  // the query equation pairs a fresh constant with odd
  REQUIRE(p.flat.eqs.size() == 1);
  CHECK(!is_con(p.flat.eqs[0].lhs));
  CHECK(as_rec(p.flat.eqs[0].rhs).head == "odd");
}

TEST_CASE("variable-headed subterms get identity definitions") {
  auto p = testing::pipeline_fixture("stream.rp");
  bool found_identity = false;
  for (const auto& [r, body] : p.flat.defs) {
    if (body.kind == ConHead::Var && body.binders.size() == 1 &&
        body.head == body.binders[0].name && body.args.empty())
      found_identity = true;
  }
  CHECK(found_identity);
}

TEST_CASE("repeated arguments of recursion constants are collapsed") {
  auto p = testing::pipeline(
      "i : type.\n"
      "c : i -> i.\n"
      "d : i -> i -> i.\n"
      "r : i -> i -> i = [x] [y] c (r x x).\n"
      "?- [x] [y] r x y = [x] [y] r x y.\n");
  // the occurrence r x x uses only one distinct variable: a narrower clone
  // must exist and be used there
  bool narrowed = false;
  for (const auto& [name, info] : p.flat.rec_info)
    if (info.width == 1) narrowed = true;
  CHECK(narrowed);
  std::string why;
  CHECK_MESSAGE(is_flat(p.flat, &why), why);
}

TEST_CASE("flattening preserves definitional expansion") {
  for (const char* f : kFixtures) {
    auto p = testing::pipeline_fixture(f);
    for (std::size_t i = 0; i < p.concrete.eqs.size(); ++i) {
      for (int k = 0; k <= 10; ++k) {
        CHECK(bterm_equal(expand_concrete(p.concrete, p.concrete.eqs[i].first, k),
                          expand(p.flat, p.flat.eqs[i].lhs, k)));
        CHECK(bterm_equal(expand_concrete(p.concrete, p.concrete.eqs[i].second, k),
                          expand(p.flat, p.flat.eqs[i].rhs, k)));
      }
    }
  }
}

TEST_CASE("surface metavariables flatten to recursive mode") {
  auto p = testing::pipeline_fixture("stream.rp");
  CHECK(p.flat.meta_info.at("S").mode == Mode::REC);
  CHECK(p.flat.meta_info.at("S").width == 2);
}
