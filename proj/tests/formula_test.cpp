#include <doctest.h>

#include "modal/formula.hpp"
#include "support.hpp"

using namespace modal;

namespace {
Formula q() { return Formula::constant("q"); }
Formula a() { return Formula::var("a"); }
Formula b() { return Formula::var("b"); }
}  // namespace

TEST_CASE("parse builds the expected trees") {
  CHECK(parse("N(q -> N q)") == Formula::box(Formula::imp(q(), Formula::box(q()))));
  CHECK(parse("q") == q());
  CHECK(parse("q => N q") == Formula::box(Formula::negation(Formula::conj(q(), Formula::negation(Formula::box(q()))))));
  CHECK(parse("a -> b", {"a", "b"}) == Formula::imp(a(), b()));
  CHECK(parse("a", {}).op() == Op::Const);
}

TEST_CASE("modal operators bind tighter than connectives") {
  CHECK(render(parse("N q -> q")) == "N q -> q");
  CHECK(render(parse("N(q -> q)")) == "N(q -> q)");
  CHECK(parse("N q -> q") != parse("N(q -> q)"));
  CHECK(parse("~N q & M p | r") == parse("((~(N q)) & (M p)) | r"));
  CHECK(parse("p -> q -> r") == parse("p -> (q -> r)"));
  CHECK(parse("p & q -> r <-> s") == parse("((p & q) -> r) <-> s"));
}

TEST_CASE("render") {
  CHECK(render(Formula::box(q())) == "N q");
  CHECK(render(parse("M N q -> N q")) == "M N q -> N q");
  CHECK(render(a()) == "a");
  CHECK(render(parse("(p -> q) -> r")) == "(p -> q) -> r");
  CHECK(render(parse("~~p")) == "~~p");
}

TEST_CASE("strict implication") {
  CHECK(render(parse("q => N q")) == "N ~(q & ~N q)");
  CHECK(render(parse("q -> N q")) == "q -> N q");
  CHECK(render(parse("(q => N q) => q")) == "N ~(N ~(q & ~N q) & ~q)");
  ParseOptions keep;
  keep.keep_strict = true;
  Formula s = parse("(q => N q) => q", {}, keep);
  CHECK(contains_strict(s));
  CHECK(desugar(s) == parse("(q => N q) => q"));
  ParseOptions arrow;
  arrow.arrow_is_strict = true;
  CHECK(parse("q -> N q", {}, arrow) == parse("q => N q"));
}

TEST_CASE("syntax errors carry a position") {
  CHECK_THROWS_AS(parse("N ("), SyntaxError);
  CHECK_THROWS_AS(parse("p q"), SyntaxError);
  CHECK_THROWS_AS(parse(""), SyntaxError);
  try {
    parse("p & & q");
    FAIL("no error");
  } catch (const SyntaxError& e) {
    CHECK(e.position() == 4);
  }
}

TEST_CASE("substitute") {
  CHECK(substitute(Formula::imp(a(), b()), {{"a", q()}, {"b", Formula::box(q())}}) == parse("q -> N q"));
  CHECK(substitute(q(), {{"a", Formula::box(q())}}) == q());
  CHECK(substitute(a(), {}) == a());
}

TEST_CASE("unify") {
  auto s = unify(parse("N(a -> b)", {"a", "b"}), parse("N(q -> N q)"));
  REQUIRE(s);
  CHECK(s->at("a") == q());
  CHECK(s->at("b") == Formula::box(q()));
  CHECK_FALSE(unify(a(), Formula::box(a())));
  auto e = unify(q(), q());
  REQUIRE(e);
  CHECK(e->empty());
  CHECK_FALSE(unify(q(), Formula::constant("p")));
  CHECK_FALSE(unify(Formula::box(a()), Formula::dia(b())));
}

TEST_CASE("round trip on random formulas") {
  oracle::Generator g(7);
  g.variables = {"a", "b"};
  ParseOptions plain;
  for (int i = 0; i < 3000; ++i) {
    Formula f = g.formula(6);
    std::set<std::string> vs = vars(f);
    Formula back = parse(render(f), vs, plain);
    REQUIRE_MESSAGE(back == f, render(f));
  }
}

TEST_CASE("unifier soundness on random pairs") {
  oracle::Generator g(11);
  g.constants = {"p", "q"};
  g.variables = {"a", "b", "c"};
  int unified = 0;
  for (int i = 0; i < 5000; ++i) {
    Formula f = g.formula(3), h = g.formula(3);
    if (auto s = unify(f, h)) {
      ++unified;
      CHECK(substitute(f, *s) == substitute(h, *s));
    }
  }
  CHECK(unified > 100);
}

namespace {
// Replaces random subterms of `t` by fresh variables prefix0, prefix1, ...
Formula generalize(oracle::Generator& g, const Formula& t, const std::string& prefix, int& counter) {
  if (g.pick(4) == 0) return Formula::var(prefix + std::to_string(counter++));
  if (is_unary(t.op())) return Formula::make(t.op(), generalize(g, t.lhs(), prefix, counter));
  if (is_binary(t.op()))
    return Formula::make(t.op(), generalize(g, t.lhs(), prefix, counter), generalize(g, t.rhs(), prefix, counter));
  return t;
}
}  // namespace

TEST_CASE("unifier generality on pairs with a common instance") {
  oracle::Generator g(13);
  for (int i = 0; i < 3000; ++i) {
    Formula t = g.formula(5);
    int cx = 0, cy = 0;
    Formula f = generalize(g, t, "x", cx), h = generalize(g, t, "y", cy);
    auto s = unify(f, h);
    REQUIRE_MESSAGE(s, std::string(render(f) + " / " + render(h)));
    Formula u = substitute(f, *s);
    CHECK(u == substitute(h, *s));
    CHECK(instance_of(t, u).has_value());
  }
}

TEST_CASE("desugar is idempotent and removes strict nodes") {
  oracle::Generator g(17);
  ParseOptions keep;
  keep.keep_strict = true;
  for (int i = 0; i < 1000; ++i) {
    Formula f = g.formula(4), h = g.formula(3);
    Formula s = Formula::strict(f, Formula::strict(h, f));
    Formula d = desugar(s);
    CHECK_FALSE(contains_strict(d));
    CHECK(desugar(d) == d);
    CHECK(parse(render(s), {}, keep) == s);
  }
}

TEST_CASE("size and modal measures") {
  Formula f = parse("N(q -> N q)");
  CHECK(f.size() == 5);
  CHECK(modal_count(f) == 2);
  CHECK(modal_depth(f) == 2);
  CHECK(f.closed());
  CHECK_FALSE(parse("a", {"a"}).closed());
}
