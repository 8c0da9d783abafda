#include "doctest.h"
#include "support.hpp"

using namespace linrew;
using namespace linrew::testing;

namespace {

Quiver xyz_quiver() {
  Quiver q;
  for (auto n : {"x", "y", "z"})
    q.add_generator(n);
  return q;
}

Monomial w(const Quiver &q, const std::string &text) { return parse_word(q, text); }

Monomial random_word(std::mt19937_64 &rng, const Quiver &q, int maxlen) {
  int len = std::uniform_int_distribution<int>(0, maxlen)(rng);
  Word v;
  for (int i = 0; i < len; ++i)
    v.push_back(static_cast<Gen>(std::uniform_int_distribution<size_t>(0, q.num_generators() - 1)(rng)));
  return Monomial::path(q, v, 0);
}

std::vector<MonomialOrder> orders() {
  return {MonomialOrder::deglex({0, 1, 2}), MonomialOrder::deglex({2, 0, 1}),
          MonomialOrder::weighted({0, 1, 2}, {2, 1, 3}), MonomialOrder::block({0, 1, 2}, {0, 0, 1})};
}

} // namespace

TEST_CASE("scalars are exact over Q, GF(p) and parameter functions") {
  Scalar a = mpq_class(1, 3), b = mpq_class(1, 6);
  CHECK((a + b) == Scalar(mpq_class(1, 2)));
  CHECK((a * Scalar(3)).is_one());

  Scalar m = Scalar::modular(5, 101);
  CHECK((m * m.inverse()).is_one());
  CHECK((m - m).is_zero());
  CHECK(Scalar(mpq_class(1, 2)).to_modular(101) == Scalar::modular(51, 101));
  CHECK_THROWS_AS(Field::prime(100), ArithmeticError);
  CHECK_THROWS_AS(Scalar(mpq_class(2, 101)).to_modular(101), ArithmeticError);

  auto pr = parse_presentation("field Q\nparam a != 0 1\ngenerators x\n");
  Scalar t = pr.system.field().parameter();
  CHECK(t.kind() == Scalar::Kind::Function);
  CHECK((t / t).is_one());
  CHECK((Scalar(mpq_class(-1)) / t * t) == Scalar(-1));
  CHECK(t.invertible());
  CHECK_FALSE((t - Scalar(1)).is_zero());
  // a - 1 vanishes nowhere on the admissible set, a - 2 does vanish at a = 2
  CHECK((t - Scalar(1)).invertible());
  CHECK_FALSE((t - Scalar(2)).invertible());
  CHECK_THROWS_AS((Scalar(1) / (t - Scalar(2))), ArithmeticError);
}

TEST_CASE("compose concatenates and checks boundaries") {
  Quiver q = xyz_quiver();
  auto m = compose(w(q, "x y"), w(q, "z"));
  CHECK(m == w(q, "x y z"));
  CHECK(degree(q, m) == 3);
  CHECK(compose(Monomial::identity(0), w(q, "x y")) == w(q, "x y"));

  Quiver two(std::vector<std::string>{"p", "q", "r"});
  Gen x = two.add_generator("x", 0, 1);
  Gen x2 = two.add_generator("x'", 1, 2);
  auto a = Monomial::path(two, {x}), b = Monomial::path(two, {x2});
  auto ab = compose(a, b);
  CHECK(ab.source == 0);
  CHECK(ab.target == 2);
  CHECK_THROWS_AS(compose(b, a), CompositionError);
  CHECK_THROWS_AS(Monomial::path(two, {x2, x}), CompositionError);
}

TEST_CASE("polynomial arithmetic examples") {
  auto P = parse_presentation("field Q\ngenerators x y z\n").system;
  auto p = [&](const char *s) { return parse_polynomial(P, s); };
  CHECK((p("x y - x^2") + p("x^2 - x y")).is_zero());
  CHECK(p("x + y") * p("x - y") == p("x^2 - x y + y x - y^2"));
  CHECK((p("x^3 + y^3 + z^3") - p("x^3 + y^3 + z^3")).is_zero());
  CHECK(format_polynomial(P.quiver(), p("y^3 x + x^4 + z^3 x")) == "x^4 + y^3 x + z^3 x");
}

TEST_CASE("leading data and comparisons") {
  auto P = parse_presentation("field Q\ngenerators x y z\n").system;
  const Quiver &q = P.quiver();
  auto deglex = MonomialOrder::deglex({0, 1, 2});
  auto ld = leading_data(q, parse_polynomial(P, "x y z - x^3 - y^3 - z^3"), deglex);
  CHECK(ld.lm == w(q, "z^3"));
  CHECK(ld.lc == Scalar(-1));
  CHECK(ld.lt == parse_polynomial(P, "-z^3"));
  CHECK(leading_data(q, Polynomial::zero(0, 0), deglex).zero);
  CHECK(leading_data(q, parse_polynomial(P, "y x^2 + x^2 y"), deglex).lm == w(q, "y x^2"));

  CHECK(deglex.less(q, w(q, "x^2"), w(q, "x y")));
  CHECK(deglex.less(q, w(q, "y z"), w(q, "x^4")));
  auto weighted = MonomialOrder::weighted({0, 1}, {2, 1});
  Quiver qxy;
  qxy.add_generator("x");
  qxy.add_generator("y");
  CHECK(weighted.less(qxy, w(qxy, "y^3"), w(qxy, "x^2")));
  CHECK_FALSE(deglex.less(q, w(q, "x y"), w(q, "x y")));
}

TEST_CASE("monomial orders are total and compatible with products") {
  Quiver q = xyz_quiver();
  std::mt19937_64 rng(7);
  for (const auto &ord : orders())
    for (int n = 0; n < 400; ++n) {
      auto a = random_word(rng, q, 8), b = random_word(rng, q, 8);
      bool lt = ord.less(q, a, b), gt = ord.less(q, b, a);
      if (a == b) {
        CHECK_FALSE(lt);
        CHECK_FALSE(gt);
        continue;
      }
      REQUIRE(lt != gt);
      auto u = random_word(rng, q, 3), v = random_word(rng, q, 3);
      auto ua = compose(compose(u, a), v), ub = compose(compose(u, b), v);
      CHECK(ord.less(q, ua, ub) == lt);
    }
}

TEST_CASE("polynomial ring laws on random triples") {
  auto P = parse_presentation("field Q\ngenerators x y z\n").system;
  const Quiver &q = P.quiver();
  std::mt19937_64 rng(11);
  for (int n = 0; n < 60; ++n) {
    auto f = random_polynomial(rng, q, 1 + n % 2, 3);
    auto g = random_polynomial(rng, q, 2, 3);
    auto h = random_polynomial(rng, q, 1 + n % 3, 2);
    CHECK((f * g) * h == f * (g * h));
    CHECK(f * (g + h) == f * g + f * h);
    CHECK((g + h) * f == g * f + h * f);
    CHECK(f + g == g + f);
  }
}

TEST_CASE("addition is exact over Q and GF(101)") {
  auto P = parse_presentation("field Q\ngenerators x y z\n").system;
  const Quiver &q = P.quiver();
  std::mt19937_64 rng(13);
  for (int n = 0; n < 100; ++n) {
    auto f = random_polynomial(rng, q, 3, 4) * Scalar(mpq_class(1, 7 + n % 50));
    auto g = random_polynomial(rng, q, 3, 4);
    CHECK((f + g) - g == f);
    auto fm = f.to_modular(101), gm = g.to_modular(101);
    CHECK((fm + gm) - gm == fm);
    auto sum = fm + gm;
    for (const auto &[m, c] : sum.terms())
      CHECK(c.kind() == Scalar::Kind::Modular);
  }
}
