#include "doctest.h"
#include "support.hpp"

using namespace linrew;
using namespace linrew::testing;

namespace {

Polynomial poly(const Polygraph2 &P, const std::string &s) { return parse_polynomial(P, s); }
Monomial word(const Polygraph2 &P, const std::string &s) { return parse_word(P.quiver(), s); }

std::vector<Polygraph2> convergent_fixtures() {
  return {fixture("xyz.lp").system, completed(fixture("xy.lp").system), completed(fixture("pp05.lp").system),
          fixture("xy_to_xx.lp").system, fixture("xyz_groebner.lp").system};
}

} // namespace

TEST_CASE("find_redexes examples") {
  auto xyz = fixture("xyz.lp").system;
  auto steps = find_redexes(poly(xyz, "x y z"), xyz);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].left.is_identity());
  CHECK(steps[0].right.is_identity());
  CHECK(find_redexes(poly(xyz, "x^3"), xyz).empty());

  auto xy = fixture("xy.lp").system;
  steps = find_redexes(poly(xy, "y^3"), xy);
  REQUIRE(steps.size() == 2);
  int beta = xy.find_rule("beta");
  CHECK(steps[0].rule == beta);
  CHECK(steps[0].left.is_identity());
  CHECK(steps[0].right == word(xy, "y"));
  CHECK(steps[1].left == word(xy, "y"));
  CHECK(steps[1].right.is_identity());
}

TEST_CASE("rightmost steps") {
  auto xy = completed(fixture("xy.lp").system);
  auto s = rightmost_step(word(xy, "y^3"), xy);
  CHECK(s.left == word(xy, "y"));
  CHECK(s.rule == xy.find_rule("beta"));
  CHECK_THROWS_AS(rightmost_step(word(xy, "x^3"), xy), NoStepError);

  auto pp = completed(fixture("pp05.lp").system);
  s = rightmost_step(word(pp, "y z y"), pp);
  CHECK(s.left == word(pp, "y"));
  CHECK(s.rule == pp.find_rule("beta"));

  // redex only in the prefix: the step is the prefix step whiskered on the right
  auto m1 = word(xy, "y^2"), m = word(xy, "x");
  auto whole = rightmost_step(compose(m1, m), xy);
  auto part = rightmost_step(m1, xy);
  CHECK(whole.rule == part.rule);
  CHECK(whole.left == part.left);
  CHECK(whole.right == compose(part.right, m));
}

TEST_CASE("normal form examples") {
  auto xy = completed(fixture("xy.lp").system);
  CHECK(normal_form(poly(xy, "y^3"), xy).nf == poly(xy, "x^3"));
  auto xyz = fixture("xyz.lp").system;
  CHECK(format_polynomial(xyz.quiver(), normal_form(poly(xyz, "x y z x"), xyz).nf) == "x^4 + y^3 x + z^3 x");
  auto r = normal_form(poly(xyz, "x^2 y"), xyz);
  CHECK(r.nf == poly(xyz, "x^2 y"));
  CHECK(r.trace.steps.empty());
}

TEST_CASE("apply_step enforces the coefficient side condition") {
  auto xyz = fixture("xyz.lp").system;
  auto f = poly(xyz, "2 x y z");
  auto steps = find_redexes(f, xyz);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].coeff == Scalar(2));
  CHECK(apply_step(xyz, f, steps[0]) == poly(xyz, "2 x^3 + 2 y^3 + 2 z^3"));
  auto wrong = steps[0];
  wrong.coeff = Scalar(1);
  CHECK_THROWS_AS(apply_step(xyz, f, wrong), std::invalid_argument);
}

TEST_CASE("a budget stops normalisation of a non-terminating system") {
  auto P = parse_presentation("field Q\ngenerators x y\nrule a : x y -> y x\nrule b : y x -> x y\n").system;
  CHECK_FALSE(P.termination().has_value());
  CHECK_THROWS_AS(normal_form(poly(P, "x y"), P, Strategy::Rightmost, 100), NonTerminationSuspected);
  Rewriter rw(P, 100);
  CHECK_THROWS_AS(rw.nf(word(P, "x y")), NonTerminationSuspected);
}

TEST_CASE("ideal membership examples") {
  auto xyz = fixture("xyz.lp").system;
  CHECK(ideal_member(poly(xyz, "x y z - x^3 - y^3 - z^3"), xyz));
  CHECK_FALSE(ideal_member(poly(xyz, "x^2"), xyz));
  auto xy = completed(fixture("xy.lp").system);
  CHECK(ideal_member(poly(xy, "y x^2 - x^3"), xy));
  CHECK_THROWS(ideal_member(poly(xy, "x"), fixture("xy.lp").system));
}

TEST_CASE("standard bases") {
  auto xyz = fixture("xyz.lp").system;
  auto sb = standard_basis(xyz, 3);
  CHECK(sb[3].size() == 26);
  CHECK(sb[0].size() == 1);
  CHECK(sb[0][0].is_identity());
  auto xx = fixture("xy_to_xx.lp").system;
  auto b = standard_basis(xx, 8);
  for (int d = 0; d <= 8; ++d)
    CHECK(b[static_cast<size_t>(d)].size() == static_cast<size_t>(d + 1));
  CHECK_THROWS(standard_basis(fixture("xy.lp").system, 3));
}

TEST_CASE("monomialize") {
  auto xyz = fixture("xyz.lp").system;
  auto M = monomialize(xyz);
  REQUIRE(M.rules().size() == 1);
  CHECK(M.rules()[0].target.is_zero());
  CHECK(M.rules()[0].source == word(xyz, "x y z"));

  auto xy = completed(fixture("xy.lp").system);
  auto Mxy = monomialize(xy);
  CHECK(Mxy.rules().size() == 3);
  for (const auto &r : Mxy.rules())
    CHECK(r.target.is_zero());

  auto pp = completed(fixture("pp05.lp").system);
  CHECK(hilbert_series(monomialize(pp), 6) == hilbert_series(pp, 6));
}

TEST_CASE("PBW checks") {
  auto xyz = fixture("xyz.lp").system;
  auto basis = standard_basis(xyz, 4);
  std::vector<Monomial> cand;
  for (const auto &v : basis)
    cand.insert(cand.end(), v.begin(), v.end());
  auto rep = pbw_check(xyz, cand, 4);
  CHECK(rep.passed());

  auto rev = fixture("xx_to_xy.lp").system;
  auto irr = irreducible_monomials(rev, 4);
  std::vector<Monomial> c2;
  for (const auto &v : irr)
    c2.insert(c2.end(), v.begin(), v.end());
  auto bad = pbw_check(rev, c2, 4);
  CHECK_FALSE(bad.basis_ok);
  CHECK(bad.first_failure_degree == 3);

  std::vector<Monomial> missing;
  for (const auto &m : cand)
    if (!(m == word(xyz, "y")))
      missing.push_back(m);
  auto miss = pbw_check(xyz, missing, 4);
  CHECK_FALSE(miss.basis_ok);
  CHECK(miss.first_failure_degree == 1);
}

TEST_CASE("property: every step reconstructs f - lambda m1 (m - h) m2") {
  std::mt19937_64 rng(21);
  for (const auto &P : convergent_fixtures()) {
    const Quiver &q = P.quiver();
    for (int n = 0; n < 40; ++n) {
      auto f = random_polynomial(rng, q, 3 + n % 3, 4);
      for (const auto &s : find_redexes(f, P)) {
        const Rule &r = P.rule(s.rule);
        Polynomial expected = f - (Polynomial(r.source) - r.target).whisker(s.left, s.right) * s.coeff;
        CHECK(apply_step(P, f, s) == expected);
        CHECK(s.coeff == f.coeff(s.redex_word(P)));
      }
      auto res = normal_form(f, P);
      Polynomial g = f;
      for (const auto &s : res.trace.steps)
        g = apply_step(P, g, s);
      CHECK(g == res.nf);
    }
  }
}

TEST_CASE("property: the rightmost trace of m m' begins with m times the trace of m'") {
  std::mt19937_64 rng(22);
  for (const auto &P : convergent_fixtures()) {
    const Quiver &q = P.quiver();
    for (int n = 0; n < 60; ++n) {
      auto m = all_monomials(q, 1 + n % 3);
      auto mp = all_monomials(q, 2 + n % 3);
      auto a = m[std::uniform_int_distribution<size_t>(0, m.size() - 1)(rng)];
      auto b = mp[std::uniform_int_distribution<size_t>(0, mp.size() - 1)(rng)];
      auto tb = normal_form(Polynomial(b), P).trace;
      auto tab = normal_form(Polynomial(compose(a, b)), P).trace;
      REQUIRE(tab.steps.size() >= tb.steps.size());
      for (size_t i = 0; i < tb.steps.size(); ++i) {
        auto s = tb.steps[i];
        s.left = compose(a, s.left);
        CHECK(tab.steps[i] == s);
      }
    }
  }
}

TEST_CASE("property: Church-Rosser, idempotence and the direct sum decomposition") {
  std::mt19937_64 rng(23);
  for (const auto &P : convergent_fixtures()) {
    const Quiver &q = P.quiver();
    Rewriter rw(P);
    for (int d = 1; d <= 5; ++d) {
      DegreeIdeal I(q, relations_of(P), d);
      CHECK(I.dim_free() == standard_basis(P, d)[static_cast<size_t>(d)].size() + I.rank());
      for (int n = 0; n < 8; ++n) {
        auto f = random_polynomial(rng, q, d, 4);
        auto g = f + random_ideal_element(rng, P, d, 3);
        CHECK(rw.nf(f) == rw.nf(g));
        auto once = normal_form(f, P);
        auto twice = normal_form(once.nf, P);
        CHECK(twice.nf == once.nf);
        CHECK(twice.trace.steps.empty());
        CHECK(once.nf == rw.nf(f));
        CHECK(ideal_member(f, P) == I.contains(f));
      }
    }
  }
}

TEST_CASE("leftmost and rightmost strategies agree on convergent systems") {
  std::mt19937_64 rng(24);
  for (const auto &P : convergent_fixtures())
    for (int n = 0; n < 30; ++n) {
      auto f = random_polynomial(rng, P.quiver(), 4, 3);
      CHECK(normal_form(f, P, Strategy::Leftmost).nf == normal_form(f, P).nf);
    }
}
