// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "linrew/io.hpp"
#include "support.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace linrew;
using linrew::testing::fixture;

namespace {

struct Criterion {
  std::string id;
  std::string title;
  std::vector<std::string> problems;
  void require(bool ok, const std::string &what) {
    if (!ok)
      problems.push_back(what);
  }
};

std::set<std::string> words_of(const Polygraph2 &P, const std::vector<ChainCell> &cells) {
  std::set<std::string> out;
  for (const auto &c : cells)
    out.insert(format_word(P.quiver(), c.word));
  return out;
}

std::set<std::string> rule_texts(const Polygraph2 &P, const std::vector<int> &ids) {
  std::set<std::string> out;
  for (int id : ids)
    out.insert(format_word(P.quiver(), P.rule(id).source) + " -> " + format_polynomial(P.quiver(), P.rule(id).target));
  return out;
}

// Expected exact Tor values; everything else in range must be 0.
void require_tor(Criterion &c, const TorTable &t, int kmax, int dmax, const std::map<std::pair<int, int>, long> &nonzero) {
  for (int k = 0; k <= kmax; ++k)
    for (int i = 0; i <= dmax; ++i) {
      long want = nonzero.count({k, i}) ? nonzero.at({k, i}) : 0;
      const auto &e = t.at(k, i);
      if (!e.exact() || e.lo != want)
        c.problems.push_back("Tor_" + std::to_string(k) + ",(" + std::to_string(i) + ") = [" + std::to_string(e.lo) +
                             "," + std::to_string(e.hi) + "], expected " + std::to_string(want));
    }
}

int cli(const std::vector<std::string> &args, std::string *out_text = nullptr) {
  std::ostringstream out, err;
  int code = run_command(args, out, err).exit_code;
  if (out_text)
    *out_text = out.str();
  return code;
}

Criterion a1() {
  Criterion c{"A1", "xyz -> x^3 + y^3 + z^3: measure certificate, no branchings, Koszul, Tor table", {}};
  auto pr = fixture("xyz.lp");
  const auto &P = pr.system;
  c.require(P.termination() && P.termination()->kind == TerminationCertificate::Kind::PatternMeasure,
            "termination not certified by the pattern measure");
  auto rep = check_confluence(P, *P.termination());
  c.require(rep.entries.empty(), "expected 0 critical branchings, got " + std::to_string(rep.entries.size()));
  c.require(rep.convergent, "not convergent");
  auto v = koszul_verdict(P, pr.N, 4, 6);
  c.require(v.kind == KoszulVerdict::Kind::KoszulCertified, "verdict " + to_string(v.kind));
  require_tor(c, tor_table(P, 3, 6, pr.N), 3, 6, {{{0, 0}, 1}, {{1, 1}, 3}, {{2, 3}, 1}});
  std::string text;
  c.require(cli({"check", testing::fixture_path("xyz.lp")}, &text) == 0, "CLI check did not exit 0");
  c.require(cli({"koszul", testing::fixture_path("xyz.lp")}, &text) == 0 && text.find("Koszul-certified") != std::string::npos,
            "CLI koszul did not report Koszul-certified");
  return c;
}

Criterion a2() {
  Criterion c{"A2", "PP with a = 2: completion, branchings, chains, Tor, verdict after collapse", {}};
  auto pr = fixture("pp05.lp");
  auto cr = complete(pr.system, *pr.system.order());
  c.require(cr.certified, "completion not certified");
  const auto &P = cr.system;
  auto added = rule_texts(P, cr.added);
  c.require(added == std::set<std::string>{"y x^2 -> 2 x^2 y", "z x^2 -> 1/2 x^2 z"}, "unexpected added rules");
  auto rep = check_confluence(P, *P.termination());
  c.require(rep.entries.size() == 4, "expected 4 critical branchings, got " + std::to_string(rep.entries.size()));
  c.require(std::all_of(rep.entries.begin(), rep.entries.end(), [](const auto &e) { return e.confluent; }),
            "some branching not confluent");
  auto chains = enumerate_chains(P, 4, 8);
  c.require(words_of(P, chains.dim(4)) == std::set<std::string>{"y z y z", "y z y x^2", "z y z y", "z y z x^2"},
            "unexpected triple chains");
  auto t = tor_table(P, 3, 6, pr.N);
  c.require(t.at(2, 2).exact() && t.at(2, 2).lo == 2, "Tor_2,(2) != 2");
  for (auto [k, i] : std::vector<std::pair<int, int>>{{2, 3}, {3, 3}, {3, 4}})
    c.require(t.at(k, i).exact() && t.at(k, i).lo == 0,
              "Tor_" + std::to_string(k) + ",(" + std::to_string(i) + ") != 0");
  auto v = koszul_verdict(P, pr.N, 4, 6);
  c.require(v.kind == KoszulVerdict::Kind::KoszulCertified, "verdict " + to_string(v.kind));
  std::set<std::string> upper;
  auto sat = collapse_saturate(build_complex(P, 3, 6).data, pr.N);
  for (int k = 2; k <= 3; ++k)
    for (const auto &cell : sat.cells[static_cast<size_t>(k)])
      if (cell.alive)
        upper.insert(cell.label);
  c.require(upper == std::set<std::string>{"alpha", "beta"}, "cells of dimension 2-3 left after collapse differ from {alpha, beta}");
  return c;
}

Criterion a3() {
  Criterion c{"A3", "XY: completion, 5 branchings, 7 triple chains, counting, Not-Koszul witness", {}};
  auto pr = fixture("xy.lp");
  auto cr = complete(pr.system, *pr.system.order());
  c.require(cr.certified, "completion not certified");
  const auto &P = cr.system;
  c.require(rule_texts(P, cr.added) == std::set<std::string>{"y x^2 -> x^3"}, "unexpected added rules");
  auto rep = check_confluence(P, *P.termination());
  std::set<std::string> words;
  for (const auto &e : rep.entries)
    words.insert(format_word(P.quiver(), e.branching.word(P)));
  c.require(words == std::set<std::string>{"y^3", "x y^2", "x y x^2", "y^2 x^2", "y x^2 y"} && rep.entries.size() == 5,
            "unexpected critical branchings");
  auto chains = enumerate_chains(P, 4, 5);
  c.require(words_of(P, chains.dim(4)) == std::set<std::string>{"x y x^2 y", "x y^2 x^2", "x y^3", "y x^2 y^2",
                                                                 "y^2 x^2 y", "y^3 x^2", "y^4"},
            "unexpected triple chains through degree 5");
  auto deg = cell_degrees(chains, pr.N);
  c.require(deg.counts[3][4] == 3 && deg.counts[4][4] == 2, "degree 4 cell counts differ from 3 vs 2");
  auto v = koszul_verdict(P, pr.N, 4, 6);
  c.require(v.kind == KoszulVerdict::Kind::NotKoszul, "verdict " + to_string(v.kind));
  c.require(v.witness == std::make_pair(3, 4), "witness is not Tor_3,(4)");
  c.require(v.tor.at(3, 4).lo >= 1, "Tor_3,(4) lower bound below 1");
  return c;
}

Criterion a4() {
  Criterion c{"A4", "xy -> x^2: standard basis y^i x^j; x^2 -> xy not confluent on x^3", {}};
  auto pr = fixture("xy_to_xx.lp");
  const auto &P = pr.system;
  auto sb = standard_basis(P, 8);
  for (int d = 0; d <= 8; ++d) {
    std::set<std::string> want, got;
    for (int i = 0; i <= d; ++i) {
      Word w(static_cast<size_t>(i), 1);
      w.insert(w.end(), static_cast<size_t>(d - i), 0);
      want.insert(format_word(P.quiver(), Monomial::path(P.quiver(), w, 0)));
    }
    for (const auto &m : sb[static_cast<size_t>(d)])
      got.insert(format_word(P.quiver(), m));
    c.require(got == want && sb[static_cast<size_t>(d)].size() == static_cast<size_t>(d + 1),
              "standard basis differs in degree " + std::to_string(d));
  }
  auto rev = fixture("xx_to_xy.lp");
  auto rep = check_confluence(rev.system, *rev.system.termination());
  c.require(!rep.convergent, "reversed orientation reported confluent");
  bool witness = false;
  for (const auto &e : rep.entries)
    if (!e.confluent && format_word(rev.system.quiver(), e.branching.word(rev.system)) == "x^3")
      witness = true;
  c.require(witness, "no non-confluent branching on x^3");
  c.require(cli({"check", testing::fixture_path("xx_to_xy.lp")}) == kExitUncertified, "CLI check did not exit 3");
  return c;
}

Criterion a5() {
  Criterion c{"A5", "two-rule Groebner basis of xyz = x^3 + y^3 + z^3 is convergent, same Hilbert series", {}};
  auto g = fixture("xyz_groebner.lp");
  auto x = fixture("xyz.lp");
  c.require(g.system.termination().has_value(), "no termination certificate");
  if (g.system.termination()) {
    auto rep = check_confluence(g.system, *g.system.termination());
    c.require(rep.convergent, "some S-polynomial does not reduce to 0");
  }
  auto hg = hilbert_series(g.system, 6), hx = hilbert_series(x.system, 6);
  c.require(hg == hx, "Hilbert counts differ");
  return c;
}

Criterion a6(std::uint64_t seed, int count) {
  Criterion c{"A6", "property suite on random terminating systems", {}};
  std::ostringstream log;
  auto rep = testing::run_property_suite(seed, count, &log);
  c.title += " (" + std::to_string(rep.systems) + " systems, " + std::to_string(rep.non_confluent) +
             " not confluent as given, " + std::to_string(rep.completed) + " completed, " +
             std::to_string(rep.complexes) + " complexes, seed " + std::to_string(seed) + ")";
  for (const auto &f : rep.failures)
    c.problems.push_back("[" + f.check + "] " + f.detail + "\n" + f.system);
  return c;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"acceptance criteria A1-A6"};
  std::uint64_t seed = 20261019;
  int count = 200;
  app.add_option("--seed", seed, "seed of the property suite");
  app.add_option("--count", count, "number of random systems");
  CLI11_PARSE(app, argc, argv);

  std::vector<std::pair<std::string, std::function<Criterion()>>> runs = {
      {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5}, {"A6", [&] { return a6(seed, count); }}};
  int failed = 0;
  for (auto &[id, run] : runs) {
    Criterion c{id, "", {}};
    try {
      c = run();
    } catch (const std::exception &e) {
      c.problems.push_back(std::string("exception: ") + e.what());
    }
    bool ok = c.problems.empty();
    failed += !ok;
    std::cout << c.id << " " << (ok ? "PASS" : "FAIL") << "  " << c.title << "\n";
    for (const auto &p : c.problems)
      std::cout << "    " << p << "\n";
  }
  return failed ? 1 : 0;
}
