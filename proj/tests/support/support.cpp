#include "support.hpp"

#include <algorithm>
#include <deque>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#ifndef LINREW_FIXTURE_DIR
#define LINREW_FIXTURE_DIR "fixtures"
#endif

namespace linrew::testing {

std::string fixture_path(const std::string &name) { return std::string(LINREW_FIXTURE_DIR) + "/" + name; }

Presentation fixture(const std::string &name) { return load_presentation_file(fixture_path(name)); }

Polygraph2 completed(const Polygraph2 &P, int max_degree) {
  if (!P.order())
    throw std::runtime_error("no order to complete with");
  auto cr = complete(P, *P.order(), {max_degree, 512});
  if (!cr.certified)
    throw std::runtime_error("completion did not certify: " + cr.note);
  return cr.system;
}

namespace {

Scalar small_coeff(std::mt19937_64 &rng) {
  std::uniform_int_distribution<int> d(1, 3), s(0, 1);
  return Scalar(static_cast<long>(s(rng) ? d(rng) : -d(rng)));
}

size_t pick(std::mt19937_64 &rng, size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng); }

} // namespace

Polygraph2 random_system(std::mt19937_64 &rng, const RandomSpec &shape) {
  static const char *names[] = {"x", "y", "z", "u", "v", "w"};
  Quiver q;
  int ng = std::uniform_int_distribution<int>(1, shape.max_generators)(rng);
  std::vector<int> rank;
  for (int g = 0; g < ng; ++g) {
    q.add_generator(names[g]);
    rank.push_back(g);
  }
  auto ord = MonomialOrder::deglex(rank);
  int nr = std::uniform_int_distribution<int>(1, shape.max_rules)(rng);
  std::vector<Rule> rules;
  std::set<Word> used;
  for (int attempt = 0; attempt < 64 && static_cast<int>(rules.size()) < nr; ++attempt) {
    int d = std::uniform_int_distribution<int>(2, shape.max_degree)(rng);
    auto words = all_monomials(q, d);
    Monomial src = words[pick(rng, words.size())];
    if (!used.insert(src.word).second)
      continue;
    std::vector<Monomial> smaller;
    for (const auto &w : words)
      if (ord.less(q, w, src))
        smaller.push_back(w);
    std::shuffle(smaller.begin(), smaller.end(), rng);
    int nt = std::uniform_int_distribution<int>(0, std::min<int>(shape.max_target_terms, static_cast<int>(smaller.size())))(rng);
    Polynomial t = Polynomial::zero(0, 0);
    for (int i = 0; i < nt; ++i)
      t.add_term(smaller[static_cast<size_t>(i)], small_coeff(rng));
    rules.push_back({"s" + std::to_string(rules.size() + 1), src, t});
  }
  return certify(Polygraph2(Field::rationals(), q, std::move(rules), ord));
}

Polynomial random_polynomial(std::mt19937_64 &rng, const Quiver &q, int d, int terms) {
  auto words = all_monomials(q, d);
  Polynomial f = Polynomial::zero(0, 0);
  for (int i = 0; i < terms && !words.empty(); ++i)
    f.add_term(words[pick(rng, words.size())], small_coeff(rng));
  return f;
}

Polynomial random_ideal_element(std::mt19937_64 &rng, const Polygraph2 &P, int d, int terms) {
  const Quiver &q = P.quiver();
  Polynomial f = Polynomial::zero(0, 0);
  std::vector<const Rule *> fit;
  for (const auto &r : P.rules())
    if (degree(q, r.source) <= d)
      fit.push_back(&r);
  if (fit.empty())
    return f;
  for (int i = 0; i < terms; ++i) {
    const Rule &r = *fit[pick(rng, fit.size())];
    int e = d - degree(q, r.source);
    int a = std::uniform_int_distribution<int>(0, e)(rng);
    auto us = all_monomials(q, a), vs = all_monomials(q, e - a);
    Polynomial rel = Polynomial(r.source) - r.target;
    f += rel.whisker(us[pick(rng, us.size())], vs[pick(rng, vs.size())]) * small_coeff(rng);
  }
  return f;
}

std::string key_of(const Polygraph2 &P, const Polynomial &f) { return format_polynomial(P.quiver(), f); }

std::vector<std::string> reducts(const Polygraph2 &P, const Polynomial &f, size_t cap, bool &complete) {
  complete = true;
  std::unordered_set<std::string> seen{key_of(P, f)};
  std::deque<Polynomial> queue{f};
  while (!queue.empty()) {
    Polynomial g = std::move(queue.front());
    queue.pop_front();
    for (const auto &s : find_redexes(g, P)) {
      Polynomial h = apply_step(P, g, s);
      if (seen.insert(key_of(P, h)).second) {
        if (seen.size() > cap) {
          complete = false;
          return {seen.begin(), seen.end()};
        }
        queue.push_back(std::move(h));
      }
    }
  }
  return {seen.begin(), seen.end()};
}

std::vector<std::vector<long>> bar_tor(const Polygraph2 &P, int kmax, int dmax, std::uint32_t p) {
  Polygraph2 Pm = P.field().base == Field::Base::GF ? P : reduce_mod(P, p);
  if (!Pm.convergent())
    throw std::runtime_error("bar oracle needs a convergent system");
  p = Pm.field().p;
  auto basis = standard_basis(Pm, dmax);
  std::vector<Monomial> B;
  std::vector<int> deg;
  std::unordered_map<Monomial, int, MonomialHash> index;
  for (int d = 1; d <= dmax; ++d)
    for (const auto &m : basis[static_cast<size_t>(d)]) {
      index.emplace(m, static_cast<int>(B.size()));
      B.push_back(m);
      deg.push_back(d);
    }
  Rewriter rw(Pm);
  std::map<std::pair<int, int>, std::vector<std::pair<int, std::uint32_t>>> products;
  auto product = [&](int a, int b) -> const std::vector<std::pair<int, std::uint32_t>> & {
    auto it = products.find({a, b});
    if (it != products.end())
      return it->second;
    std::vector<std::pair<int, std::uint32_t>> out;
    for (const auto &[m, c] : rw.nf(compose(B[static_cast<size_t>(a)], B[static_cast<size_t>(b)])).terms())
      out.emplace_back(index.at(m), c.to_modular(p).modular().v);
    return products.emplace(std::make_pair(a, b), std::move(out)).first->second;
  };

  // tuples[k][i]: composable k-tuples of basis monomials of total degree i
  int top = kmax + 1;
  std::vector<std::vector<std::vector<std::vector<int>>>> tuples(
      static_cast<size_t>(top + 1), std::vector<std::vector<std::vector<int>>>(static_cast<size_t>(dmax + 1)));
  std::vector<std::vector<std::map<std::vector<int>, int>>> pos(
      static_cast<size_t>(top + 1), std::vector<std::map<std::vector<int>, int>>(static_cast<size_t>(dmax + 1)));
  std::vector<int> cur;
  std::function<void(int, int)> grow = [&](int k, int i) {
    if (static_cast<int>(cur.size()) == k) {
      auto &slot = pos[static_cast<size_t>(k)][static_cast<size_t>(i)];
      slot.emplace(cur, static_cast<int>(slot.size()));
      tuples[static_cast<size_t>(k)][static_cast<size_t>(i)].push_back(cur);
      return;
    }
    for (size_t b = 0; b < B.size(); ++b) {
      if (i + deg[b] > dmax)
        continue;
      if (!cur.empty() && B[static_cast<size_t>(cur.back())].target != B[b].source)
        continue;
      cur.push_back(static_cast<int>(b));
      grow(k, i + deg[b]);
      cur.pop_back();
    }
  };
  for (int k = 1; k <= top; ++k)
    grow(k, 0);

  auto rank_of = [&](int k, int i) -> long { // d_k : B_k -> B_{k-1}
    if (k < 2 || k > top)
      return 0;
    ModEchelon e(p);
    for (const auto &t : tuples[static_cast<size_t>(k)][static_cast<size_t>(i)]) {
      std::map<int, std::uint64_t> acc;
      for (int j = 0; j + 1 < k; ++j) {
        std::uint64_t sign = (j % 2 == 0) ? p - 1 : 1;
        for (const auto &[idx, c] : product(t[static_cast<size_t>(j)], t[static_cast<size_t>(j) + 1])) {
          std::vector<int> s;
          s.insert(s.end(), t.begin(), t.begin() + j);
          s.push_back(idx);
          s.insert(s.end(), t.begin() + j + 2, t.end());
          int col = pos[static_cast<size_t>(k - 1)][static_cast<size_t>(i)].at(s);
          acc[col] = (acc[col] + sign * c) % p;
        }
      }
      ModEchelon::Row row;
      for (const auto &[col, v] : acc)
        if (v)
          row.emplace_back(col, static_cast<std::uint32_t>(v));
      if (!row.empty())
        e.insert(std::move(row));
    }
    return static_cast<long>(e.rank());
  };

  std::vector<std::vector<long>> tor(static_cast<size_t>(kmax + 1), std::vector<long>(static_cast<size_t>(dmax + 1), 0));
  tor[0][0] = static_cast<long>(Pm.quiver().objects().size());
  for (int k = 1; k <= kmax; ++k)
    for (int i = 0; i <= dmax; ++i)
      tor[static_cast<size_t>(k)][static_cast<size_t>(i)] =
          static_cast<long>(tuples[static_cast<size_t>(k)][static_cast<size_t>(i)].size()) - rank_of(k, i) -
          rank_of(k + 1, i);
  return tor;
}

CheckResult reduced_d_squared(const ComplexData &cd) {
  for (int k = 2; k <= cd.exact_top && static_cast<size_t>(k) < cd.cells.size(); ++k)
    for (const auto &A : cd.cells[static_cast<size_t>(k)]) {
      if (!A.alive)
        continue;
      SparseVec dd;
      for (const auto &[g, c] : A.boundary())
        axpy(dd, c, cd.cells[static_cast<size_t>(k - 1)][static_cast<size_t>(g)].boundary());
      if (!dd.empty())
        return {false, "delta(delta(" + A.label + ")) != 0 in dimension " + std::to_string(k)};
    }
  return {};
}

namespace {

using Elem = std::map<int, Polynomial>;

void add_to(Elem &e, int idx, const Polynomial &p) {
  if (p.is_zero())
    return;
  auto it = e.find(idx);
  if (it == e.end())
    e.emplace(idx, p);
  else
    it->second += p;
}

bool is_zero(const Elem &e) {
  return std::all_of(e.begin(), e.end(), [](const auto &kv) { return kv.second.is_zero(); });
}

Elem apply(const std::vector<Elem> &delta, const Elem &x, Rewriter &rw) {
  Elem out;
  for (const auto &[c, a] : x)
    for (const auto &[d, p] : delta.at(static_cast<size_t>(c)))
      add_to(out, d, rw.nf(p * a));
  return out;
}

} // namespace

CheckResult module_d_squared(const Polygraph2 &P, const ReducedComplex &rc) {
  const Quiver &q = P.quiver();
  Rewriter rw(P);
  std::map<Gen, int> gen_index;
  for (size_t i = 0; i < rc.chains.dim(1).size(); ++i)
    gen_index[rc.chains.dim(1)[i].generator] = static_cast<int>(i);
  std::map<int, int> rule_index;
  for (size_t i = 0; i < rc.chains.dim(2).size(); ++i)
    rule_index[rc.chains.dim(2)[i].rule] = static_cast<int>(i);

  auto bracket1 = [&](const Monomial &m, const Scalar &c, Elem &e) {
    if (m.is_identity())
      return;
    add_to(e, gen_index.at(m.word[0]), Polynomial(m.slice(q, 1, m.length()), c));
  };
  auto whiskered = [&](Elem &e, int idx, const Scalar &c, const Monomial &right) {
    add_to(e, idx, rw.nf(Polynomial(right, c)));
  };

  std::vector<Elem> d2;
  for (const auto &cell : rc.chains.dim(2)) {
    const Rule &r = P.rule(cell.rule);
    Elem e;
    bracket1(r.source, Scalar(1), e);
    for (const auto &[m, c] : r.target.terms())
      bracket1(m, -c, e);
    d2.push_back(e);
  }
  std::vector<Elem> d3;
  for (const auto &conf : rc.confluences) {
    Elem e;
    for (const auto &s : conf.phi_leg.steps)
      if (s.left.is_identity())
        whiskered(e, rule_index.at(s.rule), s.coeff, s.right);
    for (const auto &s : conf.rho_leg.steps)
      if (s.left.is_identity())
        whiskered(e, rule_index.at(s.rule), -s.coeff, s.right);
    d3.push_back(e);
  }
  for (size_t j = 0; j < d3.size(); ++j)
    if (!is_zero(apply(d2, d3[j], rw)))
      return {false, "module delta2 o delta3 != 0 on " + chain_label(P, rc.chains.dim(3)[j])};
  for (size_t i = 0; i < rc.boundaries4.size(); ++i) {
    Elem e;
    for (const auto &x : rc.boundaries4[i].source)
      if (x.left.is_identity())
        whiskered(e, x.cell, x.coeff, x.right);
    for (const auto &x : rc.boundaries4[i].target)
      if (x.left.is_identity())
        whiskered(e, x.cell, -x.coeff, x.right);
    if (!is_zero(apply(d3, e, rw)))
      return {false, "module delta3 o delta4 != 0 on " + chain_label(P, rc.chains.dim(4)[i])};
  }
  return {};
}

ComplexData random_collapses(const ComplexData &cd, std::mt19937_64 &rng, int top) {
  ComplexData cur = cd;
  for (;;) {
    std::vector<std::tuple<int, int, int>> options;
    for (int k = 0; k + 1 <= std::min(top, cur.exact_top); ++k) {
      const auto &upper = cur.cells[static_cast<size_t>(k + 1)];
      for (size_t A = 0; A < upper.size(); ++A) {
        if (!upper[A].alive)
          continue;
        for (const auto &[g, c] : upper[A].boundary())
          if (c.invertible() && !(upper[A].src.count(g) && upper[A].tgt.count(g)))
            options.emplace_back(k, g, static_cast<int>(A));
      }
    }
    if (options.empty())
      return cur;
    auto [k, g, A] = options[pick(rng, options.size())];
    cur = collapse_pair(cur, k, g, A);
  }
}

CheckResult newman_agreement(const Polygraph2 &P, int max_len, size_t cap) {
  if (!P.termination())
    return {false, "system carries no termination certificate"};
  auto rep = check_confluence(P, *P.termination());
  const Quiver &q = P.quiver();
  if (rep.convergent) {
    Rewriter rw(P);
    for (int len = 1; len <= max_len; ++len)
      for (const auto &m : all_monomials(q, len)) {
        auto steps = find_redexes(Polynomial(m), P);
        if (steps.size() < 2)
          continue;
        Polynomial first = rw.nf(apply_step(P, Polynomial(m), steps[0]));
        for (size_t j = 1; j < steps.size(); ++j)
          if (rw.nf(apply_step(P, Polynomial(m), steps[j])) != first)
            return {false, "critical branchings confluent but the local branching on " + format_word(q, m) +
                               " is not joinable"};
      }
    return {};
  }
  // Some critical branching must then fail to be joinable; exhibit one.
  int undecided = 0;
  for (const auto &e : rep.entries) {
    Polynomial f1 = apply_step(P, e.branching.source, e.branching.first);
    Polynomial f2 = apply_step(P, e.branching.source, e.branching.second);
    bool c1 = false, c2 = false;
    auto r1 = reducts(P, f1, cap, c1);
    if (!c1) {
      ++undecided;
      continue;
    }
    auto r2 = reducts(P, f2, cap, c2);
    if (!c2) {
      ++undecided;
      continue;
    }
    std::set<std::string> s1(r1.begin(), r1.end());
    if (std::none_of(r2.begin(), r2.end(), [&](const std::string &k) { return s1.count(k) > 0; }))
      return {};
  }
  return {false, "some S-polynomial has a nonzero normal form, yet every critical branching looked joinable (" +
                     std::to_string(undecided) + " undecided by the search cap)"};
}

namespace {

bool same_tor(const TorTable &a, const TorTable &b, int kmax, int dmax, std::string &where) {
  for (int k = 0; k <= kmax; ++k)
    for (int i = 0; i <= dmax; ++i)
      if (a.at(k, i).lo != b.at(k, i).lo || a.at(k, i).hi != b.at(k, i).hi) {
        where = "(" + std::to_string(k) + ", " + std::to_string(i) + "): " + std::to_string(a.at(k, i).lo) + ".." +
                std::to_string(a.at(k, i).hi) + " vs " + std::to_string(b.at(k, i).lo) + ".." +
                std::to_string(b.at(k, i).hi);
        return false;
      }
  return true;
}

} // namespace

SystemOutcome check_system(const Polygraph2 &P, std::uint64_t seed) {
  SystemOutcome out;
  std::mt19937_64 rng(seed);
  auto fail = [&](const std::string &check, const std::string &detail) {
    out.failure = PropertyFailure{check, detail, print_presentation(P, false)};
    return out;
  };
  const Quiver &q = P.quiver();
  out.input_convergent = P.convergent();
  try {
    if (auto r = newman_agreement(P); !r.ok)
      return fail("newman", r.detail);

    auto cr = complete(P, *P.order(), {8, 64});
    if (!cr.certified)
      return out;
    out.completed = true;
    const Polygraph2 &Pc = cr.system;

    const int dI = 5;
    auto rels = relations_of(P);
    auto sb = standard_basis(Pc, dI);
    for (int d = 1; d <= dI; ++d) {
      DegreeIdeal I(q, rels, d);
      if (sb[static_cast<size_t>(d)].size() != I.quotient_dim())
        return fail("completion-hilbert", "degree " + std::to_string(d) + ": " +
                                              std::to_string(sb[static_cast<size_t>(d)].size()) + " irreducible vs " +
                                              std::to_string(I.quotient_dim()));
      for (int t = 0; t < 4; ++t) {
        Polynomial f = t % 2 ? random_ideal_element(rng, P, d, 3) : random_polynomial(rng, q, d, 3);
        if (ideal_member(f, Pc) != I.contains(f))
          return fail("ideal-member", "disagreement on " + format_polynomial(q, f));
      }
    }

    const int kmax = 3, dmax = 6, N = P.homogeneous_degree();
    ReducedComplex rc = build_complex(Pc, kmax, dmax);
    out.complex_built = true;
    if (auto r = reduced_d_squared(rc.data); !r.ok)
      return fail("d-squared", r.detail);
    if (auto r = module_d_squared(Pc, rc); !r.ok)
      return fail("d-squared", r.detail);

    TorTable tq = tor_from_complex(rc.data, kmax, dmax, N);
    std::string where;
    TorTable tp = tor_table(reduce_mod(Pc, 32003), kmax, dmax, N);
    if (!same_tor(tq, tp, kmax, dmax, where))
      return fail("q-vs-gfp", where);

    ComplexData sat = collapse_saturate(rc.data, N > 0 ? N : 2);
    if (auto r = reduced_d_squared(sat); !r.ok)
      return fail("d-squared", "after collapse: " + r.detail);
    if (!same_tor(tq, tor_from_complex(sat, kmax, dmax, N), kmax, dmax, where))
      return fail("collapse-invariance", "saturation " + where);
    ComplexData rnd = random_collapses(rc.data, rng, 3);
    if (!same_tor(tq, tor_from_complex(rnd, kmax, dmax, N), kmax, dmax, where))
      return fail("collapse-invariance", "random collapses " + where);

    auto bar = bar_tor(Pc, kmax, 5);
    for (int k = 0; k <= kmax; ++k)
      for (int i = 0; i <= 5; ++i)
        if (bar[static_cast<size_t>(k)][static_cast<size_t>(i)] != tq.at(k, i).lo)
          return fail("bar-oracle", "Tor(" + std::to_string(k) + ", " + std::to_string(i) + ") = " +
                                        std::to_string(tq.at(k, i).lo) + " but the bar complex gives " +
                                        std::to_string(bar[static_cast<size_t>(k)][static_cast<size_t>(i)]));

    // Euler characteristic in degrees without 4-cells (hence without any higher cells).
    for (int i = 0; i <= dmax; ++i) {
      if (rc.data.alive_count(4, i))
        continue;
      long cells = 0, tor = 0;
      for (int k = 0; k <= 3; ++k) {
        long sgn = k % 2 ? -1 : 1;
        cells += sgn * static_cast<long>(rc.data.alive_count(k, i));
        tor += sgn * tq.at(k, i).lo;
      }
      if (cells != tor)
        return fail("euler", "degree " + std::to_string(i));
    }
  } catch (const std::exception &e) {
    return fail("exception", e.what());
  }
  return out;
}

Polygraph2 shrink(const Polygraph2 &P, const std::string &check, std::uint64_t seed) {
  Polygraph2 cur = P;
  for (bool improved = true; improved;) {
    improved = false;
    std::vector<std::vector<Rule>> candidates;
    const auto &rules = cur.rules();
    for (size_t r = 0; r < rules.size() && rules.size() > 1; ++r) {
      auto v = rules;
      v.erase(v.begin() + static_cast<long>(r));
      candidates.push_back(v);
    }
    for (size_t r = 0; r < rules.size(); ++r)
      for (const auto &[m, c] : rules[r].target.terms()) {
        auto v = rules;
        Polynomial t = Polynomial::zero(rules[r].source.source, rules[r].source.target);
        for (const auto &[m2, c2] : rules[r].target.terms())
          if (!(m2 == m))
            t.add_term(m2, c2);
        v[r].target = t;
        candidates.push_back(v);
      }
    for (auto &v : candidates) {
      Polygraph2 c = certify(cur.with_rules(v));
      auto o = check_system(c, seed);
      if (o.failure && o.failure->check == check) {
        cur = c;
        improved = true;
        break;
      }
    }
  }
  return cur;
}

SuiteReport run_property_suite(std::uint64_t seed, int count, std::ostream *log) {
  SuiteReport rep;
  std::mt19937_64 rng(seed);
  for (int n = 0; n < count; ++n) {
    Polygraph2 P = random_system(rng);
    std::uint64_t s = rng();
    auto o = check_system(P, s);
    ++rep.systems;
    rep.non_confluent += !o.input_convergent;
    rep.completed += o.completed;
    rep.complexes += o.complex_built;
    if (o.failure) {
      Polygraph2 small = shrink(P, o.failure->check, s);
      auto again = check_system(small, s);
      PropertyFailure f = again.failure ? *again.failure : *o.failure;
      rep.failures.push_back(f);
      if (log)
        *log << "counterexample (" << f.check << "): " << f.detail << "\n" << f.system << "\n";
    }
  }
  return rep;
}

} // namespace linrew::testing
