#include "linrew/rewrite.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <functional>
#include <sstream>
#include <unordered_set>

namespace linrew {

FactorAutomaton::FactorAutomaton(const std::vector<Word> &patterns, size_t alphabet) : alphabet_(alphabet) {
  std::vector<std::vector<int>> trie(1, std::vector<int>(alphabet, -1));
  outputs_.assign(1, {});
  for (size_t r = 0; r < patterns.size(); ++r) {
    int s = 0;
    for (Gen g : patterns[r]) {
      if (trie[static_cast<size_t>(s)][g] < 0) {
        trie[static_cast<size_t>(s)][g] = static_cast<int>(trie.size());
        trie.emplace_back(alphabet, -1);
        outputs_.emplace_back();
      }
      s = trie[static_cast<size_t>(s)][g];
    }
    outputs_[static_cast<size_t>(s)].emplace_back(static_cast<int>(r), patterns[r].size());
  }
  size_t n = trie.size();
  delta_.assign(n * alphabet, 0);
  std::vector<int> fail(n, 0);
  std::deque<int> queue;
  for (size_t g = 0; g < alphabet; ++g) {
    int t = trie[0][g];
    if (t >= 0) {
      delta_[g] = t;
      fail[static_cast<size_t>(t)] = 0;
      queue.push_back(t);
    } else {
      delta_[g] = 0;
    }
  }
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    auto &out = outputs_[static_cast<size_t>(s)];
    const auto &inherited = outputs_[static_cast<size_t>(fail[static_cast<size_t>(s)])];
    out.insert(out.end(), inherited.begin(), inherited.end());
    for (size_t g = 0; g < alphabet; ++g) {
      int t = trie[static_cast<size_t>(s)][g];
      size_t idx = static_cast<size_t>(s) * alphabet + g;
      if (t >= 0) {
        fail[static_cast<size_t>(t)] = delta_[static_cast<size_t>(fail[static_cast<size_t>(s)]) * alphabet + g];
        delta_[idx] = t;
        queue.push_back(t);
      } else {
        delta_[idx] = delta_[static_cast<size_t>(fail[static_cast<size_t>(s)]) * alphabet + g];
      }
    }
  }
}

std::vector<Occurrence> FactorAutomaton::scan(const Word &w) const {
  std::vector<Occurrence> occ;
  if (alphabet_ == 0)
    return occ;
  int s = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    s = step(s, w[i]);
    for (auto [rule, len] : outputs_[static_cast<size_t>(s)])
      occ.push_back({i + 1 - len, len, rule});
  }
  std::sort(occ.begin(), occ.end(), [](const Occurrence &a, const Occurrence &b) {
    return a.start != b.start ? a.start < b.start : a.rule < b.rule;
  });
  return occ;
}

bool FactorAutomaton::matches_anywhere(const Word &w) const {
  if (alphabet_ == 0)
    return false;
  int s = 0;
  for (Gen g : w) {
    s = step(s, g);
    if (accepting(s))
      return true;
  }
  return false;
}

long MeasureSpec::measure(const Word &w) const {
  long total = 0;
  for (Gen g : w)
    for (const auto &[letter, weight] : letters)
      if (letter == g)
        total += weight;
  for (const auto &[pat, weight] : patterns) {
    if (pat.empty() || pat.size() > w.size())
      continue;
    for (size_t i = 0; i + pat.size() <= w.size(); ++i)
      if (std::equal(pat.begin(), pat.end(), w.begin() + static_cast<long>(i)))
        total += weight;
  }
  return total;
}

std::string to_string(TerminationCertificate::Kind k) {
  switch (k) {
  case TerminationCertificate::Kind::OrderCompatible:
    return "order-compatible";
  case TerminationCertificate::Kind::PatternMeasure:
    return "pattern-measure";
  case TerminationCertificate::Kind::UserAsserted:
    return "user-asserted";
  }
  return "";
}

Polygraph2::Polygraph2(Field field, Quiver quiver, std::vector<Rule> rules, std::optional<MonomialOrder> order)
    : field_(std::move(field)), quiver_(std::move(quiver)), rules_(std::move(rules)), order_(std::move(order)) {
  rebuild();
}

int Polygraph2::find_rule(const std::string &name) const {
  for (size_t i = 0; i < rules_.size(); ++i)
    if (rules_[i].name == name)
      return static_cast<int>(i);
  return -1;
}

void Polygraph2::set_certificates(std::optional<TerminationCertificate> t, bool convergent) {
  termination_ = std::move(t);
  convergent_ = convergent;
}

Polygraph2 Polygraph2::with_rules(std::vector<Rule> rules) const {
  Polygraph2 p(field_, quiver_, std::move(rules), order_);
  p.measure_hint_ = measure_hint_;
  return p;
}

void Polygraph2::rebuild() {
  std::vector<Word> sources;
  for (const auto &r : rules_) {
    if (r.source.is_identity())
      throw std::invalid_argument("rule " + r.name + " has an identity source");
    for (const auto &[m, c] : r.target.terms())
      if (!m.parallel(r.source))
        throw CompositionError("rule " + r.name + ": source and target are not parallel");
    sources.push_back(r.source.word);
  }
  automaton_ = FactorAutomaton(sources, quiver_.num_generators());

  left_reduced_ = right_reduced_ = homogeneous_ = true;
  homogeneous_degree_ = -1;
  int common = -2;
  for (size_t i = 0; i < rules_.size(); ++i) {
    const auto &r = rules_[i];
    for (const auto &o : automaton_.scan(r.source.word))
      if (o.rule != static_cast<int>(i))
        left_reduced_ = false;
    for (const auto &[m, c] : r.target.terms())
      if (automaton_.matches_anywhere(m.word))
        right_reduced_ = false;
    int ds = degree(quiver_, r.source), dt = -1;
    if (!r.target.homogeneous(quiver_, &dt) || (dt >= 0 && dt != ds))
      homogeneous_ = false;
    common = common == -2 ? ds : (common == ds ? ds : -1);
  }
  if (homogeneous_ && common >= 0)
    homogeneous_degree_ = common;
}

Monomial RewriteStep::redex_word(const Polygraph2 &P) const {
  return compose(compose(left, P.rule(rule).source), right);
}

Polynomial apply_step(const Polygraph2 &P, const Polynomial &f, const RewriteStep &s) {
  Monomial w = s.redex_word(P);
  if (s.coeff.is_zero() || f.coeff(w) != s.coeff)
    throw std::invalid_argument("rewriting step does not match the polynomial (coefficient side condition)");
  const Rule &r = P.rule(s.rule);
  Polynomial diff = Polynomial(r.source) - r.target;
  return f - diff.whisker(s.left, s.right) * s.coeff;
}

namespace {

RewriteStep make_step(const Polygraph2 &P, const Monomial &m, const Scalar &c, const Occurrence &o) {
  const Quiver &q = P.quiver();
  return {c, m.slice(q, 0, o.start), o.rule, m.slice(q, o.end(), m.length())};
}

std::optional<Occurrence> pick(const std::vector<Occurrence> &occ, Strategy s) {
  if (occ.empty())
    return std::nullopt;
  if (s == Strategy::Leftmost)
    return occ.front();
  size_t best = occ.back().start;
  for (const auto &o : occ)
    if (o.start == best)
      return o; // sorted by rule id within a start position
  return occ.back();
}

} // namespace

std::vector<RewriteStep> find_redexes(const Polynomial &f, const Polygraph2 &P) {
  std::vector<RewriteStep> steps;
  for (const auto &[m, c] : f.terms())
    for (const auto &o : P.occurrences(m.word))
      steps.push_back(make_step(P, m, c, o));
  return steps;
}

RewriteStep rightmost_step(const Monomial &m, const Polygraph2 &P) {
  auto o = pick(P.occurrences(m.word), Strategy::Rightmost);
  if (!o)
    throw NoStepError("monomial is irreducible");
  return make_step(P, m, Scalar(1), *o);
}

RewriteStep leftmost_step(const Monomial &m, const Polygraph2 &P) {
  auto o = pick(P.occurrences(m.word), Strategy::Leftmost);
  if (!o)
    throw NoStepError("monomial is irreducible");
  return make_step(P, m, Scalar(1), *o);
}

Rewriter::Rewriter(const Polygraph2 &P, size_t step_budget) : P_(P), budget_(step_budget) {}

std::optional<Occurrence> Rewriter::redex(const Monomial &m, Strategy s) {
  if (s == Strategy::Leftmost)
    return pick(P_.occurrences(m.word), s);
  auto it = right_redex_.find(m);
  if (it != right_redex_.end())
    return it->second;
  auto o = pick(P_.occurrences(m.word), s);
  right_redex_.emplace(m, o);
  return o;
}

const Polynomial &Rewriter::nf(const Monomial &m) {
  auto it = memo_.find(m);
  if (it != memo_.end())
    return it->second;
  // Iterative post-order evaluation, so long reductions do not exhaust the stack.
  struct Frame {
    Monomial m;
    Polynomial expansion;
    bool expanded = false;
  };
  std::vector<Frame> stack;
  std::unordered_set<Monomial, MonomialHash> open;
  stack.push_back({m, {}, false});
  while (!stack.empty()) {
    Frame &fr = stack.back();
    if (memo_.count(fr.m)) {
      open.erase(fr.m);
      stack.pop_back();
      continue;
    }
    if (!fr.expanded) {
      auto o = redex(fr.m, Strategy::Rightmost);
      if (!o) {
        memo_.emplace(fr.m, Polynomial(fr.m));
        stack.pop_back();
        continue;
      }
      if (++steps_ > budget_)
        throw NonTerminationSuspected("step budget exhausted while normalizing", Trace{});
      if (!open.insert(fr.m).second)
        throw NonTerminationSuspected("rewriting cycle through a monomial", Trace{});
      const Quiver &q = P_.quiver();
      fr.expansion = P_.rule(o->rule).target.whisker(fr.m.slice(q, 0, o->start),
                                                      fr.m.slice(q, o->end(), fr.m.length()));
      fr.expanded = true;
      std::vector<Monomial> pending;
      for (const auto &[w, c] : fr.expansion.terms())
        if (!memo_.count(w)) {
          if (open.count(w))
            throw NonTerminationSuspected("rewriting cycle through a monomial", Trace{});
          pending.push_back(w);
        }
      for (auto &w : pending)
        stack.push_back({w, {}, false});
      continue;
    }
    Polynomial result = Polynomial::zero(fr.m.source, fr.m.target);
    for (const auto &[w, c] : fr.expansion.terms())
      result += memo_.at(w) * c;
    open.erase(fr.m);
    Monomial key = fr.m;
    stack.pop_back();
    memo_.emplace(std::move(key), std::move(result));
  }
  return memo_.at(m);
}

Polynomial Rewriter::nf(const Polynomial &f) {
  Polynomial r = Polynomial::zero(f.source(), f.target());
  for (const auto &[m, c] : f.terms())
    r += nf(m) * c;
  return r;
}

NormalFormResult Rewriter::normal_form(const Polynomial &f, Strategy strategy) {
  Trace tr;
  tr.start = f;
  Polynomial g = f;
  const Quiver &q = P_.quiver();
  size_t used = 0;
  CanonicalLess less;
  for (;;) {
    const Monomial *best = nullptr;
    std::optional<Occurrence> best_occ;
    for (const auto &[m, c] : g.terms()) {
      auto o = redex(m, strategy);
      if (!o)
        continue;
      bool better = false;
      if (!best) {
        better = true;
      } else if (strategy == Strategy::Rightmost) {
        better = o->start > best_occ->start || (o->start == best_occ->start && less(m, *best));
      } else {
        better = o->start < best_occ->start || (o->start == best_occ->start && less(m, *best));
      }
      if (better) {
        best = &m;
        best_occ = o;
      }
    }
    if (!best)
      break;
    if (++used > budget_) {
      tr.end = g;
      throw NonTerminationSuspected("step budget of " + std::to_string(budget_) + " exhausted", tr);
    }
    RewriteStep s{g.coeff(*best), best->slice(q, 0, best_occ->start), best_occ->rule,
                  best->slice(q, best_occ->end(), best->length())};
    const Rule &r = P_.rule(s.rule);
    Polynomial diff = Polynomial(r.source) - r.target;
    g -= diff.whisker(s.left, s.right) * s.coeff;
    tr.steps.push_back(std::move(s));
  }
  tr.end = g;
  return {g, std::move(tr)};
}

NormalFormResult normal_form(const Polynomial &f, const Polygraph2 &P, Strategy strategy, size_t step_budget) {
  Rewriter rw(P, step_budget);
  return rw.normal_form(f, strategy);
}

bool ideal_member(const Polynomial &f, const Polygraph2 &P) {
  if (!P.convergent())
    throw std::logic_error("ideal membership requires a certified convergent polygraph");
  Rewriter rw(P);
  return rw.nf(f).is_zero();
}

namespace {

template <class Visit>
void walk_words(const Quiver &q, int dmax, const FactorAutomaton *avoid, Visit visit) {
  struct Item {
    Word w;
    int object;
    int deg;
    int state;
  };
  for (int obj = 0; obj < static_cast<int>(q.objects().size()); ++obj) {
    std::vector<Item> stack{{{}, obj, 0, 0}};
    while (!stack.empty()) {
      Item it = std::move(stack.back());
      stack.pop_back();
      int src = it.w.empty() ? obj : q.generator(it.w.front()).source;
      visit(Monomial(it.w, src, it.object), it.deg);
      for (Gen g = 0; g < q.num_generators(); ++g) {
        const auto &gen = q.generator(g);
        if (gen.source != it.object || it.deg + gen.degree > dmax)
          continue;
        int st = 0;
        if (avoid) {
          st = avoid->step(it.state, g);
          if (avoid->accepting(st))
            continue;
        }
        Word w = it.w;
        w.push_back(g);
        stack.push_back({std::move(w), gen.target, it.deg + gen.degree, st});
      }
    }
  }
}

} // namespace

std::vector<std::vector<Monomial>> irreducible_monomials(const Polygraph2 &P, int dmax) {
  std::vector<std::vector<Monomial>> out(static_cast<size_t>(std::max(dmax, 0) + 1));
  walk_words(P.quiver(), dmax, &P.automaton(), [&](const Monomial &m, int d) { out[static_cast<size_t>(d)].push_back(m); });
  for (auto &v : out)
    std::sort(v.begin(), v.end(), CanonicalLess());
  return out;
}

std::vector<std::vector<Monomial>> standard_basis(const Polygraph2 &P, int dmax) {
  if (!P.convergent())
    throw std::logic_error("standard basis requires a certified convergent polygraph");
  return irreducible_monomials(P, dmax);
}

std::vector<Monomial> all_monomials(const Quiver &q, int d) {
  std::vector<Monomial> out;
  walk_words(q, d, nullptr, [&](const Monomial &m, int e) {
    if (e == d)
      out.push_back(m);
  });
  std::sort(out.begin(), out.end(), CanonicalLess());
  return out;
}

Polygraph2 monomialize(const Polygraph2 &P) {
  std::vector<Rule> rules;
  for (const auto &r : P.rules())
    rules.push_back({r.name, r.source, Polynomial::zero(r.source.source, r.source.target)});
  Polygraph2 M = P.with_rules(std::move(rules));
  // Zero targets: every step removes a term, and every S-polynomial is 0.
  TerminationCertificate cert;
  if (P.order()) {
    cert.kind = TerminationCertificate::Kind::OrderCompatible;
    cert.order = P.order();
  }
  cert.notes = "all targets are zero";
  M.set_certificates(cert, true);
  return M;
}

std::vector<Polynomial> relations_of(const Polygraph2 &P) {
  std::vector<Polynomial> rel;
  for (const auto &r : P.rules())
    rel.push_back(Polynomial(r.source) - r.target);
  return rel;
}

DegreeIdeal::DegreeIdeal(const Quiver &q, const std::vector<Polynomial> &relations, int d) : d_(d) {
  words_ = all_monomials(q, d);
  for (size_t i = 0; i < words_.size(); ++i)
    index_.emplace(words_[i], static_cast<int>(i));
  std::vector<std::vector<Monomial>> by_degree(static_cast<size_t>(d) + 1);
  for (int e = 0; e <= d; ++e)
    by_degree[static_cast<size_t>(e)] = all_monomials(q, e);
  for (const auto &rel : relations) {
    if (rel.is_zero())
      continue;
    int e = -1;
    if (!rel.homogeneous(q, &e))
      throw std::invalid_argument("brute-force ideal model needs homogeneous relations");
    if (e > d)
      continue;
    for (int a = 0; a <= d - e; ++a)
      for (const auto &u : by_degree[static_cast<size_t>(a)]) {
        if (u.target != rel.source())
          continue;
        for (const auto &v : by_degree[static_cast<size_t>(d - e - a)]) {
          if (v.source != rel.target())
            continue;
          ech_.insert(vectorize(rel.whisker(u, v)));
        }
      }
  }
}

SparseVec DegreeIdeal::vectorize(const Polynomial &f) const {
  SparseVec v;
  for (const auto &[m, c] : f.terms()) {
    auto it = index_.find(m);
    if (it == index_.end())
      throw std::invalid_argument("polynomial has a term outside degree " + std::to_string(d_));
    v.emplace(it->second, c);
  }
  return v;
}

bool DegreeIdeal::contains(const Polynomial &f) const { return ech_.contains(vectorize(f)); }

namespace {

std::string word_text(const Quiver &q, const Monomial &m) {
  if (m.is_identity())
    return "1";
  std::string s;
  for (size_t i = 0; i < m.word.size(); ++i) {
    if (i)
      s += " ";
    s += q.generator(m.word[i]).name;
  }
  return s;
}

} // namespace

PbwReport pbw_check(const Polygraph2 &P, const std::vector<Monomial> &candidate, int dmax, bool build_xi) {
  const Quiver &q = P.quiver();
  int N = P.homogeneous_degree();
  if (N < 1)
    throw std::invalid_argument("PBW check needs an N-homogeneous presentation");
  PbwReport rep;
  rep.dmax = dmax;
  std::unordered_set<Monomial, MonomialHash> cand(candidate.begin(), candidate.end());
  std::vector<std::vector<Monomial>> by_degree(static_cast<size_t>(dmax) + 1);
  for (const auto &m : candidate) {
    int d = degree(q, m);
    if (d <= dmax)
      by_degree[static_cast<size_t>(d)].push_back(m);
  }
  for (auto &v : by_degree)
    std::sort(v.begin(), v.end(), CanonicalLess());
  auto fail = [&](int d, const std::string &msg) {
    if (rep.first_failure_degree < 0 || d < rep.first_failure_degree)
      rep.first_failure_degree = d;
    rep.failures.push_back("degree " + std::to_string(d) + ": " + msg);
  };

  auto rels = relations_of(P);
  std::vector<Echelon> cand_echelons(static_cast<size_t>(dmax) + 1);
  std::vector<std::unique_ptr<DegreeIdeal>> ideals(static_cast<size_t>(dmax) + 1);
  // i) basis property, degree by degree
  for (int d = 0; d <= dmax; ++d) {
    ideals[static_cast<size_t>(d)] = std::make_unique<DegreeIdeal>(q, rels, d);
    const DegreeIdeal &I = *ideals[static_cast<size_t>(d)];
    const auto &cs = by_degree[static_cast<size_t>(d)];
    int W = static_cast<int>(I.dim_free());
    Echelon &E = cand_echelons[static_cast<size_t>(d)];
    bool independent = true;
    for (size_t j = 0; j < cs.size(); ++j) {
      SparseVec v = I.echelon().reduce(I.vectorize(Polynomial(cs[j])));
      v[W + static_cast<int>(j)] = Scalar(1);
      SparseVec red = E.reduce(v);
      if (!red.empty() && red.begin()->first < W) {
        E.insert(red);
        continue;
      }
      independent = false;
      std::string names;
      for (const auto &[i, c] : red) {
        if (!names.empty())
          names += ", ";
        names += word_text(q, cs[static_cast<size_t>(i - W)]);
      }
      fail(d, "candidates " + names + " are linearly dependent in the algebra");
      rep.basis_ok = false;
      break;
    }
    if (independent && cs.size() != I.quotient_dim()) {
      rep.basis_ok = false;
      fail(d, std::to_string(cs.size()) + " candidates for a space of dimension " + std::to_string(I.quotient_dim()));
    }
  }
  // ii) closure or reducibility of composites
  for (int du = 1; du <= dmax; ++du)
    for (const auto &u : by_degree[static_cast<size_t>(du)])
      for (int dv = 1; du + dv <= dmax; ++dv)
        for (const auto &v : by_degree[static_cast<size_t>(dv)]) {
          if (u.target != v.source)
            continue;
          Monomial uv = compose(u, v);
          if (!cand.count(uv) && !P.reducible(uv.word)) {
            rep.closure_ok = false;
            fail(du + dv, "composite " + word_text(q, uv) + " is neither a candidate nor reducible");
          }
        }
  // iii) N-window condition
  for (int d = 0; d <= dmax; ++d)
    for (const auto &w : all_monomials(q, d)) {
      bool windows = true;
      if (w.length() >= static_cast<size_t>(N)) {
        for (size_t k = 0; k + static_cast<size_t>(N) <= w.length(); ++k)
          if (!cand.count(w.slice(q, k, k + static_cast<size_t>(N))))
            windows = false;
      }
      if (windows != static_cast<bool>(cand.count(w))) {
        rep.window_ok = false;
        fail(d, "word " + word_text(q, w) + " violates the " + std::to_string(N) + "-window condition");
      }
    }
  // The polygraph uv => [uv] on pairs of candidates of total degree N.
  if (build_xi && rep.basis_ok && N <= dmax) {
    const DegreeIdeal &I = *ideals[static_cast<size_t>(N)];
    const auto &cs = by_degree[static_cast<size_t>(N)];
    int W = static_cast<int>(I.dim_free());
    int slot = W + static_cast<int>(cs.size());
    std::set<Word> seen;
    for (int du = 1; du < N; ++du)
      for (const auto &u : by_degree[static_cast<size_t>(du)])
        for (const auto &v : by_degree[static_cast<size_t>(N - du)]) {
          if (u.target != v.source)
            continue;
          Monomial uv = compose(u, v);
          if (cand.count(uv) || !seen.insert(uv.word).second)
            continue;
          SparseVec vec = I.echelon().reduce(I.vectorize(Polynomial(uv)));
          vec[slot] = Scalar(1);
          SparseVec red = cand_echelons[static_cast<size_t>(N)].reduce(vec);
          Polynomial target = Polynomial::zero(uv.source, uv.target);
          for (const auto &[i, c] : red)
            if (i >= W && i < slot)
              target.add_term(cs[static_cast<size_t>(i - W)], -c);
          rep.xi_rules.push_back({"xi" + std::to_string(rep.xi_rules.size() + 1), uv, target});
        }
    rep.xi_built = true;
  }
  return rep;
}

} // namespace linrew
