#include "linrew/completion.hpp"
#include "linrew/parallel.hpp"

#include <algorithm>
#include <set>

namespace linrew {

namespace {

std::string rule_label(const Polygraph2 &P, int id) {
  const auto &name = P.rule(id).name;
  return name.empty() ? "#" + std::to_string(id) : name;
}

// Composable words of length <= L starting (or ending) at an object.
std::vector<Monomial> contexts(const Quiver &q, int L, int object, bool ending_at) {
  std::vector<Monomial> out{Monomial::identity(object)};
  std::vector<Monomial> frontier = out;
  for (int len = 1; len <= L; ++len) {
    std::vector<Monomial> next;
    for (const auto &m : frontier)
      for (Gen g = 0; g < q.num_generators(); ++g) {
        const auto &gen = q.generator(g);
        if (ending_at) {
          if (gen.target != m.source)
            continue;
          Word w{g};
          w.insert(w.end(), m.word.begin(), m.word.end());
          next.emplace_back(std::move(w), gen.source, m.target);
        } else {
          if (gen.source != m.target)
            continue;
          Word w = m.word;
          w.push_back(g);
          next.emplace_back(std::move(w), m.source, gen.target);
        }
      }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

TerminationReport check_order(const Polygraph2 &P, const MonomialOrder &ord) {
  TerminationReport rep;
  const Quiver &q = P.quiver();
  for (size_t i = 0; i < P.rules().size(); ++i) {
    const auto &r = P.rules()[i];
    for (const auto &[m, c] : r.target.terms())
      if (!ord.less(q, m, r.source)) {
        rep.violating_rule = static_cast<int>(i);
        rep.failure = "rule " + rule_label(P, static_cast<int>(i)) + " does not decrease under the monomial order";
        return rep;
      }
  }
  rep.ok = true;
  TerminationCertificate cert;
  cert.kind = TerminationCertificate::Kind::OrderCompatible;
  cert.order = ord;
  cert.notes = "every rule target is smaller than its source in a well-founded compatible order";
  rep.certificate = cert;
  return rep;
}

TerminationReport check_measure(const Polygraph2 &P, const MeasureSpec &ms) {
  TerminationReport rep;
  for (const auto &[g, w] : ms.letters)
    if (w < 0) {
      rep.failure = "measure weights must be nonnegative";
      return rep;
    }
  size_t longest = 1;
  for (const auto &[pat, w] : ms.patterns) {
    if (w < 0) {
      rep.failure = "measure weights must be nonnegative";
      return rep;
    }
    longest = std::max(longest, pat.size());
  }
  const Quiver &q = P.quiver();
  for (size_t i = 0; i < P.rules().size(); ++i) {
    const auto &r = P.rules()[i];
    auto lefts = contexts(q, ms.context, r.source.source, true);
    auto rights = contexts(q, ms.context, r.source.target, false);
    for (const auto &u : lefts)
      for (const auto &v : rights) {
        long before = ms.measure(compose(compose(u, r.source), v).word);
        for (const auto &[t, c] : r.target.terms()) {
          long after = ms.measure(compose(compose(u, t), v).word);
          if (after >= before) {
            rep.violating_rule = static_cast<int>(i);
            rep.failure = "rule " + rule_label(P, static_cast<int>(i)) + " does not decrease the measure in some context";
            return rep;
          }
        }
      }
  }
  rep.ok = true;
  TerminationCertificate cert;
  cert.kind = TerminationCertificate::Kind::PatternMeasure;
  cert.measure = ms;
  if (longest <= static_cast<size_t>(ms.context) + 1)
    cert.notes = "decrease checked in all contexts up to length " + std::to_string(ms.context) +
                 "; every pattern occurrence meeting a redex lies inside such a context, so the check is complete";
  else
    cert.notes = "decrease checked in contexts up to length " + std::to_string(ms.context) +
                 " only; patterns are longer than the context bound, so the certificate is not a proof";
  rep.certificate = cert;
  return rep;
}

} // namespace

TerminationReport certify_termination(const Polygraph2 &P, const TerminationHint &hint) {
  TerminationReport last;
  last.failure = "no termination hint available";
  if (hint.measure) {
    last = check_measure(P, *hint.measure);
    if (last.ok)
      return last;
  }
  if (hint.order) {
    auto r = check_order(P, *hint.order);
    if (r.ok || !hint.measure)
      return r;
    last.failure += "; " + r.failure;
  }
  return last;
}

TerminationReport certify_termination(const Polygraph2 &P) {
  return certify_termination(P, TerminationHint{P.order(), P.measure_hint()});
}

std::string to_string(BranchingKind k) {
  switch (k) {
  case BranchingKind::Aspherical:
    return "aspherical";
  case BranchingKind::Peiffer:
    return "Peiffer";
  case BranchingKind::AdditivePeiffer:
    return "additive-Peiffer";
  case BranchingKind::Overlapping:
    return "overlapping";
  case BranchingKind::Critical:
    return "critical";
  }
  return "";
}

Branching classify_branching(const Polygraph2 &P, const Polynomial &f, const RewriteStep &a, const RewriteStep &b) {
  Branching br;
  br.source = f;
  br.first = a;
  br.second = b;
  Monomial wa = a.redex_word(P), wb = b.redex_word(P);
  if (a == b) {
    br.kind = BranchingKind::Aspherical;
    return br;
  }
  if (!(wa == wb)) {
    br.kind = BranchingKind::AdditivePeiffer;
    return br;
  }
  br.first_start = a.left.length();
  br.first_end = br.first_start + P.rule(a.rule).source.length();
  br.second_start = b.left.length();
  br.second_end = br.second_start + P.rule(b.rule).source.length();
  if (br.first_end <= br.second_start || br.second_end <= br.first_start) {
    br.kind = BranchingKind::Peiffer;
    return br;
  }
  br.inclusion = (br.first_start <= br.second_start && br.second_end <= br.first_end) ||
                 (br.second_start <= br.first_start && br.first_end <= br.second_end);
  bool whole = std::min(br.first_start, br.second_start) == 0 && std::max(br.first_end, br.second_end) == wa.length();
  bool bare = f.size() == 1 && f.coeff(wa).is_one();
  br.kind = whole && bare ? BranchingKind::Critical : BranchingKind::Overlapping;
  return br;
}

std::vector<Branching> enumerate_critical_branchings(const Polygraph2 &P) {
  std::vector<Branching> out;
  const Quiver &q = P.quiver();
  const auto &rules = P.rules();
  for (size_t i = 0; i < rules.size(); ++i) {
    const Word &a = rules[i].source.word;
    for (size_t j = 0; j < rules.size(); ++j) {
      const Word &b = rules[j].source.word;
      // inclusions: source j occurs inside source i
      if (i != j) {
        for (const auto &o : P.occurrences(a)) {
          if (o.rule != static_cast<int>(j))
            continue;
          if (a.size() == b.size() && j < i)
            continue; // equal sources are reported once
          Monomial w = rules[i].source;
          RewriteStep s1{Scalar(1), Monomial::identity(w.source), static_cast<int>(i), Monomial::identity(w.target)};
          RewriteStep s2{Scalar(1), w.slice(q, 0, o.start), static_cast<int>(j), w.slice(q, o.end(), w.length())};
          out.push_back(classify_branching(P, Polynomial(w), s1, s2));
        }
      }
      for (size_t k = 1; k < std::min(a.size(), b.size()); ++k) {
        if (!std::equal(a.end() - static_cast<long>(k), a.end(), b.begin()))
          continue;
        Word w = a;
        w.insert(w.end(), b.begin() + static_cast<long>(k), b.end());
        Monomial m = Monomial::path(q, w);
        RewriteStep s1{Scalar(1), Monomial::identity(m.source), static_cast<int>(i), m.slice(q, a.size(), w.size())};
        RewriteStep s2{Scalar(1), m.slice(q, 0, a.size() - k), static_cast<int>(j), Monomial::identity(m.target)};
        out.push_back(classify_branching(P, Polynomial(m), s1, s2));
      }
    }
  }
  return out;
}

SPolynomial s_polynomial(const Polygraph2 &P, const Branching &b) {
  SPolynomial s;
  s.first_rule = b.first.rule;
  s.second_rule = b.second.rule;
  s.word = b.first.redex_word(P);
  Polynomial t1 = P.rule(b.first.rule).target.whisker(b.first.left, b.first.right);
  Polynomial t2 = P.rule(b.second.rule).target.whisker(b.second.left, b.second.right);
  s.value = t1 - t2;
  return s;
}

ConfluenceReport check_confluence(const Polygraph2 &P, const TerminationCertificate &cert, bool with_joins) {
  ConfluenceReport rep;
  rep.termination = cert;
  auto branchings = enumerate_critical_branchings(P);
  rep.entries.resize(branchings.size());
  size_t workers = worker_count();
  // Traced joins can be exponentially long even when the memoized normal
  // form is cheap, so they get their own step budget.
  constexpr size_t kJoinBudget = 20000;
  std::vector<std::unique_ptr<Rewriter>> rw, traced;
  for (size_t w = 0; w < std::max<size_t>(1, std::min(workers, branchings.size())); ++w) {
    rw.push_back(std::make_unique<Rewriter>(P));
    traced.push_back(std::make_unique<Rewriter>(P, kJoinBudget));
  }
  parallel_for(branchings.size(), workers, [&](size_t i, size_t w) {
    ConfluenceEntry e;
    e.branching = branchings[i];
    e.s = s_polynomial(P, e.branching);
    const auto &b = e.branching;
    Polynomial t1 = P.rule(b.first.rule).target.whisker(b.first.left, b.first.right);
    Polynomial t2 = P.rule(b.second.rule).target.whisker(b.second.left, b.second.right);
    e.s_normal_form = rw[w]->nf(e.s.value);
    e.joins_complete = false;
    if (with_joins) {
      try {
        e.first_join = traced[w]->normal_form(t1).trace;
        e.second_join = traced[w]->normal_form(t2).trace;
        e.joins_complete = true;
      } catch (const NonTerminationSuspected &) {
      }
    }
    e.confluent = e.s_normal_form.is_zero();
    rep.entries[i] = std::move(e);
  });
  rep.convergent = std::all_of(rep.entries.begin(), rep.entries.end(), [](const auto &e) { return e.confluent; });
  return rep;
}

Polygraph2 certify(const Polygraph2 &P) {
  Polygraph2 out = P;
  auto t = certify_termination(P);
  if (!t.ok) {
    out.set_certificates(std::nullopt, false);
    return out;
  }
  auto c = check_confluence(P, *t.certificate, false);
  out.set_certificates(t.certificate, c.convergent);
  return out;
}

Rule orient(const Polygraph2 &P, const Polynomial &f, const MonomialOrder &ord, const std::string &name) {
  auto ld = leading_data(P.quiver(), f, ord);
  if (ld.zero)
    throw InputError("cannot orient the zero relation" + (name.empty() ? "" : " " + name));
  Polynomial target = Polynomial(ld.lm) - f * ld.lc.inverse();
  return {name, ld.lm, target};
}

namespace {

std::string fresh_name(const std::vector<Rule> &rules, size_t &counter) {
  for (;;) {
    std::string n = "r" + std::to_string(++counter);
    bool used = std::any_of(rules.begin(), rules.end(), [&](const Rule &r) { return r.name == n; });
    if (!used)
      return n;
  }
}

Polygraph2 with_order(const Polygraph2 &P, std::vector<Rule> rules, const MonomialOrder &ord) {
  Polygraph2 out(P.field(), P.quiver(), std::move(rules), ord);
  out.set_measure_hint(P.measure_hint());
  return out;
}

} // namespace

Polygraph2 interreduce(const Polygraph2 &P) {
  std::vector<Rule> rules = P.rules();
  const Quiver &q = P.quiver();
  for (size_t guard = 0;; ++guard) {
    if (guard > 100000)
      throw std::runtime_error("interreduction does not stabilize");
    Polygraph2 cur = P.with_rules(rules);
    // left reduction: the first rule whose source contains another source
    int victim = -1;
    for (size_t i = 0; i < rules.size() && victim < 0; ++i)
      for (const auto &o : cur.occurrences(rules[i].source.word))
        if (o.rule != static_cast<int>(i)) {
          victim = static_cast<int>(i);
          break;
        }
    if (victim >= 0) {
      Rule removed = rules[static_cast<size_t>(victim)];
      rules.erase(rules.begin() + victim);
      Polygraph2 others = P.with_rules(rules);
      Rewriter rw(others);
      Polynomial f = rw.nf(Polynomial(removed.source) - removed.target);
      if (!f.is_zero()) {
        if (!P.order())
          throw std::logic_error("re-orienting rule " + removed.name + " needs a monomial order");
        rules.insert(rules.begin() + victim, orient(others, f, *P.order(), removed.name));
      }
      continue;
    }
    // right reduction
    bool changed = false;
    Rewriter rw(cur);
    for (auto &r : rules) {
      Polynomial t = rw.nf(r.target);
      if (t != r.target) {
        if (t.source() < 0)
          t = Polynomial::zero(r.source.source, r.source.target);
        r.target = t;
        changed = true;
      }
    }
    (void)q;
    if (!changed)
      break;
  }
  Polygraph2 out = P.with_rules(rules);
  return out;
}

CompletionResult complete(const Polygraph2 &P, const MonomialOrder &ord, const CompletionBounds &bounds) {
  CompletionResult res;
  // Already convergent and reduced: nothing to do.
  {
    auto t = certify_termination(P);
    if (t.ok && P.left_reduced() && P.right_reduced()) {
      auto c = check_confluence(P, *t.certificate, false);
      if (c.convergent) {
        res.system = P;
        res.system.set_certificates(t.certificate, true);
        res.certified = true;
        res.unchanged = true;
        res.note = "input is already reduced and convergent";
        return res;
      }
    }
  }
  std::vector<Rule> rules;
  for (const auto &r : P.rules())
    rules.push_back(orient(P, Polynomial(r.source) - r.target, ord, r.name));
  Polygraph2 cur = interreduce(with_order(P, rules, ord));
  size_t counter = 0;
  const Quiver &q = P.quiver();
  for (;;) {
    auto branchings = enumerate_critical_branchings(cur);
    // pending obligations in ascending overlap degree, then creation order
    std::vector<std::pair<int, size_t>> order;
    for (size_t i = 0; i < branchings.size(); ++i)
      order.emplace_back(degree(q, branchings[i].word(cur)), i);
    std::stable_sort(order.begin(), order.end(),
                     [](const auto &a, const auto &b) { return a.first < b.first; });
    int batch_degree = -1;
    bool added_any = false;
    std::vector<Rule> working = cur.rules();
    Polygraph2 growing = cur;
    auto rw = std::make_unique<Rewriter>(growing);
    for (const auto &[deg, idx] : order) {
      if (batch_degree >= 0 && deg != batch_degree)
        break;
      SPolynomial s = s_polynomial(cur, branchings[idx]);
      Polynomial f = rw->nf(s.value);
      if (f.is_zero())
        continue;
      if (deg > bounds.max_degree) {
        res.bound_exceeded = true;
        res.note = "an obligation of degree " + std::to_string(deg) + " exceeds the degree bound";
        break;
      }
      batch_degree = deg;
      if (working.size() + 1 > bounds.max_rules) {
        res.bound_exceeded = true;
        res.note = "rule bound of " + std::to_string(bounds.max_rules) + " reached";
        break;
      }
      working.push_back(orient(growing, f, ord, fresh_name(working, counter)));
      growing = with_order(P, working, ord);
      rw = std::make_unique<Rewriter>(growing);
      added_any = true;
    }
    cur = interreduce(with_order(P, working, ord));
    if (res.bound_exceeded || !added_any)
      break;
  }
  auto t = certify_termination(cur, TerminationHint{ord, std::nullopt});
  bool convergent = false;
  // A truncated run is not certified either way; its S-polynomials can live in
  // far higher degrees than the bound, so they are not normalized.
  if (t.ok && !res.bound_exceeded)
    convergent = check_confluence(cur, *t.certificate, false).convergent;
  cur.set_certificates(t.certificate, convergent);
  res.system = cur;
  res.certified = t.ok && convergent && !res.bound_exceeded;
  if (res.certified)
    res.note = "completed";
  std::set<std::pair<std::vector<Gen>, std::string>> input;
  for (const auto &r : P.rules())
    input.insert({r.source.word, ""});
  for (size_t i = 0; i < cur.rules().size(); ++i) {
    const auto &r = cur.rules()[i];
    bool present = std::any_of(P.rules().begin(), P.rules().end(), [&](const Rule &o) {
      return o.source == r.source && o.target == r.target;
    });
    if (!present)
      res.added.push_back(static_cast<int>(i));
  }
  return res;
}

std::vector<Polynomial> groebner_view(const Polygraph2 &P, const MonomialOrder &ord) {
  std::vector<Polynomial> out;
  for (const auto &r : P.rules()) {
    Polynomial f = Polynomial(r.source) - r.target;
    auto ld = leading_data(P.quiver(), f, ord);
    out.push_back(ld.zero ? f : f * ld.lc.inverse());
  }
  return out;
}

} // namespace linrew
