#include "linrew/resolution.hpp"

#include <algorithm>
#include <tuple>

namespace linrew {

std::string ChainCell::key() const {
  std::string k = std::to_string(dim) + ":";
  if (dim == 0)
    return k + "o" + std::to_string(object);
  if (dim == 1)
    return k + "g" + std::to_string(generator);
  for (Gen g : word.word)
    k += std::to_string(g) + ",";
  k += "|";
  for (const auto &o : redexes)
    k += std::to_string(o.start) + "/" + std::to_string(o.rule) + ",";
  return k;
}

namespace {

std::string text(const Quiver &q, const Monomial &m) {
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

std::string chain_label(const Polygraph2 &P, const ChainCell &c) {
  const Quiver &q = P.quiver();
  switch (c.dim) {
  case 0:
    return q.objects().at(static_cast<size_t>(c.object));
  case 1:
    return q.generator(c.generator).name;
  case 2:
    return P.rule(c.rule).name;
  default:
    return text(q, c.word);
  }
}

const std::vector<ChainCell> &ChainSet::dim(int k) const {
  static const std::vector<ChainCell> empty;
  if (k < 0 || static_cast<size_t>(k) >= cells.size())
    return empty;
  return cells[static_cast<size_t>(k)];
}

int ChainSet::find(int k, const std::string &key) const {
  if (index_.size() != cells.size()) {
    index_.assign(cells.size(), {});
    for (size_t d = 0; d < cells.size(); ++d)
      for (size_t i = 0; i < cells[d].size(); ++i)
        index_[d].emplace(cells[d][i].key(), static_cast<int>(i));
  }
  if (k < 0 || static_cast<size_t>(k) >= index_.size())
    return -1;
  auto it = index_[static_cast<size_t>(k)].find(key);
  return it == index_[static_cast<size_t>(k)].end() ? -1 : it->second;
}

namespace {

std::vector<ChainCell> extend(const Polygraph2 &P, const ChainCell &c, int dmax) {
  std::vector<ChainCell> out;
  const Quiver &q = P.quiver();
  const Word &w = c.word.word;
  const size_t n = w.size();
  const size_t j = c.redexes.size();
  size_t L = std::max<size_t>(j >= 2 ? c.redexes[j - 2].end() : 1, c.redexes[j - 1].start + 1);
  for (size_t s = L; s < n; ++s)
    for (size_t r = 0; r < P.rules().size(); ++r) {
      const Word &src = P.rules()[r].source.word;
      size_t overlap = n - s;
      if (src.size() <= overlap || !std::equal(w.begin() + static_cast<long>(s), w.end(), src.begin()))
        continue;
      Word nw = w;
      nw.insert(nw.end(), src.begin() + static_cast<long>(overlap), src.end());
      Monomial m = Monomial::path(q, nw);
      int deg = degree(q, m);
      if (deg > dmax)
        continue;
      size_t new_end = s + src.size();
      bool minimal = true;
      for (const auto &o : P.occurrences(nw))
        if (o.start >= L && o.end() > n && o.end() < new_end) {
          minimal = false;
          break;
        }
      if (!minimal)
        continue;
      ChainCell e;
      e.dim = c.dim + 1;
      e.word = m;
      e.redexes = c.redexes;
      e.redexes.push_back({s, src.size(), static_cast<int>(r)});
      e.degree = deg;
      out.push_back(std::move(e));
    }
  return out;
}

void sort_cells(std::vector<ChainCell> &v) {
  CanonicalLess less;
  std::stable_sort(v.begin(), v.end(), [&](const ChainCell &a, const ChainCell &b) {
    if (a.degree != b.degree)
      return a.degree < b.degree;
    if (less(a.word, b.word))
      return true;
    if (less(b.word, a.word))
      return false;
    return a.key() < b.key();
  });
}

} // namespace

ChainSet enumerate_chains(const Polygraph2 &P, int kmax, int dmax) {
  ChainSet cs;
  cs.kmax = kmax;
  cs.dmax = dmax;
  const Quiver &q = P.quiver();
  cs.cells.resize(static_cast<size_t>(std::max(kmax, 0) + 1));
  for (size_t o = 0; o < q.objects().size(); ++o) {
    ChainCell c;
    c.dim = 0;
    c.object = static_cast<int>(o);
    c.word = Monomial::identity(static_cast<int>(o));
    cs.cells[0].push_back(c);
  }
  if (kmax >= 1)
    for (Gen g = 0; g < q.num_generators(); ++g) {
      const auto &gen = q.generator(g);
      if (gen.degree > dmax)
        continue;
      ChainCell c;
      c.dim = 1;
      c.generator = g;
      c.word = Monomial({g}, gen.source, gen.target);
      c.degree = gen.degree;
      cs.cells[1].push_back(c);
    }
  if (kmax >= 2) {
    for (size_t r = 0; r < P.rules().size(); ++r) {
      const auto &rule = P.rules()[r];
      int deg = degree(q, rule.source);
      if (deg > dmax)
        continue;
      ChainCell c;
      c.dim = 2;
      c.rule = static_cast<int>(r);
      c.word = rule.source;
      c.redexes = {{0, rule.source.length(), static_cast<int>(r)}};
      c.degree = deg;
      cs.cells[2].push_back(c);
    }
    sort_cells(cs.cells[2]);
  }
  for (int k = 3; k <= kmax; ++k) {
    auto &cur = cs.cells[static_cast<size_t>(k)];
    for (const auto &c : cs.cells[static_cast<size_t>(k - 1)]) {
      auto ext = extend(P, c, dmax);
      cur.insert(cur.end(), ext.begin(), ext.end());
    }
    sort_cells(cur);
  }
  return cs;
}

ChainCell chain_prefix(const Polygraph2 &P, const ChainCell &c) {
  if (c.dim < 3)
    throw std::invalid_argument("chain_prefix needs a chain of dimension >= 3");
  ChainCell p;
  p.dim = c.dim - 1;
  p.redexes.assign(c.redexes.begin(), c.redexes.end() - 1);
  p.word = c.word.slice(P.quiver(), 0, p.redexes.back().end());
  p.degree = degree(P.quiver(), p.word);
  if (p.dim == 2)
    p.rule = p.redexes[0].rule;
  return p;
}

int ell(int N, int k) {
  if (k % 2 == 0)
    return (k / 2) * N;
  return (k / 2) * N + 1;
}

DegreeTable cell_degrees(const ChainSet &cells, int N) {
  DegreeTable t;
  t.N = N;
  for (size_t k = 0; k < cells.cells.size(); ++k) {
    std::vector<size_t> row(static_cast<size_t>(cells.dmax + 1), 0);
    bool conc = true;
    for (const auto &c : cells.cells[k]) {
      if (c.degree >= 0 && c.degree < static_cast<int>(row.size()))
        ++row[static_cast<size_t>(c.degree)];
      if (N > 0 && c.degree != ell(N, static_cast<int>(k)))
        conc = false;
    }
    t.counts.push_back(std::move(row));
    t.concentrated.push_back(conc);
  }
  return t;
}

Confluence3Cell generating_confluence(const Polygraph2 &P, const ChainCell &c, Rewriter &rw) {
  if (c.dim != 3)
    throw std::invalid_argument("generating confluences are indexed by 3-cells");
  const Quiver &q = P.quiver();
  const int phi = c.redexes[0].rule;
  const Rule &r = P.rule(phi);
  Monomial mhat = c.word.slice(q, r.source.length(), c.word.length());
  Confluence3Cell out;
  out.cell = c;
  Polynomial start(c.word);
  out.phi_leg.start = start;
  out.phi_leg.steps.push_back({Scalar(1), Monomial::identity(c.word.source), phi, mhat});
  auto rest = rw.normal_form(r.target.whisker(Monomial::identity(c.word.source), mhat));
  out.phi_leg.steps.insert(out.phi_leg.steps.end(), rest.trace.steps.begin(), rest.trace.steps.end());
  out.phi_leg.end = rest.nf;
  out.rho_leg = rw.normal_form(start).trace;
  return out;
}

Confluence3Cell generating_confluence(const Polygraph2 &P, const ChainCell &c) {
  Rewriter rw(P);
  return generating_confluence(P, c, rw);
}

std::vector<CellInstance> simplify(std::vector<CellInstance> v) {
  CanonicalLess less;
  auto key_less = [&](const CellInstance &a, const CellInstance &b) {
    if (a.cell != b.cell)
      return a.cell < b.cell;
    if (less(a.left, b.left))
      return true;
    if (less(b.left, a.left))
      return false;
    return less(a.right, b.right);
  };
  std::stable_sort(v.begin(), v.end(), key_less);
  std::vector<CellInstance> out;
  for (auto &x : v) {
    if (!out.empty() && out.back().cell == x.cell && out.back().left == x.left && out.back().right == x.right)
      out.back().coeff += x.coeff;
    else
      out.push_back(std::move(x));
    if (out.back().coeff.is_zero())
      out.pop_back();
  }
  return out;
}

ThreeCellEngine::ThreeCellEngine(const Polygraph2 &P, const ChainSet &chains) : P_(P), chains_(chains), rw_(P) {}

std::vector<CellInstance> ThreeCellEngine::K(int rule, const Monomial &mhat) {
  auto key = std::make_pair(rule, mhat.word);
  auto it = memo_.find(key);
  if (it != memo_.end())
    return it->second;
  if (++depth_ > 100000)
    throw std::runtime_error("normalising 3-trace recursion too deep");
  const Quiver &q = P_.quiver();
  const Monomial &m1 = P_.rule(rule).source;
  Monomial w = compose(m1, mhat);
  std::optional<Occurrence> first;
  for (const auto &o : P_.occurrences(w.word)) {
    if (o.start == 0)
      continue;
    if (!first || o.end() < first->end() || (o.end() == first->end() && o.rule < first->rule))
      first = o;
  }
  std::vector<CellInstance> out;
  if (first) {
    if (first->start >= m1.length())
      throw std::logic_error("normalising 3-trace reached a reducible right factor");
    const size_t e = first->end();
    Monomial mhat2 = w.slice(q, m1.length(), e);
    Monomial mhat3 = w.slice(q, e, w.length());
    ChainCell b1;
    b1.dim = 3;
    b1.word = w.slice(q, 0, e);
    b1.redexes = {{0, m1.length(), rule}, *first};
    int id = chains_.find(3, b1.key());
    if (id < 0)
      throw std::logic_error("3-chain " + text(q, b1.word) + " is missing; the degree bound is too small");
    out.push_back({Scalar(1), Monomial::identity(w.source), id, mhat3});
    Polynomial h2 = P_.rule(rule).target.whisker(Monomial::identity(m1.source), mhat2);
    Trace t1 = rw_.normal_form(h2).trace;
    Trace t2 = rw_.normal_form(Polynomial(b1.word)).trace;
    for (auto &x : theta(t1, mhat3)) {
      x.coeff = -x.coeff;
      out.push_back(std::move(x));
    }
    for (auto &x : theta(t2, mhat3))
      out.push_back(std::move(x));
    out = simplify(std::move(out));
  }
  --depth_;
  memo_.emplace(std::move(key), out);
  return out;
}

std::vector<CellInstance> ThreeCellEngine::theta(const Trace &t, const Monomial &w) {
  std::vector<CellInstance> out;
  for (const auto &s : t.steps) {
    Polynomial vw = rw_.nf(compose(s.right, w));
    for (const auto &[wj, mu] : vw.terms())
      for (const auto &inst : K(s.rule, wj))
        out.push_back({s.coeff * mu * inst.coeff, compose(s.left, inst.left), inst.cell, inst.right});
  }
  return simplify(std::move(out));
}

Boundary4Data ThreeCellEngine::boundary4(const ChainCell &c) {
  if (c.dim != 4)
    throw std::invalid_argument("boundary4 needs a 4-cell");
  const Quiver &q = P_.quiver();
  ChainCell c3 = chain_prefix(P_, c);
  int id = chains_.find(3, c3.key());
  if (id < 0)
    throw std::logic_error("3-chain prefix missing from the chain set");
  Monomial mhat = c.word.slice(q, c3.word.length(), c.word.length());
  auto conf = generating_confluence(P_, c3, rw_);
  Boundary4Data b;
  b.cell = c;
  b.source.push_back({Scalar(1), Monomial::identity(c.word.source), id, mhat});
  for (auto &x : theta(conf.rho_leg, mhat))
    b.source.push_back(std::move(x));
  b.source = simplify(std::move(b.source));
  b.target = theta(conf.phi_leg, mhat);
  return b;
}

Boundary4Data boundary4(const Polygraph2 &P, const ChainSet &chains, const ChainCell &c) {
  ThreeCellEngine eng(P, chains);
  return eng.boundary4(c);
}

SparseVec ComplexCell::boundary() const {
  SparseVec d = src;
  axpy(d, Scalar(-1), tgt);
  return d;
}

size_t ComplexData::alive_count(int k, int degree) const {
  if (k < 0 || static_cast<size_t>(k) >= cells.size())
    return 0;
  size_t n = 0;
  for (const auto &c : cells[static_cast<size_t>(k)])
    if (c.alive && c.degree == degree)
      ++n;
  return n;
}

int ComplexData::find(int k, const std::string &label) const {
  if (k < 0 || static_cast<size_t>(k) >= cells.size())
    return -1;
  const auto &v = cells[static_cast<size_t>(k)];
  for (size_t i = 0; i < v.size(); ++i)
    if (v[i].label == label)
      return static_cast<int>(i);
  return -1;
}

ComplexData collapse_pair(const ComplexData &cd, int k, int gamma, int A) {
  if (k < 0 || static_cast<size_t>(k + 1) >= cd.cells.size() || k + 1 > cd.exact_top)
    throw CollapseError("collapse needs known boundaries in dimension " + std::to_string(k + 1));
  const auto &lower = cd.cells[static_cast<size_t>(k)];
  const auto &upper = cd.cells[static_cast<size_t>(k + 1)];
  if (gamma < 0 || static_cast<size_t>(gamma) >= lower.size() || !lower[static_cast<size_t>(gamma)].alive)
    throw CollapseError("no such cell in dimension " + std::to_string(k));
  if (A < 0 || static_cast<size_t>(A) >= upper.size() || !upper[static_cast<size_t>(A)].alive)
    throw CollapseError("no such cell in dimension " + std::to_string(k + 1));
  const ComplexCell &a = upper[static_cast<size_t>(A)];
  bool in_src = a.src.count(gamma) > 0, in_tgt = a.tgt.count(gamma) > 0;
  if (in_src && in_tgt)
    throw CollapseError(lower[static_cast<size_t>(gamma)].label + " occurs in both the source and the target of " +
                        a.label);
  SparseVec d = a.boundary();
  auto it = d.find(gamma);
  if (it == d.end())
    throw CollapseError(lower[static_cast<size_t>(gamma)].label + " does not occur in the boundary of " + a.label);
  if (!it->second.invertible())
    throw CollapseError("coefficient of " + lower[static_cast<size_t>(gamma)].label + " is not invertible");
  Scalar inv = it->second.inverse();
  ComplexData out = cd;
  auto &up = out.cells[static_cast<size_t>(k + 1)];
  for (size_t b = 0; b < up.size(); ++b) {
    if (static_cast<int>(b) == A || !up[b].alive)
      continue;
    SparseVec db = up[b].boundary();
    auto jt = db.find(gamma);
    if (jt == db.end())
      continue;
    Scalar c = jt->second * inv;
    axpy(up[b].src, -c, a.src);
    axpy(up[b].tgt, -c, a.tgt);
    up[b].src.erase(gamma);
    up[b].tgt.erase(gamma);
  }
  up[static_cast<size_t>(A)].alive = false;
  out.cells[static_cast<size_t>(k)][static_cast<size_t>(gamma)].alive = false;
  if (static_cast<size_t>(k + 2) < out.cells.size())
    for (auto &c : out.cells[static_cast<size_t>(k + 2)]) {
      c.src.erase(A);
      c.tgt.erase(A);
    }
  return out;
}

ComplexData collapse_saturate(const ComplexData &cd, int N, CollapseLog *log) {
  ComplexData cur = cd;
  for (;;) {
    bool done = false;
    for (int k = cur.exact_top - 1; k >= 0 && !done; --k) {
      const auto &upper = cur.cells[static_cast<size_t>(k + 1)];
      const auto &lower = cur.cells[static_cast<size_t>(k)];
      for (size_t A = 0; A < upper.size() && !done; ++A) {
        if (!upper[A].alive)
          continue;
        SparseVec d = upper[A].boundary();
        for (const auto &[g, c] : d) {
          const auto &gc = lower[static_cast<size_t>(g)];
          if (!gc.alive || !c.invertible() || gc.degree == ell(N, k))
            continue;
          if (upper[A].src.count(g) && upper[A].tgt.count(g))
            continue;
          if (log)
            log->pairs.emplace_back(k, gc.label, upper[A].label);
          cur = collapse_pair(cur, k, g, static_cast<int>(A));
          done = true;
          break;
        }
      }
    }
    if (!done)
      return cur;
  }
}

} // namespace linrew
