#include "linrew/algebra.hpp"

#include <algorithm>

namespace linrew {

Quiver::Quiver() : objects_{"*"} {}

Quiver::Quiver(std::vector<std::string> objects) : objects_(std::move(objects)) {
  if (objects_.empty())
    throw CompositionError("a quiver needs at least one object");
}

int Quiver::add_object(const std::string &name) {
  if (find_object(name) >= 0)
    throw CompositionError("duplicate object " + name);
  objects_.push_back(name);
  return static_cast<int>(objects_.size()) - 1;
}

Gen Quiver::add_generator(const std::string &name, int source, int target, int degree) {
  if (find_generator(name) >= 0)
    throw CompositionError("duplicate generator " + name);
  if (source < 0 || target < 0 || source >= static_cast<int>(objects_.size()) ||
      target >= static_cast<int>(objects_.size()))
    throw CompositionError("generator " + name + " has an unknown boundary object");
  if (degree < 1)
    throw CompositionError("generator " + name + " must have positive degree");
  gens_.push_back({name, source, target, degree});
  return static_cast<Gen>(gens_.size() - 1);
}

int Quiver::find_generator(const std::string &name) const {
  for (size_t i = 0; i < gens_.size(); ++i)
    if (gens_[i].name == name)
      return static_cast<int>(i);
  return -1;
}

int Quiver::find_object(const std::string &name) const {
  for (size_t i = 0; i < objects_.size(); ++i)
    if (objects_[i] == name)
      return static_cast<int>(i);
  return -1;
}

bool Quiver::operator==(const Quiver &o) const {
  if (objects_ != o.objects_ || gens_.size() != o.gens_.size())
    return false;
  for (size_t i = 0; i < gens_.size(); ++i) {
    const auto &a = gens_[i], &b = o.gens_[i];
    if (a.name != b.name || a.source != b.source || a.target != b.target || a.degree != b.degree)
      return false;
  }
  return true;
}

Monomial Monomial::path(const Quiver &q, Word w) {
  if (w.empty())
    return identity(0);
  return path(q, std::move(w), 0);
}

Monomial Monomial::path(const Quiver &q, Word w, int object_if_empty) {
  if (w.empty())
    return identity(object_if_empty);
  for (size_t i = 0; i < w.size(); ++i) {
    if (w[i] >= q.num_generators())
      throw CompositionError("unknown generator id " + std::to_string(w[i]));
    if (i > 0 && q.generator(w[i - 1]).target != q.generator(w[i]).source)
      throw CompositionError("generators " + q.generator(w[i - 1]).name + " and " + q.generator(w[i]).name +
                             " are not composable");
  }
  int s = q.generator(w.front()).source;
  int t = q.generator(w.back()).target;
  return Monomial(std::move(w), s, t);
}

Monomial Monomial::slice(const Quiver &q, size_t from, size_t to) const {
  if (from == to) {
    int obj = from == 0 ? source : q.generator(word[from - 1]).target;
    return identity(obj);
  }
  Word w(word.begin() + static_cast<long>(from), word.begin() + static_cast<long>(to));
  return Monomial(std::move(w), q.generator(word[from]).source, q.generator(word[to - 1]).target);
}

bool CanonicalLess::operator()(const Monomial &a, const Monomial &b) const {
  if (a.word.size() != b.word.size())
    return a.word.size() < b.word.size();
  if (a.word != b.word)
    return a.word < b.word;
  if (a.source != b.source)
    return a.source < b.source;
  return a.target < b.target;
}

size_t MonomialHash::operator()(const Monomial &m) const {
  size_t h = 1469598103934665603ull ^ static_cast<size_t>(m.source * 31 + m.target);
  for (Gen g : m.word) {
    h ^= g + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

int degree(const Quiver &q, const Word &w) {
  int d = 0;
  for (Gen g : w)
    d += q.generator(g).degree;
  return d;
}

int degree(const Quiver &q, const Monomial &m) { return degree(q, m.word); }

Monomial compose(const Monomial &a, const Monomial &b) {
  if (a.target != b.source)
    throw CompositionError("monomials are not composable");
  Word w = a.word;
  w.insert(w.end(), b.word.begin(), b.word.end());
  return Monomial(std::move(w), a.source, b.target);
}

Polynomial::Polynomial(const Monomial &m, const Scalar &c) : source_(m.source), target_(m.target) {
  if (!c.is_zero())
    terms_.emplace(m, c);
}

Polynomial Polynomial::zero(int source, int target) {
  Polynomial p;
  p.source_ = source;
  p.target_ = target;
  return p;
}

Scalar Polynomial::coeff(const Monomial &m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Scalar(0) : it->second;
}

void Polynomial::check_boundary(int s, int t) {
  if (s < 0)
    return;
  if (source_ < 0) {
    source_ = s;
    target_ = t;
    return;
  }
  if (source_ != s || target_ != t)
    throw CompositionError("boundary mismatch between polynomials");
}

void Polynomial::add_term(const Monomial &m, const Scalar &c) {
  check_boundary(m.source, m.target);
  if (c.is_zero())
    return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero())
      terms_.erase(it);
  }
}

Polynomial &Polynomial::operator+=(const Polynomial &o) {
  check_boundary(o.source_, o.target_);
  for (const auto &[m, c] : o.terms_)
    add_term(m, c);
  return *this;
}

Polynomial &Polynomial::operator-=(const Polynomial &o) {
  check_boundary(o.source_, o.target_);
  for (const auto &[m, c] : o.terms_)
    add_term(m, -c);
  return *this;
}

Polynomial Polynomial::operator+(const Polynomial &o) const {
  Polynomial r = *this;
  r += o;
  return r;
}

Polynomial Polynomial::operator-(const Polynomial &o) const {
  Polynomial r = *this;
  r -= o;
  return r;
}

Polynomial Polynomial::operator-() const { return *this * Scalar(-1); }

Polynomial Polynomial::operator*(const Scalar &c) const {
  Polynomial r = zero(source_, target_);
  if (c.is_zero())
    return r;
  for (const auto &[m, x] : terms_)
    r.terms_.emplace(m, x * c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial &o) const {
  if (source_ >= 0 && o.source_ >= 0 && target_ != o.source_)
    throw CompositionError("polynomials are not composable");
  Polynomial r;
  if (source_ >= 0 && o.source_ >= 0)
    r = zero(source_, o.target_);
  for (const auto &[a, x] : terms_)
    for (const auto &[b, y] : o.terms_)
      r.add_term(compose(a, b), x * y);
  return r;
}

Polynomial Polynomial::whisker(const Monomial &left, const Monomial &right) const {
  Polynomial r;
  if (source_ >= 0)
    r = zero(left.source, right.target);
  for (const auto &[m, c] : terms_)
    r.add_term(compose(compose(left, m), right), c);
  return r;
}

bool Polynomial::operator==(const Polynomial &o) const {
  if (terms_.size() != o.terms_.size())
    return false;
  auto it = o.terms_.begin();
  for (const auto &[m, c] : terms_) {
    if (!(m == it->first) || !(c == it->second))
      return false;
    ++it;
  }
  return true;
}

bool Polynomial::homogeneous(const Quiver &q, int *deg) const {
  int d = -1;
  for (const auto &[m, c] : terms_) {
    int e = degree(q, m);
    if (d >= 0 && e != d)
      return false;
    d = e;
  }
  if (deg)
    *deg = d;
  return true;
}

Polynomial Polynomial::to_modular(std::uint32_t p) const {
  Polynomial r = zero(source_, target_);
  for (const auto &[m, c] : terms_)
    r.add_term(m, c.to_modular(p));
  return r;
}

MonomialOrder MonomialOrder::deglex(std::vector<int> rank) {
  MonomialOrder o;
  o.kind_ = OrderKind::Deglex;
  o.rank_ = std::move(rank);
  return o;
}

MonomialOrder MonomialOrder::weighted(std::vector<int> rank, std::vector<int> weights) {
  if (weights.size() != rank.size())
    throw std::invalid_argument("one weight per generator is required");
  for (int w : weights)
    if (w < 1)
      throw std::invalid_argument("weights must be positive");
  MonomialOrder o;
  o.kind_ = OrderKind::WeightedDeglex;
  o.rank_ = std::move(rank);
  o.weights_ = std::move(weights);
  return o;
}

MonomialOrder MonomialOrder::block(std::vector<int> rank, std::vector<int> block) {
  if (block.size() != rank.size())
    throw std::invalid_argument("one block index per generator is required");
  MonomialOrder o;
  o.kind_ = OrderKind::BlockDeglex;
  o.rank_ = std::move(rank);
  o.block_ = std::move(block);
  return o;
}

long MonomialOrder::weight_of(const Quiver &q, const Word &w) const {
  long s = 0;
  for (Gen g : w)
    s += kind_ == OrderKind::WeightedDeglex ? weights_.at(g) : q.generator(g).degree;
  return s;
}

std::strong_ordering MonomialOrder::compare(const Quiver &q, const Monomial &a, const Monomial &b) const {
  if (!a.parallel(b))
    throw CompositionError("comparing non-parallel monomials");
  if (kind_ == OrderKind::BlockDeglex) {
    int nblocks = block_.empty() ? 0 : *std::max_element(block_.begin(), block_.end()) + 1;
    for (int blk = nblocks - 1; blk >= 0; --blk) {
      long da = 0, db = 0;
      for (Gen g : a.word)
        if (block_.at(g) == blk)
          da += q.generator(g).degree;
      for (Gen g : b.word)
        if (block_.at(g) == blk)
          db += q.generator(g).degree;
      if (da != db)
        return da <=> db;
    }
  }
  long wa = weight_of(q, a.word), wb = weight_of(q, b.word);
  if (wa != wb)
    return wa <=> wb;
  size_t n = std::min(a.word.size(), b.word.size());
  for (size_t i = 0; i < n; ++i) {
    if (a.word[i] != b.word[i])
      return rank_.at(a.word[i]) <=> rank_.at(b.word[i]);
  }
  return a.word.size() <=> b.word.size();
}

LeadingData leading_data(const Quiver &q, const Polynomial &f, const MonomialOrder &ord) {
  LeadingData d;
  for (const auto &[m, c] : f.terms()) {
    if (d.zero || ord.less(q, d.lm, m)) {
      d.zero = false;
      d.lm = m;
      d.lc = c;
    }
  }
  if (d.zero) {
    d.lc = Scalar(0);
    d.lt = Polynomial::zero(f.source(), f.target());
  } else {
    d.lt = Polynomial(d.lm, d.lc);
  }
  return d;
}

} // namespace linrew
