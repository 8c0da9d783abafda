#include "linrew/scalar.hpp"

#include <sstream>

namespace linrew {

namespace upoly {

void trim(UPoly &p) {
  while (!p.empty() && p.back() == 0)
    p.pop_back();
}

UPoly add(const UPoly &a, const UPoly &b) {
  UPoly r(std::max(a.size(), b.size()));
  for (size_t i = 0; i < r.size(); ++i) {
    if (i < a.size())
      r[i] += a[i];
    if (i < b.size())
      r[i] += b[i];
  }
  trim(r);
  return r;
}

UPoly sub(const UPoly &a, const UPoly &b) {
  UPoly r(std::max(a.size(), b.size()));
  for (size_t i = 0; i < r.size(); ++i) {
    if (i < a.size())
      r[i] += a[i];
    if (i < b.size())
      r[i] -= b[i];
  }
  trim(r);
  return r;
}

UPoly mul(const UPoly &a, const UPoly &b) {
  if (a.empty() || b.empty())
    return {};
  UPoly r(a.size() + b.size() - 1);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      r[i + j] += a[i] * b[j];
  trim(r);
  return r;
}

UPoly scale(const UPoly &a, const mpq_class &c) {
  UPoly r(a);
  for (auto &x : r)
    x *= c;
  trim(r);
  return r;
}

void divmod(const UPoly &a, const UPoly &b, UPoly &q, UPoly &r) {
  if (b.empty())
    throw ArithmeticError("polynomial division by zero");
  r = a;
  q.assign(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, mpq_class(0));
  while (!r.empty() && r.size() >= b.size()) {
    size_t shift = r.size() - b.size();
    mpq_class c = r.back() / b.back();
    q[shift] = c;
    for (size_t j = 0; j < b.size(); ++j)
      r[shift + j] -= c * b[j];
    trim(r);
  }
  trim(q);
}

UPoly gcd(UPoly a, UPoly b) {
  while (!b.empty()) {
    UPoly q, r;
    divmod(a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    mpq_class lead = a.back();
    for (auto &x : a)
      x /= lead;
  }
  return a;
}

mpq_class eval(const UPoly &p, const mpq_class &x) {
  mpq_class acc = 0;
  for (size_t i = p.size(); i-- > 0;)
    acc = acc * x + p[i];
  return acc;
}

std::string to_string(const UPoly &p, const std::string &var) {
  if (p.empty())
    return "0";
  std::ostringstream os;
  bool first = true;
  for (size_t i = p.size(); i-- > 0;) {
    mpq_class c = p[i];
    if (c == 0)
      continue;
    bool neg = c < 0;
    if (neg)
      c = -c;
    if (first)
      os << (neg ? "-" : "");
    else
      os << (neg ? " - " : " + ");
    first = false;
    if (i == 0 || c != 1) {
      os << c.get_str();
      if (i > 0)
        os << " ";
    }
    if (i >= 1)
      os << var;
    if (i >= 2)
      os << "^" << i;
  }
  return os.str();
}

} // namespace upoly

RatFunc::RatFunc(UPoly num, UPoly den, std::shared_ptr<const ParamInfo> info)
    : num_(std::move(num)), den_(std::move(den)), info_(std::move(info)) {
  upoly::trim(num_);
  upoly::trim(den_);
  if (den_.empty())
    throw ArithmeticError("rational function with zero denominator");
  normalize();
}

RatFunc RatFunc::constant(const mpq_class &c, std::shared_ptr<const ParamInfo> info) {
  return RatFunc(UPoly{c}, UPoly{mpq_class(1)}, std::move(info));
}

RatFunc RatFunc::variable(std::shared_ptr<const ParamInfo> info) {
  return RatFunc(UPoly{mpq_class(0), mpq_class(1)}, UPoly{mpq_class(1)}, std::move(info));
}

void RatFunc::normalize() {
  if (num_.empty()) {
    den_ = UPoly{mpq_class(1)};
    return;
  }
  UPoly g = upoly::gcd(num_, den_);
  if (g.size() > 1) {
    UPoly q, r;
    upoly::divmod(num_, g, q, r);
    num_ = q;
    upoly::divmod(den_, g, q, r);
    den_ = q;
  }
  mpq_class lead = den_.back();
  if (lead != 1) {
    num_ = upoly::scale(num_, 1 / lead);
    den_ = upoly::scale(den_, 1 / lead);
  }
}

std::optional<mpq_class> RatFunc::as_constant() const {
  if (num_.empty())
    return mpq_class(0);
  if (num_.size() == 1 && den_.size() == 1)
    return num_[0] / den_[0];
  return std::nullopt;
}

bool RatFunc::surely_nonzero() const {
  if (num_.empty())
    return false;
  UPoly rest = num_;
  if (info_) {
    for (const auto &c : info_->excluded) {
      UPoly factor{-c, mpq_class(1)};
      for (;;) {
        UPoly q, r;
        upoly::divmod(rest, factor, q, r);
        if (!r.empty() || q.empty())
          break;
        rest = q;
      }
    }
  }
  return rest.size() == 1;
}

RatFunc RatFunc::operator+(const RatFunc &o) const {
  return RatFunc(upoly::add(upoly::mul(num_, o.den_), upoly::mul(o.num_, den_)),
                 upoly::mul(den_, o.den_), info_ ? info_ : o.info_);
}

RatFunc RatFunc::operator-(const RatFunc &o) const {
  return RatFunc(upoly::sub(upoly::mul(num_, o.den_), upoly::mul(o.num_, den_)),
                 upoly::mul(den_, o.den_), info_ ? info_ : o.info_);
}

RatFunc RatFunc::operator*(const RatFunc &o) const {
  return RatFunc(upoly::mul(num_, o.num_), upoly::mul(den_, o.den_), info_ ? info_ : o.info_);
}

RatFunc RatFunc::operator/(const RatFunc &o) const {
  if (!o.surely_nonzero()) {
    std::string name = info_ ? info_->name : (o.info_ ? o.info_->name : "parameter");
    throw ArithmeticError("division by " + o.to_string() +
                          ", which may vanish for an admissible value of " + name);
  }
  return RatFunc(upoly::mul(num_, o.den_), upoly::mul(den_, o.num_), info_ ? info_ : o.info_);
}

RatFunc RatFunc::operator-() const {
  return RatFunc(upoly::scale(num_, -1), den_, info_);
}

std::string RatFunc::to_string() const {
  std::string var = info_ ? info_->name : "t";
  std::string n = upoly::to_string(num_, var);
  if (den_.size() == 1)
    return n;
  size_t nterms = 0;
  for (const auto &c : num_)
    nterms += c != 0;
  if (nterms > 1)
    n = "(" + n + ")";
  std::string d = upoly::to_string(den_, var);
  size_t dterms = 0;
  for (const auto &c : den_)
    dterms += c != 0;
  if (dterms > 1 || den_.back() != 1 || den_.size() > 2)
    d = "(" + d + ")";
  return n + "/" + d;
}

bool is_prime(std::uint32_t p) {
  if (p < 2)
    return false;
  for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= p; ++d)
    if (p % d == 0)
      return false;
  return true;
}

std::uint32_t mod_inverse(std::uint32_t a, std::uint32_t p) {
  if (a % p == 0)
    throw ArithmeticError("inverse of zero in GF(" + std::to_string(p) + ")");
  std::int64_t t = 0, nt = 1, r = p, nr = a % p;
  while (nr != 0) {
    std::int64_t q = r / nr;
    t -= q * nt;
    std::swap(t, nt);
    r -= q * nr;
    std::swap(r, nr);
  }
  if (t < 0)
    t += p;
  return static_cast<std::uint32_t>(t);
}

namespace {

std::uint32_t reduce_rational(const mpq_class &q, std::uint32_t p) {
  mpz_class n = q.get_num() % p;
  if (n < 0)
    n += p;
  mpz_class d = q.get_den() % p;
  if (d == 0)
    throw ArithmeticError("denominator of " + q.get_str() + " vanishes in GF(" + std::to_string(p) + ")");
  std::uint64_t nv = n.get_ui(), dv = d.get_ui();
  return static_cast<std::uint32_t>(nv * mod_inverse(static_cast<std::uint32_t>(dv), p) % p);
}

// Bring two scalars to a common kind.
void unify(Scalar &a, Scalar &b) {
  using K = Scalar::Kind;
  if (a.kind() == b.kind()) {
    if (a.kind() == K::Modular && a.modular().p != b.modular().p)
      throw ArithmeticError("mixing different prime fields");
    return;
  }
  auto promote = [](Scalar &x, const Scalar &like) {
    if (x.kind() != K::Rational)
      throw ArithmeticError("mixing GF(p) elements with parameter functions");
    // Rationals meeting a parameter function stay rational; the operators
    // lift them (a constant RatFunc would collapse back to a rational).
    if (like.kind() == K::Modular)
      x = Scalar(ModInt{reduce_rational(x.rational(), like.modular().p), like.modular().p});
  };
  if (a.kind() == K::Rational)
    promote(a, b);
  else
    promote(b, a);
}

RatFunc lift(const Scalar &x, const std::shared_ptr<const ParamInfo> &info) {
  return x.kind() == Scalar::Kind::Function ? x.function() : RatFunc::constant(x.rational(), info);
}

const std::shared_ptr<const ParamInfo> &info_of(const Scalar &a, const Scalar &b) {
  return a.kind() == Scalar::Kind::Function ? a.function().info() : b.function().info();
}

} // namespace

Scalar::Scalar(const RatFunc &f) {
  if (auto c = f.as_constant())
    v_ = *c;
  else
    v_ = f;
}

Scalar Scalar::modular(std::int64_t v, std::uint32_t p) {
  std::int64_t r = v % static_cast<std::int64_t>(p);
  if (r < 0)
    r += p;
  return Scalar(ModInt{static_cast<std::uint32_t>(r), p});
}

bool Scalar::is_zero() const {
  switch (kind()) {
  case Kind::Rational:
    return rational() == 0;
  case Kind::Modular:
    return modular().v == 0;
  case Kind::Function:
    return function().is_zero();
  }
  return false;
}

bool Scalar::is_one() const {
  switch (kind()) {
  case Kind::Rational:
    return rational() == 1;
  case Kind::Modular:
    return modular().v == 1 % modular().p;
  case Kind::Function:
    return false; // constants are stored as rationals
  }
  return false;
}

bool Scalar::invertible() const {
  if (kind() == Kind::Function)
    return function().surely_nonzero();
  return !is_zero();
}

Scalar Scalar::operator+(const Scalar &o) const {
  Scalar a = *this, b = o;
  unify(a, b);
  if (a.kind() != b.kind()) {
    const auto &info = info_of(a, b);
    return Scalar(lift(a, info) + lift(b, info));
  }
  switch (a.kind()) {
  case Kind::Rational:
    return Scalar(mpq_class(a.rational() + b.rational()));
  case Kind::Modular: {
    auto p = a.modular().p;
    return Scalar(ModInt{static_cast<std::uint32_t>((std::uint64_t(a.modular().v) + b.modular().v) % p), p});
  }
  case Kind::Function:
    return Scalar(a.function() + b.function());
  }
  return {};
}

Scalar Scalar::operator-(const Scalar &o) const { return *this + (-o); }

Scalar Scalar::operator*(const Scalar &o) const {
  Scalar a = *this, b = o;
  unify(a, b);
  if (a.kind() != b.kind()) {
    const auto &info = info_of(a, b);
    return Scalar(lift(a, info) * lift(b, info));
  }
  switch (a.kind()) {
  case Kind::Rational:
    return Scalar(mpq_class(a.rational() * b.rational()));
  case Kind::Modular: {
    auto p = a.modular().p;
    return Scalar(ModInt{static_cast<std::uint32_t>(std::uint64_t(a.modular().v) * b.modular().v % p), p});
  }
  case Kind::Function:
    return Scalar(a.function() * b.function());
  }
  return {};
}

Scalar Scalar::inverse() const {
  switch (kind()) {
  case Kind::Rational:
    if (rational() == 0)
      throw ArithmeticError("division by zero");
    return Scalar(mpq_class(1 / rational()));
  case Kind::Modular:
    return Scalar(ModInt{mod_inverse(modular().v, modular().p), modular().p});
  case Kind::Function:
    return Scalar(RatFunc::constant(1, function().info()) / function());
  }
  return {};
}

Scalar Scalar::operator/(const Scalar &o) const { return *this * o.inverse(); }

Scalar Scalar::operator-() const {
  switch (kind()) {
  case Kind::Rational:
    return Scalar(mpq_class(-rational()));
  case Kind::Modular: {
    auto p = modular().p;
    return Scalar(ModInt{(p - modular().v) % p, p});
  }
  case Kind::Function:
    return Scalar(-function());
  }
  return {};
}

bool Scalar::operator==(const Scalar &o) const {
  if (kind() == o.kind()) {
    switch (kind()) {
    case Kind::Rational:
      return rational() == o.rational();
    case Kind::Modular:
      return modular().v == o.modular().v && modular().p == o.modular().p;
    case Kind::Function:
      return function() == o.function();
    }
  }
  if (kind() == Kind::Function || o.kind() == Kind::Function)
    return false; // constants are never stored as functions
  return (*this - o).is_zero();
}

Scalar Scalar::to_modular(std::uint32_t p) const {
  switch (kind()) {
  case Kind::Rational:
    return Scalar(ModInt{reduce_rational(rational(), p), p});
  case Kind::Modular:
    if (modular().p != p)
      throw ArithmeticError("cannot map between different prime fields");
    return *this;
  case Kind::Function:
    throw ArithmeticError("cannot reduce a parameter function modulo p");
  }
  return {};
}

std::string Scalar::to_string() const {
  switch (kind()) {
  case Kind::Rational:
    return rational().get_str();
  case Kind::Modular: {
    auto m = modular();
    if (m.v > m.p / 2)
      return "-" + std::to_string(m.p - m.v);
    return std::to_string(m.v);
  }
  case Kind::Function:
    return function().to_string();
  }
  return "";
}

Field Field::prime(std::uint32_t p) {
  if (!is_prime(p))
    throw ArithmeticError(std::to_string(p) + " is not prime");
  Field f;
  f.base = Base::GF;
  f.p = p;
  return f;
}

Scalar Field::from_rational(const mpq_class &q) const {
  if (base == Base::GF)
    return Scalar(q).to_modular(p);
  return Scalar(q);
}

Scalar Field::parameter() const {
  if (!param)
    throw ArithmeticError("no parameter declared");
  if (param_value)
    return from_rational(*param_value);
  if (base == Base::GF)
    throw ArithmeticError("symbolic parameters require the field Q");
  return Scalar(RatFunc::variable(param));
}

std::string Field::describe() const {
  std::string s = base == Base::Q ? "Q" : "GF(" + std::to_string(p) + ")";
  if (param) {
    s += ", parameter " + param->name;
    if (param_value)
      s += " = " + param_value->get_str();
  }
  return s;
}

} // namespace linrew
