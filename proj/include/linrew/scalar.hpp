#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace linrew {

struct ArithmeticError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Univariate polynomial over Q, coefficient i is the coefficient of t^i.
// Always trimmed: no trailing zero coefficient, zero is the empty vector.
using UPoly = std::vector<mpq_class>;

namespace upoly {
void trim(UPoly &p);
UPoly add(const UPoly &a, const UPoly &b);
UPoly sub(const UPoly &a, const UPoly &b);
UPoly mul(const UPoly &a, const UPoly &b);
UPoly scale(const UPoly &a, const mpq_class &c);
// Euclidean division, b nonzero.
void divmod(const UPoly &a, const UPoly &b, UPoly &q, UPoly &r);
// Monic gcd; gcd(0, 0) = 0.
UPoly gcd(UPoly a, UPoly b);
mpq_class eval(const UPoly &p, const mpq_class &x);
std::string to_string(const UPoly &p, const std::string &var);
} // namespace upoly

// The single symbolic parameter of a presentation, with the values it is
// declared never to take (a != c for every c in `excluded`).
struct ParamInfo {
  std::string name;
  std::vector<mpq_class> excluded;
};

class RatFunc {
public:
  RatFunc(UPoly num, UPoly den, std::shared_ptr<const ParamInfo> info);
  static RatFunc constant(const mpq_class &c, std::shared_ptr<const ParamInfo> info);
  static RatFunc variable(std::shared_ptr<const ParamInfo> info);

  const UPoly &num() const { return num_; }
  const UPoly &den() const { return den_; }
  const std::shared_ptr<const ParamInfo> &info() const { return info_; }
  bool is_zero() const { return num_.empty(); }
  // Constant rational value, if the function does not depend on the parameter.
  std::optional<mpq_class> as_constant() const;
  // True when the function cannot vanish for any admissible parameter value:
  // its numerator is a constant times a product of declared factors.
  bool surely_nonzero() const;

  RatFunc operator+(const RatFunc &o) const;
  RatFunc operator-(const RatFunc &o) const;
  RatFunc operator*(const RatFunc &o) const;
  RatFunc operator/(const RatFunc &o) const;
  RatFunc operator-() const;
  bool operator==(const RatFunc &o) const { return num_ == o.num_ && den_ == o.den_; }

  std::string to_string() const;

private:
  void normalize();
  UPoly num_, den_;
  std::shared_ptr<const ParamInfo> info_;
};

struct ModInt {
  std::uint32_t v = 0;
  std::uint32_t p = 0;
};

std::uint32_t mod_inverse(std::uint32_t a, std::uint32_t p);
bool is_prime(std::uint32_t p);

// An exact field element: a rational, an element of GF(p), or a rational
// function in one parameter. Rationals act as "untyped constants" and are
// promoted when mixed with the other kinds.
class Scalar {
public:
  enum class Kind { Rational, Modular, Function };

  Scalar() : v_(mpq_class(0)) {}
  Scalar(long n) : v_(mpq_class(n)) {}  // NOLINT: implicit on purpose
  Scalar(const mpq_class &q) : v_(q) {} // NOLINT
  explicit Scalar(const ModInt &m) : v_(m) {}
  explicit Scalar(const RatFunc &f);

  static Scalar modular(std::int64_t v, std::uint32_t p);

  Kind kind() const { return static_cast<Kind>(v_.index()); }
  bool is_zero() const;
  bool is_one() const;
  // Nonzero, and for parameter functions nonzero at every admissible value.
  bool invertible() const;

  const mpq_class &rational() const { return std::get<mpq_class>(v_); }
  const ModInt &modular() const { return std::get<ModInt>(v_); }
  const RatFunc &function() const { return std::get<RatFunc>(v_); }

  Scalar operator+(const Scalar &o) const;
  Scalar operator-(const Scalar &o) const;
  Scalar operator*(const Scalar &o) const;
  Scalar operator/(const Scalar &o) const;
  Scalar operator-() const;
  Scalar &operator+=(const Scalar &o) { return *this = *this + o; }
  Scalar &operator-=(const Scalar &o) { return *this = *this - o; }
  Scalar &operator*=(const Scalar &o) { return *this = *this * o; }
  Scalar inverse() const;
  bool operator==(const Scalar &o) const;
  bool operator!=(const Scalar &o) const { return !(*this == o); }

  // Image in GF(p); throws when a denominator vanishes mod p or the value
  // depends on a parameter.
  Scalar to_modular(std::uint32_t p) const;

  // Canonical text: "3/2", "-1", symmetric residues for GF(p), "-1/a" for
  // parameter functions.
  std::string to_string() const;

private:
  std::variant<mpq_class, ModInt, RatFunc> v_;
};

// Coefficient domain of a presentation.
struct Field {
  enum class Base { Q, GF };
  Base base = Base::Q;
  std::uint32_t p = 0;
  std::shared_ptr<ParamInfo> param;          // symbolic parameter, if any
  std::optional<mpq_class> param_value;      // bound value, if any

  static Field rationals() { return {}; }
  static Field prime(std::uint32_t p);

  Scalar from_rational(const mpq_class &q) const;
  Scalar zero() const { return from_rational(0); }
  Scalar one() const { return from_rational(1); }
  // The parameter as a scalar: its bound value, or the symbolic variable.
  Scalar parameter() const;
  std::string describe() const;
};

} // namespace linrew
