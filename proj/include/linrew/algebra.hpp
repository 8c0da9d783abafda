#pragma once

#include "linrew/scalar.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace linrew {

struct CompositionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Gen = std::uint32_t;
using Word = std::vector<Gen>;

struct Generator {
  std::string name;
  int source = 0;
  int target = 0;
  int degree = 1;
};

class Quiver {
public:
  // A quiver with one object named "*".
  Quiver();
  explicit Quiver(std::vector<std::string> objects);

  int add_object(const std::string &name);
  Gen add_generator(const std::string &name, int source = 0, int target = 0, int degree = 1);

  const std::vector<std::string> &objects() const { return objects_; }
  const std::vector<Generator> &generators() const { return gens_; }
  const Generator &generator(Gen g) const { return gens_.at(g); }
  size_t num_generators() const { return gens_.size(); }
  int find_generator(const std::string &name) const;
  int find_object(const std::string &name) const;

  bool operator==(const Quiver &o) const;

private:
  std::vector<std::string> objects_;
  std::vector<Generator> gens_;
};

// A path in the free category on a quiver; the empty word at object p is 1_p.
struct Monomial {
  Word word;
  int source = 0;
  int target = 0;

  Monomial() = default;
  Monomial(Word w, int s, int t) : word(std::move(w)), source(s), target(t) {}

  static Monomial identity(int object) { return Monomial({}, object, object); }
  // Builds a path, checking composability against the quiver.
  static Monomial path(const Quiver &q, Word w);
  static Monomial path(const Quiver &q, Word w, int object_if_empty);

  bool is_identity() const { return word.empty(); }
  size_t length() const { return word.size(); }
  bool parallel(const Monomial &o) const { return source == o.source && target == o.target; }
  // Subpath [from, to) with boundary derived from the quiver.
  Monomial slice(const Quiver &q, size_t from, size_t to) const;

  bool operator==(const Monomial &o) const = default;
};

// Canonical word order: shorter first, then generator ids lexicographically,
// then boundary. Used wherever no monomial order is in force.
struct CanonicalLess {
  bool operator()(const Monomial &a, const Monomial &b) const;
};

struct MonomialHash {
  size_t operator()(const Monomial &m) const;
};

int degree(const Quiver &q, const Monomial &m);
int degree(const Quiver &q, const Word &w);

Monomial compose(const Monomial &a, const Monomial &b);

class Polynomial {
public:
  using Terms = std::map<Monomial, Scalar, CanonicalLess>;

  Polynomial() = default;
  Polynomial(const Monomial &m, const Scalar &c = Scalar(1));

  static Polynomial zero(int source, int target);

  const Terms &terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }
  Scalar coeff(const Monomial &m) const;
  // Boundary, or (-1, -1) for a zero polynomial of unknown boundary.
  int source() const { return source_; }
  int target() const { return target_; }

  void add_term(const Monomial &m, const Scalar &c);

  Polynomial operator+(const Polynomial &o) const;
  Polynomial operator-(const Polynomial &o) const;
  Polynomial operator-() const;
  Polynomial operator*(const Scalar &c) const;
  // Concatenation product, distributed over terms.
  Polynomial operator*(const Polynomial &o) const;
  Polynomial &operator+=(const Polynomial &o);
  Polynomial &operator-=(const Polynomial &o);

  bool operator==(const Polynomial &o) const;
  bool operator!=(const Polynomial &o) const { return !(*this == o); }

  // Left and right multiplication by monomials.
  Polynomial whisker(const Monomial &left, const Monomial &right) const;

  bool homogeneous(const Quiver &q, int *deg = nullptr) const;
  Polynomial to_modular(std::uint32_t p) const;

private:
  void check_boundary(int s, int t);
  Terms terms_;
  int source_ = -1;
  int target_ = -1;
};

enum class OrderKind { Deglex, WeightedDeglex, BlockDeglex };

// A monomial order comparing a degree-like quantity first and then the words
// lexicographically with respect to a precedence on generators.
class MonomialOrder {
public:
  MonomialOrder() = default;
  // rank[g] = position of generator g in the precedence (larger = bigger).
  static MonomialOrder deglex(std::vector<int> rank);
  static MonomialOrder weighted(std::vector<int> rank, std::vector<int> weights);
  // block[g]: larger blocks dominate; degrees are compared block by block
  // from the highest block down, then as deglex.
  static MonomialOrder block(std::vector<int> rank, std::vector<int> block);

  OrderKind kind() const { return kind_; }
  const std::vector<int> &rank() const { return rank_; }
  const std::vector<int> &weights() const { return weights_; }
  const std::vector<int> &blocks() const { return block_; }

  std::strong_ordering compare(const Quiver &q, const Monomial &a, const Monomial &b) const;
  bool less(const Quiver &q, const Monomial &a, const Monomial &b) const {
    return compare(q, a, b) == std::strong_ordering::less;
  }

  bool operator==(const MonomialOrder &o) const = default;

private:
  long weight_of(const Quiver &q, const Word &w) const;
  OrderKind kind_ = OrderKind::Deglex;
  std::vector<int> rank_;
  std::vector<int> weights_;
  std::vector<int> block_;
};

struct LeadingData {
  bool zero = true;
  Monomial lm;
  Scalar lc;
  Polynomial lt;
};

LeadingData leading_data(const Quiver &q, const Polynomial &f, const MonomialOrder &ord);

} // namespace linrew
