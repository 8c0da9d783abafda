#pragma once

#include "linrew/algebra.hpp"
#include "linrew/linalg.hpp"

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace linrew {

struct Rule {
  std::string name;
  Monomial source;
  Polynomial target;

  bool operator==(const Rule &o) const { return name == o.name && source == o.source && target == o.target; }
};

struct Occurrence {
  size_t start = 0;
  size_t length = 0;
  int rule = -1;
  size_t end() const { return start + length; }
};

// Aho-Corasick automaton over rule sources.
class FactorAutomaton {
public:
  FactorAutomaton() = default;
  FactorAutomaton(const std::vector<Word> &patterns, size_t alphabet);

  // All occurrences, sorted by start position, then rule id.
  std::vector<Occurrence> scan(const Word &w) const;
  bool matches_anywhere(const Word &w) const;

  // Incremental interface used when enumerating irreducible words.
  int root() const { return 0; }
  int step(int state, Gen g) const { return delta_[static_cast<size_t>(state) * alphabet_ + g]; }
  bool accepting(int state) const { return !outputs_[static_cast<size_t>(state)].empty(); }

private:
  size_t alphabet_ = 0;
  std::vector<int> delta_;
  std::vector<std::vector<std::pair<int, size_t>>> outputs_; // (rule, length)
};

// Letter weights plus weighted subword patterns; the measure of a word is
// the sum of its letter weights and of the weights of pattern occurrences.
struct MeasureSpec {
  std::vector<std::pair<Gen, long>> letters;
  std::vector<std::pair<Word, long>> patterns;
  int context = 3;

  long measure(const Word &w) const;
  bool operator==(const MeasureSpec &o) const = default;
};

struct TerminationCertificate {
  enum class Kind { OrderCompatible, PatternMeasure, UserAsserted };
  Kind kind = Kind::UserAsserted;
  std::optional<MonomialOrder> order;
  std::optional<MeasureSpec> measure;
  std::string notes;
};

std::string to_string(TerminationCertificate::Kind k);

class Polygraph2 {
public:
  Polygraph2() = default;
  Polygraph2(Field field, Quiver quiver, std::vector<Rule> rules, std::optional<MonomialOrder> order = {});

  const Field &field() const { return field_; }
  const Quiver &quiver() const { return quiver_; }
  const std::vector<Rule> &rules() const { return rules_; }
  const Rule &rule(int id) const { return rules_.at(static_cast<size_t>(id)); }
  int find_rule(const std::string &name) const;
  const std::optional<MonomialOrder> &order() const { return order_; }

  const std::optional<MeasureSpec> &measure_hint() const { return measure_hint_; }
  void set_measure_hint(std::optional<MeasureSpec> m) { measure_hint_ = std::move(m); }

  // Certificates are attached by the completion module.
  const std::optional<TerminationCertificate> &termination() const { return termination_; }
  bool convergent() const { return convergent_; }
  void set_certificates(std::optional<TerminationCertificate> t, bool convergent);

  // Same quiver, field, order and hints; new rule list; certificates dropped.
  Polygraph2 with_rules(std::vector<Rule> rules) const;

  std::vector<Occurrence> occurrences(const Word &w) const { return automaton_.scan(w); }
  bool reducible(const Word &w) const { return automaton_.matches_anywhere(w); }
  const FactorAutomaton &automaton() const { return automaton_; }

  // Flags, recomputed from the rules.
  bool left_reduced() const { return left_reduced_; }
  bool right_reduced() const { return right_reduced_; }
  // Every rule target is homogeneous of the degree of its source.
  bool homogeneous() const { return homogeneous_; }
  // N when homogeneous and every source has degree N, else -1.
  int homogeneous_degree() const { return homogeneous_degree_; }

private:
  void rebuild();

  Field field_;
  Quiver quiver_;
  std::vector<Rule> rules_;
  std::optional<MonomialOrder> order_;
  std::optional<MeasureSpec> measure_hint_;
  std::optional<TerminationCertificate> termination_;
  bool convergent_ = false;
  FactorAutomaton automaton_;
  bool left_reduced_ = true, right_reduced_ = true, homogeneous_ = true;
  int homogeneous_degree_ = -1;
};

struct RewriteStep {
  Scalar coeff;
  Monomial left;
  int rule = -1;
  Monomial right;

  Monomial redex_word(const Polygraph2 &P) const;
  bool operator==(const RewriteStep &o) const {
    return coeff == o.coeff && left == o.left && rule == o.rule && right == o.right;
  }
};

struct Trace {
  Polynomial start;
  std::vector<RewriteStep> steps;
  Polynomial end;
};

struct NoStepError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonTerminationSuspected : std::runtime_error {
  NonTerminationSuspected(const std::string &msg, Trace partial)
      : std::runtime_error(msg), partial_trace(std::move(partial)) {}
  Trace partial_trace;
};

enum class Strategy { Rightmost, Leftmost };

constexpr size_t kDefaultStepBudget = 1000000;

// f' = f - lambda m1 (m - h) m2; throws std::invalid_argument when the side
// condition fails (the coefficient of m1 m m2 in f is not lambda).
Polynomial apply_step(const Polygraph2 &P, const Polynomial &f, const RewriteStep &s);

std::vector<RewriteStep> find_redexes(const Polynomial &f, const Polygraph2 &P);

// The rewriting step on m with the longest left context (ties: lowest rule id).
RewriteStep rightmost_step(const Monomial &m, const Polygraph2 &P);
RewriteStep leftmost_step(const Monomial &m, const Polygraph2 &P);

struct NormalFormResult {
  Polynomial nf;
  Trace trace;
};

// Normal forms with a per-instance cache. Not thread-safe: use one
// instance per thread over a shared Polygraph2.
class Rewriter {
public:
  explicit Rewriter(const Polygraph2 &P, size_t step_budget = kDefaultStepBudget);

  const Polygraph2 &polygraph() const { return P_; }

  // Rightmost normal form, computed linearly through a monomial cache.
  const Polynomial &nf(const Monomial &m);
  Polynomial nf(const Polynomial &f);

  // Normal form with an explicit trace of full-coefficient steps. Under the
  // rightmost strategy the monomial whose rightmost redex starts furthest to
  // the right is rewritten first, so the trace of m m' begins with the
  // trace of m' whiskered by m.
  NormalFormResult normal_form(const Polynomial &f, Strategy strategy = Strategy::Rightmost);

  size_t steps_used() const { return steps_; }

private:
  std::optional<Occurrence> redex(const Monomial &m, Strategy s);
  const Polygraph2 &P_;
  size_t budget_;
  size_t steps_ = 0;
  std::unordered_map<Monomial, Polynomial, MonomialHash> memo_;
  std::unordered_map<Monomial, std::optional<Occurrence>, MonomialHash> right_redex_;
};

NormalFormResult normal_form(const Polynomial &f, const Polygraph2 &P, Strategy strategy = Strategy::Rightmost,
                             size_t step_budget = kDefaultStepBudget);

// Requires a certified convergent polygraph.
bool ideal_member(const Polynomial &f, const Polygraph2 &P);

// Irreducible monomials grouped by degree 0..dmax (no precondition).
std::vector<std::vector<Monomial>> irreducible_monomials(const Polygraph2 &P, int dmax);
// Same, but requires certified convergence (then it is a linear basis).
std::vector<std::vector<Monomial>> standard_basis(const Polygraph2 &P, int dmax);

// All composable words of a given degree.
std::vector<Monomial> all_monomials(const Quiver &q, int degree);

Polygraph2 monomialize(const Polygraph2 &P);

// Brute-force model of the degree-d part of the two-sided ideal generated
// by homogeneous relations: the span of all u r v, by row reduction.
class DegreeIdeal {
public:
  DegreeIdeal(const Quiver &q, const std::vector<Polynomial> &relations, int d);

  int degree() const { return d_; }
  const std::vector<Monomial> &words() const { return words_; }
  size_t dim_free() const { return words_.size(); }
  size_t rank() const { return ech_.rank(); }
  size_t quotient_dim() const { return words_.size() - ech_.rank(); }
  SparseVec vectorize(const Polynomial &f) const;
  bool contains(const Polynomial &f) const;
  const Echelon &echelon() const { return ech_; }

private:
  int d_;
  std::vector<Monomial> words_;
  std::unordered_map<Monomial, int, MonomialHash> index_;
  Echelon ech_;
};

std::vector<Polynomial> relations_of(const Polygraph2 &P);

struct PbwReport {
  int dmax = 0;
  bool basis_ok = true;       // condition i), checked degree by degree up to dmax
  bool closure_ok = true;     // condition ii)
  bool window_ok = true;      // condition iii)
  int first_failure_degree = -1;
  std::vector<std::string> failures;
  bool xi_built = false;
  std::vector<Rule> xi_rules; // uv => [uv] for |uv| = N, uv not in the candidate set
  bool passed() const { return basis_ok && closure_ok && window_ok; }
};

PbwReport pbw_check(const Polygraph2 &P, const std::vector<Monomial> &candidate, int dmax, bool build_xi = true);

} // namespace linrew
