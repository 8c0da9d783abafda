#pragma once

#include "linrew/rewrite.hpp"

#include <optional>
#include <string>
#include <vector>

namespace linrew {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TerminationHint {
  std::optional<MonomialOrder> order;
  std::optional<MeasureSpec> measure;
};

struct TerminationReport {
  bool ok = false;
  std::optional<TerminationCertificate> certificate;
  int violating_rule = -1;
  std::string failure;
};

// With an explicit hint only that hint is tried; without one, the measure
// and order declared on the polygraph are tried in that order.
TerminationReport certify_termination(const Polygraph2 &P, const TerminationHint &hint);
TerminationReport certify_termination(const Polygraph2 &P);

enum class BranchingKind { Aspherical, Peiffer, AdditivePeiffer, Overlapping, Critical };
std::string to_string(BranchingKind k);

struct Branching {
  Polynomial source;
  RewriteStep first;
  RewriteStep second;
  BranchingKind kind = BranchingKind::Critical;
  // Redex positions on the overlap word for branchings on one monomial.
  size_t first_start = 0, first_end = 0, second_start = 0, second_end = 0;
  bool inclusion = false;

  Monomial word(const Polygraph2 &P) const { return first.redex_word(P); }
};

// Classifies a pair of steps on the same polynomial f.
Branching classify_branching(const Polygraph2 &P, const Polynomial &f, const RewriteStep &a, const RewriteStep &b);

// Proper overlaps of rule sources (plus inclusions when the system is not
// left-reduced), ordered by (first rule, second rule, overlap length). The
// first step is always the one at position 0.
std::vector<Branching> enumerate_critical_branchings(const Polygraph2 &P);

struct SPolynomial {
  Polynomial value; // target of the first step minus target of the second
  int first_rule = -1;
  int second_rule = -1;
  Monomial word;
};

SPolynomial s_polynomial(const Polygraph2 &P, const Branching &b);

struct ConfluenceEntry {
  Branching branching;
  SPolynomial s;
  Polynomial s_normal_form;
  Trace first_join;  // normalisation of the first one-step result
  Trace second_join; // normalisation of the second one-step result
  bool joins_complete = true; // false when the traces hit their step budget
  bool confluent = false;
};

struct ConfluenceReport {
  TerminationCertificate termination;
  std::vector<ConfluenceEntry> entries;
  bool convergent = false;
};

// Requires a termination certificate; throws std::logic_error otherwise.
// Without with_joins only the S-polynomial normal forms are computed.
ConfluenceReport check_confluence(const Polygraph2 &P, const TerminationCertificate &cert, bool with_joins = true);

// Runs termination and confluence checks and returns a copy carrying the
// certificates that could be established.
Polygraph2 certify(const Polygraph2 &P);

struct CompletionBounds {
  int max_degree = 12;
  size_t max_rules = 512;
};

struct CompletionResult {
  Polygraph2 system;
  bool certified = false;
  bool bound_exceeded = false;
  bool unchanged = false;
  std::vector<int> added; // ids in `system` of rules not present in the input
  std::string note;
};

CompletionResult complete(const Polygraph2 &P, const MonomialOrder &ord, const CompletionBounds &bounds = {});

// Left- and right-reduces; rules whose source becomes reducible are
// re-normalized and re-oriented with the polygraph's order (or dropped when
// they normalize to zero).
Polygraph2 interreduce(const Polygraph2 &P);

// Monic relations source - target with respect to `ord`.
std::vector<Polynomial> groebner_view(const Polygraph2 &P, const MonomialOrder &ord);

// Orients a nonzero polynomial as lm => lm - f / lc.
Rule orient(const Polygraph2 &P, const Polynomial &f, const MonomialOrder &ord, const std::string &name);

} // namespace linrew
