#pragma once

#include "linrew/io.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace linrew::testing {

std::string fixture_path(const std::string &name);
Presentation fixture(const std::string &name);

// Runs completion under the system's own order and insists on a certificate.
Polygraph2 completed(const Polygraph2 &P, int max_degree = 12);

struct RandomSpec {
  int max_generators = 3;
  int max_rules = 4;
  int max_degree = 3;
  int max_target_terms = 3;
};

// Homogeneous rules on one object, oriented so that deglex x < y < z
// decreases; certificates are attached.
Polygraph2 random_system(std::mt19937_64 &rng, const RandomSpec &shape = {});

// Random homogeneous polynomial of degree d with small integer coefficients.
Polynomial random_polynomial(std::mt19937_64 &rng, const Quiver &q, int d, int terms);
// Random element of the degree d part of the ideal of the relations of P.
Polynomial random_ideal_element(std::mt19937_64 &rng, const Polygraph2 &P, int d, int terms);

// Canonical key of a polynomial (for visited sets).
std::string key_of(const Polygraph2 &P, const Polynomial &f);

// All polynomials reachable from f by rewriting steps, capped. Sets
// `complete` to false when the cap was reached.
std::vector<std::string> reducts(const Polygraph2 &P, const Polynomial &f, size_t cap, bool &complete);

// Tor_k^(i) of the algebra presented by a convergent P, computed over GF(p)
// from the normalized bar complex; result[k][i] for k <= kmax, i <= dmax.
std::vector<std::vector<long>> bar_tor(const Polygraph2 &P, int kmax, int dmax, std::uint32_t p = 32003);

struct CheckResult {
  bool ok = true;
  std::string detail;
};

// delta o delta = 0 on the reduced complex, for every dimension with known boundaries.
CheckResult reduced_d_squared(const ComplexData &cd);

// delta o delta = 0 on the free A-modules, for dimensions 3 -> 1 and 4 -> 2,
// with [u phi v] = 0 unless u is an identity and [phi v] = [phi] v.
CheckResult module_d_squared(const Polygraph2 &P, const ReducedComplex &rc);

// Collapses random admissible pairs (A in dimension <= top) until none is left.
ComplexData random_collapses(const ComplexData &cd, std::mt19937_64 &rng, int top);

// Local branchings on words of length <= max_len versus critical ones.
CheckResult newman_agreement(const Polygraph2 &P, int max_len = 6, size_t cap = 20000);

// One randomized system through every property; the first failing check
// is returned with its name.
struct PropertyFailure {
  std::string check;
  std::string detail;
  std::string system;
};

struct SystemOutcome {
  std::optional<PropertyFailure> failure;
  bool input_convergent = false;
  bool completed = false; // completion certified within bounds
  bool complex_built = false;
};

SystemOutcome check_system(const Polygraph2 &P, std::uint64_t seed);

// Greedy shrinking: drops rules and target terms while the same check fails.
Polygraph2 shrink(const Polygraph2 &P, const std::string &check, std::uint64_t seed);

struct SuiteReport {
  int systems = 0;
  int non_confluent = 0; // inputs where a non-joinable branching had to be exhibited
  int completed = 0;
  int complexes = 0;
  std::vector<PropertyFailure> failures; // shrunk
};

SuiteReport run_property_suite(std::uint64_t seed, int count, std::ostream *log = nullptr);

} // namespace linrew::testing
