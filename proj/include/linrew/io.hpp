#pragma once

#include "linrew/homology.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace linrew {

struct ParseError : InputError {
  ParseError(int line, int column, const std::string &msg);
  int line;
  int column;
};

struct Presentation {
  Polygraph2 system;
  // Claimed certificates found in the file (checked by load_presentation).
  bool claims_termination = false;
  bool claims_convergence = false;
  // Degree N when every rule source has degree N and rules are homogeneous.
  int N = -1;
};

Presentation parse_presentation(const std::string &text);
// Parses, then re-establishes certificates; a claimed certificate that does
// not hold is an InputError.
Presentation load_presentation(const std::string &text);
Presentation load_presentation_file(const std::string &path);

// Canonical text. load_presentation(print_presentation(P)) reproduces P with
// its certificates; parse_presentation alone only records the claims.
std::string print_presentation(const Polygraph2 &P, bool with_certificates = true);

std::string format_word(const Quiver &q, const Monomial &m);
std::string format_polynomial(const Quiver &q, const Polynomial &f);
std::string format_scalar(const Scalar &s);

// Parses a polynomial over the generators of P, e.g. "x y z x" or "2 x^2 - (1/a) y".
Polynomial parse_polynomial(const Polygraph2 &P, const std::string &text);
Monomial parse_word(const Quiver &q, const std::string &text);

// Monomials, one per nonempty line ("1" is the identity at the first object).
std::vector<Monomial> parse_monomial_list(const Quiver &q, const std::string &text);

nlohmann::json to_json(const Polygraph2 &P);
nlohmann::json to_json(const Polygraph2 &P, const Trace &t);
nlohmann::json to_json(const TorTable &t);
nlohmann::json to_json(const Polygraph2 &P, const KoszulVerdict &v);

constexpr int kSchemaVersion = 1;

enum ExitCode { kExitOk = 0, kExitInput = 2, kExitUncertified = 3 };

struct CommandResult {
  int exit_code = kExitOk;
  nlohmann::json report;
};

// args excludes the program name. Human-readable output goes to out, errors
// to err; with --json PATH the report is also written to PATH.
CommandResult run_command(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace linrew
