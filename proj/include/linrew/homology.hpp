#pragma once

#include "linrew/resolution.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace linrew {

// Steps with identity left and right context, each contributing
// coeff * [rule]. Keys are rule ids.
SparseVec trace_bracket(const Trace &t);

struct ReducedComplex {
  ChainSet chains;
  ComplexData data;
  int kmax = 0;
  int dmax = 0;
  // 3- and 4-cell boundary data, kept for inspection and module-level checks.
  std::vector<Confluence3Cell> confluences;
  std::vector<Boundary4Data> boundaries4;
};

// Requires a reduced, certified convergent polygraph whose rules are
// homogeneous. Chains are enumerated through dimension max(4, kmax + 1).
ReducedComplex build_complex(const Polygraph2 &P, int kmax, int dmax);

struct TorEntry {
  enum class Kind { Exact, Interval, HardZero };
  Kind kind = Kind::Exact;
  long lo = 0;
  long hi = 0;
  bool exact() const { return lo == hi; }
};

std::string to_string(TorEntry::Kind k);

struct TorTable {
  int kmax = 0;
  int dmax = 0;
  int N = -1;
  std::vector<std::vector<TorEntry>> entries; // [k][i]

  const TorEntry &at(int k, int i) const { return entries.at(static_cast<size_t>(k)).at(static_cast<size_t>(i)); }
};

// Tor from (possibly collapsed) complex data. Exact through dimension
// exact_top - 1, an interval in dimension exact_top, counts above.
TorTable tor_from_complex(const ComplexData &cd, int kmax, int dmax, int N);

TorTable tor_table(const Polygraph2 &P, int kmax, int dmax, int N = -1);

// Same sources, coefficients reduced mod p, certificates re-established.
Polygraph2 reduce_mod(const Polygraph2 &P, std::uint32_t p);

struct CountingCriterion {
  bool applicable = false;        // some (k, i) with fewer (k+1)-cells than k-cells, i > l_N(k)
  bool hypothesis_holds = false;  // lower dimensions l_N-concentrated
  int k = -1;
  int i = -1;
  std::string detail;
};

CountingCriterion counting_criterion(const ChainSet &chains, int N);

struct KoszulVerdict {
  enum class Kind { KoszulCertified, NotKoszul, KoszulUpToBound, NotApplicable };
  Kind kind = Kind::NotApplicable;
  std::string reason;
  bool global = false; // certificate not limited by the truncation
  std::string scope;
  std::optional<std::pair<int, int>> witness;
  CountingCriterion counting;
  CollapseLog collapses;
  std::vector<std::string> survivors; // labels of cells left after collapse, dims <= 3
  TorTable tor;
  int kmax = 0;
  int dmax = 0;
};

std::string to_string(KoszulVerdict::Kind k);

// N is the homogeneity degree of the presentation the system came from.
KoszulVerdict koszul_verdict(const Polygraph2 &P, int N, int kmax, int dmax);

// Hilbert function of the presented algebra from a convergent system.
std::vector<size_t> hilbert_series(const Polygraph2 &P, int dmax);

} // namespace linrew
