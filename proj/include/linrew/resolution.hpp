#pragma once

#include "linrew/completion.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace linrew {

// A cell of the resolution. Dimension 0 cells are objects, dimension 1
// cells are generators, dimension 2 cells are rules, and a k-cell for k >= 3
// is an overlap chain carrying k - 1 redexes.
struct ChainCell {
  int dim = 0;
  Monomial word;
  std::vector<Occurrence> redexes;
  int degree = 0;
  int object = -1; // dim 0
  Gen generator = 0; // dim 1
  int rule = -1;     // dim 2

  // Stable identity within a dimension.
  std::string key() const;
};

std::string chain_label(const Polygraph2 &P, const ChainCell &c);

// The chains of a reduced convergent polygraph, by dimension (index = dim).
struct ChainSet {
  int kmax = 0;
  int dmax = 0;
  std::vector<std::vector<ChainCell>> cells;

  const std::vector<ChainCell> &dim(int k) const;
  int find(int k, const std::string &key) const;
  size_t count(int k) const { return dim(k).size(); }

private:
  mutable std::vector<std::map<std::string, int>> index_;
};

// Cells of dimension <= kmax and internal degree <= dmax. Chains are built
// by extension: a new redex starts inside the last one, after the end of
// the one before, reaches past the current word, and no other occurrence in
// that window ends earlier.
ChainSet enumerate_chains(const Polygraph2 &P, int kmax, int dmax);

// Drops the last redex of a chain of dimension >= 3.
ChainCell chain_prefix(const Polygraph2 &P, const ChainCell &c);

struct DegreeTable {
  // counts[k][i] = number of k-cells of internal degree i
  std::vector<std::vector<size_t>> counts;
  std::vector<bool> concentrated; // per dimension, against l_N
  int N = -1;
};

// l_N(2l) = lN, l_N(2l + 1) = lN + 1.
int ell(int N, int k);

DegreeTable cell_degrees(const ChainSet &cells, int N);

// The 3-cell filling the critical branching (phi m^, nu). Source is the leg
// starting with the rule at position 0, target is the rightmost
// normalisation of the overlap word.
struct Confluence3Cell {
  ChainCell cell;
  Trace phi_leg;
  Trace rho_leg;
};

Confluence3Cell generating_confluence(const Polygraph2 &P, const ChainCell &c, Rewriter &rw);
Confluence3Cell generating_confluence(const Polygraph2 &P, const ChainCell &c);

// A whiskered generating 3-cell: coeff * left * omega_cell * right.
struct CellInstance {
  Scalar coeff;
  Monomial left;
  int cell = -1; // index among the 3-cells of the chain set
  Monomial right;
};

struct Boundary4Data {
  ChainCell cell;
  std::vector<CellInstance> source; // omega_c m^ followed by normalisation
  std::vector<CellInstance> target; // normalisation of the phi leg of c, whiskered
};

// Builds normalising 3-traces and the 4-cell boundary data. Holds memo
// tables, so one engine per thread.
class ThreeCellEngine {
public:
  ThreeCellEngine(const Polygraph2 &P, const ChainSet &chains);

  Boundary4Data boundary4(const ChainCell &c);

  // Normalising 3-cell from (phi m^) * rho to rho(m m^), for irreducible m^.
  std::vector<CellInstance> K(int rule, const Monomial &mhat);
  // Sum over the steps of a 2-trace whiskered on the right by w.
  std::vector<CellInstance> theta(const Trace &t, const Monomial &w);

  Rewriter &rewriter() { return rw_; }

private:
  const Polygraph2 &P_;
  const ChainSet &chains_;
  Rewriter rw_;
  std::map<std::pair<int, Word>, std::vector<CellInstance>> memo_;
  int depth_ = 0;
};

Boundary4Data boundary4(const Polygraph2 &P, const ChainSet &chains, const ChainCell &c);

// Merges instances with equal (left, cell, right) and drops zeros.
std::vector<CellInstance> simplify(std::vector<CellInstance> v);

// Boundary data of the reduced (tensored with the ground field) complex.
// Each cell keeps its source and target images separately so collapses can
// check on which side a cell occurs.
struct ComplexCell {
  std::string label;
  int degree = 0;
  SparseVec src; // indices into dimension - 1
  SparseVec tgt;
  bool alive = true;

  SparseVec boundary() const;
};

struct ComplexData {
  std::vector<std::vector<ComplexCell>> cells; // index = dimension
  int exact_top = 0; // boundaries known for dimensions <= exact_top

  size_t alive_count(int k, int degree) const;
  int find(int k, const std::string &label) const;
};

struct CollapseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cancels the k-cell gamma against the (k+1)-cell A.
ComplexData collapse_pair(const ComplexData &cd, int k, int gamma, int A);

// Repeatedly collapses pairs of equal degree, favouring cells off the l_N
// diagonal. Returns the collapsed pairs as (k, gamma label, A label).
struct CollapseLog {
  std::vector<std::tuple<int, std::string, std::string>> pairs;
};
ComplexData collapse_saturate(const ComplexData &cd, int N, CollapseLog *log = nullptr);

} // namespace linrew
