#pragma once

#include "linrew/scalar.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace linrew {

using SparseVec = std::map<int, Scalar>;

void axpy(SparseVec &y, const Scalar &a, const SparseVec &x); // y += a x

// Incremental reduced row echelon form. Every stored row has coefficient 1
// at its pivot and 0 at every other pivot, so reduction is a single pass.
// Pivots must be invertible; with parameter functions a row whose nonzero
// entries may all vanish for some admissible value raises ArithmeticError.
class Echelon {
public:
  // Returns true when v was independent of the stored rows (and stores it).
  bool insert(SparseVec v);
  SparseVec reduce(SparseVec v) const;
  bool contains(const SparseVec &v) const { return reduce(v).empty(); }
  size_t rank() const { return rows_.size(); }
  const std::map<int, SparseVec> &rows() const { return rows_; }

private:
  std::map<int, SparseVec> rows_;
};

size_t rank(const std::vector<SparseVec> &vectors);

// Dense-free elimination over GF(p) for the larger cross-check matrices.
class ModEchelon {
public:
  using Row = std::vector<std::pair<int, std::uint32_t>>; // sorted by index

  explicit ModEchelon(std::uint32_t p) : p_(p) {}
  bool insert(Row v);
  size_t rank() const { return rows_.size(); }
  std::uint32_t prime() const { return p_; }

private:
  std::uint32_t p_;
  std::map<int, Row> rows_; // leading index -> row with leading coefficient 1
};

} // namespace linrew
