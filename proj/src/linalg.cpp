#include "linrew/linalg.hpp"

namespace linrew {

void axpy(SparseVec &y, const Scalar &a, const SparseVec &x) {
  if (a.is_zero())
    return;
  for (const auto &[i, c] : x) {
    auto [it, inserted] = y.try_emplace(i, a * c);
    if (!inserted) {
      it->second += a * c;
      if (it->second.is_zero())
        y.erase(it);
    } else if (it->second.is_zero()) {
      y.erase(it);
    }
  }
}

SparseVec Echelon::reduce(SparseVec v) const {
  if (rows_.empty())
    return v;
  std::vector<std::pair<int, Scalar>> hits;
  for (const auto &[i, c] : v)
    if (rows_.count(i))
      hits.emplace_back(i, c);
  for (const auto &[i, c] : hits)
    axpy(v, -c, rows_.at(i));
  return v;
}

bool Echelon::insert(SparseVec v) {
  v = reduce(std::move(v));
  if (v.empty())
    return false;
  int pivot = -1;
  for (const auto &[i, c] : v)
    if (c.invertible()) {
      pivot = i;
      break;
    }
  if (pivot < 0)
    throw ArithmeticError("rank depends on the parameter value: no pivot is nonzero for every admissible value");
  Scalar inv = v.at(pivot).inverse();
  for (auto &[i, c] : v)
    c *= inv;
  for (auto &[p, row] : rows_) {
    auto it = row.find(pivot);
    if (it != row.end()) {
      Scalar c = it->second;
      axpy(row, -c, v);
    }
  }
  rows_.emplace(pivot, std::move(v));
  return true;
}

size_t rank(const std::vector<SparseVec> &vectors) {
  Echelon e;
  for (const auto &v : vectors)
    e.insert(v);
  return e.rank();
}

bool ModEchelon::insert(Row v) {
  const std::uint64_t p = p_;
  std::map<int, std::uint64_t> acc;
  for (auto [i, c] : v)
    if (c % p)
      acc[i] = (acc[i] + c) % p;
  for (auto it = acc.begin(); it != acc.end();) {
    if (it->second == 0) {
      it = acc.erase(it);
      continue;
    }
    auto r = rows_.find(it->first);
    if (r == rows_.end()) {
      ++it;
      continue;
    }
    std::uint64_t f = it->second;
    for (auto [j, c] : r->second) {
      auto &slot = acc[j];
      slot = (slot + (p - f) * c) % p;
    }
    // the leading entry is now zero; continue after it
    it = acc.upper_bound(r->first);
    acc.erase(r->first);
  }
  for (auto it = acc.begin(); it != acc.end();)
    it = it->second == 0 ? acc.erase(it) : std::next(it);
  if (acc.empty())
    return false;
  std::uint64_t inv = mod_inverse(static_cast<std::uint32_t>(acc.begin()->second), p_);
  Row row;
  row.reserve(acc.size());
  for (auto [i, c] : acc)
    row.emplace_back(i, static_cast<std::uint32_t>(c * inv % p));
  int lead = row.front().first;
  rows_.emplace(lead, std::move(row));
  return true;
}

} // namespace linrew
