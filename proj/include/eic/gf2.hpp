#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "eic/errors.hpp"

namespace eic {

// One 64-column span of a GF(2) row: columns [word*64, word*64+63].
struct GfSeg {
  std::uint32_t word;
  std::uint64_t bits;
};

namespace gf2_detail {

// a ^= b for sorted segment lists, dropping zero words.
inline void xor_into(std::vector<GfSeg>& a, const std::vector<GfSeg>& b) {
  std::vector<GfSeg> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].word < b[j].word) {
      out.push_back(a[i++]);
    } else if (b[j].word < a[i].word) {
      out.push_back(b[j++]);
    } else {
      std::uint64_t x = a[i].bits ^ b[j].bits;
      if (x) out.push_back({a[i].word, x});
      ++i;
      ++j;
    }
  }
  while (i < a.size()) out.push_back(a[i++]);
  while (j < b.size()) out.push_back(b[j++]);
  a = std::move(out);
}

inline std::uint32_t lowest_column(const std::vector<GfSeg>& row) {
  return row.front().word * 64 +
         std::uint32_t(std::countr_zero(row.front().bits));
}

}  // namespace gf2_detail

// Incremental GF(2) linear system over a fixed set of unknowns. Rows are kept
// as an echelon basis (one row per pivot column); rank and consistency are
// maintained as equations arrive, and individual unknowns can be tested for
// solvability or solved at any point.
class EquationSystem {
 public:
  explicit EquationSystem(std::size_t unknown_count)
      : n_(unknown_count), col_to_row_(unknown_count, -1) {}

  std::size_t unknown_count() const { return n_; }
  std::size_t row_count() const { return added_; }
  std::size_t rank() const { return rows_.size(); }
  bool inconsistent() const { return inconsistent_; }

  // Equation sum_{k in coeffs} x_k = rhs. Repeated indices toggle. Returns
  // whether the rank grew.
  bool add_equation(std::span<const std::uint32_t> coeffs, int rhs) {
    std::vector<std::uint32_t> idx(coeffs.begin(), coeffs.end());
    std::sort(idx.begin(), idx.end());
    std::vector<GfSeg> row;
    for (std::uint32_t k : idx) {
      if (k >= n_) throw contract_error("equation index out of range");
      std::uint32_t w = k / 64;
      std::uint64_t bit = 1ull << (k % 64);
      if (!row.empty() && row.back().word == w)
        row.back().bits ^= bit;
      else
        row.push_back({w, bit});
    }
    std::erase_if(row, [](const GfSeg& s) { return s.bits == 0; });
    return insert(std::move(row), rhs & 1);
  }

  // Same equation given directly as sorted, distinct, nonzero word segments.
  bool add_equation_packed(std::span<const GfSeg> segs, int rhs) {
    std::vector<GfSeg> row;
    row.reserve(segs.size());
    for (const GfSeg& s : segs) {
      if (s.bits == 0) continue;
      if (!row.empty() && row.back().word >= s.word)
        throw contract_error("packed segments must be sorted by word");
      std::uint32_t top =
          s.word * 64 + 63 - std::uint32_t(std::countl_zero(s.bits));
      if (top >= n_) throw contract_error("equation index out of range");
      row.push_back(s);
    }
    return insert(std::move(row), rhs & 1);
  }

  // True when every listed unknown is determined by the equations so far,
  // i.e. its unit vector lies in the row space.
  bool solvable_for(std::span<const std::uint32_t> targets) const {
    for (std::uint32_t k : targets) {
      if (k >= n_) throw contract_error("target index out of range");
      if (!walk(k, nullptr)) return false;
    }
    return true;
  }

  // Values of the listed unknowns. Caller must have checked solvable_for.
  std::vector<std::uint8_t> solve(std::span<const std::uint32_t> targets) const {
    std::vector<std::uint8_t> out;
    out.reserve(targets.size());
    for (std::uint32_t k : targets) {
      if (k >= n_) throw contract_error("target index out of range");
      int val = 0;
      if (!walk(k, &val))
        throw contract_error("solve called for an undetermined unknown");
      out.push_back(std::uint8_t(val));
    }
    return out;
  }

  // Whether the XOR of the listed unknowns is pinned by the rows so far;
  // the combination can be determined even when no single member is.
  // Repeated indices toggle. On success writes the XOR value if val is given.
  bool probe(std::span<const std::uint32_t> coeffs, int* val) const {
    std::vector<std::uint32_t> idx(coeffs.begin(), coeffs.end());
    std::sort(idx.begin(), idx.end());
    std::vector<GfSeg> row;
    for (std::uint32_t k : idx) {
      if (k >= n_) throw contract_error("probe index out of range");
      std::uint32_t w = k / 64;
      std::uint64_t bit = 1ull << (k % 64);
      if (!row.empty() && row.back().word == w)
        row.back().bits ^= bit;
      else
        row.push_back({w, bit});
    }
    std::erase_if(row, [](const GfSeg& s) { return s.bits == 0; });
    int acc = 0;
    while (!row.empty()) {
      std::uint32_t p = gf2_detail::lowest_column(row);
      std::int32_t r = col_to_row_[p];
      if (r < 0) return false;
      gf2_detail::xor_into(row, rows_[std::size_t(r)].segs);
      acc ^= rows_[std::size_t(r)].rhs;
    }
    if (val) *val = acc;
    return true;
  }

 private:
  struct Row {
    std::vector<GfSeg> segs;
    std::uint8_t rhs;
  };

  bool insert(std::vector<GfSeg> row, int rhs) {
    ++added_;
    while (!row.empty()) {
      std::uint32_t p = gf2_detail::lowest_column(row);
      std::int32_t r = col_to_row_[p];
      if (r < 0) {
        col_to_row_[p] = std::int32_t(rows_.size());
        rows_.push_back({std::move(row), std::uint8_t(rhs)});
        return true;
      }
      gf2_detail::xor_into(row, rows_[std::size_t(r)].segs);
      rhs ^= rows_[std::size_t(r)].rhs;
    }
    if (rhs) inconsistent_ = true;
    return false;
  }

  // Reduce the unit vector e_k by the basis. Returns true when it vanishes;
  // if val is given, accumulates the right-hand sides along the way.
  bool walk(std::uint32_t k, int* val) const {
    std::vector<GfSeg> row{{k / 64, 1ull << (k % 64)}};
    while (!row.empty()) {
      std::uint32_t p = gf2_detail::lowest_column(row);
      std::int32_t r = col_to_row_[p];
      if (r < 0) return false;
      gf2_detail::xor_into(row, rows_[std::size_t(r)].segs);
      if (val) *val ^= rows_[std::size_t(r)].rhs;
    }
    return true;
  }

  std::size_t n_;
  std::vector<std::int32_t> col_to_row_;
  std::vector<Row> rows_;
  std::size_t added_ = 0;
  bool inconsistent_ = false;
};

}  // namespace eic
