#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "eic/errors.hpp"
#include "eic/gf2.hpp"
#include "eic/params.hpp"
#include "eic/rng.hpp"

namespace eic {

enum class CacheMode { deterministic, bernoulli };

enum class ErrorType { none, type_I, type_II };

inline const char* to_string(ErrorType e) {
  switch (e) {
    case ErrorType::none: return "none";
    case ErrorType::type_I: return "I";
    default: return "II";
  }
}

inline const char* to_string(CacheMode m) {
  return m == CacheMode::deterministic ? "deterministic" : "bernoulli";
}

// Phase budgets allow the expected time plus this slack before a run is
// declared a type-I error.
inline double budget_slack(std::size_t m) {
  return std::pow(double(m), 2.0 / 3.0);
}

inline long long round_half_up(double x) {
  return (long long)std::floor(x + 0.5);
}

enum class BitStatus : std::uint8_t {
  pending,       // still queued for its first-phase transmission
  delivered,     // reached its own receiver on a direct link
  classified_A,  // collided in a fully connected slot; lives on in a pair
  classified_B,  // overheard by the other receiver; joined its pool
  sideinfo,      // cached at the other receiver before transmission began
};

struct BitRecord {
  BitStatus status = BitStatus::pending;

  void set(BitStatus next) {
    bool ok = status == BitStatus::pending &&
              (next == BitStatus::delivered || next == BitStatus::classified_A ||
               next == BitStatus::classified_B);
    if (!ok) throw contract_error("invalid bit status transition");
    status = next;
  }
};

// The two messages (len[0] and len[1] bits) plus the receiver caches.
// cache_mask[i][l] says whether receiver i+1 holds bit l of the OTHER
// message, so cache_mask[i] runs over len[1-i]; the kept fraction is
// 1 - eps_{i+1}. Mask realizations are public (they carry no message
// content), so transmitters may schedule around them.
struct MessageSet {
  std::array<std::size_t, 2> len{0, 0};
  std::array<std::vector<std::uint8_t>, 2> bits;
  std::array<std::vector<std::uint8_t>, 2> cache_mask;

  std::size_t cached_count(int rx) const {
    const auto& mask = cache_mask[std::size_t(rx - 1)];
    return std::size_t(std::accumulate(mask.begin(), mask.end(), 0L));
  }
};

inline MessageSet make_messages(std::size_t m1, std::size_t m2, double eps1,
                                double eps2, std::uint64_t seed,
                                CacheMode mode) {
  if (m1 < 1 && m2 < 1) throw param_error("at least one message must be nonempty");
  detail::check_prob(eps1, "eps1");
  detail::check_prob(eps2, "eps2");
  MessageSet ms;
  ms.len = {m1, m2};
  for (int i = 0; i < 2; ++i) {
    KeyedBits kb(seed, i == 0 ? stream_msg1 : stream_msg2);
    ms.bits[i].resize(ms.len[std::size_t(i)]);
    for (std::size_t l = 0; l < ms.bits[i].size(); ++l) ms.bits[i][l] = kb.bit(l);
  }
  const double keep[2] = {1.0 - eps1, 1.0 - eps2};
  for (int i = 0; i < 2; ++i) {
    std::size_t over = ms.len[std::size_t(1 - i)];  // the other user's message
    ms.cache_mask[i].assign(over, 0);
    if (over == 0) continue;
    std::uint64_t stream = i == 0 ? stream_cache1 : stream_cache2;
    if (mode == CacheMode::bernoulli) {
      KeyedBits kb(seed, stream);
      for (std::size_t l = 0; l < over; ++l)
        if (kb.uniform(l) < keep[i]) ms.cache_mask[i][l] = 1;
    } else {
      long long want = round_half_up(keep[i] * double(over));
      std::vector<std::uint32_t> idx(over);
      std::iota(idx.begin(), idx.end(), 0u);
      SplitMix rng(stream_key(seed, stream));
      for (long long k = 0; k < want; ++k) {
        std::size_t j = std::size_t(k) + rng.below(over - std::size_t(k));
        std::swap(idx[std::size_t(k)], idx[j]);
        ms.cache_mask[i][idx[std::size_t(k)]] = 1;
      }
    }
  }
  return ms;
}

inline MessageSet make_messages(std::size_t m, double eps1, double eps2,
                                std::uint64_t seed, CacheMode mode) {
  if (m < 1) throw param_error("message length must be at least 1");
  return make_messages(m, m, eps1, eps2, seed, mode);
}

// Dense incremental GF(2) eliminator over a fixed window of columns. The
// schemes route every equation to a window that covers all of its columns,
// so elimination never leaves the window. Same echelon/bookkeeping contract
// as EquationSystem, specialized for short fixed-width rows.
class DenseWindow {
 public:
  explicit DenseWindow(std::size_t cols)
      : cols_(cols), words_((cols + 63) / 64), pivot_(cols, -1) {
    scratch_.resize(words_);
  }

  std::size_t cols() const { return cols_; }
  std::size_t rank() const { return rank_; }
  bool inconsistent() const { return inconsistent_; }

  // row must hold words() entries and is consumed (reduced in place).
  bool add_row(std::uint64_t* row, int rhs) {
    for (;;) {
      int col = lowest(row);
      if (col < 0) {
        if (rhs & 1) inconsistent_ = true;
        return false;
      }
      std::int32_t pr = pivot_[std::size_t(col)];
      if (pr < 0) {
        pivot_[std::size_t(col)] = std::int32_t(rank_);
        store_.insert(store_.end(), row, row + words_);
        rhs_.push_back(std::uint8_t(rhs & 1));
        ++rank_;
        return true;
      }
      const std::uint64_t* base = store_.data() + std::size_t(pr) * words_;
      for (std::size_t w = 0; w < words_; ++w) row[w] ^= base[w];
      rhs ^= rhs_[std::size_t(pr)];
    }
  }

  bool add_bits(std::initializer_list<std::size_t> cols_set, int rhs) {
    std::fill(scratch_.begin(), scratch_.end(), 0ull);
    for (std::size_t c : cols_set) {
      if (c >= cols_) throw contract_error("window column out of range");
      scratch_[c / 64] ^= 1ull << (c % 64);
    }
    return add_row(scratch_.data(), rhs);
  }

  bool solvable(std::size_t col) const { return walk(col, nullptr); }

  int value(std::size_t col) const {
    int v = 0;
    if (!walk(col, &v))
      throw contract_error("window unknown is undetermined");
    return v;
  }

  std::size_t words() const { return words_; }

 private:
  int lowest(const std::uint64_t* row) const {
    for (std::size_t w = 0; w < words_; ++w)
      if (row[w]) return int(w * 64 + std::size_t(std::countr_zero(row[w])));
    return -1;
  }

  bool walk(std::size_t col, int* val) const {
    if (col >= cols_) throw contract_error("window column out of range");
    std::fill(scratch_.begin(), scratch_.end(), 0ull);
    scratch_[col / 64] = 1ull << (col % 64);
    for (;;) {
      int c = lowest(scratch_.data());
      if (c < 0) return true;
      std::int32_t pr = pivot_[std::size_t(c)];
      if (pr < 0) return false;
      const std::uint64_t* base = store_.data() + std::size_t(pr) * words_;
      for (std::size_t w = 0; w < words_; ++w) scratch_[w] ^= base[w];
      if (val) *val ^= rhs_[std::size_t(pr)];
    }
  }

  std::size_t cols_;
  std::size_t words_;
  std::vector<std::int32_t> pivot_;
  std::vector<std::uint64_t> store_;
  std::vector<std::uint8_t> rhs_;
  mutable std::vector<std::uint64_t> scratch_;
  std::size_t rank_ = 0;
  bool inconsistent_ = false;
};

}  // namespace eic
