#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "eic/channel.hpp"
#include "eic/errors.hpp"
#include "eic/gf2.hpp"
#include "eic/params.hpp"
#include "eic/region.hpp"
#include "eic/rng.hpp"
#include "eic/scheme_common.hpp"

namespace eic {

struct SumratePhaseTimes {
  double t_p1 = 0, t_p2 = 0, t_p3 = 0, t_total = 0;
};

struct SumrateConfig {
  double delta = 0.0;
  double eps = 1.0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  CacheMode cache_mode = CacheMode::deterministic;
  bool allow_out_of_condition = false;
};

struct SumrateCounters {
  std::array<std::size_t, 2> cached{};    // cached[i]: other-message bits rx i+1 holds
  std::array<std::size_t, 2> uncached{};  // phase-1 queue length per transmitter
  std::size_t pairs = 0;
  std::array<std::size_t, 2> pool{};  // pool[i]: message-(i+1) bits known opposite
  std::array<std::size_t, 2> delivered_direct{};
  std::size_t quads = 0;
  std::size_t leftover_pairs = 0;
  std::array<std::size_t, 2> drained{};
};

struct SumrateResult {
  std::size_t t_p1 = 0, t_p2 = 0, t_p3 = 0, t_total = 0;
  std::array<bool, 2> decoded{false, false};
  ErrorType error_type = ErrorType::none;
  double sum_rate = 0.0;
  SumrateCounters counters;
};

namespace sumrate_detail {

struct Expectation {
  double uncached = 0;  // per transmitter
  double pairs = 0;
  double pool = 0;  // per message
  double t_p1 = 0, t_p2 = 0, t_p3 = 0;
};

// First moments of the phase lengths. The drain term covers the pool surplus:
// it vanishes under the sum capacity condition and is charged sequentially
// out of condition, once per side.
inline Expectation expectations(double delta, double eps, double m,
                                bool sequential_drain) {
  Expectation e;
  double live = 1.0 - delta * delta;
  e.uncached = eps * m;
  e.t_p1 = e.uncached / live;
  e.pairs = (1.0 - delta) * eps * m / (1.0 + delta);
  e.pool = (1.0 - eps) * m + delta * eps * m / (1.0 + delta);
  double quads = std::min(e.pairs, e.pool);
  e.t_p2 = 2.0 * quads / live;
  e.t_p3 = (e.pairs - quads) / live;
  double surplus = e.pool - quads;
  if (surplus > 0.0)
    e.t_p3 += (sequential_drain ? 2.0 : 1.0) * surplus / (1.0 - delta);
  return e;
}

}  // namespace sumrate_detail

inline SumratePhaseTimes sumrate_analytic_times(double delta, double eps,
                                                double m) {
  detail::check_prob(delta, "delta");
  detail::check_prob(eps, "eps");
  if (!(m > 0.0)) throw param_error("m must be positive");
  if (delta > 0.5 || !sum_capacity_condition(delta, eps))
    throw scope_error(
        "phase times require delta <= 1/2 and the sum capacity condition");
  auto e = sumrate_detail::expectations(delta, eps, m, false);
  SumratePhaseTimes t;
  t.t_p1 = e.t_p1;
  t.t_p2 = e.t_p2;
  t.t_p3 = std::max(0.0, e.t_p3);
  t.t_total = t.t_p1 + t.t_p2 + t.t_p3;
  return t;
}

namespace sumrate_detail {

constexpr std::size_t kBlockCap = 256;  // pairs or quads per coded block
constexpr std::uint32_t kNoCol = 0xffffffffu;

inline void truncate_mask(std::uint64_t* w, std::size_t nwords,
                          std::size_t bits) {
  for (std::size_t i = 0; i < nwords; ++i) {
    if ((i + 1) * 64 <= bits) continue;
    if (i * 64 >= bits)
      w[i] = 0;
    else
      w[i] &= (1ull << (bits - i * 64)) - 1;
  }
}

inline int masked_parity(const std::uint64_t* mask, const std::uint64_t* vals,
                         std::size_t nwords) {
  int p = 0;
  for (std::size_t i = 0; i < nwords; ++i)
    p ^= std::popcount(mask[i] & vals[i]) & 1;
  return p;
}

struct SlotMeta {
  // phase 1: queued bits (a, b are bit indices, -1 when that side is silent)
  // phase 2: quad mixtures over block `block`
  // phase 3: leftover-pair mixtures over block `block`
  // phase 4: systematic leftover-pair representative (a is its bit index)
  // phase 5: pool drain (a, b are bit indices, -1 when that side is silent)
  std::uint8_t phase = 0;
  std::int32_t block = -1;
  std::int32_t a = -1;
  std::int32_t b = -1;
};

class Runner {
 public:
  explicit Runner(const SumrateConfig& cfg)
      : cfg_(cfg),
        cp_(ChannelParams::four_topology(cfg.delta, cfg.eps, cfg.eps)),
        ts_(cp_, cfg.seed),
        combo_p2_{KeyedBits(cfg.seed, stream_combo + 0),
                  KeyedBits(cfg.seed, stream_combo + 1)},
        combo_p3_{KeyedBits(cfg.seed, stream_combo + 2),
                  KeyedBits(cfg.seed, stream_combo + 3)} {}

  SumrateResult run() {
    in_condition_ =
        cfg_.delta <= 0.5 && sum_capacity_condition(cfg_.delta, cfg_.eps);
    if (!in_condition_ && !cfg_.allow_out_of_condition)
      throw scope_error(
          "parameters violate the sum capacity condition; pass the "
          "out-of-condition override to run anyway");
    if (cfg_.delta >= 1.0)
      throw scope_error("no link is ever on at delta = 1");
    ms_ = make_messages(cfg_.m, cfg_.eps, cfg_.eps, cfg_.seed, cfg_.cache_mode);
    setup();
    expect_ = expectations(cfg_.delta, cfg_.eps, double(cfg_.m),
                           !in_condition_);
    // Out of condition the drain phase serves Theta(m) bits at rate 1-delta,
    // so its time fluctuation carries a 1/(1-delta) amplification that the
    // flat slack does not cover; widen every budget accordingly.
    slack_ = budget_slack(cfg_.m) *
             (in_condition_ ? 1.0 : 3.0 / (1.0 - cfg_.delta));

    if (phase1() && check_counts() && phase2() && phase3()) {
      decode(1);
      decode(2);
      if (res_.decoded[0] && res_.decoded[1])
        res_.sum_rate = 2.0 * double(cfg_.m) / double(t_);
    }
    res_.t_total = t_;
    fill_counters();
    return res_;
  }

 private:
  struct Pair {
    std::uint32_t a = 0, b = 0;
  };

  void setup() {
    for (int i = 0; i < 2; ++i) {
      // queue of tx i+1: own bits absent from the opposite cache, index order
      const auto& opposite = ms_.cache_mask[std::size_t(1 - i)];
      for (std::uint32_t l = 0; l < cfg_.m; ++l) {
        if (opposite[l])
          pool_[std::size_t(i)].push_back(l);
        else
          queue_[std::size_t(i)].push_back(l);
      }
      records_[std::size_t(i)].resize(cfg_.m);
      for (std::uint32_t l = 0; l < cfg_.m; ++l)
        if (opposite[l])
          records_[std::size_t(i)][l].status = BitStatus::sideinfo;
    }
  }

  TopologyState step(int x1, int x2, SlotMeta meta) {
    TopologyState st = ts_.at(t_);
    SlotSignals y = receive(st, x1, x2);
    y_[0].push_back(std::uint8_t(y.y1));
    y_[1].push_back(std::uint8_t(y.y2));
    meta_.push_back(meta);
    ++t_;
    return st;
  }

  bool fail(ErrorType e) {
    res_.error_type = e;
    return false;
  }

  // Uncoded delivery round: both queues advance in lockstep until one runs
  // dry, then the longer one continues alone. Which slots collide is only
  // known a posteriori, so classification happens after each slot.
  bool phase1() {
    std::size_t budget = std::size_t(std::ceil(expect_.t_p1 + slack_));
    std::size_t i1 = 0, i2 = 0;
    std::size_t used = 0;
    while (i1 < queue_[0].size() || i2 < queue_[1].size()) {
      if (used >= budget) return fail(ErrorType::type_I);
      bool act1 = i1 < queue_[0].size(), act2 = i2 < queue_[1].size();
      std::uint32_t b1 = act1 ? queue_[0][i1] : 0;
      std::uint32_t b2 = act2 ? queue_[1][i2] : 0;
      TopologyState st = step(act1 ? ms_.bits[0][b1] : 0,
                              act2 ? ms_.bits[1][b2] : 0,
                              {1, -1, act1 ? std::int32_t(b1) : -1,
                               act2 ? std::int32_t(b2) : -1});
      ++used;
      if (act1 && act2) {
        switch (classify(st)) {
          case TopoClass::A:
            records_[0][b1].set(BitStatus::classified_A);
            records_[1][b2].set(BitStatus::classified_A);
            pairs_.push_back({b1, b2});
            ++i1;
            ++i2;
            break;
          case TopoClass::B:
            records_[0][b1].set(BitStatus::classified_B);
            records_[1][b2].set(BitStatus::classified_B);
            pool_[0].push_back(b1);
            pool_[1].push_back(b2);
            ++n_b_slots_;
            ++i1;
            ++i2;
            break;
          case TopoClass::C:
            records_[0][b1].set(BitStatus::delivered);
            records_[1][b2].set(BitStatus::delivered);
            ++delivered_[0];
            ++delivered_[1];
            ++i1;
            ++i2;
            break;
          case TopoClass::D:
            break;
          default:
            throw contract_error("scheme requires the four-topology model");
        }
      } else if (act1) {
        if (st.on(1, 1)) {
          records_[0][b1].set(BitStatus::delivered);
          ++delivered_[0];
          ++i1;
        } else if (st.on(2, 1)) {
          records_[0][b1].set(BitStatus::classified_B);
          pool_[0].push_back(b1);
          ++i1;
        }
      } else {
        if (st.on(2, 2)) {
          records_[1][b2].set(BitStatus::delivered);
          ++delivered_[1];
          ++i2;
        } else if (st.on(1, 2)) {
          records_[1][b2].set(BitStatus::classified_B);
          pool_[1].push_back(b2);
          ++i2;
        }
      }
    }
    res_.t_p1 = used;
    return true;
  }

  bool check_counts() {
    if (double(pairs_.size()) < expect_.pairs - slack_)
      return fail(ErrorType::type_II);
    if (double(n_b_slots_) < cfg_.delta * cfg_.eps * double(cfg_.m) /
                                     (1.0 + cfg_.delta) -
                                 slack_)
      return fail(ErrorType::type_II);
    quads_ = std::min({pairs_.size(), pool_[0].size(), pool_[1].size()});
    return true;
  }

  // Coded delivery of quads: each pair is lifted by one pool bit per side and
  // the two mixtures are streamed as keyed random combinations, one block at
  // a time, until both receivers have full rank over the block. Rank is
  // tracked from the delayed channel states both transmitters share.
  bool phase2() {
    std::size_t budget = std::size_t(std::ceil(expect_.t_p2 + slack_));
    std::size_t used = 0;
    std::size_t nblocks = (quads_ + kBlockCap - 1) / kBlockCap;
    for (std::size_t blk = 0; blk < nblocks; ++blk) {
      std::size_t k0 = blk * kBlockCap;
      std::size_t bs = std::min(kBlockCap, quads_ - k0);
      std::array<std::uint64_t, 4> v1{}, v2{};
      for (std::size_t k = 0; k < bs; ++k) {
        const Pair& p = pairs_[k0 + k];
        if (ms_.bits[0][p.a] ^ ms_.bits[0][pool_[0][k0 + k]])
          v1[k / 64] |= 1ull << (k % 64);
        if (ms_.bits[1][p.b] ^ ms_.bits[1][pool_[1][k0 + k]])
          v2[k / 64] |= 1ull << (k % 64);
      }
      DenseWindow mini1(512), mini2(512);
      while (mini1.rank() < 2 * bs || mini2.rank() < 2 * bs) {
        if (used >= budget) return fail(ErrorType::type_I);
        std::array<std::uint64_t, 4> m1, m2;
        slot_mask(combo_p2_[0], t_, bs, m1.data());
        slot_mask(combo_p2_[1], t_, bs, m2.data());
        TopologyState st = step(masked_parity(m1.data(), v1.data(), 4),
                                masked_parity(m2.data(), v2.data(), 4),
                                {2, std::int32_t(blk), -1, -1});
        ++used;
        track_joint(mini1, st, 1, m1.data(), m2.data());
        track_joint(mini2, st, 2, m1.data(), m2.data());
      }
    }
    res_.t_p2 = used;
    return true;
  }

  // Leftover pairs ride on random combinations of their first halves (the
  // second halves differ by the known collision mixtures), then any pool
  // surplus is drained uncoded.
  bool phase3() {
    std::size_t budget = std::size_t(std::ceil(expect_.t_p3 + slack_));
    std::size_t used = 0;
    std::size_t left = pairs_.size() - quads_;
    if (left > 0 && cfg_.delta == 0.0) {
      // every link is always on: one systematic slot per pair is exact
      for (std::size_t l = 0; l < left; ++l) {
        if (used >= budget) return fail(ErrorType::type_I);
        std::uint32_t a = pairs_[quads_ + l].a;
        step(ms_.bits[0][a], 0, {4, -1, std::int32_t(a), -1});
        ++used;
      }
    } else if (left > 0) {
      std::size_t nblocks = (left + kBlockCap - 1) / kBlockCap;
      for (std::size_t blk = 0; blk < nblocks; ++blk) {
        std::size_t l0 = blk * kBlockCap;
        std::size_t bs = std::min(kBlockCap, left - l0);
        std::array<std::uint64_t, 4> av{}, bv{};
        for (std::size_t l = 0; l < bs; ++l) {
          const Pair& p = pairs_[quads_ + l0 + l];
          if (ms_.bits[0][p.a]) av[l / 64] |= 1ull << (l % 64);
          if (ms_.bits[1][p.b]) bv[l / 64] |= 1ull << (l % 64);
        }
        DenseWindow mini1(kBlockCap), mini2(kBlockCap);
        while (mini1.rank() < bs || mini2.rank() < bs) {
          if (used >= budget) return fail(ErrorType::type_I);
          std::array<std::uint64_t, 4> m1, m2;
          slot_mask(combo_p3_[0], t_, bs, m1.data());
          slot_mask(combo_p3_[1], t_, bs, m2.data());
          TopologyState st = step(masked_parity(m1.data(), av.data(), 4),
                                  masked_parity(m2.data(), bv.data(), 4),
                                  {3, std::int32_t(blk), -1, -1});
          ++used;
          track_pair(mini1, st, 1, m1.data(), m2.data());
          track_pair(mini2, st, 2, m1.data(), m2.data());
        }
      }
    }

    // pool surplus: the receiver that already knows the opposite stream
    // cancels it, so each side only waits for its own direct link
    std::size_t n1 = pool_[0].size() - quads_;
    std::size_t n2 = pool_[1].size() - quads_;
    drained_[0] = n1;
    drained_[1] = n2;
    if (in_condition_) {
      std::size_t j1 = 0, j2 = 0;
      while (j1 < n1 || j2 < n2) {
        if (used >= budget) return fail(ErrorType::type_I);
        bool act1 = j1 < n1, act2 = j2 < n2;
        std::uint32_t c = act1 ? pool_[0][quads_ + j1] : 0;
        std::uint32_t d = act2 ? pool_[1][quads_ + j2] : 0;
        TopologyState st = step(act1 ? ms_.bits[0][c] : 0,
                                act2 ? ms_.bits[1][d] : 0,
                                {5, -1, act1 ? std::int32_t(c) : -1,
                                 act2 ? std::int32_t(d) : -1});
        ++used;
        if (act1 && st.on(1, 1)) ++j1;
        if (act2 && st.on(2, 2)) ++j2;
      }
    } else {
      for (std::size_t j = 0; j < n1;) {
        if (used >= budget) return fail(ErrorType::type_I);
        std::uint32_t c = pool_[0][quads_ + j];
        TopologyState st =
            step(ms_.bits[0][c], 0, {5, -1, std::int32_t(c), -1});
        ++used;
        if (st.on(1, 1)) ++j;
      }
      for (std::size_t j = 0; j < n2;) {
        if (used >= budget) return fail(ErrorType::type_I);
        std::uint32_t d = pool_[1][quads_ + j];
        TopologyState st =
            step(0, ms_.bits[1][d], {5, -1, -1, std::int32_t(d)});
        ++used;
        if (st.on(2, 2)) ++j;
      }
    }
    res_.t_p3 = used;
    return true;
  }

  void slot_mask(const KeyedBits& kb, std::size_t t, std::size_t bits,
                 std::uint64_t* out) const {
    for (std::size_t w = 0; w < 4; ++w) out[w] = kb.word(t * 4 + w);
    truncate_mask(out, 4, bits);
  }

  void track_joint(DenseWindow& mini, TopologyState st, int rx,
                   const std::uint64_t* m1, const std::uint64_t* m2) {
    bool g1 = st.on(rx, 1), g2 = st.on(rx, 2);
    if (!g1 && !g2) return;
    std::array<std::uint64_t, 8> row{};
    if (g1)
      for (int w = 0; w < 4; ++w) row[std::size_t(w)] = m1[w];
    if (g2)
      for (int w = 0; w < 4; ++w) row[std::size_t(4 + w)] = m2[w];
    mini.add_row(row.data(), 0);
  }

  void track_pair(DenseWindow& mini, TopologyState st, int rx,
                  const std::uint64_t* m1, const std::uint64_t* m2) {
    bool g1 = st.on(rx, 1), g2 = st.on(rx, 2);
    if (!g1 && !g2) return;
    std::array<std::uint64_t, 4> row{};
    if (g1)
      for (int w = 0; w < 4; ++w) row[std::size_t(w)] ^= m1[w];
    if (g2)
      for (int w = 0; w < 4; ++w) row[std::size_t(w)] ^= m2[w];
    mini.add_row(row.data(), 0);
  }

  // Decode-side column layout. Quad blocks pack [a | c | b | d] lanes of
  // kBlockCap columns each; leftover-pair blocks pack [a | b]; every other
  // bit gets a column of its own. Each slot equation then stays inside one
  // window and elimination never spills across blocks.
  struct Layout {
    std::size_t qend = 0, lend = 0, ncols = 0;
    std::size_t nbq = 0, nbl = 0;
    std::array<std::vector<std::uint32_t>, 2> col;
  };

  Layout layout() const {
    Layout lo;
    std::size_t left = pairs_.size() - quads_;
    lo.nbq = (quads_ + kBlockCap - 1) / kBlockCap;
    lo.nbl = (left + kBlockCap - 1) / kBlockCap;
    lo.qend = lo.nbq * 4 * kBlockCap;
    lo.lend = lo.qend + lo.nbl * 2 * kBlockCap;
    lo.col[0].assign(cfg_.m, kNoCol);
    lo.col[1].assign(cfg_.m, kNoCol);
    auto place = [&](int tx, std::uint32_t bit, std::size_t c) {
      auto& slot = lo.col[std::size_t(tx)][bit];
      if (slot != kNoCol) throw contract_error("bit assigned two columns");
      slot = std::uint32_t(c);
    };
    for (std::size_t k = 0; k < quads_; ++k) {
      std::size_t base = (k / kBlockCap) * 4 * kBlockCap;
      std::size_t lk = k % kBlockCap;
      place(0, pairs_[k].a, base + lk);
      place(0, pool_[0][k], base + kBlockCap + lk);
      place(1, pairs_[k].b, base + 2 * kBlockCap + lk);
      place(1, pool_[1][k], base + 3 * kBlockCap + lk);
    }
    for (std::size_t l = 0; l < left; ++l) {
      std::size_t base = lo.qend + (l / kBlockCap) * 2 * kBlockCap;
      std::size_t lk = l % kBlockCap;
      place(0, pairs_[quads_ + l].a, base + lk);
      place(1, pairs_[quads_ + l].b, base + kBlockCap + lk);
    }
    std::size_t next = lo.lend;
    for (int tx = 0; tx < 2; ++tx)
      for (std::uint32_t l = 0; l < cfg_.m; ++l)
        if (lo.col[std::size_t(tx)][l] == kNoCol)
          lo.col[std::size_t(tx)][l] = std::uint32_t(next++);
    lo.ncols = next;
    return lo;
  }

  // The receiver's post-hoc solve: it knows the whole trace, its own signal
  // and its cache, and runs elimination over every slot equation.
  void decode(int rx) {
    Layout lo = layout();
    std::vector<DenseWindow> wins;
    wins.reserve(lo.nbq + lo.nbl);
    for (std::size_t i = 0; i < lo.nbq; ++i) wins.emplace_back(4 * kBlockCap);
    for (std::size_t i = 0; i < lo.nbl; ++i) wins.emplace_back(2 * kBlockCap);
    std::size_t nsingles = lo.ncols - lo.lend;
    EquationSystem singles(nsingles);

    auto add_cols = [&](const std::uint32_t* cols, std::size_t n, int rhs) {
      if (n == 0) {
        if (rhs) throw contract_error("nonzero signal from silent links");
        return;
      }
      if (cols[0] >= lo.lend) {
        std::array<std::uint32_t, 2> local{};
        for (std::size_t i = 0; i < n; ++i) {
          if (cols[i] < lo.lend)
            throw contract_error("equation straddles regions");
          local[i] = std::uint32_t(cols[i] - lo.lend);
        }
        singles.add_equation(std::span<const std::uint32_t>(local.data(), n),
                             rhs);
        return;
      }
      std::size_t w = cols[0] < lo.qend
                          ? cols[0] / (4 * kBlockCap)
                          : lo.nbq + (cols[0] - lo.qend) / (2 * kBlockCap);
      std::size_t base = w < lo.nbq ? w * 4 * kBlockCap
                                    : lo.qend + (w - lo.nbq) * 2 * kBlockCap;
      std::size_t width = wins[w].cols();
      if (n == 1) {
        wins[w].add_bits({cols[0] - base}, rhs);
      } else {
        if (cols[1] < base || cols[1] - base >= width)
          throw contract_error("equation straddles windows");
        wins[w].add_bits({cols[0] - base, cols[1] - base}, rhs);
      }
    };

    const int other = rx == 1 ? 1 : 0;
    for (std::uint32_t l = 0; l < cfg_.m; ++l)
      if (ms_.cache_mask[std::size_t(rx - 1)][l]) {
        std::uint32_t c = lo.col[std::size_t(other)][l];
        add_cols(&c, 1, ms_.bits[std::size_t(other)][l]);
      }

    std::array<std::uint64_t, 16> row;
    for (std::size_t t = 0; t < t_; ++t) {
      TopologyState st = ts_.at(t);
      bool g1 = st.on(rx, 1), g2 = st.on(rx, 2);
      if (!g1 && !g2) continue;
      int y = y_[std::size_t(rx - 1)][t];
      const SlotMeta& mt = meta_[t];
      switch (mt.phase) {
        case 1:
        case 5: {
          std::array<std::uint32_t, 2> cols{};
          std::size_t n = 0;
          if (g1 && mt.a >= 0) cols[n++] = lo.col[0][std::size_t(mt.a)];
          if (g2 && mt.b >= 0) cols[n++] = lo.col[1][std::size_t(mt.b)];
          add_cols(cols.data(), n, y);
          break;
        }
        case 2: {
          std::size_t blk = std::size_t(mt.block);
          std::size_t bs = std::min(kBlockCap, quads_ - blk * kBlockCap);
          std::array<std::uint64_t, 4> m1, m2;
          slot_mask(combo_p2_[0], t, bs, m1.data());
          slot_mask(combo_p2_[1], t, bs, m2.data());
          row.fill(0);
          if (g1)
            for (int w = 0; w < 4; ++w)
              row[std::size_t(w)] = row[std::size_t(4 + w)] = m1[w];
          if (g2)
            for (int w = 0; w < 4; ++w)
              row[std::size_t(8 + w)] = row[std::size_t(12 + w)] = m2[w];
          wins[blk].add_row(row.data(), y);
          break;
        }
        case 3: {
          std::size_t blk = std::size_t(mt.block);
          std::size_t left = pairs_.size() - quads_;
          std::size_t bs = std::min(kBlockCap, left - blk * kBlockCap);
          std::array<std::uint64_t, 4> m1, m2;
          slot_mask(combo_p3_[0], t, bs, m1.data());
          slot_mask(combo_p3_[1], t, bs, m2.data());
          row.fill(0);
          if (g1)
            for (int w = 0; w < 4; ++w) row[std::size_t(w)] = m1[w];
          if (g2)
            for (int w = 0; w < 4; ++w) row[std::size_t(4 + w)] = m2[w];
          wins[lo.nbq + blk].add_row(row.data(), y);
          break;
        }
        case 4: {
          if (!g1) break;  // the lone transmitter was not heard here
          std::uint32_t c = lo.col[0][std::size_t(mt.a)];
          add_cols(&c, 1, y);
          break;
        }
        default:
          throw contract_error("unknown slot phase");
      }
    }

    auto value_of = [&](std::uint32_t c, bool* ok) -> int {
      if (c >= lo.lend) {
        std::array<std::uint32_t, 1> one{std::uint32_t(c - lo.lend)};
        if (!singles.solvable_for(one)) {
          *ok = false;
          return 0;
        }
        return singles.solve(one)[0];
      }
      std::size_t w = c < lo.qend ? c / (4 * kBlockCap)
                                  : lo.nbq + (c - lo.qend) / (2 * kBlockCap);
      std::size_t base = w < lo.nbq ? w * 4 * kBlockCap
                                    : lo.qend + (w - lo.nbq) * 2 * kBlockCap;
      if (!wins[w].solvable(c - base)) {
        *ok = false;
        return 0;
      }
      return wins[w].value(c - base);
    };

    const std::size_t own = std::size_t(rx - 1);
    bool ok = true;
    for (std::uint32_t l = 0; l < cfg_.m && ok; ++l) {
      int v = value_of(lo.col[own][l], &ok);
      if (ok && v != ms_.bits[own][l]) ok = false;
    }
    res_.decoded[own] = ok;
  }

  void fill_counters() {
    auto& c = res_.counters;
    c.cached[0] = ms_.cached_count(1);
    c.cached[1] = ms_.cached_count(2);
    c.uncached[0] = queue_[0].size();
    c.uncached[1] = queue_[1].size();
    c.pairs = pairs_.size();
    c.pool[0] = pool_[0].size();
    c.pool[1] = pool_[1].size();
    c.delivered_direct = delivered_;
    c.quads = quads_;
    c.leftover_pairs = pairs_.size() - quads_;
    c.drained = drained_;
  }

  SumrateConfig cfg_;
  ChannelParams cp_;
  TraceStream ts_;
  std::array<KeyedBits, 2> combo_p2_;
  std::array<KeyedBits, 2> combo_p3_;
  MessageSet ms_;
  Expectation expect_;
  double slack_ = 0;
  bool in_condition_ = false;

  std::array<std::vector<std::uint32_t>, 2> queue_;
  std::array<std::vector<std::uint32_t>, 2> pool_;
  std::array<std::vector<BitRecord>, 2> records_;
  std::vector<Pair> pairs_;
  std::size_t n_b_slots_ = 0;
  std::array<std::size_t, 2> delivered_{};
  std::array<std::size_t, 2> drained_{};
  std::size_t quads_ = 0;

  std::size_t t_ = 0;
  std::array<std::vector<std::uint8_t>, 2> y_;
  std::vector<SlotMeta> meta_;
  SumrateResult res_;
};

}  // namespace sumrate_detail

inline SumrateResult run_sumrate(const SumrateConfig& cfg) {
  detail::check_prob(cfg.delta, "delta");
  detail::check_prob(cfg.eps, "eps");
  if (cfg.m < 1) throw param_error("message length must be at least 1");
  sumrate_detail::Runner r(cfg);
  return r.run();
}

}  // namespace eic
