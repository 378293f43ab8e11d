#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "eic/channel.hpp"
#include "eic/errors.hpp"
#include "eic/params.hpp"
#include "eic/region.hpp"
#include "eic/rng.hpp"
#include "eic/scheme_common.hpp"

namespace eic {

// Corner-point scheme: user 2 is pinned at its individual bound while user 1
// rides the leftover cross capacity. Tx 2 sends every bit uncoded until its
// direct link fires once; tx 1 first drains its uncached bits in lockstep,
// then streams coded mixtures of the collided bits and of the pool receiver 2
// already knows, so receiver 2 can strip them while receiver 1 collects them.

struct CornerConfig {
  double delta = 0.0;
  double eps = 1.0;
  std::size_t m = 0;  // second-message length; the first follows from it
  std::uint64_t seed = 0;
  CacheMode cache_mode = CacheMode::deterministic;
};

struct CornerTimes {
  double t_p1 = 0.0, t_p23 = 0.0, t_total = 0.0;
};

// First-message length that parks user 2 at 1 - delta: delta(1+delta) m/eps.
inline std::size_t corner_m1(double delta, double eps, std::size_t m) {
  detail::check_prob(delta, "delta");
  detail::check_prob(eps, "eps");
  if (m < 1) throw param_error("m must be at least 1");
  if (delta == 0.0) return 0;
  if (eps <= 0.0)
    throw scope_error("first-message load needs a nonzero uncached fraction");
  return std::size_t(round_half_up(delta * (1.0 + delta) * double(m) / eps));
}

// First-message bits receiver 2 holds per second-message bit once phase 1
// ends: the cached share of message 1 plus the bits overheard on cross-only
// slots. Works out to delta (1 + delta - eps) / eps.
inline double corner_side_info_per_m(double delta, double eps) {
  detail::check_prob(delta, "delta");
  detail::check_prob(eps, "eps");
  if (delta == 0.0) return 0.0;
  if (eps <= 0.0)
    throw scope_error("side information needs a nonzero uncached fraction");
  return delta * (1.0 + delta - eps) / eps;
}

inline CornerTimes corner_analytic_times(double delta, double eps, double m) {
  detail::check_prob(delta, "delta");
  detail::check_prob(eps, "eps");
  if (!(m > 0.0)) throw param_error("m must be positive");
  if (!region_condition(delta, eps))
    throw scope_error("corner times need the full-region cache condition");
  CornerTimes t;
  t.t_p1 = delta * m / (1.0 - delta);
  t.t_p23 = m;
  t.t_total = t.t_p1 + t.t_p23;
  return t;
}

struct CornerCounters {
  std::size_t m1 = 0;
  std::array<std::size_t, 2> cached{};    // cached[i]: other-message bits rx i+1 holds
  std::array<std::size_t, 2> uncached{};  // phase-1 queue length per transmitter
  std::array<std::size_t, 2> delivered_p1{};  // clean direct-only deliveries
  std::size_t pairs = 0;      // fully connected phase-1 slots
  std::size_t overheard = 0;  // message-1 bits receiver 2 heard on cross-only slots
  std::size_t b_requeued = 0;  // message-2 bits bounced back into the stream
  std::size_t pool_si = 0;     // cached[1] + overheard
  std::size_t direct_delivered = 0;  // message-2 bits delivered during the stream
  std::size_t windows = 0;
  std::size_t parked = 0;      // windows that needed a certification top-up
  std::size_t tail_slots = 0;  // stream slots after tx 2 went quiet
  std::array<std::size_t, 2> non_erased{};  // slots with any incoming link on
};

struct CornerResult {
  std::size_t t_p1 = 0, t_p23 = 0, t_total = 0;
  std::array<bool, 2> decoded{false, false};
  ErrorType error_type = ErrorType::none;
  double r1 = 0.0, r2 = 0.0;
  CornerCounters counters;
};

namespace corner_detail {

constexpr std::size_t kAWords = 4;  // pair lane: window columns [0, 256)
constexpr std::size_t kSiWords = 17;  // side-info lane: columns [256, 1344)
constexpr std::size_t kFrameWords = kAWords + kSiWords;
constexpr std::size_t kALaneCols = kAWords * 64;
constexpr std::size_t kSiCap = kSiWords * 64;
constexpr std::size_t kFrameCols = kFrameWords * 64;
constexpr std::size_t kSiHaircut = 128;  // keeps rx 1 off the rotation gate
constexpr std::uint32_t kNoSingle = 0xffffffffu;

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
  // phase 1: a, b are the queued bit indices (-1 when that side is silent)
  // phase 2: win is the window tx 1 mixed over (-1 when silent), b as above
  std::uint8_t phase = 0;
  std::int32_t win = -1;
  std::int32_t a = -1;
  std::int32_t b = -1;
};

// One coded block: a chunk of the pair stream plus a chunk of the
// side-information stream, mixed by a keyed combination each slot. The
// window keeps its receiver-1 eliminator alive while parked so a later
// top-up resumes where certification stopped.
struct Window {
  std::uint32_t a_off = 0, a_len = 0;
  std::uint32_t si_off = 0, si_len = 0;
  KeyedBits combo;
  std::array<std::uint64_t, kFrameWords> vals{};
  std::unique_ptr<DenseWindow> m1;
  bool rx1_done = false;

  explicit Window(KeyedBits kb) : combo(kb) {}
};

// Decode-side eliminator over one window's frame. Rows are pure lane
// combinations; single-column couplings are cancelled or deferred before
// feeding, so no fill-in ever leaves the frame.
class WinBasis {
 public:
  WinBasis() : pivot_(kFrameCols, -1) {}

  void feed(std::array<std::uint64_t, kFrameWords> lane, int rhs) {
    for (;;) {
      int c = lowest(lane.data());
      if (c < 0) return;  // dependent row; verdicts compare against truth
      std::int32_t pr = pivot_[std::size_t(c)];
      if (pr < 0) {
        pivot_[std::size_t(c)] = std::int32_t(rows_.size());
        rows_.push_back({lane, std::uint8_t(rhs & 1)});
        return;
      }
      const Row& r = rows_[std::size_t(pr)];
      for (std::size_t w = 0; w < kFrameWords; ++w) lane[w] ^= r.lane[w];
      rhs ^= r.rhs;
    }
  }

  // Value of an arbitrary lane combination, when the basis pins it.
  bool reduce_value(std::array<std::uint64_t, kFrameWords> lane,
                    int& out) const {
    int acc = 0;
    for (;;) {
      int c = lowest(lane.data());
      if (c < 0) {
        out = acc;
        return true;
      }
      std::int32_t pr = pivot_[std::size_t(c)];
      if (pr < 0) return false;
      const Row& r = rows_[std::size_t(pr)];
      for (std::size_t w = 0; w < kFrameWords; ++w) lane[w] ^= r.lane[w];
      acc ^= r.rhs;
    }
  }

  bool unit_value(std::size_t col, int& out) const {
    std::array<std::uint64_t, kFrameWords> lane{};
    lane[col / 64] = 1ull << (col % 64);
    return reduce_value(lane, out);
  }

 private:
  struct Row {
    std::array<std::uint64_t, kFrameWords> lane{};
    std::uint8_t rhs = 0;
  };

  static int lowest(const std::uint64_t* row) {
    for (std::size_t w = 0; w < kFrameWords; ++w)
      if (row[w]) return int(w * 64 + std::size_t(std::countr_zero(row[w])));
    return -1;
  }

  std::vector<Row> rows_;
  std::vector<std::int32_t> pivot_;
};

class Runner {
 public:
  explicit Runner(const CornerConfig& cfg)
      : cfg_(cfg),
        cp_(ChannelParams::four_topology(cfg.delta, cfg.eps, cfg.eps)),
        ts_(cp_, cfg.seed) {}

  CornerResult run() {
    if (!region_condition(cfg_.delta, cfg_.eps))
      throw scope_error("corner scheme needs the full-region cache condition");
    m1_ = corner_m1(cfg_.delta, cfg_.eps, cfg_.m);
    ms_ = make_messages(m1_, cfg_.m, cfg_.eps, cfg_.eps, cfg_.seed,
                        cfg_.cache_mode);
    slack_ = budget_slack(cfg_.m);
    setup();

    if (phase1() && check_counts() && stream()) {
      build_colmap();
      decode(1);
      decode(2);
      if (res_.decoded[0] && res_.decoded[1]) {
        res_.r1 = double(m1_) / double(t_);
        res_.r2 = double(cfg_.m) / double(t_);
      } else if (res_.error_type == ErrorType::none) {
        res_.error_type = ErrorType::type_I;  // rank fell short of the budget
      }
    }
    res_.t_total = t_;
    res_.t_p23 = t_ - res_.t_p1;
    fill_counters();
    return res_;
  }

 private:
  struct Pair {
    std::uint32_t a = 0, b = 0;
  };

  void setup() {
    for (std::uint32_t l = 0; l < m1_; ++l) {
      if (ms_.cache_mask[1][l])
        cached_si_.push_back(l);
      else
        q1_.push_back(l);
    }
    known_rx1_.assign(cfg_.m, 0);
    for (std::uint32_t l = 0; l < cfg_.m; ++l) {
      if (ms_.cache_mask[0][l]) {
        cached2_.push_back(l);
        known_rx1_[l] = 1;
      } else {
        fresh2_.push_back(l);
      }
    }
    // Window width the side-information lane can keep up with: the stream
    // phase grants receiver 1 clean rows 1/delta times as often as receiver
    // 2, so a chunk of a pairs drags (1-delta)/delta a of pool behind it.
    double cap = double(kSiCap) * cfg_.delta / (1.0 - cfg_.delta);
    a_cap_ = std::clamp<std::size_t>(std::size_t(cap), 16, kALaneCols);
  }

  TopologyState step(int x1, int x2, SlotMeta meta) {
    TopologyState st = ts_.at(t_);
    SlotSignals y = receive(st, x1, x2);
    y_[0].push_back(std::uint8_t(y.y1));
    y_[1].push_back(std::uint8_t(y.y2));
    meta_.push_back(meta);
    non_erased_[0] += st.on(1, 1) || st.on(1, 2) ? 1 : 0;
    non_erased_[1] += st.on(2, 1) || st.on(2, 2) ? 1 : 0;
    ++t_;
    return st;
  }

  bool fail(ErrorType e) {
    res_.error_type = e;
    return false;
  }

  // Lockstep delivery of tx 1's queue; tx 2 consumes its fresh bits at the
  // same pace. Collisions become pairs, cross-only slots hand tx 1's bit to
  // receiver 2 (side information) and bounce tx 2's bit into the stream.
  bool phase1() {
    if (m1_ == 0) {
      res_.t_p1 = 0;
      return true;
    }
    std::size_t budget = std::size_t(
        std::ceil(cfg_.delta * double(cfg_.m) / (1.0 - cfg_.delta) + slack_));
    std::size_t i1 = 0;
    while (i1 < q1_.size()) {
      if (t_ >= budget) return fail(ErrorType::type_I);
      bool act2 = i2_ < fresh2_.size();
      std::uint32_t a = q1_[i1];
      std::uint32_t b = act2 ? fresh2_[i2_] : 0;
      TopologyState st =
          step(ms_.bits[0][a], act2 ? ms_.bits[1][b] : 0,
               {1, -1, std::int32_t(a), act2 ? std::int32_t(b) : -1});
      if (act2) {
        switch (classify(st)) {
          case TopoClass::A:
            pairs_.push_back({a, b});
            ++i1;
            ++i2_;
            break;
          case TopoClass::B:
            overheard_.push_back(a);
            b2_.push_back(b);
            known_rx1_[b] = 1;
            ++i1;
            ++i2_;
            break;
          case TopoClass::C:
            ++delivered_p1_[0];
            ++delivered_p1_[1];
            ++i1;
            ++i2_;
            break;
          case TopoClass::D:
            break;
          default:
            throw contract_error("scheme requires the four-topology model");
        }
      } else {
        // tx 2 ran dry first; tx 1 finishes alone
        if (st.on(1, 1)) {
          ++delivered_p1_[0];
          ++i1;
        } else if (st.on(2, 1)) {
          overheard_.push_back(a);
          ++i1;
        }
      }
    }
    res_.t_p1 = t_;
    return true;
  }

  bool check_counts() {
    double m = double(cfg_.m);
    double epairs = cfg_.delta * (1.0 - cfg_.delta) * m;
    double eover = cfg_.delta * cfg_.delta * m;
    if (double(pairs_.size()) < epairs - slack_ ||
        double(overheard_.size()) < eover - slack_)
      return fail(ErrorType::type_II);
    return true;
  }

  Window open_window(std::size_t& a_pos, std::size_t& si_pos,
                     std::size_t k2) const {
    Window w(KeyedBits(cfg_.seed, stream_combo + 4 + windows_.size()));
    w.a_off = std::uint32_t(a_pos);
    w.a_len = std::uint32_t(std::min(pairs_.size() - a_pos, a_cap_));
    std::size_t si_rem = si_.size() - si_pos;
    if (w.a_len == 0) {
      w.si_len = std::uint32_t(std::min(si_rem, kSiCap));
    } else {
      bool tx2_active = k2 < playlist_.size();
      double r2rate =
          tx2_active ? cfg_.delta * (1.0 - cfg_.delta) : 1.0 - cfg_.delta;
      double r1rate = tx2_active && k2 < fresh_end_
                          ? cfg_.delta * (1.0 - cfg_.delta)
                          : 1.0 - cfg_.delta;
      double extra =
          double(w.a_len) * (r1rate / r2rate - 1.0) - double(kSiHaircut);
      std::size_t room = extra > 0.0 ? std::size_t(extra) : 0;
      w.si_len = std::uint32_t(std::min({si_rem, kSiCap, room}));
    }
    w.si_off = std::uint32_t(si_pos);
    a_pos += w.a_len;
    si_pos += w.si_len;
    for (std::size_t j = 0; j < w.a_len; ++j) {
      std::uint64_t bit = ms_.bits[0][pairs_[w.a_off + j].a];
      w.vals[j / 64] |= bit << (j % 64);
    }
    for (std::size_t j = 0; j < w.si_len; ++j) {
      std::uint64_t bit = ms_.bits[0][si_[w.si_off + j]];
      w.vals[kAWords + j / 64] |= bit << (j % 64);
    }
    w.m1 = std::make_unique<DenseWindow>(kFrameCols);
    return w;
  }

  void gen_mask(const Window& w, std::size_t t, std::uint64_t* mask) const {
    for (std::size_t j = 0; j < kFrameWords; ++j)
      mask[j] = w.combo.word(std::uint64_t(t) * kFrameWords + j);
    truncate_mask(mask, kAWords, w.a_len);
    truncate_mask(mask + kAWords, kSiWords, w.si_len);
  }

  // Coded stream. Tx 2 repeats each remaining bit until its direct link
  // fires; tx 1 mixes the current window on top. Windows rotate when
  // receiver 2 certifies the pair lane; windows receiver 1 has not finished
  // by then are parked and topped up once both tx 1 streams are exhausted.
  bool stream() {
    si_ = cached_si_;
    si_.insert(si_.end(), overheard_.begin(), overheard_.end());
    playlist_.assign(fresh2_.begin() + std::ptrdiff_t(i2_), fresh2_.end());
    fresh_end_ = playlist_.size();
    playlist_.insert(playlist_.end(), b2_.begin(), b2_.end());
    playlist_.insert(playlist_.end(), cached2_.begin(), cached2_.end());

    std::size_t budget = std::size_t(std::ceil(double(cfg_.m) + slack_));
    std::size_t used = 0;
    std::size_t a_pos = 0, si_pos = 0, k2 = 0;
    std::vector<std::uint32_t> parked;
    std::size_t parked_head = 0;
    int cur = -1;
    bool resumed = false;

    while (k2 < playlist_.size() || cur >= 0 || a_pos < pairs_.size() ||
           si_pos < si_.size() || parked_head < parked.size()) {
      if (used >= budget) return fail(ErrorType::type_I);
      if (cur < 0) {
        if (a_pos < pairs_.size() || si_pos < si_.size()) {
          cur = int(windows_.size());
          windows_.push_back(open_window(a_pos, si_pos, k2));
          m2_.reset();
          if (windows_.back().a_len > 0) m2_.emplace(kALaneCols);
          resumed = false;
        } else if (parked_head < parked.size()) {
          cur = int(parked[parked_head++]);
          m2_.reset();
          resumed = true;
        }
      }

      int x1 = 0;
      std::uint64_t mask[kFrameWords];
      if (cur >= 0) {
        Window& w = windows_[std::size_t(cur)];
        gen_mask(w, t_, mask);
        x1 = masked_parity(mask, w.vals.data(), kFrameWords);
      }
      bool act2 = k2 < playlist_.size();
      std::uint32_t b = act2 ? playlist_[k2] : 0;
      TopologyState st = step(x1, act2 ? ms_.bits[1][b] : 0,
                              {2, cur, -1, act2 ? std::int32_t(b) : -1});
      ++used;
      if (!act2) ++tail_slots_;

      // Rows first (they must see pre-slot knowledge), then marks, then the
      // tx 2 cursor.
      if (cur >= 0) {
        Window& w = windows_[std::size_t(cur)];
        bool rx1_clean =
            st.on(1, 1) && (!act2 || !st.on(1, 2) || known_rx1_[b]);
        bool rx2_clean = st.on(2, 1) && (!act2 || !st.on(2, 2));
        if (rx1_clean && !w.rx1_done) {
          std::uint64_t row[kFrameWords];
          std::copy(mask, mask + kFrameWords, row);
          w.m1->add_row(row, 0);
          if (w.m1->rank() == w.a_len + w.si_len) w.rx1_done = true;
        }
        if (m2_ && rx2_clean) {
          std::uint64_t row[kAWords];
          std::copy(mask, mask + kAWords, row);
          m2_->add_row(row, 0);
        }
        bool a_cert = !m2_ || m2_->rank() == w.a_len;
        if (a_cert) {
          if (w.rx1_done) {
            w.m1.reset();
            m2_.reset();
            cur = -1;
          } else if (!resumed && w.a_len > 0) {
            parked.push_back(std::uint32_t(cur));
            m2_.reset();
            cur = -1;
          }
        }
      }
      if (act2 && st.on(1, 2) && (cur < 0 || !st.on(1, 1)))
        known_rx1_[b] = 1;
      if (act2 && st.on(2, 2)) {
        ++k2;
        ++direct_delivered_;
      }
    }
    parked_ = parked.size();
    return true;
  }

  void build_colmap() {
    w1_wincol_.assign(m1_, -1);
    for (std::size_t wdx = 0; wdx < windows_.size(); ++wdx) {
      const Window& w = windows_[wdx];
      for (std::size_t j = 0; j < w.a_len; ++j)
        w1_wincol_[pairs_[w.a_off + j].a] = std::int32_t(wdx * kFrameCols + j);
      for (std::size_t j = 0; j < w.si_len; ++j)
        w1_wincol_[si_[w.si_off + j]] =
            std::int32_t(wdx * kFrameCols + kALaneCols + j);
    }
    // Single columns: message 2 first, then message-1 bits that were
    // delivered uncoded in phase 1 and never joined a window.
    w1_single_.assign(m1_, 0);
    n_singles_ = cfg_.m;
    for (std::size_t l = 0; l < m1_; ++l)
      if (w1_wincol_[l] < 0) w1_single_[l] = std::uint32_t(n_singles_++);
  }

  // Global solve for one receiver: unit equations from its cache, then one
  // equation per non-erased slot over all m1 + m unknowns. Every equation is
  // a window-lane combination plus at most one single column, so singles
  // eliminate by value substitution and pairwise cancellation inside each
  // window; the deferred representatives resolve right to left once their
  // windows reach full rank.
  void decode(int rx) {
    std::vector<WinBasis> wb(windows_.size());
    std::vector<std::int8_t> sval(n_singles_, -1);
    struct Rep {
      std::array<std::uint64_t, kFrameWords> lane{};
      std::uint32_t s = 0;
      std::uint8_t rhs = 0;
      bool done = false;
    };
    std::vector<std::vector<Rep>> reps(windows_.size());
    std::vector<std::unordered_map<std::uint32_t, std::uint32_t>> bucket(
        windows_.size());

    auto pin = [&](std::uint32_t s, int v) {
      if (sval[s] < 0) sval[s] = std::int8_t(v & 1);
    };
    auto add = [&](std::size_t win,
                   std::array<std::uint64_t, kFrameWords> lane,
                   std::uint32_t s, int rhs) {
      if (s != kNoSingle) {
        if (sval[s] >= 0) {
          rhs ^= sval[s];
        } else {
          auto [it, fresh] =
              bucket[win].try_emplace(s, std::uint32_t(reps[win].size()));
          if (fresh) {
            reps[win].push_back({lane, s, std::uint8_t(rhs & 1), false});
            return;
          }
          const Rep& r = reps[win][it->second];
          for (std::size_t w = 0; w < kFrameWords; ++w) lane[w] ^= r.lane[w];
          rhs ^= r.rhs;
        }
      }
      wb[win].feed(lane, rhs);
    };
    auto unit_lane = [](std::size_t col) {
      std::array<std::uint64_t, kFrameWords> lane{};
      lane[col / 64] = 1ull << (col % 64);
      return lane;
    };

    if (rx == 1) {
      for (std::uint32_t l = 0; l < cfg_.m; ++l)
        if (ms_.cache_mask[0][l]) pin(l, ms_.bits[1][l]);
    } else {
      for (std::uint32_t l = 0; l < m1_; ++l) {
        if (!ms_.cache_mask[1][l]) continue;
        if (w1_wincol_[l] >= 0) {
          std::size_t col = std::size_t(w1_wincol_[l]);
          add(col / kFrameCols, unit_lane(col % kFrameCols), kNoSingle,
              ms_.bits[0][l]);
        } else {
          pin(w1_single_[l], ms_.bits[0][l]);
        }
      }
    }

    for (std::size_t t = 0; t < t_; ++t) {
      TopologyState st = ts_.at(t);
      const SlotMeta& mt = meta_[t];
      bool da = st.on(rx, 1), db = st.on(rx, 2);
      int y = y_[std::size_t(rx - 1)][t];
      if (mt.phase == 1) {
        bool use_a = da && mt.a >= 0;
        bool use_b = db && mt.b >= 0;
        std::uint32_t bcol = use_b ? std::uint32_t(mt.b) : kNoSingle;
        if (use_a && w1_wincol_[std::size_t(mt.a)] >= 0) {
          std::size_t col = std::size_t(w1_wincol_[std::size_t(mt.a)]);
          add(col / kFrameCols, unit_lane(col % kFrameCols), bcol, y);
        } else if (use_a) {
          // direct-only slot: the cross link is off, no second column
          pin(w1_single_[std::size_t(mt.a)], y);
        } else if (use_b) {
          pin(bcol, y);
        }
      } else {
        bool use_w = da && mt.win >= 0;
        bool use_b = db && mt.b >= 0;
        if (use_w) {
          const Window& w = windows_[std::size_t(mt.win)];
          std::array<std::uint64_t, kFrameWords> lane{};
          gen_mask(w, t, lane.data());
          add(std::size_t(mt.win), lane,
              use_b ? std::uint32_t(mt.b) : kNoSingle, y);
        } else if (use_b) {
          pin(std::uint32_t(mt.b), y);
        }
      }
    }

    // Deferred couplings: a window's one unresolved straddler pins through
    // the later window that delivered it, so sweeping right to left settles
    // the chains; the outer loop is a fixpoint guard.
    for (;;) {
      bool progress = false;
      for (std::size_t wi = windows_.size(); wi-- > 0;) {
        for (auto& r : reps[wi]) {
          if (r.done) continue;
          if (sval[r.s] >= 0) {
            wb[wi].feed(r.lane, r.rhs ^ sval[r.s]);
            r.done = true;
            progress = true;
            continue;
          }
          int v = 0;
          if (wb[wi].reduce_value(r.lane, v)) {
            pin(r.s, r.rhs ^ v);
            r.done = true;
            progress = true;
          }
        }
      }
      if (!progress) break;
    }

    bool ok = true;
    if (rx == 1) {
      for (std::size_t l = 0; l < m1_ && ok; ++l) {
        int v = 0;
        if (w1_wincol_[l] >= 0) {
          std::size_t col = std::size_t(w1_wincol_[l]);
          ok = wb[col / kFrameCols].unit_value(col % kFrameCols, v);
        } else {
          std::uint32_t s = w1_single_[l];
          ok = sval[s] >= 0;
          v = ok ? sval[s] : 0;
        }
        if (ok) ok = v == ms_.bits[0][l];
      }
    } else {
      for (std::uint32_t l = 0; l < cfg_.m && ok; ++l)
        ok = sval[l] >= 0 && sval[l] == ms_.bits[1][l];
    }
    res_.decoded[std::size_t(rx - 1)] = ok;
  }

  void fill_counters() {
    CornerCounters& c = res_.counters;
    c.m1 = m1_;
    c.cached = {ms_.cached_count(1), ms_.cached_count(2)};
    c.uncached = {q1_.size(), fresh2_.size()};
    c.delivered_p1 = delivered_p1_;
    c.pairs = pairs_.size();
    c.overheard = overheard_.size();
    c.b_requeued = b2_.size();
    c.pool_si = si_.size();
    c.direct_delivered = direct_delivered_;
    c.windows = windows_.size();
    c.parked = parked_;
    c.tail_slots = tail_slots_;
    c.non_erased = non_erased_;
  }

  CornerConfig cfg_;
  ChannelParams cp_;
  TraceStream ts_;
  MessageSet ms_;
  std::size_t m1_ = 0;
  double slack_ = 0.0;
  std::size_t a_cap_ = kALaneCols;
  std::size_t t_ = 0;
  CornerResult res_;

  std::vector<std::uint32_t> q1_, fresh2_, cached2_, cached_si_;
  std::vector<Pair> pairs_;
  std::vector<std::uint32_t> overheard_, b2_, si_, playlist_;
  std::size_t i2_ = 0, fresh_end_ = 0;
  std::array<std::size_t, 2> delivered_p1_{};
  std::array<std::size_t, 2> non_erased_{};
  std::vector<std::uint8_t> known_rx1_;

  std::vector<Window> windows_;
  std::optional<DenseWindow> m2_;
  std::size_t direct_delivered_ = 0, tail_slots_ = 0, parked_ = 0;

  std::array<std::vector<std::uint8_t>, 2> y_;
  std::vector<SlotMeta> meta_;

  std::vector<std::int32_t> w1_wincol_;
  std::vector<std::uint32_t> w1_single_;
  std::size_t n_singles_ = 0;
};

}  // namespace corner_detail

inline CornerResult run_corner(const CornerConfig& cfg) {
  corner_detail::Runner r(cfg);
  return r.run();
}

}  // namespace eic
