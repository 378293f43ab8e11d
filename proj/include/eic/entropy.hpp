#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <unordered_map>
#include <vector>

#include "eic/channel.hpp"
#include "eic/errors.hpp"
#include "eic/params.hpp"
#include "eic/rng.hpp"

namespace eic {

// Exhaustive verification of the converse's leakage inequality at toy scale:
// enumerate every (message pair, state sequence) atom of a fully specified
// strategy, compute exact conditional entropies from the joint law, and
// compare both sides of the inequality. Everything here is rational
// arithmetic in doubles, so tolerances are rounding noise, not statistics.

// A deterministic transmission strategy over a short horizon. Encoders are
// truth tables: enc[i][t] is indexed by w * S^t + prefix, where prefix packs
// the state history seen so far (slot k contributes digit * S^k, digits are
// positions in the enumeration support). Indexing by the strict past is what
// enforces delayed state knowledge; the table has no cell a current state
// could select.
struct StrategySpec {
  int n = 1;
  int m1 = 0;
  int m2 = 0;
  std::uint8_t cache_rx1 = 0;  // message-2 bits receiver 1 holds
  std::uint8_t cache_rx2 = 0;  // message-1 bits receiver 2 holds
  int support_size = 0;
  std::array<std::vector<std::vector<std::uint8_t>>, 2> enc;

  static StrategySpec silent(int n, int m1, int m2, int support_size) {
    StrategySpec s;
    s.n = n;
    s.m1 = m1;
    s.m2 = m2;
    s.support_size = support_size;
    for (int i = 0; i < 2; ++i) {
      int m = i == 0 ? m1 : m2;
      s.enc[std::size_t(i)].resize(std::size_t(n > 0 ? n : 0));
      std::size_t width = 1;
      for (int t = 0; t < n; ++t) {
        s.enc[std::size_t(i)][std::size_t(t)].assign(
            (std::size_t(1) << (m > 0 ? m : 0)) * width, 0);
        width *= std::size_t(support_size > 0 ? support_size : 0);
      }
    }
    return s;
  }

  static StrategySpec random(int n, int m1, int m2, int support_size,
                             std::uint8_t cache_rx1, std::uint8_t cache_rx2,
                             std::uint64_t seed) {
    StrategySpec s = silent(n, m1, m2, support_size);
    s.cache_rx1 = cache_rx1;
    s.cache_rx2 = cache_rx2;
    SplitMix g(stream_key(seed, 6));
    for (auto& user : s.enc)
      for (auto& slot : user)
        for (auto& cell : slot) cell = std::uint8_t(g.below(2));
    return s;
  }

  // f(w, prefix digits) -> bit, applied across user's whole table
  template <class F>
  void fill_encoder(int user, F f) {
    if (user != 1 && user != 2) throw contract_error("user index out of range");
    int m = user == 1 ? m1 : m2;
    std::size_t S = std::size_t(support_size);
    std::vector<int> prefix;
    for (int t = 0; t < n; ++t) {
      std::size_t width = 1;
      for (int k = 0; k < t; ++k) width *= S;
      auto& tab = enc[std::size_t(user - 1)][std::size_t(t)];
      for (std::uint32_t w = 0; w < (1u << m); ++w)
        for (std::size_t pfx = 0; pfx < width; ++pfx) {
          prefix.clear();
          std::size_t rest = pfx;
          for (int k = 0; k < t; ++k) {
            prefix.push_back(int(rest % S));
            rest /= S;
          }
          tab[w * width + pfx] = std::uint8_t(f(w, prefix) & 1);
        }
    }
  }
};

struct JointAtom {
  std::uint32_t w1 = 0;
  std::uint32_t w2 = 0;
  std::uint32_t trace = 0;  // slot k contributes its support digit * S^k
  std::uint32_t y1 = 0;     // slot t output in bit t
  std::uint32_t y2 = 0;
  double p = 0.0;
};

struct JointTable {
  int n = 0;
  int m1 = 0;
  int m2 = 0;
  std::uint8_t cache_rx1 = 0;
  std::uint8_t cache_rx2 = 0;
  std::vector<TopologyState> support;
  std::vector<double> support_p;
  std::vector<JointAtom> atoms;
};

// Full joint law of (W1, W2, G^n, Y1^n, Y2^n) under a strategy. Outputs are
// deterministic given (w1, w2, trace), so atom probabilities factor into the
// uniform message prior times the trace probability.
inline JointTable enumerate_joint(const StrategySpec& s,
                                  const ChannelParams& cp) {
  if (s.n < 1 || s.n > 5) throw param_error("horizon must lie in [1,5]");
  if (s.m1 < 0 || s.m1 > 3 || s.m2 < 0 || s.m2 > 3)
    throw param_error("message widths must lie in [0,3]");
  if (s.cache_rx1 >> s.m2 || s.cache_rx2 >> s.m1)
    throw param_error("cache mask references missing message bits");

  JointTable t;
  t.n = s.n;
  t.m1 = s.m1;
  t.m2 = s.m2;
  t.cache_rx1 = s.cache_rx1;
  t.cache_rx2 = s.cache_rx2;
  for (int st = 0; st < 16; ++st) {
    double p = cp.p_state(st);
    if (p <= 0.0) continue;
    t.support.push_back(TopologyState{std::uint8_t(st)});
    t.support_p.push_back(p);
  }
  std::size_t S = t.support.size();
  if (int(S) != s.support_size)
    throw param_error("strategy was built for a different state support");
  double cells =
      std::pow(double(S), s.n) * double(1u << (s.m1 + s.m2));
  if (cells > 1e7) throw param_error("enumeration size cap exceeded");
  for (int i = 0; i < 2; ++i) {
    int m = i == 0 ? s.m1 : s.m2;
    if (s.enc[std::size_t(i)].size() != std::size_t(s.n))
      throw param_error("encoder table shape mismatch");
    std::size_t width = 1;
    for (int k = 0; k < s.n; ++k) {
      if (s.enc[std::size_t(i)][std::size_t(k)].size() !=
          (std::size_t(1) << m) * width)
        throw param_error("encoder table shape mismatch");
      width *= S;
    }
  }

  std::size_t traces = 1;
  for (int k = 0; k < s.n; ++k) traces *= S;
  double msg_p = 1.0 / double(1u << (s.m1 + s.m2));
  t.atoms.reserve(std::size_t(cells));
  for (std::uint32_t w1 = 0; w1 < (1u << s.m1); ++w1)
    for (std::uint32_t w2 = 0; w2 < (1u << s.m2); ++w2)
      for (std::size_t tr = 0; tr < traces; ++tr) {
        JointAtom a;
        a.w1 = w1;
        a.w2 = w2;
        a.trace = std::uint32_t(tr);
        a.p = msg_p;
        std::size_t rest = tr;
        std::size_t width = 1;  // S^t, the prefix span at slot t
        std::size_t prefix = 0;
        for (int k = 0; k < s.n; ++k) {
          std::size_t d = rest % S;
          rest /= S;
          a.p *= t.support_p[d];
          int x1 = s.enc[0][std::size_t(k)][w1 * width + prefix];
          int x2 = s.enc[1][std::size_t(k)][w2 * width + prefix];
          SlotSignals y = receive(t.support[d], x1, x2);
          a.y1 |= std::uint32_t(y.y1) << k;
          a.y2 |= std::uint32_t(y.y2) << k;
          prefix += d * width;
          width *= S;
        }
        t.atoms.push_back(a);
      }
  return t;
}

enum class Var { w1, w2, w1_at_rx2, w2_at_rx1, y1, y2, g };

// H(target | given) in bits, exact up to rounding. Keys pack variable values
// with mixed radixes; the full variable set stays under 2^42, so a 64-bit
// key never collides.
inline double conditional_entropy(const JointTable& t,
                                  std::span<const Var> target,
                                  std::span<const Var> given) {
  auto radix = [&](Var v) -> std::uint64_t {
    switch (v) {
      case Var::w1:
      case Var::w1_at_rx2: return std::uint64_t(1) << t.m1;
      case Var::w2:
      case Var::w2_at_rx1: return std::uint64_t(1) << t.m2;
      case Var::y1:
      case Var::y2: return std::uint64_t(1) << t.n;
      case Var::g: {
        std::uint64_t r = 1;
        for (int k = 0; k < t.n; ++k) r *= t.support.size();
        return r;
      }
    }
    throw contract_error("variable out of range");
  };
  auto value = [&](const JointAtom& a, Var v) -> std::uint64_t {
    switch (v) {
      case Var::w1: return a.w1;
      case Var::w2: return a.w2;
      case Var::w1_at_rx2: return a.w1 & t.cache_rx2;
      case Var::w2_at_rx1: return a.w2 & t.cache_rx1;
      case Var::y1: return a.y1;
      case Var::y2: return a.y2;
      case Var::g: return a.trace;
    }
    throw contract_error("variable out of range");
  };
  struct Cell {
    double p = 0.0;
    std::uint64_t kg = 0;
  };
  std::unordered_map<std::uint64_t, double> marg;
  std::unordered_map<std::uint64_t, Cell> joint;
  for (const JointAtom& a : t.atoms) {
    std::uint64_t kg = 0;
    for (Var v : given) kg = kg * radix(v) + value(a, v);
    std::uint64_t kv = kg;
    for (Var v : target) kv = kv * radix(v) + value(a, v);
    marg[kg] += a.p;
    Cell& c = joint[kv];
    c.p += a.p;
    c.kg = kg;
  }
  double h = 0.0;
  for (const auto& [kv, c] : joint) h += c.p * std::log2(marg[c.kg] / c.p);
  return h;
}

inline double conditional_entropy(const JointTable& t,
                                  std::initializer_list<Var> target,
                                  std::initializer_list<Var> given) {
  return conditional_entropy(
      t, std::span<const Var>(target.begin(), target.size()),
      std::span<const Var>(given.begin(), given.size()));
}

// Both forms of the leakage inequality for one strategy. The precursor form
// conditions both sides on the cached part of message 1 and needs no
// decodability term; it must hold for every strategy. The headline form
// swaps in the uncached fraction and charges an explicit slack of
// beta1 * H(W1 | Y1^n, W2, G^n), the exact stand-in for the vanishing
// decoding-error term of asymptotic statements.
struct LeakageReport {
  double ratio = 0.0;  // cross-link survival over transmitter-1 survival
  double eps2 = 1.0;   // uncached fraction of message 1, from the mask
  double beta1 = 0.0;  // eps2 * ratio
  double precursor_lhs = 0.0;
  double precursor_rhs = 0.0;
  double precursor_slack = 0.0;
  double fano = 0.0;  // H(W1 | Y1^n, W2, G^n)
  double bound_lhs = 0.0;
  double bound_rhs = 0.0;
  double bound_slack = 0.0;
  bool precursor_ok = false;
  bool bound_ok = false;
};

// One random verification case: short horizon, up to two message bits per
// user, a four-topology channel off the 0.1..0.9 erasure grid, and random
// cache masks plus truth tables.
struct FuzzCase {
  StrategySpec strategy;
  double delta = 0.0;
};

inline FuzzCase draw_leakage_fuzz_case(SplitMix& g) {
  FuzzCase fc;
  int n = 1 + int(g.below(3));
  int m1 = int(g.below(3));
  int m2 = int(g.below(3));
  fc.delta = 0.1 * double(1 + g.below(9));
  std::uint8_t mask1 = std::uint8_t(g.below(std::uint64_t(1) << m2));
  std::uint8_t mask2 = std::uint8_t(g.below(std::uint64_t(1) << m1));
  fc.strategy =
      StrategySpec::random(n, m1, m2, 4, mask1, mask2, g.below(1u << 31));
  return fc;
}

inline LeakageReport check_leakage(const StrategySpec& s,
                                   const ChannelParams& cp) {
  JointTable t = enumerate_joint(s, cp);
  LeakageReport r;
  double live21 = 1.0 - cp.delta(2, 1);
  // delta_tx(1) <= delta(2,1), so the denominator is positive whenever the
  // numerator is
  r.ratio = live21 <= 0.0 ? 0.0 : live21 / (1.0 - cp.delta_tx(1));
  r.eps2 = s.m1 == 0 ? 1.0
                     : 1.0 - double(std::popcount(unsigned(s.cache_rx2))) /
                                 double(s.m1);
  r.beta1 = r.eps2 * r.ratio;
  double h_y2 =
      conditional_entropy(t, {Var::y2}, {Var::w1_at_rx2, Var::w2, Var::g});
  double h_y1_cached =
      conditional_entropy(t, {Var::y1}, {Var::w1_at_rx2, Var::w2, Var::g});
  double h_y1 = conditional_entropy(t, {Var::y1}, {Var::w2, Var::g});
  r.fano = conditional_entropy(t, {Var::w1}, {Var::y1, Var::w2, Var::g});
  r.precursor_lhs = h_y2;
  r.precursor_rhs = r.ratio * h_y1_cached;
  r.precursor_slack = r.precursor_lhs - r.precursor_rhs;
  r.precursor_ok = r.precursor_slack >= -1e-10;
  r.bound_lhs = h_y2;
  r.bound_rhs = r.beta1 * h_y1;
  r.bound_slack = r.bound_lhs + r.beta1 * r.fano - r.bound_rhs;
  r.bound_ok = r.bound_slack >= -1e-10;
  return r;
}

}  // namespace eic
