#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "eic/params.hpp"
#include "eic/rng.hpp"

namespace eic {

struct TopologyState {
  std::uint8_t s = 0;
  bool on(int i, int j) const { return link_on(s, i, j); }
};

inline bool operator==(TopologyState a, TopologyState b) { return a.s == b.s; }

enum class TopoClass { A, B, C, D, other };

inline TopoClass classify(TopologyState st) {
  switch (st.s) {
    case state_A: return TopoClass::A;
    case state_B: return TopoClass::B;
    case state_C: return TopoClass::C;
    case state_D: return TopoClass::D;
    default: return TopoClass::other;
  }
}

inline const char* to_string(TopoClass c) {
  switch (c) {
    case TopoClass::A: return "A";
    case TopoClass::B: return "B";
    case TopoClass::C: return "C";
    case TopoClass::D: return "D";
    default: return "other";
  }
}

struct SlotSignals {
  int y1 = 0;
  int y2 = 0;
};

inline bool operator==(SlotSignals a, SlotSignals b) {
  return a.y1 == b.y1 && a.y2 == b.y2;
}

// One slot of the broadcast channel: each receiver XORs whatever its active
// incoming links carry.
inline SlotSignals receive(TopologyState g, int x1, int x2) {
  x1 &= 1;
  x2 &= 1;
  SlotSignals y;
  y.y1 = (g.on(1, 1) ? x1 : 0) ^ (g.on(1, 2) ? x2 : 0);
  y.y2 = (g.on(2, 1) ? x1 : 0) ^ (g.on(2, 2) ? x2 : 0);
  return y;
}

struct TopologyTrace {
  std::vector<TopologyState> states;
  std::uint64_t seed = 0;
};

// Keyed random access into the i.i.d. state process: at(t) depends only on
// (params, seed, t), so any two traces with the same seed agree on their
// common prefix.
class TraceStream {
 public:
  TraceStream(const ChannelParams& cp, std::uint64_t seed)
      : bits_(seed, stream_trace) {
    double acc = 0.0;
    last_ = 0;
    for (int s = 0; s < 16; ++s) {
      acc += cp.p_state(s);
      cdf_[std::size_t(s)] = acc;
      if (cp.p_state(s) > 0.0) last_ = s;
    }
  }

  TopologyState at(std::uint64_t t) const {
    double u = bits_.uniform(t);
    for (int s = 0; s < 16; ++s)
      if (u < cdf_[std::size_t(s)]) return {std::uint8_t(s)};
    return {std::uint8_t(last_)};  // u landed in the 1e-12 sum slack
  }

 private:
  KeyedBits bits_;
  std::array<double, 16> cdf_{};
  int last_;
};

inline TopologyTrace sample_trace(const ChannelParams& cp, std::size_t n,
                                  std::uint64_t seed) {
  if (n < 1) throw param_error("trace length must be at least 1");
  TraceStream ts(cp, seed);
  TopologyTrace tr;
  tr.seed = seed;
  tr.states.reserve(n);
  for (std::size_t t = 0; t < n; ++t) tr.states.push_back(ts.at(t));
  return tr;
}

inline void write_trace_csv(std::ostream& os, const TopologyTrace& tr) {
  os << "t,g11,g12,g21,g22,class\n";
  for (std::size_t t = 0; t < tr.states.size(); ++t) {
    TopologyState st = tr.states[t];
    os << t << ',' << st.on(1, 1) << ',' << st.on(1, 2) << ',' << st.on(2, 1)
       << ',' << st.on(2, 2) << ',' << to_string(classify(st)) << '\n';
  }
}

// What a transmitter knows about the channel at slot t: the states of slots
// 0..t-1 and nothing else. Handing encoders this view (rather than the trace)
// keeps the one-slot feedback delay structural.
struct CsitView {
  std::span<const TopologyState> past;
  std::size_t now() const { return past.size(); }
};

template <class Enc1, class Enc2, class Sink>
void run_slots(const TopologyTrace& trace, Enc1&& enc1, Enc2&& enc2,
               Sink&& sink) {
  for (std::size_t t = 0; t < trace.states.size(); ++t) {
    CsitView csit{std::span<const TopologyState>(trace.states.data(), t)};
    int x1 = enc1(t, csit);
    int x2 = enc2(t, csit);
    sink(t, trace.states[t], receive(trace.states[t], x1, x2));
  }
}

}  // namespace eic
