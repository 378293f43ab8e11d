#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <sstream>
#include <string>

#include "eic/channel.hpp"

using namespace eic;

TEST_CASE("topology classification") {
  REQUIRE(classify(TopologyState{state_A}) == TopoClass::A);
  REQUIRE(classify(TopologyState{state_B}) == TopoClass::B);
  REQUIRE(classify(TopologyState{state_C}) == TopoClass::C);
  REQUIRE(classify(TopologyState{state_D}) == TopoClass::D);
  int other = 0;
  for (int s = 0; s < 16; ++s)
    if (classify(TopologyState{std::uint8_t(s)}) == TopoClass::other) ++other;
  REQUIRE(other == 12);
}

TEST_CASE("receive matches the broadcast equations") {
  // Both direct and cross links on: the two unit inputs cancel at both ears.
  REQUIRE(receive(TopologyState{state_A}, 1, 1) == SlotSignals{0, 0});
  // Cross links only: each receiver hears the other transmitter.
  REQUIRE(receive(TopologyState{state_B}, 1, 0) == SlotSignals{0, 1});
  // Direct links only: each receiver hears its own transmitter.
  REQUIRE(receive(TopologyState{state_C}, 1, 1) == SlotSignals{1, 1});
}

TEST_CASE("receive is linear in both inputs for every state") {
  for (int s = 0; s < 16; ++s) {
    TopologyState st{std::uint8_t(s)};
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        int x1a = a >> 1, x2a = a & 1, x1b = b >> 1, x2b = b & 1;
        SlotSignals ya = receive(st, x1a, x2a);
        SlotSignals yb = receive(st, x1b, x2b);
        SlotSignals ysum = receive(st, x1a ^ x1b, x2a ^ x2b);
        REQUIRE(ysum.y1 == (ya.y1 ^ yb.y1));
        REQUIRE(ysum.y2 == (ya.y2 ^ yb.y2));
      }
    }
  }
}

TEST_CASE("traces are reproducible and seed-sensitive") {
  ChannelParams cp = ChannelParams::four_topology(0.3, 1.0, 1.0);
  TopologyTrace a = sample_trace(cp, 1000, 42);
  TopologyTrace b = sample_trace(cp, 1000, 42);
  REQUIRE(a.states.size() == 1000);
  REQUIRE(a.seed == 42);
  bool same = true;
  for (std::size_t t = 0; t < a.states.size(); ++t)
    same = same && a.states[t] == b.states[t];
  REQUIRE(same);

  TopologyTrace c = sample_trace(cp, 1000, 43);
  bool differs = false;
  for (std::size_t t = 0; t < a.states.size(); ++t)
    differs = differs || !(a.states[t] == c.states[t]);
  REQUIRE(differs);
}

TEST_CASE("longer traces extend shorter ones for the same seed") {
  ChannelParams cp = ChannelParams::four_topology(0.4, 1.0, 1.0);
  TopologyTrace small = sample_trace(cp, 50, 7);
  TopologyTrace big = sample_trace(cp, 100, 7);
  for (std::size_t t = 0; t < 50; ++t) REQUIRE(small.states[t] == big.states[t]);

  TraceStream ts(cp, 7);
  for (std::size_t t = 0; t < 100; ++t) REQUIRE(ts.at(t) == big.states[t]);
}

TEST_CASE("trace frequencies track the four-topology masses") {
  const double d = 0.2;
  ChannelParams cp = ChannelParams::four_topology(d, 1.0, 1.0);
  TopologyTrace tr = sample_trace(cp, 100000, 2024);
  std::array<std::size_t, 16> count{};
  for (TopologyState st : tr.states) ++count[st.s];
  for (int s = 0; s < 16; ++s) {
    if (s == state_A || s == state_B || s == state_C || s == state_D) continue;
    REQUIRE(count[s] == 0);
  }
  double n = double(tr.states.size());
  REQUIRE_THAT(count[state_A] / n, Catch::Matchers::WithinAbs(0.64, 0.01));
  REQUIRE_THAT(count[state_B] / n, Catch::Matchers::WithinAbs(0.16, 0.01));
  REQUIRE_THAT(count[state_C] / n, Catch::Matchers::WithinAbs(0.16, 0.01));
  REQUIRE_THAT(count[state_D] / n, Catch::Matchers::WithinAbs(0.04, 0.01));
}

TEST_CASE("degenerate deltas freeze the trace") {
  ChannelParams on = ChannelParams::four_topology(0.0, 1.0, 1.0);
  for (TopologyState st : sample_trace(on, 100, 5).states)
    REQUIRE(st.s == state_A);
  ChannelParams off = ChannelParams::four_topology(1.0, 1.0, 1.0);
  for (TopologyState st : sample_trace(off, 100, 5).states)
    REQUIRE(st.s == state_D);
}

TEST_CASE("trace length must be positive") {
  ChannelParams cp = ChannelParams::four_topology(0.2, 1.0, 1.0);
  REQUIRE_THROWS_AS(sample_trace(cp, 0, 1), param_error);
}

TEST_CASE("trace csv layout") {
  ChannelParams cp = ChannelParams::four_topology(0.5, 1.0, 1.0);
  TopologyTrace tr = sample_trace(cp, 8, 11);
  std::ostringstream os;
  write_trace_csv(os, tr);
  std::istringstream is(os.str());
  std::string line;
  REQUIRE(std::getline(is, line));
  REQUIRE(line == "t,g11,g12,g21,g22,class");
  for (std::size_t t = 0; t < 8; ++t) {
    REQUIRE(std::getline(is, line));
    TopologyState st = tr.states[t];
    std::ostringstream want;
    want << t << ',' << st.on(1, 1) << ',' << st.on(1, 2) << ',' << st.on(2, 1)
         << ',' << st.on(2, 2) << ',' << to_string(classify(st));
    REQUIRE(line == want.str());
  }
  REQUIRE_FALSE(std::getline(is, line));
}

TEST_CASE("encoders see exactly the past states") {
  ChannelParams cp = ChannelParams::four_topology(0.3, 1.0, 1.0);
  TopologyTrace tr = sample_trace(cp, 64, 99);
  std::size_t calls = 0;
  auto enc1 = [&](std::size_t t, CsitView csit) {
    REQUIRE(csit.now() == t);
    REQUIRE(csit.past.size() == t);
    if (t > 0) REQUIRE(csit.past[t - 1] == tr.states[t - 1]);
    // The view ends right before the current slot; the current state is
    // outside it by construction.
    REQUIRE(csit.past.data() + csit.past.size() == tr.states.data() + t);
    ++calls;
    return 1;
  };
  auto enc2 = [](std::size_t, CsitView) { return 0; };
  std::size_t seen = 0;
  run_slots(tr, enc1, enc2, [&](std::size_t t, TopologyState st, SlotSignals y) {
    (void)t;
    REQUIRE(y == receive(st, 1, 0));
    ++seen;
  });
  REQUIRE(calls == 64);
  REQUIRE(seen == 64);
}
