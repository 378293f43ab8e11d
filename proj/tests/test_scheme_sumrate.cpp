#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "eic/gf2.hpp"
#include "eic/rational.hpp"
#include "eic/region.hpp"
#include "eic/rng.hpp"
#include "eic/scheme_common.hpp"
#include "eic/scheme_sumrate.hpp"

using namespace eic;

namespace {

double closed_form_total(double delta, double eps, double m) {
  return m * (1.0 + delta + eps) / ((1.0 + delta) * (1.0 - delta * delta));
}

SumrateResult run_point(double delta, double eps, std::size_t m,
                        std::uint64_t seed,
                        CacheMode mode = CacheMode::deterministic,
                        bool allow_ooc = false) {
  SumrateConfig cfg;
  cfg.delta = delta;
  cfg.eps = eps;
  cfg.m = m;
  cfg.seed = seed;
  cfg.cache_mode = mode;
  cfg.allow_out_of_condition = allow_ooc;
  return run_sumrate(cfg);
}

}  // namespace

TEST_CASE("analytic phase times match the closed form") {
  SECTION("reference point") {
    auto t = sumrate_analytic_times(0.2, 2.0 / 3.0, 1e5);
    CHECK(t.t_p1 == Catch::Approx(2.0 / 3.0 / 0.96 * 1e5).epsilon(1e-12));
    CHECK(t.t_p2 == Catch::Approx(8.0 / 9.0 / 0.96 * 1e5).epsilon(1e-12));
    CHECK(t.t_p3 == Catch::Approx(0.0).margin(1e-6));
    CHECK(t.t_total == Catch::Approx(1.6203703703703702e5).epsilon(1e-12));
  }
  SECTION("interior point with a pair surplus") {
    auto t = sumrate_analytic_times(0.25, 0.8, 1.0);
    CHECK(t.t_p1 == Catch::Approx(0.8 / 0.9375).epsilon(1e-12));
    CHECK(t.t_p2 == Catch::Approx(0.72 / 0.9375).epsilon(1e-12));
    CHECK(t.t_p3 == Catch::Approx(0.12 / 0.9375).epsilon(1e-12));
    CHECK(t.t_total == Catch::Approx(closed_form_total(0.25, 0.8, 1.0)).epsilon(1e-12));
  }
  SECTION("phase times sum to the closed form across the admissible range") {
    for (int i = 0; i < 50; ++i) {
      double delta = 0.5 * double(i) / 49.0;
      double thr = (1.0 + delta) / (2.0 - delta);
      double eps = thr + (1.0 - thr) * double(i % 4) / 3.0;
      auto t = sumrate_analytic_times(delta, eps, 1.0);
      INFO("delta=" << delta << " eps=" << eps);
      CHECK(t.t_p1 + t.t_p2 + t.t_p3 ==
            Catch::Approx(closed_form_total(delta, eps, 1.0)).margin(1e-9));
      CHECK(t.t_total ==
            Catch::Approx(closed_form_total(delta, eps, 1.0)).margin(1e-9));
      CHECK(t.t_p3 >= 0.0);
    }
  }
}

TEST_CASE("analytic phase times reject out-of-scope parameters") {
  CHECK_THROWS_AS(sumrate_analytic_times(0.6, 1.0, 1.0), scope_error);
  CHECK_THROWS_AS(sumrate_analytic_times(0.2, 0.5, 1.0), scope_error);
  CHECK_THROWS_AS(sumrate_analytic_times(0.55, 0.9, 1.0), scope_error);
  CHECK_THROWS_AS(sumrate_analytic_times(-0.1, 1.0, 1.0), param_error);
  CHECK_THROWS_AS(sumrate_analytic_times(0.2, 1.5, 1.0), param_error);
  CHECK_THROWS_AS(sumrate_analytic_times(0.2, 1.0, 0.0), param_error);
}

TEST_CASE("fully uncached error-free channel finishes in exactly two slots per pair") {
  for (std::uint64_t seed : {11ull, 12ull}) {
    auto r = run_point(0.0, 1.0, 1000, seed);
    REQUIRE(r.error_type == ErrorType::none);
    CHECK(r.t_p1 == 1000);
    CHECK(r.t_p2 == 0);
    CHECK(r.t_p3 == 1000);
    CHECK(r.t_total == 2000);
    CHECK(r.decoded[0]);
    CHECK(r.decoded[1]);
    CHECK(r.sum_rate == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(r.counters.pairs == 1000);
    CHECK(r.counters.quads == 0);
    CHECK(r.counters.leftover_pairs == 1000);
    CHECK(r.counters.pool[0] == 0);
    CHECK(r.counters.pool[1] == 0);
  }
}

TEST_CASE("half cache on the error-free channel pairs every collision with the pool") {
  auto r = run_point(0.0, 0.5, 1000, 21);
  REQUIRE(r.error_type == ErrorType::none);
  CHECK(r.t_p1 == 500);
  CHECK(r.counters.pairs == 500);
  CHECK(r.counters.pool[0] == 500);
  CHECK(r.counters.pool[1] == 500);
  CHECK(r.counters.quads == 500);
  CHECK(r.counters.leftover_pairs == 0);
  CHECK(r.counters.drained[0] == 0);
  CHECK(r.counters.drained[1] == 0);
  CHECK(r.t_p2 >= 1000);
  CHECK(r.t_p2 <= 1060);
  CHECK(r.t_p3 == 0);
  CHECK(r.decoded[0]);
  CHECK(r.decoded[1]);
  CHECK(std::abs(r.sum_rate - 4.0 / 3.0) < 0.02);
}

TEST_CASE("reference operating point delivers within budget and decodes exactly") {
  const double delta = 0.2, eps = 2.0 / 3.0;
  const std::size_t m = 2000;
  auto t = sumrate_analytic_times(delta, eps, double(m));
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto r = run_point(delta, eps, m, seed);
    INFO("seed=" << seed);
    REQUIRE(r.error_type == ErrorType::none);
    CHECK(r.decoded[0]);
    CHECK(r.decoded[1]);
    CHECK(double(r.t_p1) <= t.t_p1 + budget_slack(m) + 1.0);
    CHECK(double(r.t_p2) <= t.t_p2 + budget_slack(m) + 1.0);
    CHECK(double(r.t_p3) <= t.t_p3 + budget_slack(m) + 1.0);
    CHECK(std::abs(double(r.t_total) - t.t_total) <= 3.0 * budget_slack(m));
    CHECK(std::abs(r.sum_rate - 1.2343) < 0.05);
  }
}

TEST_CASE("bit ledger balances") {
  auto check_ledger = [](const SumrateResult& r, std::size_t m) {
    REQUIRE(r.error_type == ErrorType::none);
    for (int i = 0; i < 2; ++i) {
      // pool bits of message i+1 start from the cache at the other receiver
      std::size_t other = std::size_t(1 - i);
      CHECK(r.counters.uncached[i] == m - r.counters.cached[other]);
      std::size_t pool_from_b = r.counters.pool[i] - r.counters.cached[other];
      CHECK(r.counters.uncached[i] ==
            r.counters.pairs + pool_from_b + r.counters.delivered_direct[i]);
      CHECK(r.counters.drained[i] == r.counters.pool[i] - r.counters.quads);
    }
    std::size_t q = std::min({r.counters.pairs, r.counters.pool[0], r.counters.pool[1]});
    CHECK(r.counters.quads == q);
    CHECK(r.counters.leftover_pairs == r.counters.pairs - q);
  };
  SECTION("deterministic caches") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto r = run_point(0.3, 0.8, 3000, seed);
      check_ledger(r, 3000);
      CHECK(r.decoded[0]);
      CHECK(r.decoded[1]);
    }
  }
  SECTION("bernoulli caches") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto r = run_point(0.3, 0.8, 3000, seed, CacheMode::bernoulli);
      check_ledger(r, 3000);
      CHECK(r.decoded[0]);
      CHECK(r.decoded[1]);
    }
  }
}

TEST_CASE("bernoulli caches concentrate at the kept fraction") {
  const std::size_t m = 5000;
  const double eps = 0.8;
  double sigma = std::sqrt(double(m) * eps * (1.0 - eps));
  for (std::uint64_t seed = 3; seed <= 6; ++seed) {
    auto r = run_point(0.25, eps, m, seed, CacheMode::bernoulli);
    for (int i = 0; i < 2; ++i) {
      double dev = std::abs(double(r.counters.cached[i]) - (1.0 - eps) * double(m));
      CHECK(dev <= 4.0 * sigma);
    }
  }
}

TEST_CASE("a collision pair and two pool bits resolve from two mixtures") {
  // Unknowns: a (col 0) and c (col 1) form message one, b (col 2) and d
  // (col 3) form message two. Receiver one holds d, heard a^b in the
  // collision slot, then heard the two mixtures a^c and b^d.
  for (int bits = 0; bits < 16; ++bits) {
    int a = bits & 1, b = (bits >> 1) & 1, c = (bits >> 2) & 1, d = (bits >> 3) & 1;
    EquationSystem rx1(4);
    std::vector<std::uint32_t> unit_d{3};
    rx1.add_equation(unit_d, d);
    std::vector<std::uint32_t> pair{0, 2};
    rx1.add_equation(pair, a ^ b);
    std::vector<std::uint32_t> mix1{0, 1};
    rx1.add_equation(mix1, a ^ c);
    std::vector<std::uint32_t> mix2{2, 3};
    rx1.add_equation(mix2, b ^ d);
    std::vector<std::uint32_t> own{0, 1};
    REQUIRE(rx1.solvable_for(own));
    auto v = rx1.solve(own);
    CHECK(int(v[0]) == a);
    CHECK(int(v[1]) == c);

    // receiver two holds c and needs b, d from the same four equations
    EquationSystem rx2(4);
    std::vector<std::uint32_t> unit_c{1};
    rx2.add_equation(unit_c, c);
    rx2.add_equation(pair, a ^ b);
    rx2.add_equation(mix1, a ^ c);
    rx2.add_equation(mix2, b ^ d);
    std::vector<std::uint32_t> own2{2, 3};
    REQUIRE(rx2.solvable_for(own2));
    auto w = rx2.solve(own2);
    CHECK(int(w[0]) == b);
    CHECK(int(w[1]) == d);
  }
}

TEST_CASE("pool pairing condition matches the sum capacity condition") {
  // Expected pairs dominate the expected pool exactly when the sum capacity
  // condition holds: eps(1-delta) >= (1-eps)(1+delta) + eps*delta.
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 40; ++j) {
      Rat delta{i, 40};
      Rat eps{j, 40};
      Rat pairs = eps * (Rat(1) - delta);
      Rat pool = (Rat(1) - eps) * (Rat(1) + delta) + eps * delta;
      bool surplus = !(pairs < pool);
      INFO("delta=" << i << "/40 eps=" << j << "/40");
      CHECK(surplus == sum_capacity_condition(delta, eps));
    }
  }
}

TEST_CASE("out-of-condition runs drain the surplus pool sequentially") {
  SumrateConfig cfg;
  cfg.delta = 0.5;
  cfg.eps = 0.75;
  cfg.m = 2000;
  cfg.seed = 7;
  CHECK_THROWS_AS(run_sumrate(cfg), scope_error);

  cfg.allow_out_of_condition = true;
  auto r = run_sumrate(cfg);
  REQUIRE(r.error_type == ErrorType::none);
  CHECK(r.decoded[0]);
  CHECK(r.decoded[1]);
  CHECK(r.counters.leftover_pairs == 0);
  CHECK(r.counters.drained[0] > 0);
  CHECK(r.counters.drained[1] > 0);
  double expect = 8.0 / 3.0 * double(cfg.m);
  CHECK(std::abs(double(r.t_total) - expect) <= 0.1 * expect);
  CHECK(std::abs(r.sum_rate - 0.75) < 0.05);
}

TEST_CASE("runs reject out-of-scope parameters") {
  SumrateConfig cfg;
  cfg.delta = 0.7;
  cfg.eps = 1.0;
  cfg.m = 100;
  cfg.seed = 1;
  CHECK_THROWS_AS(run_sumrate(cfg), scope_error);
  cfg.allow_out_of_condition = true;
  cfg.delta = 1.0;
  CHECK_THROWS_AS(run_sumrate(cfg), scope_error);
  cfg.delta = 0.2;
  cfg.m = 0;
  CHECK_THROWS_AS(run_sumrate(cfg), param_error);
}

TEST_CASE("the run is a deterministic function of the seed") {
  auto a = run_point(0.2, 2.0 / 3.0, 2000, 99);
  auto b = run_point(0.2, 2.0 / 3.0, 2000, 99);
  CHECK(a.t_p1 == b.t_p1);
  CHECK(a.t_p2 == b.t_p2);
  CHECK(a.t_p3 == b.t_p3);
  CHECK(a.t_total == b.t_total);
  CHECK(a.sum_rate == b.sum_rate);
  CHECK(a.counters.pairs == b.counters.pairs);
}

TEST_CASE("dense window elimination agrees with the sparse solver") {
  SplitMix rng(0x5eedull);
  for (int trial = 0; trial < 2000; ++trial) {
    std::size_t n = 1 + rng.below(96);
    std::size_t words = (n + 63) / 64;
    DenseWindow win(n);
    EquationSystem sys(n);
    std::size_t rows = rng.below(2 * n + 1);
    for (std::size_t rix = 0; rix < rows; ++rix) {
      std::vector<std::uint64_t> row(words, 0);
      std::vector<std::uint32_t> cols;
      for (std::size_t c = 0; c < n; ++c)
        if (rng.below(4) == 0) {
          row[c / 64] |= 1ull << (c % 64);
          cols.push_back(std::uint32_t(c));
        }
      int rhs = int(rng.below(2));
      bool grew_dense = win.add_row(row.data(), rhs);
      bool grew_sparse = sys.add_equation(cols, rhs);
      REQUIRE(grew_dense == grew_sparse);
    }
    REQUIRE(win.rank() == sys.rank());
    REQUIRE(win.inconsistent() == sys.inconsistent());
    for (int probe = 0; probe < 8; ++probe) {
      std::uint32_t c = std::uint32_t(rng.below(n));
      std::vector<std::uint32_t> one{c};
      bool s = win.solvable(c);
      REQUIRE(s == sys.solvable_for(one));
      if (s) REQUIRE(win.value(c) == int(sys.solve(one)[0]));
    }
  }
}

TEST_CASE("realized completion times concentrate around the analytic times") {
  const double delta = 0.2, eps = 2.0 / 3.0;
  for (std::size_t m : {std::size_t(1000), std::size_t(10000), std::size_t(100000)}) {
    auto t = sumrate_analytic_times(delta, eps, double(m));
    std::vector<double> totals;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      auto r = run_point(delta, eps, m, seed);
      REQUIRE(r.error_type == ErrorType::none);
      REQUIRE(r.decoded[0]);
      REQUIRE(r.decoded[1]);
      totals.push_back(double(r.t_total));
    }
    std::sort(totals.begin(), totals.end());
    double median = totals[totals.size() / 2];
    INFO("m=" << m);
    CHECK(std::abs(median - t.t_total) <= budget_slack(m));
  }
}
