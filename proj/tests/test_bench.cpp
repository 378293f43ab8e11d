#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "eic/bench.hpp"
#include "eic/config.hpp"
#include "eic/errors.hpp"
#include "eic/region.hpp"
#include "json.hpp"

using namespace eic;

namespace {

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < s.size()) {
    std::size_t nl = s.find('\n', start);
    if (nl == std::string::npos) nl = s.size();
    out.push_back(s.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t c = line.find(',', start);
    if (c == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, c - start));
    start = c + 1;
  }
}

double cell(const std::string& line, std::size_t col) {
  return std::stod(fields_of(line)[col]);
}

}  // namespace

TEST_CASE("bernstein bound matches its closed form") {
  REQUIRE(bernstein_bound(0.0, {0.5}) == 1.0);
  REQUIRE(bernstein_bound(2.0, {0.25, 0.25, 0.5}) ==
          Catch::Approx(2.0 * std::exp(-1.0)).margin(1e-12));
  REQUIRE(bernstein_bound(1.0, {}) == 0.0);
  REQUIRE(bernstein_bound(1.0, {0.0}) == 0.0);
  REQUIRE(bernstein_bound(0.1, {10.0}) == 1.0);  // capped
  REQUIRE_THROWS_AS(bernstein_bound(-1.0, {1.0}), param_error);
  REQUIRE_THROWS_AS(bernstein_bound(1.0, {-0.5}), param_error);
}

TEST_CASE("phase-length tail bound follows the displayed formula") {
  double m = 1e4, d = 0.5;
  double dev = std::pow(m, 4.0 / 3.0);
  double d4 = std::pow(d, 4.0);
  double mass = m / (1.0 - d * d) + std::pow(m, 2.0 / 3.0);
  double expected = std::min(1.0, 4.0 * std::exp(-dev / (4.0 * (1.0 - d4) * d4 * mass)));
  REQUIRE(type1_bound(m, d) == Catch::Approx(expected).epsilon(1e-12));

  for (double delta : {0.2, 0.5}) {
    double prev = 2.0;
    for (double mm : {1e3, 1e4, 1e5, 1e6}) {
      double b = type1_bound(mm, delta);
      REQUIRE(b <= prev);
      REQUIRE(b >= 0.0);
      prev = b;
    }
  }
  REQUIRE(type1_bound(1e4, 0.0) == 0.0);
  REQUIRE(type1_bound(1e4, 1.0) == 0.0);
  REQUIRE(type1_bound(1.0, 0.9) == 1.0);  // capped for tiny m
  REQUIRE_THROWS_AS(type1_bound(0.0, 0.5), param_error);
  REQUIRE_THROWS_AS(type1_bound(1e4, 1.5), param_error);
}

TEST_CASE("experiment runner aggregates deterministically") {
  ExperimentConfig cfg;
  cfg.scheme = Scheme::sumrate;
  cfg.delta = 0.2;
  cfg.eps = 2.0 / 3.0;
  cfg.m = 4000;
  cfg.trials = 3;
  cfg.seed0 = 7;
  Aggregate a = run_experiment(cfg);
  Aggregate b = run_experiment(cfg);
  REQUIRE(a.trials == 3);
  REQUIRE(a.decoded == b.decoded);
  REQUIRE(a.mean_sum_rate == b.mean_sum_rate);
  REQUIRE(a.sd_sum_rate == b.sd_sum_rate);
  REQUIRE(a.mean_t_total == b.mean_t_total);
  REQUIRE(a.freq_type1 == b.freq_type1);
  REQUIRE(a.decoded == 3);
  REQUIRE(a.mean_sum_rate == Catch::Approx(1.2343).margin(0.05));
  REQUIRE(a.mean_r1 == a.mean_r2);  // both messages share the clock
  REQUIRE(a.freq_fail >= 0.0);
  REQUIRE(a.freq_fail <= 1.0);
}

TEST_CASE("experiment runner drives the corner scheme") {
  ExperimentConfig cfg;
  cfg.scheme = Scheme::corner;
  cfg.delta = 0.25;
  cfg.eps = 5.0 / 7.0;
  cfg.m = 20000;
  cfg.trials = 2;
  cfg.seed0 = 11;
  Aggregate a = run_experiment(cfg);
  REQUIRE(a.decoded == 2);
  REQUIRE(a.mean_r1 == Catch::Approx(0.328125).margin(0.02));
  REQUIRE(a.mean_r2 == Catch::Approx(0.75).margin(0.02));
  REQUIRE(a.mean_sum_rate == Catch::Approx(a.mean_r1 + a.mean_r2).margin(1e-12));
}

TEST_CASE("experiment runner validates and propagates scope") {
  ExperimentConfig cfg;
  cfg.scheme = Scheme::sumrate;
  cfg.delta = 0.2;
  cfg.eps = 2.0 / 3.0;
  cfg.m = 1000;
  cfg.trials = 0;
  REQUIRE_THROWS_AS(run_experiment(cfg), param_error);
  cfg.trials = 1;
  cfg.eps = 0.1;  // far below the sum-capacity condition
  REQUIRE_THROWS_AS(run_experiment(cfg), scope_error);
}

TEST_CASE("sum-rate envelope figure mirrors the region math") {
  FigureData fd = emit_figure_data(Figure::fig2);
  auto ls = lines_of(fd.csv);
  REQUIRE(ls.size() == 201);
  REQUIRE(ls[0] ==
          "one_minus_delta,envelope_eps_1,envelope_eps_1_2,envelope_eps_0,"
          "parallel_bound");
  for (std::size_t k = 1; k < ls.size(); ++k) {
    double one_minus_delta = cell(ls[k], 0);
    double delta = 1.0 - one_minus_delta;
    REQUIRE(cell(ls[k], 1) ==
            Catch::Approx(sum_rate_envelope(delta, 1.0)).margin(1e-12));
    REQUIRE(cell(ls[k], 2) ==
            Catch::Approx(sum_rate_envelope(delta, 0.5)).margin(1e-12));
    REQUIRE(cell(ls[k], 3) ==
            Catch::Approx(2.0 * (1.0 - delta)).margin(1e-12));
    REQUIRE(cell(ls[k], 4) ==
            Catch::Approx(2.0 * (1.0 - delta)).margin(1e-12));
  }
  REQUIRE(emit_figure_data(Figure::fig2).csv == fd.csv);  // byte-identical
  auto j = nlohmann::json::parse(fd.json);
  REQUIRE(j["rows"].size() == 200);
}

TEST_CASE("region vertex figure lists the cached square") {
  FigureData fd = emit_figure_data(Figure::fig3);
  auto ls = lines_of(fd.csv);
  REQUIRE(ls[0] == "eps,vertex,r1,r2");
  RateRegion square =
      outer_region(ChannelParams::four_topology(0.25, 5.0 / 16.0, 5.0 / 16.0));
  std::vector<std::string> got;
  for (std::size_t k = 1; k < ls.size(); ++k)
    if (cell(ls[k], 0) == Catch::Approx(5.0 / 16.0).margin(1e-15))
      got.push_back(ls[k]);
  REQUIRE(got.size() == square.vertices.size());
  for (std::size_t v = 0; v < got.size(); ++v) {
    REQUIRE(cell(got[v], 2) == Catch::Approx(square.vertices[v].r1).margin(1e-12));
    REQUIRE(cell(got[v], 3) == Catch::Approx(square.vertices[v].r2).margin(1e-12));
  }
}

TEST_CASE("achievability figure flags the condition boundary") {
  FigureData fd = emit_figure_data(Figure::fig5);
  auto ls = lines_of(fd.csv);
  REQUIRE(ls[0] == "delta,envelope,achievable");
  REQUIRE(ls.size() == 201);
  for (std::size_t k = 1; k < ls.size(); ++k) {
    double delta = cell(ls[k], 0);
    REQUIRE(cell(ls[k], 1) ==
            Catch::Approx(sum_rate_envelope(delta, 0.75)).margin(1e-12));
    int flag = int(cell(ls[k], 2));
    REQUIRE(flag == (sum_capacity_condition(delta, 0.75) ? 1 : 0));
    if (delta < 2.0 / 7.0 - 1e-9) REQUIRE(flag == 1);
    if (delta > 2.0 / 7.0 + 1e-9) REQUIRE(flag == 0);
  }
}

TEST_CASE("out-of-condition ledger echoes the claimed constants") {
  FigureData fd = emit_figure_data(Figure::sec5c);
  auto ls = lines_of(fd.csv);
  REQUIRE(ls[0] == "quantity,value");
  double phase1 = -1, phase2 = -1, phase3 = -1, total = -1, rate = -1, ref = -1;
  for (std::size_t k = 1; k < ls.size(); ++k) {
    auto f = fields_of(ls[k]);
    double v = std::stod(f[1]);
    if (f[0] == "phase1_per_m") phase1 = v;
    if (f[0] == "phase2_per_m") phase2 = v;
    if (f[0] == "phase3_per_m") phase3 = v;
    if (f[0] == "total_per_m") total = v;
    if (f[0] == "sum_rate") rate = v;
    if (f[0] == "no_cache_reference") ref = v;
  }
  REQUIRE(phase1 == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(phase2 == Catch::Approx(1.0 / 3.0).margin(1e-12));
  REQUIRE(phase3 == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(total == Catch::Approx(2.25).margin(1e-15));
  REQUIRE(rate == Catch::Approx(8.0 / 9.0).margin(1e-12));
  REQUIRE(ref == Catch::Approx(0.9).margin(1e-15));
}

TEST_CASE("error sweep reports frequencies against the analytic bound") {
  std::vector<std::size_t> ms{500, 1000};
  FigureData fd = error_prob_sweep(0.2, 2.0 / 3.0, ms, 200, 3);
  auto ls = lines_of(fd.csv);
  REQUIRE(ls.size() == 3);
  REQUIRE(ls[0] == "m,trials,freq_type1,freq_type2,freq_fail,type1_bound");
  for (std::size_t k = 1; k < ls.size(); ++k) {
    REQUIRE(cell(ls[k], 1) == 200.0);
    for (std::size_t c = 2; c <= 4; ++c) {
      REQUIRE(cell(ls[k], c) >= 0.0);
      REQUIRE(cell(ls[k], c) <= 1.0);
    }
    REQUIRE(cell(ls[k], 5) ==
            Catch::Approx(type1_bound(double(cell(ls[k], 0)), 0.2)).margin(1e-12));
  }
  REQUIRE(error_prob_sweep(0.2, 2.0 / 3.0, ms, 200, 3).csv == fd.csv);
  REQUIRE_THROWS_AS(error_prob_sweep(0.2, 2.0 / 3.0, ms, 100, 3), param_error);
}

TEST_CASE("config text parses values, fractions and overrides") {
  REQUIRE(parse_real("2/3") == Catch::Approx(2.0 / 3.0).margin(1e-15));
  REQUIRE(parse_real(" 0.25 ") == 0.25);
  REQUIRE(parse_real("1e-3") == 0.001);
  REQUIRE_THROWS_AS(parse_real("a/b"), param_error);
  REQUIRE_THROWS_AS(parse_real(""), param_error);
  REQUIRE_THROWS_AS(parse_real("1/0"), param_error);

  ExperimentConfig cfg;
  cfg.delta = 0.1;  // flag value, overridden below
  apply_config(cfg,
               "delta = 1/4\n"
               "# a comment line\n"
               "eps=5/7   # trailing comment\n"
               "scheme=corner\n"
               "cache-mode = bernoulli\n"
               "trials= 12\n"
               "m=1000\n"
               "seed=9\n"
               "allow-out-of-condition=true\n"
               "out=results.csv\n");
  REQUIRE(cfg.delta == Catch::Approx(0.25).margin(1e-15));
  REQUIRE(cfg.eps == Catch::Approx(5.0 / 7.0).margin(1e-15));
  REQUIRE(cfg.scheme == Scheme::corner);
  REQUIRE(cfg.cache_mode == CacheMode::bernoulli);
  REQUIRE(cfg.trials == 12);
  REQUIRE(cfg.m == 1000);
  REQUIRE(cfg.seed0 == 9);
  REQUIRE(cfg.allow_out_of_condition);
  REQUIRE(cfg.out == "results.csv");

  REQUIRE_THROWS_AS(apply_config(cfg, "bogus=1\n"), param_error);
  REQUIRE_THROWS_AS(apply_config(cfg, "delta\n"), param_error);
  REQUIRE_THROWS_AS(apply_config(cfg, "scheme=quantum\n"), param_error);
  REQUIRE_THROWS_AS(apply_config(cfg, "trials=2/3\n"), param_error);
}
