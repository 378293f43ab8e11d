// Command-line surface over the library: region analytics, Monte-Carlo
// experiment runs, rate-vs-delta sweeps, the exhaustive leakage checker,
// error-probability sweeps and figure-data emission.
//
// Exit codes: 0 success, 2 rejected parameters or out-of-scope request,
// 1 internal failure.

#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eic/bench.hpp"
#include "eic/config.hpp"
#include "eic/entropy.hpp"
#include "eic/errors.hpp"
#include "eic/region.hpp"
#include "eic/rng.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path);
}

// data.csv -> data.json; extensionless paths get .json appended
std::string json_path(const std::string& csv_path) {
  std::size_t dot = csv_path.find_last_of('.');
  std::size_t slash = csv_path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return csv_path + ".json";
  return csv_path.substr(0, dot) + ".json";
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw eic::param_error("cannot read config file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json aggregate_to_json(const eic::Aggregate& ag) {
  return json{{"trials", ag.trials},
              {"decoded", ag.decoded},
              {"error_type1", ag.error_type1},
              {"error_type2", ag.error_type2},
              {"decode_failures", ag.decode_failures},
              {"mean_t_total", ag.mean_t_total},
              {"sd_t_total", ag.sd_t_total},
              {"mean_sum_rate", ag.mean_sum_rate},
              {"sd_sum_rate", ag.sd_sum_rate},
              {"mean_r1", ag.mean_r1},
              {"sd_r1", ag.sd_r1},
              {"mean_r2", ag.mean_r2},
              {"sd_r2", ag.sd_r2},
              {"freq_type1", ag.freq_type1},
              {"freq_type2", ag.freq_type2},
              {"freq_fail", ag.freq_fail}};
}

std::string aggregate_csv(const eic::ExperimentConfig& cfg,
                          const eic::Aggregate& ag, bool mirrored) {
  std::ostringstream os;
  os << "scheme,delta,eps,m,trials,seed,mirrored,decoded,error_type1,"
        "error_type2,decode_failures,mean_t_total,sd_t_total,mean_sum_rate,"
        "sd_sum_rate,mean_r1,sd_r1,mean_r2,sd_r2,freq_type1,freq_type2,"
        "freq_fail\n";
  char buf[512];
  std::snprintf(
      buf, sizeof buf,
      "%s,%.12g,%.12g,%zu,%d,%llu,%d,%d,%d,%d,%d,%.12g,%.12g,%.12g,%.12g,"
      "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
      cfg.scheme == eic::Scheme::sumrate ? "sumrate" : "corner", cfg.delta,
      cfg.eps, cfg.m, cfg.trials, (unsigned long long)cfg.seed0,
      mirrored ? 1 : 0, ag.decoded, ag.error_type1, ag.error_type2,
      ag.decode_failures, ag.mean_t_total, ag.sd_t_total, ag.mean_sum_rate,
      ag.sd_sum_rate, ag.mean_r1, ag.sd_r1, ag.mean_r2, ag.sd_r2,
      ag.freq_type1, ag.freq_type2, ag.freq_fail);
  os << buf;
  return os.str();
}

struct CommonFlags {
  std::string scheme = "sumrate";
  std::string delta, eps;
  std::uint64_t m = 0;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string cache_mode = "deterministic";
  bool allow_out_of_condition = false;
  std::string out, config;
};

eic::ExperimentConfig build_config(const CommonFlags& fl) {
  eic::ExperimentConfig cfg;
  cfg.scheme = eic::scheme_from_name(fl.scheme);
  if (!fl.delta.empty()) cfg.delta = eic::parse_real(fl.delta);
  if (!fl.eps.empty()) cfg.eps = eic::parse_real(fl.eps);
  cfg.m = std::size_t(fl.m);
  cfg.trials = fl.trials;
  cfg.seed0 = fl.seed;
  cfg.cache_mode = eic::cache_mode_from_name(fl.cache_mode);
  cfg.allow_out_of_condition = fl.allow_out_of_condition;
  cfg.out = fl.out;
  if (!fl.config.empty()) eic::apply_config(cfg, read_file(fl.config));
  return cfg;
}

int cmd_region(const std::string& delta_s, const std::string& eps_s,
               const std::string& out) {
  double delta = eic::parse_real(delta_s);
  double eps = eic::parse_real(eps_s);
  eic::ChannelParams cp = eic::ChannelParams::four_topology(delta, eps, eps);
  eic::RateRegion rr = eic::outer_region(cp);
  json j;
  j["delta"] = delta;
  j["eps"] = eps;
  j["sum_capacity_condition"] = eic::sum_capacity_condition(delta, eps);
  j["region_condition"] =
      delta < 1.0 ? eic::region_condition(delta, eps) : false;
  eic::RatePair best = eic::max_sum_rate_point(delta, eps);
  j["max_sum_rate_point"] = {best.r1, best.r2};
  j["sum_rate_envelope"] = eic::sum_rate_envelope(delta, eps);
  try {
    eic::RatePair corner = eic::corner_point(delta, eps);
    j["corner_point"] = {corner.r1, corner.r2};
  } catch (const eic::scope_error&) {
    j["corner_point"] = nullptr;  // square region, no distinct corner
  }
  json verts = json::array();
  for (const eic::RatePair& v : rr.vertices) verts.push_back({v.r1, v.r2});
  j["vertices"] = verts;
  json planes = json::array();
  for (const eic::HalfPlane& h : rr.halfplanes)
    planes.push_back({{"label", h.label}, {"a1", h.a1}, {"a2", h.a2},
                      {"c", h.c}});
  j["halfplanes"] = planes;
  if (!out.empty()) {
    std::ostringstream csv;
    eic::write_region_csv(csv, rr);
    write_file(out, csv.str());
    write_file(json_path(out), j.dump(2) + "\n");
  }
  std::printf("%s\n", j.dump(2).c_str());
  return 0;
}

int cmd_simulate(const CommonFlags& fl, bool mirror) {
  eic::ExperimentConfig cfg = build_config(fl);
  if (mirror && cfg.scheme != eic::Scheme::corner)
    throw eic::param_error("--mirror applies to the corner scheme");
  eic::Aggregate ag = eic::run_experiment(cfg);
  if (mirror) {
    std::swap(ag.mean_r1, ag.mean_r2);
    std::swap(ag.sd_r1, ag.sd_r2);
  }
  json j;
  j["scheme"] = cfg.scheme == eic::Scheme::sumrate ? "sumrate" : "corner";
  j["delta"] = cfg.delta;
  j["eps"] = cfg.eps;
  j["m"] = cfg.m;
  j["seed"] = cfg.seed0;
  j["mirrored"] = mirror;
  j["aggregate"] = aggregate_to_json(ag);
  if (!cfg.out.empty()) {
    write_file(cfg.out, aggregate_csv(cfg, ag, mirror));
    write_file(json_path(cfg.out), j.dump(2) + "\n");
  }
  std::printf("%s\n", j.dump(2).c_str());
  return 0;
}

int cmd_sweep(const CommonFlags& fl, const std::string& dmin_s,
              const std::string& dmax_s, int steps) {
  eic::ExperimentConfig base = build_config(fl);
  double dmin = eic::parse_real(dmin_s);
  double dmax = eic::parse_real(dmax_s);
  if (steps < 2) throw eic::param_error("sweep needs at least 2 grid points");
  if (!(dmin >= 0.0 && dmax <= 1.0 && dmin < dmax))
    throw eic::param_error("sweep grid must satisfy 0 <= min < max <= 1");
  std::string csv =
      "delta,trials,decoded,mean_sum_rate,sd_sum_rate,mean_r1,mean_r2,"
      "freq_type1,freq_type2,freq_fail\n";
  json rows = json::array();
  int skipped = 0;
  for (int k = 0; k < steps; ++k) {
    double delta = dmin + (dmax - dmin) * double(k) / double(steps - 1);
    eic::ExperimentConfig cfg = base;
    cfg.delta = delta;
    bool in_scope = false;
    try {
      in_scope = cfg.scheme == eic::Scheme::sumrate
                     ? (cfg.allow_out_of_condition ||
                        (delta <= 0.5 &&
                         eic::sum_capacity_condition(delta, cfg.eps)))
                     : eic::region_condition(delta, cfg.eps);
    } catch (const eic::scope_error&) {
      in_scope = false;
    }
    if (!in_scope) {
      ++skipped;
      continue;
    }
    eic::Aggregate ag = eic::run_experiment(cfg);
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "%.12g,%d,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                  delta, ag.trials, ag.decoded, ag.mean_sum_rate,
                  ag.sd_sum_rate, ag.mean_r1, ag.mean_r2, ag.freq_type1,
                  ag.freq_type2, ag.freq_fail);
    csv += buf;
    rows.push_back({{"delta", delta}, {"aggregate", aggregate_to_json(ag)}});
  }
  json j;
  j["scheme"] = base.scheme == eic::Scheme::sumrate ? "sumrate" : "corner";
  j["eps"] = base.eps;
  j["m"] = base.m;
  j["skipped_out_of_scope"] = skipped;
  j["rows"] = rows;
  if (!base.out.empty()) {
    write_file(base.out, csv);
    write_file(json_path(base.out), j.dump(2) + "\n");
  }
  std::printf("%s\n", j.dump(2).c_str());
  return 0;
}

int cmd_verify_entropy(int cases, std::uint64_t seed, const std::string& out) {
  if (cases < 1) throw eic::param_error("cases must be at least 1");
  eic::SplitMix g(eic::stream_key(seed, 0));
  json case_rows = json::array();
  int precursor_violations = 0, bound_violations = 0;
  double min_precursor = 1e300, min_bound = 1e300;
  for (int c = 0; c < cases; ++c) {
    eic::FuzzCase fc = eic::draw_leakage_fuzz_case(g);
    eic::ChannelParams cp =
        eic::ChannelParams::four_topology(fc.delta, 1.0, 1.0);
    eic::LeakageReport r = eic::check_leakage(fc.strategy, cp);
    if (!r.precursor_ok) ++precursor_violations;
    if (!r.bound_ok) ++bound_violations;
    min_precursor = std::min(min_precursor, r.precursor_slack);
    min_bound = std::min(min_bound, r.bound_slack);
    case_rows.push_back(
        {{"n", fc.strategy.n},
         {"m1", fc.strategy.m1},
         {"m2", fc.strategy.m2},
         {"delta", fc.delta},
         {"cache_rx1", fc.strategy.cache_rx1},
         {"cache_rx2", fc.strategy.cache_rx2},
         {"ratio", r.ratio},
         {"beta1", r.beta1},
         {"fano", r.fano},
         {"precursor",
          {{"lhs", r.precursor_lhs},
           {"rhs", r.precursor_rhs},
           {"slack", r.precursor_slack},
           {"ok", r.precursor_ok}}},
         {"bound",
          {{"lhs", r.bound_lhs},
           {"rhs", r.bound_rhs},
           {"slack", r.bound_slack},
           {"ok", r.bound_ok}}}});
  }
  json summary = {{"cases", cases},
                  {"precursor_violations", precursor_violations},
                  {"bound_violations", bound_violations},
                  {"min_precursor_slack", min_precursor},
                  {"min_bound_slack", min_bound}};
  if (!out.empty()) {
    json full = {{"summary", summary}, {"cases", case_rows}};
    write_file(out, full.dump(2) + "\n");
  }
  std::printf("%s\n", summary.dump(2).c_str());
  return 0;
}

int cmd_error_prob(const std::string& delta_s, const std::string& eps_s,
                   const std::string& m_list_s, int trials,
                   std::uint64_t seed, const std::string& out) {
  double delta = eic::parse_real(delta_s);
  double eps = eic::parse_real(eps_s);
  std::vector<std::size_t> ms;
  std::size_t start = 0;
  while (start <= m_list_s.size()) {
    std::size_t comma = m_list_s.find(',', start);
    if (comma == std::string::npos) comma = m_list_s.size();
    ms.push_back(std::size_t(eic::parse_uint(
        std::string_view(m_list_s).substr(start, comma - start))));
    start = comma + 1;
  }
  eic::FigureData fd = eic::error_prob_sweep(delta, eps, ms, trials, seed);
  if (!out.empty()) {
    write_file(out, fd.csv);
    write_file(json_path(out), fd.json);
  }
  std::printf("%s", fd.csv.c_str());
  return 0;
}

int cmd_figure(const std::string& which, const std::string& out) {
  eic::Figure fig;
  if (which == "fig2")
    fig = eic::Figure::fig2;
  else if (which == "fig3")
    fig = eic::Figure::fig3;
  else if (which == "fig5")
    fig = eic::Figure::fig5;
  else if (which == "sec5c")
    fig = eic::Figure::sec5c;
  else
    throw eic::param_error("unknown figure: '" + which + "'");
  eic::FigureData fd = eic::emit_figure_data(fig);
  if (!out.empty()) {
    write_file(out, fd.csv);
    write_file(json_path(out), fd.json);
  }
  std::printf("%s", fd.csv.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"erasure interference channel toolkit"};
  app.require_subcommand(1);

  std::string r_delta, r_eps, r_out;
  CLI::App* region = app.add_subcommand(
      "region", "outer-bound region polygon and analytic points");
  region->add_option("--delta", r_delta, "erasure probability (decimal or p/q)")
      ->required();
  region->add_option("--eps", r_eps, "uncached fraction")->required();
  region->add_option("--out", r_out, "CSV path (JSON mirror alongside)");

  CommonFlags sf;
  bool mirror = false;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Monte-Carlo run of one scheme");
  simulate->add_option("--scheme", sf.scheme, "sumrate or corner");
  simulate->add_option("--delta", sf.delta, "erasure probability")->required();
  simulate->add_option("--eps", sf.eps, "uncached fraction")->required();
  simulate->add_option("--m", sf.m, "message length in bits")->required();
  simulate->add_option("--trials", sf.trials, "number of trials");
  simulate->add_option("--seed", sf.seed, "base seed; trial k uses seed+k");
  simulate->add_option("--cache-mode", sf.cache_mode,
                       "deterministic or bernoulli");
  simulate->add_flag("--allow-out-of-condition", sf.allow_out_of_condition,
                     "run the sum-rate scheme outside its conditions");
  simulate->add_flag("--mirror", mirror,
                     "swap user ids in the report (corner scheme)");
  simulate->add_option("--out", sf.out, "CSV path (JSON mirror alongside)");
  simulate->add_option("--config", sf.config,
                       "key=value file, overrides the flags above");

  CommonFlags wf;
  std::string w_dmin = "0.05", w_dmax = "0.45";
  int w_steps = 9;
  CLI::App* sweep =
      app.add_subcommand("sweep", "rate vs delta over a grid, skipping "
                                  "out-of-scope points");
  sweep->add_option("--scheme", wf.scheme, "sumrate or corner");
  sweep->add_option("--eps", wf.eps, "uncached fraction")->required();
  sweep->add_option("--m", wf.m, "message length in bits")->required();
  sweep->add_option("--trials", wf.trials, "trials per grid point");
  sweep->add_option("--seed", wf.seed, "base seed");
  sweep->add_option("--cache-mode", wf.cache_mode,
                    "deterministic or bernoulli");
  sweep->add_flag("--allow-out-of-condition", wf.allow_out_of_condition,
                  "keep grid points outside the sum-rate conditions");
  sweep->add_option("--delta-min", w_dmin, "grid start");
  sweep->add_option("--delta-max", w_dmax, "grid end");
  sweep->add_option("--delta-steps", w_steps, "grid points");
  sweep->add_option("--out", wf.out, "CSV path (JSON mirror alongside)");
  sweep->add_option("--config", wf.config,
                    "key=value file, overrides the flags above");

  int v_cases = 1000;
  std::uint64_t v_seed = 1;
  std::string v_out;
  CLI::App* verify = app.add_subcommand(
      "verify-entropy", "exhaustive leakage-inequality check on fuzzed "
                        "strategies");
  verify->add_option("--cases", v_cases, "number of fuzzed strategies");
  verify->add_option("--seed", v_seed, "fuzz seed");
  verify->add_option("--out", v_out, "JSON report path");

  std::string e_delta, e_eps, e_mlist = "1000,10000,100000", e_out;
  int e_trials = 200;
  std::uint64_t e_seed = 1;
  CLI::App* errprob = app.add_subcommand(
      "error-prob", "empirical error frequencies vs the analytic tail bound");
  errprob->add_option("--delta", e_delta, "erasure probability")->required();
  errprob->add_option("--eps", e_eps, "uncached fraction")->required();
  errprob->add_option("--m-list", e_mlist, "comma-separated block lengths");
  errprob->add_option("--trials", e_trials, "trials per block length (>=200)");
  errprob->add_option("--seed", e_seed, "base seed");
  errprob->add_option("--out", e_out, "CSV path (JSON mirror alongside)");

  std::string f_which, f_out;
  CLI::App* figure =
      app.add_subcommand("figure", "emit figure data (CSV, JSON mirror)");
  figure->add_option("--which", f_which, "fig2, fig3, fig5 or sec5c")
      ->required();
  figure->add_option("--out", f_out, "CSV path (JSON mirror alongside)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // malformed invocation is a parameter error
  }

  try {
    if (region->parsed()) return cmd_region(r_delta, r_eps, r_out);
    if (simulate->parsed()) return cmd_simulate(sf, mirror);
    if (sweep->parsed()) return cmd_sweep(wf, w_dmin, w_dmax, w_steps);
    if (verify->parsed()) return cmd_verify_entropy(v_cases, v_seed, v_out);
    if (errprob->parsed())
      return cmd_error_prob(e_delta, e_eps, e_mlist, e_trials, e_seed, e_out);
    if (figure->parsed()) return cmd_figure(f_which, f_out);
    return 2;
  } catch (const eic::param_error& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return 2;
  } catch (const eic::scope_error& e) {
    std::fprintf(stderr, "out of scope: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
}
