#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "eic/bench.hpp"
#include "eic/errors.hpp"
#include "eic/scheme_common.hpp"

namespace eic {

namespace config_detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double parse_plain(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size())
    throw param_error("malformed number: '" + std::string(s) + "'");
  return v;
}

}  // namespace config_detail

// Decimal or p/q fraction, e.g. "0.25", "1e-3", "2/3".
inline double parse_real(std::string_view s) {
  s = config_detail::trim(s);
  std::size_t slash = s.find('/');
  if (slash == std::string_view::npos) return config_detail::parse_plain(s);
  double num = config_detail::parse_plain(s.substr(0, slash));
  double den = config_detail::parse_plain(s.substr(slash + 1));
  if (den == 0.0) throw param_error("fraction with zero denominator");
  return num / den;
}

inline std::uint64_t parse_uint(std::string_view s) {
  s = config_detail::trim(s);
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size())
    throw param_error("malformed integer: '" + std::string(s) + "'");
  return v;
}

inline bool parse_bool(std::string_view s) {
  s = config_detail::trim(s);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw param_error("malformed boolean: '" + std::string(s) + "'");
}

inline Scheme scheme_from_name(std::string_view s) {
  s = config_detail::trim(s);
  if (s == "sumrate") return Scheme::sumrate;
  if (s == "corner") return Scheme::corner;
  throw param_error("unknown scheme: '" + std::string(s) + "'");
}

inline CacheMode cache_mode_from_name(std::string_view s) {
  s = config_detail::trim(s);
  if (s == "deterministic") return CacheMode::deterministic;
  if (s == "bernoulli") return CacheMode::bernoulli;
  throw param_error("unknown cache mode: '" + std::string(s) + "'");
}

// key=value lines with '#' comments; keys are the long flag names. Applied
// after flag parsing, so file entries take precedence over flags.
inline void apply_config(ExperimentConfig& cfg, std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = config_detail::trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw param_error("config line missing '=': '" + std::string(line) +
                        "'");
    std::string_view key = config_detail::trim(line.substr(0, eq));
    std::string_view value = config_detail::trim(line.substr(eq + 1));
    if (key == "scheme") {
      cfg.scheme = scheme_from_name(value);
    } else if (key == "delta") {
      cfg.delta = parse_real(value);
    } else if (key == "eps") {
      cfg.eps = parse_real(value);
    } else if (key == "m") {
      cfg.m = std::size_t(parse_uint(value));
    } else if (key == "trials") {
      cfg.trials = int(parse_uint(value));
    } else if (key == "seed") {
      cfg.seed0 = parse_uint(value);
    } else if (key == "cache-mode") {
      cfg.cache_mode = cache_mode_from_name(value);
    } else if (key == "allow-out-of-condition") {
      cfg.allow_out_of_condition = parse_bool(value);
    } else if (key == "out") {
      cfg.out = std::string(value);
    } else {
      throw param_error("unknown config key: '" + std::string(key) + "'");
    }
  }
}

}  // namespace eic
