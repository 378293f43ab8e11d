#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "eic/errors.hpp"
#include "eic/params.hpp"
#include "eic/rational.hpp"

namespace eic {

struct RatePair {
  double r1 = 0.0;
  double r2 = 0.0;
};

// a1*r1 + a2*r2 <= c
struct HalfPlane {
  std::string label;
  double a1;
  double a2;
  double c;
};

struct RateRegion {
  std::vector<HalfPlane> halfplanes;  // all four bounds, redundant ones too
  std::vector<RatePair> vertices;     // counterclockwise, starting at (0,0)

  bool contains(RatePair p, double tol = 1e-9) const {
    if (p.r1 < -tol || p.r2 < -tol) return false;
    for (const HalfPlane& h : halfplanes)
      if (h.a1 * p.r1 + h.a2 * p.r2 > h.c + tol) return false;
    return true;
  }

  double area() const {
    double s = 0.0;
    std::size_t n = vertices.size();
    for (std::size_t k = 0; k < n; ++k) {
      const RatePair& a = vertices[k];
      const RatePair& b = vertices[(k + 1) % n];
      s += a.r1 * b.r2 - b.r1 * a.r2;
    }
    return 0.5 * s;
  }
};

// Weight of rate i in the cross bound involving the other receiver's ear.
inline double beta(const ChannelParams& cp, int i) {
  if (i < 1 || i > 2) throw contract_error("user index must be 1 or 2");
  if (cp.delta_tx(i) >= 1.0)
    throw scope_error("transmitter is never heard; cross bound degenerates");
  int o = 3 - i;
  return cp.eps(o) * (1.0 - cp.delta(o, i)) / (1.0 - cp.delta_tx(i));
}

namespace region_detail {

inline std::vector<RatePair> clip(const std::vector<RatePair>& poly,
                                  const HalfPlane& h) {
  std::vector<RatePair> out;
  std::size_t n = poly.size();
  for (std::size_t k = 0; k < n; ++k) {
    const RatePair& p = poly[k];
    const RatePair& q = poly[(k + 1) % n];
    double dp = h.a1 * p.r1 + h.a2 * p.r2 - h.c;
    double dq = h.a1 * q.r1 + h.a2 * q.r2 - h.c;
    if (dp <= 0.0) out.push_back(p);
    if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) {
      double t = dp / (dp - dq);
      out.push_back({p.r1 + t * (q.r1 - p.r1), p.r2 + t * (q.r2 - p.r2)});
    }
  }
  return out;
}

inline void dedup(std::vector<RatePair>& poly, double tol = 1e-12) {
  std::vector<RatePair> out;
  auto close = [tol](const RatePair& a, const RatePair& b) {
    return std::abs(a.r1 - b.r1) <= tol && std::abs(a.r2 - b.r2) <= tol;
  };
  for (const RatePair& p : poly)
    if (out.empty() || !close(out.back(), p)) out.push_back(p);
  while (out.size() > 1 && close(out.front(), out.back())) out.pop_back();
  poly = std::move(out);
}

inline void start_at_origin(std::vector<RatePair>& poly) {
  if (poly.empty()) return;
  auto it = std::min_element(poly.begin(), poly.end(),
                             [](const RatePair& a, const RatePair& b) {
                               if (a.r1 != b.r1) return a.r1 < b.r1;
                               return a.r2 < b.r2;
                             });
  std::rotate(poly.begin(), it, poly.end());
}

}  // namespace region_detail

// Intersection of the two individual bounds and the two weighted cross
// bounds, cut down to the nonnegative quadrant.
inline RateRegion outer_region(const ChannelParams& cp) {
  double b1 = beta(cp, 1);
  double b2 = beta(cp, 2);
  RateRegion rr;
  rr.halfplanes.push_back({"individual-1", 1.0, 0.0, 1.0 - cp.delta(1, 1)});
  rr.halfplanes.push_back({"individual-2", 0.0, 1.0, 1.0 - cp.delta(2, 2)});
  rr.halfplanes.push_back({"cross-1", b1, 1.0, 1.0 - cp.delta_rx(2)});
  rr.halfplanes.push_back({"cross-2", 1.0, b2, 1.0 - cp.delta_rx(1)});

  std::vector<RatePair> poly{{0.0, 0.0}, {2.0, 0.0}, {2.0, 2.0}, {0.0, 2.0}};
  for (const HalfPlane& h : rr.halfplanes)
    poly = region_detail::clip(poly, h);
  region_detail::dedup(poly);
  region_detail::start_at_origin(poly);
  rr.vertices = std::move(poly);
  return rr;
}

// Best symmetric point of the four-topology outer region. With a cache large
// enough to cut the square the argmax moves to the crossing of the two cross
// bounds; otherwise the square corner stands.
inline RatePair max_sum_rate_point(double delta, double eps) {
  detail::check_prob(delta, "delta");
  detail::check_prob(eps, "eps");
  if (eps >= delta * (1.0 + delta) - 1e-12) {
    double r = (1.0 + delta) * (1.0 - delta * delta) / (1.0 + delta + eps);
    return {r, r};
  }
  return {1.0 - delta, 1.0 - delta};
}

// Upper-left corner of the four-topology region: receiver 2 pinned at its
// individual bound, receiver 1 as high as the cross bound allows.
inline RatePair corner_point(double delta, double eps) {
  detail::check_prob(delta, "delta");
  detail::check_prob(eps, "eps");
  if (eps <= 0.0)
    throw scope_error("corner point needs a nonzero uncached fraction");
  if (eps < delta * (1.0 + delta) - 1e-12)
    throw scope_error("corner point lies outside the individual bound");
  return {delta * (1.0 + delta) * (1.0 - delta) / eps, 1.0 - delta};
}

// Cache large enough for the coded scheme to exhaust the sum-rate bound.
inline bool sum_capacity_condition(double delta, double eps) {
  detail::check_prob(delta, "delta");
  detail::check_prob(eps, "eps");
  if (delta > 0.5) return eps >= 1.0 - 1e-12;
  return eps * (2.0 - delta) >= (1.0 + delta) - 1e-12;
}

inline bool sum_capacity_condition(const Rat& delta, const Rat& eps) {
  if (delta < Rat{0} || delta > Rat{1} || eps < Rat{0} || eps > Rat{1})
    throw param_error("delta and eps must lie in [0,1]");
  if (delta > Rat{1, 2}) return eps == Rat{1};
  return eps * (Rat{2} - delta) >= Rat{1} + delta;
}

// Cache large enough to exhaust the whole region, corner included.
inline bool region_condition(double delta, double eps) {
  detail::check_prob(delta, "delta");
  detail::check_prob(eps, "eps");
  if (delta >= 1.0) throw scope_error("region condition needs delta < 1");
  return sum_capacity_condition(delta, eps) &&
         eps * (1.0 - delta) >= delta * (1.0 + delta) - 1e-12;
}

inline bool region_condition(const Rat& delta, const Rat& eps) {
  if (delta < Rat{0} || delta > Rat{1} || eps < Rat{0} || eps > Rat{1})
    throw param_error("delta and eps must lie in [0,1]");
  if (delta >= Rat{1}) throw scope_error("region condition needs delta < 1");
  return sum_capacity_condition(delta, eps) &&
         eps * (Rat{1} - delta) >= delta * (Rat{1} + delta);
}

inline double sum_rate_envelope(double delta, double eps) {
  detail::check_prob(delta, "delta");
  detail::check_prob(eps, "eps");
  double uncut = 2.0 * (1.0 - delta);
  double cut =
      2.0 * (1.0 + delta) * (1.0 - delta * delta) / (1.0 + delta + eps);
  return std::min(uncut, cut);
}

inline void write_region_csv(std::ostream& os, const RateRegion& rr) {
  char buf[192];
  os << "facet_label,a1,a2,c\n";
  for (const HalfPlane& h : rr.halfplanes) {
    std::snprintf(buf, sizeof buf, "%s,%.12g,%.12g,%.12g\n", h.label.c_str(),
                  h.a1, h.a2, h.c);
    os << buf;
  }
  os << "vertex_x,vertex_y\n";
  for (const RatePair& v : rr.vertices) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", v.r1, v.r2);
    os << buf;
  }
}

}  // namespace eic
