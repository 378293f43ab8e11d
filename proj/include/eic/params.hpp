#pragma once

#include <array>
#include <cmath>
#include <string>

#include "eic/errors.hpp"

namespace eic {

// Link gain state of one slot, packed as s = g11<<3 | g12<<2 | g21<<1 | g22.
constexpr int state_index(int g11, int g12, int g21, int g22) {
  return (g11 << 3) | (g12 << 2) | (g21 << 1) | g22;
}

constexpr int state_A = state_index(1, 1, 1, 1);  // fully connected
constexpr int state_B = state_index(0, 1, 1, 0);  // cross links only
constexpr int state_C = state_index(1, 0, 0, 1);  // direct links only
constexpr int state_D = state_index(0, 0, 0, 0);  // silent

// Receiver i, transmitter j, both 1-based.
constexpr bool link_on(int s, int i, int j) {
  int shift = (i == 1) ? (j == 1 ? 3 : 2) : (j == 1 ? 1 : 0);
  return (s >> shift) & 1;
}

namespace detail {
inline void check_prob(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw param_error(std::string(name) + " must lie in [0,1]");
}
}  // namespace detail

// Joint distribution of the four link gains within one slot.
class JointLinkPmf {
 public:
  explicit JointLinkPmf(const std::array<double, 16>& p) : p_(p) {
    double sum = 0.0;
    for (double v : p_) {
      if (!(v >= 0.0)) throw param_error("pmf entries must be non-negative");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw param_error("pmf must sum to 1");
  }

  double operator[](int s) const { return p_[std::size_t(s)]; }
  const std::array<double, 16>& values() const { return p_; }

 private:
  std::array<double, 16> p_;
};

struct Marginals {
  std::array<std::array<double, 2>, 2> delta{};  // [i-1][j-1]: link i<-j erased
  std::array<double, 2> delta_rx{};              // both links into rx i erased
  std::array<double, 2> delta_tx{};              // both links out of tx j erased
};

inline Marginals derive_marginals(const JointLinkPmf& pmf) {
  Marginals m{};
  for (int s = 0; s < 16; ++s) {
    double p = pmf[s];
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j)
        if (!link_on(s, i, j)) m.delta[i - 1][j - 1] += p;
    for (int i = 1; i <= 2; ++i)
      if (!link_on(s, i, 1) && !link_on(s, i, 2)) m.delta_rx[i - 1] += p;
    for (int j = 1; j <= 2; ++j)
      if (!link_on(s, 1, j) && !link_on(s, 2, j)) m.delta_tx[j - 1] += p;
  }
  return m;
}

// Full channel description: joint link pmf plus the cache parameters.
// eps[i] belongs to receiver i, which holds a (1 - eps[i]) fraction of the
// OTHER receiver's message as side information. Immutable once built.
class ChannelParams {
 public:
  static ChannelParams independent(double d11, double d12, double d21,
                                   double d22, double eps1, double eps2) {
    detail::check_prob(d11, "delta11");
    detail::check_prob(d12, "delta12");
    detail::check_prob(d21, "delta21");
    detail::check_prob(d22, "delta22");
    const double d[2][2] = {{d11, d12}, {d21, d22}};
    std::array<double, 16> p{};
    for (int s = 0; s < 16; ++s) {
      double v = 1.0;
      for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j)
          v *= link_on(s, i, j) ? 1.0 - d[i - 1][j - 1] : d[i - 1][j - 1];
      p[std::size_t(s)] = v;
    }
    return ChannelParams(JointLinkPmf(p), eps1, eps2);
  }

  // Both direct links share one gain, both cross links share the other;
  // the slot is always in one of the four named states.
  static ChannelParams four_topology(double delta, double eps1, double eps2) {
    detail::check_prob(delta, "delta");
    std::array<double, 16> p{};
    p[state_A] = (1.0 - delta) * (1.0 - delta);
    p[state_B] = delta * (1.0 - delta);
    p[state_C] = delta * (1.0 - delta);
    p[state_D] = delta * delta;
    return ChannelParams(JointLinkPmf(p), eps1, eps2);
  }

  static ChannelParams joint(const JointLinkPmf& pmf, double eps1,
                             double eps2) {
    return ChannelParams(pmf, eps1, eps2);
  }

  // Deserialization path: the caller supplies the derived marginals as
  // stored and we verify them against the pmf.
  static ChannelParams from_parts(const JointLinkPmf& pmf,
                                  const std::array<std::array<double, 2>, 2>& delta,
                                  const std::array<double, 2>& delta_rx,
                                  const std::array<double, 2>& delta_tx,
                                  const std::array<double, 2>& eps) {
    ChannelParams cp(pmf, eps[0], eps[1]);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j)
        if (std::abs(delta[i][j] - cp.marg_.delta[i][j]) > 1e-12)
          throw param_error("stored delta disagrees with the pmf");
      if (std::abs(delta_rx[i] - cp.marg_.delta_rx[i]) > 1e-12)
        throw param_error("stored delta_rx disagrees with the pmf");
      if (std::abs(delta_tx[i] - cp.marg_.delta_tx[i]) > 1e-12)
        throw param_error("stored delta_tx disagrees with the pmf");
    }
    return cp;
  }

  const JointLinkPmf& pmf() const { return pmf_; }
  double p_state(int s) const {
    if (s < 0 || s > 15) throw contract_error("state index out of range");
    return pmf_[s];
  }

  double delta(int i, int j) const { return marg_.delta[check(i)][check(j)]; }
  double delta_rx(int i) const { return marg_.delta_rx[check(i)]; }
  double delta_tx(int j) const { return marg_.delta_tx[check(j)]; }
  double eps(int i) const { return eps_[check(i)]; }

  bool is_four_topology() const {
    double other = 0.0;
    for (int s = 0; s < 16; ++s) {
      if (s == state_A || s == state_B || s == state_C || s == state_D) continue;
      other += pmf_[s];
    }
    return other == 0.0;
  }

  // Self-check: stored marginals must match a fresh derivation and respect
  // the Frechet bounds max(0, d_i1 + d_i2 - 1) <= delta_rx_i <= min(d_i1, d_i2).
  void validate() const {
    Marginals m = derive_marginals(pmf_);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j)
        if (std::abs(m.delta[i][j] - marg_.delta[i][j]) > 1e-12)
          throw param_error("delta drifted from the pmf");
      if (std::abs(m.delta_rx[i] - marg_.delta_rx[i]) > 1e-12)
        throw param_error("delta_rx drifted from the pmf");
      if (std::abs(m.delta_tx[i] - marg_.delta_tx[i]) > 1e-12)
        throw param_error("delta_tx drifted from the pmf");
      if (marg_.delta_rx[i] >
          std::min(marg_.delta[i][0], marg_.delta[i][1]) + 1e-12)
        throw param_error("delta_rx exceeds a link marginal");
      if (marg_.delta_rx[i] <
          marg_.delta[i][0] + marg_.delta[i][1] - 1.0 - 1e-12)
        throw param_error("delta_rx below the Frechet lower bound");
      detail::check_prob(eps_[i], "eps");
    }
  }

 private:
  ChannelParams(JointLinkPmf pmf, double eps1, double eps2)
      : pmf_(pmf), marg_(derive_marginals(pmf_)), eps_{eps1, eps2} {
    detail::check_prob(eps1, "eps1");
    detail::check_prob(eps2, "eps2");
  }

  static std::size_t check(int i) {
    if (i < 1 || i > 2) throw contract_error("user index must be 1 or 2");
    return std::size_t(i - 1);
  }

  JointLinkPmf pmf_;
  Marginals marg_;
  std::array<double, 2> eps_;
};

// Symmetric four-topology operating point (same delta on every link, same
// cache fraction at both receivers).
struct FourTopologyParams {
  double delta;
  double eps;

  ChannelParams to_channel() const {
    return ChannelParams::four_topology(delta, eps, eps);
  }
};

}  // namespace eic
