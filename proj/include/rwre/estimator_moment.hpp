#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rwre/errors.hpp"
#include "rwre/rwre_sim.hpp"

namespace rwre {

// Counts of next moves keyed by site history h = (h_minus, h_plus): how many
// moves happened from a site that had already made h_minus left and h_plus
// right steps, split by the direction of that move.
class HistoryStats {
 public:
  void add(int h_left, int h_right, signed char move) {
    auto& c = counts_[pack(h_left, h_right)];
    if (move < 0)
      ++c.first;
    else
      ++c.second;
    ++total_;
  }

  long long count_left(int h_left, int h_right) const {
    const auto it = counts_.find(pack(h_left, h_right));
    return it == counts_.end() ? 0 : it->second.first;
  }
  long long count_right(int h_left, int h_right) const {
    const auto it = counts_.find(pack(h_left, h_right));
    return it == counts_.end() ? 0 : it->second.second;
  }
  long long m(int h_left, int h_right) const {
    return count_left(h_left, h_right) + count_right(h_left, h_right);
  }
  long long total() const { return total_; }

  // (h_minus, h_plus) keys in lexicographic order.
  std::vector<std::pair<int, int>> histories() const {
    std::vector<std::pair<int, int>> keys;
    keys.reserve(counts_.size());
    for (const auto& [k, v] : counts_)
      keys.emplace_back(static_cast<int>(k >> 32), static_cast<int>(k & 0xFFFFFFFFull));
    std::sort(keys.begin(), keys.end());
    return keys;
  }

 private:
  static std::uint64_t pack(int l, int r) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(l)) << 32) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(r));
  }
  std::unordered_map<std::uint64_t, std::pair<long long, long long>> counts_;
  long long total_ = 0;
};

// Replays each site's move list; before a site's i-th move the history is
// the tally of its earlier moves, and the i-th move is recorded under it.
inline HistoryStats history_stats(const HistoryLog& log) {
  HistoryStats stats;
  for (const auto& site_moves : log.moves) {
    int h_left = 0, h_right = 0;
    for (signed char mv : site_moves) {
      stats.add(h_left, h_right, mv);
      if (mv < 0)
        ++h_left;
      else
        ++h_right;
    }
  }
  return stats;
}

struct VHat {
  double value = 0.0;
  long long m = 0;
};

// V-hat_eps(h): proportion of history-h moves in direction eps (+1 or -1).
inline VHat v_hat(const HistoryStats& stats, int h_left, int h_right, int eps) {
  const long long cl = stats.count_left(h_left, h_right);
  const long long cr = stats.count_right(h_left, h_right);
  const long long m = cl + cr;
  if (m == 0) throw EmptyHistory("v_hat: no moves with the requested history");
  return VHat{static_cast<double>(eps > 0 ? cr : cl) / static_cast<double>(m), m};
}

struct MomentResult {
  struct Used {
    int h_left = 0;
    int h_right = 0;
    int eps = 0;
    double value = 0.0;
    long long m = 0;
  };
  std::vector<double> theta_tilde;
  std::vector<Used> v_hats_used;
  bool invertible = false;
  bool clamped = false;
};

// p-tilde = (a2 - Vhat_1(0,0)) / (a2 - a1), clamped into [0,1].
inline MomentResult invert_two_point_known(const HistoryStats& stats, double a1, double a2) {
  const VHat v = v_hat(stats, 0, 0, +1);
  MomentResult r;
  r.v_hats_used.push_back({0, 0, +1, v.value, v.m});
  double p = (a2 - v.value) / (a2 - a1);
  if (p < 0.0 || p > 1.0) {
    p = std::clamp(p, 0.0, 1.0);
    r.clamped = true;
  }
  r.theta_tilde = {p};
  r.invertible = true;
  return r;
}

// Inversion of u = beta/(alpha+beta), v = (beta+1)/(alpha+beta+1):
// s = (1-v)/(v-u) recovers alpha+beta, then alpha = (1-u)s, beta = u s.
inline bool invert_beta_moments(double u, double v, double& alpha, double& beta) {
  alpha = std::numeric_limits<double>::quiet_NaN();
  beta = std::numeric_limits<double>::quiet_NaN();
  if (!(v > u)) return false;
  const double s = (1.0 - v) / (v - u);
  const double a = (1.0 - u) * s;
  const double b = u * s;
  if (!(a > 0.0) || !(b > 0.0)) return false;
  alpha = a;
  beta = b;
  return true;
}

inline MomentResult invert_beta(const HistoryStats& stats) {
  const VHat u = v_hat(stats, 0, 0, -1);
  const VHat v = v_hat(stats, 1, 0, -1);
  MomentResult r;
  r.v_hats_used.push_back({0, 0, -1, u.value, u.m});
  r.v_hats_used.push_back({1, 0, -1, v.value, v.m});
  double alpha, beta;
  r.invertible = invert_beta_moments(u.value, v.value, alpha, beta);
  r.theta_tilde = {alpha, beta};
  return r;
}

// Forward map of the two-point-free moment system: V_1(0,0) and the two
// ratios of consecutive raw moments m_k = p a1^k + (1-p) a2^k.
inline std::array<double, 3> forward_moments_two_point_free(double p, double a1, double a2) {
  const double q = 1.0 - p;
  const double m1 = p * a1 + q * a2;
  const double m2 = p * a1 * a1 + q * a2 * a2;
  const double m3 = p * a1 * a1 * a1 + q * a2 * a2 * a2;
  return {m1, m2 / m1, m3 / m2};
}

}  // namespace rwre
