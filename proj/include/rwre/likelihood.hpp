#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rwre/env_model.hpp"
#include "rwre/rwre_sim.hpp"
#include "rwre/special_functions.hpp"

namespace rwre {

// phi_theta(x,y) = log integral a^{x+1} (1-a)^y d nu_theta(a), evaluated in
// log domain. Per-theta constants are precomputed so a Criterion sweep pays
// them once.
class PhiEval {
 public:
  PhiEval(const FamilyShape& shape, std::span<const double> theta) : kind_(shape.kind) {
    if (static_cast<int>(theta.size()) != shape.dim())
      throw std::domain_error("phi: theta dimension mismatch");
    switch (kind_) {
      case FamilyKind::two_point_known:
      case FamilyKind::two_point_free: {
        const double p = theta[0];
        const double a1 = kind_ == FamilyKind::two_point_known ? shape.a1 : theta[1];
        const double a2 = kind_ == FamilyKind::two_point_known ? shape.a2 : theta[2];
        if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("phi: p must lie in [0,1]");
        if (!(a1 > 0.0 && a1 < 1.0 && a2 > 0.0 && a2 < 1.0))
          throw std::domain_error("phi: support points must lie in (0,1)");
        log_w1_ = std::log(p);
        log_w2_ = std::log1p(-p);
        log_a1_ = std::log(a1);
        log_1ma1_ = std::log1p(-a1);
        log_a2_ = std::log(a2);
        log_1ma2_ = std::log1p(-a2);
        break;
      }
      case FamilyKind::beta: {
        alpha_ = theta[0];
        beta_ = theta[1];
        if (!(alpha_ > 0.0 && beta_ > 0.0))
          throw std::domain_error("phi: alpha, beta must be > 0");
        log_beta_ab_ = log_beta(alpha_, beta_);
        break;
      }
    }
  }

  double operator()(long long x, long long y) const {
    switch (kind_) {
      case FamilyKind::two_point_known:
      case FamilyKind::two_point_free: {
        const double xp1 = static_cast<double>(x) + 1.0;
        const double yd = static_cast<double>(y);
        const double t1 = log_w1_ + xp1 * log_a1_ + yd * log_1ma1_;
        const double t2 = log_w2_ + xp1 * log_a2_ + yd * log_1ma2_;
        return log_sum_exp(t1, t2);
      }
      case FamilyKind::beta: {
        const double xp1 = static_cast<double>(x) + 1.0;
        const double yd = static_cast<double>(y);
        return log_gamma(xp1 + alpha_) + log_gamma(yd + beta_) -
               log_gamma(xp1 + yd + alpha_ + beta_) - log_beta_ab_;
      }
    }
    return 0.0;
  }

 private:
  FamilyKind kind_;
  double log_w1_ = 0, log_w2_ = 0, log_a1_ = 0, log_1ma1_ = 0, log_a2_ = 0, log_1ma2_ = 0;
  double alpha_ = 0, beta_ = 0, log_beta_ab_ = 0;
};

inline double phi(const FamilyShape& shape, std::span<const double> theta, long long x,
                  long long y) {
  return PhiEval(shape, theta)(x, y);
}

// Criterion ell_n(theta) = sum_x phi_theta(L_{x+1}, L_x). Pairs repeat
// heavily (stationary L values are small), so evaluation runs over the
// distinct-pair multiset.
class Criterion {
 public:
  Criterion(FamilyShape shape, std::vector<std::pair<long long, long long>> pairs)
      : shape_(shape), pairs_(std::move(pairs)) {
    std::unordered_map<std::uint64_t, long long> freq;
    freq.reserve(pairs_.size());
    for (const auto& [x, y] : pairs_) ++freq[pack(x, y)];
    distinct_.reserve(freq.size());
    for (const auto& [key, count] : freq)
      distinct_.push_back({static_cast<long long>(key >> 32),
                           static_cast<long long>(key & 0xFFFFFFFFULL), count});
    std::sort(distinct_.begin(), distinct_.end());
  }

  static Criterion from_counts(const FamilyShape& shape, const StepCounts& counts) {
    return Criterion(shape, left_step_vector(counts));
  }

  double value(std::span<const double> theta) const {
    if (pairs_.empty()) return 0.0;
    const PhiEval f(shape_, theta);
    double sum = 0.0;
    for (const auto& [x, y, count] : distinct_) sum += static_cast<double>(count) * f(x, y);
    return sum;
  }

  double operator()(std::span<const double> theta) const { return value(theta); }

  long long n() const { return static_cast<long long>(pairs_.size()); }
  const std::vector<std::pair<long long, long long>>& pairs() const { return pairs_; }
  const FamilyShape& shape() const { return shape_; }

 private:
  static std::uint64_t pack(long long x, long long y) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(y));
  }

  FamilyShape shape_;
  std::vector<std::pair<long long, long long>> pairs_;
  std::vector<std::array<long long, 3>> distinct_;  // x, y, multiplicity
};

struct LimitEstimate {
  std::vector<double> theta;
  double value = 0.0;
  double stderr_ = 0.0;
  long long n_used = 0;
};

}  // namespace rwre
