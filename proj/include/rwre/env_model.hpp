#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rwre/errors.hpp"
#include "rwre/rng.hpp"
#include "rwre/special_functions.hpp"

namespace rwre {

inline constexpr double kRecurrenceTol = 1e-12;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class FamilyKind { two_point_known, two_point_free, beta };

inline const char* family_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::two_point_known: return "two_point_known";
    case FamilyKind::two_point_free: return "two_point_free";
    case FamilyKind::beta: return "beta";
  }
  return "?";
}

// Which phi form applies and, for the known-support family, the fixed
// support points. Parameters stay free; see EnvFamily for a concrete theta.
struct FamilyShape {
  FamilyKind kind = FamilyKind::two_point_known;
  double a1 = 0.0;  // fixed support, two_point_known only
  double a2 = 0.0;

  int dim() const {
    switch (kind) {
      case FamilyKind::two_point_known: return 1;
      case FamilyKind::two_point_free: return 3;
      case FamilyKind::beta: return 2;
    }
    return 0;
  }

  const char* param_name(int i) const {
    static const char* two_known[] = {"p"};
    static const char* two_free[] = {"p", "a1", "a2"};
    static const char* beta_names[] = {"alpha", "beta"};
    switch (kind) {
      case FamilyKind::two_point_known: return two_known[i];
      case FamilyKind::two_point_free: return two_free[i];
      case FamilyKind::beta: return beta_names[i];
    }
    return "?";
  }
};

// Compact axis-aligned parameter box, optionally intersected with an extra
// feasibility constraint (used by the Beta family's alpha > beta + 1 region).
struct ThetaBox {
  std::vector<std::array<double, 2>> iv;
  std::function<bool(std::span<const double>)> feasible;

  std::size_t dim() const { return iv.size(); }
  double lo(std::size_t i) const { return iv[i][0]; }
  double hi(std::size_t i) const { return iv[i][1]; }
  double width(std::size_t i) const { return iv[i][1] - iv[i][0]; }

  bool contains(std::span<const double> theta, double tol = 0.0) const {
    if (theta.size() != iv.size()) return false;
    for (std::size_t i = 0; i < iv.size(); ++i) {
      if (theta[i] < iv[i][0] - tol || theta[i] > iv[i][1] + tol) return false;
    }
    return true;
  }

  bool admissible(std::span<const double> theta) const {
    return contains(theta) && (!feasible || feasible(theta));
  }
};

inline ThetaBox default_theta_box(FamilyKind kind) {
  ThetaBox box;
  switch (kind) {
    case FamilyKind::two_point_known:
      box.iv = {{1e-3, 1.0 - 1e-3}};
      break;
    case FamilyKind::two_point_free:
      // Disjoint a1/a2 intervals keep a1 < a2 structural.
      box.iv = {{1e-3, 1.0 - 1e-3}, {0.05, 0.55}, {0.55 + 1e-3, 0.95}};
      break;
    case FamilyKind::beta:
      box.iv = {{1.2, 12.0}, {0.05, 3.0}};
      box.feasible = [](std::span<const double> t) { return t[0] >= t[1] + 1.0 + 1e-3; };
      break;
  }
  return box;
}

// Parametric environment law nu_theta together with its parameter box.
struct EnvFamily {
  FamilyShape shape;
  std::vector<double> theta;
  ThetaBox box;

  FamilyKind kind() const { return shape.kind; }

  double p() const { return theta[0]; }
  double a1() const {
    return shape.kind == FamilyKind::two_point_known ? shape.a1 : theta[1];
  }
  double a2() const {
    return shape.kind == FamilyKind::two_point_known ? shape.a2 : theta[2];
  }
  double alpha() const { return theta[0]; }
  double beta_par() const { return theta[1]; }

  void validate() const {
    if (static_cast<int>(theta.size()) != shape.dim())
      throw std::invalid_argument("EnvFamily: theta dimension mismatch");
    if (box.iv.size() != theta.size())
      throw std::invalid_argument("EnvFamily: box dimension mismatch");
    switch (shape.kind) {
      case FamilyKind::two_point_known:
      case FamilyKind::two_point_free: {
        const double lo = a1(), hi = a2();
        if (!(lo > 0.0 && lo < 1.0 && hi > 0.0 && hi < 1.0))
          throw std::invalid_argument("EnvFamily: support points must lie in (0,1)");
        if (lo > hi) throw std::invalid_argument("EnvFamily: requires a1 <= a2");
        if (!(p() >= 0.0 && p() <= 1.0))
          throw std::invalid_argument("EnvFamily: p must lie in [0,1]");
        break;
      }
      case FamilyKind::beta:
        if (!(alpha() > 0.0 && beta_par() > 0.0))
          throw std::invalid_argument("EnvFamily: alpha, beta must be > 0");
        break;
    }
    if (!box.contains(theta))
      throw std::invalid_argument("EnvFamily: theta outside theta_box");
    if (box.feasible && !box.feasible(theta))
      throw std::invalid_argument("EnvFamily: theta violates box feasibility region");
  }
};

inline EnvFamily make_two_point_known(double a1, double a2, double p, ThetaBox box = {}) {
  EnvFamily f;
  f.shape = {FamilyKind::two_point_known, a1, a2};
  f.theta = {p};
  f.box = box.iv.empty() ? default_theta_box(f.shape.kind) : std::move(box);
  f.validate();
  return f;
}

inline EnvFamily make_two_point_free(double p, double a1, double a2, ThetaBox box = {}) {
  EnvFamily f;
  f.shape = {FamilyKind::two_point_free, 0.0, 0.0};
  f.theta = {p, a1, a2};
  f.box = box.iv.empty() ? default_theta_box(f.shape.kind) : std::move(box);
  f.validate();
  return f;
}

inline EnvFamily make_beta(double alpha, double beta, ThetaBox box = {}) {
  EnvFamily f;
  f.shape = {FamilyKind::beta, 0.0, 0.0};
  f.theta = {alpha, beta};
  f.box = box.iv.empty() ? default_theta_box(f.shape.kind) : std::move(box);
  f.validate();
  return f;
}

// A realized environment {omega_x} over the site interval [x_min, x_max].
class Environment {
 public:
  Environment(int x_min, std::vector<double> omega)
      : x_min_(x_min), omega_(std::move(omega)) {
    if (omega_.empty()) throw std::invalid_argument("Environment: empty site range");
    if (x_min_ > 0) throw std::invalid_argument("Environment: x_min must be <= 0");
    for (double w : omega_) {
      if (!(w > 0.0 && w < 1.0))
        throw std::invalid_argument("Environment: omega values must lie strictly in (0,1)");
    }
  }

  int x_min() const { return x_min_; }
  int x_max() const { return x_min_ + static_cast<int>(omega_.size()) - 1; }
  std::size_t size() const { return omega_.size(); }

  double omega_at(int x) const {
    const long idx = static_cast<long>(x) - x_min_;
    if (idx < 0 || idx >= static_cast<long>(omega_.size()))
      throw std::out_of_range("Environment: site outside sampled range");
    return omega_[static_cast<std::size_t>(idx)];
  }

  double rho_at(int x) const {
    const double w = omega_at(x);
    return (1.0 - w) / w;
  }

  const std::vector<double>& omega() const { return omega_; }

  bool operator==(const Environment& other) const {
    return x_min_ == other.x_min_ && omega_ == other.omega_;
  }

 private:
  int x_min_;
  std::vector<double> omega_;
};

struct Regime {
  enum class Tag { transient_right_ballistic, transient_right_subballistic, recurrent, transient_left };
  Tag tag = Tag::recurrent;
  double e_log_rho = 0.0;
  double e_rho = 0.0;  // may be +inf

  bool ballistic() const { return tag == Tag::transient_right_ballistic; }
};

inline const char* regime_name(Regime::Tag t) {
  switch (t) {
    case Regime::Tag::transient_right_ballistic: return "transient_right_ballistic";
    case Regime::Tag::transient_right_subballistic: return "transient_right_subballistic";
    case Regime::Tag::recurrent: return "recurrent";
    case Regime::Tag::transient_left: return "transient_left";
  }
  return "?";
}

// E^theta[log rho_0], analytic per family.
inline double log_rho_mean(const EnvFamily& f) {
  switch (f.kind()) {
    case FamilyKind::two_point_known:
    case FamilyKind::two_point_free: {
      const double r1 = std::log((1.0 - f.a1()) / f.a1());
      const double r2 = std::log((1.0 - f.a2()) / f.a2());
      return f.p() * r1 + (1.0 - f.p()) * r2;
    }
    case FamilyKind::beta:
      return digamma(f.beta_par()) - digamma(f.alpha());
  }
  return 0.0;
}

// E^theta[rho_0]; +inf for Beta with alpha <= 1.
inline double rho_mean(const EnvFamily& f) {
  switch (f.kind()) {
    case FamilyKind::two_point_known:
    case FamilyKind::two_point_free: {
      const double r1 = (1.0 - f.a1()) / f.a1();
      const double r2 = (1.0 - f.a2()) / f.a2();
      return f.p() * r1 + (1.0 - f.p()) * r2;
    }
    case FamilyKind::beta:
      if (f.alpha() <= 1.0) return kInfinity;
      return f.beta_par() / (f.alpha() - 1.0);
  }
  return 0.0;
}

inline Regime classify_regime(const EnvFamily& f) {
  Regime r;
  r.e_log_rho = log_rho_mean(f);
  r.e_rho = rho_mean(f);
  if (std::fabs(r.e_log_rho) < kRecurrenceTol) {
    r.tag = Regime::Tag::recurrent;
  } else if (r.e_log_rho < 0.0) {
    r.tag = r.e_rho < 1.0 ? Regime::Tag::transient_right_ballistic
                          : Regime::Tag::transient_right_subballistic;
  } else {
    r.tag = Regime::Tag::transient_left;
  }
  return r;
}

// Almost-sure limit of T_n/n in the ballistic regime: (1+E rho)/(1-E rho).
inline double hitting_time_limit(const EnvFamily& f) {
  const Regime r = classify_regime(f);
  if (!r.ballistic())
    throw RegimeError(std::string("hitting_time_limit: family is ") + regime_name(r.tag) +
                      ", needs transient_right_ballistic");
  return (1.0 + r.e_rho) / (1.0 - r.e_rho);
}

// One draw from nu_theta, clamped away from the endpoints of (0,1).
inline double sample_omega(const EnvFamily& f, Rng& rng) {
  switch (f.kind()) {
    case FamilyKind::two_point_known:
    case FamilyKind::two_point_free:
      return rng.bernoulli(f.p()) ? f.a1() : f.a2();
    case FamilyKind::beta: {
      double w = rng.beta(f.alpha(), f.beta_par());
      if (w < 1e-15) w = 1e-15;
      if (w > 1.0 - 1e-15) w = 1.0 - 1e-15;
      return w;
    }
  }
  return 0.5;
}

// I.i.d. environment over [x_min, x_max], sites filled in ascending order.
inline Environment sample_env(const EnvFamily& f, int x_min, int x_max, Rng& rng) {
  if (x_min > 0 || x_max < 1)
    throw std::invalid_argument("sample_env: interval must contain [0, 1]");
  std::vector<double> omega;
  omega.reserve(static_cast<std::size_t>(x_max - x_min + 1));
  for (int x = x_min; x <= x_max; ++x) omega.push_back(sample_omega(f, rng));
  return Environment(x_min, std::move(omega));
}

}  // namespace rwre
