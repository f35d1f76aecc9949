#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rwre/env_model.hpp"
#include "rwre/errors.hpp"
#include "rwre/likelihood.hpp"
#include "rwre/rng.hpp"
#include "rwre/special_functions.hpp"

namespace rwre {

inline constexpr long long kDefaultPopulationCap = 10'000'000LL;
inline constexpr double kDefaultSeriesTol = 1e-12;
inline constexpr long long kDefaultPiSamples = 100'000LL;

// log Q_theta(x,y) = log C(x+y,x) + phi_theta(x,y), all in log domain.
inline double log_kernel(const FamilyShape& shape, std::span<const double> theta, long long x,
                         long long y) {
  if (x < 0 || y < 0) throw std::domain_error("log_kernel: x,y must be >= 0");
  return log_binomial(x + y, x) + phi(shape, theta, x, y);
}

inline double log_kernel(const EnvFamily& f, long long x, long long y) {
  return log_kernel(f.shape, f.theta, x, y);
}

namespace detail {

// One offspring generation: z parents plus the immigrant, geometric(omega)
// offspring each. Small totals draw one geometric per individual by
// inversion; large totals use the exact negative-binomial representation
// NB(r, omega) = Poisson(Gamma(r) * (1-omega)/omega) so sub-ballistic spikes
// stay O(1) per generation.
inline long long offspring_generation(long long z, double omega, Rng& rng) {
  const long long r = z + 1;
  if (r <= 256) {
    long long sum = 0;
    for (long long i = 0; i < r; ++i) sum += rng.geometric(omega);
    return sum;
  }
  const double scale = (1.0 - omega) / omega;
  const double lambda = rng.gamma(static_cast<double>(r)) * scale;
  return rng.poisson(lambda);
}

}  // namespace detail

// Annealed immigration branching chain Z_0..Z_n; the environment is drawn
// internally from nu_theta, one value per generation.
inline std::vector<long long> simulate(const EnvFamily& f, long n, Rng& rng,
                                       long long population_cap = kDefaultPopulationCap) {
  if (n < 0) throw std::invalid_argument("simulate: n must be >= 0");
  std::vector<long long> z(static_cast<std::size_t>(n) + 1);
  z[0] = 0;
  for (long k = 0; k < n; ++k) {
    const double omega = sample_omega(f, rng);
    const long long next = detail::offspring_generation(z[static_cast<std::size_t>(k)], omega, rng);
    if (next > population_cap)
      throw PopulationExplosion("simulate: generation exceeded population cap");
    z[static_cast<std::size_t>(k) + 1] = next;
  }
  return z;
}

// Quenched variant on a fixed environment slice omega_1..omega_n.
inline std::vector<long long> simulate_quenched(std::span<const double> omega, Rng& rng,
                                                long long population_cap = kDefaultPopulationCap) {
  std::vector<long long> z(omega.size() + 1);
  z[0] = 0;
  for (std::size_t k = 0; k < omega.size(); ++k) {
    const long long next = detail::offspring_generation(z[k], omega[k], rng);
    if (next > population_cap)
      throw PopulationExplosion("simulate_quenched: generation exceeded population cap");
    z[k + 1] = next;
  }
  return z;
}

// Sum of the geometric mean series: E rho/(1-E rho), +inf outside ballistic.
inline double stationary_mean(const EnvFamily& f) {
  const double er = rho_mean(f);
  if (er >= 1.0) return kInfinity;
  return er / (1.0 - er);
}

// Monte Carlo estimate of pi_theta(k) = E[S(1-S)^k] for k <= k_max, with the
// per-sample exact mean (1-S)/S and truncated tail masses alongside.
struct StationaryLaw {
  std::vector<double> pi;
  std::vector<double> se;
  std::vector<double> tail_mass;  // estimate of sum_{j>k} pi(j)
  double mean = 0.0;
  double mean_se = 0.0;
  long long mc_samples = 0;
  double series_tol = 0.0;
};

// Draws S per sample by accumulating 1 + rho_1 + rho_1 rho_2 + ... until the
// running product drops below series_tol. A product that fails to shrink
// within the step cap signals a non-transient family.
inline StationaryLaw stationary_pi(const EnvFamily& f, int k_max, long long mc_samples,
                                   double series_tol, Rng& rng) {
  if (k_max < 0) throw std::invalid_argument("stationary_pi: k_max must be >= 0");
  if (mc_samples <= 1) throw std::invalid_argument("stationary_pi: mc_samples must be > 1");
  if (!(series_tol > 0.0 && series_tol < 1.0))
    throw std::invalid_argument("stationary_pi: series_tol must be in (0,1)");
  constexpr long long kSeriesStepCap = 10'000'000LL;

  const std::size_t nk = static_cast<std::size_t>(k_max) + 1;
  std::vector<double> sum(nk, 0.0), sum_sq(nk, 0.0), tail_sum(nk, 0.0);
  double mean_sum = 0.0, mean_sum_sq = 0.0;

  for (long long i = 0; i < mc_samples; ++i) {
    double inv_s = 1.0;
    double prod = 1.0;
    long long steps = 0;
    while (prod >= series_tol) {
      const double w = sample_omega(f, rng);
      prod *= (1.0 - w) / w;
      inv_s += prod;
      if (!std::isfinite(inv_s) || ++steps > kSeriesStepCap)
        throw SeriesDivergence("stationary_pi: rho-product series does not shrink");
    }
    const double s = 1.0 / inv_s;
    const double q = 1.0 - s;
    double pw = 1.0;  // q^k
    for (std::size_t k = 0; k < nk; ++k) {
      const double v = s * pw;
      sum[k] += v;
      sum_sq[k] += v * v;
      pw *= q;
      tail_sum[k] += pw;  // q^{k+1}
    }
    const double m = inv_s - 1.0;  // exact per-sample mean of geometric(S)
    mean_sum += m;
    mean_sum_sq += m * m;
  }

  StationaryLaw law;
  law.mc_samples = mc_samples;
  law.series_tol = series_tol;
  law.pi.resize(nk);
  law.se.resize(nk);
  law.tail_mass.resize(nk);
  const double n = static_cast<double>(mc_samples);
  for (std::size_t k = 0; k < nk; ++k) {
    law.pi[k] = sum[k] / n;
    const double var = (sum_sq[k] - n * law.pi[k] * law.pi[k]) / (n - 1.0);
    law.se[k] = std::sqrt(std::max(var, 0.0) / n);
    law.tail_mass[k] = tail_sum[k] / n;
  }
  law.mean = mean_sum / n;
  const double mvar = (mean_sum_sq - n * law.mean * law.mean) / (n - 1.0);
  law.mean_se = std::sqrt(std::max(mvar, 0.0) / n);
  return law;
}

// ---- analytic row-truncation bounds for the kernel ----

struct RowTruncation {
  long long y_max = 0;
  double tail_bound = 0.0;
};

namespace detail {

// Upper bound on the negative binomial tail sum_{y>Y} C(x+y,x) a^{x+1}(1-a)^y.
// The term ratio (1-a)(x+y+1)/(y+1) decreases in y, so once it is below one
// the tail is dominated by a geometric series.
inline double nb_tail_bound(long long x, double a, long long y_trunc) {
  const double q = (1.0 - a) * static_cast<double>(x + y_trunc + 2) /
                   static_cast<double>(y_trunc + 2);
  if (q >= 1.0) return kInfinity;
  const double log_t =
      log_binomial(x + y_trunc + 1, x) + (static_cast<double>(x) + 1.0) * std::log(a) +
      (static_cast<double>(y_trunc) + 1.0) * std::log1p(-a);
  return std::exp(log_t) / (1.0 - q);
}

// Upper bound on nu_{alpha,beta}([0, a0]).
inline double beta_lower_mass_bound(double alpha, double beta, double a0) {
  double log_m = alpha * std::log(a0) - std::log(alpha) - log_beta(alpha, beta);
  if (beta < 1.0) log_m += (beta - 1.0) * std::log1p(-a0);
  return std::exp(log_m);
}

}  // namespace detail

// Rigorous upper bound on sum_{y > y_max} Q_theta(x, y).
inline double row_tail_bound(const EnvFamily& f, long long x, long long y_max) {
  switch (f.kind()) {
    case FamilyKind::two_point_known:
    case FamilyKind::two_point_free:
      return f.p() * detail::nb_tail_bound(x, f.a1(), y_max) +
             (1.0 - f.p()) * detail::nb_tail_bound(x, f.a2(), y_max);
    case FamilyKind::beta: {
      // Split on the environment: below a0 bound the nu-mass itself, above
      // a0 the row is stochastically dominated by NB(x+1, a0).
      const double a0 = std::min(0.5, 32.0 / static_cast<double>(y_max + 64));
      return detail::beta_lower_mass_bound(f.alpha(), f.beta_par(), a0) +
             detail::nb_tail_bound(x, a0, y_max);
    }
  }
  return kInfinity;
}

// Smallest power-of-two-searched truncation with tail bound below eps.
inline RowTruncation choose_row_truncation(const EnvFamily& f, long long x, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("choose_row_truncation: eps must be > 0");
  if (f.kind() == FamilyKind::beta) {
    // Fix a0 from the lower-mass half of the budget, then grow Y for the
    // NB(x+1, a0) half.
    const double alpha = f.alpha(), beta = f.beta_par();
    double a0 = std::exp((std::log(eps / 2.0) + std::log(alpha) + log_beta(alpha, beta)) / alpha);
    if (beta < 1.0) {
      a0 = std::exp((std::log(eps / 2.0) + std::log(alpha) + log_beta(alpha, beta) -
                     (beta - 1.0) * std::log1p(-a0)) /
                    alpha);
    }
    a0 = std::min(a0, 0.5);
    const double mass = detail::beta_lower_mass_bound(alpha, beta, a0);
    for (long long y = 64; y <= (1LL << 40); y *= 2) {
      const double nb = detail::nb_tail_bound(x, a0, y);
      if (mass + nb < eps) return {y, mass + nb};
    }
    throw std::runtime_error("choose_row_truncation: no truncation found");
  }
  for (long long y = 16; y <= (1LL << 40); y *= 2) {
    const double bound = row_tail_bound(f, x, y);
    if (bound < eps) return {y, bound};
  }
  throw std::runtime_error("choose_row_truncation: no truncation found");
}

// Ergodic estimate of ell(theta_eval) along a chain simulated under the true
// family: mean of phi_{theta_eval}(Z_k, Z_{k+1}) after a 10% burn-in, with a
// 50-batch batch-means standard error.
inline LimitEstimate limit_estimate(const EnvFamily& family_star,
                                    std::span<const double> theta_eval, long long chain_length,
                                    Rng& rng,
                                    long long population_cap = kDefaultPopulationCap) {
  if (chain_length < 1000)
    throw std::invalid_argument("limit_estimate: chain_length must be >= 1000");
  const std::vector<long long> z =
      simulate(family_star, static_cast<long>(chain_length), rng, population_cap);
  const PhiEval f(family_star.shape, theta_eval);
  const long long burn = chain_length / 10;
  const long long used = chain_length - burn;

  double total = 0.0;
  for (long long k = burn; k < chain_length; ++k)
    total += f(z[static_cast<std::size_t>(k)], z[static_cast<std::size_t>(k) + 1]);
  const double mean = total / static_cast<double>(used);

  constexpr int kBatches = 50;
  const long long batch = used / kBatches;
  double bsum = 0.0, bsum_sq = 0.0;
  for (int b = 0; b < kBatches; ++b) {
    double s = 0.0;
    const long long start = burn + b * batch;
    for (long long k = start; k < start + batch; ++k)
      s += f(z[static_cast<std::size_t>(k)], z[static_cast<std::size_t>(k) + 1]);
    const double bm = s / static_cast<double>(batch);
    bsum += bm;
    bsum_sq += bm * bm;
  }
  const double bmean = bsum / kBatches;
  const double bvar = (bsum_sq - kBatches * bmean * bmean) / (kBatches - 1.0);
  LimitEstimate est;
  est.theta.assign(theta_eval.begin(), theta_eval.end());
  est.value = mean;
  est.stderr_ = std::sqrt(std::max(bvar, 0.0) / kBatches);
  est.n_used = used;
  return est;
}

}  // namespace rwre
