#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "rwre/bpre.hpp"
#include "rwre/env_model.hpp"
#include "rwre/errors.hpp"
#include "rwre/estimator_mle.hpp"
#include "rwre/estimator_moment.hpp"
#include "rwre/likelihood.hpp"
#include "rwre/rwre_sim.hpp"

namespace rwre {

enum class EstimatorKind { mle, moment };

inline const char* estimator_name(EstimatorKind k) {
  return k == EstimatorKind::mle ? "mle" : "moment";
}

enum class RecordFlag { ok, boundary, budget, clamped, noninvertible, failed };

inline const char* flag_name(RecordFlag f) {
  switch (f) {
    case RecordFlag::ok: return "ok";
    case RecordFlag::boundary: return "boundary";
    case RecordFlag::budget: return "budget";
    case RecordFlag::clamped: return "clamped";
    case RecordFlag::noninvertible: return "noninvertible";
    case RecordFlag::failed: return "failed";
  }
  return "?";
}

// Which records and values enter the summary statistics. Caps apply to the
// moment estimator per coordinate (a capped alpha drops only the alpha cell).
struct OutlierPolicy {
  bool exclude_boundary = true;
  bool exclude_clamped = false;
  std::map<std::string, double> moment_caps;

  static OutlierPolicy defaults_for(FamilyKind kind) {
    OutlierPolicy p;
    if (kind == FamilyKind::beta) {
      p.moment_caps["alpha"] = 10.0;
      p.moment_caps["beta"] = 3.0;
    }
    return p;
  }
};

struct ExperimentConfig {
  EnvFamily family;  // with the true theta
  std::vector<long> n_grid = {1000, 2000, 3000, 4000, 5000, 6000, 7000, 8000, 9000, 10000};
  int replications = 1000;
  std::uint64_t master_seed = 0;
  bool run_mle = true;
  bool run_moment = true;
  long site_margin = 10000;  // environment sites [-site_margin, max n]
  OutlierPolicy outliers;
  MleOptions mle_options;
  int jobs = 1;
  long long max_steps_override = 0;  // 0 = default_max_steps

  void validate() const {
    family.validate();
    if (n_grid.empty()) throw std::invalid_argument("ExperimentConfig: empty n_grid");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      if (n_grid[i] <= 0 || (i > 0 && n_grid[i] <= n_grid[i - 1]))
        throw std::invalid_argument("ExperimentConfig: n_grid must be positive and increasing");
    }
    if (replications < 1)
      throw std::invalid_argument("ExperimentConfig: replications must be >= 1");
    if (run_moment && family.kind() == FamilyKind::two_point_free)
      throw ConfigError(
          "moment estimator is not available for two_point_free (the moment system has no "
          "implemented inversion)");
  }
};

struct EstimateRecord {
  int rep = 0;
  long n = 0;
  long long t_n = -1;
  EstimatorKind estimator = EstimatorKind::mle;
  std::vector<double> theta;
  RecordFlag flag = RecordFlag::ok;
  double wall_seconds = 0.0;
};

// One environment and one walk per replication; the walk is stopped
// successively at each hitting time in the n-grid and both estimators run on
// every stop. Unreached stops yield flagged records instead of aborting.
inline std::vector<EstimateRecord> run_replication(const ExperimentConfig& cfg, int rep_index) {
  Rng env_rng = Rng::stream(cfg.master_seed, static_cast<std::uint64_t>(rep_index), 0);
  Rng walk_rng = Rng::stream(cfg.master_seed, static_cast<std::uint64_t>(rep_index), 1);

  const long n_max = cfg.n_grid.back();
  const Environment env =
      sample_env(cfg.family, static_cast<int>(-cfg.site_margin), static_cast<int>(n_max), env_rng);
  const long long max_steps =
      cfg.max_steps_override > 0 ? cfg.max_steps_override : default_max_steps(cfg.family, n_max);
  const Path path = simulate_targets(env, cfg.n_grid, max_steps, walk_rng);

  const int dim = cfg.family.shape.dim();
  const std::vector<double> nan_theta(static_cast<std::size_t>(dim),
                                      std::numeric_limits<double>::quiet_NaN());

  std::vector<EstimateRecord> records;
  records.reserve(cfg.n_grid.size() * 2);
  using clock = std::chrono::steady_clock;

  for (long n : cfg.n_grid) {
    const long long t_n = path.hit_time(n);
    if (cfg.run_mle) {
      EstimateRecord rec;
      rec.rep = rep_index;
      rec.n = n;
      rec.t_n = t_n;
      rec.estimator = EstimatorKind::mle;
      if (t_n < 0) {
        rec.theta = nan_theta;
        rec.flag = RecordFlag::failed;
      } else {
        const auto start = clock::now();
        try {
          const StepCounts counts = step_counts_from_steps(path.steps, t_n, n);
          const Criterion crit = Criterion::from_counts(cfg.family.shape, counts);
          const MleResult fit = maximize(crit, cfg.family.box, cfg.mle_options);
          rec.theta = fit.theta_hat;
          rec.flag = fit.on_boundary ? RecordFlag::boundary
                                     : (fit.converged ? RecordFlag::ok : RecordFlag::budget);
        } catch (const NonFiniteCriterion&) {
          rec.theta = nan_theta;
          rec.flag = RecordFlag::failed;
        }
        rec.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
      }
      records.push_back(std::move(rec));
    }
    if (cfg.run_moment) {
      EstimateRecord rec;
      rec.rep = rep_index;
      rec.n = n;
      rec.t_n = t_n;
      rec.estimator = EstimatorKind::moment;
      if (t_n < 0) {
        rec.theta = nan_theta;
        rec.flag = RecordFlag::failed;
      } else {
        const auto start = clock::now();
        try {
          const HistoryLog log = history_from_steps(path.steps, t_n);
          const HistoryStats stats = history_stats(log);
          MomentResult m;
          if (cfg.family.kind() == FamilyKind::two_point_known)
            m = invert_two_point_known(stats, cfg.family.a1(), cfg.family.a2());
          else
            m = invert_beta(stats);
          rec.theta = m.theta_tilde;
          rec.flag = !m.invertible ? RecordFlag::noninvertible
                                   : (m.clamped ? RecordFlag::clamped : RecordFlag::ok);
        } catch (const EmptyHistory&) {
          rec.theta = nan_theta;
          rec.flag = RecordFlag::failed;
        }
        rec.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
      }
      records.push_back(std::move(rec));
    }
  }
  return records;
}

// All replications, optionally on a worker pool. Records come back in
// replication order regardless of scheduling.
inline std::vector<EstimateRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<EstimateRecord>> per_rep(static_cast<std::size_t>(cfg.replications));
  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    for (int r = 0; r < cfg.replications; ++r) per_rep[static_cast<std::size_t>(r)] = run_replication(cfg, r);
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= cfg.replications) return;
        per_rep[static_cast<std::size_t>(r)] = run_replication(cfg, r);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::vector<EstimateRecord> records;
  for (auto& chunk : per_rep)
    records.insert(records.end(), chunk.begin(), chunk.end());
  return records;
}

struct SummaryRow {
  long n = 0;
  EstimatorKind estimator = EstimatorKind::mle;
  std::string coord;
  long long count = 0;     // records seen for this cell
  long long used = 0;      // after the outlier policy
  long long excluded = 0;
  double mean = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  double sd = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
  long long outliers = 0;  // points beyond the 1.5 IQR whiskers
};

struct SummaryTable {
  std::vector<SummaryRow> rows;
};

namespace detail {

// Linear-interpolation quantile (R type 7) on a sorted vector.
inline double quantile_sorted(const std::vector<double>& v, double p) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

}  // namespace detail

inline SummaryTable summarize(const std::vector<EstimateRecord>& records,
                              const ExperimentConfig& cfg) {
  struct Cell {
    std::vector<double> values;
    long long count = 0;
  };
  std::map<std::tuple<long, int, int>, Cell> cells;  // (n, estimator, coord)
  const FamilyShape& shape = cfg.family.shape;

  for (const auto& rec : records) {
    for (int c = 0; c < shape.dim(); ++c) {
      auto& cell = cells[{rec.n, static_cast<int>(rec.estimator), c}];
      ++cell.count;
      if (rec.flag == RecordFlag::failed || rec.flag == RecordFlag::noninvertible) continue;
      if (rec.estimator == EstimatorKind::mle && rec.flag == RecordFlag::boundary &&
          cfg.outliers.exclude_boundary)
        continue;
      if (rec.estimator == EstimatorKind::moment && rec.flag == RecordFlag::clamped &&
          cfg.outliers.exclude_clamped)
        continue;
      const double value = rec.theta[static_cast<std::size_t>(c)];
      if (rec.estimator == EstimatorKind::moment) {
        const auto cap = cfg.outliers.moment_caps.find(shape.param_name(c));
        if (cap != cfg.outliers.moment_caps.end() && value > cap->second) continue;
      }
      cell.values.push_back(value);
    }
  }

  SummaryTable table;
  for (auto& [key, cell] : cells) {
    const auto& [n, est, coord] = key;
    SummaryRow row;
    row.n = n;
    row.estimator = static_cast<EstimatorKind>(est);
    row.coord = shape.param_name(coord);
    row.count = cell.count;
    row.used = static_cast<long long>(cell.values.size());
    row.excluded = row.count - row.used;
    if (!cell.values.empty()) {
      std::vector<double>& v = cell.values;
      std::sort(v.begin(), v.end());
      double sum = 0.0;
      for (double x : v) sum += x;
      row.mean = sum / static_cast<double>(v.size());
      row.bias = row.mean - cfg.family.theta[static_cast<std::size_t>(coord)];
      double ss = 0.0;
      for (double x : v) ss += (x - row.mean) * (x - row.mean);
      row.variance = v.size() > 1 ? ss / (static_cast<double>(v.size()) - 1.0) : 0.0;
      row.sd = std::sqrt(row.variance);
      row.q1 = detail::quantile_sorted(v, 0.25);
      row.median = detail::quantile_sorted(v, 0.5);
      row.q3 = detail::quantile_sorted(v, 0.75);
      const double iqr = row.q3 - row.q1;
      const double lo_fence = row.q1 - 1.5 * iqr;
      const double hi_fence = row.q3 + 1.5 * iqr;
      row.whisker_lo = v.back();
      row.whisker_hi = v.front();
      long long out = 0;
      for (double x : v) {
        if (x < lo_fence || x > hi_fence) {
          ++out;
          continue;
        }
        row.whisker_lo = std::min(row.whisker_lo, x);
        row.whisker_hi = std::max(row.whisker_hi, x);
      }
      row.outliers = out;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

struct DivergencePath {
  std::vector<long> checkpoints;
  std::vector<double> medians;     // median running criterion per checkpoint
  long long diverged_chains = 0;   // chains that outgrew the population cap
  bool strictly_decreasing = false;
};

// Divergence diagnostic for non-ballistic transient families: the running
// normalized criterion (1/n) sum phi_theta(Z_k, Z_{k+1}) has no finite limit
// there, so its replication median keeps falling along the checkpoint grid.
// A single chain is useless for this: the sum is dominated by rare huge
// generations, so one path decays between spikes. The median over many
// chains tracks the location of the distribution instead. Chains that top
// the population cap count as "below everything" from that checkpoint on.
inline DivergencePath criterion_divergence_diagnostic(const EnvFamily& family,
                                                      std::vector<long> checkpoints, int chains,
                                                      std::uint64_t master_seed,
                                                      long long population_cap = 4'500'000'000'000'000LL) {
  if (checkpoints.empty()) throw std::invalid_argument("divergence diagnostic: no checkpoints");
  if (chains < 2) throw std::invalid_argument("divergence diagnostic: needs >= 2 chains");
  DivergencePath out;
  out.checkpoints = checkpoints;
  const long n_max = checkpoints.back();
  const PhiEval f(family.shape, family.theta);

  std::vector<std::vector<double>> paths(static_cast<std::size_t>(chains));
  for (int c = 0; c < chains; ++c) {
    Rng rng = Rng::stream(master_seed, static_cast<std::uint64_t>(c), 3);
    double sum = 0.0;
    long long z = 0;
    bool diverged = false;
    std::size_t ci = 0;
    auto& path = paths[static_cast<std::size_t>(c)];
    for (long k = 0; k < n_max; ++k) {
      if (!diverged) {
        const double omega = sample_omega(family, rng);
        const long long next = detail::offspring_generation(z, omega, rng);
        if (next > population_cap) {
          diverged = true;
        } else {
          sum += f(z, next);
          z = next;
        }
      }
      if (k + 1 == checkpoints[ci]) {
        path.push_back(diverged ? -std::numeric_limits<double>::infinity()
                                : sum / static_cast<double>(k + 1));
        if (++ci == checkpoints.size()) break;
      }
    }
    if (diverged) ++out.diverged_chains;
  }

  out.medians.resize(checkpoints.size());
  std::vector<double> column(static_cast<std::size_t>(chains));
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    for (int c = 0; c < chains; ++c) column[static_cast<std::size_t>(c)] = paths[static_cast<std::size_t>(c)][i];
    std::sort(column.begin(), column.end());
    out.medians[i] = 0.5 * (column[static_cast<std::size_t>(chains / 2 - 1)] +
                            column[static_cast<std::size_t>(chains / 2)]);
  }
  out.strictly_decreasing = true;
  for (std::size_t i = 1; i < out.medians.size(); ++i)
    out.strictly_decreasing = out.strictly_decreasing && out.medians[i] < out.medians[i - 1];
  return out;
}

struct DiagnosticsReport {
  long n = 0;
  int replications = 0;
  Regime regime;
  bool regime_violation = false;  // set for non-ballistic configs
  double limit = std::numeric_limits<double>::quiet_NaN();
  double mean_ratio = std::numeric_limits<double>::quiet_NaN();
  double sd_ratio = std::numeric_limits<double>::quiet_NaN();
  std::vector<long long> hitting_times;
  // 20-bin histogram of T_n: (bin lower edge, count)
  std::vector<std::pair<double, long long>> histogram;
};

// Hitting-time diagnostics: T_n histogram and mean(T_n/n) against the
// analytic ballistic limit. Non-ballistic configs are flagged and skipped.
inline DiagnosticsReport diagnostics(const EnvFamily& family, long n, int replications,
                                     std::uint64_t master_seed, long site_margin = 10000) {
  if (replications < 1) throw std::invalid_argument("diagnostics: replications must be >= 1");
  DiagnosticsReport rep;
  rep.n = n;
  rep.replications = replications;
  rep.regime = classify_regime(family);
  if (!rep.regime.ballistic()) {
    rep.regime_violation = true;
    return rep;
  }
  rep.limit = hitting_time_limit(family);
  const long long max_steps = default_max_steps(family, n);
  double sum = 0.0, sum_sq = 0.0;
  for (int r = 0; r < replications; ++r) {
    Rng env_rng = Rng::stream(master_seed, static_cast<std::uint64_t>(r), 0);
    Rng walk_rng = Rng::stream(master_seed, static_cast<std::uint64_t>(r), 1);
    const Environment env =
        sample_env(family, static_cast<int>(-site_margin), static_cast<int>(n), env_rng);
    const Path path = simulate_targets(env, {n}, max_steps, walk_rng);
    const long long t_n = path.hit_time(n);
    if (t_n < 0) throw StepBudgetExceeded("diagnostics: walk did not reach n");
    rep.hitting_times.push_back(t_n);
    const double ratio = static_cast<double>(t_n) / static_cast<double>(n);
    sum += ratio;
    sum_sq += ratio * ratio;
  }
  const double cnt = static_cast<double>(replications);
  rep.mean_ratio = sum / cnt;
  rep.sd_ratio =
      replications > 1 ? std::sqrt(std::max(0.0, (sum_sq - cnt * rep.mean_ratio * rep.mean_ratio) /
                                                     (cnt - 1.0)))
                       : 0.0;
  const auto [lo_it, hi_it] = std::minmax_element(rep.hitting_times.begin(), rep.hitting_times.end());
  const double lo = static_cast<double>(*lo_it), hi = static_cast<double>(*hi_it);
  const int bins = 20;
  const double width = std::max(1.0, (hi - lo) / bins);
  rep.histogram.assign(bins, {0.0, 0});
  for (int b = 0; b < bins; ++b) rep.histogram[static_cast<std::size_t>(b)].first = lo + b * width;
  for (long long t : rep.hitting_times) {
    int b = static_cast<int>((static_cast<double>(t) - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    ++rep.histogram[static_cast<std::size_t>(b)].second;
  }
  return rep;
}

}  // namespace rwre
