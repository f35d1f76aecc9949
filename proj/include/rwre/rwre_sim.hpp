#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rwre/env_model.hpp"
#include "rwre/errors.hpp"
#include "rwre/rng.hpp"

namespace rwre {

// Per-site left/right step counts of a walk observed until T_n.
struct StepCounts {
  long n = 0;
  long long t_n = 0;
  int lowest_visited = 0;
  std::vector<long long> left;   // site x at index x - lowest_visited, up to x = n
  std::vector<long long> right;

  long long left_at(long x) const {
    const long idx = x - lowest_visited;
    if (idx < 0 || idx >= static_cast<long>(left.size())) return 0;
    return left[static_cast<std::size_t>(idx)];
  }
  long long right_at(long x) const {
    const long idx = x - lowest_visited;
    if (idx < 0 || idx >= static_cast<long>(right.size())) return 0;
    return right[static_cast<std::size_t>(idx)];
  }
};

// Per-site move sequences, in the order each site was occupied.
struct HistoryLog {
  int x_min = 0;
  std::vector<std::vector<signed char>> moves;
  long long total_moves = 0;

  const std::vector<signed char>& at(long x) const {
    static const std::vector<signed char> empty;
    const long idx = x - x_min;
    if (idx < 0 || idx >= static_cast<long>(moves.size())) return empty;
    return moves[static_cast<std::size_t>(idx)];
  }
};

struct WalkResult {
  StepCounts counts;
  HistoryLog history;
};

enum class PathStatus { ok, step_budget_exceeded, range_exceeded };

// Raw increment record of one walk, with hitting times of requested targets.
struct Path {
  std::vector<signed char> steps;             // steps[t] = X_{t+1} - X_t
  std::vector<std::pair<long, long long>> hits;  // (target, T_target), ascending
  int lowest_visited = 0;
  PathStatus status = PathStatus::ok;

  long long hit_time(long target) const {
    for (const auto& [n, t] : hits)
      if (n == target) return t;
    return -1;
  }
};

// Simulates X from 0, one Bernoulli draw per step, until the last target is
// hit or the budget runs out. Targets must be positive, strictly increasing
// and within the environment range. A left step attempted from env.x_min
// stops the walk with range_exceeded status.
inline Path simulate_targets(const Environment& env, const std::vector<long>& targets,
                             long long max_steps, Rng& rng) {
  if (targets.empty()) throw std::invalid_argument("simulate_targets: no targets");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] <= 0 || (i > 0 && targets[i] <= targets[i - 1]))
      throw std::invalid_argument("simulate_targets: targets must be positive and increasing");
  }
  if (targets.back() > env.x_max())
    throw std::invalid_argument("simulate_targets: target beyond environment range");
  if (max_steps <= 0) throw std::invalid_argument("simulate_targets: max_steps must be > 0");

  Path path;
  path.steps.reserve(static_cast<std::size_t>(std::min<long long>(max_steps, 4 * targets.back())));
  long x = 0;
  long long t = 0;
  std::size_t ti = 0;
  for (;;) {
    if (x == targets[ti]) {
      path.hits.emplace_back(x, t);
      if (++ti == targets.size()) break;
    }
    if (t == max_steps) {
      path.status = PathStatus::step_budget_exceeded;
      break;
    }
    if (rng.bernoulli(env.omega_at(static_cast<int>(x)))) {
      path.steps.push_back(+1);
      ++x;
    } else {
      if (x == env.x_min()) {
        path.status = PathStatus::range_exceeded;
        break;
      }
      path.steps.push_back(-1);
      --x;
      if (x < path.lowest_visited) path.lowest_visited = static_cast<int>(x);
    }
    ++t;
  }
  return path;
}

// Step counts from the first t_n increments. When n_expected >= 0 the replay
// must end exactly at that site.
inline StepCounts step_counts_from_steps(std::span<const signed char> steps, long long t_n,
                                         long n_expected) {
  if (t_n < 0 || t_n > static_cast<long long>(steps.size()))
    throw std::invalid_argument("step_counts_from_steps: t_n out of range");
  long x = 0, lo = 0, hi = 0;
  for (long long t = 0; t < t_n; ++t) {
    x += steps[static_cast<std::size_t>(t)];
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (n_expected >= 0 && x != n_expected)
    throw std::invalid_argument("step_counts_from_steps: path does not end at n");
  const long n = n_expected >= 0 ? n_expected : hi;
  StepCounts c;
  c.n = n;
  c.t_n = t_n;
  c.lowest_visited = static_cast<int>(lo);
  c.left.assign(static_cast<std::size_t>(n - lo + 1), 0);
  c.right.assign(static_cast<std::size_t>(n - lo + 1), 0);
  x = 0;
  for (long long t = 0; t < t_n; ++t) {
    const signed char s = steps[static_cast<std::size_t>(t)];
    if (s > 0)
      ++c.right[static_cast<std::size_t>(x - lo)];
    else
      ++c.left[static_cast<std::size_t>(x - lo)];
    x += s;
  }
  return c;
}

// Per-site move logs from the first t_n increments.
inline HistoryLog history_from_steps(std::span<const signed char> steps, long long t_n) {
  if (t_n < 0 || t_n > static_cast<long long>(steps.size()))
    throw std::invalid_argument("history_from_steps: t_n out of range");
  long x = 0, lo = 0, hi = 0;
  for (long long t = 0; t < t_n; ++t) {
    x += steps[static_cast<std::size_t>(t)];
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  HistoryLog log;
  log.x_min = static_cast<int>(lo);
  log.moves.assign(static_cast<std::size_t>(hi - lo + 1), {});
  log.total_moves = t_n;
  x = 0;
  for (long long t = 0; t < t_n; ++t) {
    const signed char s = steps[static_cast<std::size_t>(t)];
    log.moves[static_cast<std::size_t>(x - lo)].push_back(s);
    x += s;
  }
  return log;
}

inline WalkResult extract_at(const Path& path, long n) {
  const long long t_n = path.hit_time(n);
  if (t_n < 0) throw std::invalid_argument("extract_at: target was not reached");
  return WalkResult{step_counts_from_steps(path.steps, t_n, n),
                    history_from_steps(path.steps, t_n)};
}

// Runs the walk to its hitting time T_n and extracts counts and history.
inline WalkResult run_to_hit(const Environment& env, long n, long long max_steps, Rng& rng) {
  const Path path = simulate_targets(env, {n}, max_steps, rng);
  if (path.status == PathStatus::step_budget_exceeded)
    throw StepBudgetExceeded("run_to_hit: T_n exceeds max_steps");
  if (path.status == PathStatus::range_exceeded)
    throw RangeExceeded("run_to_hit: walk left the sampled environment range");
  return extract_at(path, n);
}

// Criterion input pairs (L_{x+1}, L_x) for x = 0..n-1; negative sites dropped.
inline std::vector<std::pair<long long, long long>> left_step_vector(const StepCounts& c) {
  std::vector<std::pair<long long, long long>> pairs;
  pairs.reserve(static_cast<std::size_t>(c.n));
  for (long x = 0; x < c.n; ++x) pairs.emplace_back(c.left_at(x + 1), c.left_at(x));
  return pairs;
}

// 100 * n * (ballistic T_n/n limit) for ballistic families, 1e8 otherwise.
inline long long default_max_steps(const EnvFamily& f, long n) {
  const Regime r = classify_regime(f);
  if (r.ballistic()) {
    const double limit = (1.0 + r.e_rho) / (1.0 - r.e_rho);
    return static_cast<long long>(100.0 * static_cast<double>(n) * limit);
  }
  return 100'000'000LL;
}

}  // namespace rwre
