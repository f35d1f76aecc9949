#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rwre/env_model.hpp"
#include "rwre/errors.hpp"
#include "rwre/likelihood.hpp"

namespace rwre {

struct MleOptions {
  int grid_points = 32;        // per axis, stage-1 grid
  long long max_evals = 10000; // total criterion evaluations
  double tol = 1e-6;           // bracket / simplex diameter, relative to box width
};

struct MleResult {
  std::vector<double> theta_hat;
  double criterion_at_max = -std::numeric_limits<double>::infinity();
  long long evaluations = 0;
  bool converged = false;
  bool on_boundary = false;
  std::vector<double> grid_stage_argmax;
};

inline constexpr double kBoundaryTol = 1e-6;  // relative to box width

namespace detail {

inline bool near_box_edge(std::span<const double> theta, const ThetaBox& box) {
  for (std::size_t i = 0; i < box.dim(); ++i) {
    const double margin = kBoundaryTol * box.width(i);
    if (theta[i] - box.lo(i) <= margin || box.hi(i) - theta[i] <= margin) return true;
  }
  return false;
}

}  // namespace detail

// Two-stage deterministic maximization over the box: a coarse grid, then
// golden-section (1-D) or a box-clamped Nelder-Mead simplex. Probes outside
// the feasibility region score -inf; every accepted probe updates the
// best-so-far, so criterion_at_max dominates all probed points. Ties on the
// grid go to the lexicographically lowest point.
template <class F>
MleResult maximize(F&& objective, const ThetaBox& box, const MleOptions& opt = {}) {
  const std::size_t d = box.dim();
  if (d == 0) throw std::invalid_argument("maximize: empty box");
  if (opt.grid_points < 2) throw std::invalid_argument("maximize: grid_points must be >= 2");
  const double neg_inf = -std::numeric_limits<double>::infinity();

  MleResult res;
  std::vector<double> best_th(d);
  auto probe = [&](std::span<const double> th) -> double {
    if (box.feasible && !box.feasible(th)) return neg_inf;
    ++res.evaluations;
    const double v = objective(th);
    if (v > res.criterion_at_max) {
      res.criterion_at_max = v;
      std::copy(th.begin(), th.end(), best_th.begin());
    }
    return v;
  };

  // stage 1: grid, odometer in lexicographic order
  const int g = opt.grid_points;
  std::vector<int> idx(d, 0);
  std::vector<double> th(d);
  std::vector<double> cell(d);
  for (std::size_t i = 0; i < d; ++i) cell[i] = box.width(i) / (g - 1);
  for (;;) {
    for (std::size_t i = 0; i < d; ++i) th[i] = box.lo(i) + idx[i] * cell[i];
    probe(th);
    std::size_t axis = d;
    while (axis > 0) {
      if (++idx[axis - 1] < g) break;
      idx[axis - 1] = 0;
      --axis;
    }
    if (axis == 0) break;
  }
  if (!std::isfinite(res.criterion_at_max))
    throw NonFiniteCriterion("maximize: criterion is -inf on the whole grid");
  res.grid_stage_argmax = best_th;

  // stage 2: local refinement from the grid argmax; the evaluation budget
  // applies to this stage
  const long long grid_evals = res.evaluations;
  auto refine_evals = [&]() { return res.evaluations - grid_evals; };
  if (d == 1) {
    const double width = box.width(0);
    double a = std::max(box.lo(0), res.grid_stage_argmax[0] - cell[0]);
    double b = std::min(box.hi(0), res.grid_stage_argmax[0] + cell[0]);
    const double ratio = 0.6180339887498949;
    double x1 = b - ratio * (b - a);
    double x2 = a + ratio * (b - a);
    double f1 = probe(std::span<const double>(&x1, 1));
    double f2 = probe(std::span<const double>(&x2, 1));
    while (b - a > opt.tol * width && refine_evals() < opt.max_evals) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + ratio * (b - a);
        f2 = probe(std::span<const double>(&x2, 1));
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - ratio * (b - a);
        f1 = probe(std::span<const double>(&x1, 1));
      }
    }
    res.converged = (b - a) <= opt.tol * width;
  } else {
    // Nelder-Mead with probes clamped into the box.
    auto clamp_point = [&](std::vector<double>& pt) {
      for (std::size_t i = 0; i < d; ++i) pt[i] = std::clamp(pt[i], box.lo(i), box.hi(i));
    };
    const std::size_t nv = d + 1;
    std::vector<std::vector<double>> vert(nv, res.grid_stage_argmax);
    for (std::size_t i = 0; i < d; ++i) {
      double step = cell[i];
      if (vert[i + 1][i] + step > box.hi(i)) step = -step;
      vert[i + 1][i] += step;
      clamp_point(vert[i + 1]);
    }
    std::vector<double> fv(nv);
    for (std::size_t v = 0; v < nv; ++v) fv[v] = probe(vert[v]);

    auto spread_small = [&]() {
      for (std::size_t i = 0; i < d; ++i) {
        double lo = vert[0][i], hi = vert[0][i];
        for (std::size_t v = 1; v < nv; ++v) {
          lo = std::min(lo, vert[v][i]);
          hi = std::max(hi, vert[v][i]);
        }
        if (hi - lo > opt.tol * box.width(i)) return false;
      }
      return true;
    };

    std::vector<std::size_t> order(nv);
    std::vector<double> centroid(d), cand(d), cand2(d);
    for (;;) {
      if (spread_small()) {
        res.converged = true;
        break;
      }
      if (refine_evals() >= opt.max_evals) break;
      for (std::size_t v = 0; v < nv; ++v) order[v] = v;
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return fv[a] > fv[b]; });
      const std::size_t worst = order[nv - 1];
      const std::size_t second_worst = order[nv - 2];
      const std::size_t best = order[0];

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t v = 0; v < nv; ++v) {
        if (v == worst) continue;
        for (std::size_t i = 0; i < d; ++i) centroid[i] += vert[v][i];
      }
      for (std::size_t i = 0; i < d; ++i) centroid[i] /= static_cast<double>(d);

      for (std::size_t i = 0; i < d; ++i) cand[i] = centroid[i] + (centroid[i] - vert[worst][i]);
      clamp_point(cand);
      const double fr = probe(cand);

      if (fr > fv[best]) {
        for (std::size_t i = 0; i < d; ++i) cand2[i] = centroid[i] + 2.0 * (cand[i] - centroid[i]);
        clamp_point(cand2);
        const double fe = probe(cand2);
        if (fe > fr) {
          vert[worst] = cand2;
          fv[worst] = fe;
        } else {
          vert[worst] = cand;
          fv[worst] = fr;
        }
      } else if (fr > fv[second_worst]) {
        vert[worst] = cand;
        fv[worst] = fr;
      } else {
        const bool outside = fr > fv[worst];
        for (std::size_t i = 0; i < d; ++i) {
          cand2[i] = outside ? centroid[i] + 0.5 * (cand[i] - centroid[i])
                             : centroid[i] + 0.5 * (vert[worst][i] - centroid[i]);
        }
        clamp_point(cand2);
        const double fc = probe(cand2);
        if (fc > (outside ? fr : fv[worst])) {
          vert[worst] = cand2;
          fv[worst] = fc;
        } else {
          for (std::size_t v = 0; v < nv; ++v) {
            if (v == best) continue;
            for (std::size_t i = 0; i < d; ++i)
              vert[v][i] = vert[best][i] + 0.5 * (vert[v][i] - vert[best][i]);
            clamp_point(vert[v]);
            fv[v] = probe(vert[v]);
          }
        }
      }
    }
  }

  res.theta_hat = best_th;
  res.on_boundary = detail::near_box_edge(res.theta_hat, box);
  return res;
}

// Evaluations along one axis, the other coordinates held at a given point.
template <class F>
std::vector<std::pair<double, double>> profile_slice(F&& objective, const ThetaBox& box,
                                                     std::size_t axis, int resolution,
                                                     std::span<const double> at) {
  if (axis >= box.dim()) throw std::invalid_argument("profile_slice: bad axis");
  if (resolution < 2) throw std::invalid_argument("profile_slice: resolution must be >= 2");
  std::vector<double> th(at.begin(), at.end());
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(resolution));
  for (int i = 0; i < resolution; ++i) {
    const double t = box.lo(axis) + (box.width(axis) * i) / (resolution - 1);
    th[axis] = t;
    double v;
    if (box.feasible && !box.feasible(th))
      v = -std::numeric_limits<double>::infinity();
    else
      v = objective(th);
    out.emplace_back(t, v);
  }
  return out;
}

// Same, centered at the maximizer found with the given options.
inline std::vector<std::pair<double, double>> profile_slice(const Criterion& crit,
                                                            const ThetaBox& box, std::size_t axis,
                                                            int resolution,
                                                            const MleOptions& opt = {}) {
  const MleResult fit = maximize(crit, box, opt);
  return profile_slice([&crit](std::span<const double> th) { return crit.value(th); }, box, axis,
                       resolution, fit.theta_hat);
}

}  // namespace rwre
