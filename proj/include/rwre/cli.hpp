#pragma once

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rwre/bpre.hpp"
#include "rwre/config.hpp"
#include "rwre/env_model.hpp"
#include "rwre/errors.hpp"
#include "rwre/estimator_mle.hpp"
#include "rwre/estimator_moment.hpp"
#include "rwre/experiment.hpp"
#include "rwre/io.hpp"
#include "rwre/likelihood.hpp"
#include "rwre/rwre_sim.hpp"
#include "rwre/version.hpp"

namespace rwre::cli {

namespace fs = std::filesystem;

namespace detail {

inline std::string iso8601_now() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm_utc;
#if defined(_WIN32)
  gmtime_s(&tm_utc, &now);
#else
  gmtime_r(&now, &tm_utc);
#endif
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

// Flag wins, then RWRE_MLE_SEED, then the config's master_seed, else a fresh
// seed is generated and printed.
inline std::uint64_t resolve_seed(bool flag_given, std::uint64_t flag_value, const json& cfg) {
  if (flag_given) return flag_value;
  if (const char* env = std::getenv("RWRE_MLE_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw ConfigError("RWRE_MLE_SEED is not a valid unsigned integer");
    }
  }
  if (cfg.contains("master_seed")) return cfg["master_seed"].get<std::uint64_t>();
  std::random_device rd;
  const std::uint64_t seed =
      (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
  std::cout << "master_seed: " << seed << "\n";
  return seed;
}

inline void write_manifest(const fs::path& dir, const std::string& command, const json& config_echo,
                           std::uint64_t seed) {
  json m;
  m["command"] = command;
  m["config"] = config_echo;
  m["master_seed"] = seed;
  m["timestamp"] = iso8601_now();
  m["version"] = kVersion;
  std::ofstream os(dir / "manifest.json");
  os << m.dump(2) << "\n";
}

inline std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file: " + path.string());
  return os;
}

struct WalkRun {
  Environment env;
  Path path;
  long long t_n = 0;
};

inline WalkRun run_walk(const ExperimentConfig& cfg, long n, std::uint64_t seed,
                        long long max_steps_flag) {
  Rng env_rng = Rng::stream(seed, 0, 0);
  Rng walk_rng = Rng::stream(seed, 0, 1);
  Environment env =
      sample_env(cfg.family, static_cast<int>(-cfg.site_margin), static_cast<int>(n), env_rng);
  long long max_steps = max_steps_flag > 0 ? max_steps_flag
                        : cfg.max_steps_override > 0 ? cfg.max_steps_override
                                                     : default_max_steps(cfg.family, n);
  Path path = simulate_targets(env, {n}, max_steps, walk_rng);
  if (path.status == PathStatus::step_budget_exceeded)
    throw StepBudgetExceeded("walk did not reach n within the step budget");
  if (path.status == PathStatus::range_exceeded)
    throw RangeExceeded("walk left the sampled site range; increase site_margin");
  WalkRun run{std::move(env), std::move(path), 0};
  run.t_n = run.path.hit_time(n);
  return run;
}

inline int axis_index(const FamilyShape& shape, const std::string& name) {
  for (int i = 0; i < shape.dim(); ++i)
    if (name == shape.param_name(i)) return i;
  throw ConfigError("unknown axis \"" + name + "\" for family " + family_name(shape.kind));
}

}  // namespace detail

inline int run(int argc, const char* const* argv) {
  CLI::App app{std::string("rwre ") + kVersion +
               " - ballistic random walk in random environment: simulation, likelihood and "
               "moment estimation"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  std::uint64_t seed_flag = 0;
  long n_flag = 10000;
  long long max_steps_flag = 0;
  std::vector<CLI::Option*> seed_opts;

  auto add_common = [&](CLI::App* sub, bool needs_n) {
    sub->add_option("-c,--config", config_path, "JSON config file")->required();
    sub->add_option("-o,--out", out_dir, "output directory (created if missing)");
    seed_opts.push_back(
        sub->add_option("--seed", seed_flag, "master seed (fallback: RWRE_MLE_SEED, then config)"));
    if (needs_n) sub->add_option("-n,--n", n_flag, "target site n");
  };

  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "simulate one walk to T_n and dump site,left,right counts");
  add_common(simulate_cmd, true);
  simulate_cmd->add_option("--max-steps", max_steps_flag, "step budget override");

  std::string estimator_choice = "mle";
  int grid_points = 32;
  long long max_evals = 10000;
  double tol = 1e-6;
  CLI::App* estimate_cmd =
      app.add_subcommand("estimate", "estimate theta from a single simulated walk");
  add_common(estimate_cmd, true);
  estimate_cmd->add_option("--estimator", estimator_choice, "mle | moment | both")
      ->check(CLI::IsMember({"mle", "moment", "both"}));
  estimate_cmd->add_option("--grid-points", grid_points, "stage-1 grid points per axis");
  estimate_cmd->add_option("--max-evals", max_evals, "criterion evaluation budget");
  estimate_cmd->add_option("--tol", tol, "refinement tolerance, relative to box width");

  CLI::App* moments_cmd = app.add_subcommand(
      "moments", "history-conditioned first-move proportions of one simulated walk");
  add_common(moments_cmd, true);

  std::string axis_name;
  int resolution = 201;
  CLI::App* profile_cmd =
      app.add_subcommand("profile", "criterion values along a 1-D slice through the maximizer");
  add_common(profile_cmd, true);
  profile_cmd->add_option("--axis", axis_name, "parameter to sweep (default: first parameter)");
  profile_cmd->add_option("--resolution", resolution, "number of slice points");
  profile_cmd->add_option("--grid-points", grid_points, "stage-1 grid points per axis");
  profile_cmd->add_option("--max-evals", max_evals, "criterion evaluation budget");
  profile_cmd->add_option("--tol", tol, "refinement tolerance, relative to box width");

  int k_max = 20;
  long long pi_samples = kDefaultPiSamples;
  double series_tol = kDefaultSeriesTol;
  CLI::App* bpre_cmd = app.add_subcommand(
      "bpre-check", "Monte Carlo stationary law of the branching chain vs the analytic mean");
  bpre_cmd->add_option("-c,--config", config_path, "JSON config file")->required();
  bpre_cmd->add_option("-o,--out", out_dir, "output directory (created if missing)");
  seed_opts.push_back(bpre_cmd->add_option(
      "--seed", seed_flag, "master seed (fallback: RWRE_MLE_SEED, then config)"));
  bpre_cmd->add_option("--kmax", k_max, "largest k reported");
  bpre_cmd->add_option("--samples", pi_samples, "Monte Carlo environment samples");
  bpre_cmd->add_option("--series-tol", series_tol, "running-product cutoff for the S series");

  int reps_flag = 0;
  int jobs = 1;
  CLI::App* replicate_cmd = app.add_subcommand(
      "replicate", "replicated experiment over the n-grid; writes estimates.csv and summary.csv");
  replicate_cmd->add_option("-c,--config", config_path, "JSON config file")->required();
  replicate_cmd->add_option("-o,--out", out_dir, "output directory (created if missing)");
  seed_opts.push_back(replicate_cmd->add_option(
      "--seed", seed_flag, "master seed (fallback: RWRE_MLE_SEED, then config)"));
  replicate_cmd->add_option("--reps", reps_flag, "replication count override");
  replicate_cmd->add_option("--jobs", jobs, "worker threads");
  replicate_cmd->add_option("--grid-points", grid_points, "stage-1 grid points per axis");
  replicate_cmd->add_option("--max-evals", max_evals, "criterion evaluation budget");
  replicate_cmd->add_option("--tol", tol, "refinement tolerance, relative to box width");

  int diag_reps = 50;
  CLI::App* diagnose_cmd = app.add_subcommand(
      "diagnose", "hitting-time diagnostics: mean T_n/n against the analytic ballistic limit");
  add_common(diagnose_cmd, true);
  diagnose_cmd->add_option("--reps", diag_reps, "number of walks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const json cfg_json = load_config_file(config_path);
    const ExperimentConfig cfg = parse_experiment_config(cfg_json);
    bool seed_given = false;
    for (const CLI::Option* opt : seed_opts) seed_given = seed_given || opt->count() > 0;
    const std::uint64_t seed = detail::resolve_seed(seed_given, seed_flag, cfg_json);
    fs::create_directories(out_dir);
    const fs::path out(out_dir);

    if (app.got_subcommand(simulate_cmd)) {
      const auto run = detail::run_walk(cfg, n_flag, seed, max_steps_flag);
      const StepCounts counts = step_counts_from_steps(run.path.steps, run.t_n, n_flag);
      auto csv = detail::open_out(out / "trajectory.csv");
      write_trajectory_csv(csv, counts);
      json hdr;
      hdr["n"] = n_flag;
      hdr["t_n"] = run.t_n;
      hdr["seed"] = seed;
      detail::open_out(out / "trajectory.json") << hdr.dump(2) << "\n";
      detail::write_manifest(out, "simulate", experiment_config_to_json(cfg), seed);
      std::cout << "T_n = " << run.t_n << "  (T_n/n = "
                << static_cast<double>(run.t_n) / static_cast<double>(n_flag) << ")\n";
      return 0;
    }

    if (app.got_subcommand(estimate_cmd)) {
      const auto run = detail::run_walk(cfg, n_flag, seed, 0);
      const StepCounts counts = step_counts_from_steps(run.path.steps, run.t_n, n_flag);
      json result;
      result["n"] = n_flag;
      result["t_n"] = run.t_n;
      result["seed"] = seed;
      const bool want_mle = estimator_choice != "moment";
      const bool want_moment = estimator_choice != "mle";
      if (want_mle) {
        const Criterion crit = Criterion::from_counts(cfg.family.shape, counts);
        const MleResult fit =
            maximize(crit, cfg.family.box, MleOptions{grid_points, max_evals, tol});
        json m;
        for (int i = 0; i < cfg.family.shape.dim(); ++i)
          m[cfg.family.shape.param_name(i)] = fit.theta_hat[static_cast<std::size_t>(i)];
        m["criterion"] = fit.criterion_at_max;
        m["evaluations"] = fit.evaluations;
        m["converged"] = fit.converged;
        m["on_boundary"] = fit.on_boundary;
        result["mle"] = m;
        std::cout << "mle:";
        for (int i = 0; i < cfg.family.shape.dim(); ++i)
          std::cout << ' ' << cfg.family.shape.param_name(i) << " = "
                    << fit.theta_hat[static_cast<std::size_t>(i)];
        std::cout << (fit.on_boundary ? "  [boundary]" : "") << "\n";
      }
      if (want_moment) {
        if (cfg.family.kind() == FamilyKind::two_point_free)
          throw ConfigError("moment estimator is not available for two_point_free");
        const HistoryStats stats = history_stats(history_from_steps(run.path.steps, run.t_n));
        const MomentResult mom = cfg.family.kind() == FamilyKind::two_point_known
                                     ? invert_two_point_known(stats, cfg.family.a1(), cfg.family.a2())
                                     : invert_beta(stats);
        json m;
        for (int i = 0; i < cfg.family.shape.dim(); ++i)
          m[cfg.family.shape.param_name(i)] = mom.theta_tilde[static_cast<std::size_t>(i)];
        m["invertible"] = mom.invertible;
        m["clamped"] = mom.clamped;
        result["moment"] = m;
        std::cout << "moment:";
        for (int i = 0; i < cfg.family.shape.dim(); ++i)
          std::cout << ' ' << cfg.family.shape.param_name(i) << " = "
                    << mom.theta_tilde[static_cast<std::size_t>(i)];
        std::cout << (mom.invertible ? "" : "  [noninvertible]") << "\n";
      }
      detail::open_out(out / "estimate.json") << result.dump(2) << "\n";
      detail::write_manifest(out, "estimate", experiment_config_to_json(cfg), seed);
      return 0;
    }

    if (app.got_subcommand(moments_cmd)) {
      const auto run = detail::run_walk(cfg, n_flag, seed, 0);
      const HistoryStats stats = history_stats(history_from_steps(run.path.steps, run.t_n));
      auto csv = detail::open_out(out / "moments.csv");
      write_moments_csv(csv, stats);
      detail::write_manifest(out, "moments", experiment_config_to_json(cfg), seed);
      std::cout << stats.histories().size() << " distinct histories, " << stats.total()
                << " moves\n";
      return 0;
    }

    if (app.got_subcommand(profile_cmd)) {
      const auto run = detail::run_walk(cfg, n_flag, seed, 0);
      const StepCounts counts = step_counts_from_steps(run.path.steps, run.t_n, n_flag);
      const Criterion crit = Criterion::from_counts(cfg.family.shape, counts);
      const int axis = axis_name.empty() ? 0 : detail::axis_index(cfg.family.shape, axis_name);
      const MleOptions opt{grid_points, max_evals, tol};
      const MleResult fit = maximize(crit, cfg.family.box, opt);
      const auto slice = profile_slice(
          [&crit](std::span<const double> th) { return crit.value(th); }, cfg.family.box,
          static_cast<std::size_t>(axis), resolution, fit.theta_hat);
      auto csv = detail::open_out(out / "profile.csv");
      csv << "theta,criterion\n";
      for (const auto& [t, v] : slice) csv << format_double(t) << ',' << format_double(v) << '\n';
      detail::write_manifest(out, "profile", experiment_config_to_json(cfg), seed);
      std::cout << "criterion maximum " << fit.criterion_at_max << " at "
                << cfg.family.shape.param_name(axis) << " = "
                << fit.theta_hat[static_cast<std::size_t>(axis)] << "\n";
      return 0;
    }

    if (app.got_subcommand(bpre_cmd)) {
      Rng rng = Rng::stream(seed, 0, 2);
      const StationaryLaw law = stationary_pi(cfg.family, k_max, pi_samples, series_tol, rng);
      auto csv = detail::open_out(out / "bpre_pi.csv");
      write_stationary_csv(csv, law);
      const double analytic = stationary_mean(cfg.family);
      json summary;
      summary["mean_mc"] = law.mean;
      summary["mean_se"] = law.mean_se;
      summary["mean_analytic"] = analytic;
      summary["within_3se"] =
          std::isfinite(analytic) && std::fabs(law.mean - analytic) <= 3.0 * law.mean_se;
      summary["mc_samples"] = law.mc_samples;
      detail::open_out(out / "bpre_check.json") << summary.dump(2) << "\n";
      detail::write_manifest(out, "bpre-check", experiment_config_to_json(cfg), seed);
      std::cout << "stationary mean: mc " << law.mean << " +- " << law.mean_se << ", analytic "
                << analytic << "\n";
      return 0;
    }

    if (app.got_subcommand(replicate_cmd)) {
      ExperimentConfig run_cfg = cfg;
      run_cfg.master_seed = seed;
      if (reps_flag > 0) run_cfg.replications = reps_flag;
      run_cfg.jobs = jobs;
      run_cfg.mle_options = MleOptions{grid_points, max_evals, tol};
      const auto records = run_experiment(run_cfg);
      const SummaryTable table = summarize(records, run_cfg);
      auto est_csv = detail::open_out(out / "estimates.csv");
      write_estimates_csv(est_csv, records, run_cfg.family.shape);
      auto sum_csv = detail::open_out(out / "summary.csv");
      write_summary_csv(sum_csv, table);
      json echo = experiment_config_to_json(run_cfg);
      echo["replications"] = run_cfg.replications;
      detail::write_manifest(out, "replicate", echo, seed);
      std::cout << records.size() << " records over " << run_cfg.replications
                << " replications\n";
      for (const auto& row : table.rows) {
        if (row.n != run_cfg.n_grid.back()) continue;
        std::cout << "n=" << row.n << " " << estimator_name(row.estimator) << " " << row.coord
                  << ": mean " << row.mean << ", sd " << row.sd << " (" << row.used << "/"
                  << row.count << " used)\n";
      }
      return 0;
    }

    if (app.got_subcommand(diagnose_cmd)) {
      const DiagnosticsReport rep = diagnostics(cfg.family, n_flag, diag_reps, seed, cfg.site_margin);
      json j;
      j["n"] = rep.n;
      j["replications"] = rep.replications;
      j["regime"] = regime_name(rep.regime.tag);
      j["regime_violation"] = rep.regime_violation;
      if (!rep.regime_violation) {
        j["limit"] = rep.limit;
        j["mean_ratio"] = rep.mean_ratio;
        j["sd_ratio"] = rep.sd_ratio;
        json hist = json::array();
        for (const auto& [edge, count] : rep.histogram) hist.push_back({edge, count});
        j["histogram"] = hist;
      }
      detail::open_out(out / "diagnose.json") << j.dump(2) << "\n";
      detail::write_manifest(out, "diagnose", experiment_config_to_json(cfg), seed);
      if (rep.regime_violation) {
        std::cout << "regime violation: family is " << regime_name(rep.regime.tag)
                  << "; no hitting-time limit to compare\n";
      } else {
        std::cout << "mean T_n/n = " << rep.mean_ratio << ", analytic limit = " << rep.limit
                  << "\n";
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

inline int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace rwre::cli
