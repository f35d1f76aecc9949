#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "rwre/env_model.hpp"
#include "test_support.hpp"

using namespace rwre;

namespace {

ThetaBox full_p_box() {
  ThetaBox b;
  b.iv = {{0.0, 1.0}};
  return b;
}

EnvFamily example1() { return make_two_point_known(0.4, 0.7, 0.3); }

}  // namespace

TEST_CASE("log_rho_mean: two-point closed form") {
  // symmetric environment, rho == 1
  const auto sym = make_two_point_known(0.5, 0.5, 0.4, full_p_box());
  CHECK(log_rho_mean(sym) == Approx(0.0).margin(1e-15));

  const double expected = 0.3 * std::log(0.6 / 0.4) + 0.7 * std::log(0.3 / 0.7);
  CHECK(log_rho_mean(example1()) == Approx(expected).margin(1e-14));
  CHECK(log_rho_mean(example1()) == Approx(-0.4715).margin(2e-4));
}

TEST_CASE("log_rho_mean: beta family equals digamma(beta) - digamma(alpha)") {
  // psi(1) - psi(5) = -(1 + 1/2 + 1/3 + 1/4) = -25/12 by the recurrence
  CHECK(log_rho_mean(make_beta(5.0, 1.0)) == Approx(-25.0 / 12.0).margin(1e-12));
  // psi(2) - psi(3) = -1/2
  ThetaBox wide;
  wide.iv = {{0.1, 20.0}, {0.05, 20.0}};
  CHECK(log_rho_mean(make_beta(3.0, 2.0, wide)) == Approx(-0.5).margin(1e-12));
}

TEST_CASE("rho_mean per family") {
  CHECK(rho_mean(example1()) == Approx(0.75).margin(1e-14));
  CHECK(rho_mean(make_beta(5.0, 1.0)) == Approx(0.25).margin(1e-14));
  const auto sym = make_two_point_known(0.5, 0.5, 1.0, full_p_box());
  CHECK(rho_mean(sym) == Approx(1.0).margin(1e-14));
  // beta with alpha <= 1 has no first rho-moment
  ThetaBox wide;
  wide.iv = {{0.1, 20.0}, {0.05, 20.0}};
  CHECK(std::isinf(rho_mean(make_beta(0.9, 0.5, wide))));
}

TEST_CASE("classify_regime") {
  CHECK(classify_regime(example1()).tag == Regime::Tag::transient_right_ballistic);
  CHECK(classify_regime(make_beta(5.0, 1.0)).tag == Regime::Tag::transient_right_ballistic);

  const auto sub = make_two_point_known(0.2, 0.9, 0.5);
  const Regime r = classify_regime(sub);
  CHECK(r.tag == Regime::Tag::transient_right_subballistic);
  CHECK(r.e_rho == Approx(0.5 * 4.0 + 0.5 / 9.0).margin(1e-12));
  CHECK(r.e_log_rho == Approx(0.5 * std::log(4.0 / 9.0)).margin(1e-12));

  const auto rec = make_two_point_known(0.5, 0.5, 0.2, full_p_box());
  CHECK(classify_regime(rec).tag == Regime::Tag::recurrent);

  const auto left = make_two_point_known(0.3, 0.3, 1.0, full_p_box());
  CHECK(classify_regime(left).tag == Regime::Tag::transient_left);

  // any degenerate point mass above 1/2 is ballistic
  for (double a : {0.55, 0.7, 0.9, 0.99}) {
    const auto fam = make_two_point_known(a, a, 1.0, full_p_box());
    CHECK(classify_regime(fam).tag == Regime::Tag::transient_right_ballistic);
  }
}

TEST_CASE("hitting_time_limit") {
  CHECK(hitting_time_limit(example1()) == Approx(7.0).margin(1e-12));
  CHECK(hitting_time_limit(make_beta(5.0, 1.0)) == Approx(5.0 / 3.0).margin(1e-12));

  // nu -> delta_1 limit: deterministic right walk, T_n = n
  const auto det = make_two_point_known(1.0 - 1e-9, 1.0 - 1e-9, 1.0, full_p_box());
  CHECK(hitting_time_limit(det) == Approx(1.0).margin(1e-8));

  CHECK_THROWS_AS(hitting_time_limit(make_two_point_known(0.2, 0.9, 0.5)), RegimeError);

  // strictly above 1 for every non-degenerate ballistic family
  for (double p : {0.0, 0.25, 0.5}) {
    const auto fam = make_two_point_known(0.55, 0.8, p, full_p_box());
    CHECK(hitting_time_limit(fam) > 1.0);
  }
  ThetaBox wide;
  wide.iv = {{0.1, 20.0}, {0.05, 20.0}};
  CHECK(hitting_time_limit(make_beta(9.0, 2.0, wide)) > 1.0);
}

TEST_CASE("sample_env: support and determinism") {
  Rng rng(1234);
  const auto env = sample_env(example1(), -50, 200, rng);
  CHECK(env.x_min() == -50);
  CHECK(env.x_max() == 200);
  CHECK(env.size() == 251);
  for (int x = -50; x <= 200; ++x) {
    const double w = env.omega_at(x);
    CHECK((w == 0.4 || w == 0.7));
  }

  Rng rng_a(99), rng_b(99);
  const auto a = sample_env(example1(), -100, 100, rng_a);
  const auto b = sample_env(example1(), -100, 100, rng_b);
  CHECK(a == b);

  const auto deg = make_two_point_known(0.4, 0.7, 1.0, full_p_box());
  Rng rng_d(5);
  const auto env_d = sample_env(deg, -10, 10, rng_d);
  for (int x = -10; x <= 10; ++x) CHECK(env_d.omega_at(x) == 0.4);
}

TEST_CASE("sample_env: beta sample mean within 3 standard errors of alpha/(alpha+beta)") {
  Rng rng(777);
  const auto env = sample_env(make_beta(5.0, 1.0), 0, 99999, rng);
  double sum = 0.0;
  for (double w : env.omega()) sum += w;
  const double mean = sum / 1e5;
  const double sd = std::sqrt(5.0 / (36.0 * 7.0));  // Beta(5,1) std dev
  CHECK(std::fabs(mean - 5.0 / 6.0) < 3.0 * sd / std::sqrt(1e5));
}

TEST_CASE("Monte Carlo E log rho matches the analytic value within 4 standard errors") {
  for (const EnvFamily& fam : {example1(), make_beta(5.0, 1.0)}) {
    Rng rng(2026);
    std::vector<double> logs;
    logs.reserve(1000000);
    for (int i = 0; i < 1000000; ++i) {
      const double w = sample_omega(fam, rng);
      logs.push_back(std::log((1.0 - w) / w));
    }
    const double mc = test_support::mean_of(logs);
    const double se = test_support::se_of(logs);
    CHECK(std::fabs(mc - log_rho_mean(fam)) < 4.0 * se);
  }
}

TEST_CASE("EnvFamily validation") {
  CHECK_THROWS_AS(make_two_point_known(0.7, 0.4, 0.3), std::invalid_argument);  // a1 > a2
  CHECK_THROWS_AS(make_two_point_known(0.0, 0.7, 0.3), std::invalid_argument);  // support edge
  CHECK_THROWS_AS(make_two_point_known(0.4, 0.7, 1.5), std::invalid_argument);  // p outside [0,1]
  CHECK_THROWS_AS(make_beta(-1.0, 1.0), std::invalid_argument);
  // theta must sit inside the box
  CHECK_THROWS_AS(make_two_point_known(0.4, 0.7, 1.0), std::invalid_argument);
  // default beta box carries the alpha > beta + 1 region
  CHECK_THROWS_AS(make_beta(2.0, 2.5), std::invalid_argument);
  CHECK_NOTHROW(make_beta(5.0, 1.0));
}

TEST_CASE("Environment validation") {
  CHECK_THROWS_AS(Environment(0, {0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Environment(0, {}), std::invalid_argument);
  CHECK_THROWS_AS(Environment(5, {0.5}), std::invalid_argument);
  const Environment env(-1, {0.3, 0.6, 0.9});
  CHECK(env.omega_at(-1) == 0.3);
  CHECK(env.rho_at(1) == Approx((1.0 - 0.9) / 0.9));
  CHECK_THROWS_AS(env.omega_at(2), std::out_of_range);
}
