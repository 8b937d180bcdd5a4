#include <doctest.h>

#include "riccati_spectra/simulate.hpp"
#include "support/suite.hpp"

using namespace riccati_spectra;

namespace {

SimulationConfig short_run(long trials, double t_end, std::uint64_t seed) {
  SimulationConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = t_end;
  cfg.trials = trials;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("scalar plant reproduces the steady covariance") {
  const SystemModel m = suite::build(suite::scalar(-1, 1, 3, 1));
  const CareSolution sol = solve_care(m);
  const SimulationSummary s = run_monte_carlo(m, sol, short_run(100, 50.0, 1));
  CHECK(s.relative_gap_output <= 0.05);
  CHECK(s.relative_gap_state <= 0.05);
  CHECK(s.innovation_autocorr.size() == kWhitenessLags);
  CHECK(s.innovation_autocorr.front().lag == doctest::Approx(1e-3));
  CHECK(whiteness_check(s, s.trials, s.steps).passed);
}

TEST_CASE("results do not depend on the thread count") {
  const SystemModel m = suite::build(suite::random_plants(1, 51).front());
  const CareSolution sol = solve_care(m);
  SimulationConfig cfg = short_run(7, 5.0, 99);
  cfg.burn_in = 1.0;
  cfg.threads = 1;
  const SimulationSummary a = run_monte_carlo(m, sol, cfg);
  cfg.threads = 3;
  const SimulationSummary b = run_monte_carlo(m, sol, cfg);
  CHECK(a.empirical_state_error_cov == b.empirical_state_error_cov);
  CHECK(a.empirical_output_error_cov == b.empirical_output_error_cov);
  for (std::size_t i = 0; i < a.innovation_autocorr.size(); ++i) {
    CHECK(a.innovation_autocorr[i].correlation == b.innovation_autocorr[i].correlation);
  }
  cfg.seed = 100;
  const SimulationSummary c = run_monte_carlo(m, sol, cfg);
  CHECK(c.empirical_state_error_cov != a.empirical_state_error_cov);
}

TEST_CASE("a badly detuned gain colors the innovations") {
  const SystemModel m = suite::build(suite::scalar(-1, 1, 3, 1));
  const CareSolution sol = solve_care(m);
  SimulationConfig cfg = short_run(100, 50.0, 2);
  cfg.gain_override = 0.1 * sol.K;
  const SimulationSummary s = run_monte_carlo(m, sol, cfg);
  CHECK_FALSE(whiteness_check(s, s.trials, s.steps).passed);
  CHECK(s.relative_gap_output > 0.05);
}

TEST_CASE("noise-free plant started at rest stays at rest") {
  const SystemModel m = suite::build(suite::scalar(-2, 1, 0, 1e-4));
  const CareSolution sol = solve_care(m);
  SimulationConfig cfg = short_run(4, 2.0, 3);
  cfg.initial_state_cov = RealMatrix::Zero(1, 1);
  const SimulationSummary s = run_monte_carlo(m, sol, cfg);
  CHECK(s.empirical_state_error_cov.norm() == 0.0);
  CHECK(s.empirical_output_error_cov.norm() == 0.0);
  CHECK(whiteness_check(s, s.trials, s.steps).passed);
}

TEST_CASE("transient gains approach the steady result") {
  const SystemModel m = suite::build(suite::scalar(0.5, 1, 2, 1));
  const CareSolution sol = solve_care(m);
  SimulationConfig cfg = short_run(60, 40.0, 4);
  cfg.initial_state_cov = 5.0 * RealMatrix::Identity(1, 1);
  const SimulationSummary steady = run_monte_carlo(m, sol, cfg);
  cfg.gain_mode = GainMode::transient;
  const SimulationSummary transient = run_monte_carlo(m, sol, cfg);
  CHECK(transient.relative_gap_output <= 0.05);
  CHECK(std::abs(transient.empirical_output_error_cov(0, 0) - steady.empirical_output_error_cov(0, 0)) <=
        0.05 * sol.output_error_cov(0, 0));
}

TEST_CASE("gaps shrink with more data") {
  const SystemModel m = suite::build(suite::scalar(-1, 1, 3, 1));
  const CareSolution sol = solve_care(m);
  const double small = run_monte_carlo(m, sol, short_run(10, 20.0, 5)).relative_gap_output;
  const double large = run_monte_carlo(m, sol, short_run(160, 20.0, 5)).relative_gap_output;
  CHECK(large <= 1.5 * small);
}

TEST_CASE("failures and contract") {
  const SystemModel m = suite::build(suite::scalar(-1, 1, 3, 1));
  const CareSolution sol = solve_care(m);
  SUBCASE("explicit step beyond the stability limit") {
    SimulationConfig cfg = short_run(2, 500.0, 1);
    cfg.dt = 1.5;  // |1 + dt * (-2)| = 2
    try {
      run_monte_carlo(m, sol, cfg);
      FAIL("expected failure");
    } catch (const SimulationFailure& e) {
      CHECK(e.trial() == -1);
    }
  }
  SUBCASE("non-Hurwitz override") {
    SimulationConfig cfg = short_run(2, 5.0, 1);
    cfg.gain_override = RealMatrix::Constant(1, 1, -2.0);
    CHECK_THROWS_AS(run_monte_carlo(m, sol, cfg), SimulationFailure);
  }
  SUBCASE("invalid configurations") {
    SimulationConfig cfg = short_run(2, 5.0, 1);
    cfg.burn_in = 6.0;
    CHECK_THROWS_AS(run_monte_carlo(m, sol, cfg), ContractError);
    cfg = short_run(0, 5.0, 1);
    CHECK_THROWS_AS(run_monte_carlo(m, sol, cfg), ContractError);
    cfg = short_run(2, 0.05, 1);
    cfg.burn_in = 0.0;
    CHECK_THROWS_AS(run_monte_carlo(m, sol, cfg), ContractError);  // fewer than 100 steps
    cfg = short_run(2, 5.0, 1);
    cfg.initial_state_cov = -RealMatrix::Identity(1, 1);
    CHECK_THROWS_AS(run_monte_carlo(m, sol, cfg), ContractError);
  }
}
