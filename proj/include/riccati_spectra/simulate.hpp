#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "riccati_spectra/riccati.hpp"

namespace riccati_spectra {

enum class GainMode { steady, transient };

struct SimulationConfig {
  double dt = 1e-3;
  double t_end = 100.0;
  /// Discarded transient. Defaults to 10 / |spectral abscissa of A - K C|,
  /// capped at t_end / 2.
  std::optional<double> burn_in;
  long trials = 500;
  std::uint64_t seed = 0;
  /// Covariance of x(0) (PSD); identity when absent. In transient mode it is
  /// also the initial condition of the Riccati ODE.
  std::optional<RealMatrix> initial_state_cov;
  GainMode gain_mode = GainMode::steady;
  /// Steady mode only: run the filter with this gain instead of the optimal
  /// one, e.g. for negative controls. Gaps are still measured against P.
  std::optional<RealMatrix> gain_override;
  /// Worker threads; 0 reads RICCATI_SPECTRA_THREADS or uses the hardware
  /// count. Never changes the numbers.
  unsigned threads = 0;
};

struct LagCorrelation {
  double lag = 0.0;
  /// E[nu_{k+j} nu_k^T] normalized entrywise by sqrt(R_ii(0) R_jj(0)).
  RealMatrix correlation;
};

struct SimulationSummary {
  RealMatrix empirical_output_error_cov;  ///< sample covariance of z - ybar = C e
  RealMatrix empirical_state_error_cov;   ///< sample covariance of e = x - xhat
  std::vector<LagCorrelation> innovation_autocorr;  ///< lags dt, 2dt, ..., 20dt
  double relative_gap_output = 0.0;  ///< vs C P C^T, Frobenius
  double relative_gap_state = 0.0;   ///< vs P, Frobenius
  long trials = 0;
  long steps = 0;  ///< innovation samples per trial after burn-in
  double dt = 0.0;
  double burn_in = 0.0;
  /// dt * max(1, spectral radius of the closed loop)
  double discretization_allowance = 0.0;
};

/// Number of lags kept in innovation_autocorr.
inline constexpr int kWhitenessLags = 20;

/// Monte Carlo run of plant and filter with Euler-Maruyama steps: process
/// increments ~ N(0, W dt), per-step measurement noise ~ N(0, V / dt).
/// Trials draw from independent substreams of seed and are reduced in trial
/// order, so results are bit-identical for any thread count.
///
/// Throws ContractError for invalid configurations and SimulationFailure
/// when the explicit step is unstable for the closed loop (trial -1) or a
/// trial produces non-finite or exploding states.
SimulationSummary run_monte_carlo(const SystemModel& model, const CareSolution& care, const SimulationConfig& cfg);

struct WhitenessVerdict {
  bool passed = true;
  double threshold = 0.0;
  double worst_value = 0.0;
  double worst_lag = 0.0;
  Eigen::Index worst_row = 0;
  Eigen::Index worst_col = 0;
};

/// Every normalized autocorrelation entry at lags >= dt must stay within
/// 4 / sqrt(trials * steps) + 0.02 * discretization_allowance.
WhitenessVerdict whiteness_check(const SimulationSummary& summary, long trials, long steps);

}  // namespace riccati_spectra
