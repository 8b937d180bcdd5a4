#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "riccati_spectra/model.hpp"

namespace riccati_spectra {

/// Steady-state Kalman-Bucy filter quantities for one model.
struct CareSolution {
  RealMatrix P;                 ///< state-error covariance, m x m
  RealMatrix K;                 ///< steady gain P C^T V^{-1}, m x l
  RealMatrix closed_loop;       ///< A - K C
  Spectrum closed_loop_spectrum;
  double residual = 0.0;        ///< ||A P + P A^T + W - P C^T V^{-1} C P||_F
  double residual_bound = 0.0;  ///< the bound residual was checked against
  RealMatrix output_error_cov;  ///< C P C^T
  int iterations = 0;           ///< Newton steps taken (0 for the Hamiltonian route)
};

/// Left side of the filter Riccati equation evaluated at P.
RealMatrix care_lhs(const SystemModel& model, const RealMatrix& P);

/// 1e-8 * (1 + ||A|| ||P|| + ||W|| + ||P||^2 ||C^T V^{-1} C||), Frobenius norms.
double care_residual_bound(const SystemModel& model, const RealMatrix& P);

/// Stabilizing solution of A P + P A^T + W - P C^T V^{-1} C P = 0 from the
/// stable invariant subspace [X1; X2] of
///
///   H = [ A^T   -C^T V^{-1} C ]
///       [ -W    -A            ],   P = X2 X1^{-1}.
///
/// Throws NoStabilizingSolution when H has imaginary-axis eigenvalues, X1 is
/// singular, or A - K C comes out non-Hurwitz.
CareSolution solve_care(const SystemModel& model);

/// Solves F X + X F^T + Q = 0 through the m^2 x m^2 Kronecker system.
RealMatrix solve_lyapunov(const RealMatrix& F, const RealMatrix& Q);

/// Some K0 with A - K0 C Hurwitz (zero when A is already Hurwitz).
RealMatrix stabilizing_gain(const SystemModel& model);

/// Newton-Kleinman iteration from a stabilizing K0. Independent of the
/// Hamiltonian route; used as its oracle. Throws ContractError if K0 does not
/// stabilize, NonConvergence after 200 iterations.
CareSolution newton_kleinman_oracle(const SystemModel& model, const RealMatrix& K0);

struct RiccatiTrajectory {
  std::vector<double> times;
  std::vector<RealMatrix> covariances;
  /// ||P(t_end) - P_inf||_F / ||P_inf||_F, present when a reference was given.
  std::optional<double> terminal_gap;
};

struct RiccatiOdeOptions {
  /// Keep every stride-th step (the final state is always kept).
  std::size_t stride = 1;
  /// Steady-state solution to measure terminal_gap against.
  const CareSolution* reference = nullptr;
};

/// Right side A P + P A^T + W - P C^T V^{-1} C P of the Riccati ODE.
RealMatrix riccati_rhs(const SystemModel& model, const RealMatrix& P);

/// Classical RK4 on the Riccati ODE from P0, symmetrizing after every step.
/// The step is shrunk uniformly so that the last step lands on t_end.
/// Throws RiccatiBlowUp with the failure time on non-finite entries.
RiccatiTrajectory integrate_riccati_ode(const SystemModel& model, const RealMatrix& P0, double t_end, double dt,
                                        const RiccatiOdeOptions& options = {});

}  // namespace riccati_spectra
