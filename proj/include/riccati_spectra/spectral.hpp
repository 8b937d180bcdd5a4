#pragma once

#include <optional>
#include <string>
#include <vector>

#include "riccati_spectra/quadrature.hpp"
#include "riccati_spectra/riccati.hpp"

namespace riccati_spectra {

/// Evaluates the Popov function
///
///   Phi_y(omega) = C (j omega I - A)^{-1} W (-j omega I - A)^{-T} C^T + V
///
/// on the imaginary axis. Holds a copy of the model together with V^{-1/2}
/// and a square-root factor of W.
class PopovEvaluator {
 public:
  explicit PopovEvaluator(const SystemModel& model);

  const SystemModel& model() const noexcept { return model_; }
  const RealMatrix& v_inverse_sqrt() const noexcept { return v_inv_sqrt_; }

  /// C (j omega I - A)^{-1}; throws PoleAtFrequency when j omega is within
  /// 1e-12 (1 + ||A||_F) of an eigenvalue of A.
  ComplexMatrix output_resolvent(double omega) const;

  /// V^{-1/2} (Phi_y(omega) - V) V^{-1/2}, Hermitian PSD by construction.
  ComplexMatrix normalized_excess(double omega) const;

  /// |Im lambda| for every eigenvalue of A: partition points for quadrature.
  std::vector<double> singular_frequencies() const;

 private:
  SystemModel model_;
  RealMatrix v_inv_sqrt_;
  RealMatrix w_factor_;
  double pole_tol_;
};

ComplexMatrix popov_eval(const PopovEvaluator& ev, double omega);

/// ln det(V^{-1/2} Phi_y(omega) V^{-1/2}) = ln[det Phi_y(omega) / det V].
double logdet_ratio(const PopovEvaluator& ev, double omega);

/// (1/2pi) * integral over the real line of logdet_ratio, to relative
/// tolerance tol in [1e-12, 1e-3].
double frequency_integral(const PopovEvaluator& ev, double tol);
QuadratureResult frequency_integral_detail(const PopovEvaluator& ev, double tol);

/// sum_i max(0, Re lambda_i)
double unstable_sum(const Spectrum& spectrum);

/// One identity check: the absolute difference of two named quantities and
/// the tolerance it is judged against.
struct IdentityResidual {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed() const { return residual <= tolerance; }
};

/// Zeros/poles evaluation of the trace identity.
struct ZerosPolesForm {
  Spectrum zeros;  ///< surviving zeros of det[Phi_y(s) V^{-1}]
  Spectrum poles;  ///< surviving poles
  std::size_t cancelled_pairs = 0;
  double zeros_term = 0.0;
  double poles_term = 0.0;
  double unstable_sum = 0.0;
  double trace_from_zeros_poles = 0.0;
  std::vector<std::string> flags;
};

struct BodeIntegral {
  double integral = 0.0;     ///< (1/2pi) int ln|det[I + L(j omega)]^{-1}| d omega
  double closed_form = 0.0;  ///< -tr(C K)/2 + sum max(0, Re lambda(A))
  double residual = 0.0;
};

struct SpectralReport {
  double quadrature_tol = 0.0;
  double integral_term = 0.0;
  double unstable_sum = 0.0;
  double trace_from_care = 0.0;
  /// integral_term + 2 * unstable_sum
  double trace_from_integral = 0.0;
  std::optional<ZerosPolesForm> zeros_poles;
  std::optional<BodeIntegral> bode;
  std::vector<IdentityResidual> residuals;
  std::vector<std::string> flags;
};

/// Trace identity: fills the integral, the instability term, both
/// traces and the "integral_identity" residual with tolerance
/// max(tol, tol * trace). Quadrature runs at min(max(tol * 1e-3, 1e-12), 1e-3).
SpectralReport verify_theorem1(const SystemModel& model, const CareSolution& care, double tol);

/// Candidate zeros are lambda(A - K C) and their negatives, candidate poles
/// lambda(A) and their negatives (from the spectral factorization); equal
/// values within 1e-7 (1 + ||A||_F) cancel pairwise, greedy nearest match.
ZerosPolesForm zeros_poles_form(const SystemModel& model, const CareSolution& care);

BodeIntegral bode_sensitivity_integral(const SystemModel& model, const CareSolution& care, double tol);

struct TraceBounds {
  double lower = 0.0;
  double upper = 0.0;  ///< +inf when C^T V^{-1} C is singular
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// tr P bounds from trace_from_integral and the extreme eigenvalues of C^T V^{-1} C.
TraceBounds trace_bounds(const SystemModel& model, const SpectralReport& report);

/// One reduced formula evaluated on its own and compared with the Riccati value.
struct SpecialCase {
  std::string name;
  std::string condition;
  bool applicable = false;
  double reduced_value = 0.0;
  double reference_value = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed() const { return !applicable || residual <= tolerance; }
};

/// Every reduction is listed; inapplicable ones are marked applicable=false.
std::vector<SpecialCase> special_case_checks(const SystemModel& model, const CareSolution& care,
                                             const SpectralReport& report, double tol);

}  // namespace riccati_spectra
