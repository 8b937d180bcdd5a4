#pragma once

#include <string>
#include <vector>

#include "riccati_spectra/matrix_core.hpp"

namespace riccati_spectra {

/// Outcome of validating a candidate (A, C, W, V) quadruple.
struct ValidationReport {
  bool detectable = true;
  /// Eigenvalues of A with Re >= -1e-9 that fail the PBH rank test.
  Spectrum offending_eigenvalues;
  double w_symmetry_defect = 0.0;
  double v_symmetry_defect = 0.0;
  /// Minimum eigenvalues of W and V.
  double w_min_eigenvalue = 0.0;
  double v_min_eigenvalue = 0.0;
  /// True when a sub-tolerance asymmetry was repaired by (M + M^T)/2.
  bool w_symmetrized = false;
  bool v_symmetrized = false;
  /// Every violated invariant, in human-readable form. Empty when accepted.
  std::vector<std::string> violations;
};

/// Raised by build_model; carries the full report with every violation.
class ModelRejection : public std::runtime_error {
 public:
  explicit ModelRejection(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

/// The plant xdot = A x + w, y = C x + v with noise intensities W >= 0 and
/// V > 0, and (A, C) detectable. Only build_model constructs one, so every
/// instance satisfies those invariants.
class SystemModel {
 public:
  const RealMatrix& A() const noexcept { return A_; }
  const RealMatrix& C() const noexcept { return C_; }
  const RealMatrix& W() const noexcept { return W_; }
  const RealMatrix& V() const noexcept { return V_; }
  const RealMatrix& V_inverse() const noexcept { return V_inv_; }
  /// C^T V^{-1} C
  const RealMatrix& output_information() const noexcept { return CtVinvC_; }
  const Spectrum& spectrum() const noexcept { return spectrum_; }
  const ValidationReport& validation() const noexcept { return report_; }

  Eigen::Index state_dim() const noexcept { return A_.rows(); }
  Eigen::Index output_dim() const noexcept { return C_.rows(); }

 private:
  friend SystemModel build_model(const RealMatrix&, const RealMatrix&, const RealMatrix&, const RealMatrix&);
  SystemModel() = default;

  RealMatrix A_, C_, W_, V_, V_inv_, CtVinvC_;
  Spectrum spectrum_;
  ValidationReport report_;
};

/// PBH test on every eigenvalue of A with Re >= -1e-9: [A - lambda I; C] must
/// have smallest singular value above 1e-9 * (1 + ||A||_F + ||C||_F).
ValidationReport validate_detectability(const RealMatrix& A, const RealMatrix& C);

/// Validates dimensions, symmetry, definiteness and detectability. Throws
/// DimensionError for inconsistent shapes, ModelRejection listing every
/// violated invariant otherwise.
SystemModel build_model(const RealMatrix& A, const RealMatrix& C, const RealMatrix& W, const RealMatrix& V);

}  // namespace riccati_spectra
