#pragma once

#include <complex>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "riccati_spectra/errors.hpp"

namespace riccati_spectra {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Eigenvalues of a real square matrix, repeated according to algebraic
/// multiplicity. Non-real values come in conjugate pairs.
using Spectrum = std::vector<Complex>;

/// Absolute floor applied to relative tolerances when a norm vanishes.
inline constexpr double kNormFloor = 1e-14;

/// max(||M||_F, kNormFloor)
double norm_or_floor(const RealMatrix& M);

void require_square(const RealMatrix& M, std::string_view name);
void require_finite(const RealMatrix& M, std::string_view name);
void require_finite(const ComplexMatrix& M, std::string_view name);

/// ||M - M^T||_F / max(||M||_F, floor)
double symmetry_defect(const RealMatrix& M);
RealMatrix symmetrize(const RealMatrix& M);

/// Smallest eigenvalue of the symmetric part of M.
double min_symmetric_eigenvalue(const RealMatrix& M);
/// Largest eigenvalue of the symmetric part of M.
double max_symmetric_eigenvalue(const RealMatrix& M);

/// S with S*S^T = M for symmetric PSD M (negative roundoff eigenvalues clipped).
RealMatrix psd_factor(const RealMatrix& M);

/// Symmetric M^{-1/2} of a symmetric positive definite matrix.
RealMatrix inverse_sqrt_spd(const RealMatrix& M);

double min_singular_value(const ComplexMatrix& M);

/// All eigenvalues of a real square matrix.
///
/// Each returned value is checked against the residual contract
/// sigma_min(M - lambda*I) <= 1e-8 * (1 + ||M||_F); a violation, or a failure
/// of the underlying QR iteration, raises NumericalError carrying ||M||_F.
/// Values are sorted by real part, then imaginary part.
Spectrum eigenvalues(const RealMatrix& M);

/// ln det M for Hermitian positive definite M, accumulated as the sum of the
/// logs of Cholesky pivots. Throws ContractError when M is not Hermitian to
/// 1e-10 relative, DefinitenessError on a non-positive pivot.
double hermitian_logdet(const ComplexMatrix& M);

/// ln det(I + E) for Hermitian E with I + E positive definite. The pivots are
/// carried as offsets from one so that tiny E loses no relative accuracy.
double logdet_identity_plus(const ComplexMatrix& E);

/// ln |det(I + E)| for a general square complex E, with the same offset
/// bookkeeping as logdet_identity_plus when E is small.
double log_abs_det_identity_plus(const ComplexMatrix& E);

/// Matrix sign function of H by the determinant-scaled Newton iteration.
/// Throws NoStabilizingSolution when H has an eigenvalue within
/// 1e-9*||H||_F of the imaginary axis.
RealMatrix matrix_sign(const RealMatrix& H);

/// Orthonormal basis (2m x m) of the invariant subspace of H belonging to its
/// eigenvalues with negative real part, computed with the scaled matrix sign
/// iteration. Throws NoStabilizingSolution when H has an eigenvalue within
/// 1e-9*||H||_F of the imaginary axis.
RealMatrix stable_invariant_subspace(const RealMatrix& H);

/// X with A*X = B. Throws SolverError when the condition estimate of A
/// reaches 1e12 or the residual contract fails.
RealMatrix solve_linear(const RealMatrix& A, const RealMatrix& B);

double spectral_abscissa(const Spectrum& spectrum);
bool is_hurwitz(const Spectrum& spectrum);

}  // namespace riccati_spectra
