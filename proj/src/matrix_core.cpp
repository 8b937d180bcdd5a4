#include "riccati_spectra/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace riccati_spectra {

namespace {

constexpr double kEigenResidualTol = 1e-8;
constexpr double kHermitianTol = 1e-10;
constexpr double kImaginaryAxisTol = 1e-9;
constexpr double kSignStepTol = 1e-12;
constexpr double kSubspaceResidualTol = 1e-8;
constexpr double kMaxCondition = 1e12;
constexpr double kSolveResidualTol = 1e-10;
constexpr int kMaxSignIterations = 100;

std::string shape(const RealMatrix& M) {
  return std::to_string(M.rows()) + "x" + std::to_string(M.cols());
}

// log|det M| via partial pivoting; used for determinant scaling only.
double log_abs_det(const RealMatrix& M) {
  Eigen::PartialPivLU<RealMatrix> lu(M);
  const RealMatrix& U = lu.matrixLU();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < U.rows(); ++i) acc += std::log(std::abs(U(i, i)));
  return acc;
}

}  // namespace

double norm_or_floor(const RealMatrix& M) { return std::max(M.norm(), kNormFloor); }

void require_square(const RealMatrix& M, std::string_view name) {
  if (M.rows() != M.cols() || M.rows() == 0) {
    throw DimensionError(std::string(name) + " must be square and non-empty, got " + shape(M));
  }
}

void require_finite(const RealMatrix& M, std::string_view name) {
  if (!M.allFinite()) throw ContractError(std::string(name) + " has non-finite entries");
}

void require_finite(const ComplexMatrix& M, std::string_view name) {
  if (!M.allFinite()) throw ContractError(std::string(name) + " has non-finite entries");
}

double symmetry_defect(const RealMatrix& M) {
  return (M - M.transpose()).norm() / norm_or_floor(M);
}

RealMatrix symmetrize(const RealMatrix& M) { return 0.5 * (M + M.transpose()); }

double min_symmetric_eigenvalue(const RealMatrix& M) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(symmetrize(M), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_symmetric_eigenvalue(const RealMatrix& M) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(symmetrize(M), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

RealMatrix psd_factor(const RealMatrix& M) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(symmetrize(M));
  Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal();
}

RealMatrix inverse_sqrt_spd(const RealMatrix& M) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(symmetrize(M));
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw DefinitenessError("inverse square root requires a positive definite matrix");
  }
  Eigen::VectorXd d = es.eigenvalues().cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

double min_singular_value(const ComplexMatrix& M) {
  Eigen::JacobiSVD<ComplexMatrix> svd(M);
  return svd.singularValues().minCoeff();
}

Spectrum eigenvalues(const RealMatrix& M) {
  require_square(M, "eigenvalues input");
  require_finite(M, "eigenvalues input");
  const double norm = M.norm();
  Eigen::EigenSolver<RealMatrix> es(M, false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigenvalue iteration did not converge", norm);
  }
  Spectrum values(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  const ComplexMatrix Mc = M.cast<Complex>();
  const auto n = M.rows();
  for (const Complex& lambda : values) {
    ComplexMatrix shifted = Mc - lambda * ComplexMatrix::Identity(n, n);
    if (min_singular_value(shifted) > kEigenResidualTol * (1.0 + norm)) {
      std::ostringstream os;
      os << "eigenvalue " << lambda << " fails residual check";
      throw NumericalError(os.str(), norm);
    }
  }
  std::sort(values.begin(), values.end(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return values;
}

double hermitian_logdet(const ComplexMatrix& M) {
  if (M.rows() != M.cols() || M.rows() == 0) throw DimensionError("hermitian_logdet needs a square matrix");
  require_finite(M, "hermitian_logdet input");
  const double defect = (M - M.adjoint()).norm();
  if (defect > kHermitianTol * std::max(M.norm(), kNormFloor)) {
    throw ContractError("hermitian_logdet input is not Hermitian");
  }
  const auto n = M.rows();
  ComplexMatrix L = ComplexMatrix::Zero(n, n);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = M(j, j).real();
    for (Eigen::Index k = 0; k < j; ++k) pivot -= std::norm(L(j, k));
    if (!(pivot > 0.0)) {
      throw DefinitenessError("non-positive pivot " + std::to_string(pivot) + " at index " + std::to_string(j));
    }
    const double root = std::sqrt(pivot);
    L(j, j) = root;
    acc += std::log(pivot);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      Complex s = M(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= L(i, k) * std::conj(L(j, k));
      L(i, j) = s / root;
    }
  }
  return acc;
}

double logdet_identity_plus(const ComplexMatrix& E) {
  if (E.rows() != E.cols() || E.rows() == 0) throw DimensionError("logdet_identity_plus needs a square matrix");
  const auto n = E.rows();
  ComplexMatrix L = ComplexMatrix::Zero(n, n);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    // pivot = 1 + offset; the identity contributes only to the diagonal
    double offset = E(j, j).real();
    for (Eigen::Index k = 0; k < j; ++k) offset -= std::norm(L(j, k));
    const double pivot = 1.0 + offset;
    if (!(pivot > 0.0)) {
      throw DefinitenessError("I + E is not positive definite (pivot " + std::to_string(pivot) + ")");
    }
    const double root = std::sqrt(pivot);
    L(j, j) = root;
    acc += std::log1p(offset);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      Complex s = E(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= L(i, k) * std::conj(L(j, k));
      L(i, j) = s / root;
    }
  }
  return acc;
}

double log_abs_det_identity_plus(const ComplexMatrix& E) {
  if (E.rows() != E.cols() || E.rows() == 0) throw DimensionError("log_abs_det_identity_plus needs a square matrix");
  const auto n = E.rows();
  if (E.norm() <= 0.5) {
    // I + E is diagonally dominant: eliminate without pivoting, keeping the
    // diagonal as an offset from one.
    ComplexMatrix U = E;
    double acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const Complex offset = U(k, k);
      const Complex pivot = 1.0 + offset;
      acc += 0.5 * std::log1p(2.0 * offset.real() + std::norm(offset));
      for (Eigen::Index i = k + 1; i < n; ++i) {
        const Complex factor = U(i, k) / pivot;
        for (Eigen::Index j = k + 1; j < n; ++j) U(i, j) -= factor * U(k, j);
      }
    }
    return acc;
  }
  ComplexMatrix M = ComplexMatrix::Identity(n, n) + E;
  Eigen::PartialPivLU<ComplexMatrix> lu(M);
  const ComplexMatrix& U = lu.matrixLU();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) acc += std::log(std::abs(U(i, i)));
  return acc;
}

RealMatrix matrix_sign(const RealMatrix& H) {
  require_square(H, "H");
  require_finite(H, "H");
  const auto n = H.rows();
  const double h_norm = norm_or_floor(H);
  for (const Complex& lambda : eigenvalues(H)) {
    if (std::abs(lambda.real()) <= kImaginaryAxisTol * h_norm) {
      std::ostringstream os;
      os << "no stabilizing solution: H has eigenvalue " << lambda << " on the imaginary axis";
      throw NoStabilizingSolution(os.str());
    }
  }
  // Sign iteration Z <- (Z/c + c Z^{-1})/2 with determinant scaling until the
  // step is small, then unscaled Newton to convergence.
  const RealMatrix I = RealMatrix::Identity(n, n);
  RealMatrix Z = H;
  bool scaling = true;
  bool converged = false;
  double previous_step = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kMaxSignIterations; ++it) {
    Eigen::PartialPivLU<RealMatrix> lu(Z);
    RealMatrix Zinv = lu.solve(I);
    double c = 1.0;
    if (scaling) c = std::exp(log_abs_det(Z) / static_cast<double>(n));
    RealMatrix next = 0.5 * (Z / c + c * Zinv);
    if (!next.allFinite()) throw NumericalError("sign iteration produced non-finite entries", h_norm);
    const double step = (next - Z).norm();
    const double z_norm = Z.norm();
    Z = std::move(next);
    if (step <= kSignStepTol * z_norm) {
      converged = true;
      break;
    }
    if (scaling && step <= 1e-2 * z_norm) scaling = false;
    // Roundoff floor: once steps are tiny and stop shrinking, further
    // iterations only add noise; callers check residuals of what they derive.
    if (!scaling && step <= 1e-7 * z_norm && step >= previous_step) {
      converged = true;
      break;
    }
    previous_step = scaling ? std::numeric_limits<double>::infinity() : step;
  }
  if (!converged) throw NumericalError("sign iteration did not converge", h_norm);
  return Z;
}

RealMatrix stable_invariant_subspace(const RealMatrix& H) {
  require_square(H, "H");
  if (H.rows() % 2 != 0) throw DimensionError("H must have even dimension, got " + shape(H));
  const auto n = H.rows();
  const auto m = n / 2;
  const double h_norm = norm_or_floor(H);
  const RealMatrix Z = matrix_sign(H);
  const Eigen::Index stable_count = std::lround((n - Z.trace()) / 2.0);
  if (stable_count != m) {
    throw ContractError("H has " + std::to_string(stable_count) + " stable eigenvalues, expected " +
                        std::to_string(m));
  }
  const RealMatrix I = RealMatrix::Identity(n, n);

  // range(I - Z) is the stable invariant subspace.
  Eigen::ColPivHouseholderQR<RealMatrix> qr(I - Z);
  RealMatrix Q = qr.householderQ();
  RealMatrix X = Q.leftCols(m);

  const RealMatrix reduced = X.transpose() * H * X;
  const double residual = (H * X - X * reduced).norm();
  if (residual > kSubspaceResidualTol * h_norm) {
    throw NumericalError("stable subspace residual " + std::to_string(residual) + " exceeds contract", h_norm);
  }
  return X;
}

RealMatrix solve_linear(const RealMatrix& A, const RealMatrix& B) {
  require_square(A, "A");
  if (B.rows() != A.rows()) {
    throw DimensionError("solve_linear: A is " + shape(A) + " but B is " + shape(B));
  }
  require_finite(A, "A");
  require_finite(B, "B");
  Eigen::PartialPivLU<RealMatrix> lu(A);
  const double rcond = lu.rcond();
  const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(condition < kMaxCondition)) {
    throw SolverError("matrix is singular or ill-conditioned (condition estimate " + std::to_string(condition) + ")",
                      condition);
  }
  RealMatrix X = lu.solve(B);
  const double residual = (A * X - B).norm();
  if (residual > kSolveResidualTol * std::max(A.norm() * X.norm(), kNormFloor)) {
    throw SolverError("solve residual " + std::to_string(residual) + " exceeds contract", condition);
  }
  return X;
}

double spectral_abscissa(const Spectrum& spectrum) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Complex& z : spectrum) best = std::max(best, z.real());
  return best;
}

bool is_hurwitz(const Spectrum& spectrum) { return spectral_abscissa(spectrum) < 0.0; }

}  // namespace riccati_spectra
