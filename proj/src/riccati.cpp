#include "riccati_spectra/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace riccati_spectra {

namespace {

constexpr double kPsdTol = 1e-9;
constexpr double kNewtonStepTol = 1e-12;
constexpr double kNewtonStagnationTol = 1e-9;
constexpr int kMaxNewtonIterations = 200;
// same marginal threshold as the detectability check
constexpr double kMarginalTol = 1e-9;
constexpr double kOdeSymmetryTol = 1e-8;
constexpr double kSubspaceRankTol = 1e-14;

// Fills the derived fields of a solution from a candidate P and checks the
// CareSolution invariants.
CareSolution finalize(const SystemModel& model, const RealMatrix& P_raw, int iterations) {
  CareSolution sol;
  sol.P = symmetrize(P_raw);
  sol.K = sol.P * model.C().transpose() * model.V_inverse();
  sol.closed_loop = model.A() - sol.K * model.C();
  sol.closed_loop_spectrum = eigenvalues(sol.closed_loop);
  sol.iterations = iterations;
  if (!is_hurwitz(sol.closed_loop_spectrum)) {
    std::ostringstream os;
    os << "no stabilizing solution exists: A - K C has spectral abscissa "
       << spectral_abscissa(sol.closed_loop_spectrum);
    throw NoStabilizingSolution(os.str());
  }
  const double p_norm = sol.P.norm();
  if (min_symmetric_eigenvalue(sol.P) < -kPsdTol * std::max(p_norm, kNormFloor)) {
    throw NumericalError("Riccati solution is not positive semidefinite", p_norm);
  }
  sol.residual = care_lhs(model, sol.P).norm();
  sol.residual_bound = care_residual_bound(model, sol.P);
  if (sol.residual > sol.residual_bound) {
    throw NumericalError("Riccati residual " + std::to_string(sol.residual) + " exceeds bound " +
                             std::to_string(sol.residual_bound),
                         p_norm);
  }
  sol.output_error_cov = symmetrize(model.C() * sol.P * model.C().transpose());
  return sol;
}

using ExtendedMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

// F X + X F^T + Q = 0 through the Kronecker system, symmetrized. No
// condition guard: Newton-Kleinman tolerates inaccurate early steps and the
// final answer is judged by the CARE residual.
template <typename Matrix>
Matrix kronecker_lyapunov(const Matrix& F, const Matrix& Q) {
  using Scalar = typename Matrix::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const auto m = F.rows();
  const Matrix I = Matrix::Identity(m, m);
  Matrix kron(m * m, m * m);
  // column-major vec: vec(F X) = (I kron F) vec X, vec(X F^T) = (F kron I) vec X
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) kron.block(i * m, j * m, m, m) = I(i, j) * F + F(i, j) * I;
  }
  const Vector q = Eigen::Map<const Vector>(Q.data(), m * m);
  const Vector x = kron.fullPivLu().solve(Vector(-q));
  if (!x.allFinite()) throw SolverError("Lyapunov operator is singular", std::numeric_limits<double>::infinity());
  const Matrix X = Eigen::Map<const Matrix>(x.data(), m, m);
  return (X + X.transpose()) / Scalar(2);
}

bool stabilizes(const SystemModel& model, const RealMatrix& K) {
  return is_hurwitz(eigenvalues(model.A() - K * model.C()));
}

}  // namespace

RealMatrix care_lhs(const SystemModel& model, const RealMatrix& P) {
  const RealMatrix& A = model.A();
  return A * P + P * A.transpose() + model.W() - P * model.output_information() * P;
}

double care_residual_bound(const SystemModel& model, const RealMatrix& P) {
  const double p = P.norm();
  return 1e-8 * (1.0 + model.A().norm() * p + model.W().norm() + p * p * model.output_information().norm());
}

CareSolution solve_care(const SystemModel& model) {
  const auto m = model.state_dim();
  RealMatrix H(2 * m, 2 * m);
  H << model.A().transpose(), -model.output_information(), -model.W(), -model.A();

  // The stable subspace is spanned by [I; P], the null space of sign(H) + I:
  //   [S12; S22 + I] P = -[S11 + I; S21],
  // solved in the least-squares sense, which avoids inverting a nearly
  // singular block of a subspace basis when P is large.
  const RealMatrix S = matrix_sign(H);
  const RealMatrix I = RealMatrix::Identity(m, m);
  RealMatrix lhs(2 * m, m);
  lhs << S.topRightCorner(m, m), S.bottomRightCorner(m, m) + I;
  RealMatrix rhs(2 * m, m);
  rhs << S.topLeftCorner(m, m) + I, S.bottomLeftCorner(m, m);
  const Eigen::ColPivHouseholderQR<RealMatrix> qr(lhs);
  const double pivot_ratio = std::abs(qr.matrixR()(m - 1, m - 1)) / std::max(std::abs(qr.matrixR()(0, 0)), kNormFloor);
  if (qr.rank() < m || pivot_ratio < kSubspaceRankTol) {
    std::ostringstream os;
    os << "no stabilizing solution exists: stable subspace is not a graph over the first block (pivot ratio "
       << pivot_ratio << ")";
    throw NoStabilizingSolution(os.str());
  }
  const RealMatrix P = qr.solve(-rhs);
  return finalize(model, P, 0);
}

RealMatrix solve_lyapunov(const RealMatrix& F, const RealMatrix& Q) {
  require_square(F, "F");
  if (Q.rows() != F.rows() || Q.cols() != F.rows()) throw DimensionError("Q must match F");
  require_finite(F, "F");
  require_finite(Q, "Q");
  return kronecker_lyapunov(F, Q);
}

namespace {

/// Bass gain for the observer pair (T, C): with -(T^T + beta I) Hurwitz,
/// (T^T + beta I) Z + Z (T^T + beta I)^T = 2 C^T C + 2 eps I, K = Z^{-1} C^T.
/// Z is often badly conditioned; callers verify stability instead of
/// guarding the solve.
RealMatrix bass_gain(const RealMatrix& T, const RealMatrix& C, double beta, double eps) {
  const auto k = T.rows();
  const RealMatrix shifted = -(T.transpose() + beta * RealMatrix::Identity(k, k));
  const RealMatrix CtC = C.transpose() * C;
  const RealMatrix Z = symmetrize(
      solve_lyapunov(shifted, 2.0 * CtC + 2.0 * eps * (CtC.norm() + 1.0) * RealMatrix::Identity(k, k)));
  return Z.ldlt().solve(C.transpose());
}

/// Orthonormal basis of the invariant subspace of A for eigenvalues with
/// Re >= -margin, spanned by real and imaginary parts of eigenvectors.
/// Empty when A is defective enough for the basis to lose rank.
RealMatrix unstable_basis(const RealMatrix& A, double margin) {
  const Eigen::EigenSolver<RealMatrix> es(A);
  std::vector<Eigen::VectorXd> columns;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const Complex lambda = es.eigenvalues()(i);
    if (lambda.real() < -margin) continue;
    const Eigen::VectorXcd v = es.eigenvectors().col(i);
    if (lambda.imag() == 0.0) {
      columns.push_back(v.real());
    } else if (lambda.imag() > 0.0) {
      columns.push_back(v.real());
      columns.push_back(v.imag());
    }
  }
  RealMatrix V(A.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) V.col(static_cast<Eigen::Index>(j)) = columns[j];
  const Eigen::ColPivHouseholderQR<RealMatrix> qr(V);
  if (qr.rank() < V.cols()) return RealMatrix(A.rows(), 0);
  return RealMatrix(qr.householderQ()).leftCols(V.cols());
}

}  // namespace

RealMatrix stabilizing_gain(const SystemModel& model) {
  const auto m = model.state_dim();
  const auto l = model.output_dim();
  if (is_hurwitz(model.spectrum())) return RealMatrix::Zero(m, l);

  const RealMatrix& A = model.A();
  const RealMatrix& C = model.C();
  const double abscissa = spectral_abscissa(model.spectrum());
  double min_real = 0.0;
  for (const Complex& z : model.spectrum()) min_real = std::min(min_real, z.real());

  // Modal construction first: with U spanning the unstable invariant subspace
  // (A U = U T), K0 = U K1 moves only the eigenvalues of T, since
  // [U U_perp]^T (A - K0 C) [U U_perp] stays block upper triangular. Leaving
  // the stable modes alone keeps K0 small when an unstable mode is weakly
  // observed, which the Newton iteration needs.
  const RealMatrix U = unstable_basis(A, kMarginalTol);
  if (U.cols() > 0) {
    const RealMatrix T = U.transpose() * A * U;
    const RealMatrix C1 = C * U;
    const double unit = 1.0 + std::max(0.0, abscissa);
    for (double beta : {0.5 * unit, 0.1 * unit, unit}) {
      try {
        const RealMatrix K0 = U * bass_gain(T, C1, beta, 0.0);
        if (K0.allFinite() && stabilizes(model, K0)) return K0;
      } catch (const SolverError&) {
      }
    }
  }

  // Fallback: Bass construction on the full dual pair (A^T, C^T); the eps term
  // keeps Z invertible when (A, C) is detectable but not observable.
  for (double beta : {1.0 - min_real, 0.5 * (1.0 - min_real + A.norm() + 1.0), A.norm() + 1.0}) {
    for (double eps : {0.0, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1.0}) {
      try {
        const RealMatrix K0 = bass_gain(A, C, beta, eps);
        if (K0.allFinite() && stabilizes(model, K0)) return K0;
      } catch (const SolverError&) {
      }
    }
  }
  throw NumericalError("could not construct a stabilizing initial gain", A.norm());
}

CareSolution newton_kleinman_oracle(const SystemModel& model, const RealMatrix& K0) {
  const auto m = model.state_dim();
  const auto l = model.output_dim();
  if (K0.rows() != m || K0.cols() != l) throw DimensionError("K0 must be m x l");
  if (!stabilizes(model, K0)) throw ContractError("K0 does not stabilize A - K0 C");

  // Extended precision: on weakly detectable plants the Lyapunov operators
  // are ill-conditioned and double precision stalls short of the CARE
  // conditioning, which would make the oracle less accurate than the route it
  // checks.
  const ExtendedMatrix A = model.A().cast<long double>();
  const ExtendedMatrix C = model.C().cast<long double>();
  const ExtendedMatrix V = model.V().cast<long double>();
  const ExtendedMatrix W = model.W().cast<long double>();
  const ExtendedMatrix Ct_Vinv = C.transpose() * V.inverse();
  ExtendedMatrix K = K0.cast<long double>();
  ExtendedMatrix P_prev;
  long double prev_step = std::numeric_limits<long double>::infinity();
  for (int it = 1; it <= kMaxNewtonIterations; ++it) {
    const ExtendedMatrix P = kronecker_lyapunov(ExtendedMatrix(A - K * C), ExtendedMatrix(W + K * V * K.transpose()));
    if (it > 1) {
      const long double step = (P - P_prev).norm() / std::max<long double>(P_prev.norm(), kNormFloor);
      if (step <= kNewtonStepTol) return finalize(model, P.cast<double>(), it);
      // Past the quadratic phase the steps settle at the roundoff level of the
      // Lyapunov solves; stop once they no longer shrink.
      if (step >= prev_step && step <= kNewtonStagnationTol) return finalize(model, P.cast<double>(), it);
      prev_step = step;
    }
    K = P * Ct_Vinv;
    P_prev = P;
  }
  throw NonConvergence("Newton-Kleinman iteration stagnated", kMaxNewtonIterations);
}

RealMatrix riccati_rhs(const SystemModel& model, const RealMatrix& P) { return care_lhs(model, P); }

RiccatiTrajectory integrate_riccati_ode(const SystemModel& model, const RealMatrix& P0, double t_end, double dt,
                                        const RiccatiOdeOptions& options) {
  const auto m = model.state_dim();
  if (P0.rows() != m || P0.cols() != m) throw DimensionError("P0 must be m x m");
  require_finite(P0, "P0");
  if (symmetry_defect(P0) > kOdeSymmetryTol) throw ContractError("P0 must be symmetric");
  if (min_symmetric_eigenvalue(P0) < -kOdeSymmetryTol * norm_or_floor(P0)) {
    throw ContractError("P0 must be positive semidefinite");
  }
  if (!(dt > 0.0)) throw ContractError("dt must be positive");
  if (!(t_end >= dt)) throw ContractError("t_end must be at least dt");
  const std::size_t stride = std::max<std::size_t>(options.stride, 1);

  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt * (1.0 - 1e-12)));
  const double h = t_end / static_cast<double>(steps);

  RiccatiTrajectory traj;
  RealMatrix P = symmetrize(P0);
  traj.times.push_back(0.0);
  traj.covariances.push_back(P);
  for (std::size_t k = 1; k <= steps; ++k) {
    const RealMatrix k1 = riccati_rhs(model, P);
    const RealMatrix k2 = riccati_rhs(model, P + 0.5 * h * k1);
    const RealMatrix k3 = riccati_rhs(model, P + 0.5 * h * k2);
    const RealMatrix k4 = riccati_rhs(model, P + h * k3);
    P = symmetrize(P + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    const double t = static_cast<double>(k) * h;
    if (!P.allFinite()) {
      throw RiccatiBlowUp("Riccati ODE produced non-finite entries at t = " + std::to_string(t), t);
    }
    if (k % stride == 0 || k == steps) {
      traj.times.push_back(t);
      traj.covariances.push_back(P);
    }
  }
  if (options.reference != nullptr) {
    const RealMatrix& Pinf = options.reference->P;
    traj.terminal_gap = (P - Pinf).norm() / norm_or_floor(Pinf);
  }
  return traj;
}

}  // namespace riccati_spectra
