#include "riccati_spectra/model.hpp"

#include <cmath>
#include <sstream>

namespace riccati_spectra {

namespace {

constexpr double kMarginalRealPart = -1e-9;
constexpr double kPbhTol = 1e-9;
constexpr double kSymmetryTol = 1e-10;
constexpr double kPsdTol = 1e-10;
constexpr double kPdTol = 1e-12;

std::string join_eigenvalues(const Spectrum& values) {
  std::ostringstream os;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << ", ";
    if (values[i].imag() == 0.0) {
      os << values[i].real();
    } else {
      os << values[i].real() << (values[i].imag() < 0 ? "-" : "+") << std::abs(values[i].imag()) << "j";
    }
  }
  return os.str();
}

std::string summarize(const std::vector<std::string>& violations) {
  std::string out = "model rejected: ";
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out += "; ";
    out += violations[i];
  }
  return out;
}

}  // namespace

ModelRejection::ModelRejection(ValidationReport report)
    : std::runtime_error(summarize(report.violations)), report_(std::move(report)) {}

ValidationReport validate_detectability(const RealMatrix& A, const RealMatrix& C) {
  require_square(A, "A");
  if (C.cols() != A.rows() || C.rows() == 0) {
    throw DimensionError("C must have " + std::to_string(A.rows()) + " columns, got " + std::to_string(C.rows()) + "x" +
                         std::to_string(C.cols()));
  }
  ValidationReport report;
  const auto m = A.rows();
  const auto l = C.rows();
  const double threshold = kPbhTol * (1.0 + A.norm() + C.norm());
  for (const Complex& lambda : eigenvalues(A)) {
    if (lambda.real() < kMarginalRealPart) continue;
    ComplexMatrix stacked(m + l, m);
    stacked.topRows(m) = A.cast<Complex>() - lambda * ComplexMatrix::Identity(m, m);
    stacked.bottomRows(l) = C.cast<Complex>();
    Eigen::JacobiSVD<ComplexMatrix> svd(stacked);
    if (svd.singularValues().minCoeff() <= threshold) report.offending_eigenvalues.push_back(lambda);
  }
  report.detectable = report.offending_eigenvalues.empty();
  if (!report.detectable) {
    report.violations.push_back("(A, C) not detectable: unobservable eigenvalue(s) " +
                                join_eigenvalues(report.offending_eigenvalues));
  }
  return report;
}

SystemModel build_model(const RealMatrix& A, const RealMatrix& C, const RealMatrix& W, const RealMatrix& V) {
  require_square(A, "A");
  const auto m = A.rows();
  if (C.cols() != m || C.rows() == 0) throw DimensionError("C must be l x " + std::to_string(m));
  const auto l = C.rows();
  if (W.rows() != m || W.cols() != m) throw DimensionError("W must be " + std::to_string(m) + "x" + std::to_string(m));
  if (V.rows() != l || V.cols() != l) throw DimensionError("V must be " + std::to_string(l) + "x" + std::to_string(l));

  std::vector<std::string> finiteness;
  if (!A.allFinite()) finiteness.push_back("A has non-finite entries");
  if (!C.allFinite()) finiteness.push_back("C has non-finite entries");
  if (!W.allFinite()) finiteness.push_back("W has non-finite entries");
  if (!V.allFinite()) finiteness.push_back("V has non-finite entries");
  if (!finiteness.empty()) {
    ValidationReport report;
    report.violations = std::move(finiteness);
    throw ModelRejection(std::move(report));
  }

  ValidationReport report = validate_detectability(A, C);

  RealMatrix W_sym = W;
  report.w_symmetry_defect = symmetry_defect(W);
  if (report.w_symmetry_defect > kSymmetryTol) {
    report.violations.push_back("W not symmetric");
  } else if (report.w_symmetry_defect > 0.0) {
    W_sym = symmetrize(W);
    report.w_symmetrized = true;
  }
  report.w_min_eigenvalue = min_symmetric_eigenvalue(W_sym);
  if (report.w_min_eigenvalue < -kPsdTol * W_sym.norm()) report.violations.push_back("W not positive semidefinite");

  RealMatrix V_sym = V;
  report.v_symmetry_defect = symmetry_defect(V);
  if (report.v_symmetry_defect > kSymmetryTol) {
    report.violations.push_back("V not symmetric");
  } else if (report.v_symmetry_defect > 0.0) {
    V_sym = symmetrize(V);
    report.v_symmetrized = true;
  }
  report.v_min_eigenvalue = min_symmetric_eigenvalue(V_sym);
  if (!(report.v_min_eigenvalue > 0.0) || report.v_min_eigenvalue < kPdTol * V_sym.norm()) {
    report.violations.push_back("V not positive definite");
  }

  if (!report.violations.empty()) throw ModelRejection(std::move(report));

  SystemModel model;
  model.A_ = A;
  model.C_ = C;
  model.W_ = std::move(W_sym);
  model.V_ = std::move(V_sym);
  model.V_inv_ = symmetrize(solve_linear(model.V_, RealMatrix::Identity(l, l)));
  model.CtVinvC_ = symmetrize(C.transpose() * model.V_inv_ * C);
  model.spectrum_ = eigenvalues(A);
  model.report_ = std::move(report);
  return model;
}

}  // namespace riccati_spectra
