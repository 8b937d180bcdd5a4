#include "riccati_spectra/jensen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "riccati_spectra/quadrature.hpp"

namespace riccati_spectra {

namespace {

constexpr double kStripTol = 1e-12;
constexpr double kAxisTol = 1e-10;
constexpr double kCommonRootTol = 1e-9;
constexpr double kLeadingTol = 1e-12;
constexpr double kIllPosedTol = 1e-8;

std::string describe(const char* what, const Complex& z) {
  std::ostringstream os;
  os.precision(15);
  os << what << " at " << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "j";
  return os.str();
}

std::vector<double> strip(std::vector<double> c, const char* name) {
  if (c.empty()) throw ContractError(std::string(name) + " has no coefficients");
  for (double v : c) {
    if (!std::isfinite(v)) throw ContractError(std::string(name) + " has a non-finite coefficient");
  }
  double biggest = 0.0;
  for (double v : c) biggest = std::max(biggest, std::abs(v));
  if (biggest == 0.0) throw ContractError(std::string(name) + " is identically zero");
  while (c.size() > 1 && std::abs(c.back()) < kStripTol * biggest) c.pop_back();
  return c;
}

Complex horner(const std::vector<double>& c, Complex s) {
  Complex acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
  return acc;
}

double positive_real_sum(const Spectrum& roots) {
  double acc = 0.0;
  for (const Complex& z : roots) acc += std::max(0.0, z.real());
  return acc;
}

}  // namespace

Spectrum polynomial_roots(const std::vector<double>& coeffs) {
  if (coeffs.empty() || coeffs.back() == 0.0) throw ContractError("leading coefficient must be nonzero");
  const auto n = static_cast<Eigen::Index>(coeffs.size()) - 1;
  if (n == 0) return {};
  RealMatrix companion = RealMatrix::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) companion(i, n - 1) = -coeffs[static_cast<std::size_t>(i)] / coeffs.back();
  return eigenvalues(companion);
}

RationalFunction::RationalFunction(std::vector<double> numerator, std::vector<double> denominator)
    : p_(strip(std::move(numerator), "numerator")), q_(strip(std::move(denominator), "denominator")) {
  if (p_.size() != q_.size()) {
    throw ContractError("numerator degree " + std::to_string(p_.size() - 1) + " differs from denominator degree " +
                        std::to_string(q_.size() - 1));
  }
  const double pm = p_.back();
  const double qm = q_.back();
  if (std::abs(pm - qm) > kLeadingTol * std::max(std::abs(pm), std::abs(qm))) {
    throw ContractError("leading coefficients differ (p_m must equal q_m)");
  }
  zeros_ = polynomial_roots(p_);
  poles_ = polynomial_roots(q_);
  for (const Complex& z : zeros_) {
    if (std::abs(z.real()) < kAxisTol * (1.0 + std::abs(z))) throw ContractError(describe("zero on the imaginary axis", z));
  }
  for (const Complex& z : poles_) {
    if (std::abs(z.real()) < kAxisTol * (1.0 + std::abs(z))) throw ContractError(describe("pole on the imaginary axis", z));
  }
  for (const Complex& z : zeros_) {
    for (const Complex& w : poles_) {
      if (std::abs(z - w) < kCommonRootTol) throw ContractError(describe("pole-zero cancellation", z));
    }
  }
}

Complex RationalFunction::numerator_at(Complex s) const { return horner(p_, s); }
Complex RationalFunction::denominator_at(Complex s) const { return horner(q_, s); }

double limit_term(const RationalFunction& f) {
  const std::size_t m = f.degree();
  if (m == 0) return 0.0;
  const auto& p = f.numerator();
  const auto& q = f.denominator();
  return 0.5 * (p[m - 1] / p[m] - q[m - 1] / q[m]);
}

JensenResult jensen_closed_form(const RationalFunction& f, bool stable_poles_only) {
  JensenResult r;
  if (stable_poles_only) {
    for (const Complex& z : f.poles()) {
      if (z.real() >= 0.0) {
        throw ContractError(describe("unstable pole", z) + "; use the prop2 mode for unstable poles");
      }
    }
  }
  r.limit_term = limit_term(f);
  r.zeros_term = positive_real_sum(f.zeros());
  r.poles_term = stable_poles_only ? 0.0 : positive_real_sum(f.poles());
  r.closed_form = r.limit_term + r.zeros_term - r.poles_term;
  return r;
}

JensenNumeric jensen_numeric_detail(const RationalFunction& f, double tol, bool two_sided) {
  require_quadrature_tol(tol);
  JensenNumeric out;
  std::vector<double> singular;
  for (const Spectrum* roots : {&f.zeros(), &f.poles()}) {
    for (const Complex& z : *roots) {
      singular.push_back(std::abs(z.imag()));
      if (std::abs(z.real()) < kIllPosedTol) out.warnings.push_back(describe("ill-posed: root near the axis", z));
    }
  }

  // Where f is close to 1, ln|f| = ln|1 + delta| with delta = (p - q) / q;
  // the leading terms cancel exactly in the difference, which keeps the tail
  // accurate. Elsewhere ln|p| - ln|q| is used so zeros near the axis keep
  // their relative accuracy.
  std::vector<double> diff(f.numerator().size());
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = f.numerator()[k] - f.denominator()[k];
  auto integrand = [&](double omega) {
    const Complex s(0.0, omega);
    const Complex q = f.denominator_at(s);
    const Complex delta = horner(diff, s) / q;
    if (std::abs(delta) <= 0.5) return 0.5 * std::log1p(2.0 * delta.real() + std::norm(delta));
    return std::log(std::abs(f.numerator_at(s))) - std::log(std::abs(q));
  };

  QuadratureOptions options;
  options.tol = tol;
  if (two_sided) {
    const QuadratureResult r = integrate_frequency(integrand, singular, FrequencyRange::whole_line, options);
    out.value = r.value / (2.0 * std::numbers::pi);
  } else {
    const QuadratureResult r = integrate_frequency(integrand, singular, FrequencyRange::half_line, options);
    out.value = r.value / std::numbers::pi;
  }
  return out;
}

double jensen_numeric(const RationalFunction& f, double tol) { return jensen_numeric_detail(f, tol).value; }

JensenResult verify_proposition(const RationalFunction& f, JensenMode mode, double tol) {
  JensenResult r = jensen_closed_form(f, mode == JensenMode::prop1);
  JensenNumeric numeric = jensen_numeric_detail(f, tol);
  r.integral_numeric = numeric.value;
  r.warnings = std::move(numeric.warnings);
  r.residual = std::abs(r.integral_numeric - r.closed_form);
  return r;
}

}  // namespace riccati_spectra
