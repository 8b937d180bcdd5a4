#pragma once

#include <string>
#include <vector>

#include "riccati_spectra/matrix_core.hpp"

namespace riccati_spectra {

/// f(s) = p(s) / q(s) with deg p = deg q = m, p_m = q_m (so f -> 1 at
/// infinity), no roots on the imaginary axis and no common roots.
class RationalFunction {
 public:
  /// Coefficients in ascending powers. Leading coefficients below 1e-12 of the
  /// largest magnitude are stripped before the degree is read off. Throws
  /// ContractError when any invariant fails.
  RationalFunction(std::vector<double> numerator, std::vector<double> denominator);

  const std::vector<double>& numerator() const noexcept { return p_; }
  const std::vector<double>& denominator() const noexcept { return q_; }
  const Spectrum& zeros() const noexcept { return zeros_; }
  const Spectrum& poles() const noexcept { return poles_; }
  std::size_t degree() const noexcept { return p_.size() - 1; }

  Complex numerator_at(Complex s) const;
  Complex denominator_at(Complex s) const;

 private:
  std::vector<double> p_;
  std::vector<double> q_;
  Spectrum zeros_;
  Spectrum poles_;
};

/// Roots of sum_k c_k s^k (ascending, nonzero leading coefficient) as the
/// eigenvalues of the companion matrix.
Spectrum polynomial_roots(const std::vector<double>& coeffs);

/// (p_{m-1}/p_m - q_{m-1}/q_m) / 2, the limit of sigma * ln|f(sigma)| / 2 as
/// sigma -> inf. Zero for m = 0.
double limit_term(const RationalFunction& f);

enum class JensenMode { prop1, prop2 };

struct JensenResult {
  double integral_numeric = 0.0;
  double limit_term = 0.0;
  double zeros_term = 0.0;
  double poles_term = 0.0;
  double closed_form = 0.0;
  double residual = 0.0;
  std::vector<std::string> warnings;
};

/// limit_term + sum max(0, Re zero) - sum max(0, Re pole). With
/// stable_poles_only the pole sum is left at zero, and an unstable pole is a
/// ContractError.
JensenResult jensen_closed_form(const RationalFunction& f, bool stable_poles_only);

struct JensenNumeric {
  double value = 0.0;
  std::vector<std::string> warnings;
};

/// (1/2pi) * integral over the real line of ln|f(j omega)|, to relative
/// tolerance tol in [1e-12, 1e-3]. By default the half line is integrated and
/// doubled; two_sided integrates both halves directly. Roots within 1e-8 of
/// the axis produce an ill-posedness warning.
JensenNumeric jensen_numeric_detail(const RationalFunction& f, double tol, bool two_sided = false);
double jensen_numeric(const RationalFunction& f, double tol);

/// Both routes; residual = |integral_numeric - closed_form|.
JensenResult verify_proposition(const RationalFunction& f, JensenMode mode, double tol);

}  // namespace riccati_spectra
