#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "riccati_spectra/errors.hpp"

namespace riccati_spectra {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  /// Integral of |f|; the convergence target is tol * abs_value.
  double abs_value = 0.0;
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
  int deepest_level = 0;
};

struct QuadratureOptions {
  double tol = 1e-10;
  /// Absolute floor on the error target, for integrands that vanish up to roundoff.
  double abs_tol = 1e-14;
  int max_level = 60;
  std::size_t max_intervals = 200000;
};

/// Globally adaptive 15-point Gauss-Kronrod integration over the partition
/// defined by `points` (at least two, sorted ascending). The interval with
/// the largest |K15 - G7| is bisected until the summed estimate drops to
/// max(tol * integral of |g|, abs_tol). The integrand is never evaluated at partition or
/// bisection points, so integrable endpoint singularities are allowed there.
/// Interval contributions are summed in positional order.
///
/// Throws QuadratureFailure (with the worst interval) when a split would
/// exceed max_level or max_intervals, or when g raises PoleAtFrequency.
QuadratureResult adaptive_gauss_kronrod(const std::function<double(double)>& g, const std::vector<double>& points,
                                        const QuadratureOptions& options);

enum class FrequencyRange { half_line, whole_line };

/// Integral of f(omega) d omega over [0, inf) or (-inf, inf) using the
/// substitution omega = tan(pi u / 2). Each singular frequency becomes a
/// partition point (mirrored for the whole line). Failures report the worst
/// subinterval in omega.
QuadratureResult integrate_frequency(const std::function<double(double)>& f,
                                     const std::vector<double>& singular_frequencies, FrequencyRange range,
                                     const QuadratureOptions& options);

/// Checks tol against the accepted range [1e-12, 1e-3].
void require_quadrature_tol(double tol);

}  // namespace riccati_spectra
