#include "riccati_spectra/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace riccati_spectra {

namespace {

// Only frequencies numerically indistinguishable from a pole are rejected;
// log singularities at axis poles are integrable and the quadrature refines
// toward them.
constexpr double kPoleTol = 16.0 * std::numeric_limits<double>::epsilon();
constexpr double kInverseSqrtTol = 1e-10;
constexpr double kCancellationTol = 1e-7;
constexpr double kAxisFlagTol = 1e-9;
constexpr double kSingularInformation = 1e-12;

double quadrature_tol_for(double tol) { return std::clamp(tol * 1e-3, 1e-12, 1e-3); }

// (1/2pi) * integral over the real line of an even integrand, from the half line.
double even_integral(const std::function<double(double)>& f, const std::vector<double>& singular, double qtol,
                     QuadratureResult* detail = nullptr) {
  require_quadrature_tol(qtol);
  QuadratureOptions options;
  options.tol = qtol;
  QuadratureResult r = integrate_frequency(f, singular, FrequencyRange::half_line, options);
  if (detail != nullptr) *detail = r;
  return r.value / std::numbers::pi;
}

ComplexMatrix resolvent_times(const RealMatrix& A, double omega, const RealMatrix& left) {
  // left * (j omega I - A)^{-1}, via the transposed system
  const auto m = A.rows();
  ComplexMatrix shifted = Complex(0.0, omega) * ComplexMatrix::Identity(m, m) - A.cast<Complex>();
  Eigen::PartialPivLU<ComplexMatrix> lu(shifted.transpose());
  return lu.solve(left.transpose().cast<Complex>()).transpose();
}

std::string format_complex(const Complex& z) {
  std::ostringstream os;
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "j";
  return os.str();
}

}  // namespace

PopovEvaluator::PopovEvaluator(const SystemModel& model)
    : model_(model),
      v_inv_sqrt_(inverse_sqrt_spd(model.V())),
      w_factor_(psd_factor(model.W())),
      pole_tol_(kPoleTol * (1.0 + model.A().norm())) {
  const auto l = model.output_dim();
  const RealMatrix check = v_inv_sqrt_ * model.V() * v_inv_sqrt_;
  if ((check - RealMatrix::Identity(l, l)).norm() > kInverseSqrtTol * std::sqrt(static_cast<double>(l))) {
    throw NumericalError("V^{-1/2} V V^{-1/2} deviates from identity", model.V().norm());
  }
}

ComplexMatrix PopovEvaluator::output_resolvent(double omega) const {
  const Complex s(0.0, omega);
  for (const Complex& lambda : model_.spectrum()) {
    if (std::abs(s - lambda) <= pole_tol_) {
      throw PoleAtFrequency("j*omega coincides with eigenvalue " + format_complex(lambda) + " of A", omega);
    }
  }
  return resolvent_times(model_.A(), omega, model_.C());
}

ComplexMatrix PopovEvaluator::normalized_excess(double omega) const {
  const ComplexMatrix G = v_inv_sqrt_.cast<Complex>() * output_resolvent(omega) * w_factor_.cast<Complex>();
  return G * G.adjoint();
}

std::vector<double> PopovEvaluator::singular_frequencies() const {
  std::vector<double> out;
  for (const Complex& lambda : model_.spectrum()) out.push_back(std::abs(lambda.imag()));
  return out;
}

ComplexMatrix popov_eval(const PopovEvaluator& ev, double omega) {
  const SystemModel& model = ev.model();
  const ComplexMatrix G = ev.output_resolvent(omega);
  const ComplexMatrix phi = G * model.W().cast<Complex>() * G.adjoint() + model.V().cast<Complex>();
  // exact Hermitian symmetry
  return 0.5 * (phi + phi.adjoint());
}

double logdet_ratio(const PopovEvaluator& ev, double omega) {
  return logdet_identity_plus(ev.normalized_excess(omega));
}

QuadratureResult frequency_integral_detail(const PopovEvaluator& ev, double tol) {
  QuadratureResult detail;
  const double value = even_integral([&ev](double w) { return logdet_ratio(ev, w); }, ev.singular_frequencies(), tol,
                                     &detail);
  detail.value = value;
  return detail;
}

double frequency_integral(const PopovEvaluator& ev, double tol) { return frequency_integral_detail(ev, tol).value; }

double unstable_sum(const Spectrum& spectrum) {
  double acc = 0.0;
  for (const Complex& z : spectrum) acc += std::max(0.0, z.real());
  return acc;
}

SpectralReport verify_theorem1(const SystemModel& model, const CareSolution& care, double tol) {
  if (!(tol > 0.0)) throw ContractError("tolerance must be positive");
  SpectralReport report;
  report.quadrature_tol = quadrature_tol_for(tol);
  const PopovEvaluator ev(model);
  report.integral_term = frequency_integral(ev, report.quadrature_tol);
  report.unstable_sum = unstable_sum(model.spectrum());
  report.trace_from_care = (care.output_error_cov * model.V_inverse()).trace();
  report.trace_from_integral = report.integral_term + 2.0 * report.unstable_sum;
  IdentityResidual r;
  r.name = "integral_identity";
  r.lhs = report.trace_from_care;
  r.rhs = report.trace_from_integral;
  r.residual = std::abs(r.lhs - r.rhs);
  r.tolerance = std::max(tol, tol * std::abs(report.trace_from_care));
  report.residuals.push_back(r);
  return report;
}

ZerosPolesForm zeros_poles_form(const SystemModel& model, const CareSolution& care) {
  Spectrum zeros;
  for (const Complex& z : care.closed_loop_spectrum) {
    zeros.push_back(z);
    zeros.push_back(-z);
  }
  Spectrum poles;
  for (const Complex& z : model.spectrum()) {
    poles.push_back(z);
    poles.push_back(-z);
  }

  // Greedy nearest-pair cancellation.
  const double match_tol = kCancellationTol * (1.0 + model.A().norm());
  struct Pair {
    double distance;
    std::size_t zero;
    std::size_t pole;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    for (std::size_t j = 0; j < poles.size(); ++j) {
      const double d = std::abs(zeros[i] - poles[j]);
      if (d <= match_tol) pairs.push_back({d, i, j});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.distance < b.distance; });
  std::vector<bool> zero_used(zeros.size(), false);
  std::vector<bool> pole_used(poles.size(), false);
  ZerosPolesForm out;
  for (const Pair& p : pairs) {
    if (zero_used[p.zero] || pole_used[p.pole]) continue;
    zero_used[p.zero] = true;
    pole_used[p.pole] = true;
    ++out.cancelled_pairs;
  }
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    if (!zero_used[i]) out.zeros.push_back(zeros[i]);
  }
  for (std::size_t j = 0; j < poles.size(); ++j) {
    if (!pole_used[j]) out.poles.push_back(poles[j]);
  }

  out.zeros_term = unstable_sum(out.zeros);
  out.poles_term = unstable_sum(out.poles);
  out.unstable_sum = unstable_sum(model.spectrum());
  out.trace_from_zeros_poles = out.zeros_term - out.poles_term + 2.0 * out.unstable_sum;

  const double axis_tol = kAxisFlagTol * (1.0 + model.A().norm());
  for (const Complex& z : out.poles) {
    if (std::abs(z.real()) <= axis_tol) {
      out.flags.push_back("pole of det[Phi_y(s) V^-1] on the imaginary axis at " + format_complex(z));
    }
  }
  for (const Complex& z : out.zeros) {
    if (std::abs(z.real()) <= axis_tol) {
      out.flags.push_back("zero of det[Phi_y(s) V^-1] on the imaginary axis at " + format_complex(z));
    }
  }
  return out;
}

BodeIntegral bode_sensitivity_integral(const SystemModel& model, const CareSolution& care, double tol) {
  const PopovEvaluator ev(model);
  const RealMatrix& K = care.K;
  auto integrand = [&ev, &K](double omega) {
    const ComplexMatrix L = ev.output_resolvent(omega) * K.cast<Complex>();
    return -log_abs_det_identity_plus(L);
  };
  BodeIntegral out;
  out.integral = even_integral(integrand, ev.singular_frequencies(), tol);
  out.closed_form = -0.5 * (model.C() * K).trace() + unstable_sum(model.spectrum());
  out.residual = std::abs(out.integral - out.closed_form);
  return out;
}

TraceBounds trace_bounds(const SystemModel& model, const SpectralReport& report) {
  TraceBounds b;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(model.output_information(), Eigen::EigenvaluesOnly);
  b.lambda_min = es.eigenvalues().minCoeff();
  b.lambda_max = es.eigenvalues().maxCoeff();
  b.lower = report.trace_from_integral / b.lambda_max;
  b.upper = b.lambda_min <= kSingularInformation ? std::numeric_limits<double>::infinity()
                                                 : report.trace_from_integral / b.lambda_min;
  return b;
}

std::vector<SpecialCase> special_case_checks(const SystemModel& model, const CareSolution& care,
                                             const SpectralReport& report, double tol) {
  const auto m = model.state_dim();
  const auto l = model.output_dim();
  const RealMatrix& A = model.A();
  const RealMatrix& W = model.W();
  const RealMatrix& V = model.V();
  const double qtol = report.quadrature_tol > 0.0 ? report.quadrature_tol : quadrature_tol_for(tol);
  const double us = unstable_sum(model.spectrum());
  const bool hurwitz = is_hurwitz(model.spectrum());
  const bool zero_noise = W.norm() == 0.0;
  const bool unit_noise = (V - RealMatrix::Identity(l, l)).norm() <= 1e-12;
  const double trace_ratio = (care.output_error_cov * model.V_inverse()).trace();

  std::vector<double> singular;
  for (const Complex& z : model.spectrum()) singular.push_back(std::abs(z.imag()));

  // S_z(omega) / sigma_v^2 for a scalar output
  auto scalar_excess = [&](double omega) {
    const ComplexMatrix g = resolvent_times(A, omega, model.C());
    const Complex s = (g * W.cast<Complex>() * g.adjoint())(0, 0);
    return s.real() / V(0, 0);
  };

  auto finish = [tol](SpecialCase c) {
    if (c.applicable) {
      c.residual = std::abs(c.reduced_value - c.reference_value);
      c.tolerance = std::max(tol, tol * std::abs(c.reference_value));
    }
    return c;
  };

  std::vector<SpecialCase> out;

  std::optional<double> scalar_output_integral;
  if (l == 1) {
    scalar_output_integral =
        even_integral([&](double w) { return std::log1p(scalar_excess(w)); }, singular, qtol);
  }

  {
    SpecialCase c{"scalar_output", "l = 1"};
    c.applicable = (l == 1);
    if (c.applicable) {
      const double sigma2 = V(0, 0);
      c.reference_value = care.output_error_cov(0, 0);
      c.reduced_value = sigma2 * *scalar_output_integral + 2.0 * sigma2 * us;
    }
    out.push_back(finish(c));
  }
  {
    SpecialCase c{"yovits_jackson", "l = 1 and A Hurwitz"};
    c.applicable = (l == 1 && hurwitz);
    if (c.applicable) {
      c.reference_value = care.output_error_cov(0, 0);
      c.reduced_value = V(0, 0) * *scalar_output_integral;
    }
    out.push_back(finish(c));
  }
  {
    SpecialCase c{"scalar_plant", "l = m = 1 and C != 0"};
    c.applicable = (l == 1 && m == 1 && model.C()(0, 0) != 0.0);
    if (c.applicable) {
      const double a = A(0, 0);
      const double cc = model.C()(0, 0) * model.C()(0, 0);
      const double sw2 = W(0, 0);
      const double sv2 = V(0, 0);
      const double integral = even_integral(
          [&](double w) { return std::log1p(cc * sw2 / (sv2 * (w * w + a * a))); }, {std::abs(0.0)}, qtol);
      c.reference_value = care.P(0, 0);
      c.reduced_value = (sv2 * integral + 2.0 * sv2 * std::max(0.0, a)) / cc;
    }
    out.push_back(finish(c));
  }
  {
    SpecialCase c{"unit_measurement_noise", "V = I"};
    c.applicable = unit_noise;
    if (c.applicable) {
      const RealMatrix wf = psd_factor(W);
      const double integral = even_integral(
          [&](double w) {
            const ComplexMatrix G = resolvent_times(A, w, model.C()) * wf.cast<Complex>();
            return logdet_identity_plus(G * G.adjoint());
          },
          singular, qtol);
      c.reference_value = care.output_error_cov.trace();
      c.reduced_value = integral + 2.0 * us;
    }
    out.push_back(finish(c));
  }
  {
    SpecialCase c{"zero_process_noise", "W = 0"};
    c.applicable = zero_noise;
    if (c.applicable) {
      c.reference_value = trace_ratio;
      c.reduced_value = 2.0 * us;
    }
    out.push_back(finish(c));
  }
  {
    SpecialCase c{"stationary_mimo", "A Hurwitz"};
    c.applicable = hurwitz;
    if (c.applicable) {
      const RealMatrix Vinv = model.V_inverse();
      const double integral = even_integral(
          [&](double w) {
            const ComplexMatrix G = resolvent_times(A, w, model.C());
            const ComplexMatrix phi_z = G * W.cast<Complex>() * G.adjoint();
            return log_abs_det_identity_plus(Vinv.cast<Complex>() * phi_z);
          },
          singular, qtol);
      c.reference_value = trace_ratio;
      c.reduced_value = integral;
    }
    out.push_back(finish(c));
  }
  return out;
}

}  // namespace riccati_spectra
