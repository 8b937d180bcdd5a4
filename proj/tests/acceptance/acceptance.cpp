// Acceptance gate: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "riccati_spectra/jensen.hpp"
#include "riccati_spectra/simulate.hpp"
#include "riccati_spectra/spectral.hpp"
#include "support/oracles.hpp"
#include "support/suite.hpp"

using namespace riccati_spectra;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

double relative_tol(double tol, double scale) { return std::max(tol, tol * std::abs(scale)); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

const std::vector<suite::Plant>& plants() {
  static const std::vector<suite::Plant> catalog = suite::random_plants(100);
  return catalog;
}

Outcome trace_identity() {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  double worst = 0.0;
  for (const suite::Plant& p : plants()) {
    const SystemModel m = suite::build(p);
    const CareSolution sol = solve_care(m);
    const SpectralReport r = verify_theorem1(m, sol, 1e-6);
    const double tol = relative_tol(1e-6, r.trace_from_care);
    const double residual = std::abs(r.trace_from_care - r.trace_from_integral);
    worst = std::max(worst, residual / tol);
    if (residual > tol) {
      o.passed = false;
      o.detail += " " + p.name + " residual " + fmt(residual) + ";";
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (seconds >= 30.0) o.passed = false;
  o.detail = "100 systems, worst residual/tolerance " + fmt(worst) + ", " + fmt(seconds) + " s" + o.detail;
  return o;
}

Outcome noise_free_reduction() {
  Outcome o;
  double worst = 0.0;
  for (const suite::Plant& p : suite::noise_free_unstable(20)) {
    const SystemModel m = suite::build(p);
    const CareSolution sol = solve_care(m);
    const double trace = (sol.output_error_cov * m.V_inverse()).trace();
    const SpectralReport r = verify_theorem1(m, sol, 1e-8);
    const double residual = std::max(std::abs(trace - 2.0 * r.unstable_sum), std::abs(r.trace_from_integral - trace));
    worst = std::max(worst, residual);
    if (residual > 1e-8) {
      o.passed = false;
      o.detail += " " + p.name + " residual " + fmt(residual) + ";";
    }
  }
  o.detail = "20 unstable plants with W = 0, V = I, worst |trace - 2 sum| " + fmt(worst) + o.detail;
  return o;
}

Outcome scalar_closed_forms() {
  Outcome o;
  struct Case {
    double a, c, w, v, expected;
  };
  double worst = 0.0;
  for (const Case& k : {Case{-1, 1, 3, 1, 1.0}, Case{1, 1, 0, 1, 2.0}, Case{0, 1, 1, 1, 1.0}}) {
    const SystemModel m = suite::build(suite::scalar(k.a, k.c, k.w, k.v));
    const CareSolution sol = solve_care(m);
    const SpectralReport r = verify_theorem1(m, sol, 1e-10);
    const ZerosPolesForm zp = zeros_poles_form(m, sol);
    const double routes[] = {r.trace_from_care, r.trace_from_integral, zp.trace_from_zeros_poles};
    for (double value : routes) worst = std::max(worst, std::abs(value - k.expected));
  }
  // (0, 1, 1, 1): the integrand ln(1 + 1/omega^2) is singular at omega = 0,
  // which is interior to the whole-line partition.
  const SystemModel m = suite::build(suite::scalar(0, 1, 1, 1));
  const PopovEvaluator ev(m);
  QuadratureOptions opt;
  opt.tol = 1e-11;
  const double whole = integrate_frequency([&ev](double w) { return logdet_ratio(ev, w); }, ev.singular_frequencies(),
                                           FrequencyRange::whole_line, opt)
                           .value /
                       (2.0 * std::numbers::pi);
  worst = std::max(worst, std::abs(whole - 1.0));
  o.passed = worst <= 1e-8;
  o.detail = "CARE, integral and zeros/poles routes on three scalar plants, worst error " + fmt(worst);
  return o;
}

Outcome zeros_poles_identity() {
  Outcome o;
  double worst = 0.0;
  for (const suite::Plant& p : plants()) {
    const SystemModel m = suite::build(p);
    const CareSolution sol = solve_care(m);
    const ZerosPolesForm zp = zeros_poles_form(m, sol);
    const double trace = (sol.output_error_cov * m.V_inverse()).trace();
    const double residual = std::abs(zp.trace_from_zeros_poles - trace);
    worst = std::max(worst, residual / relative_tol(1e-6, trace));
    if (residual > relative_tol(1e-6, trace)) {
      o.passed = false;
      o.detail += " " + p.name + ";";
    }
  }
  std::size_t cancelled = 0;
  for (const suite::Plant& p : suite::noise_free_unstable(3, 404)) {
    const SystemModel m = suite::build(p);
    const CareSolution sol = solve_care(m);
    const ZerosPolesForm zp = zeros_poles_form(m, sol);
    const double trace = (sol.output_error_cov * m.V_inverse()).trace();
    cancelled += zp.cancelled_pairs;
    if (std::abs(zp.trace_from_zeros_poles - trace) > relative_tol(1e-6, trace)) {
      o.passed = false;
      o.detail += " " + p.name + ";";
    }
  }
  if (cancelled == 0) o.passed = false;
  o.detail = "100 systems, worst residual/tolerance " + fmt(worst) + "; W = 0 models cancelled " +
             std::to_string(cancelled) + " pole-zero pairs" + o.detail;
  return o;
}

Outcome bode_identity() {
  Outcome o;
  double worst = 0.0;
  for (const suite::Plant& p : plants()) {
    const SystemModel m = suite::build(p);
    const BodeIntegral b = bode_sensitivity_integral(m, solve_care(m), 1e-9);
    worst = std::max(worst, b.residual);
    if (b.residual > 1e-6) {
      o.passed = false;
      o.detail += " " + p.name + ";";
    }
  }
  o.detail = "100 systems, worst absolute residual " + fmt(worst) + o.detail;
  return o;
}

Outcome jensen_formulas() {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  double worst = 0.0;
  auto check = [&](const RationalFunction& f, JensenMode mode, double limit) {
    const JensenResult r = verify_proposition(f, mode, 1e-11);
    worst = std::max(worst, r.residual);
    if (r.residual > limit) o.passed = false;
  };
  check(RationalFunction({-1, 1}, {1, 1}), JensenMode::prop1, 1e-8);
  check(RationalFunction({2, 1}, {1, 1}), JensenMode::prop1, 1e-8);
  check(RationalFunction({2, 1}, {-1, 1}), JensenMode::prop2, 1e-8);
  check(RationalFunction({-6, -1, 1}, {4, 5, 1}), JensenMode::prop1, 1e-8);

  suite::Sampler s(606);
  auto roots = [&](int m, bool unstable_allowed) {
    std::vector<Complex> out;
    while (static_cast<int>(out.size()) < m) {
      double re = -s.uniform(0.1, 3.0);
      if (unstable_allowed && s.uniform(0.0, 1.0) < 0.5) re = -re;
      if (m - static_cast<int>(out.size()) >= 2 && s.uniform(0.0, 1.0) < 0.5) {
        const double im = s.uniform(0.1, 4.0);
        out.emplace_back(re, im);
        out.emplace_back(re, -im);
      } else {
        out.emplace_back(re, 0.0);
      }
    }
    return out;
  };
  const int catalog = 60;
  for (int i = 0; i < catalog; ++i) {
    const int m = s.uniform_int(1, 4);
    const bool second_form = i % 2 == 1;
    const auto z = roots(m, true);
    const auto p = roots(m, second_form);
    check(RationalFunction(oracle::poly_from_roots(z), oracle::poly_from_roots(p)),
          second_form ? JensenMode::prop2 : JensenMode::prop1, 1e-7);
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (seconds >= 5.0) o.passed = false;
  o.detail = std::to_string(catalog) + " random functions plus hand examples, worst residual " + fmt(worst) + ", " +
             fmt(seconds) + " s";
  return o;
}

Outcome riccati_ode() {
  Outcome o;
  suite::Sampler s(707);
  double worst = 0.0;
  for (const suite::Plant& p : plants()) {
    const SystemModel m = suite::build(p);
    const CareSolution sol = solve_care(m);
    const auto n = p.A.rows();
    const RealMatrix G = s.gaussian(n, n);
    const RealMatrix P0 = G * G.transpose();
    const double horizon = 20.0 / std::abs(spectral_abscissa(sol.closed_loop_spectrum));
    // step from the norm of the linearized right-hand side at both ends
    const RealMatrix S = m.output_information();
    const double stiffness = 2.0 * std::max((p.A - P0 * S).operatorNorm(), (p.A - sol.P * S).operatorNorm()) + 1.0;
    const double dt = std::min(horizon / 500.0, 1.0 / stiffness);
    const RiccatiTrajectory traj = integrate_riccati_ode(m, P0, horizon, dt, {1u << 30, &sol});
    worst = std::max(worst, *traj.terminal_gap);
    if (*traj.terminal_gap > 1e-5) {
      o.passed = false;
      o.detail += " " + p.name + " gap " + fmt(*traj.terminal_gap) + ";";
    }
  }
  o.detail = "100 systems from random P0, worst terminal gap " + fmt(worst) + o.detail;
  return o;
}

Outcome monte_carlo() {
  const auto start = std::chrono::steady_clock::now();
  const SystemModel m = suite::build(suite::scalar(-1, 1, 3, 1));
  const CareSolution sol = solve_care(m);
  SimulationConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 200.0;
  cfg.trials = 2000;
  cfg.seed = 2024;
  const SimulationSummary s = run_monte_carlo(m, sol, cfg);
  const WhitenessVerdict white = whiteness_check(s, s.trials, s.steps);

  cfg.gain_override = 0.5 * sol.K;
  const SimulationSummary control = run_monte_carlo(m, sol, cfg);
  const WhitenessVerdict colored = whiteness_check(control, control.trials, control.steps);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Outcome o;
  o.passed = s.relative_gap_output <= 0.05 && white.passed && !colored.passed && seconds < 120.0;
  o.detail = "gap " + fmt(s.relative_gap_output) + ", whiteness worst " + fmt(white.worst_value) + " vs " +
             fmt(white.threshold) + "; K/2 control worst " + fmt(colored.worst_value) + " (" +
             (colored.passed ? "not detected" : "detected") + "), " + fmt(seconds) + " s";
  return o;
}

Outcome bounds_sandwich() {
  Outcome o;
  int checked = 0;
  for (const suite::Plant& p : plants()) {
    const SystemModel m = suite::build(p);
    const CareSolution sol = solve_care(m);
    const TraceBounds b = trace_bounds(m, verify_theorem1(m, sol, 1e-8));
    if (!std::isfinite(b.upper)) continue;
    ++checked;
    const double tr = sol.P.trace();
    const double slack = 1e-8 * std::max(1.0, tr);
    if (!(b.lower <= tr + slack && tr <= b.upper + slack)) {
      o.passed = false;
      o.detail += " " + p.name + ";";
    }
  }
  if (checked == 0) o.passed = false;
  o.detail = std::to_string(checked) + " systems with nonsingular C^T V^-1 C" + o.detail;
  return o;
}

Outcome oracle_agreement() {
  Outcome o;
  double worst_care = 0.0;
  for (const suite::Plant& p : plants()) {
    const SystemModel m = suite::build(p);
    const CareSolution h = solve_care(m);
    const CareSolution nk = newton_kleinman_oracle(m, stabilizing_gain(m));
    const double rel = (h.P - nk.P).norm() / norm_or_floor(nk.P);
    worst_care = std::max(worst_care, rel);
  }
  suite::Sampler s(1010);
  double worst_det = 0.0;
  for (Eigen::Index n = 1; n <= 4; ++n) {
    for (int rep = 0; rep < 25; ++rep) {
      const ComplexMatrix B = s.gaussian(n, n).cast<Complex>() + Complex(0, 1) * s.gaussian(n, n).cast<Complex>();
      const ComplexMatrix M = B * B.adjoint() + 0.05 * ComplexMatrix::Identity(n, n);
      const double expected = std::log(oracle::cofactor_determinant(M).real());
      worst_det = std::max(worst_det, std::abs(hermitian_logdet(M) - expected) / std::max(1.0, std::abs(expected)));
    }
  }
  o.passed = worst_care <= 1e-8 && worst_det <= 1e-9;
  o.detail = "Hamiltonian vs Newton-Kleinman worst relative gap " + fmt(worst_care) +
             "; log-det vs cofactor worst relative error " + fmt(worst_det);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, trace_identity},  {2, noise_free_reduction}, {3, scalar_closed_forms}, {4, zeros_poles_identity},
      {5, bode_identity},   {6, jensen_formulas},      {7, riccati_ode},         {8, monte_carlo},
      {9, bounds_sandwich}, {10, oracle_agreement},
  };
  int failures = 0;
  for (const auto& [id, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.passed) ++failures;
    std::printf("criterion %2d: %s  %s\n", id, o.passed ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
