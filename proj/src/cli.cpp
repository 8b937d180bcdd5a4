#include "riccati_spectra/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "riccati_spectra/report.hpp"
#include "riccati_spectra/system_file.hpp"

namespace riccati_spectra {

namespace {

struct CommonOptions {
  double tol = 1e-6;
  std::string format = "text";
  std::string output;
  int freq_samples = 12;
};

struct VerifyOptions {
  bool theorem2 = false;
  bool bode = false;
  bool special_cases = false;
};

struct SimulateOptions {
  double dt = 1e-3;
  double t_end = 100.0;
  long trials = 500;
  std::uint64_t seed = 0;
  std::string gain_mode = "steady";
  double burn_in = -1.0;
  double sim_tol = 0.05;
};

struct JensenOptions {
  std::vector<double> numerator;
  std::vector<double> denominator;
  std::string mode = "prop1";
};

double relative_tol(double tol, double scale) { return std::max(tol, tol * std::abs(scale)); }

std::vector<FrequencySample> sample_frequencies(const SystemModel& model, int count) {
  std::vector<FrequencySample> out;
  if (count <= 0) return out;
  double radius = 0.0;
  for (const Complex& z : model.spectrum()) radius = std::max(radius, std::abs(z));
  const double scale = 1.0 + radius;
  const double lo = std::log10(1e-2 * scale);
  const double hi = std::log10(1e2 * scale);
  const PopovEvaluator ev(model);
  for (int k = 0; k < count; ++k) {
    const double t = count == 1 ? 0.5 : static_cast<double>(k) / (count - 1);
    const double omega = std::pow(10.0, lo + t * (hi - lo));
    try {
      out.push_back({omega, logdet_ratio(ev, omega)});
    } catch (const PoleAtFrequency&) {
      // an eigenvalue sits on this sample; leave it out
    }
  }
  return out;
}

Report analyze_model(const SystemFile& file, const SystemModel& model, const CommonOptions& common,
                     const std::string& command) {
  Report r;
  r.command = command;
  r.label = file.label;
  r.state_dim = model.state_dim();
  r.output_dim = model.output_dim();
  r.tolerance = common.tol;
  r.care = solve_care(model);
  r.checks.push_back({"care_residual", r.care->residual, r.care->residual_bound});

  r.spectral = verify_theorem1(model, *r.care, common.tol);
  for (const IdentityResidual& ir : r.spectral->residuals) r.checks.push_back({ir.name, ir.residual, ir.tolerance});
  r.frequency_samples = sample_frequencies(model, common.freq_samples);

  r.bounds = trace_bounds(model, *r.spectral);
  r.trace_P = r.care->P.trace();
  double violation = std::max(0.0, r.bounds->lower - r.trace_P);
  if (std::isfinite(r.bounds->upper)) violation = std::max(violation, r.trace_P - r.bounds->upper);
  r.checks.push_back({"trace_bounds", violation, common.tol * std::max(1.0, std::abs(r.trace_P))});
  return r;
}

void add_verification(Report& r, const SystemModel& model, const CommonOptions& common, VerifyOptions v) {
  if (!v.theorem2 && !v.bode && !v.special_cases) v = {true, true, true};
  SpectralReport& s = *r.spectral;
  if (v.theorem2) {
    s.zeros_poles = zeros_poles_form(model, *r.care);
    IdentityResidual ir;
    ir.name = "zeros_poles_identity";
    ir.lhs = s.trace_from_care;
    ir.rhs = s.zeros_poles->trace_from_zeros_poles;
    ir.residual = std::abs(ir.lhs - ir.rhs);
    ir.tolerance = relative_tol(common.tol, s.trace_from_care);
    s.residuals.push_back(ir);
    r.checks.push_back({ir.name, ir.residual, ir.tolerance});
  }
  if (v.bode) {
    s.bode = bode_sensitivity_integral(model, *r.care, s.quadrature_tol);
    IdentityResidual ir;
    ir.name = "bode_identity";
    ir.lhs = s.bode->integral;
    ir.rhs = s.bode->closed_form;
    ir.residual = s.bode->residual;
    ir.tolerance = common.tol;
    s.residuals.push_back(ir);
    r.checks.push_back({ir.name, ir.residual, ir.tolerance});
  }
  if (v.special_cases) {
    r.special_cases = special_case_checks(model, *r.care, s, common.tol);
    for (const SpecialCase& c : r.special_cases) {
      if (c.applicable) r.checks.push_back({"special_case:" + c.name, c.residual, c.tolerance});
    }
  }
}

void emit(const std::string& text, const CommonOptions& common, std::ostream& out) {
  if (common.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(common.output, std::ios::binary);
  if (!file) throw InputError(common.output + ": cannot open for writing");
  file << text;
}

void emit_report(const Report& r, const CommonOptions& common, std::ostream& out) {
  emit(common.format == "json" ? report_json(r) : report_text(r), common, out);
}

SystemModel model_from(const SystemFile& file) { return build_model(file.A, file.C, file.W, file.V); }

int cmd_analyze(const std::string& path, const CommonOptions& common, std::ostream& out) {
  const SystemFile file = load_system_file(path);
  const SystemModel model = model_from(file);
  const Report r = analyze_model(file, model, common, "analyze");
  emit_report(r, common, out);
  return r.passed() ? kExitPass : kExitVerificationFailure;
}

int cmd_verify(const std::string& path, const CommonOptions& common, const VerifyOptions& v, std::ostream& out) {
  const SystemFile file = load_system_file(path);
  const SystemModel model = model_from(file);
  Report r = analyze_model(file, model, common, "verify");
  add_verification(r, model, common, v);
  emit_report(r, common, out);
  return r.passed() ? kExitPass : kExitVerificationFailure;
}

int cmd_simulate(const std::string& path, const CommonOptions& common, const SimulateOptions& o, std::ostream& out) {
  const SystemFile file = load_system_file(path);
  const SystemModel model = model_from(file);
  Report r;
  r.command = "simulate";
  r.label = file.label;
  r.state_dim = model.state_dim();
  r.output_dim = model.output_dim();
  r.tolerance = common.tol;
  r.care = solve_care(model);

  SimulationDigest d;
  d.config.dt = o.dt;
  d.config.t_end = o.t_end;
  d.config.trials = o.trials;
  d.config.seed = o.seed;
  d.config.gain_mode = o.gain_mode == "transient" ? GainMode::transient : GainMode::steady;
  if (o.burn_in >= 0.0) d.config.burn_in = o.burn_in;
  d.gain_mode = o.gain_mode;
  d.gap_tolerance = o.sim_tol;
  d.summary = run_monte_carlo(model, *r.care, d.config);
  d.whiteness = whiteness_check(d.summary, d.summary.trials, d.summary.steps);
  r.checks.push_back({"simulation_output_gap", d.summary.relative_gap_output, o.sim_tol});
  r.checks.push_back({"innovation_whiteness", d.whiteness.worst_value, d.whiteness.threshold});
  r.simulation = d;
  emit_report(r, common, out);
  return r.passed() ? kExitPass : kExitVerificationFailure;
}

int cmd_jensen(const JensenOptions& j, const CommonOptions& common, std::ostream& out) {
  const RationalFunction f(j.numerator, j.denominator);
  JensenReport r;
  r.numerator = f.numerator();
  r.denominator = f.denominator();
  r.zeros = f.zeros();
  r.poles = f.poles();
  r.mode = j.mode;
  r.tolerance = common.tol;
  const double qtol = std::clamp(common.tol * 1e-3, 1e-12, 1e-3);
  r.result = verify_proposition(f, j.mode == "prop2" ? JensenMode::prop2 : JensenMode::prop1, qtol);
  emit(common.format == "json" ? jensen_json(r) : jensen_text(r), common, out);
  return r.passed() ? kExitPass : kExitVerificationFailure;
}

void add_common(CLI::App* sub, CommonOptions& common) {
  sub->add_option("--tol", common.tol, "Identity tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--format", common.format, "Output format")
      ->capture_default_str()
      ->check(CLI::IsMember({"text", "json"}));
  sub->add_option("--output", common.output, "Write the report to this file");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kalman-Bucy steady-state covariance: Riccati and frequency-domain cross-checks",
               args.empty() ? "riccati-spectra" : args.front()};
  app.require_subcommand(1);

  CommonOptions common;
  VerifyOptions verify;
  SimulateOptions sim;
  JensenOptions jensen;
  std::string path;

  CLI::App* analyze = app.add_subcommand("analyze", "Solve the Riccati equation and check the trace identity");
  analyze->add_option("file", path, "System file (JSON)")->required();
  add_common(analyze, common);
  analyze->add_option("--freq-samples", common.freq_samples, "Frequency-table rows")->capture_default_str();

  CLI::App* verify_cmd = app.add_subcommand("verify", "Analyze plus zeros/poles, Bode and special-case checks");
  verify_cmd->add_option("file", path, "System file (JSON)")->required();
  add_common(verify_cmd, common);
  verify_cmd->add_option("--freq-samples", common.freq_samples, "Frequency-table rows")->capture_default_str();
  verify_cmd->add_flag("--with-theorem2", verify.theorem2, "Zeros/poles form");
  verify_cmd->add_flag("--with-bode", verify.bode, "Bode sensitivity integral");
  verify_cmd->add_flag("--with-special-cases", verify.special_cases, "Reduced formulas");

  CLI::App* jensen_cmd = app.add_subcommand("jensen", "Half-plane Jensen formula for p(s)/q(s)");
  jensen_cmd->add_option("--num", jensen.numerator, "Numerator coefficients, ascending powers")
      ->required()
      ->delimiter(',');
  jensen_cmd->add_option("--den", jensen.denominator, "Denominator coefficients, ascending powers")
      ->required()
      ->delimiter(',');
  jensen_cmd->add_option("--mode", jensen.mode, "prop1 (stable poles) or prop2")
      ->capture_default_str()
      ->check(CLI::IsMember({"prop1", "prop2"}));
  add_common(jensen_cmd, common);

  CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo check of the steady-state covariance");
  sim_cmd->add_option("file", path, "System file (JSON)")->required();
  add_common(sim_cmd, common);
  sim_cmd->add_option("--dt", sim.dt, "Euler step")->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--t-end", sim.t_end, "Horizon")->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--trials", sim.trials, "Independent trials")->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  sim_cmd->add_option("--gain-mode", sim.gain_mode, "steady or transient")
      ->capture_default_str()
      ->check(CLI::IsMember({"steady", "transient"}));
  sim_cmd->add_option("--burn-in", sim.burn_in, "Discarded transient (default 10/|closed-loop abscissa|)");
  sim_cmd->add_option("--sim-tol", sim.sim_tol, "Relative gap tolerance")->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  if (args.empty()) argv.push_back("riccati-spectra");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitInputError;
  }

  try {
    if (*analyze) return cmd_analyze(path, common, out);
    if (*verify_cmd) return cmd_verify(path, common, verify, out);
    if (*jensen_cmd) return cmd_jensen(jensen, common, out);
    if (*sim_cmd) return cmd_simulate(path, common, sim, out);
  } catch (const SimulationFailure& e) {
    err << "simulation failure (trial " << e.trial() << ", t = " << e.time() << "): " << e.what() << "\n";
    return kExitSimulationFailure;
  } catch (const RiccatiBlowUp& e) {
    err << "simulation failure (t = " << e.time() << "): " << e.what() << "\n";
    return kExitSimulationFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const ModelRejection& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const NoStabilizingSolution& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const QuadratureFailure& e) {
    err << "verification failure: " << e.what() << " (worst interval [" << e.worst_lo() << ", " << e.worst_hi()
        << "])\n";
    return kExitVerificationFailure;
  } catch (const std::exception& e) {
    err << "verification failure: " << e.what() << "\n";
    return kExitVerificationFailure;
  }
  return kExitInputError;
}

}  // namespace riccati_spectra
