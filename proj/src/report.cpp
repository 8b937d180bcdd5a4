#include "riccati_spectra/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace riccati_spectra {

namespace {

using nlohmann::ordered_json;

constexpr int kTextDigits = 15;

ordered_json number(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

ordered_json matrix_json(const RealMatrix& M) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(number(M(i, j)));
    rows.push_back(row);
  }
  return rows;
}

ordered_json spectrum_json(const Spectrum& s) {
  ordered_json out = ordered_json::array();
  for (const Complex& z : s) out.push_back(ordered_json::array({number(z.real()), number(z.imag())}));
  return out;
}

ordered_json strings_json(const std::vector<std::string>& v) {
  ordered_json out = ordered_json::array();
  for (const auto& s : v) out.push_back(s);
  return out;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(kTextDigits) << x;
  return os.str();
}

std::string fmt(const Complex& z) {
  if (z.imag() == 0.0) return fmt(z.real());
  return fmt(z.real()) + (z.imag() < 0 ? " - " : " + ") + fmt(std::abs(z.imag())) + "j";
}

std::string fmt(const Spectrum& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? ", " : "") + fmt(s[i]);
  return out + "]";
}

class TextWriter {
 public:
  void section(const std::string& title) {
    os_ << (first_ ? "" : "\n") << "[" << title << "]\n";
    first_ = false;
  }
  void field(const std::string& key, const std::string& value) {
    os_ << "  " << std::left << std::setw(36) << key << value << "\n";
  }
  void field(const std::string& key, double value) { field(key, fmt(value)); }
  void matrix(const std::string& key, const RealMatrix& M) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      std::string row;
      for (Eigen::Index j = 0; j < M.cols(); ++j) {
        std::ostringstream cell;
        cell << std::right << std::setw(24) << fmt(M(i, j));
        row += cell.str();
      }
      field(i == 0 ? key : "", row);
    }
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
  bool first_ = true;
};

ordered_json zeros_poles_json(const ZerosPolesForm& zp) {
  ordered_json j;
  j["zeros"] = spectrum_json(zp.zeros);
  j["poles"] = spectrum_json(zp.poles);
  j["cancelled_pairs"] = zp.cancelled_pairs;
  j["zeros_term"] = number(zp.zeros_term);
  j["poles_term"] = number(zp.poles_term);
  j["unstable_sum"] = number(zp.unstable_sum);
  j["trace_from_zeros_poles"] = number(zp.trace_from_zeros_poles);
  j["flags"] = strings_json(zp.flags);
  return j;
}

}  // namespace

bool Report::passed() const {
  for (const Check& c : checks) {
    if (!c.passed()) return false;
  }
  return true;
}

std::string report_json(const Report& r) {
  ordered_json doc;
  doc["schema_version"] = "1";
  doc["command"] = r.command;

  ordered_json model;
  model["label"] = r.label ? ordered_json(*r.label) : ordered_json(nullptr);
  model["state_dim"] = r.state_dim;
  model["output_dim"] = r.output_dim;
  doc["model"] = model;

  if (r.care) {
    ordered_json care;
    care["P"] = matrix_json(r.care->P);
    care["K"] = matrix_json(r.care->K);
    care["output_error_cov"] = matrix_json(r.care->output_error_cov);
    care["closed_loop_spectrum"] = spectrum_json(r.care->closed_loop_spectrum);
    care["residual"] = number(r.care->residual);
    care["residual_bound"] = number(r.care->residual_bound);
    doc["care"] = care;
  } else {
    doc["care"] = nullptr;
  }

  if (r.spectral) {
    const SpectralReport& s = *r.spectral;
    ordered_json sp;
    sp["quadrature_tol"] = number(s.quadrature_tol);
    sp["integral_term"] = number(s.integral_term);
    sp["unstable_sum"] = number(s.unstable_sum);
    sp["trace_from_care"] = number(s.trace_from_care);
    sp["trace_from_integral"] = number(s.trace_from_integral);
    sp["zeros_poles"] = s.zeros_poles ? zeros_poles_json(*s.zeros_poles) : ordered_json(nullptr);
    if (s.bode) {
      ordered_json b;
      b["integral"] = number(s.bode->integral);
      b["closed_form"] = number(s.bode->closed_form);
      b["residual"] = number(s.bode->residual);
      sp["bode"] = b;
    } else {
      sp["bode"] = nullptr;
    }
    ordered_json residuals = ordered_json::array();
    for (const IdentityResidual& ir : s.residuals) {
      ordered_json e;
      e["name"] = ir.name;
      e["lhs"] = number(ir.lhs);
      e["rhs"] = number(ir.rhs);
      e["residual"] = number(ir.residual);
      e["tolerance"] = number(ir.tolerance);
      residuals.push_back(e);
    }
    sp["residuals"] = residuals;
    sp["flags"] = strings_json(s.flags);
    ordered_json samples = ordered_json::array();
    for (const FrequencySample& f : r.frequency_samples) {
      samples.push_back(ordered_json::array({number(f.omega), number(f.logdet_ratio)}));
    }
    sp["frequency_samples"] = samples;
    doc["spectral"] = sp;
  } else {
    doc["spectral"] = nullptr;
  }

  if (r.bounds) {
    ordered_json b;
    b["lower"] = number(r.bounds->lower);
    b["trace_P"] = number(r.trace_P);
    b["upper"] = number(r.bounds->upper);
    b["lambda_min"] = number(r.bounds->lambda_min);
    b["lambda_max"] = number(r.bounds->lambda_max);
    doc["bounds"] = b;
  } else {
    doc["bounds"] = nullptr;
  }

  ordered_json cases = ordered_json::array();
  for (const SpecialCase& c : r.special_cases) {
    ordered_json e;
    e["name"] = c.name;
    e["condition"] = c.condition;
    e["applicable"] = c.applicable;
    e["reduced_value"] = c.applicable ? number(c.reduced_value) : ordered_json(nullptr);
    e["reference_value"] = c.applicable ? number(c.reference_value) : ordered_json(nullptr);
    e["residual"] = c.applicable ? number(c.residual) : ordered_json(nullptr);
    e["tolerance"] = c.applicable ? number(c.tolerance) : ordered_json(nullptr);
    cases.push_back(e);
  }
  doc["special_cases"] = cases;

  if (r.simulation) {
    const SimulationDigest& d = *r.simulation;
    ordered_json sim;
    sim["dt"] = number(d.config.dt);
    sim["t_end"] = number(d.config.t_end);
    sim["burn_in"] = number(d.summary.burn_in);
    sim["trials"] = d.config.trials;
    sim["seed"] = d.config.seed;
    sim["gain_mode"] = d.gain_mode;
    sim["steps_per_trial"] = d.summary.steps;
    sim["empirical_output_error_cov"] = matrix_json(d.summary.empirical_output_error_cov);
    sim["empirical_state_error_cov"] = matrix_json(d.summary.empirical_state_error_cov);
    sim["relative_gap_output"] = number(d.summary.relative_gap_output);
    sim["relative_gap_state"] = number(d.summary.relative_gap_state);
    sim["gap_tolerance"] = number(d.gap_tolerance);
    ordered_json w;
    w["passed"] = d.whiteness.passed;
    w["threshold"] = number(d.whiteness.threshold);
    w["worst_value"] = number(d.whiteness.worst_value);
    w["worst_lag"] = number(d.whiteness.worst_lag);
    w["worst_entry"] = ordered_json::array({d.whiteness.worst_row, d.whiteness.worst_col});
    sim["whiteness"] = w;
    doc["simulation"] = sim;
  } else {
    doc["simulation"] = nullptr;
  }

  ordered_json verdict;
  verdict["passed"] = r.passed();
  verdict["tolerance"] = number(r.tolerance);
  ordered_json checks = ordered_json::array();
  for (const Check& c : r.checks) {
    ordered_json e;
    e["name"] = c.name;
    e["residual"] = number(c.residual);
    e["tolerance"] = number(c.tolerance);
    e["passed"] = c.passed();
    checks.push_back(e);
  }
  verdict["checks"] = checks;
  doc["verdict"] = verdict;
  return doc.dump(2) + "\n";
}

std::string report_text(const Report& r) {
  TextWriter w;
  w.section("model");
  w.field("command", r.command);
  w.field("label", r.label.value_or("-"));
  w.field("state_dim", std::to_string(r.state_dim));
  w.field("output_dim", std::to_string(r.output_dim));

  if (r.care) {
    w.section("care");
    w.matrix("P", r.care->P);
    w.matrix("K", r.care->K);
    w.matrix("output_error_cov", r.care->output_error_cov);
    w.field("closed_loop_spectrum", fmt(r.care->closed_loop_spectrum));
    w.field("residual", r.care->residual);
    w.field("residual_bound", r.care->residual_bound);
  }
  if (r.spectral) {
    const SpectralReport& s = *r.spectral;
    w.section("spectral");
    w.field("quadrature_tol", s.quadrature_tol);
    w.field("integral_term", s.integral_term);
    w.field("unstable_sum", s.unstable_sum);
    w.field("trace_from_care", s.trace_from_care);
    w.field("trace_from_integral", s.trace_from_integral);
    if (s.zeros_poles) {
      const ZerosPolesForm& zp = *s.zeros_poles;
      w.field("zeros", fmt(zp.zeros));
      w.field("poles", fmt(zp.poles));
      w.field("cancelled_pairs", std::to_string(zp.cancelled_pairs));
      w.field("zeros_term", zp.zeros_term);
      w.field("poles_term", zp.poles_term);
      w.field("trace_from_zeros_poles", zp.trace_from_zeros_poles);
      for (const auto& f : zp.flags) w.field("flag", f);
    }
    if (s.bode) {
      w.field("bode_integral", s.bode->integral);
      w.field("bode_closed_form", s.bode->closed_form);
      w.field("bode_residual", s.bode->residual);
    }
    for (const auto& f : s.flags) w.field("flag", f);
    for (const FrequencySample& f : r.frequency_samples) {
      w.field("sample omega=" + fmt(f.omega), f.logdet_ratio);
    }
  }
  if (r.bounds) {
    w.section("bounds");
    w.field("lower", r.bounds->lower);
    w.field("trace_P", r.trace_P);
    w.field("upper", std::isfinite(r.bounds->upper) ? fmt(r.bounds->upper) : "inf");
    w.field("lambda_min", r.bounds->lambda_min);
    w.field("lambda_max", r.bounds->lambda_max);
  }
  if (!r.special_cases.empty()) {
    w.section("special_cases");
    for (const SpecialCase& c : r.special_cases) {
      if (!c.applicable) {
        w.field(c.name, "not applicable (" + c.condition + ")");
      } else {
        w.field(c.name, "reduced " + fmt(c.reduced_value) + ", reference " + fmt(c.reference_value) +
                            ", residual " + fmt(c.residual) + " (tol " + fmt(c.tolerance) + ")");
      }
    }
  }
  if (r.simulation) {
    const SimulationDigest& d = *r.simulation;
    w.section("simulation");
    w.field("dt", d.config.dt);
    w.field("t_end", d.config.t_end);
    w.field("burn_in", d.summary.burn_in);
    w.field("trials", std::to_string(d.config.trials));
    w.field("seed", std::to_string(d.config.seed));
    w.field("gain_mode", d.gain_mode);
    w.field("steps_per_trial", std::to_string(d.summary.steps));
    w.matrix("empirical_output_error_cov", d.summary.empirical_output_error_cov);
    w.matrix("empirical_state_error_cov", d.summary.empirical_state_error_cov);
    w.field("relative_gap_output", d.summary.relative_gap_output);
    w.field("relative_gap_state", d.summary.relative_gap_state);
    w.field("gap_tolerance", d.gap_tolerance);
    w.field("whiteness", std::string(d.whiteness.passed ? "pass" : "fail") + " (worst " +
                             fmt(d.whiteness.worst_value) + " at lag " + fmt(d.whiteness.worst_lag) +
                             ", threshold " + fmt(d.whiteness.threshold) + ")");
  }
  w.section("verdict");
  for (const Check& c : r.checks) {
    w.field(c.name, std::string(c.passed() ? "PASS" : "FAIL") + "  residual " + fmt(c.residual) + " (tol " +
                        fmt(c.tolerance) + ")");
  }
  w.field("overall", r.passed() ? "PASS" : "FAIL");
  return w.str();
}

std::string jensen_json(const JensenReport& r) {
  ordered_json doc;
  doc["schema_version"] = "1";
  doc["command"] = "jensen";
  ordered_json f;
  f["numerator"] = r.numerator;
  f["denominator"] = r.denominator;
  f["zeros"] = spectrum_json(r.zeros);
  f["poles"] = spectrum_json(r.poles);
  doc["function"] = f;
  ordered_json j;
  j["mode"] = r.mode;
  j["integral_numeric"] = number(r.result.integral_numeric);
  j["limit_term"] = number(r.result.limit_term);
  j["zeros_term"] = number(r.result.zeros_term);
  j["poles_term"] = number(r.result.poles_term);
  j["closed_form"] = number(r.result.closed_form);
  j["residual"] = number(r.result.residual);
  j["warnings"] = strings_json(r.result.warnings);
  doc["jensen"] = j;
  ordered_json verdict;
  verdict["passed"] = r.passed();
  verdict["tolerance"] = number(r.tolerance);
  doc["verdict"] = verdict;
  return doc.dump(2) + "\n";
}

std::string jensen_text(const JensenReport& r) {
  TextWriter w;
  w.section("jensen");
  w.field("mode", r.mode);
  w.field("zeros", fmt(r.zeros));
  w.field("poles", fmt(r.poles));
  w.field("integral_numeric", r.result.integral_numeric);
  w.field("limit_term", r.result.limit_term);
  w.field("zeros_term", r.result.zeros_term);
  w.field("poles_term", r.result.poles_term);
  w.field("closed_form", r.result.closed_form);
  w.field("residual", r.result.residual);
  for (const auto& s : r.result.warnings) w.field("warning", s);
  w.section("verdict");
  w.field("tolerance", r.tolerance);
  w.field("overall", r.passed() ? "PASS" : "FAIL");
  return w.str();
}

}  // namespace riccati_spectra
