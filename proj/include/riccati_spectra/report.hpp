#pragma once

#include <optional>
#include <string>
#include <vector>

#include "riccati_spectra/jensen.hpp"
#include "riccati_spectra/simulate.hpp"
#include "riccati_spectra/spectral.hpp"

namespace riccati_spectra {

/// One verdict line: passed iff residual <= tolerance.
struct Check {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed() const { return residual <= tolerance; }
};

struct FrequencySample {
  double omega = 0.0;
  double logdet_ratio = 0.0;
};

struct SimulationDigest {
  SimulationConfig config;
  SimulationSummary summary;
  WhitenessVerdict whiteness;
  double gap_tolerance = 0.0;
  std::string gain_mode;
};

struct Report {
  std::string command;
  std::optional<std::string> label;
  Eigen::Index state_dim = 0;
  Eigen::Index output_dim = 0;
  double tolerance = 0.0;
  std::optional<CareSolution> care;
  std::optional<SpectralReport> spectral;
  std::vector<FrequencySample> frequency_samples;
  std::optional<TraceBounds> bounds;
  double trace_P = 0.0;
  std::vector<SpecialCase> special_cases;
  std::optional<SimulationDigest> simulation;
  std::vector<Check> checks;

  bool passed() const;
};

/// Key order: schema_version, command, model, care, spectral, bounds,
/// special_cases, simulation, verdict. Infinite values serialize as null.
std::string report_json(const Report& report);
std::string report_text(const Report& report);

struct JensenReport {
  std::vector<double> numerator;
  std::vector<double> denominator;
  Spectrum zeros;
  Spectrum poles;
  std::string mode;
  double tolerance = 0.0;
  JensenResult result;
  bool passed() const { return result.residual <= tolerance; }
};

std::string jensen_json(const JensenReport& report);
std::string jensen_text(const JensenReport& report);

}  // namespace riccati_spectra
