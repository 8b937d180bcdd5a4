#include "riccati_spectra/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <thread>

#include <boost/random/normal_distribution.hpp>

namespace riccati_spectra {

namespace {

constexpr double kExplosion = 1e100;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t seed, long trial) {
  return splitmix64(splitmix64(seed) ^ splitmix64(0x5851f42d4c957f2dULL + static_cast<std::uint64_t>(trial)));
}

unsigned resolve_threads(unsigned requested, long trials) {
  unsigned n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("RICCATI_SPECTRA_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v > 0) n = static_cast<unsigned>(v);
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<long>(n, std::max(1L, trials)));
}

// Row-major copy for allocation-free inner loops.
std::vector<double> flat(const RealMatrix& M) {
  std::vector<double> out(static_cast<std::size_t>(M.size()));
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) out[static_cast<std::size_t>(i * M.cols() + j)] = M(i, j);
  }
  return out;
}

struct TrialSums {
  std::vector<double> e_sum, e_outer;  // m, m*m
  std::vector<double> z_sum, z_outer;  // l, l*l
  std::vector<double> lag_sum;         // (lags + 1) * l * l
  std::vector<long> lag_count;         // lags + 1
  long samples = 0;
};

struct Plan {
  Eigen::Index m = 0;
  Eigen::Index l = 0;
  long steps = 0;        // total Euler steps
  long first_kept = 0;   // first step index whose state is recorded
  double h = 0.0;
  std::vector<double> A, C, Wf, Vf, S0;  // S0: factor of the initial covariance
  std::vector<double> K;                 // steady gain, m*l
  std::vector<std::vector<double>> schedule;  // transient gains, one per step
};

// sum_k x[k * stride] * y[k * stride] with four partial sums.
double strided_dot(const double* x, const double* y, std::size_t n, std::size_t stride) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    acc[0] += x[k * stride] * y[k * stride];
    acc[1] += x[(k + 1) * stride] * y[(k + 1) * stride];
    acc[2] += x[(k + 2) * stride] * y[(k + 2) * stride];
    acc[3] += x[(k + 3) * stride] * y[(k + 3) * stride];
  }
  for (; k < n; ++k) acc[0] += x[k * stride] * y[k * stride];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

TrialSums run_trial(const Plan& plan, std::uint64_t seed, long trial) {
  const auto m = static_cast<std::size_t>(plan.m);
  const auto l = static_cast<std::size_t>(plan.l);
  const std::size_t lags = kWhitenessLags;
  TrialSums s;
  s.e_sum.assign(m, 0.0);
  s.e_outer.assign(m * m, 0.0);
  s.z_sum.assign(l, 0.0);
  s.z_outer.assign(l * l, 0.0);
  s.lag_sum.assign((lags + 1) * l * l, 0.0);
  s.lag_count.assign(lags + 1, 0);

  std::mt19937_64 rng(seed);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  const double h = plan.h;
  const double sqrt_h = std::sqrt(h);
  const double inv_sqrt_h = 1.0 / sqrt_h;

  std::vector<double> e(m, 0.0), ae(m), z(l), xi(std::max(m, l));
  const auto kept_steps = static_cast<std::size_t>(plan.steps - plan.first_kept);
  std::vector<double> innovations(kept_steps * l);  // row k holds nu at the k-th kept step

  for (std::size_t i = 0; i < m; ++i) xi[i] = normal(rng);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += plan.S0[i * m + j] * xi[j];
    e[i] = acc;
  }

  auto record_state = [&]() {
    for (std::size_t i = 0; i < m; ++i) {
      s.e_sum[i] += e[i];
      for (std::size_t j = 0; j < m; ++j) s.e_outer[i * m + j] += e[i] * e[j];
    }
    for (std::size_t i = 0; i < l; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += plan.C[i * m + j] * e[j];
      z[i] = acc;
    }
    for (std::size_t i = 0; i < l; ++i) {
      s.z_sum[i] += z[i];
      for (std::size_t j = 0; j < l; ++j) s.z_outer[i * l + j] += z[i] * z[j];
    }
    ++s.samples;
  };

  std::vector<double> scratch(l);
  for (long k = 0; k < plan.steps; ++k) {
    const bool keep = k >= plan.first_kept;
    if (keep) record_state();

    // innovation nu = C e + v, v ~ N(0, V / h)
    double* nu = keep ? &innovations[static_cast<std::size_t>(k - plan.first_kept) * l] : scratch.data();
    for (std::size_t i = 0; i < l; ++i) xi[i] = normal(rng);
    for (std::size_t i = 0; i < l; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += plan.C[i * m + j] * e[j];
      double noise = 0.0;
      for (std::size_t j = 0; j < l; ++j) noise += plan.Vf[i * l + j] * xi[j];
      nu[i] = acc + noise * inv_sqrt_h;
    }

    // e <- e + h (A e - K nu) + w, w ~ N(0, W h)
    const std::vector<double>& K = plan.schedule.empty() ? plan.K : plan.schedule[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += plan.A[i * m + j] * e[j];
      for (std::size_t j = 0; j < l; ++j) acc -= K[i * l + j] * nu[j];
      ae[i] = acc;
    }
    for (std::size_t i = 0; i < m; ++i) xi[i] = normal(rng);
    bool finite = true;
    for (std::size_t i = 0; i < m; ++i) {
      double w = 0.0;
      for (std::size_t j = 0; j < m; ++j) w += plan.Wf[i * m + j] * xi[j];
      e[i] += h * ae[i] + sqrt_h * w;
      finite = finite && std::abs(e[i]) < kExplosion;
    }
    if (!finite) {
      const double t = static_cast<double>(k + 1) * h;
      throw SimulationFailure("estimation error blew up in trial " + std::to_string(trial) + " at t = " +
                                  std::to_string(t),
                              trial, t);
    }
  }
  record_state();

  // sum_k nu_{k+lag} nu_k^T
  for (std::size_t lag = 0; lag <= lags && lag < kept_steps; ++lag) {
    const std::size_t n = kept_steps - lag;
    for (std::size_t i = 0; i < l; ++i) {
      for (std::size_t j = 0; j < l; ++j) {
        s.lag_sum[(lag * l + i) * l + j] = strided_dot(&innovations[lag * l + i], &innovations[j], n, l);
      }
    }
    s.lag_count[lag] = static_cast<long>(n);
  }
  return s;
}

RealMatrix covariance(const std::vector<double>& sum, const std::vector<double>& outer, long n, Eigen::Index d) {
  RealMatrix cov(d, d);
  const double inv = 1.0 / static_cast<double>(n);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      cov(i, j) = outer[ui * static_cast<std::size_t>(d) + uj] * inv - (sum[ui] * inv) * (sum[uj] * inv);
    }
  }
  return symmetrize(cov);
}

}  // namespace

SimulationSummary run_monte_carlo(const SystemModel& model, const CareSolution& care, const SimulationConfig& cfg) {
  const auto m = model.state_dim();
  const auto l = model.output_dim();
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ContractError("dt must be positive");
  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) throw ContractError("t_end must be positive");
  if (cfg.trials <= 0) throw ContractError("trials must be positive");

  RealMatrix K = care.K;
  if (cfg.gain_override) {
    if (cfg.gain_mode != GainMode::steady) throw ContractError("gain_override requires steady gain mode");
    if (cfg.gain_override->rows() != m || cfg.gain_override->cols() != l) {
      throw DimensionError("gain_override must be m x l");
    }
    K = *cfg.gain_override;
  }
  const RealMatrix closed_loop = model.A() - K * model.C();
  const Spectrum cl_spectrum = eigenvalues(closed_loop);
  if (!is_hurwitz(cl_spectrum)) {
    throw SimulationFailure("closed loop A - K C is not Hurwitz", -1, 0.0);
  }
  const double abscissa = spectral_abscissa(cl_spectrum);
  double radius = 0.0;
  for (const Complex& z : cl_spectrum) radius = std::max(radius, std::abs(z));

  SimulationSummary summary;
  summary.dt = cfg.dt;
  summary.trials = cfg.trials;
  summary.burn_in = cfg.burn_in.value_or(std::min(10.0 / std::abs(abscissa), 0.5 * cfg.t_end));
  if (!(summary.burn_in >= 0.0 && summary.burn_in < cfg.t_end)) throw ContractError("burn_in must lie in [0, t_end)");
  if (cfg.dt > (cfg.t_end - summary.burn_in) / 100.0) {
    throw ContractError("dt must not exceed (t_end - burn_in) / 100");
  }
  summary.discretization_allowance = cfg.dt * std::max(1.0, radius);

  RealMatrix S0 = RealMatrix::Identity(m, m);
  RealMatrix P0 = RealMatrix::Identity(m, m);
  if (cfg.initial_state_cov) {
    const RealMatrix& sigma = *cfg.initial_state_cov;
    if (sigma.rows() != m || sigma.cols() != m) throw DimensionError("initial_state_cov must be m x m");
    require_finite(sigma, "initial_state_cov");
    if (symmetry_defect(sigma) > 1e-10) throw ContractError("initial_state_cov must be symmetric");
    if (min_symmetric_eigenvalue(sigma) < -1e-10 * norm_or_floor(sigma)) {
      throw ContractError("initial_state_cov must be positive semidefinite");
    }
    P0 = symmetrize(sigma);
    S0 = psd_factor(P0);
  }

  Plan plan;
  plan.m = m;
  plan.l = l;
  plan.steps = static_cast<long>(std::ceil(cfg.t_end / cfg.dt * (1.0 - 1e-12)));
  plan.h = cfg.t_end / static_cast<double>(plan.steps);
  plan.first_kept = static_cast<long>(std::ceil(summary.burn_in / plan.h * (1.0 - 1e-12)));
  summary.steps = plan.steps - plan.first_kept;

  // Explicit Euler on the error dynamics is stable only when every eigenvalue
  // of I + h (A - K C) lies inside the unit circle.
  const RealMatrix step_map = RealMatrix::Identity(m, m) + plan.h * closed_loop;
  double step_radius = 0.0;
  for (const Complex& z : eigenvalues(step_map)) step_radius = std::max(step_radius, std::abs(z));
  if (step_radius >= 1.0) {
    throw SimulationFailure("dt = " + std::to_string(cfg.dt) +
                                " is beyond the explicit stability limit of the closed loop (|1 + dt lambda| = " +
                                std::to_string(step_radius) + ")",
                            -1, 0.0);
  }

  plan.A = flat(model.A());
  plan.C = flat(model.C());
  plan.Wf = flat(psd_factor(model.W()));
  plan.Vf = flat(psd_factor(model.V()));
  plan.S0 = flat(S0);
  plan.K = flat(K);
  if (cfg.gain_mode == GainMode::transient) {
    const RiccatiTrajectory traj = integrate_riccati_ode(model, P0, cfg.t_end, cfg.dt);
    plan.schedule.reserve(static_cast<std::size_t>(plan.steps));
    const RealMatrix CtVinv = model.C().transpose() * model.V_inverse();
    for (long k = 0; k < plan.steps; ++k) plan.schedule.push_back(flat(traj.covariances[static_cast<std::size_t>(k)] * CtVinv));
  }

  std::vector<TrialSums> per_trial(static_cast<std::size_t>(cfg.trials));
  const unsigned workers = resolve_threads(cfg.threads, cfg.trials);
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned id) {
    try {
      for (long t = id; t < cfg.trials; t += workers) {
        per_trial[static_cast<std::size_t>(t)] = run_trial(plan, trial_seed(cfg.seed, t), t);
      }
    } catch (...) {
      errors[id] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned id = 0; id < workers; ++id) pool.emplace_back(work, id);
    for (auto& th : pool) th.join();
  }
  // Report the failure of the lowest-numbered trial, independent of scheduling.
  long first_trial = -1;
  std::exception_ptr first_ptr;
  for (const auto& ep : errors) {
    if (!ep) continue;
    try {
      std::rethrow_exception(ep);
    } catch (const SimulationFailure& f) {
      if (!first_ptr || f.trial() < first_trial) {
        first_ptr = ep;
        first_trial = f.trial();
      }
    } catch (...) {
      std::rethrow_exception(ep);
    }
  }
  if (first_ptr) std::rethrow_exception(first_ptr);

  // Fixed-order reduction.
  const auto um = static_cast<std::size_t>(m);
  const auto ul = static_cast<std::size_t>(l);
  std::vector<double> e_sum(um, 0.0), e_outer(um * um, 0.0), z_sum(ul, 0.0), z_outer(ul * ul, 0.0);
  std::vector<double> lag_sum((kWhitenessLags + 1) * ul * ul, 0.0);
  std::vector<long> lag_count(kWhitenessLags + 1, 0);
  long samples = 0;
  for (const TrialSums& s : per_trial) {
    for (std::size_t i = 0; i < e_sum.size(); ++i) e_sum[i] += s.e_sum[i];
    for (std::size_t i = 0; i < e_outer.size(); ++i) e_outer[i] += s.e_outer[i];
    for (std::size_t i = 0; i < z_sum.size(); ++i) z_sum[i] += s.z_sum[i];
    for (std::size_t i = 0; i < z_outer.size(); ++i) z_outer[i] += s.z_outer[i];
    for (std::size_t i = 0; i < lag_sum.size(); ++i) lag_sum[i] += s.lag_sum[i];
    for (std::size_t i = 0; i < lag_count.size(); ++i) lag_count[i] += s.lag_count[i];
    samples += s.samples;
  }

  summary.empirical_state_error_cov = covariance(e_sum, e_outer, samples, m);
  summary.empirical_output_error_cov = covariance(z_sum, z_outer, samples, l);
  summary.relative_gap_state = (summary.empirical_state_error_cov - care.P).norm() / norm_or_floor(care.P);
  summary.relative_gap_output =
      (summary.empirical_output_error_cov - care.output_error_cov).norm() / norm_or_floor(care.output_error_cov);

  RealMatrix r0(l, l);
  for (Eigen::Index i = 0; i < l; ++i) {
    for (Eigen::Index j = 0; j < l; ++j) {
      r0(i, j) = lag_sum[static_cast<std::size_t>(i * l + j)] / static_cast<double>(std::max(lag_count[0], 1L));
    }
  }
  for (int lag = 1; lag <= kWhitenessLags; ++lag) {
    LagCorrelation lc;
    lc.lag = lag * plan.h;
    lc.correlation = RealMatrix::Zero(l, l);
    const double n = static_cast<double>(std::max(lag_count[static_cast<std::size_t>(lag)], 1L));
    for (Eigen::Index i = 0; i < l; ++i) {
      for (Eigen::Index j = 0; j < l; ++j) {
        const double scale = std::sqrt(r0(i, i) * r0(j, j));
        const double raw = lag_sum[static_cast<std::size_t>(lag) * ul * ul + static_cast<std::size_t>(i * l + j)] / n;
        lc.correlation(i, j) = scale > 0.0 ? raw / scale : 0.0;
      }
    }
    summary.innovation_autocorr.push_back(std::move(lc));
  }
  return summary;
}

WhitenessVerdict whiteness_check(const SimulationSummary& summary, long trials, long steps) {
  WhitenessVerdict v;
  const double n = static_cast<double>(std::max(trials, 1L)) * static_cast<double>(std::max(steps, 1L));
  v.threshold = 4.0 / std::sqrt(n) + 0.02 * summary.discretization_allowance;
  for (const LagCorrelation& lc : summary.innovation_autocorr) {
    for (Eigen::Index i = 0; i < lc.correlation.rows(); ++i) {
      for (Eigen::Index j = 0; j < lc.correlation.cols(); ++j) {
        const double value = std::abs(lc.correlation(i, j));
        if (value > v.worst_value) {
          v.worst_value = value;
          v.worst_lag = lc.lag;
          v.worst_row = i;
          v.worst_col = j;
        }
      }
    }
  }
  v.passed = v.worst_value <= v.threshold;
  return v;
}

}  // namespace riccati_spectra
