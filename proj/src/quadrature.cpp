#include "riccati_spectra/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>

namespace riccati_spectra {

namespace {

// Kronrod abscissae on [-1, 1]; odd indices are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
  double abs_value = 0.0;
  int level = 0;
};

struct ByError {
  bool operator()(const Interval& x, const Interval& y) const { return x.error < y.error; }
};

Interval gauss_kronrod_15(const std::function<double(double)>& g, double a, double b, int level) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kronrod = 0.0;
  double gauss = 0.0;
  double abs_sum = 0.0;
  for (std::size_t k = 0; k < 8; ++k) {
    const double dx = half * kXgk[k];
    const bool gauss_node = (k % 2 == 1);
    const std::size_t gi = k / 2;
    if (k == 7) {
      const double f = g(center);
      kronrod += kWgk[k] * f;
      gauss += kWg[3] * f;
      abs_sum += kWgk[k] * std::abs(f);
      continue;
    }
    const double f1 = g(center - dx);
    const double f2 = g(center + dx);
    kronrod += kWgk[k] * (f1 + f2);
    abs_sum += kWgk[k] * (std::abs(f1) + std::abs(f2));
    if (gauss_node) gauss += kWg[gi] * (f1 + f2);
  }
  Interval out;
  out.a = a;
  out.b = b;
  out.value = kronrod * half;
  out.error = std::abs((kronrod - gauss) * half);
  out.abs_value = abs_sum * std::abs(half);
  out.level = level;
  return out;
}

double u_to_omega(double u) {
  const double s = u < 0.0 ? -1.0 : 1.0;
  const double a = std::abs(u);
  // Near |u| = 1 use the cotangent of the complement to keep precision.
  const double w = a <= 0.5 ? std::tan(0.5 * std::numbers::pi * a) : 1.0 / std::tan(0.5 * std::numbers::pi * (1.0 - a));
  return s * w;
}

double omega_to_u(double omega) { return 2.0 / std::numbers::pi * std::atan(omega); }

}  // namespace

void require_quadrature_tol(double tol) {
  if (!(tol >= 1e-12 && tol <= 1e-3)) {
    throw ContractError("quadrature tolerance must lie in [1e-12, 1e-3], got " + std::to_string(tol));
  }
}

QuadratureResult adaptive_gauss_kronrod(const std::function<double(double)>& g, const std::vector<double>& points,
                                        const QuadratureOptions& options) {
  if (points.size() < 2) throw ContractError("quadrature needs at least two partition points");
  std::size_t evaluations = 0;
  auto eval = [&](double a, double b, int level) {
    evaluations += 15;
    try {
      return gauss_kronrod_15(g, a, b, level);
    } catch (const PoleAtFrequency& e) {
      throw QuadratureFailure(std::string("integrand singular inside subinterval: ") + e.what(), a, b);
    }
  };

  std::priority_queue<Interval, std::vector<Interval>, ByError> queue;
  double total_error = 0.0;
  double total_abs = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] > points[i])) continue;
    Interval iv = eval(points[i], points[i + 1], 0);
    total_error += iv.error;
    total_abs += iv.abs_value;
    queue.push(iv);
  }

  int deepest = 0;
  while (!queue.empty() && total_error > std::max(options.tol * total_abs, options.abs_tol)) {
    Interval worst = queue.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (worst.level >= options.max_level || queue.size() >= options.max_intervals || !(mid > worst.a && mid < worst.b)) {
      throw QuadratureFailure("adaptive refinement exhausted (level " + std::to_string(worst.level) + ", " +
                                  std::to_string(queue.size()) + " intervals, error " +
                                  std::to_string(total_error) + ")",
                              worst.a, worst.b);
    }
    queue.pop();
    Interval left = eval(worst.a, mid, worst.level + 1);
    Interval right = eval(mid, worst.b, worst.level + 1);
    total_error += left.error + right.error - worst.error;
    total_abs += left.abs_value + right.abs_value - worst.abs_value;
    deepest = std::max(deepest, worst.level + 1);
    queue.push(left);
    queue.push(right);
  }

  std::vector<Interval> done;
  done.reserve(queue.size());
  while (!queue.empty()) {
    done.push_back(queue.top());
    queue.pop();
  }
  std::sort(done.begin(), done.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
  QuadratureResult out;
  for (const Interval& iv : done) {
    out.value += iv.value;
    out.error_estimate += iv.error;
    out.abs_value += iv.abs_value;
  }
  out.evaluations = evaluations;
  out.intervals = done.size();
  out.deepest_level = deepest;
  return out;
}

QuadratureResult integrate_frequency(const std::function<double(double)>& f,
                                     const std::vector<double>& singular_frequencies, FrequencyRange range,
                                     const QuadratureOptions& options) {
  std::vector<double> points{range == FrequencyRange::half_line ? 0.0 : -1.0, 1.0};
  if (range == FrequencyRange::whole_line) points.push_back(0.0);
  for (double w : singular_frequencies) {
    const double u = omega_to_u(std::abs(w));
    if (u > 0.0 && u < 1.0) {
      points.push_back(u);
      if (range == FrequencyRange::whole_line) points.push_back(-u);
    }
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end(), [](double x, double y) { return std::abs(x - y) < 1e-15; }),
               points.end());

  auto mapped = [&f](double u) {
    const double omega = u_to_omega(u);
    return f(omega) * 0.5 * std::numbers::pi * (1.0 + omega * omega);
  };
  try {
    return adaptive_gauss_kronrod(mapped, points, options);
  } catch (const QuadratureFailure& e) {
    throw QuadratureFailure(e.what(), u_to_omega(e.worst_lo()), u_to_omega(e.worst_hi()));
  }
}

}  // namespace riccati_spectra
