#pragma once

// Independent checks of the solver: exact linear evolution, agreement of the
// closed-form tendencies with the general one, reduced model vs. the parent
// chemotaxis system, and refinement studies.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "angio/integrator.hpp"
#include "angio/model.hpp"
#include "angio/runner.hpp"

namespace angio {

struct ConvergenceReport {
  std::string name;
  /// Swept parameter ("epsilon", "n_nodes", "dt", "trial", ...).
  std::string parameter;
  std::vector<double> values;
  std::vector<double> errors;
  /// Least-squares slope of log(error) against log(value); 0 when fewer than
  /// two positive errors exist.
  double estimated_order = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string verdict;
  /// Extra numeric results, serialized under "metadata".
  std::vector<std::pair<std::string, double>> metadata;
  std::vector<std::string> notes;
};

std::string to_json(const ConvergenceReport& report);

/// Slope of log(errors) vs log(values) over entries with positive error.
double log_log_slope(std::span<const double> values,
                     std::span<const double> errors);

/// Random zero-mean field with modes 1..k_max, coefficients of magnitude
/// <= amplitude.
Spectrum random_band_limited(const SpectralGrid& grid, int k_max,
                             double amplitude, std::mt19937_64& rng);

/// Integrates the linearized model from sin(kx) and returns
/// |p_hat(k, t) - exp(lambda t) p_hat(k, 0)| / |exp(lambda t) p_hat(k, 0)|.
double linear_oracle_error(int k, const ModelParams& params, double t_final,
                           const IntegratorConfig& integrator = {},
                           int n_nodes = 32);

/// Max relative discrepancy between the general tendency and the closed form
/// for alpha in {0, 1, 2} over random states. At alpha = 0 the comparison is
/// per mode against general_mode_tendency.
ConvergenceReport cross_check_rhs(int alpha, int trials,
                                  std::uint64_t seed = 12345,
                                  int n_nodes = 64,
                                  double tolerance = 1e-12);

struct AsymptoticOptions {
  IntegratorConfig integrator;
  /// Required order in epsilon.
  double min_order = 0.8;
};

/// For every eps: runs the chemotaxis system from u = 1 - eps p0/chi,
/// q = eps p0/chi to t = tau_final/eps, maps chi q(xi + t, t)/eps into the
/// moving frame with an exact phase shift, runs the reduced model (epsilon =
/// eps) to tau_final and records the sup-norm discrepancy. Passes when the
/// discrepancies decrease monotonically with order >= min_order.
ConvergenceReport asymptotic_consistency(std::span<const double> eps_list,
                                         double tau_final,
                                         const RealField& p0,
                                         const ModelParams& params,
                                         const AsymptoticOptions& options = {});

struct RefinementLevel {
  int n_nodes = 0;
  double tol = 0.0;
};

/// Runs `scenario` (monitors off) to t_out at each level and compares
/// successive levels in sup norm on the coarser grid. Passes when each
/// discrepancy is at least `required_ratio` times smaller than the previous
/// one, or all are at round-off. A level that fails to reach t_out counts as
/// an infinite discrepancy.
ConvergenceReport self_convergence(const RunConfig& scenario,
                                   std::span<const RefinementLevel> levels,
                                   double t_out, double required_ratio = 10.0);

/// Fixed-step error of the linearized single-mode problem at t_final for each
/// dt; the order is the slope in dt. Passes when every halving reduces the
/// error by at least 2^min_order.
ConvergenceReport fixed_step_order(int k, const ModelParams& params,
                                   double t_final, std::span<const double> dts,
                                   double min_order = 4.0, int n_nodes = 32);

/// Quantities whose monotone decay the small-data theory predicts:
/// alpha0 -> {E}, alpha1 -> {A^0, A^1}, alpha2 -> {F}, otherwise {G}.
std::vector<double> monitored_functionals(const DiagnosticsRecord& rec,
                                          ModelKind model);

struct MonotonicityResult {
  bool completed = false;
  bool monotone = false;
  /// Largest increase between consecutive samples, relative to the initial
  /// value of the functional.
  double worst_increase = 0.0;
  std::vector<DiagnosticsRecord> records;
};

/// Runs `scenario` with its initial profile scaled by `scale` and checks
/// that the monitored functionals never increase by more than `slack` times
/// their initial value between recorded samples.
MonotonicityResult check_monotonicity(const RunConfig& scenario, double scale,
                                      double slack = 1e-9);

/// Bisection for the largest scale in [0, scale_hi] at which
/// check_monotonicity still passes. Returns scale_hi when it passes there.
double calibrate_monotonicity_threshold(const RunConfig& scenario,
                                        double scale_hi, int iterations,
                                        double slack = 1e-9);

}  // namespace angio
