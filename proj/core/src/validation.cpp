#include "angio/validation.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace angio {

namespace {

using nlohmann::json;

constexpr Complex kI{0.0, 1.0};

json finite_or_null(double v) {
  return std::isfinite(v) ? json(v) : json(nullptr);
}

double max_abs(std::span<const Complex> c) {
  double m = 0.0;
  for (const auto& z : c) m = std::max(m, std::abs(z));
  return m;
}

double sup_norm(const Spectrum& s) {
  double m = 0.0;
  const RealField f = backward(s);
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

// Copies the modes shared by both grids onto `coarse`, leaving its Nyquist
// coefficient zero.
Spectrum restrict_to(const Spectrum& s, const SpectralGrid& coarse) {
  Spectrum out(coarse);
  const int kmax = std::min(coarse.nyquist(), s.grid().nyquist()) - 1;
  for (int k = 0; k <= kmax; ++k) out[k] = s[k];
  return out;
}

Spectrum single_sine(const SpectralGrid& grid, int k) {
  std::vector<double> v(grid.n_nodes());
  for (int j = 0; j < grid.n_nodes(); ++j) v[j] = std::sin(k * grid.node(j));
  Spectrum s = forward(RealField(grid, std::move(v)));
  s[0] = Complex{};
  return s;
}

}  // namespace

std::string to_json(const ConvergenceReport& r) {
  json errors = json::array();
  for (double e : r.errors) errors.push_back(finite_or_null(e));
  json meta = json::object();
  for (const auto& [k, v] : r.metadata) meta[k] = finite_or_null(v);
  return json{{"name", r.name},
              {"parameter", r.parameter},
              {"values", r.values},
              {"errors", errors},
              {"estimated_order", finite_or_null(r.estimated_order)},
              {"threshold", finite_or_null(r.threshold)},
              {"verdict", r.passed ? "pass" : "fail"},
              {"detail", r.verdict},
              {"metadata", meta},
              {"notes", r.notes}}
      .dump(2);
}

double log_log_slope(std::span<const double> values,
                     std::span<const double> errors) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < values.size() && i < errors.size(); ++i) {
    if (errors[i] > 0.0 && std::isfinite(errors[i]) && values[i] > 0.0) {
      pts.emplace_back(std::log(values[i]), std::log(errors[i]));
    }
  }
  if (pts.size() < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= pts.size();
  my /= pts.size();
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

Spectrum random_band_limited(const SpectralGrid& grid, int k_max,
                             double amplitude, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Spectrum s(grid);
  const int top = std::min(k_max, grid.nyquist() - 1);
  for (int k = 1; k <= top; ++k) {
    s[k] = amplitude * Complex{unit(rng), unit(rng)} / std::sqrt(2.0);
  }
  return s;
}

double linear_oracle_error(int k, const ModelParams& params, double t_final,
                           const IntegratorConfig& integrator, int n_nodes) {
  if (k == 0) throw std::invalid_argument("linear oracle needs k != 0");
  const SpectralGrid grid(n_nodes);
  if (std::abs(k) >= grid.nyquist()) {
    throw std::invalid_argument("linear oracle: k outside the grid");
  }
  const Spectrum p0 = single_sine(grid, std::abs(k));
  if (t_final == 0.0) return 0.0;

  ModelParams lin = params;
  lin.nonlinear = false;
  IntegratorConfig cfg = integrator;
  cfg.t_final = t_final;
  cfg.output_every = 0.0;
  MonitorConfig mon;
  mon.enabled = false;

  const auto result = integrate(SimState::reduced(0.0, p0), lin, cfg, {}, mon);
  const int ak = std::abs(k);
  const Complex exact =
      std::exp(linear_dispersion(ak, lin) * t_final) * p0[ak];
  return std::abs(result.final_state.primary()[ak] - exact) / std::abs(exact);
}

ConvergenceReport cross_check_rhs(int alpha, int trials, std::uint64_t seed,
                                  int n_nodes, double tolerance) {
  if (trials < 1) throw std::invalid_argument("cross_check_rhs: trials >= 1");
  if (alpha < 0 || alpha > 2) {
    throw std::invalid_argument("cross_check_rhs: alpha must be 0, 1 or 2");
  }
  ConvergenceReport rep;
  rep.name = "cross_check_rhs_alpha" + std::to_string(alpha);
  rep.parameter = "trial";
  rep.threshold = tolerance;

  const SpectralGrid grid(n_nodes);
  std::mt19937_64 rng(seed);
  ModelParams params;
  params.beta = 2.0;
  params.epsilon = 1.0;
  params.alpha = alpha;

  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    // Vary the physical parameters along with the state.
    std::uniform_real_distribution<double> beta_dist(-0.9, 4.0);
    std::uniform_real_distribution<double> eps_dist(0.05, 2.0);
    params.beta = beta_dist(rng);
    params.epsilon = eps_dist(rng);
    const Spectrum p =
        random_band_limited(grid, grid.dealias_cutoff(), 1.0, rng);
    const SimState state = SimState::reduced(0.0, p);

    double err = 0.0;
    if (alpha == 0) {
      const Spectrum closed = rhs_alpha0(state, params);
      const Spectrum p2 = quadratic(p, params.dealias);
      double num = 0.0;
      for (int k = 1; k < grid.nyquist(); ++k) {
        const Complex general =
            general_mode_tendency(k, 0.0, p[k], p2[k], params);
        num = std::max(num, std::abs(general - closed[k]));
      }
      const double den = max_abs(closed.coeffs());
      err = den > 0.0 ? num / den : num;
    } else {
      const Spectrum general = rhs_general(state, params);
      const Spectrum closed =
          alpha == 1 ? rhs_alpha1(state, params) : rhs_alpha2(state, params);
      double num = 0.0;
      for (std::size_t k = 0; k < general.size(); ++k) {
        num = std::max(num, std::abs(general[k] - closed[k]));
      }
      const double den = max_abs(closed.coeffs());
      err = den > 0.0 ? num / den : num;
    }
    rep.values.push_back(t);
    rep.errors.push_back(err);
    worst = std::max(worst, err);
  }
  rep.metadata.emplace_back("max_relative_discrepancy", worst);
  rep.passed = worst <= tolerance;
  rep.verdict = rep.passed ? "closed form matches general tendency"
                           : "closed form disagrees with general tendency";
  return rep;
}

ConvergenceReport asymptotic_consistency(std::span<const double> eps_list,
                                         double tau_final,
                                         const RealField& p0,
                                         const ModelParams& params,
                                         const AsymptoticOptions& options) {
  if (eps_list.size() < 3) {
    throw std::invalid_argument("asymptotic_consistency: need >= 3 epsilons");
  }
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0) || (i > 0 && !(eps_list[i] < eps_list[i - 1]))) {
      throw std::invalid_argument(
          "asymptotic_consistency: epsilons must be positive and decreasing");
    }
  }
  if (std::abs(params.chi - (2.0 * params.beta + 1.0)) > 1e-12) {
    throw std::invalid_argument(
        "asymptotic_consistency: requires chi = 2 beta + 1");
  }
  if (params.chi == 0.0) {
    throw std::invalid_argument("asymptotic_consistency: chi must be != 0");
  }
  params.validate();

  ConvergenceReport rep;
  rep.name = "asymptotic_consistency";
  rep.parameter = "epsilon";
  rep.threshold = options.min_order;
  rep.values.assign(eps_list.begin(), eps_list.end());

  const SpectralGrid& grid = p0.grid();
  Spectrum p_hat = forward(p0);
  p_hat[0] = Complex{};
  p_hat[grid.nyquist()] = Complex{};
  if (params.dealias) truncate_to_dealiased_band(p_hat);

  MonitorConfig mon;
  mon.enabled = false;
  const double chi = params.chi;

  for (const double eps : eps_list) {
    ModelParams reduced = params;
    reduced.epsilon = eps;
    reduced.model = params.alpha > 0.0 ? ModelKind::general : ModelKind::alpha0;
    ModelParams full = params;
    full.epsilon = eps;
    full.model = ModelKind::full_system;

    Spectrum q(grid), v(grid);
    for (std::size_t k = 0; k < p_hat.size(); ++k) {
      q[k] = (eps / chi) * p_hat[k];
      v[k] = -(eps / chi) * p_hat[k];
    }

    IntegratorConfig cfg = options.integrator;
    cfg.output_every = 0.0;
    double discrepancy = std::numeric_limits<double>::infinity();
    double reduced_sup = 0.0;
    try {
      cfg.t_final = tau_final;
      const auto red =
          integrate(SimState::reduced(0.0, p_hat), reduced, cfg, {}, mon);
      const double t_phys = tau_final / eps;
      cfg.t_final = t_phys;
      const auto fs = integrate(SimState::full(0.0, v, q), full, cfg, {}, mon);

      // chi q(xi + t, t) / eps in the moving frame xi = x - t.
      const Spectrum& qt = fs.final_state.fields[1];
      Spectrum diff(grid);
      for (int k = 0; k < grid.n_modes(); ++k) {
        const Complex moved =
            (chi / eps) * qt[k] * std::exp(kI * (static_cast<double>(k) * t_phys));
        diff[k] = moved - red.final_state.primary()[k];
      }
      diff[grid.nyquist()] = Complex{};
      discrepancy = sup_norm(diff);
      reduced_sup = sup_norm(red.final_state.primary());
    } catch (const IntegrationError& e) {
      rep.notes.push_back("eps = " + std::to_string(eps) + ": " + e.what());
    }
    rep.errors.push_back(discrepancy);
    rep.metadata.emplace_back("reduced_sup_eps_" + std::to_string(eps),
                              reduced_sup);
    rep.metadata.emplace_back(
        "relative_discrepancy_eps_" + std::to_string(eps),
        reduced_sup > 0.0 ? discrepancy / reduced_sup : 0.0);
  }

  bool monotone = true;
  bool all_zero = true;
  for (std::size_t i = 0; i < rep.errors.size(); ++i) {
    if (!std::isfinite(rep.errors[i])) monotone = false;
    if (rep.errors[i] != 0.0) all_zero = false;
    if (i > 0 && !(rep.errors[i] <= rep.errors[i - 1])) monotone = false;
  }
  if (all_zero) {
    rep.estimated_order = 0.0;
    rep.passed = true;
    rep.verdict = "all discrepancies vanish";
    return rep;
  }
  for (std::size_t i = 1; i < rep.errors.size(); ++i) {
    if (!(rep.errors[i] < rep.errors[i - 1])) monotone = false;
  }
  rep.estimated_order = log_log_slope(rep.values, rep.errors);
  rep.passed = monotone && rep.estimated_order >= options.min_order;
  rep.verdict = !monotone ? "discrepancy not monotone in epsilon"
                : rep.passed ? "reduced model converges to the full system"
                             : "order below threshold";
  return rep;
}

ConvergenceReport self_convergence(const RunConfig& scenario,
                                   std::span<const RefinementLevel> levels,
                                   double t_out, double required_ratio) {
  if (levels.size() < 2) {
    throw std::invalid_argument("self_convergence: need >= 2 levels");
  }
  ConvergenceReport rep;
  rep.name = "self_convergence";
  rep.parameter = "n_nodes";
  rep.threshold = required_ratio;

  std::vector<std::optional<Spectrum>> finals;
  double finest_tol = levels.front().tol;
  double scale = 0.0;
  for (const auto& level : levels) {
    RunConfig c = scenario;
    c.n_nodes = level.n_nodes;
    c.integrator.rtol = level.tol;
    c.integrator.atol = level.tol * 1e-2;
    c.integrator.t_final = t_out;
    c.integrator.output_every = 0.0;
    c.monitors.enabled = false;
    c.write_snapshots = false;
    finest_tol = std::min(finest_tol, level.tol);
    try {
      RunResult r = run(c, false);
      if (r.report.status != Termination::reached_t_final) {
        throw std::runtime_error(std::string(to_string(r.report.status)));
      }
      scale = std::max(scale, sup_norm(r.final_state.primary()));
      finals.emplace_back(r.final_state.primary());
    } catch (const std::exception& e) {
      rep.notes.push_back("N = " + std::to_string(level.n_nodes) +
                          " did not reach t_out: " + e.what());
      finals.emplace_back(std::nullopt);
    }
  }

  for (std::size_t i = 1; i < levels.size(); ++i) {
    rep.values.push_back(levels[i].n_nodes);
    if (!finals[i - 1] || !finals[i]) {
      rep.errors.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    const SpectralGrid coarse(
        std::min(levels[i - 1].n_nodes, levels[i].n_nodes));
    Spectrum a = restrict_to(*finals[i - 1], coarse);
    const Spectrum b = restrict_to(*finals[i], coarse);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] -= b[k];
    rep.errors.push_back(sup_norm(a));
  }

  // Differences at the level of the time-integration tolerance count as
  // converged.
  const double floor = 100.0 * finest_tol * std::max(1.0, scale);
  rep.metadata.emplace_back("convergence_floor", floor);
  bool ok = std::all_of(rep.errors.begin(), rep.errors.end(),
                        [](double e) { return std::isfinite(e); });
  if (ok && rep.errors.size() == 1) ok = rep.errors[0] <= floor;
  for (std::size_t i = 1; ok && i < rep.errors.size(); ++i) {
    const bool shrank = rep.errors[i] * required_ratio <= rep.errors[i - 1];
    if (!(rep.errors[i] <= floor || shrank)) ok = false;
  }
  rep.passed = ok;
  rep.estimated_order = -log_log_slope(rep.values, rep.errors);
  rep.verdict = ok ? "converged under refinement"
                   : "non-convergent under refinement";
  return rep;
}

ConvergenceReport fixed_step_order(int k, const ModelParams& params,
                                   double t_final, std::span<const double> dts,
                                   double min_order, int n_nodes) {
  if (dts.size() < 2) {
    throw std::invalid_argument("fixed_step_order: need >= 2 step sizes");
  }
  ConvergenceReport rep;
  rep.name = "fixed_step_order";
  rep.parameter = "dt";
  rep.threshold = min_order;

  const SpectralGrid grid(n_nodes);
  const Spectrum p0 = single_sine(grid, k);
  ModelParams lin = params;
  lin.nonlinear = false;
  const Complex exact = std::exp(linear_dispersion(k, lin) * t_final) * p0[k];
  MonitorConfig mon;
  mon.enabled = false;

  for (double dt : dts) {
    IntegratorConfig cfg;
    cfg.adaptive = false;
    cfg.dt_init = dt;
    cfg.dt_min = dt;
    cfg.dt_max = dt;
    cfg.t_final = t_final;
    const auto r = integrate(SimState::reduced(0.0, p0), lin, cfg, {}, mon);
    rep.values.push_back(dt);
    rep.errors.push_back(std::abs(r.final_state.primary()[k] - exact) /
                         std::abs(exact));
  }
  rep.estimated_order = log_log_slope(rep.values, rep.errors);
  bool ok = true;
  for (std::size_t i = 1; i < rep.errors.size(); ++i) {
    const double ratio = rep.errors[i - 1] / rep.errors[i];
    const double halvings = std::log2(rep.values[i - 1] / rep.values[i]);
    rep.metadata.emplace_back("ratio_" + std::to_string(i), ratio);
    if (!(ratio >= std::pow(2.0, min_order * halvings))) ok = false;
  }
  rep.passed = ok;
  rep.verdict = ok ? "order consistent with threshold" : "order too low";
  return rep;
}

std::vector<double> monitored_functionals(const DiagnosticsRecord& rec,
                                          ModelKind model) {
  switch (model) {
    case ModelKind::alpha0: return {rec.energy_E};
    case ModelKind::alpha1: return {rec.a0, rec.a1};
    case ModelKind::alpha2: return {rec.energy_F};
    default: return {rec.energy_G};
  }
}

MonotonicityResult check_monotonicity(const RunConfig& scenario, double scale,
                                      double slack) {
  RunConfig c = scenario;
  c.initial_scale = scenario.initial_scale * scale;
  c.write_snapshots = false;

  MonotonicityResult out;
  try {
    RunResult r = run(c, false);
    out.completed = r.report.status == Termination::reached_t_final;
    out.records = std::move(r.records);
  } catch (const std::exception&) {
    out.completed = false;
  }
  if (!out.completed || out.records.empty()) return out;

  const auto first = monitored_functionals(out.records.front(), c.params.model);
  std::vector<double> prev = first;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < out.records.size(); ++i) {
    const auto cur = monitored_functionals(out.records[i], c.params.model);
    for (std::size_t f = 0; f < cur.size(); ++f) {
      const double ref = first[f] > 0.0 ? first[f] : 1.0;
      worst = std::max(worst, (cur[f] - prev[f]) / ref);
    }
    prev = cur;
  }
  out.worst_increase = worst;
  out.monotone = worst <= slack;
  return out;
}

double calibrate_monotonicity_threshold(const RunConfig& scenario,
                                        double scale_hi, int iterations,
                                        double slack) {
  if (check_monotonicity(scenario, scale_hi, slack).monotone) return scale_hi;
  double lo = 0.0, hi = scale_hi;
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (check_monotonicity(scenario, mid, slack).monotone) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace angio
