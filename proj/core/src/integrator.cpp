#include "angio/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "angio/diagnostics.hpp"

namespace angio {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC{0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0,
                                   8.0 / 9.0, 1.0, 1.0};
constexpr double kA21 = 1.0 / 5.0;
constexpr std::array<double, 2> kA3{3.0 / 40.0, 9.0 / 40.0};
constexpr std::array<double, 3> kA4{44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0};
constexpr std::array<double, 4> kA5{19372.0 / 6561.0, -25360.0 / 2187.0,
                                    64448.0 / 6561.0, -212.0 / 729.0};
constexpr std::array<double, 5> kA6{9017.0 / 3168.0, -355.0 / 33.0,
                                    46732.0 / 5247.0, 49.0 / 176.0,
                                    -5103.0 / 18656.0};
// Fifth-order weights (also the last stage row).
constexpr std::array<double, 6> kB{35.0 / 384.0,     0.0,
                                   500.0 / 1113.0,   125.0 / 192.0,
                                   -2187.0 / 6784.0, 11.0 / 84.0};
// Fifth minus fourth order weights.
constexpr std::array<double, 7> kE{
    35.0 / 384.0 - 5179.0 / 57600.0,    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,  125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0, 11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0};

bool finite_state(const std::vector<Spectrum>& fields) {
  return std::all_of(fields.begin(), fields.end(),
                     [](const Spectrum& s) { return s.all_finite(); });
}

// y + dt * sum_j w[j] * k[j]
template <std::size_t M>
SimState combine(const SimState& y, double dt, const std::array<double, M>& w,
                 const std::array<const Tendency*, M>& stages, double time) {
  SimState out = y;
  out.time = time;
  for (std::size_t f = 0; f < y.fields.size(); ++f) {
    auto dst = out.fields[f].coeffs();
    for (std::size_t j = 0; j < M; ++j) {
      if (w[j] == 0.0) continue;
      const auto src = (*stages[j])[f].coeffs();
      const double c = dt * w[j];
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += c * src[k];
    }
  }
  return out;
}

struct Attempt {
  StepOutcome outcome;
  std::optional<Tendency> last_stage;  // f(y_new), reused as the next k1
};

double clamp_dt(double dt, const IntegratorConfig& cfg) {
  return std::clamp(dt, cfg.dt_min, cfg.dt_max);
}

Attempt attempt_step(const SimState& y, double dt, const Tendency& k1,
                     const RhsFunction& rhs, const IntegratorConfig& cfg,
                     bool force_accept = false) {
  Attempt a;
  a.outcome.dt_used = dt;
  auto fail = [&] {
    a.outcome.accepted = false;
    a.outcome.finite = false;
    a.outcome.error_estimate = std::numeric_limits<double>::infinity();
    a.outcome.new_state = y;
    a.outcome.dt_next = std::max(0.5 * dt, 0.0);
    return a;
  };

  const double t = y.time;
  const Tendency k2 = rhs(combine<1>(y, dt, {kA21}, {&k1}, t + kC[1] * dt));
  if (!finite_state(k2)) return fail();
  const Tendency k3 = rhs(combine<2>(y, dt, kA3, {&k1, &k2}, t + kC[2] * dt));
  if (!finite_state(k3)) return fail();
  const Tendency k4 =
      rhs(combine<3>(y, dt, kA4, {&k1, &k2, &k3}, t + kC[3] * dt));
  if (!finite_state(k4)) return fail();
  const Tendency k5 =
      rhs(combine<4>(y, dt, kA5, {&k1, &k2, &k3, &k4}, t + kC[4] * dt));
  if (!finite_state(k5)) return fail();
  const Tendency k6 =
      rhs(combine<5>(y, dt, kA6, {&k1, &k2, &k3, &k4, &k5}, t + kC[5] * dt));
  if (!finite_state(k6)) return fail();
  SimState y_new =
      combine<6>(y, dt, kB, {&k1, &k2, &k3, &k4, &k5, &k6}, t + dt);
  if (!finite_state(y_new.fields)) return fail();
  Tendency k7 = rhs(y_new);
  if (!finite_state(k7)) return fail();

  const std::array<const Tendency*, 7> stages{&k1, &k2, &k3, &k4,
                                              &k5, &k6, &k7};
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t f = 0; f < y.fields.size(); ++f) {
    const auto old_c = y.fields[f].coeffs();
    const auto new_c = y_new.fields[f].coeffs();
    for (std::size_t k = 0; k < old_c.size(); ++k) {
      Complex e{};
      for (std::size_t j = 0; j < stages.size(); ++j) {
        if (kE[j] != 0.0) e += kE[j] * (*stages[j])[f][k];
      }
      e *= dt;
      const double scale =
          cfg.atol + cfg.rtol * std::max(std::abs(old_c[k]), std::abs(new_c[k]));
      sum += std::norm(e) / (scale * scale);
      ++count;
    }
  }
  const double err = count > 0 ? std::sqrt(sum / count) : 0.0;

  StepOutcome& out = a.outcome;
  out.error_estimate = err;
  out.finite = std::isfinite(err);
  if (!out.finite) return fail();

  out.accepted = force_accept || err <= 1.0;
  double factor;
  if (err == 0.0) {
    factor = cfg.max_growth;
  } else {
    factor = cfg.safety * std::pow(err, -0.2);
    factor = std::clamp(factor, cfg.max_shrink,
                        out.accepted ? cfg.max_growth : 1.0);
  }
  out.dt_next = dt * factor;
  if (out.accepted) {
    out.new_state = std::move(y_new);
    a.last_stage = std::move(k7);
  } else {
    out.new_state = y;
    // A rejected step must shrink even when the safety factor is close to 1.
    out.dt_next = std::min(out.dt_next, dt * cfg.safety);
  }
  return a;
}

std::vector<double> output_instants(const IntegratorConfig& cfg) {
  std::vector<double> out;
  if (cfg.output_every > 0.0) {
    for (long m = 1;; ++m) {
      const double t = m * cfg.output_every;
      if (t >= cfg.t_final * (1.0 - 1e-12)) break;
      out.push_back(t);
    }
  }
  out.push_back(cfg.t_final);
  return out;
}

struct MonitorState {
  double gradient0 = 0.0;
  double growth = 0.0;
  double tail = 0.0;

  void update(const Spectrum& p) {
    const SupNorms sup = sup_norms(p);
    growth = gradient0 > 0.0 ? sup.linf_dxp / gradient0 : 0.0;
    tail = tail_fraction(p);
  }
};

}  // namespace

void IntegratorConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("integrator: " + what);
  };
  if (!(rtol > 0.0)) fail("rtol must be positive");
  if (!(atol > 0.0)) fail("atol must be positive");
  if (!(dt_min > 0.0)) fail("dt_min must be positive");
  if (!(dt_min <= dt_init)) fail("dt_init must be >= dt_min");
  if (!(dt_init <= dt_max)) fail("dt_init must be <= dt_max");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
    fail("t_final must be finite and non-negative");
  }
  if (!(safety > 0.0 && safety <= 1.0)) fail("safety must lie in (0, 1]");
  if (!(max_growth >= 1.0)) fail("max_growth must be >= 1");
  if (!(max_shrink > 0.0 && max_shrink <= 1.0)) {
    fail("max_shrink must lie in (0, 1]");
  }
  if (max_steps <= 0) fail("max_steps must be positive");
  if (!(output_every >= 0.0)) fail("output_every must be non-negative");
}

StepOutcome rk45_step(const SimState& state, double dt, const RhsFunction& rhs,
                      const IntegratorConfig& config) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk45_step: dt must be > 0");
  const Tendency k1 = rhs(state);
  StepOutcome out;
  if (!finite_state(k1)) {
    out.new_state = state;
    out.dt_used = dt;
    out.dt_next = 0.5 * dt;
    out.finite = false;
    out.error_estimate = std::numeric_limits<double>::infinity();
    return out;
  }
  out = attempt_step(state, dt, k1, rhs, config).outcome;
  if (out.finite) out.dt_next = clamp_dt(out.dt_next, config);
  return out;
}

std::string_view to_string(Termination status) {
  switch (status) {
    case Termination::reached_t_final: return "reached_t_final";
    case Termination::blowup_suspected: return "blowup_suspected";
    case Termination::under_resolved: return "under_resolved";
    case Termination::max_steps: return "max_steps";
  }
  return "unknown";
}

int exit_code(Termination status) {
  switch (status) {
    case Termination::reached_t_final: return 0;
    case Termination::blowup_suspected: return 2;
    case Termination::under_resolved: return 3;
    default: return 1;
  }
}

IntegrationResult integrate(const SimState& initial, const RhsFunction& rhs,
                            const IntegratorConfig& cfg,
                            const Observer& observer,
                            const MonitorConfig& monitors) {
  cfg.validate();
  if (initial.fields.empty()) {
    throw std::invalid_argument("integrate: state has no fields");
  }
  for (const auto& f : initial.fields) {
    if (!f.all_finite()) {
      throw std::invalid_argument("integrate: non-finite initial state");
    }
  }

  std::vector<Complex> means0;
  for (const auto& f : initial.fields) means0.push_back(f[0]);

  MonitorState mon;
  if (monitors.enabled) {
    mon.gradient0 = sup_norms(initial.primary()).linf_dxp;
    mon.growth = mon.gradient0 > 0.0 ? 1.0 : 0.0;
    mon.tail = tail_fraction(initial.primary());
  }

  IntegrationResult result{initial, {}};
  TerminationReport& rep = result.report;
  SimState& y = result.final_state;
  const double t0 = initial.time;
  rep.time = t0;
  rep.smallest_dt = std::numeric_limits<double>::infinity();

  if (observer) observer(y, StepInfo{0, 0.0, true});

  auto finish = [&](Termination status, std::string detail) {
    rep.status = status;
    rep.time = y.time;
    rep.detail = std::move(detail);
    rep.gradient_growth = mon.growth;
    rep.tail_fraction = mon.tail;
    if (!std::isfinite(rep.smallest_dt)) rep.smallest_dt = 0.0;
    return result;
  };

  if (cfg.t_final == 0.0) return finish(Termination::reached_t_final, "");

  // Output instants are relative to the initial time.
  std::vector<double> outputs = output_instants(cfg);
  for (double& t : outputs) t += t0;
  std::size_t next_out = 0;

  // Classifies a step-size collapse using the monitors.
  auto collapse = [&](const std::string& why) {
    if (monitors.enabled) mon.update(y.primary());
    if (monitors.enabled && mon.growth > monitors.gradient_growth) {
      return finish(Termination::blowup_suspected, why);
    }
    if (monitors.enabled && mon.tail > monitors.tail_threshold) {
      return finish(Termination::under_resolved, why);
    }
    throw IntegrationError("integrate: " + why + " at t = " +
                           std::to_string(y.time));
  };

  Tendency k1 = rhs(y);
  double dt = cfg.adaptive ? clamp_dt(cfg.dt_init, cfg) : cfg.dt_init;

  while (true) {
    if (rep.accepted_steps >= cfg.max_steps) {
      return finish(Termination::max_steps, "step budget exhausted");
    }
    const double target = outputs[next_out];
    const double remaining = target - y.time;
    const double proposed = dt;
    bool landing = false;
    if (dt >= remaining ||
        remaining - dt <= 1e-12 * std::max(1.0, std::abs(target))) {
      dt = remaining;
      landing = true;
    }

    Attempt a = attempt_step(y, dt, k1, rhs, cfg, !cfg.adaptive);
    StepOutcome& out = a.outcome;
    if (!cfg.adaptive && !out.finite) {
      throw IntegrationError("integrate: non-finite state in fixed-step mode "
                             "at t = " + std::to_string(y.time));
    }

    if (!out.accepted) {
      ++rep.rejected_steps;
      const double next = out.dt_next;
      if (next < cfg.dt_min) {
        return collapse(out.finite ? "step size fell below dt_min"
                                   : "non-finite stage at dt_min");
      }
      dt = std::min(next, cfg.dt_max);
      continue;
    }

    ++rep.accepted_steps;
    rep.last_dt = dt;
    rep.smallest_dt = std::min(rep.smallest_dt, dt);
    y = std::move(a.outcome.new_state);
    k1 = std::move(*a.last_stage);
    if (landing) y.time = target;

    for (std::size_t f = 0; f < y.fields.size(); ++f) {
      if (std::abs(y.fields[f][0] - means0[f]) > monitors.mean_tolerance) {
        throw IntegrationError("integrate: mean of field " +
                               std::to_string(f) + " drifted at t = " +
                               std::to_string(y.time));
      }
    }

    if (observer) observer(y, StepInfo{rep.accepted_steps, dt, landing});

    if (monitors.enabled) {
      mon.update(y.primary());
      if (mon.growth >= monitors.gradient_growth) {
        return finish(Termination::blowup_suspected,
                      "gradient growth exceeded limit");
      }
    }

    if (landing) {
      if (++next_out == outputs.size()) {
        return finish(Termination::reached_t_final, "");
      }
    }

    if (cfg.adaptive) {
      double next = clamp_dt(out.dt_next, cfg);
      if (landing) next = std::max(next, std::min(proposed, cfg.dt_max));
      dt = next;
    } else {
      dt = cfg.dt_init;
    }
  }
}

IntegrationResult integrate(const SimState& initial, const ModelParams& params,
                            const IntegratorConfig& config,
                            const Observer& observer,
                            const MonitorConfig& monitors) {
  const RhsFunction rhs = make_rhs(params);
  const bool full = params.model == ModelKind::full_system;
  if (full != initial.is_full_system()) {
    throw std::invalid_argument(
        "integrate: state layout does not match the selected model");
  }
  if (std::abs(initial.primary()[0]) > monitors.mean_tolerance) {
    throw std::invalid_argument(
        "integrate: initial data must have zero mean");
  }
  return integrate(initial, rhs, config, observer, monitors);
}

}  // namespace angio
