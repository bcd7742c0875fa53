#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "angio/model.hpp"

namespace angio {

struct IntegratorConfig {
  double rtol = 1e-8;
  double atol = 1e-10;
  double dt_init = 1e-4;
  double dt_min = 1e-12;
  double dt_max = 0.1;
  double t_final = 1.0;
  double safety = 0.9;
  /// Bounds on the per-step change of dt.
  double max_growth = 5.0;
  double max_shrink = 0.2;
  long max_steps = 50'000'000;
  /// false: fixed steps of dt_init, every step accepted.
  bool adaptive = true;
  /// Spacing of output instants; 0 means only t_final.
  double output_every = 0.0;

  /// Throws std::invalid_argument naming the offending field. t_final = 0 is
  /// allowed and means "return the initial state".
  void validate() const;
};

struct StepOutcome {
  bool accepted = false;
  SimState new_state;
  double error_estimate = 0.0;
  double dt_used = 0.0;
  double dt_next = 0.0;
  /// False when a stage produced NaN/Inf; the step is then rejected and
  /// dt_next = dt_used / 2.
  bool finite = true;
};

/// One Dormand-Prince 4(5) step with local extrapolation. The error estimate
/// is the RMS over all coefficients of |y5 - y4| / (atol + rtol max(|y|,
/// |y_new|)). dt_next is clamped to [dt_min, dt_max].
StepOutcome rk45_step(const SimState& state, double dt, const RhsFunction& rhs,
                      const IntegratorConfig& config);

enum class Termination {
  reached_t_final,
  blowup_suspected,
  under_resolved,
  max_steps,
};

std::string_view to_string(Termination status);
/// 0 reached_t_final, 2 blowup_suspected, 3 under_resolved, 1 otherwise.
int exit_code(Termination status);

struct TerminationReport {
  Termination status = Termination::reached_t_final;
  double time = 0.0;
  long accepted_steps = 0;
  long rejected_steps = 0;
  double last_dt = 0.0;
  double smallest_dt = 0.0;
  /// Gradient growth ||p_x||_inf(t) / ||p_x||_inf(0) at termination.
  double gradient_growth = 0.0;
  double tail_fraction = 0.0;
  std::string detail;
};

/// Blow-up and resolution monitors on the primary field. Gradient growth is
/// checked after every accepted step and flags blowup_suspected on its own; a
/// collapse of dt below dt_min is classified by gradient growth first, then
/// by the spectral tail (under_resolved).
struct MonitorConfig {
  bool enabled = true;
  /// ||p_x||_inf growth that flags blowup_suspected.
  double gradient_growth = 100.0;
  double tail_threshold = 1e-3;
  /// Largest tolerated drift of any k = 0 coefficient.
  double mean_tolerance = 1e-10;
};

struct StepInfo {
  long step = 0;
  double dt = 0.0;
  bool output_instant = false;
};

/// Called on the initial state, after every accepted step and at every output
/// instant. Must not retain references to the state.
using Observer = std::function<void(const SimState&, const StepInfo&)>;

struct IntegrationResult {
  SimState final_state;
  TerminationReport report;
};

/// Raised for invariant violations and step-size collapse that the monitors
/// cannot attribute to blow-up or under-resolution.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

IntegrationResult integrate(const SimState& initial, const RhsFunction& rhs,
                            const IntegratorConfig& config,
                            const Observer& observer = {},
                            const MonitorConfig& monitors = {});

/// As above with the tendency of params.model; additionally checks that the
/// initial state has zero mean where the model requires it.
IntegrationResult integrate(const SimState& initial, const ModelParams& params,
                            const IntegratorConfig& config,
                            const Observer& observer = {},
                            const MonitorConfig& monitors = {});

}  // namespace angio
