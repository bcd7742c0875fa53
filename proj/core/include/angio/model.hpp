#pragma once

// Tendencies of the nonlocal dispersive Burgers family
//
//   (1 + 1/4 (-Delta)^{alpha-1}) dp/dt
//       = -(beta+1)/(2 eps) (-Delta)^{alpha/2} p - 1/(4 eps) (-Delta)^{alpha-1/2} H p
//         + d/dx(p^2/2) + (-Delta)^{alpha/2}(p^2/4) - beta/eps dp/dx,
//
// its closed forms at alpha = 0 (K-kernel), 1 (mass factor 5/4) and
// 2 (J-kernel), and the parent chemotaxis system
//
//   du/dt = -(-Delta)^{alpha/2} u + chi d/dx(u q),   dq/dt = du/dx.

#include <complex>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "angio/spectral.hpp"

namespace angio {

enum class ModelKind { general, alpha0, alpha1, alpha2, full_system };

std::string_view to_string(ModelKind kind);
/// Throws std::invalid_argument for unknown names.
ModelKind parse_model_kind(std::string_view name);

struct ModelParams {
  double alpha = 1.0;
  double beta = 2.0;
  double epsilon = 1.0;
  /// Chemotactic sensitivity; only read by the full system.
  double chi = 5.0;
  ModelKind model = ModelKind::general;
  bool dealias = true;
  /// Test hook: drop every quadratic term.
  bool nonlinear = true;
  /// Accept alpha outside [0, 2].
  bool allow_any_alpha = false;

  /// Nonlocality order actually used by the selected model.
  double effective_alpha() const;
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Evolution state. Reduced models carry one field, p. The full system
/// carries two: u - 1 (mean allowed) and q (zero mean).
struct SimState {
  double time = 0.0;
  std::vector<Spectrum> fields;

  static SimState reduced(double time, Spectrum p);
  static SimState full(double time, Spectrum u_minus_one, Spectrum q);

  bool is_full_system() const { return fields.size() == 2; }
  const SpectralGrid& grid() const { return fields.front().grid(); }
  /// Reduced p, or q for the full system.
  const Spectrum& primary() const { return fields.back(); }
};

using Tendency = std::vector<Spectrum>;
using RhsFunction = std::function<Tendency(const SimState&)>;

Spectrum rhs_general(const SimState& state, const ModelParams& params);
Spectrum rhs_alpha0(const SimState& state, const ModelParams& params);
Spectrum rhs_alpha1(const SimState& state, const ModelParams& params);
Spectrum rhs_alpha2(const SimState& state, const ModelParams& params);

struct FullSystemTendency {
  Spectrum u;
  Spectrum q;
};
FullSystemTendency rhs_full_system(const SimState& state,
                                   const ModelParams& params);

/// Dispatches on params.model.
Tendency evaluate_rhs(const SimState& state, const ModelParams& params);
RhsFunction make_rhs(const ModelParams& params);

/// Linear growth rate of e^{ikx} about p = 0, from the general symbol
/// expression. Valid for every reduced model (the closed forms are special
/// cases); k = 0 and the full system are rejected.
Complex linear_dispersion(int k, const ModelParams& params);

/// General-alpha tendency of one mode given p_hat(k) and (p^2)_hat(k). No
/// restriction on alpha, which lets the alpha = 0 closed form be checked
/// against the general expression mode by mode.
Complex general_mode_tendency(int k, double alpha, Complex p_hat,
                              Complex p2_hat, const ModelParams& params);

}  // namespace angio
