#include "angio/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace angio {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_reduced(const SimState& state) {
  if (state.fields.size() != 1) {
    throw std::invalid_argument("reduced model expects a single field");
  }
}

// (p^2)_hat, or zeros when the nonlinearity is switched off.
Spectrum nonlinear_input(const Spectrum& p, const ModelParams& params) {
  if (!params.nonlinear) return Spectrum(p.grid());
  return quadratic(p, params.dealias);
}

// Shared loop over k = 1..N/2-1. The constant mode never evolves and the
// Nyquist mode is held at zero (odd symbols are undefined there).
template <typename ModeFn>
Spectrum assemble(const Spectrum& p, const Spectrum& p2, ModeFn&& mode) {
  Spectrum out(p.grid());
  const int nyquist = p.grid().nyquist();
  for (int k = 1; k < nyquist; ++k) {
    out[k] = mode(static_cast<double>(k), p[k], p2[k]);
  }
  return out;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::general: return "general";
    case ModelKind::alpha0: return "alpha0";
    case ModelKind::alpha1: return "alpha1";
    case ModelKind::alpha2: return "alpha2";
    case ModelKind::full_system: return "full_system";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (auto kind : {ModelKind::general, ModelKind::alpha0, ModelKind::alpha1,
                    ModelKind::alpha2, ModelKind::full_system}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown model '" + std::string(name) +
                              "' (expected general, alpha0, alpha1, alpha2 "
                              "or full_system)");
}

double ModelParams::effective_alpha() const {
  switch (model) {
    case ModelKind::alpha0: return 0.0;
    case ModelKind::alpha1: return 1.0;
    case ModelKind::alpha2: return 2.0;
    default: return alpha;
  }
}

void ModelParams::validate() const {
  if (!std::isfinite(alpha) ||
      (!allow_any_alpha && !(alpha >= 0.0 && alpha <= 2.0))) {
    throw std::invalid_argument("alpha must lie in [0, 2], got " +
                                std::to_string(alpha));
  }
  if (!(beta > -1.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("beta must satisfy beta > -1, got " +
                                std::to_string(beta));
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be positive, got " +
                                std::to_string(epsilon));
  }
  if (!std::isfinite(chi)) {
    throw std::invalid_argument("chi must be finite");
  }
}

SimState SimState::reduced(double time, Spectrum p) {
  SimState s;
  s.time = time;
  s.fields.push_back(std::move(p));
  return s;
}

SimState SimState::full(double time, Spectrum u_minus_one, Spectrum q) {
  if (!(u_minus_one.grid() == q.grid())) {
    throw std::invalid_argument("u and q live on different grids");
  }
  SimState s;
  s.time = time;
  s.fields.push_back(std::move(u_minus_one));
  s.fields.push_back(std::move(q));
  return s;
}

Complex general_mode_tendency(int k, double alpha, Complex p_hat,
                              Complex p2_hat, const ModelParams& params) {
  if (k == 0) return {};
  const double eps = params.epsilon;
  const double beta = params.beta;
  const double kd = static_cast<double>(k);
  const double ak = std::abs(kd);
  const double sgn = kd > 0 ? 1.0 : -1.0;
  const double frac = std::pow(ak, alpha);

  const Complex rhs = -((beta + 1.0) / (2.0 * eps)) * frac * p_hat +
                      kI * (sgn * std::pow(ak, 2.0 * alpha - 1.0) /
                            (4.0 * eps)) * p_hat -
                      (beta / eps) * kI * kd * p_hat +
                      0.5 * kI * kd * p2_hat + 0.25 * frac * p2_hat;
  const double mass = 1.0 + 0.25 * std::pow(ak, 2.0 * (alpha - 1.0));
  return rhs / mass;
}

Spectrum rhs_general(const SimState& state, const ModelParams& params) {
  require_reduced(state);
  const double alpha = params.alpha;
  if (!(alpha > 0.0)) {
    throw std::invalid_argument(
        "the general model requires alpha > 0; use model 'alpha0' for "
        "alpha = 0");
  }
  const Spectrum& p = state.fields.front();
  const Spectrum p2 = nonlinear_input(p, params);
  return assemble(p, p2, [&](double k, Complex ph, Complex p2h) {
    return general_mode_tendency(static_cast<int>(k), alpha, ph, p2h, params);
  });
}

Spectrum rhs_alpha0(const SimState& state, const ModelParams& params) {
  require_reduced(state);
  const double eps = params.epsilon;
  const double beta = params.beta;
  const Spectrum& p = state.fields.front();
  const Spectrum p2 = nonlinear_input(p, params);
  return assemble(p, p2, [&](double k, Complex ph, Complex p2h) {
    const double k2 = k * k;
    const double k3 = k2 * k;
    const Complex num = -((beta + 1.0) / (2.0 * eps)) * k2 * ph +
                        kI * (k / (4.0 * eps)) * ph +
                        kI * (0.5 * k3) * p2h + 0.25 * k2 * p2h -
                        kI * ((beta / eps) * k3) * ph;
    return num / (0.25 + k2);
  });
}

Spectrum rhs_alpha1(const SimState& state, const ModelParams& params) {
  require_reduced(state);
  const double eps = params.epsilon;
  const double beta = params.beta;
  const Spectrum& p = state.fields.front();
  const Spectrum p2 = nonlinear_input(p, params);
  return assemble(p, p2, [&](double k, Complex ph, Complex p2h) {
    const Complex num = -((beta + 1.0) / (2.0 * eps)) * k * ph +
                        kI * ((0.25 - beta) / eps * k) * ph +
                        kI * (0.5 * k) * p2h + 0.25 * k * p2h;
    return 0.8 * num;
  });
}

Spectrum rhs_alpha2(const SimState& state, const ModelParams& params) {
  require_reduced(state);
  const double eps = params.epsilon;
  const double beta = params.beta;
  const Spectrum& p = state.fields.front();
  const Spectrum p2 = nonlinear_input(p, params);
  return assemble(p, p2, [&](double k, Complex ph, Complex p2h) {
    const double k2 = k * k;
    const Complex num = -((1.0 + beta) / (2.0 * eps)) * k2 * ph +
                        kI * (k2 * k / (4.0 * eps)) * ph +
                        kI * (0.5 * k) * p2h + 0.25 * k2 * p2h -
                        kI * ((beta / eps) * k) * ph;
    return num / (1.0 + 0.25 * k2);
  });
}

FullSystemTendency rhs_full_system(const SimState& state,
                                   const ModelParams& params) {
  if (!state.is_full_system()) {
    throw std::invalid_argument("full system expects fields (u - 1, q)");
  }
  const Spectrum& v = state.fields[0];
  const Spectrum& q = state.fields[1];
  const double alpha = params.alpha;
  const double chi = params.chi;

  // u q = q + (u - 1) q; the background contributes chi dq/dx exactly.
  Spectrum flux = q;
  if (params.nonlinear) {
    const Spectrum vq = product(v, q, params.dealias);
    for (std::size_t k = 0; k < flux.size(); ++k) flux[k] += vq[k];
  }

  FullSystemTendency out{Spectrum(v.grid()), Spectrum(v.grid())};
  const int nyquist = v.grid().nyquist();
  for (int k = 1; k < nyquist; ++k) {
    const double kd = k;
    out.u[k] = -std::pow(kd, alpha) * v[k] + chi * kI * kd * flux[k];
    out.q[k] = kI * kd * v[k];
  }
  return out;
}

Tendency evaluate_rhs(const SimState& state, const ModelParams& params) {
  switch (params.model) {
    case ModelKind::general: return {rhs_general(state, params)};
    case ModelKind::alpha0: return {rhs_alpha0(state, params)};
    case ModelKind::alpha1: return {rhs_alpha1(state, params)};
    case ModelKind::alpha2: return {rhs_alpha2(state, params)};
    case ModelKind::full_system: {
      auto t = rhs_full_system(state, params);
      return {std::move(t.u), std::move(t.q)};
    }
  }
  throw std::logic_error("unhandled model kind");
}

RhsFunction make_rhs(const ModelParams& params) {
  params.validate();
  if (params.model == ModelKind::general && !(params.alpha > 0.0)) {
    throw std::invalid_argument(
        "the general model requires alpha > 0; use model 'alpha0' for "
        "alpha = 0");
  }
  return [params](const SimState& s) { return evaluate_rhs(s, params); };
}

Complex linear_dispersion(int k, const ModelParams& params) {
  if (k == 0) {
    throw std::invalid_argument("linear dispersion is undefined at k = 0");
  }
  if (params.model == ModelKind::full_system) {
    throw std::invalid_argument(
        "the full system has two dispersion branches; no scalar rate");
  }
  return general_mode_tendency(k, params.effective_alpha(), Complex{1.0, 0.0},
                               Complex{}, params);
}

}  // namespace angio
