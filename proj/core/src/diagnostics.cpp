#include "angio/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace angio {

namespace {

// Hermitian doubling: stored k in 1..N/2-1 stand for +-k; Nyquist is its own
// mirror.
double multiplicity(int k, int nyquist) { return k == nyquist ? 1.0 : 2.0; }

}  // namespace

bool DiagnosticsRecord::all_finite() const {
  const std::array values{time, linf_p,   linf_dxp, h0,       h1,
                          h2,   h2_5,     a0,       a1,       a2,
                          energy_E, energy_F, energy_G, tail_fraction, dt};
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

double sobolev_norm(const Spectrum& spec, double s) {
  const int nyq = spec.grid().nyquist();
  double sum = 0.0;
  for (int k = 1; k <= nyq; ++k) {
    sum += multiplicity(k, nyq) * std::pow(static_cast<double>(k), 2.0 * s) *
           std::norm(spec[k]);
  }
  return std::sqrt(sum);
}

double wiener_norm(const Spectrum& spec, double s) {
  const int nyq = spec.grid().nyquist();
  double sum = 0.0;
  for (int k = 1; k <= nyq; ++k) {
    sum += multiplicity(k, nyq) * std::pow(static_cast<double>(k), s) *
           std::abs(spec[k]);
  }
  return sum;
}

SupNorms sup_norms(const Spectrum& spec) {
  const RealField p = backward(spec);
  const RealField dp = backward(apply_symbol(spec, OperatorKind::deriv));
  SupNorms out;
  for (double v : p.values()) out.linf_p = std::max(out.linf_p, std::abs(v));
  for (double v : dp.values()) {
    out.linf_dxp = std::max(out.linf_dxp, std::abs(v));
  }
  return out;
}

SupNorms sup_norms(const RealField& field) {
  return sup_norms(forward(field));
}

Energies energy_functionals(const Spectrum& spec, const ModelParams& params) {
  const int nyq = spec.grid().nyquist();
  const double alpha = params.effective_alpha();
  double l2 = 0.0, h1 = 0.0, h2 = 0.0, g = 0.0;
  for (int k = 1; k <= nyq; ++k) {
    const double kd = k;
    const double w = multiplicity(k, nyq) * std::norm(spec[k]);
    const double k2 = kd * kd;
    l2 += w;
    h1 += k2 * w;
    h2 += k2 * k2 * w;
    g += (1.0 + k2 * k2) * (1.0 + 0.25 * std::pow(kd, 2.0 * (alpha - 1.0))) *
         w;
  }
  Energies e;
  e.F = l2 + 0.25 * h1;
  e.G = g;
  switch (params.model) {
    case ModelKind::alpha0: e.E = h2 + 0.25 * h1; break;
    case ModelKind::alpha2: e.E = h1 + 0.25 * h2; break;
    default: e.E = g; break;
  }
  return e;
}

double tail_fraction(const Spectrum& spec) {
  const int nyq = spec.grid().nyquist();
  // Upper half of the dealiased band: |k| > (2/3)(N/2)(1/2) = N/6.
  const double threshold = spec.grid().n_nodes() / 6.0;
  double total = 0.0, tail = 0.0;
  for (int k = 1; k <= nyq; ++k) {
    const double kd = k;
    const double w = multiplicity(k, nyq) * kd * kd * std::norm(spec[k]);
    total += w;
    if (kd > threshold) tail += w;
  }
  return total > 0.0 ? tail / total : 0.0;
}

DiagnosticsRecord compute_diagnostics(const Spectrum& spec,
                                      const ModelParams& params, double time,
                                      double dt) {
  DiagnosticsRecord r;
  r.time = time;
  r.dt = dt;
  const SupNorms sup = sup_norms(spec);
  r.linf_p = sup.linf_p;
  r.linf_dxp = sup.linf_dxp;
  r.h0 = sobolev_norm(spec, 0.0);
  r.h1 = sobolev_norm(spec, 1.0);
  r.h2 = sobolev_norm(spec, 2.0);
  r.h2_5 = sobolev_norm(spec, 2.5);
  r.a0 = wiener_norm(spec, 0.0);
  r.a1 = wiener_norm(spec, 1.0);
  r.a2 = wiener_norm(spec, 2.0);
  const Energies e = energy_functionals(spec, params);
  r.energy_E = e.E;
  r.energy_F = e.F;
  r.energy_G = e.G;
  r.tail_fraction = tail_fraction(spec);
  return r;
}

std::string diagnostics_csv_header() {
  return "t,linf_p,linf_dxp,h0,h1,h2,a0,a1,energy_E,energy_F,energy_G,"
         "tail_fraction,dt";
}

std::string to_csv_row(const DiagnosticsRecord& r) {
  const std::array values{r.time,     r.linf_p,   r.linf_dxp,     r.h0,
                          r.h1,       r.h2,       r.a0,           r.a1,
                          r.energy_E, r.energy_F, r.energy_G,
                          r.tail_fraction, r.dt};
  std::string row;
  char buf[32];
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) row.push_back(',');
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    row += buf;
  }
  return row;
}

}  // namespace angio
