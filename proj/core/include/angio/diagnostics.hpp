#pragma once

#include <string>
#include <utility>

#include "angio/model.hpp"
#include "angio/spectral.hpp"

namespace angio {

/// One sample of every monitored quantity. All norms are homogeneous
/// (the k = 0 mode is excluded).
struct DiagnosticsRecord {
  double time = 0.0;
  double linf_p = 0.0;
  double linf_dxp = 0.0;
  double h0 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double h2_5 = 0.0;
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double energy_E = 0.0;
  double energy_F = 0.0;
  double energy_G = 0.0;
  double tail_fraction = 0.0;
  double dt = 0.0;

  bool all_finite() const;
};

/// (sum_{k != 0} |k|^{2s} |p_hat(k)|^2)^{1/2}, both signs of k counted.
double sobolev_norm(const Spectrum& spec, double s);

/// sum_{k != 0} |k|^s |p_hat(k)|, both signs of k counted.
double wiener_norm(const Spectrum& spec, double s);

struct SupNorms {
  double linf_p = 0.0;
  double linf_dxp = 0.0;
};

/// Max of |p| and of the spectral derivative |dp/dx| over the nodes.
SupNorms sup_norms(const RealField& field);
SupNorms sup_norms(const Spectrum& spec);

struct Energies {
  double E = 0.0;
  double F = 0.0;
  double G = 0.0;
};

/// E: ||p_xx||^2 + 1/4 ||p_x||^2 for alpha0, ||p_x||^2 + 1/4 ||p_xx||^2 for
///    alpha2, and equal to G for every other model.
/// F: ||p||^2 + 1/4 ||p_x||^2.
/// G: sum (1 + |k|^4)(1 + 1/4 |k|^{2(alpha-1)}) |p_hat|^2, the general-alpha
///    functional (L2 plus H2 of p and of (-Delta)^{(alpha-1)/2} p).
Energies energy_functionals(const Spectrum& spec, const ModelParams& params);

/// Share of sum |k|^2 |p_hat|^2 carried by |k| > N/6, the upper half of the
/// dealiased band. Zero for the zero field.
double tail_fraction(const Spectrum& spec);

/// Everything above for one state; `dt` is recorded verbatim.
DiagnosticsRecord compute_diagnostics(const Spectrum& spec,
                                      const ModelParams& params, double time,
                                      double dt);

/// Column names of the timeseries CSV, comma-separated, no newline.
std::string diagnostics_csv_header();
/// One CSV row (no newline), full precision.
std::string to_csv_row(const DiagnosticsRecord& rec);

}  // namespace angio
