#include "angio/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

namespace angio {

namespace {

// FFTW plans are created once per grid size and shared. Planning is not
// thread-safe in FFTW, so it happens under a lock; the new-array execute
// functions used below are safe to call concurrently.
struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  ~PlanPair() {
    if (r2c != nullptr) fftw_destroy_plan(r2c);
    if (c2r != nullptr) fftw_destroy_plan(c2r);
  }
};

const PlanPair& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<PlanPair>> cache;

  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;

  auto pair = std::make_unique<PlanPair>();
  std::vector<double> real(n);
  std::vector<Complex> cplx(n / 2 + 1);
  auto* c = reinterpret_cast<fftw_complex*>(cplx.data());
  // FFTW_UNALIGNED keeps the choice of codelets independent of where
  // std::vector storage happens to land, so results are bit-reproducible.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  pair->r2c = fftw_plan_dft_r2c_1d(n, real.data(), c, flags);
  pair->c2r = fftw_plan_dft_c2r_1d(n, c, real.data(), flags);
  if (pair->r2c == nullptr || pair->c2r == nullptr) {
    throw std::runtime_error("FFTW failed to create a plan for n = " +
                             std::to_string(n));
  }
  return *cache.emplace(n, std::move(pair)).first->second;
}

bool is_odd_symbol(OperatorKind kind) {
  return kind == OperatorKind::hilbert || kind == OperatorKind::deriv;
}

double sgn(int k) { return k > 0 ? 1.0 : (k < 0 ? -1.0 : 0.0); }

}  // namespace

SpectralGrid::SpectralGrid(int n_nodes) : n_nodes_(n_nodes) {
  if (n_nodes < 8 || n_nodes % 2 != 0) {
    throw std::invalid_argument(
        "grid size must be an even integer >= 8, got " +
        std::to_string(n_nodes));
  }
}

std::vector<double> SpectralGrid::nodes() const {
  std::vector<double> x(n_nodes_);
  for (int j = 0; j < n_nodes_; ++j) x[j] = node(j);
  return x;
}

std::vector<int> SpectralGrid::wavenumbers() const {
  std::vector<int> k(n_modes());
  for (int i = 0; i < n_modes(); ++i) k[i] = i;
  return k;
}

SpectralGrid build_grid(int n_nodes) { return SpectralGrid(n_nodes); }

RealField::RealField(SpectralGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(grid_.n_nodes())) {
    throw std::invalid_argument("field length does not match grid size");
  }
}

RealField::RealField(SpectralGrid grid)
    : grid_(grid), values_(grid.n_nodes(), 0.0) {}

Spectrum::Spectrum(SpectralGrid grid, std::vector<Complex> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != static_cast<std::size_t>(grid_.n_modes())) {
    throw std::invalid_argument("spectrum length does not match grid size");
  }
}

Spectrum::Spectrum(SpectralGrid grid)
    : grid_(grid), coeffs_(grid.n_modes(), Complex{}) {}

bool Spectrum::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

Spectrum forward(const RealField& field) {
  const auto values = field.values();
  if (!std::all_of(values.begin(), values.end(),
                   [](double v) { return std::isfinite(v); })) {
    throw std::invalid_argument("forward transform of a non-finite field");
  }
  const int n = field.grid().n_nodes();
  const PlanPair& plans = plans_for(n);

  std::vector<double> in(values.begin(), values.end());
  std::vector<Complex> out(n / 2 + 1);
  fftw_execute_dft_r2c(plans.r2c, in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));

  const double scale = std::sqrt(kTwoPi) / n;
  for (auto& c : out) c *= scale;
  // The transform of a real field has real DC and Nyquist terms; clear the
  // round-off so the stored layout is exactly Hermitian.
  out.front().imag(0.0);
  out.back().imag(0.0);
  return Spectrum(field.grid(), std::move(out));
}

RealField backward(const Spectrum& spec) {
  const int n = spec.grid().n_nodes();
  const PlanPair& plans = plans_for(n);

  // c2r overwrites its input.
  std::vector<Complex> in(spec.coeffs().begin(), spec.coeffs().end());
  std::vector<double> out(n);
  fftw_execute_dft_c2r(plans.c2r, reinterpret_cast<fftw_complex*>(in.data()),
                       out.data());

  const double scale = 1.0 / std::sqrt(kTwoPi);
  for (auto& v : out) v *= scale;
  return RealField(spec.grid(), std::move(out));
}

std::string_view to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::frac_lap: return "frac_lap";
    case OperatorKind::hilbert: return "hilbert";
    case OperatorKind::deriv: return "deriv";
    case OperatorKind::mass_lhs: return "mass_lhs";
    case OperatorKind::kern_K: return "kern_K";
    case OperatorKind::kern_J: return "kern_J";
  }
  return "unknown";
}

Complex symbol(OperatorKind kind, double exponent, int k,
               bool allow_any_exponent) {
  const bool uses_exponent =
      kind == OperatorKind::frac_lap || kind == OperatorKind::mass_lhs;
  if (uses_exponent && !allow_any_exponent &&
      !(exponent >= 0.0 && exponent <= 2.0)) {
    throw std::domain_error("operator exponent must lie in [0, 2], got " +
                            std::to_string(exponent));
  }

  const double ak = std::abs(static_cast<double>(k));
  const double kd = static_cast<double>(k);
  switch (kind) {
    case OperatorKind::kern_K: return {1.0 / (0.25 + kd * kd), 0.0};
    case OperatorKind::kern_J: return {1.0 / (1.0 + 0.25 * kd * kd), 0.0};
    default: break;
  }
  if (k == 0) return {};

  switch (kind) {
    case OperatorKind::frac_lap: return {std::pow(ak, exponent), 0.0};
    case OperatorKind::hilbert: return {0.0, -sgn(k)};
    case OperatorKind::deriv: return {0.0, kd};
    case OperatorKind::mass_lhs:
      return {1.0 + 0.25 * std::pow(ak, 2.0 * (exponent - 1.0)), 0.0};
    default: break;
  }
  throw std::logic_error("unhandled operator kind");
}

Spectrum apply_symbol(const Spectrum& spec, OperatorKind kind,
                      double exponent, bool allow_any_exponent) {
  Spectrum out(spec.grid());
  const int n_modes = spec.grid().n_modes();
  for (int k = 0; k < n_modes; ++k) {
    out[k] = symbol(kind, exponent, k, allow_any_exponent) * spec[k];
  }
  if (is_odd_symbol(kind)) out[spec.grid().nyquist()] = Complex{};
  return out;
}

void truncate_to_dealiased_band(Spectrum& spec) {
  const int cutoff = spec.grid().dealias_cutoff();
  auto c = spec.coeffs();
  std::fill(c.begin() + cutoff + 1, c.end(), Complex{});
}

Spectrum product(const Spectrum& a, const Spectrum& b, bool dealias) {
  if (!(a.grid() == b.grid())) {
    throw std::invalid_argument("product of spectra on different grids");
  }
  RealField fa = [&] {
    if (!dealias) return backward(a);
    Spectrum t = a;
    truncate_to_dealiased_band(t);
    return backward(t);
  }();
  if (&a == &b) {
    for (double& v : fa.values()) v *= v;
  } else {
    Spectrum t = b;
    if (dealias) truncate_to_dealiased_band(t);
    const RealField fb = backward(t);
    auto va = fa.values();
    auto vb = fb.values();
    for (std::size_t j = 0; j < va.size(); ++j) va[j] *= vb[j];
  }
  Spectrum out = forward(fa);
  if (dealias) truncate_to_dealiased_band(out);
  return out;
}

Spectrum quadratic(const Spectrum& spec, bool dealias) {
  return product(spec, spec, dealias);
}

}  // namespace angio
