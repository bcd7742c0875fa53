#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "angio/spectral.hpp"

namespace angio::test {

inline RealField sample(const SpectralGrid& grid, auto&& f) {
  std::vector<double> v(grid.n_nodes());
  for (int j = 0; j < grid.n_nodes(); ++j) v[j] = f(grid.node(j));
  return RealField(grid, std::move(v));
}

inline Spectrum sine_mode(const SpectralGrid& grid, int k, double amp = 1.0) {
  Spectrum s(grid);
  s[k] = Complex(0.0, -amp * std::sqrt(kPi / 2.0));
  return s;
}

/// Direct O(N^2) sum sqrt(2 pi)/N sum_j p_j e^{-i k x_j}.
inline std::vector<Complex> naive_dft(const RealField& f) {
  const auto& g = f.grid();
  std::vector<Complex> out(g.n_modes());
  for (int k = 0; k < g.n_modes(); ++k) {
    Complex acc{};
    for (int j = 0; j < g.n_nodes(); ++j) {
      acc += f[j] * std::polar(1.0, -k * g.node(j));
    }
    out[k] = acc * std::sqrt(kTwoPi) / static_cast<double>(g.n_nodes());
  }
  return out;
}

/// Random real field with modes 1..k_max and zero mean.
inline Spectrum random_spectrum(const SpectralGrid& g, int k_max,
                                std::mt19937_64& rng, double amp = 1.0) {
  std::normal_distribution<double> n(0.0, 1.0);
  Spectrum s(g);
  for (int k = 1; k <= k_max && k < g.nyquist(); ++k) {
    s[k] = amp * Complex(n(rng), n(rng)) / (1.0 + k);
  }
  return s;
}

inline double max_abs_diff(const Spectrum& a, const Spectrum& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    m = std::max(m, std::abs(a[k] - b[k]));
  }
  return m;
}

inline double max_abs(const Spectrum& a) {
  double m = 0.0;
  for (const auto& c : a.coeffs()) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace angio::test
