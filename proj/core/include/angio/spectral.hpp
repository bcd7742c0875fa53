#pragma once

// Periodic pseudo-spectral layer on the torus [0, 2*pi).
//
// Fourier coefficients use the unitary convention
//
//   p_hat(k) = 1/sqrt(2*pi) * integral_0^{2*pi} p(x) exp(-i k x) dx,
//
// approximated on N uniform nodes by sqrt(2*pi)/N * sum_j p(x_j) exp(-i k x_j).
// Only k = 0..N/2 are stored; negative wavenumbers follow from Hermitian
// symmetry of real fields.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace angio {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Uniform periodic grid with an even number of nodes (at least 8).
class SpectralGrid {
 public:
  explicit SpectralGrid(int n_nodes);

  int n_nodes() const { return n_nodes_; }
  /// Number of stored (non-negative) wavenumbers, N/2 + 1.
  int n_modes() const { return n_nodes_ / 2 + 1; }
  int nyquist() const { return n_nodes_ / 2; }
  /// Largest |k| kept by the 2/3 dealiasing rule.
  int dealias_cutoff() const { return n_nodes_ / 3; }
  double spacing() const { return kTwoPi / n_nodes_; }
  double node(int j) const { return spacing() * j; }
  std::vector<double> nodes() const;
  std::vector<int> wavenumbers() const;

  friend bool operator==(const SpectralGrid&, const SpectralGrid&) = default;

 private:
  int n_nodes_;
};

SpectralGrid build_grid(int n_nodes);

/// Real samples at the grid nodes.
class RealField {
 public:
  RealField(SpectralGrid grid, std::vector<double> values);
  /// Zero field.
  explicit RealField(SpectralGrid grid);

  const SpectralGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }

 private:
  SpectralGrid grid_;
  std::vector<double> values_;
};

/// Non-negative half of the Fourier coefficients of a real field.
class Spectrum {
 public:
  Spectrum(SpectralGrid grid, std::vector<Complex> coeffs);
  /// All coefficients zero.
  explicit Spectrum(SpectralGrid grid);

  const SpectralGrid& grid() const { return grid_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  std::span<Complex> coeffs() { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  const Complex& operator[](std::size_t k) const { return coeffs_[k]; }
  Complex& operator[](std::size_t k) { return coeffs_[k]; }

  bool all_finite() const;

 private:
  SpectralGrid grid_;
  std::vector<Complex> coeffs_;
};

RealField backward(const Spectrum& spec);
Spectrum forward(const RealField& field);

enum class OperatorKind {
  frac_lap,  ///< (-Delta)^{s/2}: |k|^s
  hilbert,   ///< H: -i sgn(k)
  deriv,     ///< d/dx: i k
  mass_lhs,  ///< 1 + 1/4 (-Delta)^{alpha-1}
  kern_K,    ///< 1 / (1/4 + k^2)
  kern_J,    ///< 1 / (1 + k^2/4)
};

std::string_view to_string(OperatorKind kind);

/// Fourier symbol of `kind` at signed wavenumber k. The exponent argument is
/// s for frac_lap and alpha for mass_lhs; it is ignored otherwise.
///
/// At k = 0 every symbol is 0 except kern_K (4) and kern_J (1): evolved
/// fields have zero mean, so the constant mode carries no dynamics.
/// Exponents outside [0, 2] throw std::domain_error unless
/// allow_any_exponent is set.
Complex symbol(OperatorKind kind, double exponent, int k,
               bool allow_any_exponent = false);

/// Multiplies each stored coefficient by symbol(kind, exponent, k). The
/// Nyquist coefficient is cleared after odd-symbol operators.
Spectrum apply_symbol(const Spectrum& spec, OperatorKind kind,
                      double exponent = 0.0, bool allow_any_exponent = false);

/// Zeroes every coefficient with k > grid.dealias_cutoff().
void truncate_to_dealiased_band(Spectrum& spec);

/// Spectrum of a*b from a collocation product. With `dealias`, both factors
/// and the result are restricted to |k| <= N/3. The k = 0 coefficient of the
/// product is kept.
Spectrum product(const Spectrum& a, const Spectrum& b, bool dealias);

/// Spectrum of p^2 (see product()).
Spectrum quadratic(const Spectrum& spec, bool dealias);

}  // namespace angio
