#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "angio/diagnostics.hpp"
#include "test_support.hpp"

using namespace angio;
using angio::test::random_spectrum;
using angio::test::sample;
using angio::test::sine_mode;

namespace {

ModelParams kind(ModelKind m, double alpha = 1.0) {
  ModelParams p;
  p.model = m;
  p.alpha = alpha;
  return p;
}

}  // namespace

TEST(Norms, SingleSine) {
  const SpectralGrid g(64);
  const Spectrum s = sine_mode(g, 4);
  const double sp = std::sqrt(kPi);
  EXPECT_NEAR(sobolev_norm(s, 0.0), sp, 1e-14);
  EXPECT_NEAR(sobolev_norm(s, 1.0), 4 * sp, 1e-13);
  EXPECT_NEAR(sobolev_norm(s, 2.0), 16 * sp, 1e-13);
  EXPECT_NEAR(wiener_norm(s, 0.0), 2 * std::sqrt(kPi / 2), 1e-14);
  EXPECT_NEAR(wiener_norm(s, 1.0), 8 * std::sqrt(kPi / 2), 1e-13);
}

TEST(Norms, MeanIsExcluded) {
  const SpectralGrid g(16);
  Spectrum s(g);
  s[0] = 3.0;
  EXPECT_EQ(sobolev_norm(s, 0.0), 0.0);
  EXPECT_EQ(wiener_norm(s, 0.0), 0.0);
}

TEST(Norms, NyquistCountedOnce) {
  const SpectralGrid g(16);
  Spectrum s(g);
  s[8] = 1.0;
  EXPECT_DOUBLE_EQ(sobolev_norm(s, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(wiener_norm(s, 1.0), 8.0);
}

TEST(Norms, SingleModeScalingProperty) {
  const SpectralGrid g(128);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> s(0.0, 3.0);
  for (int k = 1; k < 64; ++k) {
    Spectrum m(g);
    m[k] = Complex(0.3, -0.7);
    const double e = s(rng);
    EXPECT_NEAR(sobolev_norm(m, e), std::pow(k, e) * sobolev_norm(m, 0.0),
                1e-13 * std::pow(k, e));
    EXPECT_NEAR(wiener_norm(m, e), std::pow(k, e) * wiener_norm(m, 0.0),
                1e-13 * std::pow(k, e));
  }
}

TEST(Norms, WienerInterpolationProperty) {
  std::mt19937_64 rng(10);
  const SpectralGrid g(64);
  for (int trial = 0; trial < 200; ++trial) {
    const Spectrum s = random_spectrum(g, 1 + trial % 31, rng);
    const double a1 = wiener_norm(s, 1.0);
    EXPECT_LE(a1 * a1, wiener_norm(s, 0.0) * wiener_norm(s, 2.0) * (1 + 1e-12));
  }
}

TEST(SupNorms, SampledProfiles) {
  const SpectralGrid g(256);
  const auto a = sup_norms(sine_mode(g, 4, 2.0));
  EXPECT_NEAR(a.linf_p, 2.0, 1e-12);
  EXPECT_NEAR(a.linf_dxp, 8.0, 1e-12);
  const auto b = sup_norms(
      sample(g, [](double x) { return -4.0 * std::sin(10 * x); }));
  EXPECT_NEAR(b.linf_p, 4.0, 1e-12);
  EXPECT_NEAR(b.linf_dxp, 40.0, 1e-11);
}

TEST(Energies, SingleSine) {
  const SpectralGrid g(64);
  const Spectrum s = sine_mode(g, 4);
  EXPECT_NEAR(energy_functionals(s, kind(ModelKind::alpha0, 0.0)).E,
              260 * kPi, 1e-10);
  EXPECT_NEAR(energy_functionals(s, kind(ModelKind::alpha2, 2.0)).F,
              5 * kPi, 1e-12);
  // alpha2 E: ||p_x||^2 + 1/4 ||p_xx||^2 = 16 pi + 64 pi
  EXPECT_NEAR(energy_functionals(s, kind(ModelKind::alpha2, 2.0)).E,
              80 * kPi, 1e-11);
  // G at alpha = 1: (1 + 4^4)(1 + 1/4) pi
  const Energies e1 = energy_functionals(s, kind(ModelKind::alpha1, 1.0));
  EXPECT_NEAR(e1.G, 257 * 1.25 * kPi, 1e-10);
  EXPECT_EQ(e1.E, e1.G);
}

TEST(Energies, ZeroField) {
  const SpectralGrid g(16);
  const Energies e = energy_functionals(Spectrum(g), kind(ModelKind::alpha0, 0));
  EXPECT_EQ(e.E, 0.0);
  EXPECT_EQ(e.F, 0.0);
  EXPECT_EQ(e.G, 0.0);
}

TEST(Energies, LinearDissipationBudgetAtAlphaTwo) {
  // With the quadratic terms removed, dF/dt = -(beta + 1)/eps ||p_x||^2.
  std::mt19937_64 rng(13);
  const SpectralGrid g(64);
  ModelParams p = kind(ModelKind::alpha2, 2.0);
  p.nonlinear = false;
  p.beta = 1.3;
  p.epsilon = 0.7;
  for (int trial = 0; trial < 20; ++trial) {
    const Spectrum s = random_spectrum(g, 21, rng);
    const Spectrum t = evaluate_rhs(SimState::reduced(0.0, s), p).front();
    double dF = 0.0;
    for (int k = 1; k < g.nyquist(); ++k) {
      dF += 2.0 * 2.0 * (1.0 + 0.25 * k * k) *
            (std::conj(s[k]) * t[k]).real();
    }
    const double h1 = sobolev_norm(s, 1.0);
    EXPECT_NEAR(dF, -(p.beta + 1) / p.epsilon * h1 * h1, 1e-10 * h1 * h1);
  }
}

TEST(Tail, Extremes) {
  const SpectralGrid g(96);
  EXPECT_EQ(tail_fraction(sine_mode(g, 3)), 0.0);
  EXPECT_DOUBLE_EQ(tail_fraction(sine_mode(g, g.dealias_cutoff())), 1.0);
  EXPECT_EQ(tail_fraction(Spectrum(g)), 0.0);
  Spectrum two = sine_mode(g, 1);
  two[20] = two[1];
  // 400 / (1 + 400)
  EXPECT_NEAR(tail_fraction(two), 400.0 / 401.0, 1e-15);
}

TEST(Record, CsvSchema) {
  EXPECT_EQ(diagnostics_csv_header(),
            "t,linf_p,linf_dxp,h0,h1,h2,a0,a1,energy_E,energy_F,energy_G,"
            "tail_fraction,dt");
  const SpectralGrid g(32);
  const DiagnosticsRecord r =
      compute_diagnostics(sine_mode(g, 2), kind(ModelKind::alpha1), 0.25, 1e-3);
  EXPECT_TRUE(r.all_finite());
  EXPECT_EQ(r.time, 0.25);
  EXPECT_EQ(r.dt, 1e-3);
  const std::string row = to_csv_row(r);
  std::stringstream ss(row);
  std::string cell;
  int n = 0;
  while (std::getline(ss, cell, ',')) {
    ++n;
    EXPECT_TRUE(std::isfinite(std::stod(cell)));
  }
  EXPECT_EQ(n, 13);
  EXPECT_EQ(std::stod(row.substr(row.find(',') + 1)), r.linf_p);
}
