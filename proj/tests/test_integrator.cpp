#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "angio/integrator.hpp"
#include "test_support.hpp"

using namespace angio;
using angio::test::max_abs;
using angio::test::random_spectrum;
using angio::test::sine_mode;

namespace {

ModelParams linear_alpha1() {
  ModelParams p;
  p.alpha = 1.0;
  p.nonlinear = false;
  return p;
}

MonitorConfig monitors_off() {
  MonitorConfig m;
  m.enabled = false;
  return m;
}

}  // namespace

TEST(Step, LocalErrorIsFifthOrder) {
  const SpectralGrid g(16);
  const ModelParams p = linear_alpha1();
  const SimState s = SimState::reduced(0.0, sine_mode(g, 4));
  const RhsFunction rhs = make_rhs(p);
  const Complex lambda = linear_dispersion(4, p);
  IntegratorConfig cfg;
  cfg.rtol = cfg.atol = 1.0;  // accept everything
  double prev = 0.0;
  for (double dt : {0.04, 0.02, 0.01}) {
    const StepOutcome out = rk45_step(s, dt, rhs, cfg);
    const Complex exact = std::exp(lambda * dt) * s.primary()[4];
    const double err = std::abs(out.new_state.primary()[4] - exact) /
                       std::abs(exact);
    if (prev > 0.0) {
      EXPECT_GE(prev / err, 32.0) << dt;
    }
    prev = err;
  }
}

TEST(Step, ZeroTendencyIsIdentity) {
  const SpectralGrid g(16);
  const SimState s = SimState::reduced(0.5, sine_mode(g, 3));
  const RhsFunction zero = [](const SimState& y) {
    return Tendency{Spectrum(y.grid())};
  };
  const StepOutcome out = rk45_step(s, 0.1, zero, IntegratorConfig{});
  EXPECT_TRUE(out.accepted);
  EXPECT_EQ(out.error_estimate, 0.0);
  EXPECT_DOUBLE_EQ(out.new_state.time, 0.6);
  for (int k = 0; k < g.n_modes(); ++k) {
    EXPECT_EQ(out.new_state.primary()[k], s.primary()[k]);
  }
}

TEST(Step, OversizedStepIsRejected) {
  const SpectralGrid g(64);
  ModelParams p;
  p.alpha = 2.0;
  p.model = ModelKind::alpha2;
  const SimState s = SimState::reduced(0.0, sine_mode(g, 20));
  IntegratorConfig cfg;
  cfg.dt_max = 1.0;
  const StepOutcome out = rk45_step(s, 0.5, make_rhs(p), cfg);
  EXPECT_FALSE(out.accepted);
  EXPECT_GT(out.error_estimate, 1.0);
  EXPECT_LT(out.dt_next, 0.5);
}

TEST(Step, NonFiniteStageHalvesStep) {
  const SpectralGrid g(16);
  const RhsFunction bad = [](const SimState& y) {
    Spectrum t(y.grid());
    t[1] = std::numeric_limits<double>::quiet_NaN();
    return Tendency{t};
  };
  const StepOutcome out =
      rk45_step(SimState::reduced(0.0, sine_mode(g, 1)), 0.01, bad, {});
  EXPECT_FALSE(out.accepted);
  EXPECT_FALSE(out.finite);
  EXPECT_DOUBLE_EQ(out.dt_next, 0.005);
}

TEST(Step, NextStepStaysInBoundsProperty) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> logdt(-8.0, 0.0);
  const SpectralGrid g(32);
  ModelParams p;
  p.alpha = 1.5;
  const RhsFunction rhs = make_rhs(p);
  IntegratorConfig cfg;
  cfg.dt_min = 1e-6;
  cfg.dt_max = 0.05;
  for (int trial = 0; trial < 60; ++trial) {
    const SimState s = SimState::reduced(0.0, random_spectrum(g, 10, rng));
    const double dt = std::pow(10.0, logdt(rng));
    const StepOutcome out = rk45_step(s, dt, rhs, cfg);
    EXPECT_GE(out.dt_next, cfg.dt_min);
    EXPECT_LE(out.dt_next, cfg.dt_max);
    EXPECT_GE(out.error_estimate, 0.0);
    EXPECT_EQ(out.accepted, out.error_estimate <= 1.0);
  }
}

TEST(Integrate, ZeroFinalTimeReturnsInitialState) {
  const SpectralGrid g(16);
  const SimState s = SimState::reduced(0.0, sine_mode(g, 2));
  IntegratorConfig cfg;
  cfg.t_final = 0.0;
  int calls = 0;
  const auto r = integrate(s, linear_alpha1(), cfg,
                           [&](const SimState&, const StepInfo&) { ++calls; });
  EXPECT_EQ(r.report.status, Termination::reached_t_final);
  EXPECT_EQ(r.report.accepted_steps, 0);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(r.final_state.primary()[2], s.primary()[2]);
}

TEST(Integrate, LinearAlphaOneMode4) {
  const SpectralGrid g(32);
  const SimState s = SimState::reduced(0.0, sine_mode(g, 4));
  IntegratorConfig cfg;
  cfg.atol = 1e-20;
  cfg.t_final = 1.0;
  const auto r = integrate(s, linear_alpha1(), cfg, {}, monitors_off());
  const Complex got = r.final_state.primary()[4];
  const Complex exact = std::exp(Complex(-4.8, -5.6)) * s.primary()[4];
  EXPECT_NEAR(std::abs(got) / std::abs(s.primary()[4]), std::exp(-4.8),
              10 * cfg.rtol * std::exp(-4.8));
  EXPECT_LE(std::abs(got - exact) / std::abs(exact), 10 * cfg.rtol);
}

TEST(Integrate, LandsExactlyOnOutputInstants) {
  const SpectralGrid g(16);
  IntegratorConfig cfg;
  cfg.t_final = 0.3;
  cfg.output_every = 0.1;
  std::vector<double> outs;
  integrate(SimState::reduced(0.0, sine_mode(g, 1)), linear_alpha1(), cfg,
            [&](const SimState& y, const StepInfo& info) {
              if (info.output_instant) outs.push_back(y.time);
            });
  ASSERT_EQ(outs.size(), 4u);
  EXPECT_EQ(outs[0], 0.0);
  EXPECT_EQ(outs[1], 0.1);
  EXPECT_EQ(outs[2], 0.2);
  EXPECT_EQ(outs[3], 0.3);
}

TEST(Integrate, StepsStayWithinBounds) {
  const SpectralGrid g(64);
  std::mt19937_64 rng(4);
  ModelParams p;
  p.alpha = 2.0;
  p.model = ModelKind::alpha2;
  IntegratorConfig cfg;
  cfg.t_final = 0.5;
  cfg.dt_max = 0.01;
  cfg.dt_min = 1e-7;
  cfg.dt_init = 1e-7;
  double lo = 1e9, hi = 0.0;
  const auto r = integrate(SimState::reduced(0.0, random_spectrum(g, 20, rng)),
                           p, cfg, [&](const SimState&, const StepInfo& info) {
                             if (info.step == 0) return;
                             lo = std::min(lo, info.dt);
                             hi = std::max(hi, info.dt);
                           });
  EXPECT_EQ(r.report.status, Termination::reached_t_final);
  EXPECT_GE(lo, cfg.dt_min);
  EXPECT_LE(hi, cfg.dt_max);
}

TEST(Integrate, MeanStaysZeroInNonlinearRun) {
  const SpectralGrid g(128);
  std::mt19937_64 rng(8);
  ModelParams p;
  p.alpha = 1.0;
  p.model = ModelKind::alpha1;
  IntegratorConfig cfg;
  cfg.t_final = 0.5;
  double worst = 0.0;
  integrate(SimState::reduced(0.0, random_spectrum(g, 30, rng)), p, cfg,
            [&](const SimState& y, const StepInfo&) {
              worst = std::max(worst, std::abs(y.primary()[0]));
            });
  EXPECT_LE(worst, 1e-12);
}

TEST(Integrate, FixedStepModeTakesUniformSteps) {
  const SpectralGrid g(16);
  IntegratorConfig cfg;
  cfg.adaptive = false;
  cfg.dt_init = 0.05;
  cfg.dt_max = 0.05;
  cfg.t_final = 1.0;
  const auto r =
      integrate(SimState::reduced(0.0, sine_mode(g, 1)), linear_alpha1(), cfg);
  EXPECT_EQ(r.report.accepted_steps, 20);
  EXPECT_EQ(r.report.rejected_steps, 0);
  EXPECT_DOUBLE_EQ(r.final_state.time, 1.0);
}

TEST(Integrate, UnclassifiedCollapseThrows) {
  const SpectralGrid g(16);
  const RhsFunction bad = [](const SimState& y) {
    Spectrum t(y.grid());
    if (y.time > 0.0) t[1] = std::numeric_limits<double>::infinity();
    return Tendency{t};
  };
  IntegratorConfig cfg;
  cfg.dt_min = 1e-6;
  EXPECT_THROW(
      integrate(SimState::reduced(0.0, sine_mode(g, 1)), bad, cfg),
      IntegrationError);
}

TEST(Integrate, GradientGrowthFlagsBlowup) {
  // Burgers-type steepening at alpha = 0 with a large profile.
  const SpectralGrid g(256);
  ModelParams p;
  p.alpha = 0.0;
  p.model = ModelKind::alpha0;
  IntegratorConfig cfg;
  cfg.t_final = 2.0;
  cfg.dt_max = 0.01;
  MonitorConfig m;
  m.gradient_growth = 10.0;
  const auto r = integrate(SimState::reduced(0.0, sine_mode(g, 4, -2.0)), p,
                           cfg, {}, m);
  EXPECT_EQ(r.report.status, Termination::blowup_suspected);
  EXPECT_GE(r.report.gradient_growth, 10.0);
  EXPECT_LT(r.report.time, cfg.t_final);
}

TEST(Integrate, StepBudget) {
  const SpectralGrid g(16);
  IntegratorConfig cfg;
  cfg.max_steps = 3;
  cfg.dt_max = 1e-3;
  const auto r =
      integrate(SimState::reduced(0.0, sine_mode(g, 1)), linear_alpha1(), cfg);
  EXPECT_EQ(r.report.status, Termination::max_steps);
  EXPECT_EQ(exit_code(r.report.status), 1);
}

TEST(Integrate, RejectsBadInput) {
  const SpectralGrid g(16);
  Spectrum p = sine_mode(g, 1);
  p[0] = 0.1;
  EXPECT_THROW(integrate(SimState::reduced(0.0, p), linear_alpha1(), {}),
               std::invalid_argument);
  ModelParams full;
  full.model = ModelKind::full_system;
  EXPECT_THROW(integrate(SimState::reduced(0.0, sine_mode(g, 1)), full, {}),
               std::invalid_argument);
}

TEST(Config, Validation) {
  IntegratorConfig c;
  EXPECT_NO_THROW(c.validate());
  c.dt_init = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.rtol = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.t_final = -1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Termination, ExitCodes) {
  EXPECT_EQ(exit_code(Termination::reached_t_final), 0);
  EXPECT_EQ(exit_code(Termination::blowup_suspected), 2);
  EXPECT_EQ(exit_code(Termination::under_resolved), 3);
  EXPECT_EQ(to_string(Termination::under_resolved), "under_resolved");
}
