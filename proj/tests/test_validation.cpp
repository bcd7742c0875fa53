#include <gtest/gtest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "angio/validation.hpp"
#include "test_support.hpp"

using namespace angio;

namespace {

IntegratorConfig relative_only() {
  IntegratorConfig c;
  c.atol = 1e-20;
  return c;
}

ModelParams general(double alpha) {
  ModelParams p;
  p.alpha = alpha;
  p.model = alpha == 0.0 ? ModelKind::alpha0 : ModelKind::general;
  return p;
}

}  // namespace

TEST(Slope, RecoversPowerLaw) {
  const std::vector<double> x{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 4.5));
  EXPECT_NEAR(log_log_slope(x, y), 4.5, 1e-12);
  const std::vector<double> zeros(4, 0.0);
  EXPECT_EQ(log_log_slope(x, zeros), 0.0);
}

TEST(LinearOracle, ZeroTimeIsExact) {
  EXPECT_EQ(linear_oracle_error(3, general(1.0), 0.0), 0.0);
  EXPECT_THROW(linear_oracle_error(0, general(1.0), 1.0), std::invalid_argument);
}

TEST(LinearOracle, AlphaOneModeFour) {
  EXPECT_LE(linear_oracle_error(4, general(1.0), 1.0, relative_only()), 1e-7);
}

TEST(LinearOracle, AlphaTwoModeOne) {
  EXPECT_LE(linear_oracle_error(1, general(2.0), 2.0, relative_only()), 1e-7);
}

TEST(LinearOracle, ErrorTracksToleranceProperty) {
  // Bounded by a fixed multiple of rtol over the resolved band.
  for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
    for (int k : {1, 3, 7, 12}) {
      IntegratorConfig c = relative_only();
      c.rtol = 1e-6;
      const double coarse = linear_oracle_error(k, general(alpha), 1.0, c);
      c.rtol = 1e-9;
      const double fine = linear_oracle_error(k, general(alpha), 1.0, c);
      EXPECT_LE(coarse, 50 * 1e-6) << alpha << " " << k;
      EXPECT_LE(fine, 50 * 1e-9) << alpha << " " << k;
    }
  }
}

TEST(CrossCheck, AllClosedFormsAgree) {
  for (int alpha : {0, 1, 2}) {
    const ConvergenceReport r = cross_check_rhs(alpha, 25, 99);
    EXPECT_TRUE(r.passed) << alpha;
    EXPECT_EQ(r.errors.size(), 25u);
    for (double e : r.errors) EXPECT_LE(e, 1e-12);
  }
  EXPECT_THROW(cross_check_rhs(3, 1), std::invalid_argument);
  EXPECT_THROW(cross_check_rhs(1, 0), std::invalid_argument);
}

TEST(Asymptotic, EquilibriumMapsToEquilibrium) {
  const SpectralGrid g(32);
  ModelParams p;
  p.alpha = 2.0;
  p.beta = 2.0;
  p.chi = 5.0;
  const std::vector<double> eps{0.1, 0.05, 0.025};
  const ConvergenceReport r = asymptotic_consistency(eps, 0.5, RealField(g), p);
  for (double e : r.errors) EXPECT_EQ(e, 0.0);
  EXPECT_TRUE(r.passed);
}

TEST(Asymptotic, Preconditions) {
  const SpectralGrid g(32);
  ModelParams p;
  p.beta = 2.0;
  p.chi = 4.0;
  const std::vector<double> eps{0.1, 0.05, 0.025};
  EXPECT_THROW(asymptotic_consistency(eps, 0.5, RealField(g), p),
               std::invalid_argument);
  p.chi = 5.0;
  const std::vector<double> two{0.1, 0.05};
  EXPECT_THROW(asymptotic_consistency(two, 0.5, RealField(g), p),
               std::invalid_argument);
  const std::vector<double> rising{0.025, 0.05, 0.1};
  EXPECT_THROW(asymptotic_consistency(rising, 0.5, RealField(g), p),
               std::invalid_argument);
}

TEST(SelfConvergence, IdenticalLevels) {
  RunConfig c = preset("fig_alpha1");
  const std::vector<RefinementLevel> lv{{128, 1e-9}, {128, 1e-9}};
  c.initial_scale = 0.1;
  const ConvergenceReport r = self_convergence(c, lv, 0.05);
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0], 0.0);
  EXPECT_TRUE(r.passed);
}

TEST(SelfConvergence, SmoothDataConverges) {
  RunConfig c = preset("fig_alpha1");
  c.initial_scale = 0.25;
  const std::vector<RefinementLevel> lv{{256, 1e-10}, {512, 1e-10}, {1024, 1e-10}};
  const ConvergenceReport r = self_convergence(c, lv, 0.2);
  EXPECT_TRUE(r.passed);
  EXPECT_GE(r.errors[0] / std::max(r.errors[1], 1e-300), 10.0);
}

TEST(SelfConvergence, FigAlphaOneRefinementRegression) {
  // Full-amplitude profile: the front near t = 0.05 is under-resolved at
  // N = 256, which caps the first refinement ratio just below 10. Values
  // frozen from the first run.
  const std::vector<RefinementLevel> lv{{256, 1e-10}, {512, 1e-10}, {1024, 1e-10}};
  const ConvergenceReport r = self_convergence(preset("fig_alpha1"), lv, 0.2);
  ASSERT_EQ(r.errors.size(), 2u);
  EXPECT_NEAR(r.errors[0], 1.2012e-3, 0.02 * 1.2012e-3);
  EXPECT_NEAR(r.errors[1], 1.2198e-4, 0.02 * 1.2198e-4);
  const std::vector<RefinementLevel> finer{{512, 1e-10}, {1024, 1e-10}, {2048, 1e-10}};
  EXPECT_TRUE(self_convergence(preset("fig_alpha1"), finer, 0.2).passed);
}

TEST(SelfConvergence, BlowupScenarioDoesNotConverge) {
  RunConfig c = preset("fig_alpha0");
  const std::vector<RefinementLevel> lv{{512, 1e-9}, {1024, 1e-9}, {2048, 1e-9}};
  const ConvergenceReport r = self_convergence(c, lv, 0.14);
  EXPECT_FALSE(r.passed);
}

TEST(FixedStep, FourthOrderAtLeast) {
  const std::vector<double> dts{0.1, 0.05, 0.025};
  const ConvergenceReport r = fixed_step_order(4, general(1.0), 1.0, dts);
  EXPECT_TRUE(r.passed);
  EXPECT_GE(r.errors[0] / r.errors[1], 16.0);
  EXPECT_GE(r.errors[1] / r.errors[2], 16.0);
  EXPECT_GE(r.estimated_order, 4.0);
}

TEST(Monotonicity, FunctionalSelection) {
  DiagnosticsRecord d;
  d.energy_E = 1;
  d.energy_F = 2;
  d.energy_G = 3;
  d.a0 = 4;
  d.a1 = 5;
  EXPECT_EQ(monitored_functionals(d, ModelKind::alpha0), std::vector<double>{1});
  EXPECT_EQ(monitored_functionals(d, ModelKind::alpha1),
            (std::vector<double>{4, 5}));
  EXPECT_EQ(monitored_functionals(d, ModelKind::alpha2), std::vector<double>{2});
  EXPECT_EQ(monitored_functionals(d, ModelKind::general), std::vector<double>{3});
}

TEST(Monotonicity, SmallDataDecays) {
  RunConfig c = preset("fig_alpha2");
  c.n_nodes = 256;
  c.integrator.t_final = 1.0;
  const MonotonicityResult r = check_monotonicity(c, 0.05);
  EXPECT_TRUE(r.completed);
  EXPECT_TRUE(r.monotone);
  EXPECT_LE(r.worst_increase, 0.0);
  EXPECT_EQ(r.records.size(), 51u);
}

TEST(Report, JsonShape) {
  const ConvergenceReport r = cross_check_rhs(1, 3);
  const auto j = nlohmann::json::parse(to_json(r));
  EXPECT_EQ(j["parameter"], "trial");
  EXPECT_EQ(j["values"].size(), 3u);
  EXPECT_EQ(j["errors"].size(), 3u);
  EXPECT_TRUE(j.contains("estimated_order"));
  EXPECT_EQ(j["verdict"], "pass");
  EXPECT_TRUE(j["metadata"].contains("max_relative_discrepancy"));
}
