#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "raman/adaptive_control.hpp"
#include "raman/escalation.hpp"
#include "raman/hybrid_solver.hpp"
#include "support.hpp"

using namespace raman;

namespace {

// One strong pump over a handful of signals; factor 1 diverges above ~5 W.
LinkScenario single_pump(double pump_w) {
  return assemble_scenario(band(189.0, 8, 125.0), UniformPower{0.0}, PumpSet{{203.2}, {pump_w * 1e3}}, 1.0, LinkOptions{});
}

}  // namespace

TEST(Dpc, PumpErrorSign) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Ones(3, 4);
  p(1, 3) = 0.8;
  p(2, 3) = 1.3;
  Eigen::VectorXd b(2);
  b << 1.0, 1.0;
  const auto e = pump_error(p, 1, b);
  EXPECT_NEAR(e[0], 0.2, 1e-15);
  EXPECT_NEAR(e[1], -0.3, 1e-15);
}

TEST(Dpc, Multipliers) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Ones(2, 3);
  Eigen::VectorXd err(2), b(2);
  err << 0.1, -0.1;
  b << 1.0, 1.0;
  dpc_correction(p, 0, err, b, 3.0, 0.1);
  EXPECT_NEAR(p(0, 1), 1.01, 1e-15);
  EXPECT_NEAR(p(1, 1), 0.70, 1e-15);
}

TEST(Dpc, MultiplierFloor) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Ones(1, 2);
  Eigen::VectorXd err(1), b(1);
  err << -1.0;
  b << 1.0;
  dpc_correction(p, 0, err, b, 3.0, 0.1, 1e-3);
  EXPECT_DOUBLE_EQ(p(0, 0), 1e-3);
}

TEST(Dpc, CorrectToBoundary) {
  Eigen::MatrixXd p(2, 3);
  p << 1, 1, 1,
       4, 2, 0.5;
  Eigen::VectorXd b(1);
  b << 0.25;
  correct_pumps_to_boundary(p, 1, b);
  EXPECT_DOUBLE_EQ(p(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(p(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(p(1, 2), 0.25);
  EXPECT_DOUBLE_EQ(p(0, 0), 1.0);
  p(1, 2) = 0.0;
  EXPECT_THROW(correct_pumps_to_boundary(p, 1, b), DivergenceError);
}

TEST(Peaks, StrictLocalMaxima) {
  const std::vector<double> x{0, 1, 0, 2, 2, 0, 3, 1, 5};
  const auto p = find_peaks(x);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0].index, 1u);
  EXPECT_EQ(p[1].index, 6u);
  EXPECT_DOUBLE_EQ(p[1].value, 3.0);
  EXPECT_TRUE(find_peaks(std::vector<double>{1, 2}).empty());
}

TEST(ClControl, FourPeaksQuarterCl) {
  std::vector<double> e(101, 0.0);
  for (std::size_t j : {10u, 30u, 50u, 70u}) e[j] = 1.0;
  ClController ctl{0.1, 0, {}};
  SolverParams prm;
  EXPECT_TRUE(maybe_reduce_cl(e, 100, ctl, prm));
  EXPECT_NEAR(ctl.cl, 0.025, 1e-15);
  EXPECT_EQ(ctl.last_change, 100u);
  ASSERT_EQ(ctl.history.size(), 1u);
  EXPECT_EQ(ctl.history[0].iteration, 100u);
}

TEST(ClControl, TwoPeaksIsNotOscillation) {
  std::vector<double> e(101, 0.0);
  e[20] = 1.0;
  e[60] = 0.8;
  ClController ctl{0.1, 0, {}};
  EXPECT_FALSE(maybe_reduce_cl(e, 100, ctl, SolverParams{}));
  EXPECT_DOUBLE_EQ(ctl.cl, 0.1);
  EXPECT_TRUE(ctl.history.empty());
}

TEST(ClControl, SmallPeaksIgnored) {
  std::vector<double> e(101, 0.0);
  e[10] = 1.0;
  e[30] = 0.2;  // below 0.3 of the window maximum
  e[50] = 0.25;
  e[70] = 0.5;
  ClController ctl{0.1, 0, {}};
  EXPECT_FALSE(maybe_reduce_cl(e, 100, ctl, SolverParams{}));
}

TEST(ClControl, WindowStartsAtLastChange) {
  std::vector<double> e(201, 0.0);
  for (std::size_t j : {10u, 30u, 50u, 70u}) e[j] = 1.0;
  ClController ctl{0.1, 100, {}};
  EXPECT_FALSE(maybe_reduce_cl(e, 200, ctl, SolverParams{}));
}

TEST(Hybrid, ConvergesOnSmallLink) {
  const auto s = test::small_link(0.0, 300.0);
  const auto r = run_hybrid(s, SolverParams{});
  ASSERT_EQ(r.report.status, SolveStatus::Converged) << r.report.message;
  EXPECT_LT(r.report.max_abs_pump_error(), 1e-5);
  const auto b = s.boundary_powers();
  for (std::size_t i = 0; i < s.signal_count(); ++i) EXPECT_DOUBLE_EQ(r.profile(static_cast<Eigen::Index>(i), 0), b[static_cast<Eigen::Index>(i)]);
  // Signals gain from the pumps near z=L.
  EXPECT_GT(r.profile(0, r.profile.cols() - 1), b[0] * std::exp(-s.channels[0].attenuation_per_km * s.length_km));
}

TEST(Hybrid, FixedPointAtConvergence) {
  const auto s = test::small_link(5.0, 400.0);
  SolverParams prm;
  const auto r = run_hybrid(s, prm);
  ASSERT_EQ(r.report.status, SolveStatus::Converged);
  const PropagationContext ctx(s);
  const auto again = ctx.propagate(r.profile);
  EXPECT_LT(((again - r.profile).array() / r.profile.array()).abs().maxCoeff(), 10 * prm.tol);
}

TEST(Hybrid, SignalsOnlyIsAttenuation) {
  const auto s = test::signals_only();
  const auto r = run_hybrid(s, SolverParams{});
  ASSERT_EQ(r.report.status, SolveStatus::Converged);
  EXPECT_EQ(r.report.final_pump_error.size(), 0);
}

TEST(Hybrid, TraceCoversEveryIteration) {
  const auto r = run_hybrid(test::small_link(), SolverParams{});
  ASSERT_EQ(r.report.trace.size(), r.report.iterations);
  EXPECT_EQ(r.report.trace.front().stage, Stage::SignalScaleUp);
  for (std::size_t k = 0; k < r.report.trace.size(); ++k) {
    EXPECT_EQ(r.report.trace[k].iteration, k + 1);
    if (k > 0) {
      EXPECT_GE(static_cast<int>(r.report.trace[k].stage), static_cast<int>(r.report.trace[k - 1].stage));
    }
  }
  SolverParams quiet;
  quiet.record_trace = false;
  EXPECT_TRUE(run_hybrid(test::small_link(), quiet).report.trace.empty());
}

TEST(Hybrid, CapWithoutControllerIsIterationCapped) {
  SolverParams prm;
  prm.max_iterations = 2;
  const auto r = run_hybrid(test::small_link(), prm);
  EXPECT_EQ(r.report.status, SolveStatus::IterationCapped);
  EXPECT_EQ(r.report.iterations, 2u);
  EXPECT_TRUE(r.report.cl_history.empty());
}

TEST(Hybrid, LargeClTriggersController) {
  // With CL = 1 the first pump overshoots back and forth; the controller must
  // step in and the run still has to settle.
  SolverParams prm;
  prm.cl_initial = 1.0;
  const auto r = run_hybrid(make_cl_scenario(0.0, 1.0), prm);
  ASSERT_FALSE(r.report.cl_history.empty());
  EXPECT_LT(r.report.cl_history.front().cl, 1.0);
  EXPECT_EQ(r.report.cl_history.front().iteration % prm.oscillation_check_interval, 0u);
  EXPECT_EQ(r.report.status, SolveStatus::Converged);
}

TEST(Hybrid, ParamsValidated) {
  SolverParams prm;
  prm.factors_pump = {5.0, 10.0};
  EXPECT_THROW(run_hybrid(test::small_link(), prm), std::invalid_argument);
  prm.factors_pump = {1.0, 10.0, 5.0};
  EXPECT_THROW(prm.validate(), std::invalid_argument);
  prm = SolverParams{};
  prm.tol = 0.0;
  EXPECT_THROW(prm.validate(), std::invalid_argument);
}

TEST(Escalation, FirstFactorWhenItWorks) {
  const auto r = run_with_pump_factor_escalation(test::small_link(), SolverParams{});
  EXPECT_EQ(r.report.status, SolveStatus::Converged);
  EXPECT_EQ(r.report.pump_factor_used, 1.0);
  EXPECT_FALSE(r.report.divergence_flag);
}

TEST(Escalation, ClimbsLadderOnDivergence) {
  const auto s = single_pump(7.1);
  ASSERT_EQ(run_hybrid(s, SolverParams{}, 1.0).report.status, SolveStatus::Diverged);
  const auto r = run_with_pump_factor_escalation(s, SolverParams{});
  EXPECT_EQ(r.report.status, SolveStatus::Converged);
  EXPECT_GT(r.report.pump_factor_used, 1.0);
  EXPECT_FALSE(r.report.divergence_flag);
}

TEST(Escalation, ExhaustedLadderSetsFlag) {
  SolverParams prm;
  prm.factors_pump = {1.0};
  const auto r = run_with_pump_factor_escalation(single_pump(7.1), prm);
  EXPECT_EQ(r.report.status, SolveStatus::Diverged);
  EXPECT_TRUE(r.report.divergence_flag);
}
