#include <gtest/gtest.h>

#include <cmath>

#include "raman/propagator.hpp"
#include "raman/pump_ivp.hpp"
#include "raman/rk4.hpp"
#include "support.hpp"

using namespace raman;

TEST(Trapezoid, TwoIntervalWeights) {
  const auto t = trapezoid_operator(build_grid(0.2, 0.1));
  Eigen::MatrixXd expect(3, 3);
  expect << 0, 0.5, 0.5,
            0, 0.5, 1.0,
            0, 0.0, 0.5;
  EXPECT_LT((t.weights() - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Trapezoid, ShortLastIntervalWeights) {
  // Intervals 0.3, 0.3, 0.3, 0.1: the final half-weights shrink to 1/6 of a step.
  const auto t = trapezoid_operator(build_grid(1.0, 0.3));
  EXPECT_NEAR(t.weights()(3, 4), 0.5 + 1.0 / 6.0, 1e-12);
  EXPECT_NEAR(t.weights()(4, 4), 1.0 / 6.0, 1e-12);
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(1, 5);
  EXPECT_NEAR(t.apply(ones)(0, 4) * t.step(), 1.0, 1e-12);
}

TEST(Trapezoid, RunningSumMatchesDenseProduct) {
  const Grid g = build_grid(3.05, 0.1);
  const auto t = trapezoid_operator(g);
  const Eigen::MatrixXd v = Eigen::MatrixXd::Random(4, static_cast<Eigen::Index>(g.size()));
  EXPECT_LT((t.apply(v) - v * t.weights()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Trapezoid, ExponentialIntegral) {
  const double a = 0.046, L = 100.0;
  const Grid g = build_grid(L, 0.1);
  const auto t = trapezoid_operator(g);
  Eigen::MatrixXd v(1, static_cast<Eigen::Index>(g.size()));
  for (std::size_t k = 0; k < g.size(); ++k) v(0, static_cast<Eigen::Index>(k)) = std::exp(-a * g.points[k]);
  const Eigen::MatrixXd I = t.apply(v) * t.step();
  for (std::size_t k = 0; k < g.size(); k += 50) {
    const double exact = (1.0 - std::exp(-a * g.points[k])) / a;
    EXPECT_NEAR(I(0, static_cast<Eigen::Index>(k)), exact, 1e-4);
  }
}

namespace {

// Propagation written out with scalar loops and an explicit trapezoid sum.
Eigen::MatrixXd propagate_reference(const Eigen::MatrixXd& p, const Eigen::MatrixXd& g, const Eigen::VectorXd& alpha,
                                    const Eigen::VectorXd& d, const Grid& grid) {
  const auto n = p.rows(), m = p.cols();
  Eigen::MatrixXd out(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    double integral = 0.0;
    auto coupled = [&](Eigen::Index k) {
      double s = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) s += g(i, j) * p(j, k);
      return s;
    };
    for (Eigen::Index k = 0; k < m; ++k) {
      if (k > 0) integral += 0.5 * grid.interval(static_cast<std::size_t>(k - 1)) * (coupled(k - 1) + coupled(k));
      out(i, k) = p(i, 0) * std::exp(d[i] * (integral - alpha[i] * grid.points[static_cast<std::size_t>(k)]));
    }
  }
  return out;
}

}  // namespace

TEST(Propagate, MatchesScalarReference) {
  const auto s = test::small_link(3.0, 400.0, 5.0, 0.1);
  const PropagationContext ctx(s);
  Eigen::MatrixXd p = (Eigen::MatrixXd::Random(static_cast<Eigen::Index>(s.channel_count()),
                                                static_cast<Eigen::Index>(ctx.grid.size())).array() + 1.5) * 0.1;
  const auto got = ctx.propagate(p);
  const auto ref = propagate_reference(p, ctx.coupling, ctx.alpha, ctx.direction, ctx.grid);
  EXPECT_LT(((got - ref).array() / ref.array()).abs().maxCoeff(), 1e-12);
}

TEST(Propagate, ZeroGainIsPureAttenuation) {
  auto s = test::small_link(0.0, 300.0, 10.0, 0.1, RamanGainModel::zero());
  const PropagationContext ctx(s);
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(s.channel_count()),
                                                static_cast<Eigen::Index>(ctx.grid.size()), 0.01);
  const auto out = ctx.propagate(p);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index k = 0; k < out.cols(); ++k) {
      const double expect = 0.01 * std::exp(-ctx.direction[i] * ctx.alpha[i] * ctx.grid.points[static_cast<std::size_t>(k)]);
      EXPECT_NEAR(out(i, k) / expect, 1.0, 1e-14);
    }
  }
}

TEST(Propagate, KeepsAnchorColumn) {
  const auto s = test::small_link();
  const PropagationContext ctx(s);
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(s.channel_count()),
                                                static_cast<Eigen::Index>(ctx.grid.size()), 0.05);
  p.col(0).setLinSpaced(0.01, 0.2);
  const auto out = ctx.propagate(p);
  EXPECT_EQ(out.col(0), p.col(0));
}

TEST(Propagate, RejectsMismatchedShapes) {
  const auto s = test::small_link();
  const PropagationContext ctx(s);
  Eigen::MatrixXd p = Eigen::MatrixXd::Ones(2, 3);
  EXPECT_THROW(ctx.propagate(p), std::invalid_argument);
}

TEST(Rk4, FourthOrderOnDecay) {
  auto err = [](int n) {
    Rk4Stepper rk(1);
    Eigen::VectorXd x(1);
    x << 1.0;
    const double h = 2.0 / n;
    for (int i = 0; i < n; ++i) rk.step([](const Eigen::VectorXd& y, Eigen::VectorXd& dy) { dy = -y; }, x, h);
    return std::abs(x[0] - std::exp(-2.0));
  };
  EXPECT_NEAR(err(20) / err(40), 16.0, 1.0);
  EXPECT_NEAR(err(40) / err(80), 16.0, 1.0);
}

TEST(PumpIvp, SinglePumpClosedForm) {
  LinkOptions opt;
  opt.length_km = 50.0;
  const auto s = assemble_scenario({190.0}, UniformPower{0.0}, PumpSet{{205.0}, {500.0}}, 1.0, opt);
  const Grid g = build_grid(50.0, 0.1);
  Eigen::VectorXd b(1);
  b << 0.5;
  const auto p = solve_pump_only(s, g, b);
  const double a = s.channels[1].attenuation_per_km;
  for (std::size_t k = 0; k < g.size(); k += 37) {
    EXPECT_NEAR(p(0, static_cast<Eigen::Index>(k)) / (0.5 * std::exp(-a * (50.0 - g.points[k]))), 1.0, 1e-10);
  }
  EXPECT_EQ(p(0, static_cast<Eigen::Index>(g.size()) - 1), 0.5);
}

TEST(PumpIvp, RefinementConverges) {
  const auto s = make_cl_scenario(0.0, 0.7);
  const Grid g = build_grid(100.0, 0.1);
  Eigen::VectorXd b(5);
  for (Eigen::Index a = 0; a < 5; ++a) b[a] = s.channels[s.pump_begin() + static_cast<std::size_t>(a)].boundary_power_w;
  const auto coarse = solve_pump_only(s, g, b, 4);
  const auto fine = solve_pump_only(s, g, b, 16);
  EXPECT_LT(((coarse - fine).array() / fine.array()).abs().maxCoeff(), 1e-6);
}

TEST(PumpIvp, InputChecks) {
  const auto s = test::small_link();
  const Grid g = build_grid(s.length_km, s.step_km);
  EXPECT_THROW(solve_pump_only(s, g, Eigen::VectorXd::Ones(3)), std::invalid_argument);
  EXPECT_THROW(solve_pump_only(s, g, -Eigen::VectorXd::Ones(2)), std::invalid_argument);
  EXPECT_THROW(solve_pump_only(test::signals_only(), build_grid(10.0, 0.1), Eigen::VectorXd::Ones(1)),
               std::invalid_argument);
}
