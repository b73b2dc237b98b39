#include "crnldp/dynamics.hpp"
#include "crnldp/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace crnldp;

namespace {

// Largest real root of k7 + k9 w^2 - k6 w - k8 w^3 by bisection (the quartic drift's equilibrium).
double schlogl_equilibrium() {
  auto f = [](double w) { return 2 + 0.001 * w * w - 0.33 * w - 0.001 * w * w * w; };
  double lo = 0, hi = 100;
  for (int k = 0; k < 200; ++k) {
    const double mid = (lo + hi) / 2;
    (f(mid) > 0 ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

}  // namespace

TEST(MassActionField, Ex2AtOnes) {
  const auto dx = mass_action_field(builtin_network("ex2"), {1, 1});
  EXPECT_DOUBLE_EQ(dx[0], 1);
  EXPECT_DOUBLE_EQ(dx[1], 0);
}

TEST(MassActionField, BoundaryAndConstant) {
  // at x_A = 0 only the source reaction fires
  const auto dx = mass_action_field(builtin_network("ex2"), {0, 2});
  EXPECT_DOUBLE_EQ(dx[0], 1 + 8);
  EXPECT_DOUBLE_EQ(dx[1], 2 - 24);
  EXPECT_DOUBLE_EQ(mass_action_field(parse_network("0 -> A ; k = 2"), {5})[0], 2);
  EXPECT_THROW(mass_action_field(builtin_network("ex2"), {-1, 0}), NegativeConcentration);
}

TEST(IntegrateOde, LinearDecayAndOrder) {
  const auto net = parse_network("A -> 0 ; k = 1");
  double previous = 0;
  for (double tol : {1e-6, 1e-8, 1e-10}) {
    OdeOptions opt;
    opt.rel_tol = tol;
    opt.abs_tol = tol * 1e-2;
    const auto sol = integrate_ode(net, {1}, 1.0, opt);
    const double err = std::abs(sol.trajectory.states.back()[0] - std::exp(-1.0));
    EXPECT_LT(err, 10 * tol);
    if (previous > 0) EXPECT_LT(err, previous);
    previous = err;
    EXPECT_DOUBLE_EQ(sol.trajectory.times.back(), 1.0);
  }
}

TEST(IntegrateOde, BlowUpReportsTime) {
  const auto net = parse_network("2A -> 3A ; k = 1");
  try {
    integrate_ode(net, {1}, 2.0);
    FAIL();
  } catch (const BlowUp& e) {
    EXPECT_NEAR(e.time(), 1.0, 1e-6);  // x = 1/(1 - t)
  }
}

TEST(IntegrateOde, SchloglEquilibriumIsStationary) {
  const double w = schlogl_equilibrium();
  const auto sol = integrate_ode(builtin_network("schlogl"), {w}, 50.0);
  for (const auto& x : sol.trajectory.states) EXPECT_NEAR(x[0], w, 1e-7);
}

TEST(IntegrateOde, StaysNonnegativeAndTimesIncrease) {
  const auto sol = integrate_ode(builtin_network("bistable"), {0, 0, 0, 0}, 20.0);
  for (std::size_t k = 0; k < sol.trajectory.size(); ++k) {
    for (double xi : sol.trajectory.states[k]) EXPECT_GE(xi, 0);
    if (k) EXPECT_GT(sol.trajectory.times[k], sol.trajectory.times[k - 1]);
  }
  EXPECT_EQ(sol.trajectory.states.front(), (State{0, 0, 0, 0}));
}

TEST(Propensity, Examples) {
  const auto ex1 = builtin_network("ex1");
  EXPECT_NEAR(propensity(ex1, 10, {5, 3}, 0), 0.3, 1e-15);
  EXPECT_EQ(propensity(ex1, 10, {5, 1}, 0), 0.0);
  const auto src = parse_network("0 -> A ; k = 3");
  EXPECT_DOUBLE_EQ(propensity(src, 7, {0}, 0), 21);
  EXPECT_DOUBLE_EQ(propensity(src, 7, {100}, 0), 21);
}

TEST(Ssa, PoissonSource) {
  const auto net = parse_network("0 -> A ; k = 1");
  double sum = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto path = ssa_simulate(net, 100, {0}, 1.0, seed);
    sum += static_cast<double>(path.counts.back()[0]);
    EXPECT_EQ(path.counts.back()[0], static_cast<long long>(path.reaction_ids.size()));
  }
  EXPECT_NEAR(sum / 100, 100, 3);
}

TEST(Ssa, PathInvariantsAndDeterminism) {
  const auto net = builtin_network("bistable");
  const auto a = ssa_simulate(net, 20, {1, 1, 1, 1}, 5.0, 42);
  const auto b = ssa_simulate(net, 20, {1, 1, 1, 1}, 5.0, 42);
  EXPECT_EQ(a.times, b.times);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.reaction_ids, b.reaction_ids);
  const auto c = ssa_simulate(net, 20, {1, 1, 1, 1}, 5.0, 43);
  EXPECT_NE(a.times, c.times);
  for (std::size_t k = 0; k + 1 < a.counts.size(); ++k) {
    const auto d = reaction_vector(net.reaction(a.reaction_ids[k]));
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(a.counts[k + 1][i], a.counts[k][i] + d[i]);
    for (auto n : a.counts[k + 1]) EXPECT_GE(n, 0);
    EXPECT_GT(a.times[k + 1], a.times[k]);
  }
}

TEST(Ssa, AbsorptionAtZero) {
  const auto net = builtin_network("ex410");
  int absorbed = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto path = ssa_simulate(net, 1, {2}, 50.0, seed);
    if (path.absorbed) {
      ++absorbed;
      EXPECT_EQ(path.counts.back()[0], 0);
    }
  }
  EXPECT_GT(absorbed, 0);
}

TEST(Ssa, FinitelyManyJumps) {
  const auto net = parse_network("2A <-> 0 ; kf = 1, kr = 1");
  const auto path = ssa_simulate(net, 10, {0}, 10.0, 1);
  EXPECT_GT(path.reaction_ids.size(), 0u);
  EXPECT_FALSE(path.absorbed);
}

TEST(Ensemble, DeviationShrinksWithVolume) {
  const auto net = builtin_network("schlogl");
  const auto rows = ensemble_lln(net, {20, 2000}, {1.0}, 2.0, 8, 3);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_GT(rows[0].median, rows[1].median);
  const auto tiny = ensemble_lln(net, {2000}, {1.0}, 1e-3, 4, 3);
  EXPECT_LT(tiny[0].median, 0.01);
}

TEST(Containment, StableAndExplosive) {
  const auto stable = parse_network("2A <-> 0 ; kf = 1, kr = 1");
  auto rows = estimate_containment(stable, {10, 30}, {1.0}, 3 * std::exp(2.0), 1.0, 1.0, 40, 9);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.upper_bound);
    EXPECT_NEAR(r.log_rate, std::log(1.0 / 40) / r.volume, 1e-12);
  }
  const auto explosive = parse_network("2A -> 3A ; k = 1");
  rows = estimate_containment(explosive, {20}, {1.0}, 10.0, 1.0, 3.0, 20, 9);
  EXPECT_EQ(rows[0].exceedances, 20u);
  EXPECT_DOUBLE_EQ(rows[0].log_rate, 0.0);
  EXPECT_THROW(estimate_containment(stable, {10}, {2.0}, 10, 1.0, 1.0, 4, 1), Error);
}

TEST(Poincare, CircleCrossings) {
  Trajectory circle;
  for (int k = 0; k <= 4000; ++k) {
    const double t = 4 * M_PI * k / 4000.0;
    circle.times.push_back(t);
    circle.states.push_back({std::cos(t), std::sin(t)});
  }
  const auto pts = poincare_section(circle, diagonal_plane(2, 0, 1), {0, 1});
  ASSERT_EQ(pts.size(), 2u);
  for (const auto& p : pts) {
    EXPECT_NEAR(p[0], -std::sqrt(0.5), 1e-5);
    EXPECT_NEAR(p[1], -std::sqrt(0.5), 1e-5);
  }
  Hyperplane reversed{{-1, 1}, 0};
  const auto other = poincare_section(circle, reversed, {0, 1});
  ASSERT_EQ(other.size(), 2u);
  EXPECT_NEAR(other[0][0], std::sqrt(0.5), 1e-5);
  EXPECT_EQ(detect_period(std::vector<std::array<double, 2>>(5, {1.0, 2.0})), 1u);
}

TEST(Poincare, OneSidedIsEmpty) {
  Trajectory line;
  for (int k = 0; k < 10; ++k) {
    line.times.push_back(k);
    line.states.push_back({2.0 + k, 1.0});
  }
  EXPECT_TRUE(poincare_section(line, diagonal_plane(2, 0, 1), {0, 1}).empty());
}

TEST(Poincare, PeriodDetection) {
  std::vector<std::array<double, 2>> two;
  for (int k = 0; k < 20; ++k) two.push_back({k % 2 ? 1.0 : 2.0, 0.0});
  EXPECT_EQ(detect_period(two), 2u);
  std::vector<std::array<double, 2>> chaotic;
  double x = 0.3;
  for (int k = 0; k < 200; ++k) {
    x = 4 * x * (1 - x);
    chaotic.push_back({x, 0.0});
  }
  EXPECT_EQ(detect_period(chaotic), 0u);
}
