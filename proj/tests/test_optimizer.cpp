#include <gtest/gtest.h>

#include <atomic>
#include <cmath>

#include "halbach/optimizer.hpp"

using namespace halbach;

namespace {

/// Smooth synthetic objective peaked at separation 2.3 mm, offset 0.1 mm.
CandidateEval quadratic(const DesignParams& p) {
  CandidateEval e;
  e.params = p;
  const double ds = (p.separation - 2.3e-3) / 1e-3, dz = (p.axial_offset_upper - 0.1e-3) / 1e-3;
  e.gradient = 60.0 - 10.0 * ds * ds - 40.0 * dz * dz;
  e.feasible = true;
  e.reason = "ok";
  return e;
}

const SweepAxis kSeparation{SweepParam::separation, 1.5e-3, 3.5e-3, 0.25e-3, 0.05e-3};
const SweepAxis kOffset{SweepParam::axial_offset_upper, -0.5e-3, 0.5e-3, 0.1e-3, 0.02e-3};

}  // namespace

TEST(Optimizer, SweepFindsQuadraticPeak) {
  const SweepResult r = sweep_1d(DesignParams{}, kSeparation, quadratic);
  ASSERT_TRUE(r.has_incumbent());
  EXPECT_NEAR(r.best().value, 2.3e-3, 1e-12);
  EXPECT_TRUE(r.best().fine_stage);
  std::size_t coarse = 0;
  for (const auto& t : r.trace) coarse += !t.fine_stage;
  EXPECT_EQ(coarse, 9u);
}

TEST(Optimizer, SinglePointAxis) {
  const SweepAxis ax{SweepParam::separation, 2e-3, 2e-3, 0.25e-3, 0.05e-3};
  const SweepResult r = sweep_1d(DesignParams{}, ax, quadratic);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.best().value, 2e-3);
}

TEST(Optimizer, AxisValidation) {
  EXPECT_THROW(sweep_1d(DesignParams{}, {SweepParam::separation, 3e-3, 2e-3, 0.1e-3, 0.1e-3}, quadratic), Error);
  EXPECT_THROW(sweep_1d(DesignParams{}, {SweepParam::separation, 2e-3, 3e-3, 0.0, 0.1e-3}, quadratic), Error);
  EXPECT_THROW(sweep_1d(DesignParams{}, {SweepParam::separation, 2e-3, 3e-3, 0.1e-3, 0.2e-3}, quadratic), Error);
}

TEST(Optimizer, TiesPreferSmallerValue) {
  const SweepAxis ax{SweepParam::separation, 1e-3, 2e-3, 0.5e-3, 0.5e-3};
  const SweepResult r = sweep_1d(DesignParams{}, ax, [](const DesignParams& p) {
    CandidateEval e;
    e.params = p;
    e.gradient = 5.0;
    e.feasible = true;
    return e;
  });
  EXPECT_EQ(r.best().value, 1e-3);
}

TEST(Optimizer, AllInfeasibleHasNoIncumbent) {
  const SweepResult r = sweep_1d(DesignParams{}, kSeparation, [](const DesignParams& p) {
    CandidateEval e;
    e.params = p;
    e.reason = "residual";
    return e;
  });
  EXPECT_FALSE(r.has_incumbent());
  try {
    r.best();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoFeasiblePoint);
  }
}

TEST(Optimizer, DescentReachesJointOptimum) {
  DesignParams base;
  base.separation = 1.5e-3;
  base.axial_offset_upper = -0.5e-3;
  const SweepResult r = coordinate_descent(base, {kSeparation, kOffset}, quadratic);
  ASSERT_TRUE(r.has_incumbent());
  EXPECT_NEAR(r.best().eval.params.separation, 2.3e-3, 1e-12);
  EXPECT_NEAR(r.best().eval.params.axial_offset_upper, 0.1e-3, 1e-12);
  EXPECT_EQ(r.trace.front().round, 0);
}

TEST(Optimizer, ZeroRoundsReturnsBase) {
  DescentOptions opt;
  opt.max_rounds = 0;
  const SweepResult r = coordinate_descent(DesignParams{}, {kSeparation}, quadratic, opt);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.best().eval.params, DesignParams{});
}

TEST(Optimizer, NeverEvaluatesTheSameCandidateTwice) {
  std::atomic<int> calls{0};
  const SweepResult r = coordinate_descent(DesignParams{}, {kSeparation, kOffset}, [&](const DesignParams& p) {
    ++calls;
    return quadratic(p);
  });
  std::vector<DesignParams> seen;
  for (const auto& t : r.trace)
    if (std::find(seen.begin(), seen.end(), t.eval.params) == seen.end()) seen.push_back(t.eval.params);
  EXPECT_EQ(static_cast<std::size_t>(calls.load()), seen.size());
}

TEST(Optimizer, TraceIndependentOfWorkerCount) {
  auto run = [](unsigned workers) {
    set_default_workers(workers);
    return sweep_1d(preset_params(Preset::rhombic_s3), kSeparation, Objective{});
  };
  const SweepResult a = run(1), b = run(3);
  set_default_workers(0);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].value, b.trace[i].value);
    EXPECT_EQ(a.trace[i].eval.reason, b.trace[i].eval.reason);
    EXPECT_EQ(a.trace[i].eval.gradient, b.trace[i].eval.gradient);
  }
}

TEST(Optimizer, ZeroUpperRemanenceIsInfeasible) {
  DesignParams p = preset_params(Preset::optimized_s3_1);
  p.br_upper = 0.0;
  const CandidateEval e = evaluate_candidate(p);
  EXPECT_FALSE(e.feasible);
  EXPECT_NE(e.reason, "ok");
}

TEST(Optimizer, OverlapBecomesReason) {
  DesignParams p = preset_params(Preset::naive_s2);
  p.spacing = 0.3e-3;
  const CandidateEval e = evaluate_candidate(p);
  EXPECT_FALSE(e.feasible);
  EXPECT_EQ(e.reason, "OverlappingMagnets");
}

TEST(Optimizer, ClearanceConstraint) {
  Objective obj;
  obj.min_clearance = 3e-3;
  const CandidateEval e = evaluate_candidate(preset_params(Preset::optimized_s3_1), obj);
  EXPECT_FALSE(e.feasible);
  EXPECT_EQ(e.reason, "clearance");
}

TEST(Optimizer, ParamAccessors) {
  DesignParams p;
  param_ref(p, SweepParam::rhombus_axial) = 1.2e-3;
  EXPECT_EQ(p.rhombus_diagonals.axial, 1.2e-3);
  EXPECT_EQ(param_value(p, SweepParam::br_upper), 0.5);
  EXPECT_EQ(default_descent_axes().size(), 4u);
}
