#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "pnest/estimators.hpp"
#include "pnest/harness.hpp"

namespace pnest {
namespace {

using testing::Instance;
using testing::make_instance;
using testing::max_unimodular_deviation;
using testing::random_unimodular;
using testing::relative_error;

ComplexVector truth_u(const RealVector& theta) {
  ComplexVector u(theta.size());
  for (Index k = 0; k < theta.size(); ++k) u[k] = std::polar(1.0, -theta[k]);
  return u;
}

// ---------------------------------------------------------------------------
// PCT

TEST(Pct, ExpandRepeatsAndAdjointSums) {
  const PctTransform t = pct(8, 4);
  EXPECT_EQ(t.block_size(), 2);
  ComplexVector x(4);
  x << 1.0, 2.0, 3.0, 4.0;
  ComplexVector expected(8);
  expected << 1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 4.0;
  EXPECT_EQ(t.expand(x), expected);
  EXPECT_EQ(t.adjoint(expected), 2.0 * x);
}

TEST(Pct, FullLengthIsIdentity) {
  RandomStream rng(201);
  const PctTransform t = pct(16, 16);
  EXPECT_TRUE(t.is_identity());
  const ComplexVector x = testing::random_complex(rng, 16);
  EXPECT_EQ(t.expand(x), x);
  EXPECT_EQ(t.adjoint(x), x);
}

TEST(Pct, MaxEigenvalueIsBlockSize) {
  const ComplexMatrix t = oracle::pct_dense(32, 8);
  EXPECT_NEAR(oracle::max_eigenvalue(t.adjoint() * t), 4.0, 1e-12);
  EXPECT_EQ(pct(32, 8).gram_max_eigenvalue(), 4.0);
}

TEST(Pct, MatchesDenseMatrix) {
  RandomStream rng(202);
  const PctTransform t = pct(32, 8);
  const ComplexMatrix dense = oracle::pct_dense(32, 8);
  const ComplexVector x = testing::random_complex(rng, 8);
  const ComplexVector z = testing::random_complex(rng, 32);
  EXPECT_LE((t.expand(x) - dense * x).norm(), 1e-14);
  EXPECT_LE((t.adjoint(z) - dense.adjoint() * z).norm(), 1e-13);
}

TEST(Pct, AdjointIdentity) {
  RandomStream rng(203);
  for (int trial = 0; trial < 20; ++trial) {
    const PctTransform t = pct(64, 8);
    const ComplexVector x = testing::random_complex(rng, 8);
    const ComplexVector z = testing::random_complex(rng, 64);
    EXPECT_LE(std::abs(t.expand(x).dot(z) - x.dot(t.adjoint(z))), 1e-12 * x.norm() * z.norm());
  }
}

TEST(Pct, RejectsNonDivisor) {
  EXPECT_THROW(pct(1024, 48), std::invalid_argument);
  EXPECT_THROW(pct(16, 0), std::invalid_argument);
  EXPECT_THROW(pct(16, 32), std::invalid_argument);
  try {
    pct(1024, 48);
  } catch (const std::invalid_argument& e) {
    const std::string message = e.what();
    EXPECT_NE(message.find("48"), std::string::npos);
    EXPECT_NE(message.find("1024"), std::string::npos);
  }
}

// ---------------------------------------------------------------------------
// Objective

TEST(Objective, ZeroAtNoiselessTruth) {
  const Instance inst = make_instance(1, 256, 10, 0.05, 0.0);
  const ProjectorB b = ProjectorB::build(inst.s, 10);
  EXPECT_LE(objective(truth_u(inst.theta), inst.y, b), 1e-18 * inst.y.squaredNorm());
}

TEST(Objective, MatchesDenseOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = make_instance(seed, 32, 5, 0.1, 0.1);
    RandomStream rng(seed, 9);
    const ComplexVector u = random_unimodular(rng, 32);
    const ProjectorB b = ProjectorB::build(inst.s, 5);
    EXPECT_LE(relative_error(objective(u, inst.y, b), oracle::objective_dense(u, inst.y, inst.s, 5)),
              1e-10);
  }
}

TEST(Objective, EqualsFrequencyDomainError) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = make_instance(seed, 16, 3, 0.1, 0.1);
    RandomStream rng(seed, 10);
    const RealVector theta = testing::random_angles(rng, 16);
    const ProjectorB b = ProjectorB::build(inst.s, 3);
    const double time_domain = objective(truth_u(theta), inst.y, b);
    EXPECT_LE(relative_error(time_domain,
                             oracle::frequency_objective_dense(theta, inst.r, inst.s, 3)),
              1e-10);
  }
}

TEST(Objective, RotationInvariant) {
  RandomStream rng(204);
  const Instance inst = make_instance(3, 128, 10, 0.05, 0.1);
  const ProjectorB b = ProjectorB::build(inst.s, 10);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexVector u = random_unimodular(rng, 128);
    const Complex rotation = std::polar(1.0, testing::random_angles(rng, 1)[0]);
    EXPECT_LE(relative_error(objective(rotation * u, inst.y, b), objective(u, inst.y, b)), 1e-12);
  }
}

TEST(Objective, RejectsNonUnimodular) {
  const Instance inst = make_instance(4, 32, 5, 0.05, 0.1);
  const ProjectorB b = ProjectorB::build(inst.s, 5);
  ComplexVector u = ComplexVector::Ones(32);
  u[3] = 1.1;
  EXPECT_THROW(objective(u, inst.y, b), std::invalid_argument);
  EXPECT_THROW(objective(ComplexVector::Ones(31), inst.y, b), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Steps

TEST(TqmStep, NoiselessTruthIsFixedPoint) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Instance inst = make_instance(seed, 256, 10, 0.05, 0.0);
    const ProjectorB b = ProjectorB::build(inst.s, 10);
    const ComplexVector u = truth_u(inst.theta);
    EXPECT_LE((tqm_step(u, inst.y, b) - u).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((lqm_step(u, inst.y, b) - u).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(TqmStep, ZeroPhaseNoiselessOnesIsFixed) {
  const Instance inst = make_instance(5, 64, 4, RealVector::Zero(64), 0.0);
  const ProjectorB b = ProjectorB::build(inst.s, 4);
  const ComplexVector ones = ComplexVector::Ones(64);
  EXPECT_LE((tqm_step(ones, inst.y, b) - ones).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(TqmStep, MatchesDenseOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = make_instance(seed, 32, 5, 0.1, 0.1);
    RandomStream rng(seed, 11);
    const ComplexVector u = random_unimodular(rng, 32);
    const ProjectorB b = ProjectorB::build(inst.s, 5);
    EXPECT_LE((tqm_step(u, inst.y, b) - oracle::tqm_step_dense(u, inst.y, inst.s, 5)).norm(),
              1e-10 * std::sqrt(32.0));
    EXPECT_LE((lqm_step(u, inst.y, b) - oracle::lqm_step_dense(u, inst.y, inst.s, 5)).norm(),
              1e-10 * std::sqrt(32.0));
  }
}

TEST(TqmStep, OneStepDescends) {
  int strict = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance inst = make_instance(seed, 32, 5, 0.2, 0.05);
    RandomStream rng(seed, 12);
    const ComplexVector u = random_unimodular(rng, 32);
    const ProjectorB b = ProjectorB::build(inst.s, 5);
    const double before = objective(u, inst.y, b);
    const double after = objective(tqm_step(u, inst.y, b), inst.y, b);
    EXPECT_LE(after, before + 1e-12 * inst.y.squaredNorm());
    if (after < before) ++strict;
  }
  EXPECT_EQ(strict, 100);
}

TEST(LqmStep, ConstantModulusEqualsTqm) {
  RandomStream rng(205);
  const Index n = 32;
  const ComplexVector s = testing::random_complex(rng, n);
  // |y_n| constant: take a unimodular sequence scaled by 2.
  const ComplexVector y = 2.0 * random_unimodular(rng, n);
  const ProjectorB b = ProjectorB::build(s, 5);
  const ComplexVector u = random_unimodular(rng, n);
  EXPECT_LE((lqm_step(u, y, b) - tqm_step(u, y, b)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LqmStep, Descends) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance inst = make_instance(seed, 32, 5, 0.2, 0.05);
    RandomStream rng(seed, 13);
    const ComplexVector u = random_unimodular(rng, 32);
    const ProjectorB b = ProjectorB::build(inst.s, 5);
    EXPECT_LE(objective(lqm_step(u, inst.y, b), inst.y, b),
              objective(u, inst.y, b) + 1e-12 * inst.y.squaredNorm());
  }
}

TEST(Majorization, LqmSurrogateDominatesAndTouches) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance inst = make_instance(seed, 32, 5, 0.2, 0.1);
    RandomStream rng(seed, 14);
    const ComplexVector u = random_unimodular(rng, 32);
    const ComplexVector u0 = random_unimodular(rng, 32);
    const double f = oracle::objective_dense(u, inst.y, inst.s, 5);
    const double g = oracle::lqm_surrogate(u, u0, inst.y, inst.s, 5);
    EXPECT_GE(g - f, -1e-10 * inst.y.squaredNorm());
    EXPECT_LE(relative_error(oracle::lqm_surrogate(u0, u0, inst.y, inst.s, 5),
                             oracle::objective_dense(u0, inst.y, inst.s, 5)),
              1e-10);
  }
}

TEST(Majorization, TqmSurrogateDominatesAndTouches) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance inst = make_instance(seed, 32, 5, 0.2, 0.1);
    RandomStream rng(seed, 15);
    const ComplexVector u = random_unimodular(rng, 32);
    const ComplexVector u0 = random_unimodular(rng, 32);
    const double f = oracle::objective_dense(u, inst.y, inst.s, 5);
    EXPECT_GE(oracle::tqm_surrogate(u, u0, inst.y, inst.s, 5) - f, -1e-10 * inst.y.squaredNorm());
    EXPECT_LE(relative_error(oracle::tqm_surrogate(u0, u0, inst.y, inst.s, 5),
                             oracle::objective_dense(u0, inst.y, inst.s, 5)),
              1e-10);
  }
}

TEST(Majorization, TqmStepMinimizesItsSurrogate) {
  // The closed-form update must not be beaten by random unimodular points.
  const Instance inst = make_instance(7, 16, 3, 0.2, 0.1);
  RandomStream rng(206);
  const ComplexVector u0 = random_unimodular(rng, 16);
  const ProjectorB b = ProjectorB::build(inst.s, 3);
  const double at_step = oracle::tqm_surrogate(tqm_step(u0, inst.y, b), u0, inst.y, inst.s, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const ComplexVector u = random_unimodular(rng, 16);
    EXPECT_LE(at_step, oracle::tqm_surrogate(u, u0, inst.y, inst.s, 3) + 1e-9);
  }
}

TEST(ReducedSteps, FullLengthReducesToUnreduced) {
  const Instance inst = make_instance(8, 64, 5, 0.1, 0.1);
  RandomStream rng(207);
  const ComplexVector u = random_unimodular(rng, 64);
  const ProjectorB b = ProjectorB::build(inst.s, 5);
  const PctTransform t = pct(64, 64);
  EXPECT_LE((tqm_step_reduced(u, inst.y, b, t) - tqm_step(u, inst.y, b)).cwiseAbs().maxCoeff(),
            1e-14);
  EXPECT_LE((lqm_step_reduced(u, inst.y, b, t) - lqm_step(u, inst.y, b)).cwiseAbs().maxCoeff(),
            1e-14);
}

TEST(ReducedSteps, ConstantModulusLqmEqualsTqm) {
  RandomStream rng(208);
  const ComplexVector s = testing::random_complex(rng, 32);
  const ComplexVector y = 1.5 * random_unimodular(rng, 32);
  const ProjectorB b = ProjectorB::build(s, 4);
  const PctTransform t = pct(32, 32);
  const ComplexVector u = random_unimodular(rng, 32);
  EXPECT_LE((lqm_step_reduced(u, y, b, t) - tqm_step(u, y, b)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ReducedSteps, MatchDenseOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = make_instance(seed, 32, 5, 0.1, 0.1);
    RandomStream rng(seed, 16);
    const ComplexVector u = random_unimodular(rng, 8);
    const ProjectorB b = ProjectorB::build(inst.s, 5);
    const PctTransform t = pct(32, 8);
    EXPECT_LE((tqm_step_reduced(u, inst.y, b, t) -
               oracle::tqm_step_reduced_dense(u, inst.y, inst.s, 5, 8)).norm(),
              1e-10);
    EXPECT_LE((lqm_step_reduced(u, inst.y, b, t) -
               oracle::lqm_step_reduced_dense(u, inst.y, inst.s, 5, 8)).norm(),
              1e-10);
  }
}

TEST(ReducedSteps, BlockwiseTruthIsFixedPoint) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RandomStream rng(seed, 17);
    const RealVector theta = testing::blockwise_walk(rng, 256, 32, 0.2);
    const Instance inst = make_instance(seed, 256, 10, theta, 0.0);
    const ProjectorB b = ProjectorB::build(inst.s, 10);
    const PctTransform t = pct(256, 32);
    ComplexVector u(32);
    for (Index k = 0; k < 32; ++k) u[k] = std::polar(1.0, -theta[k * 8]);
    EXPECT_LE((tqm_step_reduced(u, inst.y, b, t) - u).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((lqm_step_reduced(u, inst.y, b, t) - u).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ReducedSteps, Descend) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance inst = make_instance(seed, 64, 5, 0.1, 0.1);
    RandomStream rng(seed, 18);
    const PctTransform t = pct(64, 8);
    const ProjectorB b = ProjectorB::build(inst.s, 5);
    const ComplexVector u = random_unimodular(rng, 8);
    const double before = objective(t.expand(u), inst.y, b);
    const double slack = 1e-12 * inst.y.squaredNorm();
    EXPECT_LE(objective(t.expand(tqm_step_reduced(u, inst.y, b, t)), inst.y, b), before + slack);
    EXPECT_LE(objective(t.expand(lqm_step_reduced(u, inst.y, b, t)), inst.y, b), before + slack);
  }
}

TEST(ReducedSteps, LqmReducedSurrogateDominates) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Instance inst = make_instance(seed, 32, 5, 0.2, 0.1);
    RandomStream rng(seed, 19);
    const ComplexVector u = random_unimodular(rng, 8);
    const ComplexVector u0 = random_unimodular(rng, 8);
    const ComplexMatrix t = oracle::pct_dense(32, 8);
    const double f = oracle::objective_dense(t * u, inst.y, inst.s, 5);
    EXPECT_GE(oracle::lqm_reduced_surrogate(u, u0, inst.y, inst.s, 5, 8) - f,
              -1e-10 * inst.y.squaredNorm());
    EXPECT_LE(relative_error(oracle::lqm_reduced_surrogate(u0, u0, inst.y, inst.s, 5, 8),
                             oracle::objective_dense(t * u0, inst.y, inst.s, 5)),
              1e-10);
  }
}

TEST(Steps, ZeroDirectionKeepsEntry) {
  // y_0 = 0 makes the first direction entry exactly zero for TQM.
  const Instance inst = make_instance(9, 32, 4, 0.1, 0.1);
  ComplexVector y = inst.y;
  y[0] = 0.0;
  const ProjectorB b = ProjectorB::build(inst.s, 4);
  RandomStream rng(209);
  const ComplexVector u = random_unimodular(rng, 32);
  const ComplexVector next = tqm_step(u, y, b);
  EXPECT_EQ(next[0], u[0]);
  EXPECT_LE(max_unimodular_deviation(next), 1e-12);
}

// ---------------------------------------------------------------------------
// Phase ambiguity and channel

TEST(PhaseAmbiguity, RotatesToOne) {
  const ComplexVector u = ComplexVector::Constant(8, std::polar(1.0, std::numbers::pi / 3.0));
  const ComplexVector out = remove_phase_ambiguity(u);
  EXPECT_EQ(out[0], Complex(1.0, 0.0));
  EXPECT_LE((out - ComplexVector::Ones(8)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PhaseAmbiguity, IdempotentAndObjectiveInvariant) {
  RandomStream rng(210);
  const Instance inst = make_instance(10, 64, 5, 0.1, 0.1);
  const ProjectorB b = ProjectorB::build(inst.s, 5);
  const ComplexVector u = random_unimodular(rng, 64);
  const ComplexVector once = remove_phase_ambiguity(u);
  EXPECT_EQ(remove_phase_ambiguity(once), once);
  EXPECT_LE(relative_error(objective(once, inst.y, b), objective(u, inst.y, b)), 1e-12);
}

TEST(ChannelEstimate, RecoversNoiselessTruth) {
  const Instance inst = make_instance(11, 256, 10, 0.05, 0.0);
  EXPECT_LE((channel_estimate(truth_u(inst.theta), inst.y, inst.s, 10) - inst.h).norm(), 1e-10);
  const Instance flat = make_instance(12, 64, 4, RealVector::Zero(64), 0.0);
  EXPECT_LE((channel_estimate(ComplexVector::Ones(64), flat.y, flat.s, 4) - flat.h).norm(), 1e-10);
}

TEST(ChannelEstimate, MatchesDenseNormalEquations) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = make_instance(seed, 32, 5, 0.1, 0.1);
    RandomStream rng(seed, 20);
    const ComplexVector u = random_unimodular(rng, 32);
    const ComplexVector expected = oracle::channel_estimate_dense(u, inst.y, inst.s, 5);
    EXPECT_LE((channel_estimate(u, inst.y, inst.s, 5) - expected).norm() / expected.norm(), 1e-10);
  }
}

// ---------------------------------------------------------------------------
// run_mm

TEST(RunMm, FlatNoiselessConvergesImmediately) {
  const Instance inst = make_instance(13, 128, 10, RealVector::Zero(128), 0.0);
  const ProjectorB b = ProjectorB::build(inst.s, 10);
  for (MajorizationVariant variant : {MajorizationVariant::kTight, MajorizationVariant::kLoose}) {
    MmConfig config;
    config.variant = variant;
    const EstimateResult result = run_mm(config, inst.y, b);
    EXPECT_EQ(result.iterations, 1);
    EXPECT_TRUE(result.converged);
    EXPECT_LE((result.u_star - ComplexVector::Ones(128)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(RunMm, TraceIsNonincreasingAndUnimodular) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Instance inst = make_instance(seed, 256, 10, 0.04, 0.05);
    const ProjectorB b = ProjectorB::build(inst.s, 10);
    for (MajorizationVariant variant : {MajorizationVariant::kTight, MajorizationVariant::kLoose}) {
      for (Index n : {256, 32}) {
        MmConfig config;
        config.variant = variant;
        config.max_iters = 300;
        if (n != 256) config.reduction = pct(256, n);
        const EstimateResult result = run_mm(config, inst.y, b);
        ASSERT_EQ(result.objective_trace.size(), static_cast<std::size_t>(result.iterations) + 1);
        ASSERT_EQ(result.step_norms.size(), static_cast<std::size_t>(result.iterations));
        const double slack = 1e-9 * result.objective_trace.front();
        for (std::size_t t = 1; t < result.objective_trace.size(); ++t) {
          EXPECT_LE(result.objective_trace[t], result.objective_trace[t - 1] + slack);
        }
        EXPECT_LE(max_unimodular_deviation(result.u_star), 1e-12);
        EXPECT_EQ(result.u_star[0], Complex(1.0, 0.0));
        EXPECT_EQ(result.h_hat.size(), 10);
        EXPECT_EQ(result.theta_hat.size(), 256);
      }
    }
  }
}

TEST(RunMm, TqmAndLqmReachTheSameOptimum) {
  int agree = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance inst = make_instance(seed, 64, 4, 0.04, 0.05);
    const ProjectorB b = ProjectorB::build(inst.s, 4);
    MmConfig tqm;
    tqm.max_iters = 100000;
    tqm.tolerance = 1e-11;
    MmConfig lqm = tqm;
    lqm.variant = MajorizationVariant::kLoose;
    const double a = run_mm(tqm, inst.y, b).objective_trace.back();
    const double c = run_mm(lqm, inst.y, b).objective_trace.back();
    if (relative_error(a, c) <= 1e-6) ++agree;
  }
  EXPECT_GE(agree, 9);
}

TEST(RunMm, ExactRecoveryFullAndReduced) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Instance full = make_instance(seed, 256, 10, 0.04, 0.0);
    const EstimateResult r = run_mm(MmConfig{}, full.y, ProjectorB::build(full.s, 10));
    EXPECT_LE(phase_mse(r.theta_hat, full.theta), 1e-12);
    EXPECT_LE(channel_mse(r.h_hat, full.h), 1e-12);

    RandomStream rng(seed, 21);
    const RealVector theta = testing::blockwise_walk(rng, 256, 32, 0.2);
    const Instance blocky = make_instance(seed, 256, 10, theta, 0.0);
    MmConfig config;
    config.reduction = pct(256, 32);
    const EstimateResult rr = run_mm(config, blocky.y, ProjectorB::build(blocky.s, 10));
    EXPECT_LE(phase_mse(rr.theta_hat, blocky.theta), 1e-12);
    EXPECT_LE(channel_mse(rr.h_hat, blocky.h), 1e-12);
  }
}

TEST(RunMm, MaxItersIsNotAnError) {
  const Instance inst = make_instance(14, 128, 10, 0.05, 0.1);
  MmConfig config;
  config.max_iters = 2;
  const EstimateResult result = run_mm(config, inst.y, ProjectorB::build(inst.s, 10));
  EXPECT_EQ(result.iterations, 2);
  EXPECT_FALSE(result.converged);
}

TEST(RunMm, WarmStartAtTruthConverges) {
  const Instance inst = make_instance(15, 128, 10, 0.05, 0.0);
  MmConfig config;
  config.initial = truth_u(inst.theta);
  const EstimateResult result = run_mm(config, inst.y, ProjectorB::build(inst.s, 10));
  EXPECT_EQ(result.iterations, 1);
}

TEST(RunMm, RejectsBadConfig) {
  const Instance inst = make_instance(16, 32, 4, 0.05, 0.1);
  const ProjectorB b = ProjectorB::build(inst.s, 4);
  MmConfig config;
  config.tolerance = 0.0;
  EXPECT_THROW(run_mm(config, inst.y, b), std::invalid_argument);
  config = MmConfig{};
  config.max_iters = 0;
  EXPECT_THROW(run_mm(config, inst.y, b), std::invalid_argument);
  config = MmConfig{};
  config.initial = ComplexVector::Ones(31);
  EXPECT_THROW(run_mm(config, inst.y, b), std::invalid_argument);
  config = MmConfig{};
  config.reduction = pct(64, 8);
  EXPECT_THROW(run_mm(config, inst.y, b), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// BIC and opt-PCT

TEST(Bic, Arithmetic) {
  EXPECT_NEAR(bic_score(2.0, 0.01, 32, 1024), 421.8071, 1e-3);
  EXPECT_DOUBLE_EQ(bic_score(0.0, 0.5, 16, 256), 16.0 * std::log(256.0));
  EXPECT_NEAR(bic_score(1.0, 0.1, 64, 1024) - bic_score(1.0, 0.1, 32, 1024),
              32.0 * std::log(1024.0), 1e-9);
  EXPECT_THROW(bic_score(1.0, 0.0, 32, 1024), std::invalid_argument);
  EXPECT_THROW(bic_score(1.0, -1.0, 32, 1024), std::invalid_argument);
}

TEST(Bic, PluginVariance) {
  EXPECT_DOUBLE_EQ(plugin_noise_variance(10.0, 32, 512, 10), 10.0 / (1024 - 20 - 32 + 1));
  EXPECT_THROW(plugin_noise_variance(1.0, 8, 4, 1), std::invalid_argument);
}

TEST(OptPct, DefaultCandidates) {
  const std::vector<Index> expected = {32, 64, 128, 256, 512};
  EXPECT_EQ(default_pct_candidates(512), expected);
  EXPECT_EQ(default_pct_candidates(16), std::vector<Index>{16});
}

TEST(OptPct, SingleCandidateMatchesRunMm) {
  const Instance inst = make_instance(17, 256, 10, 0.04, 0.05);
  const ProjectorB b = ProjectorB::build(inst.s, 10);
  MmConfig config;
  config.reduction = pct(256, 64);
  const EstimateResult direct = run_mm(config, inst.y, b);
  const EstimateResult opt = opt_pct_estimate(inst.y, b, 0.0025, {64}, MmConfig{});
  EXPECT_EQ(opt.selected_n, std::optional<Index>(64));
  EXPECT_EQ(opt.u_star, direct.u_star);
  EXPECT_EQ(opt.iterations, direct.iterations);
  ASSERT_TRUE(opt.bic.has_value());
  EXPECT_DOUBLE_EQ(*opt.bic, bic_score(objective(direct.u_star, inst.y, b), 0.0025, 64, 256));
}

TEST(OptPct, FullCandidateEqualsUnreducedTqm) {
  const Instance inst = make_instance(18, 128, 10, 0.04, 0.05);
  const ProjectorB b = ProjectorB::build(inst.s, 10);
  const EstimateResult direct = run_mm(MmConfig{}, inst.y, b);
  const EstimateResult opt = opt_pct_estimate(inst.y, b, 0.0025, {128}, MmConfig{});
  EXPECT_EQ(opt.u_star, direct.u_star);
}

TEST(OptPct, PrefersCoarseModelThatFitsExactly) {
  RandomStream rng(211);
  const RealVector theta = testing::blockwise_walk(rng, 512, 32, 0.2);
  const Instance inst = make_instance(19, 512, 10, theta, 0.0);
  const ProjectorB b = ProjectorB::build(inst.s, 10);
  const double sigma_sq = 1e-6;
  const EstimateResult opt = opt_pct_estimate(inst.y, b, sigma_sq, {32, 64}, MmConfig{});
  EXPECT_EQ(opt.selected_n, std::optional<Index>(32));

  MmConfig c32;
  c32.reduction = pct(512, 32);
  MmConfig c64;
  c64.reduction = pct(512, 64);
  const double bic32 = bic_score(objective(run_mm(c32, inst.y, b).u_star, inst.y, b), sigma_sq, 32, 512);
  const double bic64 = bic_score(objective(run_mm(c64, inst.y, b).u_star, inst.y, b), sigma_sq, 64, 512);
  EXPECT_LT(bic32, bic64);
}

TEST(OptPct, PluginVarianceRuns) {
  const Instance inst = make_instance(20, 256, 10, 0.04, 0.05);
  const ProjectorB b = ProjectorB::build(inst.s, 10);
  const EstimateResult opt = opt_pct_estimate(inst.y, b, 0.0, default_pct_candidates(256),
                                              MmConfig{}, OptPctOptions{NoiseVariance::kPlugin});
  ASSERT_TRUE(opt.selected_n.has_value());
  EXPECT_EQ(256 % *opt.selected_n, 0);
}

TEST(OptPct, RejectsBadInput) {
  const Instance inst = make_instance(21, 64, 4, 0.04, 0.05);
  const ProjectorB b = ProjectorB::build(inst.s, 4);
  EXPECT_THROW(opt_pct_estimate(inst.y, b, 0.01, {}, MmConfig{}), std::invalid_argument);
  EXPECT_THROW(opt_pct_estimate(inst.y, b, 0.01, {48}, MmConfig{}), std::invalid_argument);
  EXPECT_THROW(opt_pct_estimate(inst.y, b, 0.0, {32}, MmConfig{}), std::invalid_argument);
}

}  // namespace
}  // namespace pnest
