// Copyright 2026 The tbepp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tbepp/experiment.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "tbepp/errors.hpp"

using namespace tbepp;

namespace {

ExperimentConfig config(double F, double a, double b, double c, std::uint64_t trials = 2000) {
    ExperimentConfig cfg;
    cfg.noise.F = F;
    cfg.noise.a = a;
    cfg.noise.b = b;
    cfg.noise.c = c;
    cfg.trials = trials;
    cfg.seed = 42;
    return cfg;
}

void expect_identical(const Report &x, const Report &y) {
    EXPECT_EQ(x.trials, y.trials);
    EXPECT_EQ(x.success_probability, y.success_probability);
    EXPECT_EQ(x.mean_corrected_fidelity, y.mean_corrected_fidelity);
    EXPECT_EQ(x.pattern_counts, y.pattern_counts);
    EXPECT_EQ(x.branch_counts, y.branch_counts);
}

}  // namespace

TEST(TrialRng, DependsOnlyOnSeedAndIndex) {
    TrialRng a(5, 17), b(5, 17), c(5, 18), d(6, 17);
    auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
    EXPECT_NE(x, d.next());
}

TEST(TrialRng, UniformIsInUnitInterval) {
    TrialRng r(1, 0);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 100000, 0.5, 0.01);
}

TEST(TrialRng, CategoricalNeverDrawsZeroWeight) {
    TrialRng r(9, 3);
    std::vector<double> w{0.0, 0.3, 0.0, 0.7, 0.0};
    std::vector<int> counts(w.size());
    for (int i = 0; i < 20000; ++i) ++counts[r.categorical(w)];
    EXPECT_EQ(counts[0], 0);
    EXPECT_EQ(counts[2], 0);
    EXPECT_EQ(counts[4], 0);
    EXPECT_NEAR(counts[3] / 20000.0, 0.7, 0.02);
    std::vector<double> none{0.0, 0.0};
    EXPECT_THROW(r.categorical(none), std::invalid_argument);
}

TEST(ExperimentConfig, Validation) {
    EXPECT_NO_THROW(config(1, 0, 0, 0).validate());
    EXPECT_THROW(config(0.7, 0.7, 0, 0).validate(), ConfigError);
    EXPECT_THROW(config(1, 0, 0, 0, 0).validate(), ConfigError);
    auto cfg = config(1, 0, 0, 0);
    cfg.parties = 1;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.parties = 3;
    cfg.branch = Branch::a1b2();
    try {
        cfg.validate();
        FAIL();
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find("branch"), std::string::npos);
    }
}

TEST(Experiment, NoiselessTrialHasFidelityOne) {
    Experiment exp(config(1, 0, 0, 0, 10));
    for (std::uint64_t i = 0; i < 10; ++i) {
        auto r = exp.run_trial(i);
        EXPECT_TRUE(r.success);
        EXPECT_EQ(r.input_component, BellKind::PhiPlus);
        EXPECT_EQ(r.common_delay, 1);
        EXPECT_NEAR(r.corrected_fidelity, 1.0, 1e-12);
    }
}

TEST(Experiment, UniformBellMixtureIsPurifiedDeterministically) {
    auto rep = run_experiment(config(0.25, 0.25, 0.25, 0.25, 10000));
    EXPECT_NEAR(rep.success_probability, 1.0, 1e-12);
    EXPECT_NEAR(rep.mean_corrected_fidelity, 1.0, 1e-12);
    ASSERT_EQ(rep.pattern_counts.size(), 4u);
    std::uint64_t total = 0;
    for (const auto &[k, v] : rep.pattern_counts) {
        EXPECT_GT(v, 0u) << k;
        total += v;
    }
    EXPECT_EQ(total, 10000u);
    ASSERT_EQ(rep.branch_counts.size(), 4u);
    for (const auto &[k, v] : rep.branch_counts) EXPECT_NEAR(v / 10000.0, 0.25, 0.03) << k;
}

TEST(Experiment, NoiselessRunNeverUsesCrossPatterns) {
    auto rep = run_experiment(config(1, 0, 0, 0, 500));
    EXPECT_EQ(rep.pattern_counts.at("D1D4"), 0u);
    EXPECT_EQ(rep.pattern_counts.at("D2D3"), 0u);
    EXPECT_EQ(rep.pattern_counts.at("D1D2") + rep.pattern_counts.at("D3D4"), 500u);
}

TEST(Experiment, FixedBranchIsHonoured) {
    auto cfg = config(0.4, 0.3, 0.2, 0.1, 300);
    cfg.branch = Branch::a2b1();
    auto rep = run_experiment(cfg);
    EXPECT_EQ(rep.branch_counts.at("a2b1"), 300u);
    EXPECT_EQ(rep.branch_counts.at("a1a2"), 0u);
    EXPECT_NEAR(rep.mean_corrected_fidelity, 1.0, 1e-12);
}

TEST(Experiment, SameSeedSameReport) {
    auto cfg = config(0.4, 0.3, 0.2, 0.1, 3000);
    cfg.theta_dist = ThetaDistribution::Uniform;
    expect_identical(run_experiment(cfg), run_experiment(cfg));
}

TEST(Experiment, ThreadCountDoesNotChangeReport) {
    auto cfg = config(0.4, 0.3, 0.2, 0.1, 3001);
    cfg.noise.dephasing = 0.9;
    auto one = run_experiment(cfg, 1);
    for (unsigned t : {2u, 3u, 8u}) expect_identical(one, run_experiment(cfg, t));
}

TEST(Experiment, DifferentSeedsDiffer) {
    auto cfg = config(0.4, 0.3, 0.2, 0.1, 3000);
    auto x = run_experiment(cfg);
    cfg.seed = 43;
    EXPECT_NE(x.pattern_counts, run_experiment(cfg).pattern_counts);
}

TEST(Experiment, CollectivePhaseLeavesFidelityUntouched) {
    auto cfg = config(0.4, 0.3, 0.2, 0.1, 2000);
    auto zero = run_experiment(cfg);
    cfg.theta_dist = ThetaDistribution::Uniform;
    auto uniform = run_experiment(cfg);
    EXPECT_NEAR(uniform.mean_corrected_fidelity, zero.mean_corrected_fidelity, 1e-12);
    EXPECT_EQ(uniform.success_probability, zero.success_probability);
}

TEST(Experiment, DephasingLowersFidelityToOracleValues) {
    // Reference values from the density-matrix oracle.
    const std::pair<double, double> cases[] = {
        {std::numbers::pi, 0.0}, {std::numbers::pi / 2, 0.5}, {std::numbers::pi / 3, 0.75}};
    for (auto [phi, want] : cases) {
        auto cfg = config(0.4, 0.3, 0.2, 0.1, 400);
        cfg.noise.dephasing = phi;
        auto rep = run_experiment(cfg);
        EXPECT_NEAR(rep.success_probability, 1.0, 1e-12);
        EXPECT_NEAR(rep.mean_corrected_fidelity, want, 1e-10) << phi;
    }
}

TEST(Experiment, GhzRunsForSeveralParties) {
    for (int n = 3; n <= 6; ++n) {
        auto cfg = config(0.4, 0.3, 0.2, 0.1, 200);
        cfg.parties = n;
        auto rep = run_experiment(cfg);
        EXPECT_NEAR(rep.success_probability, 1.0, 1e-12);
        EXPECT_NEAR(rep.mean_corrected_fidelity, 1.0, 1e-12);
        EXPECT_EQ(rep.branch_counts.size(), std::size_t{1} << n);
        EXPECT_EQ(rep.pattern_counts.size(), std::size_t{1} << n);
    }
}
