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

#include "tbepp/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "tbepp/protocol.hpp"

using namespace tbepp;

namespace {

const Mode A("A"), B("B");

// Polarization Bell state on A,B times (|SS> + sign |LL>)/sqrt2.
PureState hyper(BellKind kind, int sign = 1) {
    auto pol = bell_state(kind, {A, B});
    std::vector<PureState::Term> terms;
    for (const auto &t : pol.terms()) {
        for (int d : {0, 1}) {
            BasisKet k = t.ket;
            k[0].delay = d;
            k[1].delay = d;
            terms.push_back({k, t.amp * std::numbers::sqrt2 / 2.0 * (d == 1 ? double(sign) : 1.0)});
        }
    }
    return PureState::from_terms(std::move(terms));
}

NoiseParams params(double F, double a, double b, double c) {
    NoiseParams p;
    p.F = F;
    p.a = a;
    p.b = b;
    p.c = c;
    return p;
}

}  // namespace

TEST(NoiseParams, Validation) {
    EXPECT_NO_THROW(params(1, 0, 0, 0).validate());
    EXPECT_NO_THROW(params(0.4, 0.3, 0.2, 0.1).validate());
    EXPECT_THROW(params(0.7, 0.7, 0, 0).validate(), std::invalid_argument);
    EXPECT_THROW(params(1.1, -0.1, 0, 0).validate(), std::invalid_argument);
    EXPECT_THROW(params(std::nan(""), 0, 0, 0).validate(), std::invalid_argument);
    try {
        params(1.0, -0.1, 0.1, 0).validate();
        FAIL();
    } catch (const std::invalid_argument &e) {
        EXPECT_NE(std::string(e.what()).find('a'), std::string::npos);
    }
}

TEST(BellComponent, PaulisOnSecondPhotonGenerateBellBasis) {
    auto phi = bell_state(BellKind::PhiPlus, {A, B});
    for (BellKind k : kBellKinds) {
        EXPECT_NEAR(fidelity(apply_bell_component(phi, k), bell_state(k, {A, B})), 1.0, 1e-12) << to_string(k);
    }
}

TEST(BellDiagonal, NoiselessIsIdentity) {
    auto in = Ensemble::pure(hyper(BellKind::PhiPlus));
    auto out = bell_diagonal_channel(in, params(1, 0, 0, 0));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_NEAR(fidelity(out.components()[0].state, hyper(BellKind::PhiPlus)), 1.0, 1e-12);
}

TEST(BellDiagonal, SplitsIntoFourBellComponents) {
    auto p = params(0.4, 0.3, 0.2, 0.1);
    auto out = bell_diagonal_channel(Ensemble::pure(hyper(BellKind::PhiPlus)), p);
    ASSERT_EQ(out.size(), 4u);
    EXPECT_NEAR(out.total_weight(), 1.0, 1e-12);
    for (BellKind k : kBellKinds) {
        double w = 0.0;
        for (const auto &c : out.components()) w += c.weight * fidelity(c.state, hyper(k));
        EXPECT_NEAR(w, p.weight(k), 1e-12) << to_string(k);
    }
    EXPECT_NEAR(ensemble_fidelity(out, hyper(BellKind::PhiPlus)), 0.4, 1e-12);
}

TEST(BellDiagonal, NeverTouchesModesOrDelays) {
    auto in = Ensemble::pure(branch_state(Branch::a2b1()));
    auto out = bell_diagonal_channel(in, params(0.25, 0.25, 0.25, 0.25));
    std::set<std::pair<std::string, int>> before, after;
    for (const auto &t : in.components()[0].state.terms())
        for (const auto &ph : t.ket.photons) before.insert({ph.mode.label(), ph.delay});
    for (const auto &c : out.components())
        for (const auto &t : c.state.terms())
            for (const auto &ph : t.ket.photons) after.insert({ph.mode.label(), ph.delay});
    EXPECT_EQ(before, after);
}

TEST(BellDiagonal, DropsZeroWeightComponents) {
    auto out = bell_diagonal_channel(Ensemble::pure(hyper(BellKind::PhiPlus)), params(0.5, 0, 0.5, 0));
    EXPECT_EQ(out.size(), 2u);
    EXPECT_NEAR(out.total_weight(), 1.0, 1e-12);
}

TEST(BellDiagonal, RejectsInvalidParams) {
    EXPECT_THROW(bell_diagonal_channel(Ensemble::pure(hyper(BellKind::PhiPlus)), params(0.7, 0.7, 0, 0)),
                 std::invalid_argument);
}

TEST(BellFrame, IsUnitary) {
    const auto &w = bell_frame();
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            Amplitude s = 0.0;
            for (int k = 0; k < 4; ++k) s += std::conj(w[k][i]) * w[k][j];
            EXPECT_NEAR(std::abs(s - (i == j ? 1.0 : 0.0)), 0.0, 1e-15);
        }
    }
}

TEST(NoisyFiber, ProductSourceBecomesBellDiagonalMixture) {
    auto p = params(0.55, 0.2, 0.15, 0.1);
    auto out = noisy_fiber_channel(Ensemble::pure(encode_source_pair()), p);
    EXPECT_NEAR(out.total_weight(), 1.0, 1e-12);
    for (BellKind k : kBellKinds) {
        EXPECT_NEAR(ensemble_fidelity(out, hyper(k)), p.weight(k), 1e-12) << to_string(k);
        EXPECT_NEAR(fidelity(noisy_fiber_component(encode_source_pair(), k), hyper(k)), 1.0, 1e-12);
    }
}

TEST(CollectivePhase, IsGlobalPhaseOnTimeBinPair) {
    auto in = encode_source_pair();
    auto out = collective_phase_channel(in, {{A, 0.7}, {B, 1.1}});
    Amplitude ratio = inner_product(in, out);
    EXPECT_NEAR(std::abs(ratio - std::polar(1.0, 1.8)), 0.0, 1e-12);
    EXPECT_NEAR(fidelity(out, in), 1.0, 1e-12);
}

TEST(CollectivePhase, ZeroPhasesAreIdentity) {
    auto in = branch_state(Branch::a1b2());
    auto out = collective_phase_channel(in, {});
    EXPECT_NEAR(std::abs(inner_product(in, out) - 1.0), 0.0, 1e-15);
}

TEST(CollectivePhase, RandomDrawsPreserveFidelity) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> theta(0.0, 2.0 * std::numbers::pi);
    auto in = hyper(BellKind::PsiPlus);
    auto target = hyper(BellKind::PsiPlus);
    auto other = hyper(BellKind::PsiPlus, -1);
    for (int i = 0; i < 100; ++i) {
        auto out = collective_phase_channel(in, {{A, theta(rng)}, {B, theta(rng)}});
        EXPECT_NEAR(fidelity(out, target), 1.0, 1e-12);
        EXPECT_NEAR(fidelity(out, other), 0.0, 1e-12);
    }
}

TEST(CollectivePhase, EnsembleWeightsUnchanged) {
    auto e = noisy_fiber_channel(Ensemble::pure(encode_source_pair()), params(0.4, 0.3, 0.2, 0.1));
    auto out = collective_phase_channel(e, {{A, 0.3}, {B, 2.9}});
    ASSERT_EQ(out.size(), e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        EXPECT_EQ(out.components()[i].weight, e.components()[i].weight);
        EXPECT_NEAR(fidelity(out.components()[i].state, e.components()[i].state), 1.0, 1e-12);
    }
}

TEST(TimebinDephasing, ZeroIsIdentity) {
    auto in = encode_source_pair();
    EXPECT_NEAR(std::abs(inner_product(in, timebin_dephasing(in, 0.0)) - 1.0), 0.0, 1e-15);
}

TEST(TimebinDephasing, PiMakesOrthogonalTimeBinState) {
    auto in = encode_source_pair();
    auto out = timebin_dephasing(in, std::numbers::pi);
    EXPECT_NEAR(fidelity(out, in), 0.0, 1e-12);
    auto hh_minus = PureState::from_terms({{out.terms()[0].ket, std::numbers::sqrt2 / 2.0},
                                           {out.terms()[1].ket, -std::numbers::sqrt2 / 2.0}});
    EXPECT_NEAR(fidelity(out, hh_minus), 1.0, 1e-12);
}

TEST(TimebinDephasing, OverlapIsCosineSquared) {
    auto in = encode_source_pair();
    for (double phi : {0.1, 0.5, 1.0, 2.0, 3.0}) {
        double want = std::pow(std::cos(phi / 2.0), 2);
        EXPECT_NEAR(fidelity(timebin_dephasing(in, phi), in), want, 1e-12) << phi;
    }
}

TEST(Registry, HasNoTimeBinBitFlip) {
    auto names = channel_registry();
    EXPECT_EQ(names.size(), 4u);
    for (auto n : names) {
        EXPECT_EQ(n.find("bit"), std::string_view::npos) << n;
        EXPECT_EQ(n.find("flip"), std::string_view::npos) << n;
    }
    EXPECT_NE(std::find(names.begin(), names.end(), "collective_phase"), names.end());
}
