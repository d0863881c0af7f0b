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

#include "tbepp/optics.hpp"

#include <cmath>
#include <numbers>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "tbepp/errors.hpp"
#include "tbepp/protocol.hpp"

using namespace tbepp;

namespace {

constexpr auto H = Polarization::H;
constexpr auto V = Polarization::V;
const double kR = std::numbers::sqrt2 / 2.0;

PureState one(const char *mode, Polarization p, int d = 0) {
    return PureState::basis(BasisKet{{{Mode(mode), p, d}}});
}

PureState sum1(const char *m1, Polarization p1, int d1, const char *m2, Polarization p2, int d2,
               Amplitude c2 = 1.0) {
    return PureState::normalized({{BasisKet{{{Mode(m1), p1, d1}}}, 1.0}, {BasisKet{{{Mode(m2), p2, d2}}}, c2}});
}

void expect_same(const PureState &got, const PureState &want) {
    ASSERT_EQ(got.size(), want.size()) << got.str() << " vs " << want.str();
    for (const auto &t : want.terms()) {
        EXPECT_NEAR(std::abs(got.amplitude(t.ket) - t.amp), 0.0, 1e-12) << to_string(t.ket);
    }
}

// Random one- or two-photon state over modes x,y with small delays.
PureState random_state(std::mt19937_64 &rng, bool two) {
    std::normal_distribution<double> g;
    const char *modes[] = {"x", "y"};
    std::vector<PureState::Term> terms;
    for (int i = 0; i < 6; ++i) {
        BasisKet k;
        int m = static_cast<int>(rng() % 2);
        k.photons.push_back({Mode(modes[m]), static_cast<Polarization>(rng() % 2), static_cast<int>(rng() % 3)});
        if (two) {
            k.photons.push_back({Mode(modes[1 - m]), static_cast<Polarization>(rng() % 2),
                                 static_cast<int>(rng() % 3)});
        }
        terms.push_back({k, {g(rng), g(rng)}});
    }
    return PureState::normalized(std::move(terms));
}

PureState superpose(const PureState &s, Amplitude alpha, const PureState &t, Amplitude beta) {
    std::vector<PureState::Term> terms;
    for (const auto &x : s.terms()) terms.push_back({x.ket, alpha * x.amp});
    for (const auto &x : t.terms()) terms.push_back({x.ket, beta * x.amp});
    return PureState::normalized(std::move(terms));
}

double raw_norm(const PureState &s, Amplitude alpha, const PureState &t, Amplitude beta) {
    std::vector<PureState::Term> terms;
    for (const auto &x : s.terms()) terms.push_back({x.ket, alpha * x.amp});
    for (const auto &x : t.terms()) terms.push_back({x.ket, beta * x.amp});
    double n = 0.0;
    std::map<BasisKet, Amplitude> acc;
    for (const auto &x : terms) acc[x.ket] += x.amp;
    for (const auto &[k, a] : acc) n += std::norm(a);
    return std::sqrt(n);
}

}  // namespace

TEST(Pbs, TransmitsHorizontal) {
    expect_same(apply_pbs(one("a1", H), Mode("a1"), Mode("c1"), Mode("d1")), one("c1", H));
}

TEST(Pbs, ReflectsVertical) {
    expect_same(apply_pbs(one("a1", V), Mode("a1"), Mode("c1"), Mode("d1")), one("d1", V));
}

TEST(Pbs, SplitsDiagonal) {
    auto out = apply_pbs(sum1("a1", H, 0, "a1", V, 0), Mode("a1"), Mode("c1"), Mode("d1"));
    expect_same(out, sum1("c1", H, 0, "d1", V, 0));
    EXPECT_NEAR(out.norm_squared(), 1.0, 1e-12);
}

TEST(Pbs, CollisionWithOccupiedModeIsRejected) {
    auto s = tensor(one("a1", H), one("c1", H));
    EXPECT_THROW(apply_pbs(s, Mode("a1"), Mode("c1"), Mode("d1")), std::invalid_argument);
}

TEST(Hwp, FlipsVerticalToHorizontal) {
    expect_same(apply_hwp(one("d2", V), Mode("d2")), one("d2", H));
}

TEST(Hwp, IsAnInvolution) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        auto s = random_state(rng, true);
        expect_same(apply_hwp(apply_hwp(s, Mode("x")), Mode("x")), s);
    }
}

TEST(Hwp, ActsOnlyOnItsMode) {
    auto s = tensor(one("x", H), one("y", V));
    expect_same(apply_hwp(s, Mode("x")), tensor(one("x", V), one("y", V)));
}

TEST(Hwp, EmptyModeIsIdentity) {
    auto s = one("x", H);
    expect_same(apply_hwp(s, Mode("z")), s);
}

TEST(BeamSplitter, RealHadamardConvention) {
    const Mode i1("i1"), i2("i2"), o1("o1"), o2("o2");
    expect_same(apply_bs(one("i1", H), i1, i2, o1, o2), sum1("o1", H, 0, "o2", H, 0));
    expect_same(apply_bs(one("i2", H), i1, i2, o1, o2), sum1("o1", H, 0, "o2", H, 0, -1.0));
}

TEST(BeamSplitter, IsBalanced) {
    auto out = apply_bs(one("i1", V, 2), Mode("i1"), Mode("i2"), Mode("o1"), Mode("o2"));
    for (const char *port : {"o1", "o2"}) {
        std::vector<Mode> at{Mode(port)};
        EXPECT_NEAR(project_modes(out, at).probability, 0.5, 1e-12);
    }
}

TEST(BeamSplitter, SquaresToIdentityOnBasis) {
    const Mode x("x"), y("y");
    for (const char *m : {"x", "y"}) {
        for (Polarization p : {H, V}) {
            for (int d : {0, 1}) {
                auto s = one(m, p, d);
                expect_same(apply_bs(apply_bs(s, x, y, x, y), x, y, x, y), s);
            }
        }
    }
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20; ++i) {
        auto s = random_state(rng, false);
        expect_same(apply_bs(apply_bs(s, x, y, x, y), x, y, x, y), s);
    }
}

TEST(Delay, AddsToDelay) {
    expect_same(apply_delay(one("x", H), Mode("x"), 1), one("x", H, 1));
    expect_same(apply_delay(one("x", H), Mode("x"), 0), one("x", H));
    expect_same(apply_delay(apply_delay(one("x", V), Mode("x"), 1), Mode("x"), 1), one("x", V, 2));
}

TEST(PolDelay, RestoresTemporalIndistinguishability) {
    auto s = sum1("x", H, 1, "x", V, 0);
    expect_same(apply_pol_delay(s, Mode("x"), 0, 1), sum1("x", H, 1, "x", V, 1));
    expect_same(apply_pol_delay(s, Mode("x"), 0, 0), s);
    expect_same(apply_pol_delay(one("x", H), Mode("x"), 2, 5), one("x", H, 2));
}

TEST(Pockels, FlipsOnlyGatedBin) {
    auto s = sum1("x", H, 0, "x", H, 1);
    expect_same(apply_pockels(s, Mode("x"), 0), sum1("x", V, 0, "x", H, 1));
    expect_same(apply_pockels(s, Mode("x"), 7), s);
    expect_same(apply_pockels(apply_pockels(s, Mode("x"), 1), Mode("x"), 1), s);
}

TEST(Route, RelabelsMode) {
    expect_same(apply_route(one("x", V, 3), Mode("x"), Mode("D1")), one("D1", V, 3));
}

TEST(PhaseFlip, NegatesVertical) {
    expect_same(apply_phase_flip(sum1("x", H, 0, "x", V, 0), Mode("x")), sum1("x", H, 0, "x", V, 0, -1.0));
}

TEST(Elements, PreserveNormAndLinearity) {
    const Mode x("x"), y("y"), u("u"), w("w");
    std::vector<Element> elements{Pbs{x, u, w},      Hwp{x},           BeamSplitter{x, y, u, w},
                                  Delay{x, 2},       PolDelay{y, 1, 3}, Pockels{x, 1},
                                  Route{y, u}};
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    for (const auto &e : elements) {
        for (int i = 0; i < 25; ++i) {
            auto s = random_state(rng, false);
            auto t = random_state(rng, false);
            Amplitude alpha{g(rng), g(rng)}, beta{g(rng), g(rng)};
            double n = raw_norm(s, alpha, t, beta);
            if (n < 1e-6) continue;
            EXPECT_NEAR(apply_element(s, e).norm_squared(), 1.0, 1e-12) << to_string(kind(e));
            auto lhs = apply_element(superpose(s, alpha, t, beta), e);
            auto rhs = superpose(apply_element(s, e), alpha, apply_element(t, e), beta);
            double rhs_n = raw_norm(apply_element(s, e), alpha, apply_element(t, e), beta);
            EXPECT_NEAR(rhs_n, n, 1e-12) << to_string(kind(e));
            expect_same(lhs, rhs);
        }
    }
}

TEST(Circuit, RejectsUndeclaredModes) {
    Circuit c({Mode("x")});
    EXPECT_THROW(c.add(Hwp{Mode("y")}), std::invalid_argument);
    EXPECT_NO_THROW(c.add(Hwp{Mode("x")}));
}

TEST(Circuit, RejectsNegativeDelays) {
    Circuit c({Mode("x")});
    EXPECT_THROW(c.add(Delay{Mode("x"), -1}), std::invalid_argument);
    EXPECT_THROW(c.add(PolDelay{Mode("x"), 0, -2}), std::invalid_argument);
    EXPECT_THROW(c.add(Pockels{Mode("x"), -1}), std::invalid_argument);
}

TEST(Circuit, EmptyCircuitIsIdentity) {
    auto s = bell_state(BellKind::PsiMinus, {Mode("x"), Mode("y")});
    expect_same(apply_circuit(s, Circuit({Mode("x"), Mode("y")})), s);
}

TEST(Circuit, StateOutsideModeSetIsRejected) {
    EXPECT_THROW(apply_circuit(one("q", H), Circuit({Mode("x")})), std::invalid_argument);
}

TEST(Circuit, MisuseCarriesElementIndex) {
    Circuit c({Mode("x"), Mode("y"), Mode("z")});
    c.add(Hwp{Mode("x")}).add(Delay{Mode("y"), 1}).add(Route{Mode("x"), Mode("y")});
    try {
        apply_circuit(tensor(one("x", H), one("y", H)), c);
        FAIL() << "collision not detected";
    } catch (const ElementError &e) {
        EXPECT_EQ(e.index(), 2u);
    }
}

TEST(Circuit, AppliesInOrder) {
    Circuit c({Mode("x")});
    c.add(Pockels{Mode("x"), 0}).add(Delay{Mode("x"), 1});
    expect_same(apply_circuit(one("x", H), c), one("x", V, 1));
    Circuit r({Mode("x")});
    r.add(Delay{Mode("x"), 1}).add(Pockels{Mode("x"), 0});
    expect_same(apply_circuit(one("x", H), r), one("x", H, 1));
}

TEST(Encoder, ProducesFourSignedBranches) {
    auto out = apply_circuit(polarization_source(2), encoder_circuit(2));
    EXPECT_EQ(out.size(), 8u);
    const double q = 1.0 / (2.0 * std::numbers::sqrt2);
    for (const auto &t : out.terms()) {
        EXPECT_NEAR(std::abs(t.amp), q, 1e-12);
        bool late = t.ket[0].delay == 1;
        bool cross = t.ket[0].mode.label()[0] != t.ket[1].mode.label()[0];
        EXPECT_EQ(t.ket[0].delay, t.ket[1].delay);
        EXPECT_EQ(t.ket[0].pol, H);
        EXPECT_EQ(t.ket[1].pol, H);
        double expected = (late && cross) ? -q : q;
        EXPECT_NEAR(std::abs(t.amp - expected), 0.0, 1e-12) << to_string(t.ket);
    }
}

TEST(Encoder, OppositeArmWiringMovesSignToEarlyBin) {
    // Swap which arm enters which BS port; the minus sign moves from |LL> onto |SS>.
    Circuit c;
    for (const char *m : {"A", "B", "A.S", "A.L", "B.S", "B.L", "a1", "b1", "a2", "b2"}) c.declare(Mode(m));
    for (int k = 0; k < 2; ++k) {
        std::string x(1, static_cast<char>('A' + k));
        Mode src(x), s(x + ".S"), l(x + ".L");
        std::string idx = std::to_string(k + 1);
        c.add(Pbs{src, s, l}).add(Hwp{l}).add(Delay{l, 1}).add(BeamSplitter{l, s, Mode("a" + idx), Mode("b" + idx)});
    }
    auto out = apply_circuit(polarization_source(2), c);
    for (const auto &t : out.terms()) {
        bool late = t.ket[0].delay == 1;
        bool cross = t.ket[0].mode.label()[0] != t.ket[1].mode.label()[0];
        EXPECT_EQ(t.amp.real() < 0, cross && !late) << to_string(t.ket);
    }
}

TEST(Purifier, BranchA1A2HeraldsPhiPlusAtCommonDelay) {
    auto in = branch_state(Branch::a1a2());
    auto out = apply_circuit(in, build_purifier(Branch::a1a2()));
    auto want = PureState::from_terms({{BasisKet{{{Mode("D1"), H, 1}, {Mode("D2"), H, 1}}}, kR},
                                       {BasisKet{{{Mode("D1"), V, 1}, {Mode("D2"), V, 1}}}, kR}});
    expect_same(canonical_phase(out), want);
}
