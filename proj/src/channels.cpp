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

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tbepp {
namespace {

// Single-photon operator in the (H, V) basis, lifted to act on the second photon.
PairOperator on_second(const std::array<std::array<Amplitude, 2>, 2> &op) {
    PairOperator out{};
    for (int a = 0; a < 2; ++a) {
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) out[2 * a + r][2 * a + c] = op[r][c];
        }
    }
    return out;
}

const PairOperator &pauli_for(BellKind kind) {
    static const PairOperator identity = on_second({{{1, 0}, {0, 1}}});
    static const PairOperator z = on_second({{{1, 0}, {0, -1}}});
    static const PairOperator x = on_second({{{0, 1}, {1, 0}}});
    static const PairOperator xz = on_second({{{0, -1}, {1, 0}}});
    switch (kind) {
        case BellKind::PhiPlus: return identity;
        case BellKind::PhiMinus: return z;
        case BellKind::PsiPlus: return x;
        case BellKind::PsiMinus: return xz;
    }
    throw std::logic_error("unknown Bell kind");
}

void check_probability(double v, const char *name) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0 + kTolerance) {
        throw std::invalid_argument(std::string("noise.") + name + " must be a probability in [0, 1], got " +
                                    std::to_string(v));
    }
}

template <class F>
Ensemble map_components(const Ensemble &e, F f) {
    std::vector<Ensemble::Component> out;
    out.reserve(e.size());
    for (const auto &c : e.components()) out.push_back({c.weight, f(c.state)});
    return Ensemble(std::move(out));
}

}  // namespace

void NoiseParams::validate() const {
    check_probability(F, "F");
    check_probability(a, "a");
    check_probability(b, "b");
    check_probability(c, "c");
    double sum = F + a + b + c;
    if (std::abs(sum - 1.0) > kTolerance) {
        throw std::invalid_argument("noise: F + a + b + c must equal 1, got " + std::to_string(sum));
    }
    for (double t : {theta_A, theta_B, dephasing}) {
        if (!std::isfinite(t)) throw std::invalid_argument("noise: phases must be finite");
    }
}

double NoiseParams::weight(BellKind kind) const {
    switch (kind) {
        case BellKind::PhiPlus: return F;
        case BellKind::PhiMinus: return a;
        case BellKind::PsiPlus: return b;
        case BellKind::PsiMinus: return c;
    }
    return 0.0;
}

PureState apply_pair_polarization(const PureState &s, PhotonPair pair, const PairOperator &op) {
    if (pair.first == pair.second || pair.first >= s.photon_count() || pair.second >= s.photon_count()) {
        throw std::invalid_argument("photon pair (" + std::to_string(pair.first) + ", " + std::to_string(pair.second) +
                                    ") is not valid for a " + std::to_string(s.photon_count()) + "-photon state");
    }
    auto bit = [](Polarization p) { return p == Polarization::H ? 0 : 1; };
    auto pol = [](int b) { return b == 0 ? Polarization::H : Polarization::V; };
    std::vector<PureState::Term> terms;
    terms.reserve(s.size() * 4);
    for (const auto &t : s.terms()) {
        int col = 2 * bit(t.ket[pair.first].pol) + bit(t.ket[pair.second].pol);
        for (int row = 0; row < 4; ++row) {
            Amplitude m = op[row][col];
            if (m == Amplitude(0.0)) continue;
            PureState::Term n = t;
            n.ket[pair.first].pol = pol(row >> 1);
            n.ket[pair.second].pol = pol(row & 1);
            n.amp *= m;
            terms.push_back(std::move(n));
        }
    }
    return PureState::from_terms(std::move(terms));
}

PureState apply_bell_component(const PureState &s, BellKind kind, PhotonPair pair) {
    return apply_pair_polarization(s, pair, pauli_for(kind));
}

Ensemble bell_diagonal_channel(const Ensemble &e, const NoiseParams &p, PhotonPair pair) {
    p.validate();
    std::vector<Ensemble::Component> out;
    out.reserve(e.size() * 4);
    for (const auto &c : e.components()) {
        for (BellKind k : kBellKinds) {
            double w = p.weight(k);
            if (w > 0.0) out.push_back({c.weight * w, apply_bell_component(c.state, k, pair)});
        }
    }
    return Ensemble::renormalized(std::move(out));
}

const PairOperator &bell_frame() {
    static const PairOperator frame = [] {
        const double r = std::numbers::sqrt2 / 2.0;
        // Columns are the images of HH, HV, VH, VV.
        PairOperator m{};
        m[0] = {r, 0, r, 0};
        m[1] = {0, r, 0, r};
        m[2] = {0, r, 0, -r};
        m[3] = {r, 0, -r, 0};
        return m;
    }();
    return frame;
}

PureState noisy_fiber_component(const PureState &s, BellKind kind, PhotonPair pair) {
    return apply_bell_component(apply_pair_polarization(s, pair, bell_frame()), kind, pair);
}

Ensemble noisy_fiber_channel(const Ensemble &e, const NoiseParams &p, PhotonPair pair) {
    auto framed = map_components(e, [&](const PureState &s) { return apply_pair_polarization(s, pair, bell_frame()); });
    return bell_diagonal_channel(framed, p, pair);
}

PureState collective_phase_channel(const PureState &s, const std::map<Mode, double> &theta) {
    std::vector<PureState::Term> terms(s.terms().begin(), s.terms().end());
    for (auto &t : terms) {
        double phase = 0.0;
        for (const auto &p : t.ket.photons) {
            if (auto it = theta.find(p.mode); it != theta.end()) phase += it->second;
        }
        t.amp *= std::polar(1.0, phase);
    }
    return PureState::from_terms(std::move(terms));
}

Ensemble collective_phase_channel(const Ensemble &e, const std::map<Mode, double> &theta) {
    return map_components(e, [&](const PureState &s) { return collective_phase_channel(s, theta); });
}

PureState timebin_dephasing(const PureState &s, double phi, std::size_t photon) {
    if (photon >= s.photon_count()) throw std::invalid_argument("dephasing target photon out of range");
    if (phi == 0.0) return s;
    std::vector<PureState::Term> terms(s.terms().begin(), s.terms().end());
    for (auto &t : terms) t.amp *= std::polar(1.0, phi * t.ket[photon].delay);
    return PureState::from_terms(std::move(terms));
}

Ensemble timebin_dephasing_channel(const Ensemble &e, double phi) {
    return map_components(e, [&](const PureState &s) { return timebin_dephasing(s, phi); });
}

std::vector<std::string_view> channel_registry() {
    return {"bell_diagonal", "noisy_fiber", "collective_phase", "timebin_dephasing"};
}

}  // namespace tbepp
