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

#include "tbepp/state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace tbepp {

char to_char(Polarization p) { return p == Polarization::H ? 'H' : 'V'; }

std::string to_string(const BasisKet &ket) {
    std::string out = "|";
    for (std::size_t i = 0; i < ket.size(); ++i) {
        if (i) out += ", ";
        out += to_char(ket[i].pol);
        out += '@';
        out += ket[i].mode.label();
        out += '+';
        out += std::to_string(ket[i].delay);
    }
    out += ">";
    return out;
}

std::vector<PureState::Term> PureState::merge(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(), [](const Term &x, const Term &y) { return x.ket < y.ket; });
    std::vector<Term> out;
    out.reserve(terms.size());
    for (auto &t : terms) {
        if (!out.empty() && out.back().ket == t.ket) {
            out.back().amp += t.amp;
        } else {
            out.push_back(std::move(t));
        }
    }
    std::erase_if(out, [](const Term &t) { return std::abs(t.amp) < kPruneThreshold; });
    return out;
}

PureState PureState::from_terms(std::vector<Term> terms) {
    PureState s;
    s.terms_ = merge(std::move(terms));
    if (s.terms_.empty()) {
        throw std::invalid_argument("state has no nonzero amplitude");
    }
    s.photon_count_ = s.terms_.front().ket.size();
    if (s.photon_count_ == 0) {
        throw std::invalid_argument("state must contain at least one photon");
    }
    for (const auto &t : s.terms_) {
        if (t.ket.size() != s.photon_count_) {
            throw std::invalid_argument("kets with different photon counts in one state");
        }
        for (const auto &p : t.ket.photons) {
            if (p.delay < 0) throw std::invalid_argument("negative delay in " + to_string(t.ket));
        }
    }
    double n = s.norm_squared();
    if (std::abs(n - 1.0) > kTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "state is not normalized: norm^2 = " << n;
        throw std::invalid_argument(msg.str());
    }
    return s;
}

PureState PureState::normalized(std::vector<Term> terms) {
    terms = merge(std::move(terms));
    double n = 0.0;
    for (const auto &t : terms) n += std::norm(t.amp);
    if (n <= 0.0) throw std::invalid_argument("cannot normalize a zero vector");
    double scale = 1.0 / std::sqrt(n);
    for (auto &t : terms) t.amp *= scale;
    return from_terms(std::move(terms));
}

PureState PureState::basis(BasisKet ket) {
    std::vector<Term> terms;
    terms.push_back({std::move(ket), 1.0});
    return from_terms(std::move(terms));
}

double PureState::norm_squared() const {
    double n = 0.0;
    for (const auto &t : terms_) n += std::norm(t.amp);
    return n;
}

Amplitude PureState::amplitude(const BasisKet &ket) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), ket,
                               [](const Term &t, const BasisKet &k) { return t.ket < k; });
    if (it != terms_.end() && it->ket == ket) return it->amp;
    return 0.0;
}

std::set<Mode> PureState::modes() const {
    std::set<Mode> out;
    for (const auto &t : terms_) {
        for (const auto &p : t.ket.photons) out.insert(p.mode);
    }
    return out;
}

PureState PureState::operator*(Amplitude factor) const {
    PureState s = *this;
    for (auto &t : s.terms_) t.amp *= factor;
    return s;
}

std::string PureState::str() const {
    std::ostringstream out;
    out.precision(6);
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i) out << " + ";
        out << terms_[i].amp << to_string(terms_[i].ket);
    }
    return out.str();
}

Ensemble::Ensemble(std::vector<Component> components) : components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("ensemble has no components");
    double total = 0.0;
    for (const auto &c : components_) {
        if (!(c.weight > 0.0)) throw std::invalid_argument("ensemble weights must be positive");
        if (c.state.empty()) throw std::invalid_argument("ensemble component is an empty state");
        if (c.state.photon_count() != components_.front().state.photon_count()) {
            throw std::invalid_argument("ensemble components differ in photon count");
        }
        total += c.weight;
    }
    if (std::abs(total - 1.0) > kTolerance) {
        throw std::invalid_argument("ensemble weights do not sum to 1");
    }
}

Ensemble Ensemble::renormalized(std::vector<Component> components) {
    std::erase_if(components, [](const Component &c) { return !(c.weight > 0.0); });
    double total = 0.0;
    for (const auto &c : components) total += c.weight;
    for (auto &c : components) c.weight /= total;
    return Ensemble(std::move(components));
}

Ensemble Ensemble::pure(PureState state) {
    std::vector<Component> c;
    c.push_back({1.0, std::move(state)});
    return Ensemble(std::move(c));
}

std::size_t Ensemble::photon_count() const { return components_.front().state.photon_count(); }

double Ensemble::total_weight() const {
    double total = 0.0;
    for (const auto &c : components_) total += c.weight;
    return total;
}

std::string_view to_string(BellKind kind) {
    switch (kind) {
        case BellKind::PhiPlus: return "PhiPlus";
        case BellKind::PhiMinus: return "PhiMinus";
        case BellKind::PsiPlus: return "PsiPlus";
        case BellKind::PsiMinus: return "PsiMinus";
    }
    return "?";
}

PureState bell_state(BellKind kind, const std::pair<Mode, Mode> &modes, int delay) {
    if (modes.first == modes.second) {
        throw std::invalid_argument("Bell state needs two distinct modes, got " + modes.first.label() + " twice");
    }
    using enum Polarization;
    const double r = std::numbers::sqrt2 / 2.0;
    auto ket = [&](Polarization p, Polarization q) {
        return BasisKet{{{modes.first, p, delay}, {modes.second, q, delay}}};
    };
    std::vector<PureState::Term> terms;
    switch (kind) {
        case BellKind::PhiPlus:
            terms = {{ket(H, H), r}, {ket(V, V), r}};
            break;
        case BellKind::PhiMinus:
            terms = {{ket(H, H), r}, {ket(V, V), -r}};
            break;
        case BellKind::PsiPlus:
            terms = {{ket(H, V), r}, {ket(V, H), r}};
            break;
        case BellKind::PsiMinus:
            terms = {{ket(H, V), r}, {ket(V, H), -r}};
            break;
    }
    return PureState::from_terms(std::move(terms));
}

PureState ghz_state(std::span<const Mode> modes, int delay) {
    if (modes.empty()) throw std::invalid_argument("GHZ state needs at least one mode");
    std::set<Mode> distinct(modes.begin(), modes.end());
    if (distinct.size() != modes.size()) throw std::invalid_argument("GHZ state needs distinct modes");
    BasisKet all_h, all_v;
    for (const auto &m : modes) {
        all_h.photons.push_back({m, Polarization::H, delay});
        all_v.photons.push_back({m, Polarization::V, delay});
    }
    const double r = std::numbers::sqrt2 / 2.0;
    return PureState::from_terms({{std::move(all_h), r}, {std::move(all_v), r}});
}

PureState tensor(const PureState &s, const PureState &t) {
    std::set<Mode> ms = s.modes();
    for (const auto &m : t.modes()) {
        if (ms.contains(m)) throw std::invalid_argument("tensor: mode " + m.label() + " used by both factors");
    }
    std::vector<PureState::Term> terms;
    terms.reserve(s.size() * t.size());
    for (const auto &x : s.terms()) {
        for (const auto &y : t.terms()) {
            BasisKet k = x.ket;
            k.photons.insert(k.photons.end(), y.ket.photons.begin(), y.ket.photons.end());
            terms.push_back({std::move(k), x.amp * y.amp});
        }
    }
    return PureState::from_terms(std::move(terms));
}

Amplitude inner_product(const PureState &s, const PureState &t) {
    // Both term lists are sorted; walk them together.
    Amplitude acc = 0.0;
    auto a = s.terms().begin(), b = t.terms().begin();
    while (a != s.terms().end() && b != t.terms().end()) {
        if (a->ket < b->ket) {
            ++a;
        } else if (b->ket < a->ket) {
            ++b;
        } else {
            acc += std::conj(a->amp) * b->amp;
            ++a;
            ++b;
        }
    }
    return acc;
}

double fidelity(const PureState &s, const PureState &t) {
    if (s.photon_count() != t.photon_count()) {
        throw std::invalid_argument("fidelity: photon counts differ");
    }
    if (s.modes() != t.modes()) {
        throw std::invalid_argument("fidelity: mode sets differ");
    }
    return std::min(1.0, std::norm(inner_product(s, t)));
}

Projection project_modes(const PureState &s, std::span<const Mode> assignment) {
    if (assignment.size() != s.photon_count()) {
        throw std::invalid_argument("project_modes: assignment must name a mode for every photon");
    }
    std::vector<PureState::Term> kept;
    double p = 0.0;
    for (const auto &t : s.terms()) {
        bool match = true;
        for (std::size_t i = 0; i < assignment.size() && match; ++i) {
            match = t.ket[i].mode == assignment[i];
        }
        if (match) {
            p += std::norm(t.amp);
            kept.push_back(t);
        }
    }
    Projection out;
    out.probability = p;
    if (!kept.empty()) out.state = PureState::normalized(std::move(kept));
    return out;
}

PureState canonical_phase(const PureState &s) {
    if (s.empty()) throw std::invalid_argument("canonical_phase of an empty state");
    Amplitude lead = s.terms().front().amp;
    return s * (std::conj(lead) / std::abs(lead));
}

double ensemble_fidelity(const Ensemble &e, const PureState &target) {
    double f = 0.0;
    for (const auto &c : e.components()) f += c.weight * fidelity(c.state, target);
    return f;
}

}  // namespace tbepp
