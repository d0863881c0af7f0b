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

#include <algorithm>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tbepp/errors.hpp"

namespace tbepp {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

bool occupies(const PureState &s, const Mode &mode) {
    for (const auto &t : s.terms()) {
        for (const auto &p : t.ket.photons) {
            if (p.mode == mode) return true;
        }
    }
    return false;
}

void move_photon(BasisKet &ket, std::size_t i, const Mode &to) {
    for (std::size_t j = 0; j < ket.size(); ++j) {
        if (j != i && ket[j].mode == to) {
            throw std::invalid_argument("photon " + std::to_string(i) + " routed into mode " + to.label() +
                                        ", already occupied by photon " + std::to_string(j));
        }
    }
    ket[i].mode = to;
}

// Applies `f(photon, ket, amp)` to every photon sitting in `mode`, term by term.
template <class F>
PureState map_photons_in(const PureState &s, const Mode &mode, F f) {
    if (!occupies(s, mode)) return s;
    std::vector<PureState::Term> terms(s.terms().begin(), s.terms().end());
    for (auto &t : terms) {
        for (std::size_t i = 0; i < t.ket.size(); ++i) {
            if (t.ket[i].mode == mode) f(i, t.ket, t.amp);
        }
    }
    return PureState::from_terms(std::move(terms));
}

void require_non_negative(int delta, const char *what) {
    if (delta < 0) throw std::invalid_argument(std::string(what) + " must be non-negative");
}

}  // namespace

std::string_view to_string(ElementKind kind) {
    switch (kind) {
        case ElementKind::PBS: return "PBS";
        case ElementKind::HWP: return "HWP";
        case ElementKind::BS: return "BS";
        case ElementKind::Delay: return "Delay";
        case ElementKind::PolDelay: return "PolDelay";
        case ElementKind::Pockels: return "Pockels";
        case ElementKind::Route: return "Route";
    }
    return "?";
}

ElementKind kind(const Element &e) {
    return std::visit(overloaded{
                          [](const Pbs &) { return ElementKind::PBS; },
                          [](const Hwp &) { return ElementKind::HWP; },
                          [](const BeamSplitter &) { return ElementKind::BS; },
                          [](const Delay &) { return ElementKind::Delay; },
                          [](const PolDelay &) { return ElementKind::PolDelay; },
                          [](const Pockels &) { return ElementKind::Pockels; },
                          [](const Route &) { return ElementKind::Route; },
                      },
                      e);
}

std::vector<Mode> wired_modes(const Element &e) {
    return std::visit(overloaded{
                          [](const Pbs &x) { return std::vector<Mode>{x.in, x.transmit, x.reflect}; },
                          [](const Hwp &x) { return std::vector<Mode>{x.mode}; },
                          [](const BeamSplitter &x) { return std::vector<Mode>{x.in1, x.in2, x.out1, x.out2}; },
                          [](const Delay &x) { return std::vector<Mode>{x.mode}; },
                          [](const PolDelay &x) { return std::vector<Mode>{x.mode}; },
                          [](const Pockels &x) { return std::vector<Mode>{x.mode}; },
                          [](const Route &x) { return std::vector<Mode>{x.from, x.to}; },
                      },
                      e);
}

Circuit &Circuit::declare(const Mode &m) {
    modes_.insert(m);
    return *this;
}

Circuit &Circuit::add(Element e) {
    for (const auto &m : wired_modes(e)) {
        if (!modes_.contains(m)) {
            throw std::invalid_argument(std::string(to_string(kind(e))) + " wired to undeclared mode " + m.label());
        }
    }
    std::visit(overloaded{
                   [](const Delay &x) { require_non_negative(x.delta, "delay"); },
                   [](const PolDelay &x) {
                       require_non_negative(x.delta_h, "H delay");
                       require_non_negative(x.delta_v, "V delay");
                   },
                   [](const Pockels &x) { require_non_negative(x.gate_delay, "Pockels gate delay"); },
                   [](const Pbs &x) {
                       if (x.in == x.transmit || x.in == x.reflect || x.transmit == x.reflect) {
                           throw std::invalid_argument("PBS ports must be distinct");
                       }
                   },
                   [](const BeamSplitter &x) {
                       std::set<Mode> ports{x.in1, x.in2, x.out1, x.out2};
                       if (ports.size() != 4) throw std::invalid_argument("BS ports must be distinct");
                   },
                   [](const Route &x) {
                       if (x.from == x.to) throw std::invalid_argument("route must change the mode");
                   },
                   [](const auto &) {},
               },
               e);
    elements_.push_back(std::move(e));
    return *this;
}

Circuit &Circuit::append(const Circuit &other) {
    modes_.insert(other.modes_.begin(), other.modes_.end());
    elements_.insert(elements_.end(), other.elements_.begin(), other.elements_.end());
    return *this;
}

PureState apply_pbs(const PureState &s, const Mode &in, const Mode &transmit, const Mode &reflect) {
    return map_photons_in(s, in, [&](std::size_t i, BasisKet &ket, Amplitude &) {
        move_photon(ket, i, ket[i].pol == Polarization::H ? transmit : reflect);
    });
}

PureState apply_hwp(const PureState &s, const Mode &mode) {
    return map_photons_in(s, mode, [](std::size_t i, BasisKet &ket, Amplitude &) { ket[i].pol = flipped(ket[i].pol); });
}

PureState apply_bs(const PureState &s, const Mode &in1, const Mode &in2, const Mode &out1, const Mode &out2) {
    if (!occupies(s, in1) && !occupies(s, in2)) return s;
    const double r = std::numbers::sqrt2 / 2.0;
    std::vector<PureState::Term> current(s.terms().begin(), s.terms().end());
    // One photon at a time: each pass splits every term addressed by photon i.
    for (std::size_t i = 0; i < s.photon_count(); ++i) {
        std::vector<PureState::Term> next;
        next.reserve(current.size() * 2);
        for (auto &t : current) {
            const Mode &m = t.ket[i].mode;
            if (m != in1 && m != in2) {
                next.push_back(std::move(t));
                continue;
            }
            double sign = (m == in1) ? 1.0 : -1.0;
            PureState::Term a = t, b = std::move(t);
            move_photon(a.ket, i, out1);
            move_photon(b.ket, i, out2);
            a.amp *= r;
            b.amp *= sign * r;
            next.push_back(std::move(a));
            next.push_back(std::move(b));
        }
        current = std::move(next);
    }
    return PureState::from_terms(std::move(current));
}

PureState apply_delay(const PureState &s, const Mode &mode, int delta) {
    require_non_negative(delta, "delay");
    if (delta == 0) return s;
    return map_photons_in(s, mode, [delta](std::size_t i, BasisKet &ket, Amplitude &) { ket[i].delay += delta; });
}

PureState apply_pol_delay(const PureState &s, const Mode &mode, int delta_h, int delta_v) {
    require_non_negative(delta_h, "H delay");
    require_non_negative(delta_v, "V delay");
    return map_photons_in(s, mode, [=](std::size_t i, BasisKet &ket, Amplitude &) {
        ket[i].delay += ket[i].pol == Polarization::H ? delta_h : delta_v;
    });
}

PureState apply_pockels(const PureState &s, const Mode &mode, int gate_delay) {
    require_non_negative(gate_delay, "Pockels gate delay");
    return map_photons_in(s, mode, [gate_delay](std::size_t i, BasisKet &ket, Amplitude &) {
        if (ket[i].delay == gate_delay) ket[i].pol = flipped(ket[i].pol);
    });
}

PureState apply_route(const PureState &s, const Mode &from, const Mode &to) {
    return map_photons_in(s, from, [&](std::size_t i, BasisKet &ket, Amplitude &) { move_photon(ket, i, to); });
}

PureState apply_phase_flip(const PureState &s, const Mode &mode) {
    return map_photons_in(s, mode, [](std::size_t i, BasisKet &ket, Amplitude &amp) {
        if (ket[i].pol == Polarization::V) amp = -amp;
    });
}

PureState apply_element(const PureState &s, const Element &e) {
    return std::visit(overloaded{
                          [&](const Pbs &x) { return apply_pbs(s, x.in, x.transmit, x.reflect); },
                          [&](const Hwp &x) { return apply_hwp(s, x.mode); },
                          [&](const BeamSplitter &x) { return apply_bs(s, x.in1, x.in2, x.out1, x.out2); },
                          [&](const Delay &x) { return apply_delay(s, x.mode, x.delta); },
                          [&](const PolDelay &x) { return apply_pol_delay(s, x.mode, x.delta_h, x.delta_v); },
                          [&](const Pockels &x) { return apply_pockels(s, x.mode, x.gate_delay); },
                          [&](const Route &x) { return apply_route(s, x.from, x.to); },
                      },
                      e);
}

PureState apply_circuit(const PureState &s, const Circuit &c) {
    for (const auto &m : s.modes()) {
        if (!c.modes().contains(m)) {
            throw std::invalid_argument("state occupies mode " + m.label() + " which the circuit does not declare");
        }
    }
    PureState out = s;
    auto elements = c.elements();
    for (std::size_t i = 0; i < elements.size(); ++i) {
        try {
            out = apply_element(out, elements[i]);
        } catch (const std::invalid_argument &err) {
            throw ElementError(i, std::string(to_string(kind(elements[i]))) + ": " + err.what());
        }
    }
    return out;
}

}  // namespace tbepp
