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

#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "tbepp/state.hpp"

namespace tbepp {

enum class ElementKind { PBS, HWP, BS, Delay, PolDelay, Pockels, Route };

std::string_view to_string(ElementKind kind);

/// Polarizing beam splitter: H continues into `transmit`, V into `reflect`.
struct Pbs {
    Mode in, transmit, reflect;
};

/// Half-wave plate at 45 degrees: H <-> V.
struct Hwp {
    Mode mode;
};

/// 50:50 beam splitter, real Hadamard convention:
/// in1 -> (out1 + out2)/sqrt2, in2 -> (out1 - out2)/sqrt2.
struct BeamSplitter {
    Mode in1, in2, out1, out2;
};

/// Fixed extra path length, in units of the interferometer imbalance.
struct Delay {
    Mode mode;
    int delta = 0;
};

/// Polarization-dependent delay: an unbalanced PBS interferometer whose H and
/// V arms differ in length. Deterministic, no splitting.
struct PolDelay {
    Mode mode;
    int delta_h = 0;
    int delta_v = 0;
};

/// Pockels cell switched on only for the time bin `gate_delay`, where it flips H <-> V.
struct Pockels {
    Mode mode;
    int gate_delay = 0;
};

/// Free propagation from one mode label to another (fibre, mirror, detector port).
struct Route {
    Mode from, to;
};

using Element = std::variant<Pbs, Hwp, BeamSplitter, Delay, PolDelay, Pockels, Route>;

ElementKind kind(const Element &e);
std::vector<Mode> wired_modes(const Element &e);

/// Ordered list of elements over a declared mode set.
class Circuit {
   public:
    Circuit() = default;
    explicit Circuit(std::set<Mode> modes) : modes_(std::move(modes)) {}

    Circuit &declare(const Mode &m);
    /// Rejects elements wired to undeclared modes or carrying negative delays.
    Circuit &add(Element e);
    /// Appends another circuit's modes and elements.
    Circuit &append(const Circuit &other);

    const std::set<Mode> &modes() const { return modes_; }
    std::span<const Element> elements() const { return elements_; }
    bool empty() const { return elements_.empty(); }

   private:
    std::set<Mode> modes_;
    std::vector<Element> elements_;
};

PureState apply_pbs(const PureState &s, const Mode &in, const Mode &transmit, const Mode &reflect);
PureState apply_hwp(const PureState &s, const Mode &mode);
PureState apply_bs(const PureState &s, const Mode &in1, const Mode &in2, const Mode &out1, const Mode &out2);
PureState apply_delay(const PureState &s, const Mode &mode, int delta);
PureState apply_pol_delay(const PureState &s, const Mode &mode, int delta_h, int delta_v);
PureState apply_pockels(const PureState &s, const Mode &mode, int gate_delay);
PureState apply_route(const PureState &s, const Mode &from, const Mode &to);
/// Z on the photon in `mode`: the V amplitude changes sign. Used for feed-forward.
PureState apply_phase_flip(const PureState &s, const Mode &mode);

PureState apply_element(const PureState &s, const Element &e);

/// Applies the elements in order. Misuse errors are rethrown as ElementError.
PureState apply_circuit(const PureState &s, const Circuit &c);

}  // namespace tbepp
