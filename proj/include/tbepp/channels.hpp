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

#include <array>
#include <cstddef>
#include <map>
#include <string_view>
#include <vector>

#include "tbepp/state.hpp"

namespace tbepp {

/// Bell-diagonal weights (F, a, b, c) for the polarization pair, per-side
/// collective phases, and an optional differential time-bin phase.
struct NoiseParams {
    double F = 1.0;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double theta_A = 0.0;
    double theta_B = 0.0;
    /// Phase per unit delay on photon B. Zero in the physical model; nonzero
    /// values break the collective-phase assumption on purpose.
    double dephasing = 0.0;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    double weight(BellKind kind) const;
};

/// Indices of the two photons whose polarization the fibre noise acts on.
struct PhotonPair {
    std::size_t first = 0;
    std::size_t second = 1;
};

/// 4x4 matrix acting on the polarization of a photon pair, basis order HH, HV, VH, VV.
using PairOperator = std::array<std::array<Amplitude, 4>, 4>;

PureState apply_pair_polarization(const PureState &s, PhotonPair pair, const PairOperator &op);

/// Pauli on the second photon that maps |Phi+> to the given Bell state:
/// I, Z, X, XZ for PhiPlus, PhiMinus, PsiPlus, PsiMinus.
PureState apply_bell_component(const PureState &s, BellKind kind, PhotonPair pair = {});

/// Splits every component into four, weighted F, a, b, c, by the Paulis of
/// apply_bell_component. Spatial and time-bin labels are never touched.
Ensemble bell_diagonal_channel(const Ensemble &e, const NoiseParams &p, PhotonPair pair = {});

/// The unitary taking the computational pair basis onto the Bell basis
/// (HH -> Phi+, HV -> Psi+, VH -> Phi-, VV -> Psi-).
const PairOperator &bell_frame();

/// Fibre transmission of the encoded pair: the product polarization |HH>
/// leaves as the Bell-diagonal mixture F|Phi+> + a|Phi-> + b|Psi+> + c|Psi->,
/// tensored with the untouched time-bin and spatial part.
Ensemble noisy_fiber_channel(const Ensemble &e, const NoiseParams &p, PhotonPair pair = {});
/// The pure component `kind` of noisy_fiber_channel.
PureState noisy_fiber_component(const PureState &s, BellKind kind, PhotonPair pair = {});

/// Path-length fluctuation: each photon picks up e^{i theta(mode)} for the
/// mode it occupies, identically in both time bins. Unlisted modes get 0.
PureState collective_phase_channel(const PureState &s, const std::map<Mode, double> &theta);
Ensemble collective_phase_channel(const Ensemble &e, const std::map<Mode, double> &theta);

/// Multiplies each ket by e^{i phi * delay} of the given photon (photon B by default).
PureState timebin_dephasing(const PureState &s, double phi, std::size_t photon = 1);
Ensemble timebin_dephasing_channel(const Ensemble &e, double phi);

/// Names of the channels this library provides.
std::vector<std::string_view> channel_registry();

}  // namespace tbepp
