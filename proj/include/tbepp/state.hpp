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

#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tbepp {

using Amplitude = std::complex<double>;

/// Amplitudes with modulus below this are dropped from a state.
inline constexpr double kPruneThreshold = 1e-15;
/// Absolute tolerance for norms, weights and fidelities.
inline constexpr double kTolerance = 1e-12;

enum class Polarization : std::uint8_t { H, V };

constexpr Polarization flipped(Polarization p) {
    return p == Polarization::H ? Polarization::V : Polarization::H;
}

char to_char(Polarization p);

/// Spatial mode label ("a1", "c2", "D4", ...). Ordered lexicographically by label.
class Mode {
   public:
    Mode() = default;
    explicit Mode(std::string label) : label_(std::move(label)) {}
    explicit Mode(const char *label) : label_(label) {}

    const std::string &label() const { return label_; }

    friend bool operator==(const Mode &, const Mode &) = default;
    friend auto operator<=>(const Mode &, const Mode &) = default;

   private:
    std::string label_;
};

/// Classical label of one photon: where it is, how it is polarized, and how
/// many interferometer imbalances it is late by (S arm = 0, L arm = 1).
struct PhotonBasis {
    Mode mode;
    Polarization pol = Polarization::H;
    int delay = 0;

    friend bool operator==(const PhotonBasis &, const PhotonBasis &) = default;
    friend auto operator<=>(const PhotonBasis &, const PhotonBasis &) = default;
};

/// Multi-photon basis ket. Photons are distinguishable by their index.
struct BasisKet {
    std::vector<PhotonBasis> photons;

    std::size_t size() const { return photons.size(); }
    PhotonBasis &operator[](std::size_t i) { return photons[i]; }
    const PhotonBasis &operator[](std::size_t i) const { return photons[i]; }

    friend bool operator==(const BasisKet &, const BasisKet &) = default;
    friend auto operator<=>(const BasisKet &, const BasisKet &) = default;
};

std::string to_string(const BasisKet &ket);

/// Sparse superposition of basis kets with unit norm.
///
/// Terms are kept sorted by ket and free of duplicates, so the first term is
/// always the lexicographically smallest ket. A default-constructed state is
/// empty (no photons, no terms) and only appears as the flagged result of a
/// zero-probability projection.
class PureState {
   public:
    struct Term {
        BasisKet ket;
        Amplitude amp;
    };

    PureState() = default;

    /// Merges duplicate kets, prunes negligible amplitudes, and requires the
    /// result to have unit norm. Throws std::invalid_argument otherwise.
    static PureState from_terms(std::vector<Term> terms);
    /// Same as from_terms but rescales to unit norm instead of requiring it.
    static PureState normalized(std::vector<Term> terms);
    static PureState basis(BasisKet ket);

    std::size_t photon_count() const { return photon_count_; }
    bool empty() const { return terms_.empty(); }
    std::span<const Term> terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    double norm_squared() const;
    Amplitude amplitude(const BasisKet &ket) const;
    /// Every mode label occupied by some photon in some ket.
    std::set<Mode> modes() const;

    PureState operator*(Amplitude factor) const;

    std::string str() const;

   private:
    static std::vector<Term> merge(std::vector<Term> terms);

    std::vector<Term> terms_;
    std::size_t photon_count_ = 0;
};

/// Probability-weighted list of pure states sharing one photon count.
class Ensemble {
   public:
    struct Component {
        double weight;
        PureState state;
    };

    /// Requires positive weights summing to 1 within kTolerance.
    explicit Ensemble(std::vector<Component> components);
    /// Drops zero-weight components and rescales the rest to sum to 1.
    static Ensemble renormalized(std::vector<Component> components);
    static Ensemble pure(PureState state);

    std::span<const Component> components() const { return components_; }
    std::size_t size() const { return components_.size(); }
    std::size_t photon_count() const;
    double total_weight() const;

   private:
    std::vector<Component> components_;
};

enum class BellKind : std::uint8_t { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

inline constexpr BellKind kBellKinds[] = {BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus,
                                          BellKind::PsiMinus};

std::string_view to_string(BellKind kind);

/// Two-photon polarization Bell state with photon 0 in modes.first and photon
/// 1 in modes.second, both at the given delay.
PureState bell_state(BellKind kind, const std::pair<Mode, Mode> &modes, int delay = 0);

/// (|H...H> + |V...V>)/sqrt(2) with photon k in modes[k], all at one delay.
PureState ghz_state(std::span<const Mode> modes, int delay = 0);

/// Product state; photons of t are appended after the photons of s.
PureState tensor(const PureState &s, const PureState &t);

Amplitude inner_product(const PureState &s, const PureState &t);

/// |<s|t>|^2. Both states must have the same photon count and mode set.
double fidelity(const PureState &s, const PureState &t);

/// Result of conditioning a state on every photon's spatial mode.
struct Projection {
    double probability = 0.0;
    /// Renormalized conditional state; nullopt when the branch has zero weight.
    std::optional<PureState> state;
};

Projection project_modes(const PureState &s, std::span<const Mode> assignment);

/// Removes the global phase: the amplitude of the smallest ket becomes real positive.
PureState canonical_phase(const PureState &s);

double ensemble_fidelity(const Ensemble &e, const PureState &target);

}  // namespace tbepp
