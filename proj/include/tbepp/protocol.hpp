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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tbepp/optics.hpp"
#include "tbepp/state.hpp"

namespace tbepp {

/// Largest party count the multipartite pipeline accepts.
inline constexpr int kMaxParties = 8;

/// Output rail of a party's recombining beam splitter: `a` is the sum port,
/// `b` the difference port.
enum class Rail : std::uint8_t { a, b };

/// Which rail each party's photon left its encoder on. For two parties the
/// labels are a1a2, a1b2, a2b1 and b1b2.
class Branch {
   public:
    explicit Branch(std::vector<Rail> rails);

    static Branch a1a2() { return Branch({Rail::a, Rail::a}); }
    static Branch a1b2() { return Branch({Rail::a, Rail::b}); }
    static Branch a2b1() { return Branch({Rail::b, Rail::a}); }
    static Branch b1b2() { return Branch({Rail::b, Rail::b}); }

    /// All 2^n branches, ordered by treating the rails as bits (party 1 most significant).
    static std::vector<Branch> all(int parties);
    /// Parses labels such as "a1b2" or "a2b1" (rails listed in any order).
    static Branch parse(std::string_view label);

    int parties() const { return static_cast<int>(rails_.size()); }
    std::span<const Rail> rails() const { return rails_; }
    /// Sign of the |L...L> term on this branch: -1 per difference port.
    int timebin_sign() const;
    /// Mode occupied by each party's photon on this branch.
    std::vector<Mode> modes() const;
    /// "a" rails first, then "b" rails, each in party order: a1a2, a1b2, a2b1, b1b2.
    std::string label() const;

    friend bool operator==(const Branch &, const Branch &) = default;
    friend auto operator<=>(const Branch &, const Branch &) = default;

   private:
    std::vector<Rail> rails_;
};

/// Source mode of party k (0-based): A, B, C, ...
Mode party_mode(int k);
/// Detector port reached by party k's photon: D{k+1} from the c rail, D{n+k+1} from the d rail.
Mode detector_port(int k, int parties, bool d_rail);

/// Which detector port each photon (by index) ended up in.
struct Pattern {
    std::vector<Mode> ports;

    /// Ports sorted by number and concatenated, e.g. "D1D4" or "D2D3".
    std::string label() const;
    /// One photon per party, each on one of that party's two ports.
    bool accepting() const;

    friend bool operator==(const Pattern &, const Pattern &) = default;
    friend auto operator<=>(const Pattern &, const Pattern &) = default;
};

/// Every accepting pattern for the given party count, ordered by label.
std::vector<Pattern> accepting_patterns(int parties);

/// The heralded result of one detector pattern.
struct Outcome {
    Pattern pattern;
    double probability = 0.0;
    /// Polarization state at the ports, canonical phase.
    PureState heralded;
    int common_delay = 0;
};

/// |H...H> (x) (|0...0> + |1...1>)/sqrt2 on the party source modes.
PureState ghz_encode(int parties);
/// The two-party case of ghz_encode: polarization product, time-bin entangled.
PureState encode_source_pair();

/// Polarization GHZ state (|H...H> + |V...V>)/sqrt2 on the party source modes
/// at delay 0; for two parties this is |Phi+>_AB.
PureState polarization_source(int parties);

/// Per party: PBS (H short arm, V long arm), HWP and one unit of delay on the
/// long arm, then a 50:50 BS recombining short arm (in1) and long arm (in2)
/// onto rails a{k} and b{k}.
Circuit encoder_circuit(int parties);

struct BranchState {
    Branch branch;
    double probability = 0.0;
    /// nullopt when the input carries no amplitude on this branch.
    std::optional<PureState> state;
};

/// Conditions the encoder output on each of the 2^n rail combinations.
std::vector<BranchState> distribute(const PureState &encoded);

/// Conditional state of one branch of the encoded polarization source.
PureState branch_state(const Branch &branch);

/// Per party: PBS to rails c/d, HWP on d, Pockels cells gated on the early
/// bin, the polarization-dependent delay (H +0, V +1), and routing to ports.
Circuit build_purifier(const Branch &branch);

/// Runs the purifier and groups the output by detector pattern. Outcomes are
/// sorted by pattern label. Throws ConsistencyError if a pattern has photons
/// at mismatched delays or a photon misses every detector.
std::vector<Outcome> purify_and_detect(const PureState &s, const Branch &branch);

/// Groups a purifier output state by detector pattern (the second half of purify_and_detect).
std::vector<Outcome> classify_detections(const PureState &out);

/// Feed-forward: Z on the lowest-numbered port when the branch sign is -1.
PureState correct(const Outcome &o, const Branch &branch);
/// Z on the photon with the given index when the branch sign is -1.
PureState correct_at(const Outcome &o, const Branch &branch, std::size_t photon);

/// The state the protocol should herald: GHZ+ on the pattern's ports.
PureState target_state(const Outcome &o);

/// Purifies every party of a multipartite branch state; same as purify_and_detect.
std::vector<Outcome> ghz_purify(const PureState &s, const Branch &branch);

}  // namespace tbepp
