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

#include "tbepp/protocol.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "tbepp/errors.hpp"

namespace tbepp {
namespace {

void check_parties(int parties) {
    if (parties < 2 || parties > kMaxParties) {
        throw std::invalid_argument("party count must be in [2, " + std::to_string(kMaxParties) + "], got " +
                                    std::to_string(parties));
    }
}

Mode rail_mode(Rail r, int k) { return Mode((r == Rail::a ? "a" : "b") + std::to_string(k + 1)); }
Mode c_rail(int k) { return Mode("c" + std::to_string(k + 1)); }
Mode d_rail(int k) { return Mode("d" + std::to_string(k + 1)); }

int port_number(const Mode &port) {
    const std::string &l = port.label();
    int n = 0;
    if (l.size() < 2 || l[0] != 'D') return -1;
    auto [ptr, ec] = std::from_chars(l.data() + 1, l.data() + l.size(), n);
    if (ec != std::errc() || ptr != l.data() + l.size()) return -1;
    return n;
}

std::size_t lowest_port_photon(const Pattern &p) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.ports.size(); ++i) {
        if (port_number(p.ports[i]) < port_number(p.ports[best])) best = i;
    }
    return best;
}

}  // namespace

Branch::Branch(std::vector<Rail> rails) : rails_(std::move(rails)) { check_parties(parties()); }

std::vector<Branch> Branch::all(int parties) {
    check_parties(parties);
    std::vector<Branch> out;
    for (unsigned bits = 0; bits < (1u << parties); ++bits) {
        std::vector<Rail> rails(parties);
        for (int k = 0; k < parties; ++k) {
            rails[k] = (bits >> (parties - 1 - k)) & 1u ? Rail::b : Rail::a;
        }
        out.emplace_back(std::move(rails));
    }
    return out;
}

Branch Branch::parse(std::string_view label) {
    std::map<int, Rail> seen;
    std::size_t i = 0;
    auto fail = [&] { return std::invalid_argument("malformed branch label '" + std::string(label) + "'"); };
    while (i < label.size()) {
        char r = label[i++];
        if (r != 'a' && r != 'b') throw fail();
        std::size_t j = i;
        while (j < label.size() && label[j] >= '0' && label[j] <= '9') ++j;
        int k = 0;
        auto [ptr, ec] = std::from_chars(label.data() + i, label.data() + j, k);
        if (ec != std::errc() || ptr != label.data() + j || k < 1) throw fail();
        if (!seen.emplace(k, r == 'a' ? Rail::a : Rail::b).second) throw fail();
        i = j;
    }
    if (seen.empty() || seen.rbegin()->first != static_cast<int>(seen.size())) throw fail();
    std::vector<Rail> rails;
    for (const auto &[k, r] : seen) rails.push_back(r);
    return Branch(std::move(rails));
}

int Branch::timebin_sign() const {
    auto minus = std::count(rails_.begin(), rails_.end(), Rail::b);
    return minus % 2 ? -1 : 1;
}

std::vector<Mode> Branch::modes() const {
    std::vector<Mode> out;
    for (int k = 0; k < parties(); ++k) out.push_back(rail_mode(rails_[k], k));
    return out;
}

std::string Branch::label() const {
    std::string out;
    for (Rail want : {Rail::a, Rail::b}) {
        for (int k = 0; k < parties(); ++k) {
            if (rails_[k] == want) out += rail_mode(want, k).label();
        }
    }
    return out;
}

Mode party_mode(int k) { return Mode(std::string(1, static_cast<char>('A' + k))); }

Mode detector_port(int k, int parties, bool d) { return Mode("D" + std::to_string(d ? parties + k + 1 : k + 1)); }

std::string Pattern::label() const {
    std::vector<Mode> sorted = ports;
    std::sort(sorted.begin(), sorted.end(),
              [](const Mode &x, const Mode &y) { return port_number(x) < port_number(y); });
    std::string out;
    for (const auto &m : sorted) out += m.label();
    return out;
}

bool Pattern::accepting() const {
    int n = static_cast<int>(ports.size());
    if (n < 2) return false;
    for (int k = 0; k < n; ++k) {
        if (ports[k] != detector_port(k, n, false) && ports[k] != detector_port(k, n, true)) return false;
    }
    return true;
}

std::vector<Pattern> accepting_patterns(int parties) {
    std::vector<Pattern> out;
    for (const auto &b : Branch::all(parties)) {
        Pattern p;
        for (int k = 0; k < parties; ++k) p.ports.push_back(detector_port(k, parties, b.rails()[k] == Rail::b));
        out.push_back(std::move(p));
    }
    std::sort(out.begin(), out.end(), [](const Pattern &x, const Pattern &y) { return x.label() < y.label(); });
    return out;
}

PureState ghz_encode(int parties) {
    check_parties(parties);
    const double r = std::numbers::sqrt2 / 2.0;
    std::vector<PureState::Term> terms;
    for (int delay : {0, 1}) {
        BasisKet ket;
        for (int k = 0; k < parties; ++k) ket.photons.push_back({party_mode(k), Polarization::H, delay});
        terms.push_back({std::move(ket), r});
    }
    return PureState::from_terms(std::move(terms));
}

PureState encode_source_pair() { return ghz_encode(2); }

PureState polarization_source(int parties) {
    check_parties(parties);
    std::vector<Mode> modes;
    for (int k = 0; k < parties; ++k) modes.push_back(party_mode(k));
    return ghz_state(modes, 0);
}

Circuit encoder_circuit(int parties) {
    check_parties(parties);
    Circuit c;
    for (int k = 0; k < parties; ++k) {
        Mode src = party_mode(k);
        Mode short_arm(src.label() + ".S"), long_arm(src.label() + ".L");
        Mode out1 = rail_mode(Rail::a, k), out2 = rail_mode(Rail::b, k);
        for (const auto &m : {src, short_arm, long_arm, out1, out2}) c.declare(m);
        c.add(Pbs{src, short_arm, long_arm});
        c.add(Hwp{long_arm});
        c.add(Delay{long_arm, 1});
        c.add(BeamSplitter{short_arm, long_arm, out1, out2});
    }
    return c;
}

std::vector<BranchState> distribute(const PureState &encoded) {
    if (encoded.empty()) throw std::invalid_argument("distribute: empty state");
    int parties = static_cast<int>(encoded.photon_count());
    std::vector<BranchState> out;
    for (auto &b : Branch::all(parties)) {
        auto modes = b.modes();
        Projection p = project_modes(encoded, modes);
        out.push_back({std::move(b), p.probability, std::move(p.state)});
    }
    return out;
}

PureState branch_state(const Branch &branch) {
    int n = branch.parties();
    auto encoded = apply_circuit(polarization_source(n), encoder_circuit(n));
    for (auto &bs : distribute(encoded)) {
        if (bs.branch == branch) {
            if (!bs.state) throw ConsistencyError("encoder left branch " + branch.label() + " empty");
            return std::move(*bs.state);
        }
    }
    throw std::logic_error("branch not enumerated");
}

Circuit build_purifier(const Branch &branch) {
    int n = branch.parties();
    auto inputs = branch.modes();
    Circuit c;
    for (int k = 0; k < n; ++k) {
        for (const auto &m : {inputs[k], c_rail(k), d_rail(k), detector_port(k, n, false), detector_port(k, n, true)}) {
            c.declare(m);
        }
    }
    for (int k = 0; k < n; ++k) c.add(Pbs{inputs[k], c_rail(k), d_rail(k)});
    for (int k = 0; k < n; ++k) c.add(Hwp{d_rail(k)});
    for (int k = 0; k < n; ++k) {
        c.add(Pockels{c_rail(k), 0});
        c.add(Pockels{d_rail(k), 0});
    }
    for (int k = 0; k < n; ++k) {
        c.add(PolDelay{c_rail(k), 0, 1});
        c.add(PolDelay{d_rail(k), 0, 1});
    }
    for (int k = 0; k < n; ++k) {
        c.add(Route{c_rail(k), detector_port(k, n, false)});
        c.add(Route{d_rail(k), detector_port(k, n, true)});
    }
    return c;
}

std::vector<Outcome> purify_and_detect(const PureState &s, const Branch &branch) {
    if (s.photon_count() != static_cast<std::size_t>(branch.parties())) {
        throw std::invalid_argument("purify_and_detect: state has " + std::to_string(s.photon_count()) +
                                    " photons but the branch has " + std::to_string(branch.parties()) + " parties");
    }
    return classify_detections(apply_circuit(s, build_purifier(branch)));
}

std::vector<Outcome> classify_detections(const PureState &out) {
    std::map<std::vector<Mode>, std::vector<PureState::Term>> groups;
    for (const auto &t : out.terms()) {
        std::vector<Mode> ports;
        ports.reserve(t.ket.size());
        for (const auto &p : t.ket.photons) {
            if (port_number(p.mode) < 0) {
                throw ConsistencyError("photon left the purifier in non-detector mode " + p.mode.label());
            }
            ports.push_back(p.mode);
        }
        groups[std::move(ports)].push_back(t);
    }

    std::vector<Outcome> outcomes;
    for (auto &[ports, terms] : groups) {
        double p = 0.0;
        int delay = terms.front().ket[0].delay;
        for (const auto &t : terms) {
            p += std::norm(t.amp);
            for (const auto &ph : t.ket.photons) {
                if (ph.delay != delay) {
                    throw ConsistencyError("photons of pattern " + Pattern{ports}.label() +
                                           " arrive at different delays: " + to_string(t.ket));
                }
            }
        }
        outcomes.push_back({Pattern{ports}, p, canonical_phase(PureState::normalized(std::move(terms))), delay});
    }
    std::sort(outcomes.begin(), outcomes.end(),
              [](const Outcome &x, const Outcome &y) { return x.pattern.label() < y.pattern.label(); });
    return outcomes;
}

PureState correct_at(const Outcome &o, const Branch &branch, std::size_t photon) {
    if (photon >= o.pattern.ports.size()) throw std::invalid_argument("correction photon out of range");
    if (branch.timebin_sign() > 0) return o.heralded;
    return canonical_phase(apply_phase_flip(o.heralded, o.pattern.ports[photon]));
}

PureState correct(const Outcome &o, const Branch &branch) {
    return correct_at(o, branch, lowest_port_photon(o.pattern));
}

PureState target_state(const Outcome &o) { return ghz_state(o.pattern.ports, o.common_delay); }

std::vector<Outcome> ghz_purify(const PureState &s, const Branch &branch) { return purify_and_detect(s, branch); }

}  // namespace tbepp
