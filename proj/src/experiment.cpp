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

#include "tbepp/experiment.hpp"

#include <algorithm>
#include <exception>
#include <numbers>
#include <thread>

#include "tbepp/errors.hpp"

namespace tbepp {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct Tally {
    std::uint64_t successes = 0;
    std::map<std::string, std::uint64_t> patterns;
    std::map<std::string, std::uint64_t> branches;
};

}  // namespace

TrialRng::TrialRng(std::uint64_t master_seed, std::uint64_t trial_index)
    : state_(splitmix_finalize(splitmix_finalize(master_seed) ^ (trial_index * kGolden + 1))) {}

std::uint64_t TrialRng::next() {
    state_ += kGolden;
    return splitmix_finalize(state_);
}

double TrialRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t TrialRng::categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    std::size_t last = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] > 0.0)) continue;
        last = i;
        if (u < weights[i]) return i;
        u -= weights[i];
    }
    if (last == weights.size()) throw std::invalid_argument("categorical: no positive weight");
    return last;
}

std::string_view to_string(ThetaDistribution d) { return d == ThetaDistribution::Zero ? "zero" : "uniform"; }
std::string_view to_string(OutputFormat f) { return f == OutputFormat::Json ? "json" : "csv"; }

void ExperimentConfig::validate() const {
    try {
        noise.validate();
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
    if (trials < 1) throw ConfigError("trials: must be at least 1");
    if (parties < 2 || parties > kMaxParties) {
        throw ConfigError("parties: must be in [2, " + std::to_string(kMaxParties) + "], got " +
                          std::to_string(parties));
    }
    if (branch && branch->parties() != parties) {
        throw ConfigError("branch: " + branch->label() + " names " + std::to_string(branch->parties()) +
                          " parties but parties = " + std::to_string(parties));
    }
}

Experiment::Experiment(ExperimentConfig config) : config_(std::move(config)) {
    config_.validate();
    auto encoded = apply_circuit(polarization_source(config_.parties), encoder_circuit(config_.parties));
    for (auto &bs : distribute(encoded)) {
        if (!bs.state) throw ConsistencyError("encoder left branch " + bs.branch.label() + " empty");
        Circuit purifier = build_purifier(bs.branch);
        branches_.push_back({std::move(bs.branch), std::move(*bs.state), std::move(purifier)});
    }
    for (BellKind k : kBellKinds) bell_weights_.push_back(config_.noise.weight(k));
}

TrialRecord Experiment::run_trial(std::uint64_t index) const {
    TrialRng rng(config_.seed, index);
    return run_trial(rng);
}

TrialRecord Experiment::run_trial(TrialRng &rng) const {
    // Draw order is part of the reproducibility contract: branch, Bell component, phases, pattern.
    std::size_t b = 0;
    if (config_.branch) {
        auto it = std::find_if(branches_.begin(), branches_.end(),
                               [&](const BranchSetup &s) { return s.branch == *config_.branch; });
        b = static_cast<std::size_t>(it - branches_.begin());
    } else {
        b = static_cast<std::size_t>(rng.next() % branches_.size());
    }
    const BranchSetup &setup = branches_[b];

    TrialRecord rec;
    rec.branch = setup.branch;
    rec.input_component = kBellKinds[rng.categorical(bell_weights_)];

    PureState s = noisy_fiber_component(setup.state, rec.input_component);
    if (config_.theta_dist == ThetaDistribution::Uniform) {
        std::map<Mode, double> theta;
        auto modes = setup.branch.modes();
        for (const auto &m : modes) theta[m] = 2.0 * std::numbers::pi * rng.uniform();
        s = collective_phase_channel(s, theta);
    }
    s = timebin_dephasing(s, config_.noise.dephasing);

    auto outcomes = classify_detections(apply_circuit(s, setup.purifier));
    std::vector<double> probs;
    for (const auto &o : outcomes) probs.push_back(o.probability);
    const Outcome &o = outcomes[rng.categorical(probs)];

    rec.pattern = o.pattern;
    rec.common_delay = o.common_delay;
    rec.success = o.pattern.accepting();
    if (rec.success) rec.corrected_fidelity = fidelity(correct(o, setup.branch), target_state(o));
    return rec;
}

Report Experiment::run(unsigned threads) const {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const std::uint64_t n = config_.trials;
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, n));

    std::vector<double> fidelities(n);
    std::vector<Tally> tallies(threads);
    std::vector<std::exception_ptr> errors(threads);
    auto work = [&](unsigned w) {
        std::uint64_t begin = n * w / threads, end = n * (w + 1) / threads;
        Tally &t = tallies[w];
        try {
            for (std::uint64_t i = begin; i < end; ++i) {
                TrialRecord r = run_trial(i);
                fidelities[i] = r.corrected_fidelity;
                t.successes += r.success;
                ++t.patterns[r.pattern.label()];
                ++t.branches[r.branch.label()];
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    }
    for (const auto &e : errors) {
        if (e) std::rethrow_exception(e);
    }

    Report rep;
    rep.config = config_;
    rep.trials = n;
    for (const auto &p : accepting_patterns(config_.parties)) rep.pattern_counts[p.label()] = 0;
    for (const auto &b : Branch::all(config_.parties)) rep.branch_counts[b.label()] = 0;
    std::uint64_t successes = 0;
    for (const auto &t : tallies) {
        successes += t.successes;
        for (const auto &[k, v] : t.patterns) rep.pattern_counts[k] += v;
        for (const auto &[k, v] : t.branches) rep.branch_counts[k] += v;
    }
    double sum = 0.0;
    for (double f : fidelities) sum += f;
    rep.success_probability = static_cast<double>(successes) / static_cast<double>(n);
    rep.mean_corrected_fidelity = sum / static_cast<double>(n);
    return rep;
}

Report run_experiment(const ExperimentConfig &config, unsigned threads) { return Experiment(config).run(threads); }

}  // namespace tbepp
