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
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tbepp/channels.hpp"
#include "tbepp/protocol.hpp"

namespace tbepp {

inline constexpr std::string_view kEngineVersion = "tbepp-engine/1.0.0";
inline constexpr std::string_view kOracleVersion = "tbepp-oracle/1.0.0";

/// Random stream of one trial. The state is derived from (master seed, trial
/// index) with the SplitMix64 finalizer, so every trial's draws are fixed by
/// those two numbers alone and results do not depend on scheduling.
class TrialRng {
   public:
    TrialRng(std::uint64_t master_seed, std::uint64_t trial_index);

    std::uint64_t next();
    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform();
    /// Index drawn with probability proportional to weights; zero weights are never drawn.
    std::size_t categorical(std::span<const double> weights);

   private:
    std::uint64_t state_;
};

enum class ThetaDistribution { Zero, Uniform };
enum class OutputFormat { Json, Csv };

std::string_view to_string(ThetaDistribution d);
std::string_view to_string(OutputFormat f);

struct ExperimentConfig {
    /// F, a, b, c and the adversarial dephasing phase; theta fields are ignored.
    NoiseParams noise;
    /// Zero: no path-length noise. Uniform: each party's phase drawn from [0, 2pi) per trial.
    ThetaDistribution theta_dist = ThetaDistribution::Zero;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 0;
    int parties = 2;
    /// Fixed branch; when absent each trial draws one uniformly.
    std::optional<Branch> branch;
    OutputFormat format = OutputFormat::Json;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

struct TrialRecord {
    BellKind input_component = BellKind::PhiPlus;
    Branch branch = Branch::a1a2();
    Pattern pattern;
    int common_delay = 0;
    bool success = false;
    double corrected_fidelity = 0.0;
};

struct Report {
    ExperimentConfig config;
    std::uint64_t trials = 0;
    double success_probability = 0.0;
    double mean_corrected_fidelity = 0.0;
    /// Every accepting pattern is listed, including zero counts.
    std::map<std::string, std::uint64_t> pattern_counts;
    /// Every branch is listed, including zero counts.
    std::map<std::string, std::uint64_t> branch_counts;
};

/// Monte Carlo driver: encode, distribute, transmit, purify, correct.
/// Branch states and purifier circuits are built once at construction.
class Experiment {
   public:
    explicit Experiment(ExperimentConfig config);

    const ExperimentConfig &config() const { return config_; }

    /// Trial `index` with its own derived random stream.
    TrialRecord run_trial(std::uint64_t index) const;
    TrialRecord run_trial(TrialRng &rng) const;

    /// All trials, split over `threads` workers (0 = hardware concurrency).
    /// The report is identical for every thread count.
    Report run(unsigned threads = 1) const;

   private:
    struct BranchSetup {
        Branch branch;
        PureState state;
        Circuit purifier;
    };

    ExperimentConfig config_;
    std::vector<BranchSetup> branches_;
    std::vector<double> bell_weights_;
};

Report run_experiment(const ExperimentConfig &config, unsigned threads = 1);

}  // namespace tbepp
