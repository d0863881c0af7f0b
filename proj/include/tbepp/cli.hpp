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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tbepp/experiment.hpp"

namespace tbepp::cli {

enum ExitCode : int { kExitOk = 0, kExitConfigError = 1, kExitInternalError = 2 };

/// Command-line values; unset fields fall back to the config file, then to defaults.
struct FlagValues {
    std::optional<double> F, a, b, c;
    std::optional<std::string> theta_dist;
    std::optional<double> dephasing;
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> branch;
    std::optional<int> parties;
    std::optional<std::string> format;
};

/// Defaults, then the JSON config file (if any), then flags. Validated;
/// throws ConfigError with the offending field name.
ExperimentConfig parse_config(const std::optional<std::string> &config_path, const FlagValues &flags);

/// Config from JSON text. Unknown keys and wrong types are rejected.
ExperimentConfig config_from_json_text(const std::string &text);

/// Every (F, a, b, c) on the simplex with the given step, which must divide 1.
std::vector<NoiseParams> simplex_grid(double step);

/// Report documents. Reals are written with 17 significant digits.
std::string report_json(const Report &r);
std::string sweep_json(std::span<const Report> reports, double step);
std::string reports_csv(std::span<const Report> reports);

struct OracleCheckSummary {
    std::uint64_t seed = 0;
    int draws = 0;
    int parties = 2;
    double max_deviation = 0.0;
    bool passed = false;
};

/// Randomized engine/oracle comparison: each draw picks (F, a, b, c) uniformly
/// on the simplex, a uniform branch and uniform per-side phases.
OracleCheckSummary oracle_check(std::uint64_t seed, int draws, int parties, double dephasing);
std::string oracle_check_json(const OracleCheckSummary &s);

/// Entry point shared by the executable and the tests. `args` excludes argv[0].
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace tbepp::cli
