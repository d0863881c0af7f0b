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

#include "tbepp/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "tbepp/errors.hpp"
#include "tbepp/oracle.hpp"

namespace tbepp::cli {
namespace {

using nlohmann::json;

constexpr double kOracleTolerance = 1e-10;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string quoted(const std::string &s) { return json(s).dump(); }

ThetaDistribution parse_theta_dist(const std::string &s) {
    if (s == "zero") return ThetaDistribution::Zero;
    if (s == "uniform") return ThetaDistribution::Uniform;
    throw ConfigError("theta_dist: expected 'zero' or 'uniform', got '" + s + "'");
}

OutputFormat parse_format(const std::string &s) {
    if (s == "json") return OutputFormat::Json;
    if (s == "csv") return OutputFormat::Csv;
    throw ConfigError("format: expected 'json' or 'csv', got '" + s + "'");
}

Branch parse_branch(const std::string &s) {
    try {
        return Branch::parse(s);
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string("branch: ") + e.what());
    }
}

double json_real(const json &j, const char *key) {
    if (!j.is_number()) throw ConfigError(std::string(key) + ": expected a number");
    return j.get<double>();
}

std::uint64_t json_unsigned(const json &j, const char *key) {
    if (!j.is_number_unsigned()) throw ConfigError(std::string(key) + ": expected a non-negative integer");
    return j.get<std::uint64_t>();
}

std::string json_string(const json &j, const char *key) {
    if (!j.is_string()) throw ConfigError(std::string(key) + ": expected a string");
    return j.get<std::string>();
}

void apply_json(ExperimentConfig &cfg, const json &doc) {
    if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
    for (const auto &[key, value] : doc.items()) {
        const char *k = key.c_str();
        if (key == "F") cfg.noise.F = json_real(value, k);
        else if (key == "a") cfg.noise.a = json_real(value, k);
        else if (key == "b") cfg.noise.b = json_real(value, k);
        else if (key == "c") cfg.noise.c = json_real(value, k);
        else if (key == "dephasing") cfg.noise.dephasing = json_real(value, k);
        else if (key == "theta_dist") cfg.theta_dist = parse_theta_dist(json_string(value, k));
        else if (key == "trials") cfg.trials = json_unsigned(value, k);
        else if (key == "seed") cfg.seed = json_unsigned(value, k);
        else if (key == "parties") cfg.parties = static_cast<int>(std::min<std::uint64_t>(json_unsigned(value, k), 1000));
        else if (key == "branch") cfg.branch = value.is_null() ? std::nullopt : std::optional(parse_branch(json_string(value, k)));
        else if (key == "format") cfg.format = parse_format(json_string(value, k));
        else throw ConfigError("config: unknown field '" + key + "'");
    }
}

void apply_flags(ExperimentConfig &cfg, const FlagValues &f) {
    if (f.F) cfg.noise.F = *f.F;
    if (f.a) cfg.noise.a = *f.a;
    if (f.b) cfg.noise.b = *f.b;
    if (f.c) cfg.noise.c = *f.c;
    if (f.dephasing) cfg.noise.dephasing = *f.dephasing;
    if (f.theta_dist) cfg.theta_dist = parse_theta_dist(*f.theta_dist);
    if (f.trials) cfg.trials = *f.trials;
    if (f.seed) cfg.seed = *f.seed;
    if (f.parties) cfg.parties = *f.parties;
    if (f.branch) cfg.branch = parse_branch(*f.branch);
    if (f.format) cfg.format = parse_format(*f.format);
}

std::string counts_json(const std::map<std::string, std::uint64_t> &m, const std::string &indent) {
    std::string out = "{";
    bool first = true;
    for (const auto &[k, v] : m) {
        out += first ? "\n" : ",\n";
        out += indent + "  " + quoted(k) + ": " + std::to_string(v);
        first = false;
    }
    out += first ? "}" : "\n" + indent + "}";
    return out;
}

std::string report_body(const Report &r, const std::string &indent) {
    const auto &c = r.config;
    const std::string in = indent + "  ", in2 = in + "  ";
    std::ostringstream o;
    o << "{\n";
    o << in << "\"engine_version\": " << quoted(std::string(kEngineVersion)) << ",\n";
    o << in << "\"oracle_version\": " << quoted(std::string(kOracleVersion)) << ",\n";
    o << in << "\"config\": {\n";
    o << in2 << "\"F\": " << num(c.noise.F) << ",\n";
    o << in2 << "\"a\": " << num(c.noise.a) << ",\n";
    o << in2 << "\"b\": " << num(c.noise.b) << ",\n";
    o << in2 << "\"c\": " << num(c.noise.c) << ",\n";
    o << in2 << "\"theta_dist\": " << quoted(std::string(to_string(c.theta_dist))) << ",\n";
    o << in2 << "\"dephasing\": " << num(c.noise.dephasing) << ",\n";
    o << in2 << "\"trials\": " << c.trials << ",\n";
    o << in2 << "\"seed\": " << c.seed << ",\n";
    o << in2 << "\"parties\": " << c.parties << ",\n";
    o << in2 << "\"branch\": " << (c.branch ? quoted(c.branch->label()) : "null") << "\n";
    o << in << "},\n";
    o << in << "\"trials\": " << r.trials << ",\n";
    o << in << "\"success_probability\": " << num(r.success_probability) << ",\n";
    o << in << "\"mean_corrected_fidelity\": " << num(r.mean_corrected_fidelity) << ",\n";
    o << in << "\"pattern_counts\": " << counts_json(r.pattern_counts, in) << ",\n";
    o << in << "\"branch_counts\": " << counts_json(r.branch_counts, in) << "\n";
    o << indent << "}";
    return o.str();
}

std::string counts_field(const std::map<std::string, std::uint64_t> &m) {
    std::string out;
    for (const auto &[k, v] : m) {
        if (!out.empty()) out += ';';
        out += k + "=" + std::to_string(v);
    }
    return out;
}

NoiseParams random_simplex_point(TrialRng &rng) {
    // Spacings of three sorted uniforms are uniform on the simplex.
    double u[3] = {rng.uniform(), rng.uniform(), rng.uniform()};
    std::sort(u, u + 3);
    NoiseParams p;
    p.F = u[0];
    p.a = u[1] - u[0];
    p.b = u[2] - u[1];
    p.c = 1.0 - u[2];
    return p;
}

void emit(const std::string &text, const std::optional<std::string> &path, std::ostream &out) {
    if (!path) {
        out << text;
        return;
    }
    std::ofstream f(*path, std::ios::binary);
    if (!f) throw ConfigError("out: cannot open '" + *path + "' for writing");
    f << text;
    if (!f) throw ConfigError("out: failed writing '" + *path + "'");
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    apply_json(cfg, doc);
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config(const std::optional<std::string> &config_path, const FlagValues &flags) {
    ExperimentConfig cfg;
    if (config_path) {
        std::ifstream f(*config_path, std::ios::binary);
        if (!f) throw ConfigError("config: cannot read '" + *config_path + "'");
        std::stringstream buf;
        buf << f.rdbuf();
        json doc;
        try {
            doc = json::parse(buf.str());
        } catch (const json::parse_error &e) {
            throw ConfigError("config: malformed JSON in '" + *config_path + "': " + e.what());
        }
        apply_json(cfg, doc);
    }
    apply_flags(cfg, flags);
    cfg.validate();
    return cfg;
}

std::vector<NoiseParams> simplex_grid(double step) {
    if (!(step > 0.0) || step > 1.0) throw ConfigError("step: must be in (0, 1]");
    const double m_real = 1.0 / step;
    const long m = std::lround(m_real);
    if (std::abs(m_real - static_cast<double>(m)) > 1e-9 || m > 1000) {
        throw ConfigError("step: 1/step must be an integer (at most 1000), got step = " + num(step));
    }
    std::vector<NoiseParams> grid;
    const double md = static_cast<double>(m);
    for (long i = 0; i <= m; ++i) {
        for (long j = 0; i + j <= m; ++j) {
            for (long k = 0; i + j + k <= m; ++k) {
                NoiseParams p;
                p.F = i / md;
                p.a = j / md;
                p.b = k / md;
                p.c = (m - i - j - k) / md;
                grid.push_back(p);
            }
        }
    }
    return grid;
}

std::string report_json(const Report &r) {
    std::string body = report_body(r, "");
    return body.insert(1, "\n  \"schema\": \"tbepp.report/1\",").append("\n");
}

std::string sweep_json(std::span<const Report> reports, double step) {
    std::string out = "{\n  \"schema\": \"tbepp.sweep/1\",\n";
    out += "  \"step\": " + num(step) + ",\n";
    out += "  \"points\": " + std::to_string(reports.size()) + ",\n";
    out += "  \"reports\": [";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        out += i ? ",\n    " : "\n    ";
        out += report_body(reports[i], "    ");
    }
    out += reports.empty() ? "]\n}\n" : "\n  ]\n}\n";
    return out;
}

std::string reports_csv(std::span<const Report> reports) {
    std::string out =
        "F,a,b,c,theta_dist,dephasing,parties,branch,trials,seed,success_probability,"
        "mean_corrected_fidelity,pattern_counts,branch_counts\n";
    for (const auto &r : reports) {
        const auto &c = r.config;
        out += num(c.noise.F) + "," + num(c.noise.a) + "," + num(c.noise.b) + "," + num(c.noise.c) + ",";
        out += std::string(to_string(c.theta_dist)) + "," + num(c.noise.dephasing) + ",";
        out += std::to_string(c.parties) + "," + (c.branch ? c.branch->label() : "") + ",";
        out += std::to_string(r.trials) + "," + std::to_string(c.seed) + ",";
        out += num(r.success_probability) + "," + num(r.mean_corrected_fidelity) + ",";
        out += counts_field(r.pattern_counts) + "," + counts_field(r.branch_counts) + "\n";
    }
    return out;
}

OracleCheckSummary oracle_check(std::uint64_t seed, int draws, int parties, double dephasing) {
    if (draws < 1) throw ConfigError("draws: must be at least 1");
    if (parties < 2 || parties > 4) throw ConfigError("parties: the oracle supports 2 to 4 parties");
    OracleCheckSummary s;
    s.seed = seed;
    s.draws = draws;
    s.parties = parties;
    const auto branches = Branch::all(parties);
    for (int d = 0; d < draws; ++d) {
        TrialRng rng(seed, static_cast<std::uint64_t>(d));
        NoiseParams p = random_simplex_point(rng);
        const Branch &b = branches[rng.next() % branches.size()];
        p.theta_A = 2.0 * std::numbers::pi * rng.uniform();
        p.theta_B = 2.0 * std::numbers::pi * rng.uniform();
        p.dephasing = dephasing;
        s.max_deviation = std::max(s.max_deviation, oracle::cross_check(p, b));
    }
    s.passed = s.max_deviation < kOracleTolerance;
    return s;
}

std::string oracle_check_json(const OracleCheckSummary &s) {
    std::ostringstream o;
    o << "{\n";
    o << "  \"schema\": \"tbepp.oracle_check/1\",\n";
    o << "  \"engine_version\": " << quoted(std::string(kEngineVersion)) << ",\n";
    o << "  \"oracle_version\": " << quoted(std::string(kOracleVersion)) << ",\n";
    o << "  \"seed\": " << s.seed << ",\n";
    o << "  \"draws\": " << s.draws << ",\n";
    o << "  \"parties\": " << s.parties << ",\n";
    o << "  \"max_deviation\": " << num(s.max_deviation) << ",\n";
    o << "  \"tolerance\": " << num(kOracleTolerance) << ",\n";
    o << "  \"passed\": " << (s.passed ? "true" : "false") << "\n";
    o << "}\n";
    return o.str();
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Simulator and verifier for time-bin assisted polarization purification", "tbepp"};
    app.require_subcommand(1);

    FlagValues flags;
    std::string config_path, out_path;
    unsigned threads = 1;
    double step = 0.1;
    int draws = 100;

    // Options shared by every subcommand; presence is read back with count().
    double F = 0, a = 0, b = 0, c = 0, dephasing = 0;
    std::string theta_dist, branch, format;
    std::uint64_t trials = 0, seed = 0;
    int parties = 0;
    std::vector<CLI::Option *> opts;
    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", config_path, "JSON config file; flags override its values");
        sub->add_option("--F", F, "weight of |Phi+>");
        sub->add_option("--a", a, "weight of |Phi->");
        sub->add_option("--b", b, "weight of |Psi+>");
        sub->add_option("--c", c, "weight of |Psi->");
        sub->add_option("--theta-dist", theta_dist, "collective phase distribution: zero | uniform");
        sub->add_option("--dephasing", dephasing, "adversarial time-bin phase on photon B (radians)");
        sub->add_option("--trials", trials, "number of Monte Carlo trials");
        sub->add_option("--seed", seed, "master seed");
        sub->add_option("--branch", branch, "fix the branch: a1a2 | a1b2 | a2b1 | b1b2");
        sub->add_option("--parties", parties, "number of parties (GHZ size)");
        sub->add_option("--format", format, "json | csv");
        sub->add_option("--out", out_path, "write the document here instead of stdout");
        sub->add_option("--threads", threads, "worker threads, 0 = all cores (output does not depend on it)");
    };
    auto *cmd_run = app.add_subcommand("run", "run one Monte Carlo experiment");
    auto *cmd_sweep = app.add_subcommand("sweep", "run an experiment at every point of the (F, a, b, c) simplex grid");
    auto *cmd_oracle = app.add_subcommand("oracle-check", "compare the state-vector engine with the density-matrix oracle");
    auto *cmd_ghz = app.add_subcommand("ghz", "run the multipartite (GHZ) pipeline");
    for (auto *sub : {cmd_run, cmd_sweep, cmd_oracle, cmd_ghz}) add_common(sub);
    cmd_sweep->add_option("--step", step, "grid step; 1/step must be an integer");
    cmd_oracle->add_option("--draws", draws, "number of randomized draws");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    CLI::App *sub = app.get_subcommands().front();
    auto given = [&](const char *name) { return sub->count(name) > 0; };
    if (given("--F")) flags.F = F;
    if (given("--a")) flags.a = a;
    if (given("--b")) flags.b = b;
    if (given("--c")) flags.c = c;
    if (given("--theta-dist")) flags.theta_dist = theta_dist;
    if (given("--dephasing")) flags.dephasing = dephasing;
    if (given("--trials")) flags.trials = trials;
    if (given("--seed")) flags.seed = seed;
    if (given("--branch")) flags.branch = branch;
    if (given("--parties")) flags.parties = parties;
    if (given("--format")) flags.format = format;
    std::optional<std::string> cfg_path = given("--config") ? std::optional(config_path) : std::nullopt;
    std::optional<std::string> dest = given("--out") ? std::optional(out_path) : std::nullopt;

    try {
        if (sub == cmd_ghz && !flags.parties) flags.parties = 3;
        ExperimentConfig cfg = parse_config(cfg_path, flags);

        if (sub == cmd_run || sub == cmd_ghz) {
            Report r = run_experiment(cfg, threads);
            std::vector<Report> one{r};
            emit(cfg.format == OutputFormat::Json ? report_json(r) : reports_csv(one), dest, out);
            return kExitOk;
        }
        if (sub == cmd_sweep) {
            std::vector<Report> reports;
            for (const auto &p : simplex_grid(step)) {
                ExperimentConfig point = cfg;
                point.noise.F = p.F;
                point.noise.a = p.a;
                point.noise.b = p.b;
                point.noise.c = p.c;
                reports.push_back(run_experiment(point, threads));
            }
            emit(cfg.format == OutputFormat::Json ? sweep_json(reports, step) : reports_csv(reports), dest, out);
            return kExitOk;
        }
        // oracle-check
        auto summary = oracle_check(cfg.seed, draws, cfg.parties, cfg.noise.dephasing);
        emit(oracle_check_json(summary), dest, out);
        if (!summary.passed) {
            err << "oracle-check: max deviation " << num(summary.max_deviation) << " exceeds "
                << num(kOracleTolerance) << "\n";
            return kExitInternalError;
        }
        return kExitOk;
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const ConsistencyError &e) {
        err << "internal consistency error: " << e.what() << "\n";
        return kExitInternalError;
    } catch (const std::exception &e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternalError;
    }
}

}  // namespace tbepp::cli
