// Command-line front end for the reliability target-allocation engine.
//
// Exit codes: 0 success, 1 verdict FAIL, 2 validation or parse error,
// 3 infeasible allocation target, 4 internal error.

#include <cctype>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "riskalloc/riskalloc.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdictFail = 1;
constexpr int kExitInputError = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitInternal = 4;

int exit_code_for(const riskalloc::Error& error) {
    switch (error.code()) {
        case riskalloc::errc::infeasible_target:
            return kExitInfeasible;
        case riskalloc::errc::quadrature_non_convergence:
            return kExitInternal;
        default:
            return kExitInputError;
    }
}

riskalloc::ReportFormat parse_format(const std::string& name) {
    auto format = riskalloc::report_format_from_name(name);
    if (!format) {
        riskalloc::raise(riskalloc::errc::range_violation,
                         "unknown format '" + name + "', expected table, csv, or json");
    }
    return *format;
}

std::string issue_severity_name(riskalloc::IssueSeverity severity) {
    return severity == riskalloc::IssueSeverity::error ? "error" : "warning";
}

/// Parses a target or ratio vector given either inline as comma-separated
/// values in subsystem declaration order, or as a JSON file keyed by
/// subsystem id (a bare id->value object, a report containing a "targets"
/// or "ratios" object, or a plain array). A value that names an existing
/// file is read as the keyed form.
std::vector<double> parse_vector_spec(const std::string& spec,
                                      const riskalloc::Scenario& scenario,
                                      const std::string& what,
                                      std::optional<double> default_value) {
    const std::size_t l = scenario.subsystem_count();

    if (std::filesystem::exists(spec)) {
        std::ifstream input(spec, std::ios::binary);
        if (!input) {
            riskalloc::raise(riskalloc::errc::syntax_error,
                             "cannot read " + what + " file '" + spec + "'");
        }
        nlohmann::json root;
        try {
            root = nlohmann::json::parse(input);
        } catch (const nlohmann::json::parse_error& e) {
            riskalloc::raise(riskalloc::errc::syntax_error,
                             what + " file '" + spec + "': " + e.what());
        }
        if (root.is_object()) {
            if (root.contains("targets") && root.at("targets").is_object()) {
                root = root.at("targets");
            } else if (root.contains("ratios") && root.at("ratios").is_object()) {
                root = root.at("ratios");
            }
        }
        if (root.is_array()) {
            if (root.size() != l) {
                riskalloc::raise(riskalloc::errc::dimension_mismatch,
                                 what + " array has " + std::to_string(root.size()) +
                                     " entries, expected " + std::to_string(l));
            }
            std::vector<double> values(l);
            for (std::size_t j = 0; j < l; ++j) {
                if (!root[j].is_number()) {
                    riskalloc::raise(riskalloc::errc::syntax_error,
                                     what + " array entries must be numbers");
                }
                values[j] = root[j].get<double>();
            }
            return values;
        }
        if (!root.is_object()) {
            riskalloc::raise(riskalloc::errc::syntax_error,
                             what + " file '" + spec +
                                 "' must hold an object keyed by subsystem id or an array");
        }
        for (const auto& [key, value] : root.items()) {
            if (!scenario.index_of_subsystem(key)) {
                riskalloc::raise(riskalloc::errc::unknown_subsystem,
                                 what + " file names unknown subsystem '" + key + "'");
            }
            if (!value.is_number()) {
                riskalloc::raise(riskalloc::errc::syntax_error,
                                 what + " value for '" + key + "' must be a number");
            }
        }
        std::vector<double> values(l);
        for (std::size_t j = 0; j < l; ++j) {
            const auto& id = scenario.subsystems[j].id;
            if (root.contains(id)) {
                values[j] = root.at(id).get<double>();
            } else if (default_value) {
                values[j] = *default_value;
            } else {
                riskalloc::raise(riskalloc::errc::missing_field,
                                 what + " file is missing subsystem '" + id + "'");
            }
        }
        return values;
    }

    std::vector<double> values;
    std::stringstream stream(spec);
    std::string token;
    while (std::getline(stream, token, ',')) {
        try {
            std::size_t consumed = 0;
            values.push_back(std::stod(token, &consumed));
            while (consumed < token.size() &&
                   std::isspace(static_cast<unsigned char>(token[consumed]))) {
                ++consumed;
            }
            if (consumed != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            riskalloc::raise(riskalloc::errc::syntax_error,
                             "cannot parse " + what + " entry '" + token +
                                 "' (and no file of that name exists)");
        }
    }
    if (values.size() != l) {
        riskalloc::raise(riskalloc::errc::dimension_mismatch,
                         what + " has " + std::to_string(values.size()) +
                             " entries, expected " + std::to_string(l) + " (one per " +
                             "subsystem in declaration order)");
    }
    return values;
}

riskalloc::ScenarioLoad load_or_throw(const std::string& path, bool normalize) {
    riskalloc::ValidateOptions options;
    options.normalize_contributions = normalize;
    return riskalloc::load_scenario_file(path, options);
}

void print_warnings(const riskalloc::ScenarioLoad& load) {
    for (const auto& issue : load.validation.issues) {
        if (issue.severity == riskalloc::IssueSeverity::warning) {
            std::cerr << "warning [" << riskalloc::errc_name(issue.code) << "]: "
                      << issue.message << "\n";
        }
    }
}

struct CommonArgs {
    std::string scenario_path;
    std::string format_name = "table";
    bool normalize = false;

    riskalloc::ReportFormat format() const { return parse_format(format_name); }
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("scenario", args.scenario_path, "scenario file")->required();
    cmd->add_option("--format", args.format_name, "output format: table, csv, or json")
        ->envname("RISKALLOC_FORMAT");
    cmd->add_flag("--normalize-contributions", args.normalize,
                  "rescale function contributions to sum to 1 instead of rejecting");
}

int run_validate(const CommonArgs& args) {
    const auto format = args.format();
    riskalloc::ScenarioLoad load = load_or_throw(args.scenario_path, args.normalize);
    const auto& issues = load.validation.issues;

    if (format == riskalloc::ReportFormat::json) {
        nlohmann::ordered_json root;
        root["report"] = "validation";
        root["scenario"] = load.document.name;
        root["valid"] = load.ok();
        nlohmann::ordered_json list = nlohmann::ordered_json::array();
        for (const auto& issue : issues) {
            list.push_back({{"severity", issue_severity_name(issue.severity)},
                            {"code", riskalloc::errc_name(issue.code)},
                            {"message", issue.message}});
        }
        root["issues"] = list;
        std::cout << root.dump(2) << "\n";
    } else if (format == riskalloc::ReportFormat::csv) {
        std::cout << "severity,code,message\n";
        for (const auto& issue : issues) {
            std::string message = issue.message;
            if (message.find_first_of(",\"\n") != std::string::npos) {
                std::string quoted = "\"";
                for (char c : message) {
                    if (c == '"') quoted += '"';
                    quoted += c;
                }
                message = quoted + "\"";
            }
            std::cout << issue_severity_name(issue.severity) << ","
                      << riskalloc::errc_name(issue.code) << "," << message << "\n";
        }
    } else {
        std::cout << "scenario: " << load.document.name << "\n";
        std::cout << "valid: " << (load.ok() ? "yes" : "no") << "\n";
        for (const auto& issue : issues) {
            std::cout << "  " << issue_severity_name(issue.severity) << " ["
                      << riskalloc::errc_name(issue.code) << "]: " << issue.message << "\n";
        }
    }
    return load.ok() ? kExitOk : kExitInputError;
}

int run_tolerable(const CommonArgs& args) {
    riskalloc::ScenarioLoad load = load_or_throw(args.scenario_path, args.normalize);
    print_warnings(load);
    const auto& scenario = riskalloc::require_scenario(load);
    std::cout << riskalloc::emit_tolerance_report(scenario, args.format());
    return kExitOk;
}

int run_evaluate(const CommonArgs& args, const std::string& targets_spec) {
    riskalloc::ScenarioLoad load = load_or_throw(args.scenario_path, args.normalize);
    print_warnings(load);
    const auto& scenario = riskalloc::require_scenario(load);
    const auto targets = parse_vector_spec(targets_spec, scenario, "targets", std::nullopt);
    const auto assessment = riskalloc::assess(scenario, targets);
    std::cout << riskalloc::emit_assessment_report(scenario, targets, assessment,
                                                   args.format());
    return assessment.verdict == riskalloc::Verdict::pass ? kExitOk : kExitVerdictFail;
}

int run_allocate(const CommonArgs& args, const std::string& ratios_spec, double tol) {
    riskalloc::ScenarioLoad load = load_or_throw(args.scenario_path, args.normalize);
    print_warnings(load);
    const auto& scenario = riskalloc::require_scenario(load);

    std::vector<double> ratios;
    if (ratios_spec.empty()) {
        ratios.assign(scenario.subsystem_count(), 1.0);
    } else {
        ratios = parse_vector_spec(ratios_spec, scenario, "ratios", 1.0);
    }

    const double tolerable = riskalloc::tolerable_risk(scenario.consequence);
    const double tolerable_ec =
        riskalloc::tolerable_expected_consequence(scenario, tolerable);
    const double success_target =
        riskalloc::required_success_target(scenario, tolerable_ec);
    const auto result =
        riskalloc::allocate_bisection(scenario, ratios, success_target, tol);
    std::cout << riskalloc::emit_allocation_report(scenario, result, args.format());
    return kExitOk;
}

int run_mc(const CommonArgs& args, const std::string& targets_spec, std::size_t samples,
           std::uint64_t seed) {
    riskalloc::ScenarioLoad load = load_or_throw(args.scenario_path, args.normalize);
    print_warnings(load);
    riskalloc::Scenario scenario = riskalloc::require_scenario(load);

    if (!targets_spec.empty()) {
        // What-if probe: treat each target as a binary subsystem at that
        // probability of failure, for both the draws and the analytic side.
        const auto targets =
            parse_vector_spec(targets_spec, scenario, "targets", std::nullopt);
        for (std::size_t j = 0; j < scenario.subsystem_count(); ++j) {
            if (!(targets[j] >= 0.0 && targets[j] <= 1.0)) {
                riskalloc::raise(riskalloc::errc::range_violation,
                                 "target for subsystem '" + scenario.subsystems[j].id +
                                     "' must be in [0, 1]");
            }
            scenario.subsystems[j].model = riskalloc::BinaryModel{targets[j]};
        }
    }

    std::vector<double> expected(scenario.subsystem_count());
    for (std::size_t j = 0; j < scenario.subsystem_count(); ++j) {
        expected[j] = riskalloc::expect_failure(scenario.subsystems[j].model);
    }
    const double analytic = riskalloc::expected_consequence(expected, scenario);
    const auto estimate = riskalloc::mc_expected_consequence(scenario, samples, seed);
    std::cout << riskalloc::emit_mc_report(scenario, estimate, analytic, args.format());
    return kExitOk;
}

int run_sil(const CommonArgs& args) {
    riskalloc::ScenarioLoad load = load_or_throw(args.scenario_path, args.normalize);
    print_warnings(load);
    const auto& scenario = riskalloc::require_scenario(load);
    const double tolerable = riskalloc::tolerable_risk(scenario.consequence);
    const double rrf_value = riskalloc::rrf(scenario, tolerable);
    const auto band = riskalloc::sil_from_rrf(rrf_value);
    std::cout << riskalloc::emit_sil_report(scenario, tolerable, rrf_value, band,
                                            args.format());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reliability target allocation for mitigation safety functions"};
    app.require_subcommand(1);

    CommonArgs validate_args;
    auto* validate_cmd =
        app.add_subcommand("validate", "parse a scenario file and list every violation");
    add_common(validate_cmd, validate_args);

    CommonArgs tolerable_args;
    auto* tolerable_cmd = app.add_subcommand(
        "tolerable", "derive the tolerable risk and tolerable expected consequence");
    add_common(tolerable_cmd, tolerable_args);

    CommonArgs evaluate_args;
    std::string evaluate_targets;
    auto* evaluate_cmd = app.add_subcommand(
        "evaluate", "assess the risk at a given expected-failure vector (what-if probe)");
    add_common(evaluate_cmd, evaluate_args);
    evaluate_cmd
        ->add_option("--targets", evaluate_targets,
                     "expected failure degrees: comma-separated values in declaration "
                     "order, or a JSON file keyed by subsystem id")
        ->required();

    CommonArgs allocate_args;
    std::string allocate_ratios;
    double allocate_tol = riskalloc::kDefaultBisectionTol;
    auto* allocate_cmd = app.add_subcommand(
        "allocate", "solve for expected-failure targets that meet the tolerable risk");
    add_common(allocate_cmd, allocate_args);
    allocate_cmd->add_option("--ratios", allocate_ratios,
                             "reliability ratios between subsystems (default: uniform); "
                             "comma-separated or a JSON file keyed by subsystem id");
    allocate_cmd->add_option("--tol", allocate_tol,
                             "bisection tolerance on the weighted success");

    CommonArgs mc_args;
    std::string mc_targets;
    std::size_t mc_samples = 100000;
    std::uint64_t mc_seed = 20240101;
    auto* mc_cmd = app.add_subcommand(
        "mc", "Monte Carlo check of the analytic expected consequence");
    add_common(mc_cmd, mc_args);
    mc_cmd->add_option("--targets", mc_targets,
                       "optional: treat each subsystem as binary at this probability of "
                       "failure instead of its committed model");
    mc_cmd->add_option("--samples", mc_samples, "number of draws (at least 1000)");
    mc_cmd->add_option("--seed", mc_seed, "64-bit seed for the deterministic stream");

    CommonArgs sil_args;
    auto* sil_cmd =
        app.add_subcommand("sil", "risk reduction factor and its SIL band");
    add_common(sil_cmd, sil_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help and friends
            return app.exit(e);
        }
        std::cerr << e.what() << "\n\n" << app.help() << "\n";
        return kExitInputError;
    }

    try {
        if (validate_cmd->parsed()) return run_validate(validate_args);
        if (tolerable_cmd->parsed()) return run_tolerable(tolerable_args);
        if (evaluate_cmd->parsed()) return run_evaluate(evaluate_args, evaluate_targets);
        if (allocate_cmd->parsed()) {
            return run_allocate(allocate_args, allocate_ratios, allocate_tol);
        }
        if (mc_cmd->parsed()) return run_mc(mc_args, mc_targets, mc_samples, mc_seed);
        if (sil_cmd->parsed()) return run_sil(sil_args);
    } catch (const riskalloc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
