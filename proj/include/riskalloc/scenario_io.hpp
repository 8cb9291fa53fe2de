#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskalloc/allocate.hpp"
#include "riskalloc/errors.hpp"
#include "riskalloc/expectation.hpp"
#include "riskalloc/model.hpp"
#include "riskalloc/risk.hpp"

namespace riskalloc {

/// Serialized mirror of a Scenario. The mapping is stored per subsystem as
/// an adjacency list to keep files readable and diff-friendly; the matrix is
/// reconstructed when the document is turned into a Scenario.
struct MappingEntry {
    std::string subsystem;
    std::vector<std::string> functions;

    bool operator==(const MappingEntry&) const = default;
};

struct ScenarioDocument {
    std::string name;
    std::string description;
    std::string severity_unit;
    double hazardous_event_frequency = 0.0;
    std::vector<ExternalFactor> external_factors;
    double c_min = 0.0;
    double c_max = 0.0;
    std::optional<double> tolerable_risk;
    std::vector<ConsequenceSegment> segments;
    std::vector<FunctionSpec> functions;
    std::vector<SubsystemSpec> subsystems;
    std::vector<MappingEntry> mapping;

    bool operator==(const ScenarioDocument&) const = default;
};

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline const ordered_json& require_field(const ordered_json& object, const std::string& key,
                                         const std::string& path) {
    if (!object.is_object()) {
        raise(errc::syntax_error, "'" + path + "' must be an object");
    }
    auto it = object.find(key);
    if (it == object.end()) {
        raise(errc::missing_field, "'" + (path.empty() ? key : path + "." + key) +
                                       "' is required");
    }
    return *it;
}

inline double require_number(const ordered_json& object, const std::string& key,
                             const std::string& path) {
    const auto& value = require_field(object, key, path);
    if (!value.is_number()) {
        raise(errc::syntax_error, "'" + path + "." + key + "' must be a number");
    }
    return value.get<double>();
}

inline std::string require_string(const ordered_json& object, const std::string& key,
                                  const std::string& path) {
    const auto& value = require_field(object, key, path);
    if (!value.is_string()) {
        raise(errc::syntax_error, "'" + path + "." + key + "' must be a string");
    }
    return value.get<std::string>();
}

inline const ordered_json& require_array(const ordered_json& object, const std::string& key,
                                         const std::string& path) {
    const auto& value = require_field(object, key, path);
    if (!value.is_array()) {
        raise(errc::syntax_error, "'" + path + "." + key + "' must be an array");
    }
    return value;
}

inline std::optional<double> optional_number(const ordered_json& object,
                                             const std::string& key,
                                             const std::string& path) {
    if (!object.is_object() || !object.contains(key)) return std::nullopt;
    const auto& value = object.at(key);
    if (value.is_null()) return std::nullopt;
    if (!value.is_number()) {
        raise(errc::syntax_error, "'" + path + "." + key + "' must be a number");
    }
    return value.get<double>();
}

inline std::string optional_string(const ordered_json& object, const std::string& key) {
    if (!object.is_object() || !object.contains(key) || !object.at(key).is_string()) {
        return {};
    }
    return object.at(key).get<std::string>();
}

inline FailureModel parse_model(const ordered_json& node, const std::string& path) {
    const std::string kind = require_string(node, "kind", path);
    if (kind == "binary") {
        return BinaryModel{require_number(node, "pfd", path)};
    }
    if (kind == "point_mass") {
        return PointMassModel{require_number(node, "q", path)};
    }
    if (kind == "proportional") {
        ProportionalModel model;
        model.label = optional_string(node, "label");
        model.expected_fraction = require_number(node, "expected_fraction", path);
        if (node.contains("params")) {
            const auto& params = node.at("params");
            if (!params.is_object()) {
                raise(errc::syntax_error, "'" + path + ".params' must be an object");
            }
            for (const auto& [key, value] : params.items()) {
                if (!value.is_number()) {
                    raise(errc::syntax_error,
                          "'" + path + ".params." + key + "' must be a number");
                }
                model.params[key] = value.get<double>();
            }
        }
        return model;
    }
    if (kind == "modular_binomial") {
        ModularBinomialModel model;
        model.module_pfd = require_number(node, "module_pfd", path);
        if (node.contains("module_count") && !node.at("module_count").is_null()) {
            const auto& count = node.at("module_count");
            if (!count.is_number_integer()) {
                raise(errc::syntax_error, "'" + path + ".module_count' must be an integer");
            }
            model.module_count = count.get<std::int64_t>();
        }
        return model;
    }
    if (kind == "beta_density") {
        return BetaDensityModel{require_number(node, "alpha", path),
                                require_number(node, "beta", path)};
    }
    if (kind == "empirical") {
        EmpiricalModel model;
        const auto& support = require_array(node, "support", path);
        for (std::size_t i = 0; i < support.size(); ++i) {
            const std::string atom_path = path + ".support[" + std::to_string(i) + "]";
            model.support.push_back({require_number(support[i], "value", atom_path),
                                     require_number(support[i], "probability", atom_path)});
        }
        return model;
    }
    raise(errc::unknown_model_kind, "'" + path + ".kind' value '" + kind +
                                        "' is not a known failure model");
}

inline ordered_json model_to_json(const FailureModel& model) {
    ordered_json node;
    node["kind"] = model_kind_name(model);
    struct Visitor {
        ordered_json& node;

        void operator()(const BinaryModel& m) const { node["pfd"] = m.pfd; }
        void operator()(const PointMassModel& m) const { node["q"] = m.q; }
        void operator()(const ProportionalModel& m) const {
            node["label"] = m.label;
            node["expected_fraction"] = m.expected_fraction;
            if (!m.params.empty()) {
                ordered_json params;
                for (const auto& [key, value] : m.params) params[key] = value;
                node["params"] = params;
            }
        }
        void operator()(const ModularBinomialModel& m) const {
            if (m.module_count) node["module_count"] = *m.module_count;
            node["module_pfd"] = m.module_pfd;
        }
        void operator()(const BetaDensityModel& m) const {
            node["alpha"] = m.alpha;
            node["beta"] = m.beta;
        }
        void operator()(const EmpiricalModel& m) const {
            ordered_json support = ordered_json::array();
            for (const auto& atom : m.support) {
                support.push_back({{"value", atom.value}, {"probability", atom.probability}});
            }
            node["support"] = support;
        }
    };
    std::visit(Visitor{node}, model);
    return node;
}

inline bool is_blank(const std::string& text) {
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

} // namespace detail

/// Structural parse of a scenario document: field presence and types only.
/// Semantic checks live in validate_scenario.
inline ScenarioDocument parse_scenario(const std::string& text) {
    if (detail::is_blank(text)) {
        raise(errc::missing_field,
              "scenario document is empty; expected a JSON object with metadata, "
              "hazardous_event, consequence, functions, subsystems, and mapping");
    }

    detail::ordered_json root;
    try {
        root = detail::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        raise(errc::syntax_error, e.what());
    }
    if (!root.is_object()) {
        raise(errc::syntax_error, "top-level value must be an object");
    }

    ScenarioDocument doc;

    const auto& metadata = detail::require_field(root, "metadata", "");
    doc.name = detail::require_string(metadata, "name", "metadata");
    doc.description = detail::optional_string(metadata, "description");
    doc.severity_unit = detail::optional_string(metadata, "severity_unit");

    const auto& hazardous_event = detail::require_field(root, "hazardous_event", "");
    doc.hazardous_event_frequency =
        detail::require_number(hazardous_event, "frequency_per_year", "hazardous_event");
    if (hazardous_event.contains("external_factors")) {
        const auto& factors =
            detail::require_array(hazardous_event, "external_factors", "hazardous_event");
        for (std::size_t i = 0; i < factors.size(); ++i) {
            const std::string path =
                "hazardous_event.external_factors[" + std::to_string(i) + "]";
            doc.external_factors.push_back(
                {detail::require_string(factors[i], "name", path),
                 detail::require_number(factors[i], "probability", path)});
        }
    }

    const auto& consequence = detail::require_field(root, "consequence", "");
    doc.c_min = detail::require_number(consequence, "c_min", "consequence");
    doc.c_max = detail::require_number(consequence, "c_max", "consequence");
    doc.tolerable_risk = detail::optional_number(consequence, "tolerable_risk", "consequence");
    if (consequence.contains("segments")) {
        const auto& segments = detail::require_array(consequence, "segments", "consequence");
        for (std::size_t i = 0; i < segments.size(); ++i) {
            const std::string path = "consequence.segments[" + std::to_string(i) + "]";
            ConsequenceSegment segment;
            segment.name = detail::require_string(segments[i], "name", path);
            segment.severity = detail::require_number(segments[i], "severity", path);
            segment.tolerable_frequency =
                detail::require_number(segments[i], "tolerable_frequency", path);
            segment.estimated_frequency =
                detail::optional_number(segments[i], "estimated_frequency", path);
            doc.segments.push_back(std::move(segment));
        }
    }

    const auto& functions = detail::require_array(root, "functions", "");
    for (std::size_t i = 0; i < functions.size(); ++i) {
        const std::string path = "functions[" + std::to_string(i) + "]";
        doc.functions.push_back({detail::require_string(functions[i], "id", path),
                                 detail::require_number(functions[i], "contribution", path)});
    }

    const auto& subsystems = detail::require_array(root, "subsystems", "");
    for (std::size_t i = 0; i < subsystems.size(); ++i) {
        const std::string path = "subsystems[" + std::to_string(i) + "]";
        SubsystemSpec spec;
        spec.id = detail::require_string(subsystems[i], "id", path);
        spec.model = detail::parse_model(detail::require_field(subsystems[i], "model", path),
                                         path + ".model");
        doc.subsystems.push_back(std::move(spec));
    }

    const auto& mapping = detail::require_array(root, "mapping", "");
    for (std::size_t i = 0; i < mapping.size(); ++i) {
        const std::string path = "mapping[" + std::to_string(i) + "]";
        MappingEntry entry;
        entry.subsystem = detail::require_string(mapping[i], "subsystem", path);
        const auto& ids = detail::require_array(mapping[i], "functions", path);
        for (std::size_t n = 0; n < ids.size(); ++n) {
            if (!ids[n].is_string()) {
                raise(errc::syntax_error,
                      "'" + path + ".functions[" + std::to_string(n) + "]' must be a string");
            }
            entry.functions.push_back(ids[n].get<std::string>());
        }
        doc.mapping.push_back(std::move(entry));
    }

    return doc;
}

/// Serializes a document back to scenario-file JSON. Numbers round-trip
/// exactly; parse(emit_scenario(doc)) equals doc field for field.
inline std::string emit_scenario(const ScenarioDocument& doc) {
    detail::ordered_json root;
    root["metadata"] = {{"name", doc.name},
                        {"description", doc.description},
                        {"severity_unit", doc.severity_unit}};

    detail::ordered_json hazardous_event;
    hazardous_event["frequency_per_year"] = doc.hazardous_event_frequency;
    detail::ordered_json factors = detail::ordered_json::array();
    for (const auto& factor : doc.external_factors) {
        factors.push_back({{"name", factor.name}, {"probability", factor.probability}});
    }
    hazardous_event["external_factors"] = factors;
    root["hazardous_event"] = hazardous_event;

    detail::ordered_json consequence;
    consequence["c_min"] = doc.c_min;
    consequence["c_max"] = doc.c_max;
    if (doc.tolerable_risk) consequence["tolerable_risk"] = *doc.tolerable_risk;
    detail::ordered_json segments = detail::ordered_json::array();
    for (const auto& segment : doc.segments) {
        detail::ordered_json node;
        node["name"] = segment.name;
        node["severity"] = segment.severity;
        node["tolerable_frequency"] = segment.tolerable_frequency;
        if (segment.estimated_frequency) {
            node["estimated_frequency"] = *segment.estimated_frequency;
        }
        segments.push_back(node);
    }
    consequence["segments"] = segments;
    root["consequence"] = consequence;

    detail::ordered_json functions = detail::ordered_json::array();
    for (const auto& function : doc.functions) {
        functions.push_back({{"id", function.id}, {"contribution", function.contribution}});
    }
    root["functions"] = functions;

    detail::ordered_json subsystems = detail::ordered_json::array();
    for (const auto& subsystem : doc.subsystems) {
        subsystems.push_back(
            {{"id", subsystem.id}, {"model", detail::model_to_json(subsystem.model)}});
    }
    root["subsystems"] = subsystems;

    detail::ordered_json mapping = detail::ordered_json::array();
    for (const auto& entry : doc.mapping) {
        mapping.push_back({{"subsystem", entry.subsystem}, {"functions", entry.functions}});
    }
    root["mapping"] = mapping;

    return root.dump(2) + "\n";
}

/// Builds a Scenario from a document, reconstructing the mapping matrix.
/// Reference problems (unknown ids, duplicate adjacency rows) are reported
/// as issues rather than thrown so they can be listed together with the
/// semantic validation.
inline Scenario build_scenario(const ScenarioDocument& doc,
                               std::vector<ValidationIssue>& issues) {
    Scenario scenario;
    scenario.name = doc.name;
    scenario.hazardous_event_frequency = doc.hazardous_event_frequency;
    scenario.external_factors = doc.external_factors;
    scenario.consequence.c_min = doc.c_min;
    scenario.consequence.c_max = doc.c_max;
    scenario.consequence.unit = doc.severity_unit;
    scenario.consequence.segments = doc.segments;
    scenario.consequence.tolerable_risk_override = doc.tolerable_risk;
    scenario.functions = doc.functions;
    scenario.subsystems = doc.subsystems;

    scenario.mapping = MappingMatrix(doc.subsystems.size(), doc.functions.size());
    std::set<std::string> seen;
    for (const auto& entry : doc.mapping) {
        auto j = scenario.index_of_subsystem(entry.subsystem);
        if (!j) {
            issues.push_back({IssueSeverity::error, errc::dimension_mismatch,
                              "mapping references unknown subsystem '" + entry.subsystem +
                                  "'"});
            continue;
        }
        if (!seen.insert(entry.subsystem).second) {
            issues.push_back({IssueSeverity::warning, errc::duplicate_id,
                              "mapping lists subsystem '" + entry.subsystem +
                                  "' more than once; rows were merged"});
        }
        for (const auto& function_id : entry.functions) {
            auto k = scenario.index_of_function(function_id);
            if (!k) {
                issues.push_back({IssueSeverity::error, errc::dimension_mismatch,
                                  "mapping references unknown function '" + function_id +
                                      "'"});
                continue;
            }
            scenario.mapping.set(*j, *k, true);
        }
    }
    return scenario;
}

struct ScenarioLoad {
    ScenarioDocument document;
    ValidationResult validation;

    bool ok() const { return validation.ok(); }
    const Scenario& scenario() const { return *validation.scenario; }
};

/// Parse, build, and validate in one step. Throws on structural parse
/// failures; semantic problems are returned in the validation result.
inline ScenarioLoad load_scenario_from_text(const std::string& text,
                                            const ValidateOptions& options = {}) {
    ScenarioLoad load;
    load.document = parse_scenario(text);
    std::vector<ValidationIssue> build_issues;
    Scenario scenario = build_scenario(load.document, build_issues);
    load.validation = validate_scenario(scenario, options);
    load.validation.issues.insert(load.validation.issues.begin(), build_issues.begin(),
                                  build_issues.end());
    bool build_errors = false;
    for (const auto& issue : build_issues) {
        if (issue.severity == IssueSeverity::error) build_errors = true;
    }
    if (build_errors) load.validation.scenario.reset();
    return load;
}

inline ScenarioLoad load_scenario_file(const std::string& path,
                                       const ValidateOptions& options = {}) {
    std::ifstream input(path, std::ios::binary);
    if (!input) {
        raise(errc::syntax_error, "cannot read scenario file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << input.rdbuf();
    return load_scenario_from_text(buffer.str(), options);
}

/// Returns the validated scenario or throws one Error that aggregates every
/// violation message.
inline const Scenario& require_scenario(const ScenarioLoad& load) {
    if (!load.ok()) {
        std::string message = "scenario '" + load.document.name + "' is invalid:";
        errc first = errc::range_violation;
        bool first_set = false;
        for (const auto& issue : load.validation.issues) {
            if (issue.severity != IssueSeverity::error) continue;
            if (!first_set) {
                first = issue.code;
                first_set = true;
            }
            message += "\n  - [" + std::string(errc_name(issue.code)) + "] " + issue.message;
        }
        raise(first, message);
    }
    return load.scenario();
}

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------

enum class ReportFormat { table, csv, json };

inline std::optional<ReportFormat> report_format_from_name(const std::string& name) {
    if (name == "table") return ReportFormat::table;
    if (name == "csv") return ReportFormat::csv;
    if (name == "json") return ReportFormat::json;
    return std::nullopt;
}

namespace detail {

/// 4 significant figures for human tables.
inline std::string fmt_table(double value) {
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), "%.4g", value);
    return buffer;
}

/// Shortest exact representation, reused for csv cells.
inline std::string fmt_full(double value) {
    return ordered_json(value).dump();
}

inline std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string escaped = "\"";
    for (char c : cell) {
        if (c == '"') escaped += '"';
        escaped += c;
    }
    escaped += '"';
    return escaped;
}

inline std::string external_factors_line(const Scenario& scenario) {
    std::string line;
    for (const auto& factor : scenario.external_factors) {
        if (!line.empty()) line += ", ";
        line += factor.name + "=" + fmt_table(factor.probability);
    }
    return line;
}

inline ordered_json targets_to_json(const Scenario& scenario,
                                    std::span<const double> targets) {
    ordered_json node;
    for (std::size_t j = 0; j < targets.size(); ++j) {
        node[scenario.subsystems[j].id] = targets[j];
    }
    return node;
}

inline ordered_json design_targets_to_json(const std::vector<DesignTarget>& targets) {
    ordered_json array = ordered_json::array();
    for (const auto& target : targets) {
        array.push_back({{"subsystem", target.subsystem_id},
                         {"kind", design_target_kind_name(target.kind)},
                         {"value", target.value},
                         {"narrative", target.narrative}});
    }
    return array;
}

inline std::string subsystem_csv_block(const Scenario& scenario,
                                       std::span<const double> targets,
                                       const std::vector<DesignTarget>& designs) {
    std::string out = "subsystem,target,design_kind,design_value,narrative\n";
    for (std::size_t j = 0; j < targets.size(); ++j) {
        out += csv_escape(scenario.subsystems[j].id) + "," + fmt_full(targets[j]) + "," +
               design_target_kind_name(designs[j].kind) + "," + fmt_full(designs[j].value) +
               "," + csv_escape(designs[j].narrative) + "\n";
    }
    return out;
}

inline std::string subsystem_table_block(const Scenario& scenario,
                                         std::span<const double> targets,
                                         const std::vector<DesignTarget>& designs) {
    std::size_t id_width = std::string("subsystem").size();
    for (const auto& subsystem : scenario.subsystems) {
        id_width = std::max(id_width, subsystem.id.size());
    }
    std::ostringstream out;
    out << "targets:\n";
    out << "  " << std::left << std::setw(static_cast<int>(id_width + 2)) << "subsystem"
        << std::setw(12) << "E[q]"
        << "design requirement\n";
    for (std::size_t j = 0; j < targets.size(); ++j) {
        out << "  " << std::left << std::setw(static_cast<int>(id_width + 2))
            << scenario.subsystems[j].id << std::setw(12) << fmt_table(targets[j])
            << designs[j].narrative << "\n";
    }
    return out.str();
}

} // namespace detail

/// How the risk reduction factor is defined; with shared subsystems a
/// per-function reading would differ, so reports state the convention.
inline constexpr const char* kRrfBasis =
    "risk with every function failed, divided by the tolerable risk";

/// Report for a what-if evaluation at a fixed expected-failure vector.
inline std::string emit_assessment_report(const Scenario& scenario,
                                          std::span<const double> targets,
                                          const RiskAssessment& assessment,
                                          ReportFormat format) {
    const auto designs = derive_design_targets(targets, scenario.subsystems);
    const std::string unit = scenario.consequence.unit;
    const std::string unit_suffix = unit.empty() ? "" : " " + unit;
    const std::string rate_suffix = unit.empty() ? " /yr" : " " + unit + "/yr";

    switch (format) {
        case ReportFormat::json: {
            detail::ordered_json root;
            root["report"] = "assessment";
            root["scenario"] = scenario.name;
            root["severity_unit"] = unit;
            root["verdict"] = verdict_name(assessment.verdict);
            root["expected_consequence"] = assessment.expected_consequence;
            root["tolerable_expected_consequence"] =
                assessment.tolerable_expected_consequence;
            root["risk"] = assessment.risk;
            root["tolerable_risk"] = assessment.tolerable_risk;
            root["slack"] = assessment.slack;
            root["targets"] = detail::targets_to_json(scenario, targets);
            root["design_targets"] = detail::design_targets_to_json(designs);
            return root.dump(2) + "\n";
        }
        case ReportFormat::csv: {
            std::string out = detail::subsystem_csv_block(scenario, targets, designs);
            out += "metric,value\n";
            out += "expected_consequence," +
                   detail::fmt_full(assessment.expected_consequence) + "\n";
            out += "tolerable_expected_consequence," +
                   detail::fmt_full(assessment.tolerable_expected_consequence) + "\n";
            out += "risk," + detail::fmt_full(assessment.risk) + "\n";
            out += "tolerable_risk," + detail::fmt_full(assessment.tolerable_risk) + "\n";
            out += "slack," + detail::fmt_full(assessment.slack) + "\n";
            out += std::string("verdict,") + verdict_name(assessment.verdict) + "\n";
            return out;
        }
        case ReportFormat::table: {
            std::ostringstream out;
            out << "scenario: " << scenario.name << "\n";
            out << "verdict: " << verdict_name(assessment.verdict) << "\n";
            out << "expected consequence: "
                << detail::fmt_table(assessment.expected_consequence) << unit_suffix << "\n";
            out << "tolerable expected consequence: "
                << detail::fmt_table(assessment.tolerable_expected_consequence) << unit_suffix
                << "\n";
            out << "risk: " << detail::fmt_table(assessment.risk) << rate_suffix << "\n";
            out << "tolerable risk: " << detail::fmt_table(assessment.tolerable_risk)
                << rate_suffix << "\n";
            out << "slack: " << detail::fmt_table(assessment.slack) << unit_suffix << "\n";
            if (!scenario.external_factors.empty()) {
                out << "external factors: " << detail::external_factors_line(scenario)
                    << "\n";
            }
            out << detail::subsystem_table_block(scenario, targets, designs);
            return out.str();
        }
    }
    return {};
}

/// Report for a solved allocation.
inline std::string emit_allocation_report(const Scenario& scenario,
                                          const AllocationResult& result,
                                          ReportFormat format) {
    const std::string unit = scenario.consequence.unit;
    const std::string unit_suffix = unit.empty() ? "" : " " + unit;
    const std::string rate_suffix = unit.empty() ? " /yr" : " " + unit + "/yr";
    const Verdict verdict = result.slack >= verdict_slack_floor(scenario) ? Verdict::pass
                                                                          : Verdict::fail;

    switch (format) {
        case ReportFormat::json: {
            detail::ordered_json root;
            root["report"] = "allocation";
            root["scenario"] = scenario.name;
            root["severity_unit"] = unit;
            root["status"] = allocation_status_name(result.status);
            root["verdict"] = verdict_name(verdict);
            root["targets"] = detail::targets_to_json(scenario, result.targets);
            root["scale"] = result.scale;
            root["success_target"] = result.success_target;
            root["achieved_weighted_success"] = result.achieved_weighted_success;
            root["expected_consequence"] = result.achieved_expected_consequence;
            root["tolerable_expected_consequence"] = result.tolerable_expected_consequence;
            root["risk"] = result.achieved_risk;
            root["slack"] = result.slack;
            root["bisection_tolerance"] = result.tolerance;
            if (result.rrf) {
                root["rrf"] = *result.rrf;
                root["rrf_basis"] = kRrfBasis;
            } else {
                root["rrf"] = nullptr;
            }
            root["sil"] = sil_band_name(result.sil);
            root["design_targets"] = detail::design_targets_to_json(result.design_targets);
            return root.dump(2) + "\n";
        }
        case ReportFormat::csv: {
            std::string out = detail::subsystem_csv_block(scenario, result.targets,
                                                          result.design_targets);
            out += "metric,value\n";
            out += "expected_consequence," +
                   detail::fmt_full(result.achieved_expected_consequence) + "\n";
            out += "tolerable_expected_consequence," +
                   detail::fmt_full(result.tolerable_expected_consequence) + "\n";
            out += "risk," + detail::fmt_full(result.achieved_risk) + "\n";
            out += "slack," + detail::fmt_full(result.slack) + "\n";
            out += std::string("verdict,") + verdict_name(verdict) + "\n";
            out += "scale," + detail::fmt_full(result.scale) + "\n";
            out += "success_target," + detail::fmt_full(result.success_target) + "\n";
            out += "achieved_weighted_success," +
                   detail::fmt_full(result.achieved_weighted_success) + "\n";
            out += std::string("status,") + allocation_status_name(result.status) + "\n";
            out += "rrf," + (result.rrf ? detail::fmt_full(*result.rrf) : "n/a") + "\n";
            out += std::string("sil,") + sil_band_name(result.sil) + "\n";
            out += "bisection_tolerance," + detail::fmt_full(result.tolerance) + "\n";
            return out;
        }
        case ReportFormat::table: {
            std::ostringstream out;
            out << "scenario: " << scenario.name << "\n";
            out << "status: " << allocation_status_name(result.status) << "\n";
            out << "verdict: " << verdict_name(verdict) << "\n";
            out << "expected consequence: "
                << detail::fmt_table(result.achieved_expected_consequence) << unit_suffix
                << "\n";
            out << "tolerable expected consequence: "
                << detail::fmt_table(result.tolerable_expected_consequence) << unit_suffix
                << "\n";
            out << "risk: " << detail::fmt_table(result.achieved_risk) << rate_suffix
                << "\n";
            out << "slack: " << detail::fmt_table(result.slack) << unit_suffix << "\n";
            out << "weighted success: "
                << detail::fmt_table(result.achieved_weighted_success) << " (target "
                << detail::fmt_table(result.success_target) << ")\n";
            out << "scale factor: " << detail::fmt_table(result.scale) << "\n";
            if (!scenario.external_factors.empty()) {
                out << "external factors: " << detail::external_factors_line(scenario)
                    << "\n";
            }
            if (result.rrf) {
                out << "RRF: " << detail::fmt_table(*result.rrf) << "\n";
            }
            out << "SIL: " << sil_band_name(result.sil) << "\n";
            out << detail::subsystem_table_block(scenario, result.targets,
                                                 result.design_targets);
            return out.str();
        }
    }
    return {};
}

/// Report of the tolerable risk and the tolerable expected consequence.
inline std::string emit_tolerance_report(const Scenario& scenario, ReportFormat format) {
    const double effective = tolerable_risk(scenario.consequence);
    const double tolerable_ec = tolerable_expected_consequence(scenario, effective);
    const double success_target = required_success_target(scenario, tolerable_ec);
    std::optional<double> from_segments;
    if (!scenario.consequence.segments.empty()) {
        ConsequenceModel segments_only = scenario.consequence;
        segments_only.tolerable_risk_override.reset();
        from_segments = tolerable_risk(segments_only);
    }
    const std::string unit = scenario.consequence.unit;
    const std::string unit_suffix = unit.empty() ? "" : " " + unit;
    const std::string rate_suffix = unit.empty() ? " /yr" : " " + unit + "/yr";
    const char* source =
        scenario.consequence.tolerable_risk_override ? "override" : "segments";

    switch (format) {
        case ReportFormat::json: {
            detail::ordered_json root;
            root["report"] = "tolerance";
            root["scenario"] = scenario.name;
            root["severity_unit"] = unit;
            root["tolerable_risk"] = effective;
            root["tolerable_risk_source"] = source;
            if (scenario.consequence.tolerable_risk_override) {
                root["tolerable_risk_override"] =
                    *scenario.consequence.tolerable_risk_override;
            }
            if (from_segments) {
                root["tolerable_risk_from_segments"] = *from_segments;
            }
            root["tolerable_expected_consequence"] = tolerable_ec;
            root["required_weighted_success"] = success_target;
            return root.dump(2) + "\n";
        }
        case ReportFormat::csv: {
            std::string out = "metric,value\n";
            out += "tolerable_risk," + detail::fmt_full(effective) + "\n";
            out += std::string("tolerable_risk_source,") + source + "\n";
            if (from_segments) {
                out += "tolerable_risk_from_segments," + detail::fmt_full(*from_segments) +
                       "\n";
            }
            out += "tolerable_expected_consequence," + detail::fmt_full(tolerable_ec) + "\n";
            out += "required_weighted_success," + detail::fmt_full(success_target) + "\n";
            return out;
        }
        case ReportFormat::table: {
            std::ostringstream out;
            out << "scenario: " << scenario.name << "\n";
            out << "tolerable risk: " << detail::fmt_table(effective) << rate_suffix
                << " (source: " << source << ")\n";
            if (from_segments && scenario.consequence.tolerable_risk_override) {
                out << "tolerable risk from segments: " << detail::fmt_table(*from_segments)
                    << rate_suffix << "\n";
            }
            out << "tolerable expected consequence: " << detail::fmt_table(tolerable_ec)
                << unit_suffix << "\n";
            out << "required weighted success: " << detail::fmt_table(success_target)
                << "\n";
            return out.str();
        }
    }
    return {};
}

/// Report comparing the analytic expected consequence with its Monte Carlo
/// estimate.
inline std::string emit_mc_report(const Scenario& scenario, const MCEstimate& estimate,
                                  double analytic, ReportFormat format) {
    const double difference = estimate.mean - analytic;
    std::optional<double> z_score;
    if (estimate.std_error > 0.0) {
        z_score = difference / estimate.std_error;
    } else if (difference == 0.0) {
        z_score = 0.0;
    }
    switch (format) {
        case ReportFormat::json: {
            detail::ordered_json root;
            root["report"] = "monte_carlo";
            root["scenario"] = scenario.name;
            root["severity_unit"] = scenario.consequence.unit;
            root["analytic_expected_consequence"] = analytic;
            root["mc_mean"] = estimate.mean;
            root["mc_std_error"] = estimate.std_error;
            root["samples"] = estimate.samples;
            root["seed"] = estimate.seed;
            root["difference"] = difference;
            if (z_score) {
                root["z_score"] = *z_score;
            } else {
                root["z_score"] = nullptr;
            }
            root["quadrature_tolerance"] = kDefaultQuadratureTol;
            return root.dump(2) + "\n";
        }
        case ReportFormat::csv: {
            std::string out = "metric,value\n";
            out += "analytic_expected_consequence," + detail::fmt_full(analytic) + "\n";
            out += "mc_mean," + detail::fmt_full(estimate.mean) + "\n";
            out += "mc_std_error," + detail::fmt_full(estimate.std_error) + "\n";
            out += "samples," + std::to_string(estimate.samples) + "\n";
            out += "seed," + std::to_string(estimate.seed) + "\n";
            out += "difference," + detail::fmt_full(difference) + "\n";
            out += "z_score," + (z_score ? detail::fmt_full(*z_score) : "n/a") + "\n";
            return out;
        }
        case ReportFormat::table: {
            std::ostringstream out;
            out << "scenario: " << scenario.name << "\n";
            out << "analytic expected consequence: " << detail::fmt_table(analytic) << "\n";
            out << "monte carlo mean: " << detail::fmt_table(estimate.mean) << "\n";
            out << "monte carlo std error: " << detail::fmt_table(estimate.std_error)
                << "\n";
            out << "samples: " << estimate.samples << "\n";
            out << "seed: " << estimate.seed << "\n";
            out << "z-score: " << (z_score ? detail::fmt_table(*z_score) : "n/a") << "\n";
            return out.str();
        }
    }
    return {};
}

/// Report of the risk reduction factor and its SIL band.
inline std::string emit_sil_report(const Scenario& scenario, double tolerable_risk_value,
                                   double rrf_value, SilBand band, ReportFormat format) {
    switch (format) {
        case ReportFormat::json: {
            detail::ordered_json root;
            root["report"] = "sil";
            root["scenario"] = scenario.name;
            root["tolerable_risk"] = tolerable_risk_value;
            root["unmitigated_risk"] = rrf_value * tolerable_risk_value;
            root["rrf"] = rrf_value;
            root["rrf_basis"] = kRrfBasis;
            root["equivalent_pfd"] = 1.0 / rrf_value;
            root["sil"] = sil_band_name(band);
            return root.dump(2) + "\n";
        }
        case ReportFormat::csv: {
            std::string out = "metric,value\n";
            out += "tolerable_risk," + detail::fmt_full(tolerable_risk_value) + "\n";
            out += "rrf," + detail::fmt_full(rrf_value) + "\n";
            out += "rrf_basis," + detail::csv_escape(kRrfBasis) + "\n";
            out += "equivalent_pfd," + detail::fmt_full(1.0 / rrf_value) + "\n";
            out += std::string("sil,") + sil_band_name(band) + "\n";
            return out;
        }
        case ReportFormat::table: {
            std::ostringstream out;
            out << "scenario: " << scenario.name << "\n";
            out << "tolerable risk: " << detail::fmt_table(tolerable_risk_value) << "\n";
            out << "RRF: " << detail::fmt_table(rrf_value) << "\n";
            out << "RRF basis: " << kRrfBasis << "\n";
            out << "equivalent PFD: " << detail::fmt_table(1.0 / rrf_value) << "\n";
            out << "SIL: " << sil_band_name(band) << "\n";
            return out.str();
        }
    }
    return {};
}

} // namespace riskalloc
