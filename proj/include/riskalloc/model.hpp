#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "riskalloc/detail/numeric.hpp"
#include "riskalloc/errors.hpp"
#include "riskalloc/expectation.hpp"

namespace riskalloc {

inline constexpr double kContributionSumTolerance = 1e-9;

struct ExternalFactor {
    std::string name;
    double probability = 1.0;

    bool operator==(const ExternalFactor&) const = default;
};

struct FunctionSpec {
    std::string id;
    double contribution = 0.0; // share of the total mitigation effort, in [0, 1]

    bool operator==(const FunctionSpec&) const = default;
};

struct SubsystemSpec {
    std::string id;
    FailureModel model;

    bool operator==(const SubsystemSpec&) const = default;
};

/// l x m binary matrix; cell (j, k) is 1 when subsystem j is necessary for
/// function k.
class MappingMatrix {
public:
    MappingMatrix() = default;
    MappingMatrix(std::size_t subsystems, std::size_t functions)
        : rows_(subsystems), cols_(functions), cells_(subsystems * functions, 0) {}

    std::size_t subsystem_count() const { return rows_; }
    std::size_t function_count() const { return cols_; }

    bool at(std::size_t subsystem, std::size_t function) const {
        check_index(subsystem, function);
        return cells_[subsystem * cols_ + function] != 0;
    }

    void set(std::size_t subsystem, std::size_t function, bool necessary) {
        check_index(subsystem, function);
        cells_[subsystem * cols_ + function] = necessary ? 1 : 0;
    }

    std::size_t column_sum(std::size_t function) const {
        std::size_t count = 0;
        for (std::size_t j = 0; j < rows_; ++j) {
            if (at(j, function)) ++count;
        }
        return count;
    }

    std::size_t row_sum(std::size_t subsystem) const {
        std::size_t count = 0;
        for (std::size_t k = 0; k < cols_; ++k) {
            if (at(subsystem, k)) ++count;
        }
        return count;
    }

    bool operator==(const MappingMatrix&) const = default;

private:
    void check_index(std::size_t subsystem, std::size_t function) const {
        if (subsystem >= rows_ || function >= cols_) {
            raise(errc::index_out_of_range,
                  "mapping index (" + std::to_string(subsystem) + ", " +
                      std::to_string(function) + ") outside " + std::to_string(rows_) + "x" +
                      std::to_string(cols_));
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> cells_;
};

struct ConsequenceSegment {
    std::string name;
    double severity = 0.0;            // on the scenario's severity scale
    double tolerable_frequency = 0.0; // per year
    std::optional<double> estimated_frequency;

    bool operator==(const ConsequenceSegment&) const = default;
};

struct ConsequenceModel {
    double c_min = 0.0;
    double c_max = 0.0;
    std::string unit; // free-text severity scale label; never converted
    std::vector<ConsequenceSegment> segments;
    std::optional<double> tolerable_risk_override;

    bool operator==(const ConsequenceModel&) const = default;
};

struct Scenario {
    std::string name;
    double hazardous_event_frequency = 0.0; // occurrences per year
    std::vector<ExternalFactor> external_factors;
    ConsequenceModel consequence;
    std::vector<FunctionSpec> functions;
    std::vector<SubsystemSpec> subsystems;
    MappingMatrix mapping;

    std::size_t function_count() const { return functions.size(); }
    std::size_t subsystem_count() const { return subsystems.size(); }

    std::optional<std::size_t> index_of_function(const std::string& id) const {
        for (std::size_t k = 0; k < functions.size(); ++k) {
            if (functions[k].id == id) return k;
        }
        return std::nullopt;
    }

    std::optional<std::size_t> index_of_subsystem(const std::string& id) const {
        for (std::size_t j = 0; j < subsystems.size(); ++j) {
            if (subsystems[j].id == id) return j;
        }
        return std::nullopt;
    }

    double external_probability_product() const {
        double product = 1.0;
        for (const auto& factor : external_factors) product *= factor.probability;
        return product;
    }

    bool operator==(const Scenario&) const = default;
};

enum class IssueSeverity { error, warning };

struct ValidationIssue {
    IssueSeverity severity = IssueSeverity::error;
    errc code = errc::range_violation;
    std::string message;
};

struct ValidateOptions {
    /// Rescale contributions to sum to 1 instead of rejecting a violation;
    /// records a warning. Workshop-sourced numbers often carry rounding.
    bool normalize_contributions = false;
};

struct ValidationResult {
    std::vector<ValidationIssue> issues;
    /// Present iff no error-severity issue was found; equals the input
    /// scenario except for contribution normalization when requested.
    std::optional<Scenario> scenario;

    bool ok() const { return scenario.has_value(); }

    std::size_t error_count() const {
        std::size_t n = 0;
        for (const auto& issue : issues) {
            if (issue.severity == IssueSeverity::error) ++n;
        }
        return n;
    }
};

namespace detail {

inline void validate_model(const FailureModel& model, const std::string& context,
                           std::vector<ValidationIssue>& issues) {
    auto error = [&](errc code, const std::string& message) {
        issues.push_back({IssueSeverity::error, code, context + ": " + message});
    };
    struct Visitor {
        decltype(error)& err;

        void operator()(const BinaryModel& m) const {
            if (!(m.pfd >= 0.0 && m.pfd <= 1.0)) {
                err(errc::range_violation, "pfd must be in [0, 1]");
            }
        }
        void operator()(const PointMassModel& m) const {
            if (!(m.q >= 0.0 && m.q <= 1.0)) {
                err(errc::range_violation, "q must be in [0, 1]");
            }
        }
        void operator()(const ProportionalModel& m) const {
            if (!(m.expected_fraction >= 0.0 && m.expected_fraction <= 1.0)) {
                err(errc::range_violation, "expected_fraction must be in [0, 1]");
            }
            const double* alpha = find_param(m.params, "alpha");
            const double* beta = find_param(m.params, "beta");
            if ((alpha == nullptr) != (beta == nullptr)) {
                err(errc::range_violation,
                    "beta spread needs both alpha and beta parameters");
            } else if (alpha && beta) {
                if (!(*alpha > 0.0) || !(*beta > 0.0)) {
                    err(errc::range_violation, "beta spread parameters must be positive");
                } else {
                    const double mean = *alpha / (*alpha + *beta);
                    if (std::abs(mean - m.expected_fraction) > 1e-9) {
                        err(errc::range_violation,
                            "beta spread mean " + std::to_string(mean) +
                                " disagrees with expected_fraction " +
                                std::to_string(m.expected_fraction));
                    }
                }
            }
        }
        void operator()(const ModularBinomialModel& m) const {
            if (!(m.module_pfd >= 0.0 && m.module_pfd <= 1.0)) {
                err(errc::range_violation, "module_pfd must be in [0, 1]");
            }
            if (m.module_count && *m.module_count < 1) {
                err(errc::range_violation, "module_count must be positive");
            }
        }
        void operator()(const BetaDensityModel& m) const {
            if (!(m.alpha > 0.0) || !(m.beta > 0.0)) {
                err(errc::range_violation, "beta density shape parameters must be positive");
            }
        }
        void operator()(const EmpiricalModel& m) const {
            if (m.support.empty()) {
                err(errc::range_violation, "empirical support is empty");
                return;
            }
            NeumaierSum prob_sum;
            for (const auto& atom : m.support) {
                if (!(atom.value >= 0.0 && atom.value <= 1.0)) {
                    err(errc::range_violation, "support value " + std::to_string(atom.value) +
                                                   " outside [0, 1]");
                }
                if (!(atom.probability >= 0.0 && atom.probability <= 1.0)) {
                    err(errc::range_violation, "probability " +
                                                   std::to_string(atom.probability) +
                                                   " outside [0, 1]");
                }
                prob_sum.add(atom.probability);
            }
            if (std::abs(prob_sum.value() - 1.0) > kPmfSumTolerance) {
                err(errc::pmf_not_normalized,
                    "probabilities sum to " + std::to_string(prob_sum.value()));
            }
        }
    };
    std::visit(Visitor{error}, model);
}

} // namespace detail

/// Checks every structural invariant of a scenario and reports all
/// violations, not just the first. Validating an already valid scenario
/// returns it unchanged.
inline ValidationResult validate_scenario(const Scenario& input,
                                          const ValidateOptions& options = {}) {
    ValidationResult result;
    Scenario scenario = input;

    auto error = [&](errc code, const std::string& message) {
        result.issues.push_back({IssueSeverity::error, code, message});
    };
    auto warning = [&](errc code, const std::string& message) {
        result.issues.push_back({IssueSeverity::warning, code, message});
    };

    if (!(scenario.hazardous_event_frequency > 0.0)) {
        error(errc::range_violation, "hazardous_event_frequency must be positive");
    }
    for (const auto& factor : scenario.external_factors) {
        if (!(factor.probability > 0.0 && factor.probability <= 1.0)) {
            error(errc::range_violation,
                  "external factor '" + factor.name + "' probability must be in (0, 1]");
        }
    }

    if (scenario.functions.empty()) {
        error(errc::dimension_mismatch, "scenario declares no functions");
    }
    if (scenario.subsystems.empty()) {
        error(errc::dimension_mismatch, "scenario declares no subsystems");
    }

    std::set<std::string> function_ids;
    for (const auto& function : scenario.functions) {
        if (!function_ids.insert(function.id).second) {
            error(errc::duplicate_id, "duplicate function id '" + function.id + "'");
        }
        if (!(function.contribution >= 0.0 && function.contribution <= 1.0)) {
            error(errc::range_violation,
                  "function '" + function.id + "' contribution must be in [0, 1]");
        }
    }
    std::set<std::string> subsystem_ids;
    for (const auto& subsystem : scenario.subsystems) {
        if (!subsystem_ids.insert(subsystem.id).second) {
            error(errc::duplicate_id, "duplicate subsystem id '" + subsystem.id + "'");
        }
        detail::validate_model(subsystem.model, "subsystem '" + subsystem.id + "'",
                               result.issues);
    }

    detail::NeumaierSum contribution_sum;
    for (const auto& function : scenario.functions) {
        contribution_sum.add(function.contribution);
    }
    const double total = contribution_sum.value();
    if (!scenario.functions.empty() &&
        std::abs(total - 1.0) > kContributionSumTolerance) {
        if (options.normalize_contributions && total > 0.0) {
            for (auto& function : scenario.functions) {
                function.contribution /= total;
            }
            warning(errc::contribution_sum_violation,
                    "contributions summed to " + std::to_string(total) +
                        "; rescaled to sum to 1");
        } else {
            error(errc::contribution_sum_violation,
                  "contributions sum to " + std::to_string(total) + ", expected 1");
        }
    }

    const auto& mapping = scenario.mapping;
    if (mapping.subsystem_count() != scenario.subsystems.size() ||
        mapping.function_count() != scenario.functions.size()) {
        error(errc::dimension_mismatch,
              "mapping is " + std::to_string(mapping.subsystem_count()) + "x" +
                  std::to_string(mapping.function_count()) + " but the scenario has " +
                  std::to_string(scenario.subsystems.size()) + " subsystems and " +
                  std::to_string(scenario.functions.size()) + " functions");
    } else {
        for (std::size_t k = 0; k < scenario.functions.size(); ++k) {
            if (mapping.column_sum(k) == 0) {
                error(errc::empty_function_column,
                      "function '" + scenario.functions[k].id +
                          "' is mapped to no subsystem");
            }
        }
        for (std::size_t j = 0; j < scenario.subsystems.size(); ++j) {
            if (mapping.row_sum(j) == 0) {
                warning(errc::dimension_mismatch,
                        "subsystem '" + scenario.subsystems[j].id +
                            "' supports no function; it will not affect the result");
            }
        }
    }

    const auto& consequence = scenario.consequence;
    if (!(consequence.c_min >= 0.0)) {
        error(errc::range_violation, "c_min must be non-negative");
    }
    if (!(consequence.c_max > consequence.c_min)) {
        error(errc::range_violation, "c_max must exceed c_min");
    }
    for (std::size_t h = 0; h < consequence.segments.size(); ++h) {
        const auto& segment = consequence.segments[h];
        if (!(segment.severity >= 0.0)) {
            error(errc::range_violation,
                  "segment '" + segment.name + "' severity must be non-negative");
        }
        if (!(segment.tolerable_frequency > 0.0)) {
            error(errc::range_violation,
                  "segment '" + segment.name + "' tolerable_frequency must be positive");
        }
        if (segment.estimated_frequency && !(*segment.estimated_frequency >= 0.0)) {
            error(errc::range_violation,
                  "segment '" + segment.name + "' estimated_frequency must be non-negative");
        }
        if (h > 0 && segment.severity > consequence.segments[h - 1].severity) {
            error(errc::range_violation,
                  "segments must be sorted by severity descending ('" + segment.name +
                      "' breaks the order)");
        }
        if (segment.severity > consequence.c_max) {
            warning(errc::range_violation,
                    "segment '" + segment.name + "' severity exceeds c_max");
        }
    }

    if (result.error_count() == 0) {
        result.scenario = std::move(scenario);
    }
    return result;
}

/// Ids of the subsystems necessary for the given function, in declaration
/// order.
inline std::vector<std::string> subsystems_of(const Scenario& scenario,
                                              const std::string& function_id) {
    auto k = scenario.index_of_function(function_id);
    if (!k) {
        raise(errc::unknown_function, "no function with id '" + function_id + "'");
    }
    std::vector<std::string> ids;
    for (std::size_t j = 0; j < scenario.subsystem_count(); ++j) {
        if (scenario.mapping.at(j, *k)) {
            ids.push_back(scenario.subsystems[j].id);
        }
    }
    return ids;
}

} // namespace riskalloc
