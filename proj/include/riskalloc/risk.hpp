#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "riskalloc/detail/numeric.hpp"
#include "riskalloc/errors.hpp"
#include "riskalloc/model.hpp"

namespace riskalloc {

enum class Verdict { pass, fail };

inline const char* verdict_name(Verdict v) { return v == Verdict::pass ? "PASS" : "FAIL"; }

struct RiskAssessment {
    double expected_consequence = 0.0;            // severity units
    double risk = 0.0;                            // severity units per year
    double tolerable_risk = 0.0;                  // per year
    double tolerable_expected_consequence = 0.0;  // severity units
    double slack = 0.0;                           // tolerable minus achieved E[C]
    Verdict verdict = Verdict::fail;
};

namespace detail {

inline void check_failure_vector(std::span<const double> q, std::size_t expected,
                                 const char* what) {
    if (q.size() != expected) {
        raise(errc::dimension_mismatch, std::string(what) + " has length " +
                                            std::to_string(q.size()) + ", expected " +
                                            std::to_string(expected));
    }
    for (double value : q) {
        if (!(value >= 0.0 && value <= 1.0)) {
            raise(errc::range_violation, std::string(what) + " entry " +
                                             std::to_string(value) + " outside [0, 1]");
        }
    }
}

} // namespace detail

/// Success of function k: the product of (1 - q_j) over the subsystems the
/// mapping marks as necessary for k.
inline double function_success(std::span<const double> q, const MappingMatrix& mapping,
                               std::size_t k) {
    if (k >= mapping.function_count()) {
        raise(errc::index_out_of_range,
              "function index " + std::to_string(k) + " outside 0.." +
                  std::to_string(mapping.function_count()));
    }
    detail::check_failure_vector(q, mapping.subsystem_count(), "failure-degree vector");
    double success = 1.0;
    for (std::size_t j = 0; j < mapping.subsystem_count(); ++j) {
        if (mapping.at(j, k)) success *= 1.0 - q[j];
    }
    return success;
}

/// Contribution-weighted total success, sum of u_k * s_k(q). In [0, 1] for
/// valid scenarios.
inline double weighted_success(std::span<const double> q, const Scenario& scenario) {
    detail::check_failure_vector(q, scenario.subsystem_count(), "failure-degree vector");
    detail::NeumaierSum acc;
    for (std::size_t k = 0; k < scenario.function_count(); ++k) {
        double success = 1.0;
        for (std::size_t j = 0; j < scenario.subsystem_count(); ++j) {
            if (scenario.mapping.at(j, k)) success *= 1.0 - q[j];
        }
        acc.add(scenario.functions[k].contribution * success);
    }
    return acc.value();
}

/// Consequence severity at the failure degrees q: c_max minus the span
/// scaled by the weighted success. c_min when everything succeeds, c_max
/// when everything fails.
inline double consequence(std::span<const double> q, const Scenario& scenario) {
    const double span = scenario.consequence.c_max - scenario.consequence.c_min;
    return scenario.consequence.c_max - span * weighted_success(q, scenario);
}

/// Expected consequence severity from per-subsystem expected failure
/// degrees. Subsystem independence turns the expectation of each product
/// into the product of expectations, so this is the same arithmetic as
/// consequence() applied to E[q].
inline double expected_consequence(std::span<const double> expected_failures,
                                   const Scenario& scenario) {
    return consequence(expected_failures, scenario);
}

/// Expected risk per year: hazardous-event frequency times the product of
/// the external factor probabilities times E[C]. An empty factor list
/// multiplies by 1.
inline double risk(const Scenario& scenario, double expected_consequence_value) {
    if (!(expected_consequence_value >= 0.0)) {
        raise(errc::range_violation, "expected consequence must be non-negative");
    }
    return scenario.hazardous_event_frequency * scenario.external_probability_product() *
           expected_consequence_value;
}

/// Estimated risk as the sum of w_h * c_h over segments with estimated
/// frequencies.
inline double risk_from_segments(std::span<const ConsequenceSegment> segments) {
    detail::NeumaierSum acc;
    for (const auto& segment : segments) {
        if (!segment.estimated_frequency) {
            raise(errc::missing_estimated_frequency,
                  "segment '" + segment.name + "' has no estimated frequency");
        }
        acc.add(*segment.estimated_frequency * segment.severity);
    }
    return acc.value();
}

/// Tolerable risk: the explicit override wins; otherwise the sum of
/// tolerable frequency times severity over the segments.
inline double tolerable_risk(const ConsequenceModel& consequence_model) {
    if (consequence_model.tolerable_risk_override) {
        return *consequence_model.tolerable_risk_override;
    }
    if (consequence_model.segments.empty()) {
        raise(errc::no_tolerance_source,
              "no tolerable risk override and no consequence segments");
    }
    detail::NeumaierSum acc;
    for (const auto& segment : consequence_model.segments) {
        acc.add(segment.tolerable_frequency * segment.severity);
    }
    return acc.value();
}

/// Tolerable expected consequence: tolerable risk divided by the hazardous
/// event frequency and the external factor probabilities.
inline double tolerable_expected_consequence(const Scenario& scenario,
                                             double tolerable_risk_value) {
    const double divisor =
        scenario.hazardous_event_frequency * scenario.external_probability_product();
    if (!(divisor > 0.0)) {
        raise(errc::division_by_zero_frequency,
              "hazardous event frequency times external probabilities is not positive");
    }
    return tolerable_risk_value / divisor;
}

/// Verdict tolerance: slack may dip this far below zero before a Fail, to
/// absorb floating-point noise at the boundary.
inline double verdict_slack_floor(const Scenario& scenario) {
    return -1e-12 * (scenario.consequence.c_max - scenario.consequence.c_min);
}

/// Full risk picture at the given expected failure degrees.
inline RiskAssessment assess(const Scenario& scenario,
                             std::span<const double> expected_failures) {
    RiskAssessment assessment;
    assessment.expected_consequence = expected_consequence(expected_failures, scenario);
    assessment.risk = risk(scenario, assessment.expected_consequence);
    assessment.tolerable_risk = tolerable_risk(scenario.consequence);
    assessment.tolerable_expected_consequence =
        tolerable_expected_consequence(scenario, assessment.tolerable_risk);
    assessment.slack =
        assessment.tolerable_expected_consequence - assessment.expected_consequence;
    assessment.verdict =
        assessment.slack >= verdict_slack_floor(scenario) ? Verdict::pass : Verdict::fail;
    return assessment;
}

/// Category weight pair for fatality-equivalent severity conversion.
using FwiRatio = std::pair<std::string, double>;

/// Default fatalities-and-weighted-injuries equivalence table. The weights
/// are jurisdiction-specific policy values; override them where the local
/// authority publishes different ratios.
inline const std::vector<FwiRatio>& default_fwi_ratios() {
    static const std::vector<FwiRatio> ratios = {
        {"fatality", 1.0},
        {"permanent_disability", 0.333},
        {"hospitalisation", 0.1},
        {"medical_treatment", 0.005},
        {"first_aid", 0.001},
    };
    return ratios;
}

/// Converts casualty counts into fatality-equivalent severity using the
/// ratio table.
inline double severity_from_fwi(std::span<const FwiRatio> counts,
                                std::span<const FwiRatio> ratios) {
    detail::NeumaierSum acc;
    for (const auto& [category, count] : counts) {
        const FwiRatio* match = nullptr;
        for (const auto& ratio : ratios) {
            if (ratio.first == category) {
                match = &ratio;
                break;
            }
        }
        if (!match) {
            raise(errc::unknown_category, "no severity ratio for category '" + category + "'");
        }
        acc.add(count * match->second);
    }
    return acc.value();
}

inline double severity_from_fwi(std::span<const FwiRatio> counts) {
    return severity_from_fwi(counts, default_fwi_ratios());
}

} // namespace riskalloc
