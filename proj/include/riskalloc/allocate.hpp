#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <span>
#include <string>
#include <vector>

#include "riskalloc/errors.hpp"
#include "riskalloc/model.hpp"
#include "riskalloc/risk.hpp"

namespace riskalloc {

inline constexpr double kDefaultBisectionTol = 1e-9;

enum class Feasibility { always_satisfied, feasible, infeasible };

enum class SilBand { below_sil1, sil1, sil2, sil3, sil4, above_sil4, not_applicable };

inline const char* sil_band_name(SilBand band) {
    switch (band) {
        case SilBand::below_sil1: return "below SIL1";
        case SilBand::sil1: return "1";
        case SilBand::sil2: return "2";
        case SilBand::sil3: return "3";
        case SilBand::sil4: return "4";
        case SilBand::above_sil4: return "above SIL4";
        case SilBand::not_applicable: return "n/a";
    }
    return "n/a";
}

enum class AllocationStatus {
    /// The constraint binds: weighted success equals the target within tol.
    solved,
    /// The success target was non-positive; any allocation satisfies it.
    always_satisfied,
    /// Some target would have to reach 1 before the constraint binds; the
    /// returned targets sit at the ratio-direction limit and still satisfy
    /// the constraint with slack.
    ratio_limited,
};

inline const char* allocation_status_name(AllocationStatus status) {
    switch (status) {
        case AllocationStatus::solved: return "solved";
        case AllocationStatus::always_satisfied: return "always_satisfied";
        case AllocationStatus::ratio_limited: return "ratio_limited";
    }
    return "solved";
}

enum class DesignTargetKind {
    expected_response_fraction,
    module_pfd,
    pfd,
    expected_failure_degree,
};

inline const char* design_target_kind_name(DesignTargetKind kind) {
    switch (kind) {
        case DesignTargetKind::expected_response_fraction: return "expected_response_fraction";
        case DesignTargetKind::module_pfd: return "module_pfd";
        case DesignTargetKind::pfd: return "pfd";
        case DesignTargetKind::expected_failure_degree: return "expected_failure_degree";
    }
    return "expected_failure_degree";
}

struct DesignTarget {
    std::string subsystem_id;
    DesignTargetKind kind = DesignTargetKind::expected_failure_degree;
    double value = 0.0;
    std::string narrative;
};

struct AllocationResult {
    std::vector<double> targets;   // E[q_j] per subsystem, declaration order
    double scale = 0.0;            // binding factor t*: targets = t* x ratios
    double success_target = 0.0;   // minimum admissible weighted success
    double achieved_weighted_success = 0.0;
    double achieved_expected_consequence = 0.0;
    double achieved_risk = 0.0;
    /// Tolerable E[C] implied by the success target.
    double tolerable_expected_consequence = 0.0;
    double slack = 0.0;
    double tolerance = kDefaultBisectionTol;
    std::vector<DesignTarget> design_targets;
    std::optional<double> rrf;
    SilBand sil = SilBand::not_applicable;
    AllocationStatus status = AllocationStatus::solved;
};

/// Minimum admissible contribution-weighted success: the success level at
/// which the expected consequence exactly meets its tolerable value.
inline double required_success_target(const Scenario& scenario,
                                      double tolerable_expected_consequence_value) {
    const double span = scenario.consequence.c_max - scenario.consequence.c_min;
    return (scenario.consequence.c_max - tolerable_expected_consequence_value) / span;
}

/// A weighted success above 1 is unreachable even with perfect subsystems;
/// a non-positive target is met by any allocation.
inline Feasibility feasibility(double success_target) {
    if (success_target > 1.0) return Feasibility::infeasible;
    if (success_target <= 0.0) return Feasibility::always_satisfied;
    return Feasibility::feasible;
}

/// Derives one practical design requirement per subsystem from its target
/// expected degree of failure, phrased in the model's own terms.
inline std::vector<DesignTarget> derive_design_targets(
    std::span<const double> targets, std::span<const SubsystemSpec> subsystems) {
    if (targets.size() != subsystems.size()) {
        raise(errc::dimension_mismatch,
              "target vector has length " + std::to_string(targets.size()) + ", expected " +
                  std::to_string(subsystems.size()));
    }

    auto format_value = [](double v) {
        char buffer[40];
        std::snprintf(buffer, sizeof(buffer), "%.4g", v);
        return std::string(buffer);
    };

    std::vector<DesignTarget> result;
    result.reserve(subsystems.size());
    for (std::size_t j = 0; j < subsystems.size(); ++j) {
        DesignTarget target;
        target.subsystem_id = subsystems[j].id;
        target.value = targets[j];
        const double value = targets[j];
        struct Visitor {
            DesignTarget& target;
            double value;
            decltype(format_value)& fmt;

            void operator()(const ProportionalModel& m) const {
                target.kind = DesignTargetKind::expected_response_fraction;
                const std::string what = m.label.empty() ? "budget" : m.label;
                target.narrative = "expected " + what + " at most " +
                                   fmt(100.0 * value) + "% of the maximum";
            }
            void operator()(const BinaryModel&) const {
                target.kind = DesignTargetKind::pfd;
                target.narrative = "probability of failure on demand at most " + fmt(value);
            }
            void operator()(const ModularBinomialModel&) const {
                target.kind = DesignTargetKind::module_pfd;
                target.narrative = "per-module probability of failure at most " + fmt(value) +
                                   ", independent of the module count";
            }
            void operator()(const PointMassModel&) const { pass_through(); }
            void operator()(const BetaDensityModel&) const { pass_through(); }
            void operator()(const EmpiricalModel&) const { pass_through(); }

            void pass_through() const {
                target.kind = DesignTargetKind::expected_failure_degree;
                target.narrative = "expected degree of failure at most " + fmt(value);
            }
        };
        std::visit(Visitor{target, value, format_value}, subsystems[j].model);
        result.push_back(std::move(target));
    }
    return result;
}

/// Risk with the mitigation system absent (all functions failed completely)
/// divided by the tolerable risk.
inline double rrf(const Scenario& scenario, double tolerable_risk_value) {
    if (!(tolerable_risk_value > 0.0)) {
        raise(errc::zero_tolerance_risk, "tolerable risk must be positive");
    }
    const double unmitigated = scenario.hazardous_event_frequency *
                               scenario.external_probability_product() *
                               scenario.consequence.c_max;
    return unmitigated / tolerable_risk_value;
}

/// Maps a risk reduction factor to a SIL band via the equivalent
/// probability of failure 1/RRF. Bands are half-open [lower, upper) on the
/// PFD axis: RRF exactly 10 falls below SIL1 and RRF exactly 100 lands in
/// SIL1.
inline SilBand sil_from_rrf(double rrf_value) {
    if (!(rrf_value > 0.0)) {
        raise(errc::non_positive_rrf, "risk reduction factor must be positive");
    }
    const double pfd_equivalent = 1.0 / rrf_value;
    if (pfd_equivalent >= 1e-1) return SilBand::below_sil1;
    if (pfd_equivalent >= 1e-2) return SilBand::sil1;
    if (pfd_equivalent >= 1e-3) return SilBand::sil2;
    if (pfd_equivalent >= 1e-4) return SilBand::sil3;
    if (pfd_equivalent >= 1e-5) return SilBand::sil4;
    return SilBand::above_sil4;
}

namespace detail {

/// Weighted success along the ray t -> t * ratios.
inline double success_along_ray(const Scenario& scenario, std::span<const double> ratios,
                                double t, std::vector<double>& scratch) {
    for (std::size_t j = 0; j < ratios.size(); ++j) {
        scratch[j] = std::clamp(t * ratios[j], 0.0, 1.0);
    }
    return weighted_success(scratch, scenario);
}

} // namespace detail

/// Solves for per-subsystem expected-failure targets along the ray defined
/// by the positive ratio vector: targets = t* x ratios with the
/// contribution-weighted success equal to success_target within tol. The
/// weighted success is continuous and strictly decreasing in t wherever a
/// mapped subsystem has a positive ratio, so the binding point is unique;
/// bisection returns the feasible side, so the returned targets never
/// violate the constraint.
inline AllocationResult allocate_bisection(const Scenario& scenario,
                                           std::span<const double> ratios,
                                           double success_target,
                                           double tol = kDefaultBisectionTol) {
    const std::size_t l = scenario.subsystem_count();
    if (ratios.size() != l) {
        raise(errc::dimension_mismatch,
              "ratio vector has length " + std::to_string(ratios.size()) + ", expected " +
                  std::to_string(l));
    }
    if (!(tol > 0.0)) {
        raise(errc::range_violation, "bisection tolerance must be positive");
    }
    for (std::size_t j = 0; j < l; ++j) {
        if (!(ratios[j] > 0.0)) {
            raise(errc::range_violation, "ratio for subsystem '" + scenario.subsystems[j].id +
                                             "' must be positive");
        }
    }
    if (feasibility(success_target) == Feasibility::infeasible) {
        raise(errc::infeasible_target,
              "required weighted success " + std::to_string(success_target) +
                  " exceeds 1; even perfect subsystems cannot reach it");
    }

    // Normalize so the largest ratio is exactly 1; the scale factor absorbs
    // any rescaling of the input vector.
    const double max_ratio = *std::max_element(ratios.begin(), ratios.end());
    bool any_mapped_ratio = false;
    for (std::size_t j = 0; j < l; ++j) {
        if (scenario.mapping.row_sum(j) > 0 && ratios[j] > 0.0) {
            any_mapped_ratio = true;
            break;
        }
    }
    if (!any_mapped_ratio) {
        raise(errc::ratio_degenerate,
              "no subsystem with a positive ratio supports any function");
    }

    std::vector<double> unit_ratios(l);
    for (std::size_t j = 0; j < l; ++j) unit_ratios[j] = ratios[j] / max_ratio;

    const double t_max = 1.0 - 1e-12; // keeps every target strictly below 1
    std::vector<double> scratch(l, 0.0);
    auto g = [&](double t) {
        return detail::success_along_ray(scenario, unit_ratios, t, scratch);
    };

    AllocationResult result;
    result.success_target = success_target;
    result.tolerance = tol;

    double solution = 0.0;
    if (feasibility(success_target) == Feasibility::always_satisfied) {
        // No reliability requirement follows from the tolerance; report the
        // maximum allowed degradation along the ray.
        result.status = AllocationStatus::always_satisfied;
        solution = t_max;
    } else if (g(t_max) > success_target) {
        result.status = AllocationStatus::ratio_limited;
        solution = t_max;
    } else {
        const double at_zero = g(0.0);
        if (at_zero < success_target) {
            raise(errc::infeasible_target,
                  "required weighted success " + std::to_string(success_target) +
                      " exceeds the value at perfect subsystems (" +
                      std::to_string(at_zero) + ")");
        }
        // Invariant: g(lo) >= success_target >= g(hi).
        double lo = 0.0;
        double hi = t_max;
        double g_lo = at_zero;
        for (int iteration = 0; iteration < 200; ++iteration) {
            if (g_lo - success_target <= tol) break;
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const double g_mid = g(mid);
            if (g_mid >= success_target) {
                lo = mid;
                g_lo = g_mid;
            } else {
                hi = mid;
            }
        }
        if (g_lo - success_target > tol) {
            throw std::runtime_error(
                "bisection failed to bind the success target within tolerance");
        }
        result.status = AllocationStatus::solved;
        solution = lo;
    }

    result.targets.resize(l);
    for (std::size_t j = 0; j < l; ++j) {
        result.targets[j] = std::clamp(solution * unit_ratios[j], 0.0, t_max);
    }
    result.scale = solution / max_ratio;
    result.achieved_weighted_success = weighted_success(result.targets, scenario);
    result.achieved_expected_consequence =
        expected_consequence(result.targets, scenario);
    result.achieved_risk = risk(scenario, result.achieved_expected_consequence);

    const double span = scenario.consequence.c_max - scenario.consequence.c_min;
    result.tolerable_expected_consequence =
        scenario.consequence.c_max - span * success_target;
    result.slack =
        result.tolerable_expected_consequence - result.achieved_expected_consequence;

    result.design_targets = derive_design_targets(result.targets, scenario.subsystems);

    try {
        const double tolerable = tolerable_risk(scenario.consequence);
        result.rrf = rrf(scenario, tolerable);
        result.sil = sil_from_rrf(*result.rrf);
    } catch (const Error&) {
        result.rrf = std::nullopt;
        result.sil = SilBand::not_applicable;
    }
    return result;
}

} // namespace riskalloc
