#pragma once

#include <stdexcept>
#include <string>

namespace riskalloc {

/// Machine-readable failure codes carried by Error.
enum class errc {
    // scenario structure
    dimension_mismatch,
    contribution_sum_violation,
    empty_function_column,
    duplicate_id,
    range_violation,
    unknown_function,
    unknown_subsystem,
    unknown_category,
    index_out_of_range,
    // expectation / sampling
    pmf_not_normalized,
    density_not_normalized,
    quadrature_non_convergence,
    sampling_unsupported,
    // risk
    missing_estimated_frequency,
    no_tolerance_source,
    division_by_zero_frequency,
    // allocation
    infeasible_target,
    ratio_degenerate,
    zero_tolerance_risk,
    non_positive_rrf,
    // scenario files
    syntax_error,
    missing_field,
    unknown_model_kind,
};

inline const char* errc_name(errc code) {
    switch (code) {
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::contribution_sum_violation: return "ContributionSumViolation";
        case errc::empty_function_column: return "EmptyFunctionColumn";
        case errc::duplicate_id: return "DuplicateId";
        case errc::range_violation: return "RangeViolation";
        case errc::unknown_function: return "UnknownFunction";
        case errc::unknown_subsystem: return "UnknownSubsystem";
        case errc::unknown_category: return "UnknownCategory";
        case errc::index_out_of_range: return "IndexOutOfRange";
        case errc::pmf_not_normalized: return "PmfNotNormalized";
        case errc::density_not_normalized: return "DensityNotNormalized";
        case errc::quadrature_non_convergence: return "QuadratureNonConvergence";
        case errc::sampling_unsupported: return "SamplingUnsupported";
        case errc::missing_estimated_frequency: return "MissingEstimatedFrequency";
        case errc::no_tolerance_source: return "NoToleranceSource";
        case errc::division_by_zero_frequency: return "DivisionByZeroFrequency";
        case errc::infeasible_target: return "InfeasibleTarget";
        case errc::ratio_degenerate: return "RatioDegenerate";
        case errc::zero_tolerance_risk: return "ZeroToleranceRisk";
        case errc::non_positive_rrf: return "NonPositiveRrf";
        case errc::syntax_error: return "SyntaxError";
        case errc::missing_field: return "MissingField";
        case errc::unknown_model_kind: return "UnknownModelKind";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace riskalloc
