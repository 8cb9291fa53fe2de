#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "riskalloc/detail/numeric.hpp"
#include "riskalloc/errors.hpp"
#include "riskalloc/quadrature.hpp"
#include "riskalloc/random.hpp"

namespace riskalloc {

inline constexpr double kPmfSumTolerance = 1e-9;
inline constexpr double kDefaultQuadratureTol = 1e-10;

struct PmfAtom {
    double value = 0.0;
    double probability = 0.0;

    bool operator==(const PmfAtom&) const = default;
};

/// Degree of failure is 1 with probability pfd, otherwise 0.
struct BinaryModel {
    double pfd = 0.0;

    bool operator==(const BinaryModel&) const = default;
};

/// Deterministic degree of failure.
struct PointMassModel {
    double q = 0.0;

    bool operator==(const PointMassModel&) const = default;
};

/// Failure degree defined as an expected fraction of a physical budget,
/// e.g. expected response time over the maximum tolerable response time.
/// Samples as a point mass unless params carry beta shape parameters
/// ("alpha", "beta"), in which case draws follow that beta distribution.
struct ProportionalModel {
    std::string label;
    double expected_fraction = 0.0;
    std::map<std::string, double> params;

    bool operator==(const ProportionalModel&) const = default;
};

/// Degree of failure is the fraction of identical independent modules that
/// fail, each with probability module_pfd. The expected degree of failure
/// equals module_pfd regardless of how many modules there are; sampling
/// requires the count.
struct ModularBinomialModel {
    std::optional<std::int64_t> module_count;
    double module_pfd = 0.0;

    bool operator==(const ModularBinomialModel&) const = default;
};

/// Continuous failure degree with a Beta(alpha, beta) density on [0, 1].
struct BetaDensityModel {
    double alpha = 1.0;
    double beta = 1.0;

    bool operator==(const BetaDensityModel&) const = default;
};

/// Discrete failure degree given by an explicit pmf on [0, 1].
struct EmpiricalModel {
    std::vector<PmfAtom> support;

    bool operator==(const EmpiricalModel&) const = default;
};

using FailureModel = std::variant<BinaryModel, PointMassModel, ProportionalModel,
                                  ModularBinomialModel, BetaDensityModel, EmpiricalModel>;

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

/// E[X] = sum p_i * x_i for a discrete pmf. The pmf must be normalized
/// within kPmfSumTolerance.
inline double expect_discrete(std::span<const PmfAtom> pmf) {
    detail::NeumaierSum prob_sum;
    detail::NeumaierSum mean;
    for (const auto& atom : pmf) {
        if (atom.probability < 0.0) {
            raise(errc::pmf_not_normalized,
                  "negative probability " + std::to_string(atom.probability));
        }
        prob_sum.add(atom.probability);
        mean.add(atom.probability * atom.value);
    }
    if (std::abs(prob_sum.value() - 1.0) > kPmfSumTolerance) {
        raise(errc::pmf_not_normalized,
              "probabilities sum to " + std::to_string(prob_sum.value()));
    }
    return mean.value();
}

/// Absolute resolution floor for integrands that blow up at x = 1: doubles
/// cannot represent 1 - x below about 1.1e-16, so roughly sqrt(eps) of mass
/// next to a right-endpoint singularity is invisible to an f(x) callback.
inline constexpr double kEndpointResolution = 5e-8;

/// E[X] = integral of x * f(x) over [0, 1] by adaptive quadrature. The
/// density must integrate to 1 on [0, 1]; the check allows the quadrature's
/// own error plus the endpoint resolution floor. Integrable singularities at
/// either endpoint are handled (the rule never evaluates the endpoints
/// themselves); a singularity at 1 limits the achievable accuracy to about
/// kEndpointResolution, a singularity at 0 does not (subnormals allow
/// subdivision arbitrarily close to it).
template <class F>
double expect_continuous(F&& density, double tol = kDefaultQuadratureTol) {
    auto normalization = integrate_adaptive(density, 0.0, 1.0, tol);
    if (std::abs(normalization.value - 1.0) >
        std::max(10.0 * tol, kEndpointResolution)) {
        raise(errc::density_not_normalized,
              "density integrates to " + std::to_string(normalization.value) +
                  " over [0, 1]");
    }
    auto mean = integrate_adaptive([&](double x) { return x * density(x); }, 0.0, 1.0, tol);
    return mean.value;
}

inline double log_beta(double alpha, double beta) {
    return std::lgamma(alpha) + std::lgamma(beta) - std::lgamma(alpha + beta);
}

/// Beta(alpha, beta) density; infinite at an endpoint when the matching
/// shape parameter is below 1.
inline double beta_pdf(double x, double alpha, double beta) {
    if (x < 0.0 || x > 1.0) return 0.0;
    if (x == 0.0) {
        if (alpha < 1.0) return std::numeric_limits<double>::infinity();
        if (alpha > 1.0) return 0.0;
        return std::exp(-log_beta(alpha, beta)) * std::pow(1.0 - x, beta - 1.0);
    }
    if (x == 1.0) {
        if (beta < 1.0) return std::numeric_limits<double>::infinity();
        if (beta > 1.0) return 0.0;
        return std::exp(-log_beta(alpha, beta)) * std::pow(x, alpha - 1.0);
    }
    const double log_pdf = (alpha - 1.0) * std::log(x) + (beta - 1.0) * std::log1p(-x) -
                           log_beta(alpha, beta);
    return std::exp(log_pdf);
}

namespace detail {

inline const double* find_param(const std::map<std::string, double>& params,
                                const std::string& key) {
    auto it = params.find(key);
    return it == params.end() ? nullptr : &it->second;
}

inline bool proportional_has_beta_spread(const ProportionalModel& model) {
    return find_param(model.params, "alpha") != nullptr &&
           find_param(model.params, "beta") != nullptr;
}

} // namespace detail

/// Expected degree of failure E[Q] of a subsystem model. Always in [0, 1].
inline double expect_failure(const FailureModel& model) {
    struct Visitor {
        double operator()(const BinaryModel& m) const { return m.pfd; }
        double operator()(const PointMassModel& m) const { return m.q; }
        double operator()(const ProportionalModel& m) const { return m.expected_fraction; }
        double operator()(const ModularBinomialModel& m) const { return m.module_pfd; }
        double operator()(const BetaDensityModel& m) const {
            // Quadrature with the halves swapped through the identity
            // pdf(1 - y; alpha, beta) = pdf(y; beta, alpha), so any
            // singularity sits at 0, where subdivision is not limited by
            // floating-point spacing. Reaches ~1e-12 for all positive
            // shapes instead of the kEndpointResolution floor.
            const double tol = kDefaultQuadratureTol;
            auto lower_pdf = [&m](double x) { return beta_pdf(x, m.alpha, m.beta); };
            auto upper_pdf = [&m](double y) { return beta_pdf(y, m.beta, m.alpha); };
            const double mass = integrate_adaptive(lower_pdf, 0.0, 0.5, tol).value +
                                integrate_adaptive(upper_pdf, 0.0, 0.5, tol).value;
            if (std::abs(mass - 1.0) > 10.0 * tol) {
                raise(errc::density_not_normalized,
                      "beta density integrates to " + std::to_string(mass));
            }
            const double mean =
                integrate_adaptive([&](double x) { return x * lower_pdf(x); }, 0.0, 0.5,
                                   tol)
                    .value +
                integrate_adaptive([&](double y) { return (1.0 - y) * upper_pdf(y); },
                                   0.0, 0.5, tol)
                    .value;
            return std::clamp(mean, 0.0, 1.0);
        }
        double operator()(const EmpiricalModel& m) const { return expect_discrete(m.support); }
    };
    return std::visit(Visitor{}, model);
}

namespace detail {

/// Marsaglia-Tsang gamma sampler; draw count per sample varies, which is
/// fine because each Monte Carlo draw owns its own substream.
inline double sample_gamma(double shape, RandomStream& stream) {
    if (shape < 1.0) {
        const double boost = sample_gamma(shape + 1.0, stream);
        const double u = stream.next_unit_positive();
        return boost * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double z = sample_standard_normal(stream);
        const double t = 1.0 + c * z;
        if (t <= 0.0) continue;
        const double v = t * t * t;
        const double u = stream.next_unit_positive();
        if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) {
            return d * v;
        }
    }
}

inline double sample_beta(double alpha, double beta, RandomStream& stream) {
    const double x = sample_gamma(alpha, stream);
    const double y = sample_gamma(beta, stream);
    const double total = x + y;
    if (total <= 0.0) return 0.5; // both draws underflowed; vanishing probability
    return std::clamp(x / total, 0.0, 1.0);
}

} // namespace detail

/// One draw of the failure degree Q from the model, in [0, 1].
inline double sample_failure(const FailureModel& model, RandomStream& stream) {
    struct Visitor {
        RandomStream& stream;

        double operator()(const BinaryModel& m) const {
            return stream.next_unit() < m.pfd ? 1.0 : 0.0;
        }
        double operator()(const PointMassModel& m) const { return m.q; }
        double operator()(const ProportionalModel& m) const {
            if (detail::proportional_has_beta_spread(m)) {
                return detail::sample_beta(*detail::find_param(m.params, "alpha"),
                                           *detail::find_param(m.params, "beta"), stream);
            }
            return m.expected_fraction;
        }
        double operator()(const ModularBinomialModel& m) const {
            if (!m.module_count) {
                raise(errc::sampling_unsupported,
                      "modular-binomial model has no module count; the expected degree "
                      "of failure is defined but draws are not");
            }
            const std::int64_t n = *m.module_count;
            std::int64_t failed = 0;
            for (std::int64_t i = 0; i < n; ++i) {
                if (stream.next_unit() < m.module_pfd) ++failed;
            }
            return static_cast<double>(failed) / static_cast<double>(n);
        }
        double operator()(const BetaDensityModel& m) const {
            return detail::sample_beta(m.alpha, m.beta, stream);
        }
        double operator()(const EmpiricalModel& m) const {
            if (m.support.empty()) {
                raise(errc::sampling_unsupported, "empirical model has an empty support");
            }
            const double u = stream.next_unit();
            double cumulative = 0.0;
            for (const auto& atom : m.support) {
                cumulative += atom.probability;
                if (u < cumulative) return atom.value;
            }
            return m.support.back().value; // guards rounding in the cumulative sum
        }
    };
    return std::visit(Visitor{stream}, model);
}

/// True when sample_failure can draw from the model.
inline bool is_sampleable(const FailureModel& model) {
    if (const auto* mb = std::get_if<ModularBinomialModel>(&model)) {
        return mb->module_count.has_value();
    }
    return true;
}

inline const char* model_kind_name(const FailureModel& model) {
    struct Visitor {
        const char* operator()(const BinaryModel&) const { return "binary"; }
        const char* operator()(const PointMassModel&) const { return "point_mass"; }
        const char* operator()(const ProportionalModel&) const { return "proportional"; }
        const char* operator()(const ModularBinomialModel&) const { return "modular_binomial"; }
        const char* operator()(const BetaDensityModel&) const { return "beta_density"; }
        const char* operator()(const EmpiricalModel&) const { return "empirical"; }
    };
    return std::visit(Visitor{}, model);
}

} // namespace riskalloc
