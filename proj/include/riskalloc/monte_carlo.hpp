#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "riskalloc/errors.hpp"
#include "riskalloc/expectation.hpp"
#include "riskalloc/random.hpp"
#include "riskalloc/risk.hpp"

namespace riskalloc {

/// Monte Carlo estimate of the expected consequence severity: draws a
/// failure-degree vector per sample (one independent substream per
/// (subsystem, draw) pair), evaluates the consequence, and aggregates with
/// Welford's algorithm in a fixed order. Bit-reproducible for a fixed
/// (seed, samples, scenario) triple on one build, and independent of any
/// evaluation chunking because substreams never overlap.
inline MCEstimate mc_expected_consequence(const Scenario& scenario, std::size_t samples,
                                          std::uint64_t seed) {
    if (samples < 1000) {
        raise(errc::range_violation,
              "Monte Carlo needs at least 1000 samples, got " + std::to_string(samples));
    }
    for (const auto& subsystem : scenario.subsystems) {
        if (!is_sampleable(subsystem.model)) {
            raise(errc::sampling_unsupported,
                  "subsystem '" + subsystem.id + "' (" + model_kind_name(subsystem.model) +
                      ") cannot be sampled");
        }
    }

    const std::size_t l = scenario.subsystem_count();
    std::vector<double> q(l, 0.0);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        for (std::size_t j = 0; j < l; ++j) {
            RandomStream stream(seed, j, i);
            q[j] = sample_failure(scenario.subsystems[j].model, stream);
        }
        const double value = consequence(q, scenario);
        const double delta = value - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (value - mean);
    }

    MCEstimate estimate;
    estimate.mean = mean;
    estimate.samples = samples;
    estimate.seed = seed;
    estimate.std_error =
        samples > 1 ? std::sqrt(m2 / (static_cast<double>(samples - 1) *
                                      static_cast<double>(samples)))
                    : 0.0;
    return estimate;
}

} // namespace riskalloc
