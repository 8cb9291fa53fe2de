#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "riskalloc/risk.hpp"
#include "test_util.hpp"

using namespace riskalloc;

namespace {

const std::vector<double> kTunnelTargets = {1.2e-4, 9.0e-5, 1.0e-2, 9.0e-5, 1.4e-2,
                                            2.0e-3, 2.0e-3, 2.0e-4, 1.4e-2, 3.6e-2};

std::vector<double> gas_published_targets() {
    // sensor expected response fraction, logic solver pfd, and the final
    // element folded from fan pfd 2e-3 and expected module opening 0.996
    return {0.034, 1.0e-4, 1.0 - 0.998 * 0.996};
}

} // namespace

TEST_CASE("function success is the product over mapped subsystems") {
    auto tunnel = test_util::load_fixture("tunnel.scenario");

    std::vector<double> zeros(10, 0.0);
    for (std::size_t k = 0; k < tunnel.function_count(); ++k) {
        CHECK(function_success(zeros, tunnel.mapping, k) == 1.0);
    }

    std::vector<double> one_dead(10, 0.0);
    one_dead[0] = 1.0; // LHD supports AFS and ASE
    CHECK(function_success(one_dead, tunnel.mapping, 0) == 0.0);
    CHECK(function_success(one_dead, tunnel.mapping, 2) == 0.0);
    CHECK(function_success(one_dead, tunnel.mapping, 1) == 1.0);

    const auto ase = tunnel.index_of_function("ASE");
    REQUIRE(ase.has_value());
    const double expected =
        (1.0 - 1.2e-4) * (1.0 - 9.0e-5) * (1.0 - 9.0e-5) * (1.0 - 2.0e-4);
    const double actual = function_success(kTunnelTargets, tunnel.mapping, *ase);
    CHECK(actual == Catch::Approx(expected).margin(1e-15));
    CHECK(actual == Catch::Approx(0.99950).margin(1e-5));
}

TEST_CASE("function success rejects bad indices and vectors") {
    auto tunnel = test_util::load_fixture("tunnel.scenario");
    std::vector<double> zeros(10, 0.0);
    CHECK_THROWS_MATCHES(function_success(zeros, tunnel.mapping, 5), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == errc::index_out_of_range;
                         }));
    std::vector<double> wrong_length(9, 0.0);
    CHECK_THROWS_AS(function_success(wrong_length, tunnel.mapping, 0), Error);
    std::vector<double> out_of_range(10, 0.0);
    out_of_range[3] = 1.5;
    CHECK_THROWS_AS(function_success(out_of_range, tunnel.mapping, 0), Error);
}

TEST_CASE("consequence spans c_min to c_max") {
    auto tunnel = test_util::load_fixture("tunnel.scenario");
    std::vector<double> zeros(10, 0.0);
    std::vector<double> ones(10, 1.0);
    CHECK(consequence(zeros, tunnel) == Catch::Approx(0.0).margin(1e-15));
    CHECK(consequence(ones, tunnel) == Catch::Approx(2.0).margin(1e-15));

    auto gas = test_util::load_fixture("gas.scenario");
    const double value = consequence(gas_published_targets(), gas);
    CHECK(value == Catch::Approx(9.971073293200018).margin(1e-9));
}

TEST_CASE("expected consequence matches the published tunnel evaluation") {
    auto tunnel = test_util::load_fixture("tunnel.scenario");
    const double value = expected_consequence(kTunnelTargets, tunnel);
    CHECK(value == Catch::Approx(0.04175110387469427).margin(1e-12));

    std::vector<double> zeros(10, 0.0);
    CHECK(expected_consequence(zeros, tunnel) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("risk multiplies frequency, external factors, and consequence") {
    auto gas = test_util::load_fixture("gas.scenario");
    // 0.1 occurrences per year times ignition probability 0.1 times E[C] 10
    CHECK(risk(gas, 10.0) == Catch::Approx(0.1).margin(1e-12));
    CHECK(risk(gas, 0.0) == 0.0);

    auto tunnel = test_util::load_fixture("tunnel.scenario");
    CHECK(risk(tunnel, 0.0419) == Catch::Approx(0.7 * 0.0419).margin(1e-12));

    CHECK_THROWS_AS(risk(gas, -1.0), Error);
}

TEST_CASE("segment-based risk sums frequency times severity") {
    std::vector<ConsequenceSegment> one = {{"only", 10.0, 1.0, 0.1}};
    CHECK(risk_from_segments(one) == Catch::Approx(1.0).margin(1e-15));

    auto tunnel = test_util::load_fixture("tunnel.scenario");
    auto segments = tunnel.consequence.segments;
    for (auto& segment : segments) {
        segment.estimated_frequency = segment.tolerable_frequency;
    }
    CHECK(risk_from_segments(segments) == Catch::Approx(0.02933).margin(1e-4));

    CHECK(risk_from_segments(std::vector<ConsequenceSegment>{}) == 0.0);

    segments[2].estimated_frequency.reset();
    CHECK_THROWS_MATCHES(risk_from_segments(segments), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == errc::missing_estimated_frequency;
                         }));
}

TEST_CASE("tolerable risk prefers the override and falls back to segments") {
    auto tunnel = test_util::load_fixture("tunnel.scenario");
    CHECK(tolerable_risk(tunnel.consequence) ==
          Catch::Approx(0.02933).margin(1e-4));

    auto gas = test_util::load_fixture("gas.scenario");
    CHECK(tolerable_risk(gas.consequence) == 0.1);

    ConsequenceModel with_both = tunnel.consequence;
    with_both.tolerable_risk_override = 0.5;
    CHECK(tolerable_risk(with_both) == 0.5);

    ConsequenceModel single;
    single.c_max = 2.0;
    single.segments = {{"only", 1.0, 1.0, std::nullopt}};
    CHECK(tolerable_risk(single) == Catch::Approx(1.0).margin(1e-15));

    ConsequenceModel none;
    none.c_max = 1.0;
    CHECK_THROWS_MATCHES(tolerable_risk(none), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == errc::no_tolerance_source;
                         }));
}

TEST_CASE("tolerable expected consequence divides by frequency and externals") {
    auto gas = test_util::load_fixture("gas.scenario");
    CHECK(tolerable_expected_consequence(gas, 0.1) == Catch::Approx(10.0).margin(1e-12));

    auto tunnel = test_util::load_fixture("tunnel.scenario");
    CHECK(tolerable_expected_consequence(tunnel, 0.0293) ==
          Catch::Approx(0.0419).margin(1e-4));
    CHECK(tolerable_expected_consequence(tunnel, 0.0) == 0.0);

    auto broken = gas;
    broken.hazardous_event_frequency = 0.0;
    CHECK_THROWS_MATCHES(tolerable_expected_consequence(broken, 0.1), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == errc::division_by_zero_frequency;
                         }));
}

TEST_CASE("assess reproduces both case studies") {
    auto gas = test_util::load_fixture("gas.scenario");
    const auto gas_assessment = assess(gas, gas_published_targets());
    CHECK(gas_assessment.verdict == Verdict::pass);
    CHECK(gas_assessment.tolerable_expected_consequence ==
          Catch::Approx(10.0).margin(1e-12));
    CHECK(gas_assessment.slack == Catch::Approx(0.028926706799982327).margin(1e-9));

    auto tunnel = test_util::load_fixture("tunnel.scenario");
    const auto tunnel_assessment = assess(tunnel, kTunnelTargets);
    CHECK(tunnel_assessment.verdict == Verdict::pass);
    CHECK(tunnel_assessment.slack ==
          Catch::Approx(0.0001488961253057336).margin(1e-10));
    CHECK(tunnel_assessment.risk ==
          Catch::Approx(0.029225772712285988).margin(1e-10));

    std::vector<double> half(10, 0.5);
    CHECK(assess(tunnel, half).verdict == Verdict::fail);
}

TEST_CASE("consequence respects bounds and monotonicity on random scenarios") {
    std::mt19937_64 rng(51);
    for (int round = 0; round < 40; ++round) {
        auto scenario = test_util::random_scenario(rng);
        const std::size_t l = scenario.subsystem_count();
        std::vector<double> q(l);
        for (auto& value : q) value = test_util::uniform(rng, 0.0, 1.0);

        const double base = consequence(q, scenario);
        REQUIRE(base >= scenario.consequence.c_min - 1e-12);
        REQUIRE(base <= scenario.consequence.c_max + 1e-12);

        for (std::size_t j = 0; j < l; ++j) {
            auto bumped = q;
            bumped[j] = std::min(1.0, bumped[j] + test_util::uniform(rng, 0.0, 0.3));
            const double higher = consequence(bumped, scenario);
            REQUIRE(higher >= base - 1e-12);
        }
    }
}

TEST_CASE("verdict agrees with the risk inequality whenever rates are positive") {
    std::mt19937_64 rng(52);
    for (int round = 0; round < 60; ++round) {
        auto scenario = test_util::random_scenario(rng);
        scenario.consequence.tolerable_risk_override =
            test_util::uniform(rng, 0.01, 1.0) * scenario.hazardous_event_frequency *
            scenario.external_probability_product() * scenario.consequence.c_max;

        std::vector<double> eq(scenario.subsystem_count());
        for (auto& value : eq) value = test_util::uniform(rng, 0.0, 1.0);

        const auto assessment = assess(scenario, eq);
        const double r = assessment.risk;
        const double r_bar = assessment.tolerable_risk;
        const double scale = std::max(std::abs(r), std::abs(r_bar));
        if (std::abs(r - r_bar) <= 1e-12 * scale) continue; // boundary noise
        CHECK((assessment.verdict == Verdict::pass) == (r <= r_bar));
    }
}

TEST_CASE("expected consequence equals exhaustive enumeration for binary scenarios") {
    std::mt19937_64 rng(53);
    for (int round = 0; round < 25; ++round) {
        const std::size_t l = 1 + test_util::uniform_index(rng, 12);
        std::vector<FailureModel> models;
        for (std::size_t j = 0; j < l; ++j) {
            if (j % 4 == 3) {
                models.push_back(PointMassModel{test_util::uniform(rng, 0.0, 1.0)});
            } else {
                models.push_back(BinaryModel{test_util::uniform(rng, 0.0, 0.5)});
            }
        }
        auto scenario = test_util::single_function_scenario(
            models, test_util::uniform(rng, 0.0, 1.0), test_util::uniform(rng, 2.0, 100.0));

        std::vector<double> eq(l);
        for (std::size_t j = 0; j < l; ++j) {
            eq[j] = expect_failure(scenario.subsystems[j].model);
        }
        const double analytic = expected_consequence(eq, scenario);
        const double oracle = test_util::enumerate_expected_consequence(scenario);
        REQUIRE(analytic == Catch::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("fwi severity conversion uses the published equivalence weights") {
    using Count = std::vector<FwiRatio>;
    CHECK(severity_from_fwi(Count{{"hospitalisation", 1.0}}) == 0.1);
    CHECK(severity_from_fwi(Count{{"permanent_disability", 1.0}}) == 0.333);
    CHECK(severity_from_fwi(Count{{"fatality", 2.0}}) == 2.0);
    CHECK(severity_from_fwi(Count{{"medical_treatment", 1.0}}) == 0.005);
    CHECK(severity_from_fwi(Count{{"first_aid", 1.0}}) == 0.001);

    const double mixed = severity_from_fwi(
        Count{{"fatality", 1.0}, {"hospitalisation", 3.0}, {"first_aid", 10.0}});
    CHECK(mixed == Catch::Approx(1.0 + 0.3 + 0.01).margin(1e-12));

    CHECK_THROWS_MATCHES(severity_from_fwi(Count{{"scratch", 1.0}}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == errc::unknown_category;
                         }));

    const std::vector<FwiRatio> custom = {{"fatality", 1.0}, {"injury", 0.25}};
    CHECK(severity_from_fwi(Count{{"injury", 4.0}}, custom) ==
          Catch::Approx(1.0).margin(1e-12));
}
