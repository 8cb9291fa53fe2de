#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>
#include <string>
#include <vector>

#include "riskalloc/monte_carlo.hpp"
#include "riskalloc/scenario_io.hpp"
#include "test_util.hpp"

using namespace riskalloc;

namespace {

const std::vector<double> kTunnelTargets = {1.2e-4, 9.0e-5, 1.0e-2, 9.0e-5, 1.4e-2,
                                            2.0e-3, 2.0e-3, 2.0e-4, 1.4e-2, 3.6e-2};

std::size_t count_lines(const std::string& text) {
    std::size_t lines = 0;
    for (char c : text) {
        if (c == '\n') ++lines;
    }
    return lines;
}

} // namespace

TEST_CASE("the gas fixture parses to the documented structure") {
    auto doc = parse_scenario(test_util::read_file(test_util::scenario_path("gas.scenario")));
    CHECK(doc.name == "gas-ventilation");
    CHECK(doc.severity_unit == "$M");
    REQUIRE(doc.subsystems.size() == 3);
    REQUIRE(doc.functions.size() == 1);
    REQUIRE(doc.external_factors.size() == 1);
    CHECK(doc.external_factors[0].name == "p_ign");
    CHECK(doc.external_factors[0].probability == 0.1);
    CHECK(doc.tolerable_risk == 0.1);
    CHECK(std::holds_alternative<ProportionalModel>(doc.subsystems[0].model));
    CHECK(std::holds_alternative<BinaryModel>(doc.subsystems[1].model));
    CHECK(std::holds_alternative<EmpiricalModel>(doc.subsystems[2].model));
}

TEST_CASE("the tunnel fixture reconstructs the full mapping matrix") {
    auto load = load_scenario_file(test_util::scenario_path("tunnel.scenario"));
    REQUIRE(load.ok());
    const auto& scenario = load.scenario();
    REQUIRE(scenario.subsystem_count() == 10);
    REQUIRE(scenario.function_count() == 5);

    // row sums per subsystem: LHD 2, FDP 3, IAD 1, PCS 4, TOp 3, OMS 3,
    // FSS 2, TVS 2, EMS 1, TUs 1
    const std::size_t expected_rows[10] = {2, 3, 1, 4, 3, 3, 2, 2, 1, 1};
    for (std::size_t j = 0; j < 10; ++j) {
        CHECK(scenario.mapping.row_sum(j) == expected_rows[j]);
    }
    const std::size_t expected_cols[5] = {3, 6, 4, 4, 5};
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(scenario.mapping.column_sum(k) == expected_cols[k]);
    }
    const auto ase = scenario.index_of_function("ASE");
    const auto tvs = scenario.index_of_subsystem("TVS");
    REQUIRE(ase.has_value());
    REQUIRE(tvs.has_value());
    CHECK(scenario.mapping.at(*tvs, *ase));
}

TEST_CASE("documents round-trip through emit and parse") {
    for (const char* name : {"gas.scenario", "tunnel.scenario"}) {
        const auto original =
            parse_scenario(test_util::read_file(test_util::scenario_path(name)));
        const auto round_tripped = parse_scenario(emit_scenario(original));
        CHECK(round_tripped == original);
    }
}

TEST_CASE("empty documents report the missing structure") {
    CHECK_THROWS_MATCHES(parse_scenario(""), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == errc::missing_field;
                         }));
    CHECK_THROWS_AS(parse_scenario("  \n\t "), Error);
}

TEST_CASE("syntax errors carry position information") {
    try {
        parse_scenario("{ \"metadata\": { ");
        FAIL("expected a syntax error");
    } catch (const Error& e) {
        CHECK(e.code() == errc::syntax_error);
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
}

TEST_CASE("missing fields and type mismatches are reported with their path") {
    auto doc = nlohmann::ordered_json::parse(
        test_util::read_file(test_util::scenario_path("gas.scenario")));
    doc.erase("functions");
    try {
        parse_scenario(doc.dump());
        FAIL("expected a missing-field error");
    } catch (const Error& e) {
        CHECK(e.code() == errc::missing_field);
        CHECK(std::string(e.what()).find("functions") != std::string::npos);
    }

    auto doc2 = nlohmann::ordered_json::parse(
        test_util::read_file(test_util::scenario_path("gas.scenario")));
    doc2["consequence"]["c_max"] = "very big";
    CHECK_THROWS_MATCHES(parse_scenario(doc2.dump()), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == errc::syntax_error;
                         }));
}

TEST_CASE("unknown model kinds are rejected by name") {
    auto doc = nlohmann::ordered_json::parse(
        test_util::read_file(test_util::scenario_path("gas.scenario")));
    doc["subsystems"][0]["model"] = {{"kind", "weibull"}, {"shape", 2.0}};
    try {
        parse_scenario(doc.dump());
        FAIL("expected an unknown-model-kind error");
    } catch (const Error& e) {
        CHECK(e.code() == errc::unknown_model_kind);
        CHECK(std::string(e.what()).find("weibull") != std::string::npos);
    }
}

TEST_CASE("mapping entries naming unknown ids fail the load") {
    auto doc = nlohmann::ordered_json::parse(
        test_util::read_file(test_util::scenario_path("gas.scenario")));
    doc["mapping"][0]["subsystem"] = "ghost";
    auto load = load_scenario_from_text(doc.dump());
    CHECK_FALSE(load.ok());

    auto doc2 = nlohmann::ordered_json::parse(
        test_util::read_file(test_util::scenario_path("gas.scenario")));
    doc2["mapping"][0]["functions"] = {"GHOST"};
    CHECK_FALSE(load_scenario_from_text(doc2.dump()).ok());
}

TEST_CASE("json reports re-evaluate to identical results") {
    auto tunnel = test_util::load_fixture("tunnel.scenario");
    const auto assessment = assess(tunnel, kTunnelTargets);
    const auto report = emit_assessment_report(tunnel, kTunnelTargets, assessment,
                                               ReportFormat::json);

    const auto parsed = nlohmann::json::parse(report);
    std::vector<double> recovered;
    for (const auto& subsystem : tunnel.subsystems) {
        recovered.push_back(parsed.at("targets").at(subsystem.id).get<double>());
    }
    const auto again = assess(tunnel, recovered);
    CHECK(again.expected_consequence == assessment.expected_consequence);
    CHECK(again.slack == assessment.slack);
    CHECK(again.verdict == assessment.verdict);
    CHECK(parsed.at("expected_consequence").get<double>() ==
          assessment.expected_consequence);
}

TEST_CASE("csv reports have one row per subsystem plus a fixed summary block") {
    auto tunnel = test_util::load_fixture("tunnel.scenario");
    const auto assessment = assess(tunnel, kTunnelTargets);
    const auto assessment_csv = emit_assessment_report(tunnel, kTunnelTargets, assessment,
                                                       ReportFormat::csv);
    // header + 10 subsystems + summary header + 6 metrics
    CHECK(count_lines(assessment_csv) == 10 + 8);

    const std::vector<double> ratios(10, 1.0);
    const auto allocation = allocate_bisection(tunnel, ratios, 0.97905);
    const auto allocation_csv =
        emit_allocation_report(tunnel, allocation, ReportFormat::csv);
    // header + 10 subsystems + summary header + 12 metrics
    CHECK(count_lines(allocation_csv) == 10 + 14);
}

TEST_CASE("gas allocation tables carry the risk reduction summary") {
    auto gas = test_util::load_fixture("gas.scenario");
    const std::vector<double> ratios = {1.0, 1.0, 1.0};
    const auto result = allocate_bisection(gas, ratios, 0.96);
    const auto table = emit_allocation_report(gas, result, ReportFormat::table);
    CHECK(table.find("RRF: 25\n") != std::string::npos);
    CHECK(table.find("SIL: 1\n") != std::string::npos);
    CHECK(table.find("external factors: p_ign=0.1") != std::string::npos);
}

TEST_CASE("tunnel assessment tables report the verdict and omit absent factors") {
    auto tunnel = test_util::load_fixture("tunnel.scenario");
    const auto assessment = assess(tunnel, kTunnelTargets);
    const auto table = emit_assessment_report(tunnel, kTunnelTargets, assessment,
                                              ReportFormat::table);
    CHECK(table.find("verdict: PASS") != std::string::npos);
    CHECK(table.find("slack: 0.0001489") != std::string::npos);
    CHECK(table.find("external factors") == std::string::npos);
}

TEST_CASE("tolerance and sil reports print the derived quantities") {
    auto gas = test_util::load_fixture("gas.scenario");
    const auto table = emit_tolerance_report(gas, ReportFormat::table);
    CHECK(table.find("tolerable risk: 0.1 $M/yr (source: override)") != std::string::npos);
    CHECK(table.find("tolerable expected consequence: 10 $M") != std::string::npos);

    const double tolerable = tolerable_risk(gas.consequence);
    const double rrf_value = rrf(gas, tolerable);
    const auto sil_table = emit_sil_report(gas, tolerable, rrf_value,
                                           sil_from_rrf(rrf_value), ReportFormat::table);
    CHECK(sil_table.find("RRF: 25\n") != std::string::npos);
    CHECK(sil_table.find("SIL: 1\n") != std::string::npos);

    const auto json_report = nlohmann::json::parse(
        emit_tolerance_report(gas, ReportFormat::json));
    CHECK(json_report.at("tolerable_risk").get<double>() == 0.1);
    CHECK(json_report.at("tolerable_risk_source").get<std::string>() == "override");
}

TEST_CASE("monte carlo reports include the seed and z-score") {
    auto scenario = test_util::single_function_scenario({BinaryModel{0.2}});
    const auto estimate = mc_expected_consequence(scenario, 5000, 11);
    const auto report = emit_mc_report(scenario, estimate, 0.2, ReportFormat::json);
    const auto parsed = nlohmann::json::parse(report);
    CHECK(parsed.at("seed").get<std::uint64_t>() == 11);
    CHECK(parsed.at("samples").get<std::size_t>() == 5000);
    CHECK(parsed.at("mc_mean").get<double>() == estimate.mean);
    CHECK_FALSE(parsed.at("z_score").is_null());
}
