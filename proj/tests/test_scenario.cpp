#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "apexmr/scenario.hpp"
#include "helpers.hpp"

using namespace apexmr;
using apexmr::testing::loadFixture;
using apexmr::testing::readFile;
using apexmr::testing::fixturePath;

namespace {

// synthetic cases start from the micro fixture and mutate its json
nlohmann::json microJson() { return nlohmann::json::parse(readFile(fixturePath("micro.scn"))); }

}  // namespace

TEST_CASE("empty step list parses to a valid scenario") {
    auto doc = microJson();
    doc["steps"] = nlohmann::json::array();
    Scenario s = parseScenario(doc.dump());
    CHECK(s.steps.empty());
    CHECK(s.numRobots() == 2);
    CHECK(s.world.objects.size() == 2);
    CHECK(s.grasp_candidates.empty());
}

TEST_CASE("step with no type-matching object is infeasible") {
    auto doc = microJson();
    doc["steps"][0]["required_type"] = "2x2";
    CHECK_THROWS_AS(parseScenario(doc.dump()), InfeasibilityError);
}

TEST_CASE("malformed json raises a parse error") {
    CHECK_THROWS_AS(parseScenario("{ not json"), ParseError);
    CHECK_THROWS_AS(parseScenario(R"({"robots": []})"), ParseError);
}

TEST_CASE("handover steps must also request support") {
    auto doc = microJson();
    doc["steps"][0]["needs_handover"] = true;
    doc["steps"][0]["needs_support"] = false;
    CHECK_THROWS_AS(parseScenario(doc.dump()), ValidationError);
}

TEST_CASE("step indices must be contiguous from 1") {
    auto doc = microJson();
    doc["steps"][1]["index"] = 3;
    CHECK_THROWS_AS(parseScenario(doc.dump()), ValidationError);
}

TEST_CASE("basic parameter validation") {
    auto doc = microJson();
    doc["params"]["dt"] = 0.0;
    CHECK_THROWS_AS(parseScenario(doc.dump()), ValidationError);
    doc = microJson();
    doc["robots"][0]["v_max"] = -1.0;
    CHECK_THROWS_AS(parseScenario(doc.dump()), ValidationError);
}

TEST_CASE("cliff fixture loads with at least one candidate per step") {
    Scenario s = loadFixture("cliff.scn");
    CHECK(s.steps.size() == 11);
    REQUIRE(s.grasp_candidates.size() == s.steps.size());
    for (size_t j = 0; j < s.steps.size(); ++j) {
        size_t total = 0;
        for (const auto &per_robot : s.grasp_candidates[j])
            for (const auto &per_obj : per_robot) total += per_obj.size();
        CHECK(total >= 1);
    }
}

TEST_CASE("every bundled fixture loads and respects the feasibility invariant") {
    for (const char *name : {"cliff.scn", "stairs.scn", "faucet.scn", "bridge.scn",
                             "fish.scn", "towers.scn", "towers_wide.scn", "micro.scn",
                             "corridor.scn", "trio.scn", "quad.scn"}) {
        Scenario s = loadFixture(name);
        CHECK(s.steps.size() >= 2);
        CHECK(s.dt > 0);
        CHECK(s.P >= 1);
        for (size_t j = 0; j < s.steps.size(); ++j) {
            CHECK(s.steps[j].index == int(j) + 1);
            if (s.steps[j].needs_handover) CHECK(s.steps[j].needs_support);
        }
    }
}

TEST_CASE("serialization round-trips canonically") {
    std::string first = serializeScenario(loadFixture("cliff.scn"));
    std::string second = serializeScenario(parseScenario(first));
    CHECK(first == second);
}

TEST_CASE("planarIk boundary and interior targets") {
    RobotModel r;
    r.base = {0.0, 0.0};
    r.link_lengths = {0.6, 0.55};
    r.link_radius = 0.04;
    r.home = Configuration{{0.0, 0.0}};
    r.v_max = 1.0;

    // exactly at full reach: one straight-arm solution
    auto sols = planarIk(r, {{1.15, 0.0}, 0.0});
    REQUIRE(sols.size() >= 1);
    CHECK(sols[0].joints[1] == doctest::Approx(0.0).epsilon(1e-6));

    // outside reach: no solutions
    CHECK(planarIk(r, {{1.3, 0.0}, 0.0}).empty());

    // interior target: two elbow solutions, FK round-trip below 1e-9
    auto two = planarIk(r, {{0.5, 0.4}, 0.0});
    REQUIRE(two.size() == 2);
    for (const auto &q : two) {
        FkResult fk = forwardKinematics(r, q);
        CHECK(std::abs(fk.ee.p.x - 0.5) < 1e-9);
        CHECK(std::abs(fk.ee.p.y - 0.4) < 1e-9);
    }
    CHECK(l1Distance(two[0], two[1]) > 1e-6);
}

TEST_CASE("3-link ik honors the requested heading") {
    RobotModel r;
    r.base = {0.0, 0.0};
    r.link_lengths = {0.7, 0.65, 0.6};
    r.link_radius = 0.04;
    r.home = Configuration{{0.0, 0.0, 0.0}};
    r.v_max = 1.0;
    for (double heading : {0.0, 1.2, -2.0}) {
        auto sols = planarIk(r, {{0.8, 0.4}, heading});
        for (const auto &q : sols) {
            FkResult fk = forwardKinematics(r, q);
            CHECK(std::abs(fk.ee.p.x - 0.8) < 1e-9);
            CHECK(std::abs(fk.ee.p.y - 0.4) < 1e-9);
            CHECK(std::abs(wrapAngle(fk.ee.theta - heading)) < 1e-9);
        }
    }
}

TEST_CASE("loadScenario reads from disk") {
    Scenario s = loadScenario(fixturePath("micro.scn"));
    CHECK(s.steps.size() == 2);
    CHECK(readFile(fixturePath("micro.scn")).size() > 0);
}
