#include "vicopt/scenario_io.hpp"

#include <gtest/gtest.h>

#include <string>

using namespace vicopt;

TEST(ParseScenario, MinimalFileFillsDefaults) {
  const Scenario s = parse_scenario(R"({
    "name": "minimal",
    "environment": {"surfaces": [{"axis": 2, "location": 0.05}]}
  })");
  EXPECT_EQ(s.name, "minimal");
  EXPECT_EQ(s.loop.tick_rate, 125.0);
  EXPECT_EQ(s.loop.buffer_period, 3.0);
  EXPECT_EQ(s.loop.mode, ControlMode::SafeOnGoVic);
  ASSERT_EQ(s.environment.surfaces.size(), 1u);
  EXPECT_EQ(s.environment.surfaces[0].stiffness, 1e4);
}

TEST(ParseScenario, EmptySafeSetIsValidationError) {
  try {
    parse_scenario(R"({"name": "x", "safe_set": {"d_lb": 0.2, "d_ub": 0.1}})");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("safe set"), std::string::npos) << e.what();
  }
}

TEST(ParseScenario, MisspelledKeyIsParseError) {
  const std::string text =
      "{\n"
      "  \"name\": \"typo\",\n"
      "  \"environment\": {\n"
      "    \"surfaces\": [{\"axis\": 2, \"sitffness\": 5000}]\n"
      "  }\n"
      "}\n";
  try {
    parse_scenario(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_NE(e.field().find("sitffness"), std::string::npos);
  }
}

TEST(ParseScenario, SyntaxErrorCarriesLine) {
  try {
    parse_scenario("{\n  \"name\": \"x\",\n  \"seed\": ,\n}");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(ParseScenario, WrongTypeIsParseError) {
  EXPECT_THROW(parse_scenario(R"({"name": "x", "episode_length": "long"})"), ParseError);
  EXPECT_THROW(parse_scenario(R"({"name": "x", "initial_state": {"e": [1, 2]}})"), ParseError);
  EXPECT_THROW(parse_scenario(R"({"seed": 3})"), ParseError);
}

TEST(ParseScenario, ScalarBroadcastsToSixAxes) {
  const Scenario s = parse_scenario(R"({"name": "x", "initial_state": {"e": 0.25}})");
  EXPECT_TRUE(s.initial.e.isApprox(Vector6::Constant(0.25)));
}

TEST(ParseScenario, ModeAndGainSections) {
  const Scenario s = parse_scenario(R"({
    "name": "x",
    "loop": {"mode": "constant_gain", "solve_latency": 0.5, "cost": "itae", "rollout": "recorded_state"},
    "gains": {
      "bounds": {"kp_prime": [5, 400]},
      "initial": {"fixed": {"mass": 2, "damping": 10, "stiffness": 50}},
      "constant": {"stiffness": 100}
    }
  })");
  EXPECT_EQ(s.loop.mode, ControlMode::ConstantGain);
  EXPECT_EQ(s.loop.solve_latency, 0.5);
  EXPECT_EQ(s.loop.cost, CostKind::Itae);
  EXPECT_EQ(s.loop.rollout, RolloutMode::RecordedState);
  EXPECT_EQ(s.bounds.lower(kStiffnessBlock + 3), 5.0);
  EXPECT_EQ(s.bounds.upper(kStiffnessBlock), 400.0);
  EXPECT_EQ(s.bounds.lower(kDampingBlock), 1e-6);
  EXPECT_FALSE(s.initial_gains.randomize);
  EXPECT_EQ(s.initial_gains.fixed.mass(4), 2.0);
  EXPECT_EQ(s.constant_gains.stiffness(0), 100.0);
  EXPECT_EQ(s.constant_gains.mass(0), 1.0);
}

TEST(ParseScenario, UnknownModeRejected) {
  EXPECT_THROW(parse_scenario(R"({"name": "x", "loop": {"mode": "fast"}})"), ParseError);
}

TEST(ScenarioToJson, RoundTrip) {
  const Scenario s = parse_scenario(R"({
    "name": "round",
    "seed": 12345678901,
    "episode_length": 4.5,
    "initial_state": {"e": [0.1, 0, 0.3, 0, 0, 0.7]},
    "environment": {
      "surfaces": [{"axis": 1, "location": -0.02, "stiffness": 3000, "damping": 2.5, "penetration_sign": -1}],
      "disturbance": {"random": {"magnitude": [1, 2], "shape": "constant"}},
      "reference": {"interpolation": "linear", "waypoints": [{"t": 0, "position": 0}, {"t": 2, "position": 0.1}]}
    },
    "safe_set": {"d_lb": -0.2, "d_ub": 0.3},
    "loop": {"gamma": 3.3, "sqp": {"max_iter": 7}},
    "metrics": {"dwell": 0.5}
  })");
  const std::string once = scenario_to_json(s);
  const std::string twice = scenario_to_json(parse_scenario(once));
  EXPECT_EQ(once, twice);
  EXPECT_EQ(parse_scenario(once).seed, 12345678901u);
}
