#include <gtest/gtest.h>

#include <string>

#include "flrw_blowup/scenario.hpp"

using namespace flrw;

namespace {

const std::string kMinimal = R"({
  "cosmology": {"n": 1, "c": 1.0, "a0": 1.0, "H": 0.0, "sigma": 0.0, "m_squared": 0.0},
  "cone": {"r0": 1.0},
  "theorem": {"N": 2.0, "epsilon": 0.5, "theta": 0.5, "lambda": 1.0, "p": 3.0, "w0": 16.0, "w1": 64.0}
})";

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    return s.replace(pos, from.size(), to);
}

std::string error_of(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ScenarioError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Scenario, MinimalFileGetsRunDefaults) {
    const auto sc = parse_scenario(kMinimal);
    EXPECT_EQ(sc.cosmology.n, 1);
    EXPECT_EQ(sc.w0, 16.0);
    EXPECT_FALSE(sc.run.t_end.has_value());
    EXPECT_EQ(sc.run.grid_h, 1e-3);
    EXPECT_EQ(sc.run.r_max_factor, 1.25);
    EXPECT_EQ(sc.run.rtol, 1e-10);
    EXPECT_FALSE(sc.sweep.has_value());
}

TEST(Scenario, EpsilonConstraintNamed) {
    const auto msg = error_of(replace(kMinimal, "\"epsilon\": 0.5", "\"epsilon\": 1.5"));
    EXPECT_NE(msg.find("epsilon"), std::string::npos);
    EXPECT_NE(msg.find("(0,1)"), std::string::npos);
}

TEST(Scenario, ExcludedRegionStillLoads) {
    const auto sc = parse_scenario(replace(replace(kMinimal, "\"H\": 0.0", "\"H\": 1.0"), "\"sigma\": 0.0", "\"sigma\": -2.0"));
    EXPECT_TRUE(sc.cosmology.excluded_region());
}

TEST(Scenario, UnknownKeysRejected) {
    EXPECT_NE(error_of(replace(kMinimal, "\"r0\": 1.0", "\"r0\": 1.0, \"radius\": 2")).find("cone.radius"),
              std::string::npos);
    EXPECT_NE(error_of(replace(kMinimal, "\"cone\"", "\"extra\": 1, \"cone\"")).find("extra"), std::string::npos);
}

TEST(Scenario, MissingAndMistypedKeys) {
    EXPECT_NE(error_of(replace(kMinimal, "\"p\": 3.0, ", "")).find("theorem.p"), std::string::npos);
    EXPECT_NE(error_of(replace(kMinimal, "\"p\": 3.0", "\"p\": \"3\"")).find("theorem.p"), std::string::npos);
    EXPECT_NE(error_of(replace(kMinimal, "\"n\": 1", "\"n\": 1.5")).find("integer"), std::string::npos);
}

TEST(Scenario, SyntaxErrorReportsLine) {
    const auto msg = error_of(replace(kMinimal, "\"r0\": 1.0}", "\"r0\": 1.0"));
    EXPECT_NE(msg.find("line"), std::string::npos);
}

TEST(Scenario, SweepBlockValidation) {
    const std::string with_axes =
        replace(kMinimal, "\n}", ",\n \"sweep\": {\"axes\": [{\"path\": \"cosmology.H\", \"values\": [-1, 0, 1]}]}\n}");
    const auto sc = parse_scenario(with_axes);
    ASSERT_TRUE(sc.sweep.has_value());
    EXPECT_EQ(sc.sweep->axes[0].values.size(), 3u);
    EXPECT_EQ(sc.sweep->cap, 1000000u);
    EXPECT_FALSE(error_of(replace(kMinimal, "\n}", ",\n \"sweep\": {\"axes\": []}\n}")).empty());
}

TEST(Scenario, WithValueReplacesLeaf) {
    const auto sc = parse_scenario(kMinimal);
    const auto doc = with_value(sc.source, "theorem.w0", 5.0);
    EXPECT_EQ(scenario_from_json(doc).w0, 5.0);
    EXPECT_THROW(with_value(sc.source, "w0", 5.0), ScenarioError);
}

TEST(Scenario, MissingFileIsIoError) {
    EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), std::ios_base::failure);
}
