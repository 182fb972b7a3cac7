#include <gtest/gtest.h>

#include <algorithm>

#include "nlc/config.hpp"

using namespace nlc;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const config_error& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Config, DefaultsAreValid) {
    const auto p = parse_config_text("");
    EXPECT_EQ(p.config.grid.dim, 2);
    EXPECT_EQ(p.config.grid.count[0], 64);
    EXPECT_DOUBLE_EQ(p.config.fluid.gamma, 2.0);
    EXPECT_TRUE(p.warnings.empty());
}

TEST(Config, ParsesKeysCommentsAndWhitespace) {
    const auto p = parse_config_text(
        "# comment\n"
        "grid.nx = 32   # trailing\n"
        "  grid.ny=16\n"
        "fluid.mu = 0.25\n"
        "initial.profile = bump\n"
        "initial.seed = 42\n"
        "checks.enabled = false\n"
        "\n");
    EXPECT_EQ(p.config.grid.count[0], 32);
    EXPECT_EQ(p.config.grid.count[1], 16);
    EXPECT_DOUBLE_EQ(p.config.fluid.mu, 0.25);
    EXPECT_EQ(p.config.initial.profile, "bump");
    EXPECT_EQ(p.config.initial.seed, 42u);
    EXPECT_FALSE(p.config.checks.enabled);
    const Grid g = p.config.make_grid();
    EXPECT_EQ(g.cells(), 32u * 16u);
}

TEST(Config, EveryKeyIsAccepted) {
    const auto keys = config_key_list();
    EXPECT_EQ(keys.size(), 52u);
    EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
    EXPECT_NE(std::find(keys.begin(), keys.end(), "reg.beta"), keys.end());
}

TEST(Config, ErrorsCarryLineNumbers) {
    EXPECT_EQ(error_of("grid.nx = 8\nbogus.key = 1\n"), "line 2: unknown key 'bogus.key'");
    EXPECT_EQ(error_of("grid.nx\n"), "line 1: expected 'key = value'");
    EXPECT_EQ(error_of("grid.nx =\n"), "line 1: missing value for 'grid.nx'");
    EXPECT_NE(error_of("\n\nfluid.mu = abc\n").find("line 3:"), std::string::npos);
    EXPECT_NE(error_of("grid.nx = 3.5\n").find("line 1:"), std::string::npos);
    EXPECT_NE(error_of("checks.enabled = maybe\n").find("line 1:"), std::string::npos);
}

TEST(Config, ValidationRejectsBadValues) {
    EXPECT_EQ(error_of("fluid.gamma = 1.4\n"), "gamma must exceed 3/2");
    EXPECT_FALSE(error_of("fluid.mu = -1\n").empty());
    EXPECT_FALSE(error_of("grid.dim = 4\n").empty());
    EXPECT_FALSE(error_of("time.t_end = -1\n").empty());
    EXPECT_FALSE(error_of("time.safety = 1.5\n").empty());
    EXPECT_FALSE(error_of("penalty.sigma0 = 0\n").empty());
    EXPECT_FALSE(error_of("initial.profile = vortex\n").empty());
    EXPECT_FALSE(error_of("initial.trace = spiral\n").empty());
    EXPECT_FALSE(error_of("continuation.levels = 2\n").empty());
    EXPECT_FALSE(error_of("galerkin.modes_per_axis = 64\n").empty());
    EXPECT_FALSE(error_of("reg.delta = 0.01\nreg.beta = 3\nfluid.gamma = 2\n").empty());
    EXPECT_TRUE(error_of("time.t_end = 0\n").empty());
}

TEST(Config, BetaThresholdWarning) {
    EXPECT_TRUE(parse_config_text("fluid.gamma = 2\nreg.delta = 0.01\nreg.beta = 13\n").warnings.empty());
    const auto p = parse_config_text("fluid.gamma = 1.6666666666666667\nreg.delta = 0.01\nreg.beta = 5\n");
    ASSERT_EQ(p.warnings.size(), 1u);
    EXPECT_NE(p.warnings[0].find("30"), std::string::npos);
}

TEST(Config, SoftViolationsBecomeWarnings) {
    const auto p = parse_config_text("fluid.gamma = 1.6\nreg.delta = 0.01\nreg.beta = 8\n");
    EXPECT_FALSE(p.warnings.empty());
}

TEST(Config, IntegrabilitySigma) {
    SimConfig c;
    EXPECT_DOUBLE_EQ(c.integrability_sigma(), 2.0 * 2.0 / 3.0 - 1.0);
    c.checks.sigma = 0.5;
    EXPECT_DOUBLE_EQ(c.integrability_sigma(), 0.5);
}

TEST(Config, MissingFile) { EXPECT_THROW(load_config("/nonexistent/nlc.cfg"), config_error); }
