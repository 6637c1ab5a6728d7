#include <gtest/gtest.h>

#include <map>

#include "qfilter/config.hpp"
#include "qfilter/csv.hpp"

using namespace qfilter;

TEST(Config, DefaultsRoundTrip) {
  const ExperimentConfig d;
  EXPECT_EQ(parse_config(serialize_config(d)), d);
  EXPECT_NO_THROW(d.validate());
}

TEST(Config, ModifiedValuesRoundTrip) {
  ExperimentConfig c;
  c.scenario = "weak";
  c.seed = 18446744073709551615ull;
  c.kappa = 0.1 + 0.2;  // not exactly representable as a short decimal
  c.epsilon = -1e-300;
  c.compare_me2 = true;
  c.goal_sets = "single";
  c.eta2 = 0.5;
  c.discord_resolution = 9;
  const ExperimentConfig back = parse_config(serialize_config(c));
  EXPECT_EQ(back, c);
  EXPECT_EQ(serialize_config(back), serialize_config(c));
}

TEST(Config, ParsesSectionsCommentsAndWhitespace) {
  const ExperimentConfig c = parse_config(
      "# comment\n"
      "seed = 7\n"
      "  \n"
      "[sim]\n"
      "  kappa=0.02   \n"
      "periods = 3\n"
      "[ensemble]\n"
      "realizations = 12\n"
      "compare_me2 = true\n"
      "[goalprog]\n"
      "sets = single\n");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.kappa, 0.02);
  EXPECT_EQ(c.periods, 3.0);
  EXPECT_EQ(c.realizations, 12);
  EXPECT_TRUE(c.compare_me2);
  EXPECT_EQ(c.goal_sets, "single");
  EXPECT_EQ(c.omega, 1.0);
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse_config("bogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[sim]\nseed = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[nowhere]\n"), ConfigError);
  EXPECT_THROW(parse_config("[sim\n"), ConfigError);
  EXPECT_THROW(parse_config("[sim]\nkappa = 0.1\nkappa = 0.2\n"), ConfigError);
  EXPECT_THROW(parse_config("[sim]\nkappa = fast\n"), ConfigError);
  EXPECT_THROW(parse_config("[sim]\nkappa 0.1\n"), ConfigError);
  EXPECT_THROW(parse_config("[ensemble]\ncompare_me2 = yes\n"), ConfigError);
  EXPECT_THROW(parse_config("[sim]\nsteps_per_period = 1.5\n"), ConfigError);
  EXPECT_THROW(parse_config("scenario =\n"), ConfigError);
}

TEST(Config, ValidationCatchesBadRanges) {
  ExperimentConfig c;
  c.kappa = -0.1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.steps_per_period = 100;  // Omega dt = 0.063 > 0.01
  EXPECT_THROW(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.goal_sets = "other";
  EXPECT_THROW(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.kappa_max = c.kappa_min / 2;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, EnvironmentOverridesSeedAndOutputOnly) {
  std::map<std::string, std::string> env = {{"QFILTER_SEED", "99"}, {"QFILTER_OUT", "/tmp/x"}, {"QFILTER_KAPPA", "1"}};
  auto lookup = [&](const char* k) -> const char* {
    const auto it = env.find(k);
    return it == env.end() ? nullptr : it->second.c_str();
  };
  ExperimentConfig c;
  apply_environment(c, lookup);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.out, "/tmp/x");
  EXPECT_EQ(c.kappa, 0.005);
  env["QFILTER_SEED"] = "12x";
  EXPECT_THROW(apply_environment(c, lookup), ConfigError);
}

TEST(Config, HashTracksContentButNotOutputDirectory) {
  ExperimentConfig a, b;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.out = "elsewhere";
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.seed += 1;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(hash_hex(0x1f).size(), 16u);
  EXPECT_EQ(hash_hex(0x1f), "000000000000001f");
}

TEST(Config, SimConfigFromExperiment) {
  ExperimentConfig c;
  c.steps_per_period = kFastStepsPerPeriod;
  const SimConfig s = c.sim();
  EXPECT_EQ(s.n_steps, 150000);
  EXPECT_EQ(s.output_points, 1000);
  EXPECT_EQ(s.seed, c.seed);
  EXPECT_NEAR(s.horizon(), 15.0 * 2.0 * std::numbers::pi, 1e-9);
}

TEST(Csv, ValueFormatting) {
  EXPECT_EQ(format_value(kInfinity), "inf");
  EXPECT_EQ(format_value(-kInfinity), "-inf");
  EXPECT_EQ(format_value(std::nan("")), "nan");
  EXPECT_EQ(format_value(0.5), "0.5");
  EXPECT_EQ(std::stod(format_value(0.1 + 0.2)), 0.1 + 0.2);
}
