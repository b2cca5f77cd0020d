#include "mmdopt/scene.hpp"

#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "mmdopt/reduced_set.hpp"
#include "mmdopt/rng.hpp"

namespace {

using mmdopt::ObstacleSampleSet;
using mmdopt::SceneConfig;

TEST(SceneConfig, ValidatesItsFields) {
  SceneConfig s;
  EXPECT_NO_THROW(mmdopt::validate(s));

  s.intents = {{3.5, 0.9}, {0.0, 0.2}};
  EXPECT_THROW(mmdopt::validate(s), std::invalid_argument);
  s = {};
  s.intents = {{3.5, 1.2}, {0.0, -0.2}};
  EXPECT_THROW(mmdopt::validate(s), std::invalid_argument);
  s = {};
  s.intents.clear();
  EXPECT_THROW(mmdopt::validate(s), std::invalid_argument);
  s = {};
  s.n_draw = 0;
  EXPECT_THROW(mmdopt::validate(s), std::invalid_argument);
  s = {};
  s.velocity_law.stddev = -0.1;
  EXPECT_THROW(mmdopt::validate(s), std::invalid_argument);
  s = {};
  s.horizon = 4;
  EXPECT_THROW(mmdopt::validate(s), std::invalid_argument);
}

TEST(SceneConfig, BoundaryHelpersPinTheInitialState) {
  SceneConfig s;
  s.ego_x = 1.0;
  s.ego_y = -0.5;
  s.ego_vx = 14.0;
  s.ego_ay = 0.3;
  const auto ego = mmdopt::ego_boundary(s);
  EXPECT_DOUBLE_EQ(*ego.x.start.position, 1.0);
  EXPECT_DOUBLE_EQ(*ego.y.start.position, -0.5);
  EXPECT_DOUBLE_EQ(*ego.x.start.velocity, 14.0);
  EXPECT_DOUBLE_EQ(*ego.y.start.acceleration, 0.3);
  EXPECT_FALSE(ego.x.end.position.has_value());

  const auto obs = mmdopt::obstacle_boundary(s);
  EXPECT_DOUBLE_EQ(*obs.x.start.position, s.obs_x);
  EXPECT_DOUBLE_EQ(*obs.y.start.position, s.obs_y);
}

TEST(SceneConfig, PlanningAndValidationStreamsDiffer) {
  SceneConfig s;
  s.seed = 123;
  EXPECT_EQ(mmdopt::draw_stream_seed(s), mmdopt::derive_seed(123, 0x0d));
  EXPECT_EQ(mmdopt::validation_stream_seed(s), mmdopt::derive_seed(123, 0x7a));
  EXPECT_NE(mmdopt::draw_stream_seed(s), mmdopt::validation_stream_seed(s));
}

TEST(GenerateObstacleSamples, IntentMixMatchesTheProbabilities) {
  SceneConfig s;
  s.intents = {{0.0, 0.95}, {3.5, 0.05}};
  s.seed = 4;
  const ObstacleSampleSet o =
      mmdopt::generate_obstacle_samples(s, 1000, mmdopt::draw_stream_seed(s));
  ASSERT_EQ(o.size(), 1000);
  ASSERT_EQ(o.horizon(), 50);

  int cut_in = 0;
  for (Eigen::Index j = 0; j < o.size(); ++j) {
    const double terminal_y = o.stacked()(j, 2 * o.horizon() - 1);
    if (std::abs(terminal_y - 0.0) < 0.5) ++cut_in;
  }
  EXPECT_GE(cut_in, 930);
  EXPECT_LE(cut_in, 970);

  EXPECT_THROW(mmdopt::generate_obstacle_samples(s, 0, 1), std::invalid_argument);
}

TEST(GenerateObstacleSamples, DegenerateLawCollapsesEveryDraw) {
  SceneConfig s;
  s.intents = {{3.5, 1.0}};
  s.velocity_law = {10.0, 0.0};
  const ObstacleSampleSet o = mmdopt::generate_obstacle_samples(s, 40, 9);
  for (Eigen::Index j = 1; j < o.size(); ++j)
    EXPECT_EQ((o.stacked().row(j) - o.stacked().row(0)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(GenerateObstacleSamples, TerminalSpeedIsUnbiased) {
  SceneConfig s;
  s.intents = {{3.5, 1.0}};  // keep the lane; speed is the only variation
  const int n = 20000;
  const ObstacleSampleSet o = mmdopt::generate_obstacle_samples(s, n, 11);

  double mean = 0.0;
  const Eigen::Index h = o.horizon();
  for (Eigen::Index j = 0; j < o.size(); ++j)
    mean += (o.stacked()(j, h - 1) - o.stacked()(j, h - 2)) / o.dt();
  mean /= static_cast<double>(n);

  // Three standard errors of the speed law, plus settling slack.
  EXPECT_NEAR(mean, s.velocity_law.mean, 3.0 * 1.5 / std::sqrt(1.0 * n) + 0.005);
}

TEST(MakeSceneSuite, KeepsTheBaseAndCyclesTheGrid) {
  SceneConfig base;
  base.seed = 77;
  const auto suite = mmdopt::make_scene_suite(base, 12, 7);
  ASSERT_EQ(suite.size(), 12u);
  EXPECT_EQ(suite[0].id, base.id);
  EXPECT_EQ(suite[0].seed, base.seed);
  EXPECT_DOUBLE_EQ(suite[0].intents[0].probability, 0.95);

  const double grid[] = {0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95};
  std::set<std::string> ids;
  for (size_t i = 0; i < suite.size(); ++i) {
    ids.insert(suite[i].id);
    EXPECT_NO_THROW(mmdopt::validate(suite[i]));
    if (i == 0) continue;
    EXPECT_EQ(suite[i].seed, mmdopt::derive_seed(base.seed, i));
    EXPECT_DOUBLE_EQ(suite[i].intents[0].probability, 1.0 - grid[(i - 1) % 10]);
    EXPECT_DOUBLE_EQ(suite[i].intents[1].probability, grid[(i - 1) % 10]);
    EXPECT_LE(std::abs(suite[i].obs_x - base.obs_x), 5.0);
    EXPECT_GE(suite[i].obs_vx, 0.5);
  }
  EXPECT_EQ(ids.size(), suite.size());

  // Scene 11 wraps around to the first grid entry.
  EXPECT_DOUBLE_EQ(suite[11].intents[0].probability, 1.0 - 0.05);

  const auto again = mmdopt::make_scene_suite(base, 12, 7);
  for (size_t i = 0; i < suite.size(); ++i) {
    EXPECT_EQ(again[i].id, suite[i].id);
    EXPECT_EQ(again[i].seed, suite[i].seed);
    EXPECT_DOUBLE_EQ(again[i].obs_x, suite[i].obs_x);
    EXPECT_DOUBLE_EQ(again[i].obs_vx, suite[i].obs_vx);
  }

  EXPECT_EQ(mmdopt::make_scene_suite(base, 1, 7).size(), 1u);
  EXPECT_THROW(mmdopt::make_scene_suite(base, 0, 7), std::invalid_argument);
}

TEST(MakeSceneSuite, CoversTheWholeProbabilityGrid) {
  SceneConfig base;
  const auto suite = mmdopt::make_scene_suite(base, 100, 1);
  std::set<double> probabilities;
  for (const SceneConfig& s : suite) probabilities.insert(s.intents[0].probability);
  EXPECT_EQ(probabilities.size(), 10u);
}

}  // namespace
