#include "mmdopt/bench.hpp"

#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mmdopt/scene.hpp"

namespace {

using mmdopt::BenchConfig;
using mmdopt::Method;
using mmdopt::MethodSummary;
using mmdopt::ObstacleSampleSet;
using mmdopt::ReducedSet;
using mmdopt::RunResult;
using mmdopt::SceneConfig;
using mmdopt::Trajectory;

// Scene whose obstacle never comes near the ego lane, sized for fast runs.
SceneConfig trivially_safe_scene() {
  SceneConfig s;
  s.id = "safe";
  s.horizon = 20;
  s.obs_y = 40.0;
  s.intents = {{40.0, 1.0}};
  s.n_draw = 30;
  s.n_validation = 50;
  s.seed = 21;
  return s;
}

BenchConfig tiny_config() {
  BenchConfig cfg;
  cfg.m = 5;
  cfg.selection_restarts = 2;
  cfg.reduced_set.cem_batch = 100;
  cfg.reduced_set.cem_elites = 10;
  cfg.reduced_set.cem_iters = 5;
  cfg.optimizer.batch = 100;
  cfg.optimizer.constraint_elites = 30;
  cfg.optimizer.elites = 10;
  cfg.optimizer.iterations = 3;
  return cfg;
}

TEST(Method, NamesRoundTrip) {
  EXPECT_STREQ(mmdopt::method_name(Method::kMmd), "mmd");
  EXPECT_STREQ(mmdopt::method_name(Method::kScenario), "scenario");
  EXPECT_EQ(mmdopt::method_from_name("mmd"), Method::kMmd);
  EXPECT_EQ(mmdopt::method_from_name("scenario"), Method::kScenario);
  EXPECT_THROW(mmdopt::method_from_name("average"), std::invalid_argument);
}

TEST(BenchConfig, ValidatesItsFields) {
  BenchConfig cfg;
  cfg.m = 0;
  EXPECT_THROW(mmdopt::validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.surrogate_weight = -1.0;
  EXPECT_THROW(mmdopt::validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.refine_ridge = 0.0;
  EXPECT_THROW(mmdopt::validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.selection_restarts = 0;
  EXPECT_THROW(mmdopt::validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.planning_margin = 0.0;
  EXPECT_THROW(mmdopt::validate(cfg), std::invalid_argument);
}

TEST(ValidateTrajectory, CountsNonPenetratingSamples) {
  const Eigen::Index h = 10;
  Eigen::VectorXd xs(h), ys(h);
  for (Eigen::Index k = 0; k < h; ++k) {
    xs(k) = 1.5 * static_cast<double>(k);
    ys(k) = 0.0;
  }
  const Trajectory ego{xs, ys, 0.1};
  const mmdopt::CollisionGeometry geom;  // a=4, b=2, one circle

  Eigen::MatrixXd stacked = Eigen::MatrixXd::Constant(6, 2 * h, 500.0);
  {
    const ObstacleSampleSet clear_set(stacked, h, 0.1);
    EXPECT_EQ(mmdopt::validate_trajectory(ego, clear_set, geom), 6);
  }

  // Sample 2 crosses the ego position at step 3; everything else stays far.
  stacked(2, 3) = ego.x(3);
  stacked(2, h + 3) = ego.y(3);
  const ObstacleSampleSet one_hit(stacked, h, 0.1);
  EXPECT_EQ(mmdopt::validate_trajectory(ego, one_hit, geom), 5);

  // Same count as the definition loop.
  int want = 0;
  for (Eigen::Index j = 0; j < one_hit.size(); ++j) {
    bool hit = false;
    for (Eigen::Index k = 0; k < h && !hit; ++k)
      hit = mmdopt::f_max_over_circles(ego.x(k), ego.y(k), one_hit.stacked()(j, k),
                                       one_hit.stacked()(j, h + k), geom) > 0.0;
    if (!hit) ++want;
  }
  EXPECT_EQ(mmdopt::validate_trajectory(ego, one_hit, geom), want);

  const Trajectory short_ego{xs.head(5), ys.head(5), 0.1};
  EXPECT_THROW(mmdopt::validate_trajectory(short_ego, one_hit, geom),
               std::invalid_argument);
}

TEST(RunScene, TriviallySafeSceneScoresEverySample) {
  const SceneConfig scene = trivially_safe_scene();
  const BenchConfig cfg = tiny_config();
  for (Method method : {Method::kMmd, Method::kScenario}) {
    const RunResult r = mmdopt::run_scene(scene, method, cfg);
    EXPECT_EQ(r.collision_free, scene.n_validation);
    EXPECT_EQ(r.n_validation, scene.n_validation);
    EXPECT_DOUBLE_EQ(mmdopt::collision_free_fraction(r), 1.0);
    EXPECT_EQ(r.scene_id, "safe");
    EXPECT_EQ(r.seed, scene.seed);
    EXPECT_EQ(r.trace.size(), 3u);
    EXPECT_EQ(static_cast<Eigen::Index>(r.set_indices.size()), cfg.m);
    EXPECT_GE(r.t_reduce_s, 0.0);
    EXPECT_GE(r.t_optimize_s, 0.0);
  }
}

TEST(RunBenchmark, RepeatedRunsEmitIdenticalRows) {
  const auto suite = mmdopt::make_scene_suite(trivially_safe_scene(), 2, 13);
  const BenchConfig cfg = tiny_config();
  const std::vector<Method> methods = {Method::kMmd, Method::kScenario};

  const auto a = mmdopt::run_benchmark(suite, methods, cfg);
  const auto b = mmdopt::run_benchmark(suite, methods, cfg);
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(mmdopt::results_csv(a), mmdopt::results_csv(b));
  EXPECT_EQ(mmdopt::summary_csv(mmdopt::summarize(a)),
            mmdopt::summary_csv(mmdopt::summarize(b)));
}

TEST(RunWithForecast, MethodsShareTheOptimizerMachinery) {
  // With both collision weights zeroed the two methods reduce to the same
  // smoothness/velocity objective and must produce the same run.
  const SceneConfig scene = trivially_safe_scene();
  BenchConfig cfg = tiny_config();
  cfg.surrogate_weight = 0.0;
  cfg.scenario_weight = 0.0;

  const ObstacleSampleSet draws = mmdopt::generate_obstacle_samples(
      scene, scene.n_draw, mmdopt::draw_stream_seed(scene));
  const ObstacleSampleSet validation = mmdopt::generate_obstacle_samples(
      scene, scene.n_validation, mmdopt::validation_stream_seed(scene));
  ReducedSet rs;
  rs.indices = {0, 1, 2, 3, 4};
  rs.weights = Eigen::VectorXd::Constant(5, 0.2);
  rs.parent_n = draws.size();

  const RunResult mmd =
      mmdopt::run_with_forecast(scene, Method::kMmd, cfg, rs, draws, validation, 0.0);
  const RunResult scen = mmdopt::run_with_forecast(scene, Method::kScenario, cfg, rs,
                                                   draws, validation, 0.0);
  EXPECT_DOUBLE_EQ(mmd.best_cost, scen.best_cost);
  EXPECT_EQ((mmd.trajectory.x - scen.trajectory.x).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((mmd.trajectory.y - scen.trajectory.y).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(mmd.collision_free, scen.collision_free);
}

TEST(Summarize, MatchesHandComputedStatistics) {
  auto row = [](Method m, int free_count, int n) {
    RunResult r;
    r.scene_id = "s";
    r.method = m;
    r.collision_free = free_count;
    r.n_validation = n;
    return r;
  };
  const std::vector<RunResult> results = {
      row(Method::kMmd, 70, 100), row(Method::kMmd, 100, 100),
      row(Method::kMmd, 80, 100), row(Method::kMmd, 90, 100),
      row(Method::kScenario, 60, 100)};

  const auto summaries = mmdopt::summarize(results);
  ASSERT_EQ(summaries.size(), 2u);
  const MethodSummary& mmd = summaries[0];
  EXPECT_EQ(mmd.method, "mmd");
  EXPECT_EQ(mmd.scenes, 4);
  EXPECT_DOUBLE_EQ(mmd.mean, 0.85);
  EXPECT_DOUBLE_EQ(mmd.median, 0.85);
  EXPECT_DOUBLE_EQ(mmd.q1, 0.775);
  EXPECT_DOUBLE_EQ(mmd.q3, 0.925);
  EXPECT_DOUBLE_EQ(mmd.min, 0.7);
  EXPECT_DOUBLE_EQ(mmd.max, 1.0);

  const MethodSummary& scen = summaries[1];
  EXPECT_EQ(scen.scenes, 1);
  EXPECT_DOUBLE_EQ(scen.median, 0.6);
  EXPECT_DOUBLE_EQ(scen.q1, 0.6);
}

TEST(Csv, RowsAreExactlyFormatted) {
  RunResult r;
  r.scene_id = "s1";
  r.method = Method::kMmd;
  r.collision_free = 45;
  r.n_validation = 50;
  r.best_cost = 3.25;
  r.seed = 9;
  r.set_indices = {3, 1, 2};
  EXPECT_EQ(mmdopt::results_csv({r}),
            "scene,method,collision_free,n_validation,fraction,best_cost,seed,"
            "set_indices\n"
            "s1,mmd,45,50,0.9,3.25,9,3;1;2\n");
  EXPECT_EQ(mmdopt::timings_csv({r}),
            "scene,method,t_reduce_s,t_optimize_s,t_validate_s\ns1,mmd,0,0,0\n");

  MethodSummary s;
  s.method = "mmd";
  s.scenes = 4;
  s.mean = 0.85;
  s.median = 0.85;
  s.q1 = 0.775;
  s.q3 = 0.925;
  s.min = 0.7;
  s.max = 1.0;
  EXPECT_EQ(mmdopt::summary_csv({s}),
            "method,scenes,mean,median,q1,q3,min,max\n"
            "mmd,4,0.85,0.85,0.775,0.925,0.7,1\n");

  EXPECT_EQ(mmdopt::timing_table_csv({{5, 0.5, 0.25}}),
            "m,t_select_s,t_optimize_s\n5,0.5,0.25\n");
}

TEST(BenchConfigJson, RoundTripsEveryField) {
  BenchConfig cfg;
  cfg.m = 7;
  cfg.surrogate_weight = 1e6;
  cfg.scenario_weight = 1234.5;
  cfg.refine_ridge = 0.12;
  cfg.selection_restarts = 3;
  cfg.planning_margin = 1.3;
  cfg.trajectory_kernel.bandwidth = 12.0;
  cfg.constraint_kernel.bandwidth = 0.5;
  cfg.reduced_set.beta = 0.7;
  cfg.reduced_set.cem_batch = 321;
  cfg.reduced_set.cem_iters = 17;
  cfg.reduced_set.init_sigma = 0.2;
  cfg.optimizer.batch = 456;
  cfg.optimizer.gamma = 0.7;
  cfg.optimizer.eta = 0.4;
  cfg.optimizer.iterations = 6;
  cfg.optimizer.projection_iters = 4;
  cfg.optimizer.add_residual_to_cost = false;
  cfg.scenario.aggregation = mmdopt::BaselineConfig::Aggregation::kSumOverSteps;

  const BenchConfig back =
      mmdopt::bench_config_from_json(mmdopt::config_to_json(cfg), "cfg");
  EXPECT_EQ(back.m, 7);
  EXPECT_DOUBLE_EQ(back.surrogate_weight, 1e6);
  EXPECT_DOUBLE_EQ(back.scenario_weight, 1234.5);
  EXPECT_DOUBLE_EQ(back.refine_ridge, 0.12);
  EXPECT_EQ(back.selection_restarts, 3);
  EXPECT_DOUBLE_EQ(back.planning_margin, 1.3);
  EXPECT_DOUBLE_EQ(back.trajectory_kernel.bandwidth, 12.0);
  EXPECT_DOUBLE_EQ(back.constraint_kernel.bandwidth, 0.5);
  ASSERT_TRUE(back.reduced_set.beta.has_value());
  EXPECT_DOUBLE_EQ(*back.reduced_set.beta, 0.7);
  EXPECT_EQ(back.reduced_set.cem_batch, 321);
  EXPECT_EQ(back.reduced_set.cem_iters, 17);
  EXPECT_DOUBLE_EQ(back.reduced_set.init_sigma, 0.2);
  EXPECT_EQ(back.optimizer.batch, 456);
  EXPECT_DOUBLE_EQ(back.optimizer.gamma, 0.7);
  EXPECT_DOUBLE_EQ(back.optimizer.eta, 0.4);
  EXPECT_EQ(back.optimizer.iterations, 6);
  EXPECT_EQ(back.optimizer.projection_iters, 4);
  EXPECT_FALSE(back.optimizer.add_residual_to_cost);
  EXPECT_EQ(back.scenario.aggregation,
            mmdopt::BaselineConfig::Aggregation::kSumOverSteps);

  // Absent beta stays unset through a round trip.
  const BenchConfig defaults =
      mmdopt::bench_config_from_json(mmdopt::config_to_json(BenchConfig{}), "cfg");
  EXPECT_FALSE(defaults.reduced_set.beta.has_value());
  EXPECT_EQ(defaults.selection_restarts, 4);

  nlohmann::json bad = mmdopt::config_to_json(BenchConfig{});
  bad["scenario"]["aggregation"] = "avg";
  EXPECT_THROW(mmdopt::bench_config_from_json(bad, "cfg"), mmdopt::ParseError);
  bad = mmdopt::config_to_json(BenchConfig{});
  bad["m"] = "ten";
  EXPECT_THROW(mmdopt::bench_config_from_json(bad, "cfg"), mmdopt::ParseError);
  bad = mmdopt::config_to_json(BenchConfig{});
  bad["m"] = 0;
  EXPECT_THROW(mmdopt::bench_config_from_json(bad, "cfg"), std::invalid_argument);
  EXPECT_THROW(mmdopt::bench_config_from_json(nlohmann::json::array(), "cfg"),
               mmdopt::ParseError);
}

TEST(Manifest, HashTracksTheConfig) {
  const auto suite = mmdopt::make_scene_suite(trivially_safe_scene(), 2, 13);
  const std::vector<Method> methods = {Method::kMmd};
  BenchConfig cfg = tiny_config();

  const nlohmann::json a = mmdopt::manifest_to_json(suite, methods, cfg);
  const nlohmann::json b = mmdopt::manifest_to_json(suite, methods, cfg);
  EXPECT_EQ(a.at("config_hash"), b.at("config_hash"));
  EXPECT_EQ(a.at("kind"), "run_manifest");
  EXPECT_EQ(a.at("scene_seeds").size(), 2u);
  EXPECT_EQ(a.at("config_hash").get<std::string>().size(), 16u);

  cfg.m = 6;
  const nlohmann::json c = mmdopt::manifest_to_json(suite, methods, cfg);
  EXPECT_NE(a.at("config_hash"), c.at("config_hash"));
}

TEST(ReducedSetStudy, HonorsItsContract) {
  const SceneConfig scene = trivially_safe_scene();
  const BenchConfig cfg = tiny_config();

  const auto empty = mmdopt::reduced_set_study(scene, 0, cfg);
  EXPECT_TRUE(empty.random_counts.empty());
  EXPECT_EQ(empty.n_validation, scene.n_validation);
  EXPECT_EQ(empty.optimal_count, scene.n_validation);

  const auto a = mmdopt::reduced_set_study(scene, 3, cfg);
  const auto b = mmdopt::reduced_set_study(scene, 3, cfg);
  ASSERT_EQ(a.random_counts.size(), 3u);
  EXPECT_EQ(a.random_counts, b.random_counts);
  EXPECT_EQ(a.optimal_count, b.optimal_count);
  EXPECT_EQ(a.optimal_set.indices, b.optimal_set.indices);

  EXPECT_THROW(mmdopt::reduced_set_study(scene, -1, cfg), std::invalid_argument);
}

TEST(TimingReport, ProducesOneRowPerSetSize) {
  const SceneConfig scene = trivially_safe_scene();
  const BenchConfig cfg = tiny_config();
  const auto table = mmdopt::timing_report(scene, cfg, {5, 8}, 1);
  ASSERT_EQ(table.size(), 2u);
  EXPECT_EQ(table[0].m, 5);
  EXPECT_EQ(table[1].m, 8);
  for (const auto& row : table) {
    EXPECT_GT(row.t_select_s, 0.0);
    EXPECT_GT(row.t_optimize_s, 0.0);
  }
  EXPECT_THROW(mmdopt::timing_report(scene, cfg, {5}, 0), std::invalid_argument);
}

TEST(Traces, SerializeTheOptimizerHistory) {
  const SceneConfig scene = trivially_safe_scene();
  const BenchConfig cfg = tiny_config();
  const RunResult r = mmdopt::run_scene(scene, Method::kMmd, cfg);
  const nlohmann::json j = mmdopt::traces_to_json({r});
  EXPECT_EQ(j.at("kind"), "bench_traces");
  ASSERT_EQ(j.at("runs").size(), 1u);
  const nlohmann::json& run = j.at("runs")[0];
  EXPECT_EQ(run.at("scene"), "safe");
  EXPECT_EQ(run.at("method"), "mmd");
  EXPECT_EQ(run.at("trace").size(), 3u);
  EXPECT_EQ(run.at("best_input").size(), 2u);
  EXPECT_EQ(run.at("set_weights").size(), 5u);
}

}  // namespace
