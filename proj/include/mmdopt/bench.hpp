#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mmdopt/baseline.hpp"
#include "mmdopt/collision.hpp"
#include "mmdopt/io.hpp"
#include "mmdopt/optimizer.hpp"
#include "mmdopt/reduced_set.hpp"
#include "mmdopt/scene.hpp"

namespace mmdopt {

enum class Method { kMmd, kScenario };

inline const char* method_name(Method m) {
  return m == Method::kMmd ? "mmd" : "scenario";
}

inline Method method_from_name(const std::string& name) {
  if (name == "mmd") return Method::kMmd;
  if (name == "scenario") return Method::kScenario;
  throw std::invalid_argument("unknown method '" + name + "' (expected mmd|scenario)");
}

struct BenchConfig {
  Eigen::Index m = 10;             // reduced-set size
  double surrogate_weight = 2e6;   // embedding-distance weight in the augmented cost
  double scenario_weight = 5e5;    // hinge-sum weight in the baseline cost
  // Selected sets cluster inside one maneuver mode, so their Gram block is
  // near-singular; a stronger ridge than the library default keeps the refined
  // weights bounded, which the downstream collision surrogate needs.
  double refine_ridge = 0.3;
  // The selection CEM lands in noticeably different local optima per seed;
  // keep the restart whose refined weights embed closest.
  int selection_restarts = 4;
  // Inflates the ellipse axes inside the planning cost only. A handful of
  // reduced samples understates where held-out draws can be, so threading
  // exactly between them scores deceptively clean without a margin.
  double planning_margin = 1.8;
  KernelSpec trajectory_kernel;    // kernel over stacked obstacle trajectories
  KernelSpec constraint_kernel;    // kernel over scalar hinge values
  ReducedSetOptConfig reduced_set;
  OptimizerConfig optimizer;
  BaselineConfig scenario;
};

inline void validate(const BenchConfig& cfg) {
  if (cfg.m < 1) throw std::invalid_argument("bench: m must be >= 1");
  if (!(cfg.surrogate_weight >= 0.0) || !(cfg.scenario_weight >= 0.0))
    throw std::invalid_argument("bench: weights must be non-negative");
  if (!(cfg.refine_ridge > 0.0))
    throw std::invalid_argument("bench: refine_ridge must be positive");
  if (cfg.selection_restarts < 1)
    throw std::invalid_argument("bench: selection_restarts must be >= 1");
  if (!(cfg.planning_margin > 0.0))
    throw std::invalid_argument("bench: planning_margin must be positive");
  validate(cfg.trajectory_kernel);
  validate(cfg.constraint_kernel);
}

// Seed stream tags; all per-scene randomness derives from the scene seed, so a
// manifest (scene seeds + config) reproduces every run byte for byte.
inline constexpr uint64_t kReduceStream = 0x5e;
inline constexpr uint64_t kOptimizerStream = 0xa1;
inline constexpr uint64_t kStudyStream = 0x57;

struct RunResult {
  std::string scene_id;
  Method method = Method::kMmd;
  int collision_free = 0;
  int n_validation = 0;
  double best_cost = 0.0;
  uint64_t seed = 0;
  std::vector<Eigen::Index> set_indices;
  Eigen::VectorXd set_weights;
  std::vector<IterationTraceRow> trace;
  Trajectory trajectory;
  BehavioralInput input;
  double t_reduce_s = 0.0;
  double t_optimize_s = 0.0;
  double t_validate_s = 0.0;
};

inline double collision_free_fraction(const RunResult& r) {
  return static_cast<double>(r.collision_free) / static_cast<double>(r.n_validation);
}

// Counts held-out samples the ego trajectory never penetrates.
inline int validate_trajectory(const Trajectory& ego, const ObstacleSampleSet& validation,
                               const CollisionGeometry& geom) {
  if (ego.horizon() != validation.horizon() || ego.dt != validation.dt())
    throw std::invalid_argument("validate_trajectory: horizon/dt mismatch");
  const Eigen::Index h = ego.horizon();
  int free_count = 0;
  for (Eigen::Index j = 0; j < validation.size(); ++j) {
    bool hit = false;
    for (Eigen::Index k = 0; k < h && !hit; ++k) {
      const double ox = validation.stacked()(j, k);
      const double oy = validation.stacked()(j, h + k);
      hit = f_max_over_circles(ego.x(k), ego.y(k), ox, oy, geom) > 0.0;
    }
    if (!hit) ++free_count;
  }
  return free_count;
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

// Reduced-set construction for one method. Exposed separately so studies and
// fixtures can inspect the selection without running the optimizer.
inline ReducedSet reduce_for_method(const ObstacleSampleSet& draws, const SceneConfig& scene,
                                    Method method, const BenchConfig& cfg) {
  if (method == Method::kMmd) {
    ReducedSetOptConfig rcfg = cfg.reduced_set;
    rcfg.bandwidth = cfg.trajectory_kernel;
    const uint64_t base = derive_seed(scene.seed, kReduceStream);
    ReducedSet best;
    double best_mmd = std::numeric_limits<double>::infinity();
    for (int r = 0; r < cfg.selection_restarts; ++r) {
      rcfg.seed = derive_seed(base, static_cast<uint64_t>(r));
      const ReducedSet selected = select_reduced_set(draws, cfg.m, rcfg);
      ReducedSet refined =
          refine_weights(draws, selected.indices, cfg.trajectory_kernel, cfg.refine_ridge);
      const double mmd = reduced_set_mmd(draws, refined, cfg.trajectory_kernel);
      if (mmd < best_mmd) {
        best_mmd = mmd;
        best = std::move(refined);
      }
    }
    return best;
  }
  const Trajectory guess =
      frenet_plan({scene.ego_y, scene.v_des}, ego_boundary(scene), scene.ego_gains,
                  scene.horizon, scene.dt);
  BaselineConfig bcfg = cfg.scenario;
  bcfg.m = cfg.m;
  return select_boundary_set(draws, guess, scene.geometry, bcfg);
}

inline CostFn make_cost_fn(const ObstacleForecast& forecast, const SceneConfig& scene,
                           Method method, const BenchConfig& cfg) {
  CollisionGeometry geom = scene.geometry;
  geom.a *= cfg.planning_margin;
  geom.b_axis *= cfg.planning_margin;
  if (method == Method::kMmd) {
    SurrogateConfig sc;
    sc.w = cfg.surrogate_weight;
    sc.v_des = scene.v_des;
    sc.bandwidth = cfg.constraint_kernel;
    return [forecast, geom, sc](const BehavioralInput&, const Trajectory& traj) {
      return c_aug(traj, forecast, geom, sc);
    };
  }
  const double v_des = scene.v_des;
  const double weight = cfg.scenario_weight;
  return [forecast, geom, v_des, weight](const BehavioralInput&, const Trajectory& traj) {
    return smoothness_velocity_cost(traj, v_des) +
           weight * deterministic_collision_cost(traj, forecast, geom);
  };
}

// Optimizes against a pre-built forecast; shared by the benchmark and the
// reduced-set study so both compare sets under identical optimizer draws.
inline RunResult run_with_forecast(const SceneConfig& scene, Method method,
                                   const BenchConfig& cfg, const ReducedSet& rs,
                                   const ObstacleSampleSet& draws,
                                   const ObstacleSampleSet& validation,
                                   double t_reduce_s) {
  FrenetPlanner planner(ego_boundary(scene), scene.ego_gains, scene.horizon, scene.dt);
  TrajectoryProjector projector(ego_boundary(scene), scene.bounds, scene.horizon, scene.dt);
  const ObstacleForecast forecast = materialize(draws, rs);

  OptimizerConfig ocfg = cfg.optimizer;
  ocfg.seed = derive_seed(scene.seed, kOptimizerStream);
  ocfg.init_mean = Eigen::Vector2d(scene.ego_y, scene.v_des);

  const auto t1 = std::chrono::steady_clock::now();
  OptimizeResult opt = optimize(planner, projector, ocfg,
                                make_cost_fn(forecast, scene, method, cfg));
  const double t_optimize = detail::seconds_since(t1);

  const auto t2 = std::chrono::steady_clock::now();
  const int free_count = validate_trajectory(opt.trajectory, validation, scene.geometry);
  const double t_validate = detail::seconds_since(t2);

  return RunResult{scene.id,
                   method,
                   free_count,
                   static_cast<int>(validation.size()),
                   opt.cost,
                   scene.seed,
                   rs.indices,
                   rs.weights,
                   std::move(opt.trace),
                   std::move(opt.trajectory),
                   opt.input,
                   t_reduce_s,
                   t_optimize,
                   t_validate};
}

inline RunResult run_scene(const SceneConfig& scene, Method method, const BenchConfig& cfg) {
  validate(scene);
  validate(cfg);
  const ObstacleSampleSet draws =
      generate_obstacle_samples(scene, scene.n_draw, draw_stream_seed(scene));
  const ObstacleSampleSet validation =
      generate_obstacle_samples(scene, scene.n_validation, validation_stream_seed(scene));

  const auto t0 = std::chrono::steady_clock::now();
  const ReducedSet rs = reduce_for_method(draws, scene, method, cfg);
  const double t_reduce = detail::seconds_since(t0);

  return run_with_forecast(scene, method, cfg, rs, draws, validation, t_reduce);
}

inline std::vector<RunResult> run_benchmark(const std::vector<SceneConfig>& suite,
                                            const std::vector<Method>& methods,
                                            const BenchConfig& cfg) {
  std::vector<RunResult> out;
  out.reserve(suite.size() * methods.size());
  for (const SceneConfig& scene : suite)
    for (Method method : methods) out.push_back(run_scene(scene, method, cfg));
  return out;
}

// ---- summary statistics ----

struct MethodSummary {
  std::string method;
  int scenes = 0;
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

namespace detail {

// Linear-interpolation percentile on a sorted vector.
inline double percentile(const std::vector<double>& sorted, double p) {
  const size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = p * static_cast<double>(n - 1);
  const size_t lo = static_cast<size_t>(pos);
  const size_t hi = std::min(lo + 1, n - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace detail

inline std::vector<MethodSummary> summarize(const std::vector<RunResult>& results) {
  std::vector<MethodSummary> out;
  for (Method method : {Method::kMmd, Method::kScenario}) {
    std::vector<double> fractions;
    for (const RunResult& r : results)
      if (r.method == method) fractions.push_back(collision_free_fraction(r));
    if (fractions.empty()) continue;
    std::sort(fractions.begin(), fractions.end());
    MethodSummary s;
    s.method = method_name(method);
    s.scenes = static_cast<int>(fractions.size());
    s.mean = std::accumulate(fractions.begin(), fractions.end(), 0.0) /
             static_cast<double>(fractions.size());
    s.median = detail::percentile(fractions, 0.5);
    s.q1 = detail::percentile(fractions, 0.25);
    s.q3 = detail::percentile(fractions, 0.75);
    s.min = fractions.front();
    s.max = fractions.back();
    out.push_back(std::move(s));
  }
  return out;
}

// ---- reduced-set study ----

struct StudyResult {
  ReducedSet optimal_set;
  int optimal_count = 0;
  std::vector<int> random_counts;
  int n_validation = 0;
};

inline StudyResult reduced_set_study(const SceneConfig& scene, int num_random_sets,
                                     const BenchConfig& cfg) {
  validate(scene);
  validate(cfg);
  if (num_random_sets < 0)
    throw std::invalid_argument("reduced_set_study: num_random_sets must be >= 0");
  const ObstacleSampleSet draws =
      generate_obstacle_samples(scene, scene.n_draw, draw_stream_seed(scene));
  const ObstacleSampleSet validation =
      generate_obstacle_samples(scene, scene.n_validation, validation_stream_seed(scene));

  StudyResult study;
  study.n_validation = static_cast<int>(validation.size());
  study.optimal_set = reduce_for_method(draws, scene, Method::kMmd, cfg);
  study.optimal_count = run_with_forecast(scene, Method::kMmd, cfg, study.optimal_set,
                                          draws, validation, 0.0)
                            .collision_free;

  std::vector<Eigen::Index> all(static_cast<size_t>(draws.size()));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  std::mt19937_64 rng(derive_seed(scene.seed, kStudyStream));
  for (int i = 0; i < num_random_sets; ++i) {
    std::vector<Eigen::Index> subset;
    std::sample(all.begin(), all.end(), std::back_inserter(subset),
                static_cast<size_t>(cfg.m), rng);
    const ReducedSet rs = refine_weights(draws, subset, cfg.trajectory_kernel, cfg.refine_ridge);
    study.random_counts.push_back(
        run_with_forecast(scene, Method::kMmd, cfg, rs, draws, validation, 0.0)
            .collision_free);
  }
  return study;
}

// ---- timing ----

struct TimingRow {
  Eigen::Index m = 0;
  double t_select_s = 0.0;    // reduced-set selection solve
  double t_optimize_s = 0.0;  // full optimizer run against the m-sized forecast
};

inline std::vector<TimingRow> timing_report(const SceneConfig& scene, const BenchConfig& cfg,
                                            const std::vector<Eigen::Index>& sizes =
                                                {10, 20, 30, 40, 50},
                                            int repeats = 3) {
  validate(scene);
  validate(cfg);
  if (repeats < 1) throw std::invalid_argument("timing_report: repeats must be >= 1");
  const ObstacleSampleSet draws =
      generate_obstacle_samples(scene, scene.n_draw, draw_stream_seed(scene));
  FrenetPlanner planner(ego_boundary(scene), scene.ego_gains, scene.horizon, scene.dt);
  TrajectoryProjector projector(ego_boundary(scene), scene.bounds, scene.horizon, scene.dt);

  std::vector<TimingRow> table;
  for (Eigen::Index m : sizes) {
    BenchConfig sized = cfg;
    sized.m = m;
    std::vector<double> select_times, optimize_times;
    for (int r = 0; r < repeats; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const ReducedSet rs = reduce_for_method(draws, scene, Method::kMmd, sized);
      select_times.push_back(detail::seconds_since(t0));

      const ObstacleForecast forecast = materialize(draws, rs);
      OptimizerConfig ocfg = sized.optimizer;
      ocfg.seed = derive_seed(scene.seed, kOptimizerStream);
      ocfg.init_mean = Eigen::Vector2d(scene.ego_y, scene.v_des);
      const auto t1 = std::chrono::steady_clock::now();
      optimize(planner, projector, ocfg, make_cost_fn(forecast, scene, Method::kMmd, sized));
      optimize_times.push_back(detail::seconds_since(t1));
    }
    auto median = [](std::vector<double>& v) {
      std::sort(v.begin(), v.end());
      return v[v.size() / 2];
    };
    table.push_back({m, median(select_times), median(optimize_times)});
  }
  return table;
}

// ---- result emission ----

namespace detail {

// Shortest round-trip decimal form, locale-independent: CSV outputs must be
// byte-identical across runs with the same manifest.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

inline std::string join_indices(const std::vector<Eigen::Index>& idx) {
  std::string out;
  for (size_t i = 0; i < idx.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(idx[i]);
  }
  return out;
}

inline uint64_t fnv1a(std::string_view s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

// Deterministic per-run rows; wall times deliberately live in timings_csv.
inline std::string results_csv(const std::vector<RunResult>& results) {
  std::string out = "scene,method,collision_free,n_validation,fraction,best_cost,seed,set_indices\n";
  for (const RunResult& r : results) {
    out += r.scene_id;
    out += ',';
    out += method_name(r.method);
    out += ',';
    out += std::to_string(r.collision_free);
    out += ',';
    out += std::to_string(r.n_validation);
    out += ',';
    out += detail::format_double(collision_free_fraction(r));
    out += ',';
    out += detail::format_double(r.best_cost);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += detail::join_indices(r.set_indices);
    out += '\n';
  }
  return out;
}

inline std::string summary_csv(const std::vector<MethodSummary>& summaries) {
  std::string out = "method,scenes,mean,median,q1,q3,min,max\n";
  for (const MethodSummary& s : summaries) {
    out += s.method;
    out += ',';
    out += std::to_string(s.scenes);
    for (double v : {s.mean, s.median, s.q1, s.q3, s.min, s.max}) {
      out += ',';
      out += detail::format_double(v);
    }
    out += '\n';
  }
  return out;
}

inline std::string timings_csv(const std::vector<RunResult>& results) {
  std::string out = "scene,method,t_reduce_s,t_optimize_s,t_validate_s\n";
  for (const RunResult& r : results) {
    out += r.scene_id;
    out += ',';
    out += method_name(r.method);
    for (double v : {r.t_reduce_s, r.t_optimize_s, r.t_validate_s}) {
      out += ',';
      out += detail::format_double(v);
    }
    out += '\n';
  }
  return out;
}

inline std::string timing_table_csv(const std::vector<TimingRow>& table) {
  std::string out = "m,t_select_s,t_optimize_s\n";
  for (const TimingRow& row : table) {
    out += std::to_string(row.m);
    out += ',';
    out += detail::format_double(row.t_select_s);
    out += ',';
    out += detail::format_double(row.t_optimize_s);
    out += '\n';
  }
  return out;
}

inline nlohmann::json config_to_json(const BenchConfig& cfg) {
  return nlohmann::json{
      {"m", cfg.m},
      {"surrogate_weight", cfg.surrogate_weight},
      {"scenario_weight", cfg.scenario_weight},
      {"refine_ridge", cfg.refine_ridge},
      {"selection_restarts", cfg.selection_restarts},
      {"planning_margin", cfg.planning_margin},
      {"trajectory_kernel", {{"bandwidth", cfg.trajectory_kernel.bandwidth}}},
      {"constraint_kernel", {{"bandwidth", cfg.constraint_kernel.bandwidth}}},
      {"reduced_set",
       {{"beta", cfg.reduced_set.beta ? nlohmann::json(*cfg.reduced_set.beta)
                                      : nlohmann::json(nullptr)},
        {"cem_batch", cfg.reduced_set.cem_batch},
        {"cem_elites", cfg.reduced_set.cem_elites},
        {"cem_iters", cfg.reduced_set.cem_iters},
        {"init_sigma", cfg.reduced_set.init_sigma},
        {"variance_floor", cfg.reduced_set.variance_floor}}},
      {"optimizer",
       {{"batch", cfg.optimizer.batch},
        {"constraint_elites", cfg.optimizer.constraint_elites},
        {"elites", cfg.optimizer.elites},
        {"gamma", cfg.optimizer.gamma},
        {"eta", cfg.optimizer.eta},
        {"iterations", cfg.optimizer.iterations},
        {"projection_iters", cfg.optimizer.projection_iters},
        {"add_residual_to_cost", cfg.optimizer.add_residual_to_cost},
        {"covariance_floor", cfg.optimizer.covariance_floor}}},
      {"scenario",
       {{"aggregation", cfg.scenario.aggregation == BaselineConfig::Aggregation::kMaxOverSteps
                            ? "max"
                            : "sum"}}}};
}

// All fields optional; absent ones keep their defaults.
inline BenchConfig bench_config_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected a JSON object");
  BenchConfig cfg;
  auto num = [&](const nlohmann::json& obj, const char* name, auto& slot) {
    if (!obj.contains(name)) return;
    if (!obj.at(name).is_number())
      throw ParseError(where + ": field '" + name + "' must be a number");
    slot = obj.at(name).get<std::decay_t<decltype(slot)>>();
  };
  num(j, "m", cfg.m);
  num(j, "surrogate_weight", cfg.surrogate_weight);
  num(j, "scenario_weight", cfg.scenario_weight);
  num(j, "refine_ridge", cfg.refine_ridge);
  num(j, "selection_restarts", cfg.selection_restarts);
  num(j, "planning_margin", cfg.planning_margin);
  if (j.contains("trajectory_kernel"))
    num(j.at("trajectory_kernel"), "bandwidth", cfg.trajectory_kernel.bandwidth);
  if (j.contains("constraint_kernel"))
    num(j.at("constraint_kernel"), "bandwidth", cfg.constraint_kernel.bandwidth);
  if (j.contains("reduced_set")) {
    const nlohmann::json& r = j.at("reduced_set");
    if (r.contains("beta") && !r.at("beta").is_null()) {
      double beta = 0.0;
      num(r, "beta", beta);
      cfg.reduced_set.beta = beta;
    }
    num(r, "cem_batch", cfg.reduced_set.cem_batch);
    num(r, "cem_elites", cfg.reduced_set.cem_elites);
    num(r, "cem_iters", cfg.reduced_set.cem_iters);
    num(r, "init_sigma", cfg.reduced_set.init_sigma);
    num(r, "variance_floor", cfg.reduced_set.variance_floor);
  }
  if (j.contains("optimizer")) {
    const nlohmann::json& o = j.at("optimizer");
    num(o, "batch", cfg.optimizer.batch);
    num(o, "constraint_elites", cfg.optimizer.constraint_elites);
    num(o, "elites", cfg.optimizer.elites);
    num(o, "gamma", cfg.optimizer.gamma);
    num(o, "eta", cfg.optimizer.eta);
    num(o, "iterations", cfg.optimizer.iterations);
    num(o, "projection_iters", cfg.optimizer.projection_iters);
    if (o.contains("add_residual_to_cost"))
      cfg.optimizer.add_residual_to_cost = o.at("add_residual_to_cost").get<bool>();
    num(o, "covariance_floor", cfg.optimizer.covariance_floor);
  }
  if (j.contains("scenario")) {
    const std::string agg = j.at("scenario").value("aggregation", "max");
    if (agg == "max")
      cfg.scenario.aggregation = BaselineConfig::Aggregation::kMaxOverSteps;
    else if (agg == "sum")
      cfg.scenario.aggregation = BaselineConfig::Aggregation::kSumOverSteps;
    else
      throw ParseError(where + ": scenario.aggregation must be max|sum");
  }
  validate(cfg);
  return cfg;
}

inline nlohmann::json manifest_to_json(const std::vector<SceneConfig>& suite,
                                       const std::vector<Method>& methods,
                                       const BenchConfig& cfg) {
  nlohmann::json scene_seeds = nlohmann::json::array();
  for (const SceneConfig& s : suite)
    scene_seeds.push_back({{"id", s.id}, {"seed", s.seed}});
  nlohmann::json method_names = nlohmann::json::array();
  for (Method m : methods) method_names.push_back(method_name(m));
  const nlohmann::json config = config_to_json(cfg);
  char hash[17];
  snprintf(hash, sizeof(hash), "%016llx",
           static_cast<unsigned long long>(detail::fnv1a(config.dump())));
  return nlohmann::json{{"kind", "run_manifest"},
                        {"version", 1},
                        {"methods", method_names},
                        {"scene_seeds", scene_seeds},
                        {"config_hash", hash},
                        {"config", config}};
}

inline nlohmann::json traces_to_json(const std::vector<RunResult>& results) {
  nlohmann::json runs = nlohmann::json::array();
  for (const RunResult& r : results) {
    nlohmann::json trace = nlohmann::json::array();
    for (const IterationTraceRow& row : r.trace)
      trace.push_back({{"iteration", row.iteration},
                       {"best_cost", row.best_cost},
                       {"mean", {row.mean(0), row.mean(1)}},
                       {"covariance_diagonal",
                        {row.covariance_diagonal(0), row.covariance_diagonal(1)}}});
    runs.push_back({{"scene", r.scene_id},
                    {"method", method_name(r.method)},
                    {"best_input", {r.input.lateral_offset, r.input.desired_speed}},
                    {"set_weights",
                     std::vector<double>(r.set_weights.begin(), r.set_weights.end())},
                    {"trace", trace}});
  }
  return nlohmann::json{{"kind", "bench_traces"}, {"version", 1}, {"runs", runs}};
}

}  // namespace mmdopt
