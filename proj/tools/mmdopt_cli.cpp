// Command-line front end: scene-suite generation, reduced-set selection,
// planning, Monte-Carlo validation, benchmarking, and timing runs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmdopt/mmdopt.hpp"

namespace {

using mmdopt::BenchConfig;
using mmdopt::Method;
using mmdopt::SceneConfig;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mmdopt::ParseError(path + ": cannot open for writing");
  out << text;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

SceneConfig load_scene_or_default(const std::string& path) {
  if (path.empty()) return SceneConfig{};
  return mmdopt::io::load_scene(path);
}

BenchConfig load_bench_config(const std::string& path) {
  if (path.empty()) return BenchConfig{};
  return mmdopt::bench_config_from_json(mmdopt::io::detail::parse_file(path), path);
}

std::vector<Method> parse_methods(const std::string& csv) {
  std::vector<Method> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(mmdopt::method_from_name(item));
  if (out.empty()) throw std::invalid_argument("no methods given");
  return out;
}

mmdopt::ObstacleSampleSet scene_draws(const SceneConfig& scene, const std::string& samples_path) {
  if (samples_path.empty())
    return mmdopt::generate_obstacle_samples(scene, scene.n_draw,
                                             mmdopt::draw_stream_seed(scene));
  mmdopt::ObstacleSampleSet samples = mmdopt::io::load_external_samples(samples_path);
  if (samples.horizon() != scene.horizon || samples.dt() != scene.dt)
    throw mmdopt::ParseError(samples_path + ": horizon/dt do not match the scene");
  return samples;
}

int cmd_gen_scenes(const std::string& scene_path, int count, uint64_t seed,
                   const std::string& out_path) {
  SceneConfig base = load_scene_or_default(scene_path);
  const std::vector<SceneConfig> suite = mmdopt::make_scene_suite(base, count, seed);
  mmdopt::io::save_scene_suite(out_path, suite);
  std::cout << "wrote " << suite.size() << " scenes to " << out_path << "\n";
  return 0;
}

int cmd_reduce_set(const std::string& scene_path, const std::string& samples_path,
                   const std::string& method_name, const BenchConfig& cfg,
                   const std::string& out_path) {
  const SceneConfig scene = load_scene_or_default(scene_path);
  const mmdopt::ObstacleSampleSet draws = scene_draws(scene, samples_path);
  const Method method = mmdopt::method_from_name(method_name);
  const mmdopt::ReducedSet rs = mmdopt::reduce_for_method(draws, scene, method, cfg);
  write_json(out_path, mmdopt::io::reduced_set_to_json(rs));
  std::cout << "selected " << rs.indices.size() << " of " << draws.size()
            << " samples; weight sum " << rs.weights.sum() << "\n";
  return 0;
}

int cmd_plan(const std::string& scene_path, const std::string& method_name,
             const BenchConfig& cfg, const std::string& out_path,
             const std::string& trace_path) {
  const SceneConfig scene = load_scene_or_default(scene_path);
  const mmdopt::RunResult r =
      mmdopt::run_scene(scene, mmdopt::method_from_name(method_name), cfg);
  write_json(out_path, mmdopt::io::trajectory_to_json(r.trajectory));
  if (!trace_path.empty()) write_json(trace_path, mmdopt::traces_to_json({r}));
  std::cout << "scene " << r.scene_id << " method " << mmdopt::method_name(r.method)
            << ": cost " << r.best_cost << ", collision-free " << r.collision_free << "/"
            << r.n_validation << "\n";
  return 0;
}

int cmd_validate(const std::string& scene_path, const std::string& traj_path,
                 const std::string& samples_path) {
  const SceneConfig scene = load_scene_or_default(scene_path);
  const mmdopt::Trajectory ego = mmdopt::io::trajectory_from_json(
      mmdopt::io::detail::parse_file(traj_path), traj_path);
  const mmdopt::ObstacleSampleSet validation =
      samples_path.empty()
          ? mmdopt::generate_obstacle_samples(scene, scene.n_validation,
                                              mmdopt::validation_stream_seed(scene))
          : scene_draws(scene, samples_path);
  const int free_count = mmdopt::validate_trajectory(ego, validation, scene.geometry);
  std::cout << "collision-free " << free_count << "/" << validation.size() << "\n";
  return 0;
}

int cmd_bench(const std::string& suite_path, const std::string& scene_path, int count,
              uint64_t seed, const std::string& methods_csv, const BenchConfig& cfg,
              const std::string& out_dir) {
  std::vector<SceneConfig> suite;
  if (!suite_path.empty()) {
    suite = mmdopt::io::load_scene_suite(suite_path);
  } else {
    SceneConfig base = load_scene_or_default(scene_path);
    suite = mmdopt::make_scene_suite(base, count, seed);
  }
  const std::vector<Method> methods = parse_methods(methods_csv);
  std::filesystem::create_directories(out_dir);

  std::vector<mmdopt::RunResult> results;
  int failures = 0;
  for (const SceneConfig& scene : suite) {
    for (Method method : methods) {
      try {
        results.push_back(mmdopt::run_scene(scene, method, cfg));
        const mmdopt::RunResult& r = results.back();
        std::cout << r.scene_id << " " << mmdopt::method_name(r.method) << ": "
                  << r.collision_free << "/" << r.n_validation << "\n";
      } catch (const std::exception& e) {
        ++failures;
        std::cerr << "scene " << scene.id << " method " << mmdopt::method_name(method)
                  << " failed: " << e.what() << "\n";
      }
    }
  }

  namespace fs = std::filesystem;
  write_text((fs::path(out_dir) / "results.csv").string(), mmdopt::results_csv(results));
  write_text((fs::path(out_dir) / "summary.csv").string(),
             mmdopt::summary_csv(mmdopt::summarize(results)));
  write_text((fs::path(out_dir) / "timings.csv").string(), mmdopt::timings_csv(results));
  write_json((fs::path(out_dir) / "traces.json").string(), mmdopt::traces_to_json(results));
  write_json((fs::path(out_dir) / "manifest.json").string(),
             mmdopt::manifest_to_json(suite, methods, cfg));
  for (const mmdopt::MethodSummary& s : mmdopt::summarize(results))
    std::cout << s.method << ": mean " << s.mean << ", median " << s.median << " over "
              << s.scenes << " scenes\n";
  return failures == 0 ? 0 : 1;
}

int cmd_study(const std::string& scene_path, int random_sets, const BenchConfig& cfg,
              const std::string& out_path) {
  const SceneConfig scene = load_scene_or_default(scene_path);
  const mmdopt::StudyResult study = mmdopt::reduced_set_study(scene, random_sets, cfg);
  std::string csv = "set,collision_free,n_validation\n";
  csv += "optimal," + std::to_string(study.optimal_count) + "," +
         std::to_string(study.n_validation) + "\n";
  for (size_t i = 0; i < study.random_counts.size(); ++i)
    csv += "random_" + std::to_string(i) + "," + std::to_string(study.random_counts[i]) +
           "," + std::to_string(study.n_validation) + "\n";
  write_text(out_path, csv);
  double mean = 0.0;
  for (int c : study.random_counts) mean += c;
  if (!study.random_counts.empty()) mean /= static_cast<double>(study.random_counts.size());
  std::cout << "optimal " << study.optimal_count << "/" << study.n_validation
            << ", random mean " << mean << " over " << study.random_counts.size()
            << " sets\n";
  return 0;
}

int cmd_timing(const std::string& scene_path, const std::string& sizes_csv, int repeats,
               const BenchConfig& cfg, const std::string& out_path) {
  const SceneConfig scene = load_scene_or_default(scene_path);
  std::vector<Eigen::Index> sizes;
  std::stringstream ss(sizes_csv);
  std::string item;
  while (std::getline(ss, item, ',')) sizes.push_back(std::stol(item));
  const std::vector<mmdopt::TimingRow> table =
      mmdopt::timing_report(scene, cfg, sizes, repeats);
  write_text(out_path, mmdopt::timing_table_csv(table));
  for (const mmdopt::TimingRow& row : table)
    std::cout << "m=" << row.m << ": select " << row.t_select_s << " s, optimize "
              << row.t_optimize_s << " s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distribution-embedding trajectory optimization toolkit"};
  app.require_subcommand(1);

  std::string scene_path, suite_path, samples_path, config_path, traj_path;
  std::string method = "mmd", methods_csv = "mmd,scenario";
  std::string out_path, out_dir = "out", trace_path;
  std::string sizes_csv = "10,20,30,40,50";
  int count = 20, random_sets = 20, repeats = 3;
  uint64_t seed = 0;

  CLI::App* gen = app.add_subcommand("gen-scenes", "Generate a perturbed scene suite");
  gen->add_option("--scene", scene_path, "Base scene config JSON (default scene if omitted)");
  gen->add_option("--count", count, "Number of scenes");
  gen->add_option("--seed", seed, "Suite seed");
  gen->add_option("-o,--out", out_path, "Output suite JSON")->required();

  CLI::App* reduce = app.add_subcommand("reduce-set", "Select a weighted reduced sample set");
  reduce->add_option("--scene", scene_path, "Scene config JSON");
  reduce->add_option("--samples", samples_path, "External samples JSON (overrides drawing)");
  reduce->add_option("--method", method, "mmd|scenario");
  reduce->add_option("--config", config_path, "Benchmark config JSON");
  reduce->add_option("-o,--out", out_path, "Output reduced-set JSON")->required();

  CLI::App* plan = app.add_subcommand("plan", "Optimize one scene and write the trajectory");
  plan->add_option("--scene", scene_path, "Scene config JSON");
  plan->add_option("--method", method, "mmd|scenario");
  plan->add_option("--config", config_path, "Benchmark config JSON");
  plan->add_option("--trace", trace_path, "Optional optimizer trace JSON");
  plan->add_option("-o,--out", out_path, "Output trajectory JSON")->required();

  CLI::App* val = app.add_subcommand("validate", "Count collision-free validation samples");
  val->add_option("--scene", scene_path, "Scene config JSON");
  val->add_option("--trajectory", traj_path, "Ego trajectory JSON")->required();
  val->add_option("--samples", samples_path, "External samples JSON (overrides drawing)");

  CLI::App* bench = app.add_subcommand("bench", "Run the benchmark over a scene suite");
  bench->add_option("--scenes", suite_path, "Scene suite JSON (overrides generation)");
  bench->add_option("--scene", scene_path, "Base scene config for suite generation");
  bench->add_option("--count", count, "Scenes to generate when no suite is given");
  bench->add_option("--seed", seed, "Suite seed when no suite is given");
  bench->add_option("--methods", methods_csv, "Comma-separated methods");
  bench->add_option("--config", config_path, "Benchmark config JSON");
  bench->add_option("-o,--out", out_dir, "Output directory");

  CLI::App* study = app.add_subcommand("study-reduced-set",
                                       "Compare the optimal set against random subsets");
  study->add_option("--scene", scene_path, "Scene config JSON");
  study->add_option("--random-sets", random_sets, "Number of random subsets");
  study->add_option("--config", config_path, "Benchmark config JSON");
  study->add_option("-o,--out", out_path, "Output CSV")->required();

  CLI::App* timing = app.add_subcommand("timing", "Wall-time table across reduced-set sizes");
  timing->add_option("--scene", scene_path, "Scene config JSON");
  timing->add_option("--sizes", sizes_csv, "Comma-separated reduced-set sizes");
  timing->add_option("--repeats", repeats, "Repeats per size (median reported)");
  timing->add_option("--config", config_path, "Benchmark config JSON");
  timing->add_option("-o,--out", out_path, "Output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const BenchConfig cfg = load_bench_config(config_path);
    if (gen->parsed()) return cmd_gen_scenes(scene_path, count, seed, out_path);
    if (reduce->parsed())
      return cmd_reduce_set(scene_path, samples_path, method, cfg, out_path);
    if (plan->parsed()) return cmd_plan(scene_path, method, cfg, out_path, trace_path);
    if (val->parsed()) return cmd_validate(scene_path, traj_path, samples_path);
    if (bench->parsed())
      return cmd_bench(suite_path, scene_path, count, seed, methods_csv, cfg, out_dir);
    if (study->parsed()) return cmd_study(scene_path, random_sets, cfg, out_path);
    if (timing->parsed()) return cmd_timing(scene_path, sizes_csv, repeats, cfg, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
