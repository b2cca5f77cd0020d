#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmdopt/errors.hpp"
#include "mmdopt/reduced_set.hpp"
#include "mmdopt/scene.hpp"
#include "mmdopt/trajectory.hpp"

namespace mmdopt::io {

using nlohmann::json;

namespace detail {

inline json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void expect_kind(const json& j, const std::string& kind, int version,
                        const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected a JSON object");
  if (j.value("kind", "") != kind)
    throw ParseError(where + ": field 'kind' must be '" + kind + "'");
  if (j.value("version", 0) != version)
    throw ParseError(where + ": field 'version' must be " +
                     std::to_string(version));
}

template <typename T>
T field(const json& j, const std::string& name, const std::string& where) {
  if (!j.contains(name)) throw ParseError(where + ": missing field '" + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + ": field '" + name + "': " + e.what());
  }
}

inline void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << j.dump(2) << "\n";
}

}  // namespace detail

// ---- obstacle sample files ----
//
// {"kind": "obstacle_samples", "version": 1, "dt": ..., "horizon": ...,
//  "samples": [[[x...],[y...]], ...], "metadata": {...}}

inline json samples_to_json(const ObstacleSampleSet& o, json metadata = json::object()) {
  json samples = json::array();
  const Eigen::Index h = o.horizon();
  for (Eigen::Index j = 0; j < o.size(); ++j) {
    json xs = json::array(), ys = json::array();
    for (Eigen::Index k = 0; k < h; ++k) {
      xs.push_back(o.stacked()(j, k));
      ys.push_back(o.stacked()(j, h + k));
    }
    samples.push_back(json::array({xs, ys}));
  }
  return json{{"kind", "obstacle_samples"},
              {"version", 1},
              {"dt", o.dt()},
              {"horizon", o.horizon()},
              {"samples", samples},
              {"metadata", metadata}};
}

inline ObstacleSampleSet samples_from_json(const json& j, const std::string& where) {
  detail::expect_kind(j, "obstacle_samples", 1, where);
  const double dt = detail::field<double>(j, "dt", where);
  const Eigen::Index h = detail::field<Eigen::Index>(j, "horizon", where);
  if (!(dt > 0.0)) throw ParseError(where + ": dt must be positive");
  if (h < 5) throw ParseError(where + ": horizon must be at least 5");
  const json& samples = j.contains("samples") ? j.at("samples") : json();
  if (!samples.is_array() || samples.empty())
    throw ParseError(where + ": field 'samples' must be a non-empty array");
  Eigen::MatrixXd stacked(static_cast<Eigen::Index>(samples.size()), 2 * h);
  for (size_t s = 0; s < samples.size(); ++s) {
    const std::string ctx = where + ": samples[" + std::to_string(s) + "]";
    const json& pair = samples[s];
    if (!pair.is_array() || pair.size() != 2)
      throw ParseError(ctx + ": expected [xs, ys]");
    for (int axis = 0; axis < 2; ++axis) {
      const json& arr = pair[static_cast<size_t>(axis)];
      if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != h)
        throw ParseError(ctx + (axis == 0 ? ": xs" : ": ys") +
                         " must have 'horizon' entries");
      for (Eigen::Index k = 0; k < h; ++k) {
        const json& v = arr[static_cast<size_t>(k)];
        if (!v.is_number())
          throw ParseError(ctx + ": non-numeric waypoint at step " + std::to_string(k));
        stacked(static_cast<Eigen::Index>(s), axis * h + k) = v.get<double>();
      }
    }
  }
  try {
    return ObstacleSampleSet(std::move(stacked), h, dt);
  } catch (const std::invalid_argument& e) {
    throw ParseError(where + ": " + e.what());
  }
}

inline void save_samples(const std::string& path, const ObstacleSampleSet& o,
                         json metadata = json::object()) {
  detail::write_file(path, samples_to_json(o, std::move(metadata)));
}

inline ObstacleSampleSet load_external_samples(const std::string& path) {
  return samples_from_json(detail::parse_file(path), path);
}

// ---- scene configuration files ----

inline json scene_to_json(const SceneConfig& s) {
  json intents = json::array();
  for (const IntentOffset& intent : s.intents)
    intents.push_back({{"offset", intent.offset}, {"probability", intent.probability}});
  return json{
      {"kind", "scene_config"},
      {"version", 1},
      {"id", s.id},
      {"ego",
       {{"position", {s.ego_x, s.ego_y}},
        {"velocity", {s.ego_vx, s.ego_vy}},
        {"acceleration", {s.ego_ax, s.ego_ay}}}},
      {"v_des", s.v_des},
      {"bounds",
       {{"y_min", s.bounds.y_min},
        {"y_max", s.bounds.y_max},
        {"v_min", s.bounds.v_min},
        {"v_max", s.bounds.v_max},
        {"a_max", s.bounds.a_max}}},
      {"geometry",
       {{"a", s.geometry.a},
        {"b_axis", s.geometry.b_axis},
        {"circle_offsets", s.geometry.circle_offsets}}},
      {"horizon", s.horizon},
      {"dt", s.dt},
      {"obstacle",
       {{"position", {s.obs_x, s.obs_y}},
        {"velocity", {s.obs_vx, s.obs_vy}},
        {"acceleration", {s.obs_ax, s.obs_ay}}}},
      {"intents", intents},
      {"velocity_law", {{"mean", s.velocity_law.mean}, {"stddev", s.velocity_law.stddev}}},
      {"ego_gains", {{"kappa_p", s.ego_gains.kappa_p}, {"kappa_v", s.ego_gains.kappa_v}}},
      {"obstacle_gains",
       {{"kappa_p", s.obstacle_gains.kappa_p}, {"kappa_v", s.obstacle_gains.kappa_v}}},
      {"n_draw", s.n_draw},
      {"n_validation", s.n_validation},
      {"seed", s.seed},
      {"confidence_eta", s.confidence_eta}};
}

inline SceneConfig scene_from_json(const json& j, const std::string& where) {
  detail::expect_kind(j, "scene_config", 1, where);
  SceneConfig s;
  s.id = detail::field<std::string>(j, "id", where);
  auto read_state = [&](const std::string& name, double& x, double& y, double& vx,
                        double& vy, double& ax, double& ay) {
    const json state = detail::field<json>(j, name, where);
    const std::string ctx = where + ": " + name;
    auto pair = [&](const std::string& f, double& a, double& b) {
      const auto v = detail::field<std::vector<double>>(state, f, ctx);
      if (v.size() != 2) throw ParseError(ctx + ": '" + f + "' must have 2 entries");
      a = v[0];
      b = v[1];
    };
    pair("position", x, y);
    pair("velocity", vx, vy);
    pair("acceleration", ax, ay);
  };
  read_state("ego", s.ego_x, s.ego_y, s.ego_vx, s.ego_vy, s.ego_ax, s.ego_ay);
  read_state("obstacle", s.obs_x, s.obs_y, s.obs_vx, s.obs_vy, s.obs_ax, s.obs_ay);
  s.v_des = detail::field<double>(j, "v_des", where);
  {
    const json b = detail::field<json>(j, "bounds", where);
    const std::string ctx = where + ": bounds";
    s.bounds.y_min = detail::field<double>(b, "y_min", ctx);
    s.bounds.y_max = detail::field<double>(b, "y_max", ctx);
    s.bounds.v_min = detail::field<double>(b, "v_min", ctx);
    s.bounds.v_max = detail::field<double>(b, "v_max", ctx);
    s.bounds.a_max = detail::field<double>(b, "a_max", ctx);
  }
  {
    const json g = detail::field<json>(j, "geometry", where);
    const std::string ctx = where + ": geometry";
    s.geometry.a = detail::field<double>(g, "a", ctx);
    s.geometry.b_axis = detail::field<double>(g, "b_axis", ctx);
    s.geometry.circle_offsets = detail::field<std::vector<double>>(g, "circle_offsets", ctx);
  }
  s.horizon = detail::field<Eigen::Index>(j, "horizon", where);
  s.dt = detail::field<double>(j, "dt", where);
  {
    const json intents = detail::field<json>(j, "intents", where);
    if (!intents.is_array() || intents.empty())
      throw ParseError(where + ": 'intents' must be a non-empty array");
    s.intents.clear();
    for (size_t i = 0; i < intents.size(); ++i) {
      const std::string ctx = where + ": intents[" + std::to_string(i) + "]";
      s.intents.push_back({detail::field<double>(intents[i], "offset", ctx),
                           detail::field<double>(intents[i], "probability", ctx)});
    }
  }
  {
    const json v = detail::field<json>(j, "velocity_law", where);
    s.velocity_law.mean = detail::field<double>(v, "mean", where + ": velocity_law");
    s.velocity_law.stddev = detail::field<double>(v, "stddev", where + ": velocity_law");
  }
  auto gains = [&](const std::string& name, FrenetGains& g) {
    const json v = detail::field<json>(j, name, where);
    g.kappa_p = detail::field<double>(v, "kappa_p", where + ": " + name);
    g.kappa_v = detail::field<double>(v, "kappa_v", where + ": " + name);
  };
  gains("ego_gains", s.ego_gains);
  gains("obstacle_gains", s.obstacle_gains);
  s.n_draw = detail::field<int>(j, "n_draw", where);
  s.n_validation = detail::field<int>(j, "n_validation", where);
  s.seed = detail::field<uint64_t>(j, "seed", where);
  s.confidence_eta = detail::field<double>(j, "confidence_eta", where);
  try {
    validate(s);
  } catch (const std::invalid_argument& e) {
    throw ParseError(where + ": " + e.what());
  }
  return s;
}

inline void save_scene(const std::string& path, const SceneConfig& s) {
  detail::write_file(path, scene_to_json(s));
}

inline SceneConfig load_scene(const std::string& path) {
  return scene_from_json(detail::parse_file(path), path);
}

// ---- scene suites ----

inline json suite_to_json(const std::vector<SceneConfig>& suite) {
  json scenes = json::array();
  for (const SceneConfig& s : suite) scenes.push_back(scene_to_json(s));
  return json{{"kind", "scene_suite"}, {"version", 1}, {"scenes", scenes}};
}

inline std::vector<SceneConfig> suite_from_json(const json& j, const std::string& where) {
  detail::expect_kind(j, "scene_suite", 1, where);
  const json& scenes = j.contains("scenes") ? j.at("scenes") : json();
  if (!scenes.is_array() || scenes.empty())
    throw ParseError(where + ": 'scenes' must be a non-empty array");
  std::vector<SceneConfig> out;
  out.reserve(scenes.size());
  for (size_t i = 0; i < scenes.size(); ++i)
    out.push_back(scene_from_json(scenes[i], where + ": scenes[" + std::to_string(i) + "]"));
  return out;
}

inline void save_scene_suite(const std::string& path, const std::vector<SceneConfig>& suite) {
  detail::write_file(path, suite_to_json(suite));
}

// Accepts either a single scene config or a suite file.
inline std::vector<SceneConfig> load_scene_suite(const std::string& path) {
  const json j = detail::parse_file(path);
  if (j.is_object() && j.value("kind", "") == "scene_config")
    return {scene_from_json(j, path)};
  return suite_from_json(j, path);
}

// ---- trajectories and reduced sets ----

inline json trajectory_to_json(const Trajectory& t) {
  return json{{"kind", "trajectory"},
              {"version", 1},
              {"dt", t.dt},
              {"horizon", t.horizon()},
              {"x", std::vector<double>(t.x.begin(), t.x.end())},
              {"y", std::vector<double>(t.y.begin(), t.y.end())}};
}

inline Trajectory trajectory_from_json(const json& j, const std::string& where) {
  detail::expect_kind(j, "trajectory", 1, where);
  const auto xs = detail::field<std::vector<double>>(j, "x", where);
  const auto ys = detail::field<std::vector<double>>(j, "y", where);
  const double dt = detail::field<double>(j, "dt", where);
  try {
    return Trajectory(Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size())),
                      Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size())),
                      dt);
  } catch (const std::invalid_argument& e) {
    throw ParseError(where + ": " + e.what());
  }
}

inline json reduced_set_to_json(const ReducedSet& rs) {
  return json{{"kind", "reduced_set"},
              {"version", 1},
              {"indices", rs.indices},
              {"weights", std::vector<double>(rs.weights.begin(), rs.weights.end())},
              {"parent_n", rs.parent_n}};
}

inline ReducedSet reduced_set_from_json(const json& j, const std::string& where) {
  detail::expect_kind(j, "reduced_set", 1, where);
  ReducedSet rs;
  rs.indices = detail::field<std::vector<Eigen::Index>>(j, "indices", where);
  const auto w = detail::field<std::vector<double>>(j, "weights", where);
  rs.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  rs.parent_n = detail::field<Eigen::Index>(j, "parent_n", where);
  try {
    validate(rs);
  } catch (const std::invalid_argument& e) {
    throw ParseError(where + ": " + e.what());
  }
  return rs;
}

}  // namespace mmdopt::io
