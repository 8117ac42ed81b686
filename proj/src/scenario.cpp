// Copyright 2026 The swarmnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "swarmnav/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace swarmnav {

using nlohmann::json;

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  return area_bounds == o.area_bounds && obstacles == o.obstacles && pois == o.pois && home == o.home &&
         swarm == o.swarm && required_sensors == o.required_sensors && seed == o.seed &&
         json(config) == json(o.config);
}

// ---------------------------------------------------------------------------
// Swarm configuration

namespace {

bool has_sensor(const CapabilityRecord& r, const std::string& tag) {
  return std::find(r.payload_sensors.begin(), r.payload_sensors.end(), tag) != r.payload_sensors.end();
}

// Endurance first, then uav_id ascending.
bool endurance_order(const CapabilityRecord& a, const CapabilityRecord& b) {
  if (a.max_flight_duration != b.max_flight_duration) return a.max_flight_duration > b.max_flight_duration;
  return a.uav_id < b.uav_id;
}

std::vector<std::size_t> greedy_cover(const std::vector<CapabilityRecord>& db,
                                      const std::set<std::string>& required) {
  std::set<std::string> uncovered = required;
  std::vector<std::size_t> chosen;
  std::vector<bool> used(db.size(), false);
  while (!uncovered.empty()) {
    std::size_t best = db.size();
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < db.size(); ++i) {
      if (used[i]) continue;
      std::size_t gain = 0;
      for (const auto& s : uncovered) gain += has_sensor(db[i], s) ? 1 : 0;
      if (gain == 0) continue;
      if (best == db.size() || gain > best_gain ||
          (gain == best_gain && endurance_order(db[i], db[best]))) {
        best = i;
        best_gain = gain;
      }
    }
    if (best == db.size()) return {};  // some sensor is carried by nobody
    used[best] = true;
    chosen.push_back(best);
    for (const auto& s : db[best].payload_sensors) uncovered.erase(s);
  }
  return chosen;
}

// Smallest cover by enumeration, for databases small enough to enumerate.
std::vector<std::size_t> exhaustive_cover(const std::vector<CapabilityRecord>& db,
                                          const std::set<std::string>& required, int max_size) {
  const std::size_t n = db.size();
  for (int size = 1; size <= max_size && size <= static_cast<int>(n); ++size) {
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + size, true);
    do {
      std::set<std::string> covered;
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < n; ++i) {
        if (!pick[i]) continue;
        idx.push_back(i);
        covered.insert(db[i].payload_sensors.begin(), db[i].payload_sensors.end());
      }
      if (std::includes(covered.begin(), covered.end(), required.begin(), required.end())) return idx;
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return {};
}

}  // namespace

std::vector<Vec3> polygon_offsets(int n_followers, double edge_length) {
  std::vector<Vec3> out{Vec3::Zero()};
  if (n_followers <= 0) return out;
  if (n_followers == 1) {
    out.emplace_back(edge_length, 0.0, 0.0);
    return out;
  }
  const double m = n_followers;
  const double radius = edge_length / (2.0 * std::sin(std::numbers::pi / m));
  for (int k = 0; k < n_followers; ++k) {
    const double theta = std::numbers::pi / m + 2.0 * std::numbers::pi * k / m;
    out.emplace_back(radius * std::cos(theta), radius * std::sin(theta), 0.0);
  }
  return out;
}

SwarmConfig configure_swarm(const std::vector<CapabilityRecord>& db, const std::set<std::string>& required_sensors,
                            int n_agents, double edge_length) {
  require(n_agents >= 1, ErrorKind::kArgument, "configure_swarm: n_agents must be >= 1");
  require(static_cast<int>(db.size()) >= n_agents, ErrorKind::kInfeasible,
          "configure_swarm: database has fewer agents than requested");

  std::vector<std::size_t> chosen = greedy_cover(db, required_sensors);
  if (!required_sensors.empty() && chosen.empty()) {
    fail(ErrorKind::kInfeasible, "configure_swarm: required sensors are not carried by any agent set");
  }
  if (static_cast<int>(chosen.size()) > n_agents && db.size() <= 24) {
    chosen = exhaustive_cover(db, required_sensors, n_agents);
  }
  if (static_cast<int>(chosen.size()) > n_agents || (!required_sensors.empty() && chosen.empty())) {
    fail(ErrorKind::kInfeasible, "configure_swarm: required sensors cannot be covered with " +
                                     std::to_string(n_agents) + " agents");
  }

  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < db.size(); ++i) {
    if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) rest.push_back(i);
  }
  std::sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) { return endurance_order(db[a], db[b]); });
  for (std::size_t i = 0; static_cast<int>(chosen.size()) < n_agents; ++i) chosen.push_back(rest[i]);

  std::vector<CapabilityRecord> selected;
  for (auto i : chosen) selected.push_back(db[i]);
  std::sort(selected.begin(), selected.end(),
            [](const CapabilityRecord& a, const CapabilityRecord& b) { return a.uav_id < b.uav_id; });

  // Central agent: prefer empty payloads, then (endurance, velocity) maximal.
  const bool any_empty = std::any_of(selected.begin(), selected.end(),
                                     [](const CapabilityRecord& r) { return r.payload_sensors.empty(); });
  std::size_t central = selected.size();
  for (std::size_t i = 0; i < selected.size(); ++i) {
    const auto& r = selected[i];
    if (any_empty && !r.payload_sensors.empty()) continue;
    if (central == selected.size()) {
      central = i;
      continue;
    }
    const auto& c = selected[central];
    if (std::pair(r.max_flight_duration, r.max_velocity) > std::pair(c.max_flight_duration, c.max_velocity)) {
      central = i;
    }
  }

  SwarmConfig out;
  out.agents.push_back(selected[central]);
  for (std::size_t i = 0; i < selected.size(); ++i) {
    if (i != central) out.agents.push_back(selected[i]);
  }
  out.central_index = 0;
  out.formation_offsets = polygon_offsets(n_agents - 1, edge_length);
  out.swarm_v_max = std::numeric_limits<double>::infinity();
  out.swarm_t_max = std::numeric_limits<double>::infinity();
  for (const auto& a : out.agents) {
    out.swarm_v_max = std::min(out.swarm_v_max, a.max_velocity);
    out.swarm_t_max = std::min(out.swarm_t_max, a.max_flight_duration);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Obstacle fields

std::vector<Obstacle> generate_obstacles(const ObstacleFieldSpec& spec, const ScenarioConfig& scenario,
                                         std::uint64_t seed) {
  require(spec.count >= 0, ErrorKind::kValidation, "random_obstacles.count: must be >= 0");
  require(spec.radius_min > 0.0 && spec.radius_max >= spec.radius_min, ErrorKind::kValidation,
          "random_obstacles.radius: invalid range");
  require(spec.height_min > 0.0 && spec.height_max >= spec.height_min, ErrorKind::kValidation,
          "random_obstacles.height: invalid range");

  std::vector<Vec2> slots;
  auto add_slots = [&](const Vec3& anchor) {
    for (const auto& off : scenario.swarm.formation_offsets) slots.push_back((anchor + off).head<2>());
    if (scenario.swarm.formation_offsets.empty()) slots.push_back(anchor.head<2>());
  };
  add_slots(scenario.home);
  for (const auto& p : scenario.pois) add_slots(p.position);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Obstacle> out = scenario.obstacles;
  const std::size_t target = out.size() + static_cast<std::size_t>(spec.count);
  const int max_attempts = 200000;
  int attempts = 0;
  while (out.size() < target) {
    require(++attempts <= max_attempts, ErrorKind::kValidation,
            "random_obstacles: could not place " + std::to_string(spec.count) + " cylinders with the given spacing");
    Obstacle o;
    o.radius = spec.radius_min + (spec.radius_max - spec.radius_min) * unit(rng);
    o.height = spec.height_min + (spec.height_max - spec.height_min) * unit(rng);
    const Vec2 lo = scenario.area_bounds.min.head<2>().array() + o.radius;
    const Vec2 hi = scenario.area_bounds.max.head<2>().array() - o.radius;
    o.center = Vec2(lo.x() + (hi.x() - lo.x()) * unit(rng), lo.y() + (hi.y() - lo.y()) * unit(rng));
    bool ok = true;
    for (const auto& s : slots) {
      if ((s - o.center).norm() < o.radius + spec.keepout) {
        ok = false;
        break;
      }
    }
    for (std::size_t i = 0; ok && i < out.size(); ++i) {
      if ((out[i].center - o.center).norm() < out[i].radius + o.radius + spec.min_gap) ok = false;
    }
    if (ok) out.push_back(o);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

void validate_scenario(const ScenarioConfig& cfg) {
  auto bad = [](const std::string& path, const std::string& msg) { fail(ErrorKind::kValidation, path + ": " + msg); };

  if (!(cfg.area_bounds.max.array() > cfg.area_bounds.min.array()).all()) bad("area", "max must exceed min");
  if (!cfg.area_bounds.contains(cfg.home)) bad("home", "outside area bounds");

  for (std::size_t i = 0; i < cfg.obstacles.size(); ++i) {
    const auto& o = cfg.obstacles[i];
    const std::string path = "obstacles[" + std::to_string(i) + "]";
    if (!(o.radius > 0.0)) bad(path + ".radius", "must be > 0");
    if (!(o.height > 0.0)) bad(path + ".height", "must be > 0");
  }

  std::set<int> poi_ids;
  for (std::size_t i = 0; i < cfg.pois.size(); ++i) {
    const auto& p = cfg.pois[i];
    const std::string path = "pois[" + std::to_string(i) + "]";
    const std::string who = " (POI id " + std::to_string(p.id) + ")";
    if (!poi_ids.insert(p.id).second) bad(path + ".id", "duplicate id" + who);
    if (!(p.tw_open <= p.tw_close)) bad(path + ".tw_close", "must be >= tw_open" + who);
    if (!(p.prize >= 0.0)) bad(path + ".prize", "must be >= 0" + who);
    if (!(p.service_time >= 0.0)) bad(path + ".service_time", "must be >= 0" + who);
    if (!cfg.area_bounds.contains(p.position)) bad(path + ".position", "outside area bounds" + who);
  }

  const auto& s = cfg.swarm;
  if (s.agents.empty()) bad("swarm.agents", "at least one agent required");
  std::set<int> uav_ids;
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    const auto& a = s.agents[i];
    const std::string path = "swarm.agents[" + std::to_string(i) + "]";
    if (!uav_ids.insert(a.uav_id).second) bad(path + ".uav_id", "duplicate id");
    if (!(a.max_velocity > 0.0)) bad(path + ".max_velocity", "must be > 0");
    if (!(a.max_flight_duration > 0.0)) bad(path + ".max_flight_duration", "must be > 0");
    if (!(a.body_radius > 0.0)) bad(path + ".body_radius", "must be > 0");
  }
  if (s.formation_offsets.size() != s.agents.size()) bad("swarm.formation_offsets", "one offset per agent required");
  if (s.central_index < 0 || s.central_index >= static_cast<int>(s.agents.size())) {
    bad("swarm.central_index", "out of range");
  }
  if (!s.formation_offsets[s.central_index].isZero(0.0)) bad("swarm.formation_offsets", "central offset must be zero");
  double vmin = std::numeric_limits<double>::infinity();
  double tmin = std::numeric_limits<double>::infinity();
  for (const auto& a : s.agents) {
    vmin = std::min(vmin, a.max_velocity);
    tmin = std::min(tmin, a.max_flight_duration);
  }
  if (s.swarm_v_max != vmin) bad("swarm.swarm_v_max", "must equal the minimum agent max_velocity");
  if (s.swarm_t_max != tmin) bad("swarm.swarm_t_max", "must equal the minimum agent max_flight_duration");
  for (const auto& tag : cfg.required_sensors) {
    const bool carried = std::any_of(s.agents.begin(), s.agents.end(),
                                     [&](const CapabilityRecord& a) { return has_sensor(a, tag); });
    if (!carried) bad("required_sensors", "sensor '" + tag + "' is carried by no agent");
  }
  validate_config(cfg.config);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

Vec3 vec3_at(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail(ErrorKind::kValidation, path + ": expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Vec2 vec2_at(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(ErrorKind::kValidation, path + ": expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json to_json3(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) fail(ErrorKind::kValidation, path + "." + key + ": missing");
  return j.at(key);
}

template <typename T>
T value_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

CapabilityRecord capability_from(const json& j, const std::string& path) {
  CapabilityRecord r;
  r.uav_id = field(j, "uav_id", path).get<int>();
  r.max_velocity = field(j, "max_velocity", path).get<double>();
  r.max_flight_duration = field(j, "max_flight_duration", path).get<double>();
  r.payload_sensors = value_or<std::vector<std::string>>(j, "payload_sensors", {});
  r.body_radius = value_or<double>(j, "body_radius", 0.3);
  return r;
}

json capability_to(const CapabilityRecord& r) {
  return {{"uav_id", r.uav_id},
          {"max_velocity", r.max_velocity},
          {"max_flight_duration", r.max_flight_duration},
          {"payload_sensors", r.payload_sensors},
          {"body_radius", r.body_radius}};
}

ScenarioConfig from_json(const json& root, std::optional<std::uint64_t> seed_override) {
  if (!root.is_object()) fail(ErrorKind::kParse, "scenario: top level must be an object");
  ScenarioConfig cfg;
  cfg.seed = seed_override ? *seed_override : value_or<std::uint64_t>(root, "seed", 0);
  if (root.contains("config")) cfg.config = merge_config(MissionConfig{}, root.at("config"));

  const json& area = field(root, "area", "scenario");
  cfg.area_bounds.min = vec3_at(field(area, "min", "area"), "area.min");
  cfg.area_bounds.max = vec3_at(field(area, "max", "area"), "area.max");
  cfg.home = vec3_at(field(root, "home", "scenario"), "home");
  cfg.required_sensors = value_or<std::set<std::string>>(root, "required_sensors", {});

  if (root.contains("obstacles")) {
    const json& arr = root.at("obstacles");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "obstacles[" + std::to_string(i) + "]";
      Obstacle o;
      o.center = vec2_at(field(arr[i], "center", path), path + ".center");
      o.radius = field(arr[i], "radius", path).get<double>();
      o.height = field(arr[i], "height", path).get<double>();
      cfg.obstacles.push_back(o);
    }
  }

  if (root.contains("pois")) {
    const json& arr = root.at("pois");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "pois[" + std::to_string(i) + "]";
      PoiRecord p;
      p.id = field(arr[i], "id", path).get<int>();
      p.position = vec3_at(field(arr[i], "position", path), path + ".position");
      p.prize = field(arr[i], "prize", path).get<double>();
      p.tw_open = value_or<double>(arr[i], "tw_open", 0.0);
      p.tw_close = value_or<double>(arr[i], "tw_close", std::numeric_limits<double>::max());
      p.service_time = value_or<double>(arr[i], "service_time", cfg.config.tour.service_time_default);
      p.required_sensor = value_or<std::string>(arr[i], "required_sensor", "");
      cfg.pois.push_back(p);
    }
  }

  const json& sw = field(root, "swarm", "scenario");
  if (sw.contains("agents")) {
    // Explicit form: agents in formation order with explicit offsets.
    const json& arr = sw.at("agents");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      cfg.swarm.agents.push_back(capability_from(arr[i], "swarm.agents[" + std::to_string(i) + "]"));
    }
    cfg.swarm.central_index = value_or<int>(sw, "central_index", 0);
    if (sw.contains("formation_offsets")) {
      const json& offs = sw.at("formation_offsets");
      for (std::size_t i = 0; i < offs.size(); ++i) {
        cfg.swarm.formation_offsets.push_back(vec3_at(offs[i], "swarm.formation_offsets[" + std::to_string(i) + "]"));
      }
    } else {
      cfg.swarm.formation_offsets =
          polygon_offsets(static_cast<int>(cfg.swarm.agents.size()) - 1, value_or<double>(sw, "edge_length", kDefaultFormationEdge));
    }
    cfg.swarm.swarm_v_max = std::numeric_limits<double>::infinity();
    cfg.swarm.swarm_t_max = std::numeric_limits<double>::infinity();
    for (const auto& a : cfg.swarm.agents) {
      cfg.swarm.swarm_v_max = std::min(cfg.swarm.swarm_v_max, a.max_velocity);
      cfg.swarm.swarm_t_max = std::min(cfg.swarm.swarm_t_max, a.max_flight_duration);
    }
  } else {
    // Database form: select n_agents from the capabilities database.
    std::vector<CapabilityRecord> db;
    const json& arr = field(sw, "capabilities", "swarm");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      db.push_back(capability_from(arr[i], "swarm.capabilities[" + std::to_string(i) + "]"));
    }
    const int n = field(sw, "n_agents", "swarm").get<int>();
    cfg.swarm = configure_swarm(db, cfg.required_sensors, n, value_or<double>(sw, "edge_length", kDefaultFormationEdge));
  }

  if (root.contains("random_obstacles")) {
    const json& r = root.at("random_obstacles");
    ObstacleFieldSpec spec;
    spec.count = field(r, "count", "random_obstacles").get<int>();
    if (r.contains("radius")) {
      spec.radius_min = r.at("radius").at(0).get<double>();
      spec.radius_max = r.at("radius").at(1).get<double>();
    }
    if (r.contains("height")) {
      spec.height_min = r.at("height").at(0).get<double>();
      spec.height_max = r.at("height").at(1).get<double>();
    }
    spec.min_gap = value_or<double>(r, "min_gap", spec.min_gap);
    spec.keepout = value_or<double>(r, "keepout", spec.keepout);
    cfg.obstacles = generate_obstacles(spec, cfg, cfg.seed);
  }
  return cfg;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, std::optional<std::uint64_t> seed_override) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kParse, std::string("scenario: ") + e.what());
  }
  ScenarioConfig cfg;
  try {
    cfg = from_json(root, seed_override);
  } catch (const json::exception& e) {
    fail(ErrorKind::kValidation, std::string("scenario: ") + e.what());
  }
  validate_scenario(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), seed_override);
}

std::string dump_scenario(const ScenarioConfig& cfg) {
  json root;
  root["seed"] = cfg.seed;
  root["area"] = {{"min", to_json3(cfg.area_bounds.min)}, {"max", to_json3(cfg.area_bounds.max)}};
  root["home"] = to_json3(cfg.home);
  root["required_sensors"] = cfg.required_sensors;
  root["obstacles"] = json::array();
  for (const auto& o : cfg.obstacles) {
    root["obstacles"].push_back(
        {{"center", json::array({o.center.x(), o.center.y()})}, {"radius", o.radius}, {"height", o.height}});
  }
  root["pois"] = json::array();
  for (const auto& p : cfg.pois) {
    json jp = {{"id", p.id},
               {"position", to_json3(p.position)},
               {"prize", p.prize},
               {"tw_open", p.tw_open},
               {"tw_close", p.tw_close},
               {"service_time", p.service_time}};
    if (!p.required_sensor.empty()) jp["required_sensor"] = p.required_sensor;
    root["pois"].push_back(jp);
  }
  json sw;
  sw["agents"] = json::array();
  for (const auto& a : cfg.swarm.agents) sw["agents"].push_back(capability_to(a));
  sw["central_index"] = cfg.swarm.central_index;
  sw["formation_offsets"] = json::array();
  for (const auto& off : cfg.swarm.formation_offsets) sw["formation_offsets"].push_back(to_json3(off));
  root["swarm"] = sw;
  root["config"] = cfg.config;
  return root.dump(2);
}

void save_scenario(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::kIo, "cannot write scenario file '" + path + "'");
  out << dump_scenario(cfg) << "\n";
}

}  // namespace swarmnav
