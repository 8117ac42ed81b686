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

#pragma once

#include "swarmnav/common.hpp"
#include "swarmnav/config.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace swarmnav {

struct PoiRecord {
  int id = 0;
  Vec3 position = Vec3::Zero();
  double prize = 0.0;
  double tw_open = 0.0;
  double tw_close = 0.0;
  double service_time = 0.0;
  // Empty when any agent can service the POI.
  std::string required_sensor;

  bool operator==(const PoiRecord&) const = default;
};

// Vertical cylinder standing on z = 0.
struct Obstacle {
  Vec2 center = Vec2::Zero();
  double radius = 0.5;
  double height = 1.0;

  bool operator==(const Obstacle&) const = default;
};

struct CapabilityRecord {
  int uav_id = 0;
  double max_velocity = 1.0;
  double max_flight_duration = 1.0;
  std::vector<std::string> payload_sensors;
  double body_radius = 0.3;

  bool operator==(const CapabilityRecord&) const = default;
};

struct SwarmConfig {
  std::vector<CapabilityRecord> agents;
  std::vector<Vec3> formation_offsets;
  int central_index = 0;
  double swarm_v_max = 0.0;
  double swarm_t_max = 0.0;

  bool operator==(const SwarmConfig&) const = default;
};

struct Box {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  bool operator==(const Box&) const = default;
};

struct ScenarioConfig {
  Box area_bounds;
  std::vector<Obstacle> obstacles;
  std::vector<PoiRecord> pois;
  Vec3 home = Vec3::Zero();
  SwarmConfig swarm;
  std::set<std::string> required_sensors;
  std::uint64_t seed = 0;
  MissionConfig config;

  bool operator==(const ScenarioConfig& o) const;
};

// Parameters for seeded cylinder placement. Cylinders keep `min_gap` of free
// space between surfaces and stay `keepout` metres (surface distance) away
// from every formation slot at home and at every POI.
struct ObstacleFieldSpec {
  int count = 0;
  double radius_min = 0.5;
  double radius_max = 0.8;
  double height_min = 4.0;
  double height_max = 6.0;
  double min_gap = 1.2;
  double keepout = 1.5;
};

// Distance between the regular-polygon vertices produced by configure_swarm.
inline constexpr double kDefaultFormationEdge = 4.0;

SwarmConfig configure_swarm(const std::vector<CapabilityRecord>& db, const std::set<std::string>& required_sensors,
                            int n_agents, double edge_length = kDefaultFormationEdge);

// Regular polygon of `n_followers` vertices with the given edge length in the
// horizontal plane, preceded by the central agent at the origin.
std::vector<Vec3> polygon_offsets(int n_followers, double edge_length);

std::vector<Obstacle> generate_obstacles(const ObstacleFieldSpec& spec, const ScenarioConfig& scenario,
                                         std::uint64_t seed);

void validate_scenario(const ScenarioConfig& cfg);

// Loads and validates a scenario document. `seed_override` replaces the
// file's seed before any seeded expansion (random obstacle fields) happens.
ScenarioConfig load_scenario(const std::string& path, std::optional<std::uint64_t> seed_override = std::nullopt);
ScenarioConfig parse_scenario(const std::string& text, std::optional<std::uint64_t> seed_override = std::nullopt);

// Writes the fully expanded form: explicit obstacles, explicit agents and
// offsets, and every configuration key.
void save_scenario(const ScenarioConfig& cfg, const std::string& path);
std::string dump_scenario(const ScenarioConfig& cfg);

}  // namespace swarmnav
