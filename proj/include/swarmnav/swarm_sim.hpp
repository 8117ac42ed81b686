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
#include "swarmnav/metrics.hpp"
#include "swarmnav/pctsp.hpp"
#include "swarmnav/scenario.hpp"
#include "swarmnav/trajectory.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace swarmnav::sim {

using trajectory::BsplineTrajectory;
using trajectory::PolyTrajectory;

struct AgentState {
  int uav_id = 0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  // Last commanded acceleration.
  Vec3 acceleration = Vec3::Zero();
  BsplineTrajectory current_traj;
  bool alive = true;
};

enum class MessageKind { kOdometry, kTrajectory, kHeartbeat, kWaypoints, kExecute };

struct BusMessage {
  int sender_id = 0;
  MessageKind kind = MessageKind::kHeartbeat;
  std::int64_t tick_stamp = 0;
  // Per-sender sequence number assigned by the bus.
  std::uint64_t sequence = 0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  BsplineTrajectory trajectory;
  std::vector<Vec3> waypoints;
};

// Broadcast medium with one inbox per participant. A message sent during tick
// k becomes visible to polls at tick k + 1 or later. Drops are i.i.d. with
// probability drop_rate, drawn from the bus's own seeded generator.
class Bus {
 public:
  Bus(std::vector<int> participants, double drop_rate = 0.0, std::uint64_t seed = 0);

  void broadcast(BusMessage msg, std::int64_t tick);
  // Messages for `receiver` stamped before `tick`, in send order.
  std::vector<BusMessage> poll(int receiver, std::int64_t tick);

  std::uint64_t sent() const { return sent_; }
  std::uint64_t dropped() const { return dropped_; }

 private:
  std::vector<int> participants_;
  std::map<int, std::deque<BusMessage>> inbox_;
  std::map<int, std::uint64_t> next_sequence_;
  double drop_rate_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::uint64_t sent_ = 0;
  std::uint64_t dropped_ = 0;
};

// What one receiver knows about one sender.
struct PeerView {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  BsplineTrajectory trajectory;
  std::int64_t last_heartbeat = 0;

  // Stale once no heartbeat has arrived for more than `timeout` ticks.
  bool stale(std::int64_t now, int timeout) const { return now - last_heartbeat > timeout; }
};

// Receiver-side knowledge, refreshed from the bus at the start of each tick.
class PeerTable {
 public:
  void absorb(const BusMessage& msg);
  const std::map<int, PeerView>& peers() const { return peers_; }
  PeerView& peer(int id) { return peers_[id]; }

 private:
  std::map<int, PeerView> peers_;
};

// Immutable per-tick view: for every receiver, its table of peers.
struct SwarmSnapshot {
  std::int64_t tick = 0;
  std::vector<std::map<int, PeerView>> views;
};

// Tracking law gains and caps.
struct TrackingParams {
  double kp = 16.0;
  double kd = 8.0;
  double a_max = 4.0;
  double v_cap = 1.0;
};

// One semi-implicit Euler step of a PD-tracked double integrator following
// `agent.current_traj`.
void step(AgentState& agent, double t, double dt, const TrackingParams& params);

enum class CollisionKind { kObstacle, kAgent };

struct CollisionEvent {
  std::int64_t tick = 0;
  CollisionKind kind = CollisionKind::kObstacle;
  int a = 0;  // uav id
  int b = 0;  // obstacle index or uav id
  double distance = 0.0;
};

std::vector<CollisionEvent> check_collisions(std::span<const AgentState> agents,
                                             std::span<const CapabilityRecord> bodies,
                                             std::span<const Obstacle> obstacles, std::int64_t tick);

struct StateSample {
  std::int64_t tick = 0;
  double t = 0.0;
  int uav_id = 0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 reference = Vec3::Zero();
  Vec3 plan = Vec3::Zero();
};

struct Event {
  std::int64_t tick = 0;
  double t = 0.0;
  std::string kind;
  int a = -1;
  int b = -1;
  double value = 0.0;
  std::string detail;
};

struct TrajectoryRecord {
  std::int64_t tick = 0;
  int uav_id = 0;
  BsplineTrajectory trajectory;
};

struct ReplanRecord {
  std::int64_t tick = 0;
  int uav_id = 0;
  int iterations = 0;
  bool converged = false;
  bool degraded = false;
  double initial_total = 0.0;
  double collision = 0.0;
  double endpoint = 0.0;
  double smoothness = 0.0;
  double formation = 0.0;
  double reciprocal = 0.0;
};

// Global waypoint with the reference's arrival and departure times.
struct WaypointRecord {
  int poi_id = -1;  // -1 for home
  Vec3 position = Vec3::Zero();
  double arrival = 0.0;
  double departure = 0.0;
};

struct MissionLog {
  ScenarioConfig scenario;
  pctsp::Tour tour;
  pctsp::PctspInstance instance;
  PolyTrajectory global;
  std::vector<WaypointRecord> waypoints;
  std::vector<StateSample> states;
  std::vector<TrajectoryRecord> trajectories;
  std::vector<ReplanRecord> replans;
  std::vector<Event> events;
  metrics::MetricsReport metrics;
  std::int64_t ticks = 0;
  bool completed = false;
  bool halted = false;

  int collision_count() const;
};

// Global reference of the central agent: rest-to-rest minimum-snap legs
// between consecutive tour stops, with holds for waiting and service.
struct GlobalPlan {
  PolyTrajectory trajectory;
  std::vector<WaypointRecord> waypoints;
};
GlobalPlan build_global_plan(const ScenarioConfig& scenario, const pctsp::PctspInstance& inst,
                             const pctsp::Tour& tour);

MissionLog run_mission(const ScenarioConfig& scenario);

// Assembles metric inputs from logged samples.
metrics::MetricsInput metrics_input(const ScenarioConfig& scenario, std::span<const StateSample> states,
                                    std::span<const WaypointRecord> waypoints);

// Log directory I/O.
void write_log(const MissionLog& log, const std::string& dir);
// Recomputes the metrics from states.csv, waypoints.csv and scenario.json.
metrics::MetricsReport report_from_dir(const std::string& dir);
// Per-sample formation and trajectory errors plus the recomputed metrics.
void write_plot_csvs(const std::string& log_dir, const std::string& out_dir);
void write_metrics_csv(const metrics::MetricsReport& report, const std::string& path);

}  // namespace swarmnav::sim
