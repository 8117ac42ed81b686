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

#include "swarmnav/swarm_sim.hpp"

#include "swarmnav/esdf_map.hpp"
#include "swarmnav/formation.hpp"
#include "swarmnav/local_planner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace swarmnav::sim {

namespace {

constexpr int kGroundStation = -1;
constexpr std::uint64_t kBusSeedSalt = 0x9e3779b97f4a7c15ULL;

std::string join_ids(const std::vector<int>& ids) {
  std::string s;
  for (int id : ids) s += (s.empty() ? "" : " ") + std::to_string(id);
  return s;
}

}  // namespace

Bus::Bus(std::vector<int> participants, double drop_rate, std::uint64_t seed)
    : participants_(std::move(participants)), drop_rate_(drop_rate), rng_(seed) {
  for (int id : participants_) inbox_[id];
}

void Bus::broadcast(BusMessage msg, std::int64_t tick) {
  msg.tick_stamp = tick;
  msg.sequence = next_sequence_[msg.sender_id]++;
  for (int id : participants_) {
    if (id == msg.sender_id) continue;
    ++sent_;
    if (drop_rate_ > 0.0 && unit_(rng_) < drop_rate_) {
      ++dropped_;
      continue;
    }
    inbox_[id].push_back(msg);
  }
}

std::vector<BusMessage> Bus::poll(int receiver, std::int64_t tick) {
  std::vector<BusMessage> out;
  auto& q = inbox_[receiver];
  while (!q.empty() && q.front().tick_stamp < tick) {
    out.push_back(std::move(q.front()));
    q.pop_front();
  }
  return out;
}

void PeerTable::absorb(const BusMessage& msg) {
  if (msg.sender_id == kGroundStation) return;
  auto& p = peers_[msg.sender_id];
  switch (msg.kind) {
    case MessageKind::kOdometry:
      p.position = msg.position;
      p.velocity = msg.velocity;
      break;
    case MessageKind::kTrajectory:
      p.trajectory = msg.trajectory;
      break;
    case MessageKind::kHeartbeat:
      p.last_heartbeat = msg.tick_stamp;
      break;
    default:
      break;
  }
}

void step(AgentState& agent, double t, double dt, const TrackingParams& params) {
  Vec3 p_ref = agent.position;
  Vec3 v_ref = Vec3::Zero();
  Vec3 a_ref = Vec3::Zero();
  const auto& traj = agent.current_traj;
  if (!traj.empty()) {
    if (t >= traj.t_end()) {
      p_ref = traj.eval(traj.t_end(), 0);
    } else {
      const double tc = std::max(t, traj.t_start());
      p_ref = traj.eval(tc, 0);
      v_ref = traj.eval(tc, 1);
      a_ref = traj.eval(tc, 2);
    }
  }
  Vec3 a = a_ref + params.kp * (p_ref - agent.position) + params.kd * (v_ref - agent.velocity);
  if (a.norm() > params.a_max) a *= params.a_max / a.norm();
  agent.acceleration = a;
  agent.velocity += a * dt;
  if (agent.velocity.norm() > params.v_cap) agent.velocity *= params.v_cap / agent.velocity.norm();
  agent.position += agent.velocity * dt;
}

std::vector<CollisionEvent> check_collisions(std::span<const AgentState> agents,
                                             std::span<const CapabilityRecord> bodies,
                                             std::span<const Obstacle> obstacles, std::int64_t tick) {
  std::vector<CollisionEvent> out;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (!agents[i].alive) continue;
    for (std::size_t o = 0; o < obstacles.size(); ++o) {
      const double d = esdf::cylinder_distance(obstacles[o], agents[i].position);
      if (d < bodies[i].body_radius) {
        out.push_back({tick, CollisionKind::kObstacle, agents[i].uav_id, static_cast<int>(o), d});
      }
    }
    for (std::size_t j = i + 1; j < agents.size(); ++j) {
      if (!agents[j].alive) continue;
      const double d = (agents[i].position - agents[j].position).norm();
      if (d < bodies[i].body_radius + bodies[j].body_radius) {
        out.push_back({tick, CollisionKind::kAgent, agents[i].uav_id, agents[j].uav_id, d});
      }
    }
  }
  return out;
}

int MissionLog::collision_count() const {
  return static_cast<int>(std::count_if(events.begin(), events.end(), [](const Event& e) {
    return e.kind == "collision_obstacle" || e.kind == "collision_agent";
  }));
}

GlobalPlan build_global_plan(const ScenarioConfig& sc, const pctsp::PctspInstance& inst, const pctsp::Tour& tour) {
  const auto& sim = sc.config.sim;
  const double v = sim.global_speed_fraction * sc.swarm.swarm_v_max;
  const double a = sim.global_acc_limit;

  std::vector<int> stops;
  for (int idx : tour.visit_order) {
    if (idx != inst.depot) stops.push_back(idx);
  }

  GlobalPlan plan;
  plan.trajectory = PolyTrajectory({}, {sc.home});
  plan.waypoints.push_back({-1, sc.home, 0.0, 0.0});
  if (stops.empty()) {
    plan.trajectory.hold(1.0);
    plan.waypoints.push_back({-1, sc.home, 1.0, 1.0});
    return plan;
  }

  std::vector<Vec3> points{sc.home};
  for (int idx : stops) points.push_back(sc.pois[idx - 1].position);
  points.push_back(sc.home);

  if (!sim.stop_at_pois) {
    plan.trajectory = trajectory::fit_global(points, v, a);
    const auto starts = plan.trajectory.segment_starts();
    for (std::size_t k = 1; k < points.size(); ++k) {
      const double t = k < starts.size() ? starts[k] : plan.trajectory.duration();
      const int id = k + 1 < points.size() ? sc.pois[stops[k - 1] - 1].id : -1;
      plan.waypoints.push_back({id, points[k], t, t});
    }
    return plan;
  }

  for (std::size_t k = 1; k < points.size(); ++k) {
    if ((points[k] - points[k - 1]).norm() > 1e-9) {
      const std::vector<Vec3> leg{points[k - 1], points[k]};
      plan.trajectory.append(trajectory::fit_global(leg, v, a));
    }
    const double arrival = plan.trajectory.duration();
    if (k + 1 < points.size()) {
      const auto& poi = sc.pois[stops[k - 1] - 1];
      const double service = poi.service_time > 0.0 ? poi.service_time : sc.config.tour.service_time_default;
      plan.trajectory.hold(std::max(0.0, poi.tw_open - arrival) + service);
      plan.waypoints.push_back({poi.id, points[k], arrival, plan.trajectory.duration()});
    } else {
      plan.waypoints.push_back({-1, points[k], arrival, arrival});
    }
  }
  return plan;
}

MissionLog run_mission(const ScenarioConfig& sc) {
  validate_scenario(sc);
  const MissionConfig& cfg = sc.config;
  validate_config(cfg);

  MissionLog log;
  log.scenario = sc;
  const auto& swarm = sc.swarm;
  const int n = static_cast<int>(swarm.agents.size());
  const double dt = cfg.sim.dt;

  log.instance = pctsp::build_instance(sc, cfg.tour.cruise_fraction * swarm.swarm_v_max,
                                       cfg.tour.service_time_default, cfg.tour.alpha);
  const int n_pois = log.instance.size() - 1;
  if (n_pois <= cfg.tour.exact_limit) {
    log.tour = pctsp::solve_exact(log.instance, {cfg.tour.deadline, 0});
  } else {
    log.tour = pctsp::solve_heuristic(log.instance);
  }
  auto plan = build_global_plan(sc, log.instance, log.tour);
  log.global = plan.trajectory;
  log.waypoints = plan.waypoints;

  auto emit = [&](std::int64_t tick, std::string kind, int a = -1, int b = -1, double value = 0.0,
                  std::string detail = {}) {
    log.events.push_back({tick, tick * dt, std::move(kind), a, b, value, std::move(detail)});
  };
  {
    std::vector<int> ids;
    for (int idx : log.tour.visit_order) {
      if (idx != log.instance.depot) ids.push_back(log.instance.nodes[idx].id);
    }
    std::vector<int> skipped;
    for (int idx : log.tour.skipped) skipped.push_back(log.instance.nodes[idx].id);
    emit(0, "tour", -1, -1, log.tour.objective, "visit " + join_ids(ids) + "; skipped " + join_ids(skipped));
  }
  for (const auto& w : log.waypoints) {
    if (w.poi_id < 0) continue;
    const auto it = std::find_if(sc.pois.begin(), sc.pois.end(), [&](const PoiRecord& p) { return p.id == w.poi_id; });
    if (w.arrival > it->tw_close) emit(0, "window_missed", -1, w.poi_id, w.arrival);
  }

  const double horizon_end = std::min(log.global.duration() + cfg.sim.end_margin, swarm.swarm_t_max);
  const auto last_tick = static_cast<std::int64_t>(std::ceil(horizon_end / dt - 1e-9));

  std::vector<int> ids(n);
  std::vector<AgentState> agents(n);
  for (int i = 0; i < n; ++i) {
    ids[i] = swarm.agents[i].uav_id;
    agents[i].uav_id = ids[i];
    agents[i].position = sc.home + swarm.formation_offsets[i];
  }
  const int central = swarm.central_index;
  Eigen::MatrixXd desired;
  if (n >= 2) desired = formation::normalized_laplacian(swarm.formation_offsets);

  std::vector<int> participants = ids;
  participants.push_back(kGroundStation);
  Bus bus(participants, cfg.sim.drop_rate, sc.seed ^ kBusSeedSalt);
  std::vector<PeerTable> tables(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j != i) tables[i].peer(ids[j]).position = agents[j].position;
    }
  }

  const TrackingParams tracking{cfg.sim.kp, cfg.sim.kd, cfg.sim.a_max, (1.0 + cfg.sim.speed_slack) * swarm.swarm_v_max};
  const double v_limit = cfg.planner.v_limit > 0.0 ? cfg.planner.v_limit : swarm.swarm_v_max;

  auto broadcast_state = [&](std::int64_t tick) {
    for (const auto& a : agents) {
      if (!a.alive) continue;
      BusMessage odo;
      odo.sender_id = a.uav_id;
      odo.kind = MessageKind::kOdometry;
      odo.position = a.position;
      odo.velocity = a.velocity;
      bus.broadcast(odo, tick);
      BusMessage hb;
      hb.sender_id = a.uav_id;
      hb.kind = MessageKind::kHeartbeat;
      bus.broadcast(hb, tick);
    }
  };

  // Ground station uploads the waypoints and the execution signal before the
  // first tick; agents announce themselves.
  {
    BusMessage wp;
    wp.sender_id = kGroundStation;
    wp.kind = MessageKind::kWaypoints;
    for (const auto& w : log.waypoints) wp.waypoints.push_back(w.position);
    bus.broadcast(wp, -1);
    BusMessage ex;
    ex.sender_id = kGroundStation;
    ex.kind = MessageKind::kExecute;
    bus.broadcast(ex, -1);
    broadcast_state(-1);
  }

  auto log_state = [&](std::int64_t tick) {
    const double t = tick * dt;
    for (int i = 0; i < n; ++i) {
      const auto& a = agents[i];
      StateSample s;
      s.tick = tick;
      s.t = t;
      s.uav_id = a.uav_id;
      s.position = a.position;
      s.velocity = a.velocity;
      s.reference = planner::reference_at(log.global, swarm.formation_offsets[i], t).position;
      s.plan = a.current_traj.empty() ? a.position : a.current_traj.eval_clamped(t, 0);
      log.states.push_back(s);
    }
  };

  std::size_t next_waypoint = 1;
  std::vector<planner::ReplanResult> results(n);
  for (std::int64_t tick = 0; tick < last_tick; ++tick) {
    const double t = tick * dt;
    for (int i = 0; i < n; ++i) {
      for (const auto& msg : bus.poll(ids[i], tick)) tables[i].absorb(msg);
    }

    if (tick % cfg.sim.replan_every == 0) {
      auto plan_one = [&](int i) {
        planner::ReplanProblem pr;
        pr.t_now = t;
        const auto& cur = agents[i].current_traj;
        pr.position = agents[i].position;
        pr.velocity = agents[i].velocity;
        pr.acceleration = agents[i].acceleration;
        if (!cur.empty() && t <= cur.t_end() &&
            (cur.eval_clamped(t, 0) - agents[i].position).norm() <= cfg.sim.plan_continuity) {
          pr.position = cur.eval_clamped(t, 0);
          pr.velocity = cur.eval_clamped(t, 1);
          pr.acceleration = cur.eval_clamped(t, 2);
        }
        pr.global = &log.global;
        pr.offset = swarm.formation_offsets[i];
        const auto grid = esdf::build_local_esdf(sc.obstacles, agents[i].position, cfg.esdf);
        pr.grid = &grid;
        pr.self_slot = i;
        std::vector<planner::Neighbor> others;
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          const auto& view = tables[i].peers().at(ids[j]);
          others.push_back({j, view.trajectory, view.position, view.stale(tick, cfg.sim.heartbeat_timeout)});
        }
        pr.others = others;
        pr.desired_laplacian = n >= 2 ? &desired : nullptr;
        pr.weights = cfg.planner;
        if (i == central && !cfg.planner.central_formation_term) pr.weights.lambda_fs = 0.0;
        pr.v_limit = v_limit;
        pr.warm_start = &agents[i].current_traj;
        results[i] = planner::replan(pr);
      };
      const int threads = std::min(cfg.sim.threads, n);
      if (threads <= 1) {
        for (int i = 0; i < n; ++i) plan_one(i);
      } else {
        std::atomic<int> next{0};
        std::vector<std::jthread> pool;
        for (int w = 0; w < threads; ++w) {
          pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) plan_one(i);
          });
        }
      }

      for (int i = 0; i < n; ++i) {
        auto& r = results[i];
        agents[i].current_traj = r.trajectory;
        BusMessage msg;
        msg.sender_id = ids[i];
        msg.kind = MessageKind::kTrajectory;
        msg.trajectory = r.trajectory;
        bus.broadcast(std::move(msg), tick);
        log.trajectories.push_back({tick, ids[i], r.trajectory});
        if (!r.converged) emit(tick, "replan_not_converged", ids[i], -1, r.cost.total());
        if (cfg.sim.debug_costs) {
          log.replans.push_back({tick, ids[i], r.iterations, r.converged, r.degraded, r.initial_cost.total(),
                                 r.cost.collision, r.cost.endpoint, r.cost.smoothness, r.cost.formation,
                                 r.cost.reciprocal});
        }
      }
    }

    if (tick == 0) log_state(0);
    broadcast_state(tick);
    for (auto& a : agents) step(a, t, dt, tracking);

    const std::int64_t now = tick + 1;
    for (const auto& c : check_collisions(agents, swarm.agents, sc.obstacles, now)) {
      emit(now, c.kind == CollisionKind::kObstacle ? "collision_obstacle" : "collision_agent", c.a, c.b, c.distance);
    }
    while (next_waypoint < log.waypoints.size() && log.waypoints[next_waypoint].arrival <= now * dt) {
      const auto& w = log.waypoints[next_waypoint];
      emit(now, w.poi_id >= 0 ? "poi_arrival" : "home_arrival", ids[central], w.poi_id,
           (agents[central].position - w.position).norm());
      ++next_waypoint;
    }
    if (now % cfg.sim.log_every == 0 || now == last_tick) log_state(now);
    log.ticks = now;
    if (cfg.sim.halt_on_collision && log.collision_count() > 0) {
      log.halted = true;
      emit(now, "halted");
      break;
    }
  }

  if (!log.halted) {
    if (log.global.duration() + cfg.sim.end_margin <= swarm.swarm_t_max + 1e-9) {
      log.completed = true;
      emit(log.ticks, "mission_complete");
    } else {
      emit(log.ticks, "t_max_reached");
    }
  }
  log.metrics = metrics::compute_report(metrics_input(sc, log.states, log.waypoints));
  return log;
}

metrics::MetricsInput metrics_input(const ScenarioConfig& sc, std::span<const StateSample> states,
                                    std::span<const WaypointRecord> waypoints) {
  metrics::MetricsInput in;
  in.central_index = sc.swarm.central_index;
  in.footprint = sc.config.metrics.footprint;
  const int n = static_cast<int>(sc.swarm.agents.size());
  for (int i = 0; i < n; ++i) {
    metrics::AgentTrack tr;
    tr.uav_id = sc.swarm.agents[i].uav_id;
    tr.offset = sc.swarm.formation_offsets[i];
    in.agents.push_back(std::move(tr));
  }
  for (const auto& s : states) {
    auto it = std::find_if(in.agents.begin(), in.agents.end(), [&](const auto& a) { return a.uav_id == s.uav_id; });
    require(it != in.agents.end(), ErrorKind::kValidation, "states: unknown uav_id " + std::to_string(s.uav_id));
    it->actual.push_back(s.position);
    it->reference.push_back(s.reference);
    it->replanned.push_back(s.plan);
  }
  for (const auto& w : waypoints) in.waypoints.push_back(w.position);
  return in;
}

}  // namespace swarmnav::sim
