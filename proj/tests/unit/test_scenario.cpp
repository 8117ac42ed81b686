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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

using namespace swarmnav;

namespace {

const char* kOnePoi = R"({
  "area": {"min": [0, 0, 0], "max": [20, 20, 10]},
  "home": [1, 1, 2],
  "swarm": {"capabilities": [{"uav_id": 4, "max_velocity": 2.0, "max_flight_duration": 300}], "n_agents": 1},
  "pois": [{"id": 9, "position": [10, 10, 2], "prize": 5, "tw_open": 0, "tw_close": 100}]
})";

CapabilityRecord cap(int id, double v, double dur, std::vector<std::string> sensors = {}) {
  CapabilityRecord r;
  r.uav_id = id;
  r.max_velocity = v;
  r.max_flight_duration = dur;
  r.payload_sensors = std::move(sensors);
  return r;
}

ErrorKind kind_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::kArgument;
}

std::string message_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("smallest scenario loads") {
  const auto sc = parse_scenario(kOnePoi);
  CHECK(sc.pois.size() == 1);
  CHECK(sc.obstacles.empty());
  REQUIRE(sc.swarm.agents.size() == 1);
  CHECK(sc.swarm.agents[0].uav_id == 4);
  CHECK(sc.swarm.central_index == 0);
  CHECK(sc.swarm.formation_offsets[0] == Vec3::Zero());
  CHECK(sc.swarm.swarm_v_max == 2.0);
}

TEST_CASE("inverted time window names the POI") {
  std::string text = kOnePoi;
  text.replace(text.find("\"tw_close\": 100"), 15, "\"tw_close\": -1");
  CHECK(kind_of(text) == ErrorKind::kValidation);
  const std::string msg = message_of(text);
  CHECK(msg.find("pois[0].tw_close") != std::string::npos);
  CHECK(msg.find("POI id 9") != std::string::npos);
}

TEST_CASE("malformed text is a parse error") {
  CHECK(kind_of("{\"area\": ") == ErrorKind::kParse);
  CHECK(kind_of("[1, 2]") == ErrorKind::kParse);
}

TEST_CASE("missing field is reported with its path") {
  std::string text = kOnePoi;
  text.replace(text.find("\"home\": [1, 1, 2],"), 18, "");
  CHECK(kind_of(text) == ErrorKind::kValidation);
  CHECK(message_of(text).find("home") != std::string::npos);
}

TEST_CASE("POI outside the area is rejected") {
  std::string text = kOnePoi;
  text.replace(text.find("[10, 10, 2]"), 11, "[10, 99, 2]");
  CHECK(message_of(text).find("pois[0].position") != std::string::npos);
}

TEST_CASE("unknown config key is rejected") {
  std::string text = kOnePoi;
  text.insert(text.rfind('}'), ", \"config\": {\"planner\": {\"lambda_q\": 1}}");
  CHECK(kind_of(text) == ErrorKind::kValidation);
  CHECK(message_of(text).find("lambda_q") != std::string::npos);
}

TEST_CASE("square field scenario has 110 cylinders") {
  const auto sc = load_scenario(SWARMNAV_SCENARIO_DIR "/square_field.json");
  CHECK(sc.obstacles.size() == 110);
  CHECK(sc.swarm.agents.size() == 5);
  CHECK(sc.area_bounds.max.x() - sc.area_bounds.min.x() == doctest::Approx(60.0));
  CHECK(sc.area_bounds.max.y() - sc.area_bounds.min.y() == doctest::Approx(25.0));
  for (const auto& o : sc.obstacles) {
    CHECK(o.radius >= 0.5);
    CHECK(o.radius <= 0.8);
    CHECK(o.height >= sc.home.z());
  }
}

TEST_CASE("generated obstacles respect gap and keep-out") {
  const auto sc = load_scenario(SWARMNAV_SCENARIO_DIR "/square_field.json");
  for (std::size_t i = 0; i < sc.obstacles.size(); ++i) {
    const auto& a = sc.obstacles[i];
    CHECK((a.center - sc.home.head<2>()).norm() - a.radius >= 1.5 - 1e-12);
    for (const auto& p : sc.pois) CHECK((a.center - p.position.head<2>()).norm() - a.radius >= 1.5 - 1e-12);
    for (std::size_t j = i + 1; j < sc.obstacles.size(); ++j) {
      const auto& b = sc.obstacles[j];
      CHECK((a.center - b.center).norm() - a.radius - b.radius >= 1.2 - 1e-12);
    }
  }
}

TEST_CASE("seed override changes the random field, same seed reproduces it") {
  const auto a = load_scenario(SWARMNAV_SCENARIO_DIR "/square_field.json", 11);
  const auto b = load_scenario(SWARMNAV_SCENARIO_DIR "/square_field.json", 11);
  const auto c = load_scenario(SWARMNAV_SCENARIO_DIR "/square_field.json", 12);
  CHECK(a.seed == 11);
  CHECK(a.obstacles == b.obstacles);
  CHECK_FALSE(a.obstacles == c.obstacles);
}

TEST_CASE("save and load round trip") {
  for (const char* name : {"square_field.json", "minimal.json", "tetra_gate.json"}) {
    const auto sc = load_scenario(std::string(SWARMNAV_SCENARIO_DIR "/") + name);
    const auto back = parse_scenario(dump_scenario(sc));
    CHECK(back == sc);
    CHECK(back.obstacles == sc.obstacles);
    CHECK(back.config.planner.lambda_c == sc.config.planner.lambda_c);
    CHECK(back.config.esdf.resolution == sc.config.esdf.resolution);
  }
}

TEST_CASE("single agent database") {
  const auto s = configure_swarm({cap(3, 1.5, 200)}, {}, 1);
  REQUIRE(s.agents.size() == 1);
  CHECK(s.central_index == 0);
  REQUIRE(s.formation_offsets.size() == 1);
  CHECK(s.formation_offsets[0] == Vec3::Zero());
}

TEST_CASE("five identical agents form a square of edge 4") {
  std::vector<CapabilityRecord> db;
  for (int i = 1; i <= 5; ++i) db.push_back(cap(i, 2.0, 600));
  const auto s = configure_swarm(db, {}, 5);
  REQUIRE(s.formation_offsets.size() == 5);
  CHECK(s.formation_offsets[s.central_index] == Vec3::Zero());
  std::vector<Vec3> corners;
  for (int i = 0; i < 5; ++i) {
    if (i != s.central_index) corners.push_back(s.formation_offsets[i]);
  }
  // Each corner has two neighbours at 4 and one at 4*sqrt(2), all at the same
  // height as the centre.
  for (const auto& a : corners) {
    CHECK(a.z() == 0.0);
    CHECK(a.norm() == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
    int edges = 0, diagonals = 0;
    for (const auto& b : corners) {
      const double d = (a - b).norm();
      if (std::abs(d - 4.0) < 1e-9) ++edges;
      if (std::abs(d - 4.0 * std::sqrt(2.0)) < 1e-9) ++diagonals;
    }
    CHECK(edges == 2);
    CHECK(diagonals == 1);
  }
}

TEST_CASE("regular polygon edges match the requested length") {
  for (int n = 2; n <= 9; ++n) {
    const auto offs = polygon_offsets(n, 3.7);
    REQUIRE(offs.size() == static_cast<std::size_t>(n + 1));
    for (int k = 1; k <= n; ++k) {
      const Vec3& a = offs[k];
      const Vec3& b = offs[k % n + 1];
      CHECK(a.z() == 0.0);
      if (n > 1) CHECK(std::abs((a - b).norm() - 3.7) < 1e-9);
    }
  }
}

TEST_CASE("required sensor carrier is always selected") {
  const std::vector<CapabilityRecord> db = {cap(1, 2.0, 900), cap(2, 3.0, 800, {"thermal"}), cap(3, 2.5, 950)};
  const auto s = configure_swarm(db, {"thermal"}, 2);
  REQUIRE(s.agents.size() == 2);
  // Oracle: of the three 2-subsets only those containing agent 2 cover the
  // requirement.
  int covering_subsets = 0;
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      if (db[a].uav_id == 2 || db[b].uav_id == 2) ++covering_subsets;
    }
  }
  CHECK(covering_subsets == 2);
  const bool has_thermal =
      std::any_of(s.agents.begin(), s.agents.end(), [](const CapabilityRecord& r) { return r.uav_id == 2; });
  CHECK(has_thermal);
  // Empty-payload agent with the longest endurance leads.
  CHECK(s.agents[s.central_index].uav_id == 3);
}

TEST_CASE("uncoverable sensors are infeasible") {
  const std::vector<CapabilityRecord> db = {cap(1, 2.0, 900, {"a"}), cap(2, 2.0, 900, {"b"}), cap(3, 2.0, 900)};
  CHECK_THROWS_AS(configure_swarm(db, {"c"}, 2), Error);
  try {
    configure_swarm(db, {"a", "b"}, 1);
    FAIL("expected infeasible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInfeasible);
  }
}

TEST_CASE("swarm limits are the minima over the selection") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> v(0.5, 4.0), t(60, 1200);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<CapabilityRecord> db;
    const int size = 2 + trial % 7;
    for (int i = 0; i < size; ++i) db.push_back(cap(i + 1, v(rng), t(rng)));
    const int n = 1 + trial % size;
    const auto s = configure_swarm(db, {}, n);
    REQUIRE(static_cast<int>(s.agents.size()) == n);
    for (const auto& a : s.agents) {
      CHECK(s.swarm_v_max <= a.max_velocity);
      CHECK(s.swarm_t_max <= a.max_flight_duration);
    }
  }
}

}  // TEST_SUITE
