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

#include "../support/pctsp_oracle.hpp"
#include "swarmnav/pctsp.hpp"
#include "swarmnav/scenario.hpp"

#include <doctest.h>

#include <chrono>
#include <sstream>

using namespace swarmnav;
using namespace swarmnav::pctsp;

namespace {

std::vector<int> pois_of(const Tour& t) { return {t.visit_order.begin() + 1, t.visit_order.end() - 1}; }

bool visits(const PctspInstance& inst, const Tour& t, int id) {
  for (int i : pois_of(t)) {
    if (inst.nodes[i].id == id) return true;
  }
  return false;
}

ScenarioConfig two_poi_scenario(double separation) {
  ScenarioConfig sc;
  sc.area_bounds.max = Vec3(100, 100, 10);
  sc.home = Vec3(1, 1, 1);
  PoiRecord a, b;
  a.id = 1;
  a.position = Vec3(10, 10, 1);
  a.tw_close = 1e6;
  b = a;
  b.id = 2;
  b.position = a.position + Vec3(separation, 0, 0);
  sc.pois = {a, b};
  CapabilityRecord r;
  r.max_velocity = 2.0;
  r.max_flight_duration = 600;
  sc.swarm = configure_swarm({r}, {}, 1);
  return sc;
}

}  // namespace

TEST_SUITE("pctsp") {

TEST_CASE("cost is distance over speed plus service") {
  const auto sc = two_poi_scenario(10.0);
  const auto inst = build_instance(sc, 2.0, 0.0, 0.01);
  REQUIRE(inst.size() == 3);
  CHECK(inst.cost(1, 2) == doctest::Approx(5.0));
  CHECK(inst.nodes[0].prize == 0.0);
}

TEST_CASE("coincident POIs cost only the service time") {
  auto sc = two_poi_scenario(0.0);
  sc.home = sc.pois[0].position;
  const auto inst = build_instance(sc, 2.0, 3.0, 0.01);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(inst.cost(i, j) == (i == j ? 0.0 : doctest::Approx(i && j ? 3.0 : 1.5)));
}

TEST_CASE("random instances are symmetric with zero diagonal") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 50), s(0, 5);
  for (int trial = 0; trial < 20; ++trial) {
    auto sc = two_poi_scenario(1.0);
    sc.pois.clear();
    for (int i = 0; i < 8; ++i) {
      PoiRecord p;
      p.id = i + 1;
      p.position = Vec3(u(rng), u(rng), 1.0);
      p.service_time = s(rng);
      p.tw_close = 1e6;
      sc.pois.push_back(p);
    }
    const auto inst = build_instance(sc, 1.5, 0.0, 0.01);
    for (int i = 0; i < inst.size(); ++i) {
      CHECK(inst.cost(i, i) == 0.0);
      for (int j = 0; j < inst.size(); ++j) {
        CHECK(inst.cost(i, j) == inst.cost(j, i));
        if (i == j) continue;
        const Vec3 a = i ? sc.pois[i - 1].position : sc.home, b = j ? sc.pois[j - 1].position : sc.home;
        const double si = i ? sc.pois[i - 1].service_time : 0.0, sj = j ? sc.pois[j - 1].service_time : 0.0;
        CHECK(inst.cost(i, j) == doctest::Approx((a - b).norm() / 1.5 + 0.5 * (si + sj)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("one reachable POI is visited") {
  const auto inst = oracle::planar({{3, 4}}, {Node{7, 0, 100, 10, true}});
  const auto t = solve_exact(inst);
  CHECK(t.visit_order == std::vector<int>{0, 1, 0});
  CHECK(t.collected_prize == 10.0);
  CHECK(t.optimal);
}

TEST_CASE("empty instance gives the empty tour") {
  const auto inst = oracle::planar({}, {});
  for (const auto& t : {solve_exact(inst), solve_heuristic(inst), solve_enumerate(inst)}) {
    CHECK(t.visit_order == std::vector<int>{0, 0});
    CHECK(t.collected_prize == 0.0);
    CHECK(validate_tour(inst, t).ok);
  }
}

TEST_CASE("relaxed windows: every POI visited") {
  const auto inst = oracle::relaxed_windows();
  const auto t = solve_exact(inst);
  CHECK(t.skipped.empty());
  CHECK(t.collected_prize == 50.0);
  CHECK(validate_tour(inst, t).ok);
}

TEST_CASE("strict windows: maximum feasible prize") {
  const auto inst = oracle::strict_windows();
  const auto t = solve_exact(inst);
  const auto best = oracle::brute_force(inst, true);
  CHECK(t.collected_prize == best.prize);
  CHECK_FALSE(t.skipped.empty());
  CHECK(validate_tour(inst, t).ok);
}

TEST_CASE("conflicting windows keep the larger prize") {
  const auto inst = oracle::prize_conflict();
  const auto t = solve_exact(inst);
  CHECK(visits(inst, t, 4));
  CHECK_FALSE(visits(inst, t, 5));
  CHECK(validate_tour(inst, t).ok);
}

TEST_CASE("exact solver equals exhaustive enumeration") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int pois = 1 + trial % 8;
    const auto inst = oracle::random_instance(rng, pois, true);
    const auto best = oracle::brute_force(inst);
    const auto t = solve_exact(inst);
    CHECK(validate_tour(inst, t).ok);
    CHECK(t.optimal);
    CHECK(t.objective == best.objective);
    CHECK(solve_enumerate(inst).objective == best.objective);
  }
}

TEST_CASE("non-dyadic costs agree to rounding") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = oracle::random_instance(rng, 2 + trial % 6, false);
    const auto best = oracle::brute_force(inst);
    CHECK(solve_exact(inst).objective == doctest::Approx(best.objective).epsilon(1e-12));
  }
}

TEST_CASE("ties resolve to the lexicographically smallest order") {
  // Symmetric square: clockwise and counter-clockwise tours cost the same.
  const auto inst = oracle::planar({{1, 0}, {1, 1}, {0, 1}}, {Node{1, 0, 100, 1, true}, Node{2, 0, 100, 1, true},
                                                              Node{3, 0, 100, 1, true}});
  const auto t = solve_exact(inst);
  CHECK(t.visit_order == std::vector<int>{0, 1, 2, 3, 0});
  CHECK(solve_exact(inst).visit_order == t.visit_order);
}

TEST_CASE("more prize never drops a visited POI") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    auto inst = oracle::random_instance(rng, 5, true);
    const auto t = solve_exact(inst);
    for (int i : pois_of(t)) {
      auto richer = inst;
      richer.nodes[i].prize += 7.0;
      const auto r = solve_exact(richer);
      const auto v = pois_of(r);
      CHECK(std::find(v.begin(), v.end(), i) != v.end());
    }
  }
}

TEST_CASE("wider windows never lower the optimum") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 40; ++trial) {
    auto inst = oracle::random_instance(rng, 6, true);
    const double before = solve_exact(inst).objective;
    for (auto& n : inst.nodes) {
      n.tw_open = std::max(0.0, n.tw_open - 10.0);
      if (n.tw_close < 1e6) n.tw_close += 10.0;
    }
    CHECK(solve_exact(inst).objective >= before);
  }
}

TEST_CASE("heuristic is feasible and never beats the optimum") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = oracle::random_instance(rng, 1 + trial % 9, true);
    const auto h = solve_heuristic(inst);
    CHECK(validate_tour(inst, h).ok);
    CHECK(h.objective <= solve_exact(inst).objective);
    CHECK(h.objective >= 0.0);
  }
}

TEST_CASE("nothing to gain means an empty tour") {
  auto inst = oracle::relaxed_windows();
  for (auto& n : inst.nodes) n.prize = 0.0;
  CHECK(solve_heuristic(inst).visit_order == std::vector<int>{0, 0});
  CHECK(solve_exact(inst).visit_order == std::vector<int>{0, 0});
}

TEST_CASE("heuristic on 40 POIs is fast and feasible") {
  std::mt19937_64 rng(16);
  const auto inst = oracle::random_instance(rng, 40, false);
  const auto t0 = std::chrono::steady_clock::now();
  const auto t = solve_heuristic(inst);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(s < 5.0);
  const auto v = validate_tour(inst, t);
  CHECK_MESSAGE(v.ok, v.message);
}

TEST_CASE("exhausted budget returns a feasible non-optimal incumbent") {
  std::mt19937_64 rng(17);
  const auto inst = oracle::random_instance(rng, 14, false);
  ExactOptions opts;
  opts.node_limit = 50;
  const auto t = solve_exact(inst, opts);
  CHECK_FALSE(t.optimal);
  CHECK(validate_tour(inst, t).ok);
}

TEST_CASE("late arrival is reported with the POI id") {
  const auto inst = oracle::planar({{30, 0}}, {Node{42, 0, 10, 5, true}});
  Tour t;
  t.visit_order = {0, 1, 0};
  CHECK_FALSE(complete_tour(inst, t));
  const auto v = validate_tour(inst, t);
  CHECK_FALSE(v.ok);
  CHECK(v.message.find("POI 42") != std::string::npos);
}

TEST_CASE("checker agrees with an independent time propagation") {
  std::mt19937_64 rng(18);
  int feasible_seen = 0, infeasible_seen = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = oracle::random_instance(rng, 6, false);
    std::vector<int> order;
    for (int i = 1; i < inst.size(); ++i) {
      if (rng() % 2) order.push_back(i);
    }
    std::shuffle(order.begin(), order.end(), rng);
    Tour t;
    t.visit_order = {0};
    t.visit_order.insert(t.visit_order.end(), order.begin(), order.end());
    t.visit_order.push_back(0);
    complete_tour(inst, t);
    const bool expected = oracle::feasible(inst, order);
    CHECK(validate_tour(inst, t).ok == expected);
    (expected ? feasible_seen : infeasible_seen)++;
  }
  CHECK(feasible_seen > 10);
  CHECK(infeasible_seen > 10);
}

TEST_CASE("mission duration caps the tour") {
  auto inst = oracle::relaxed_windows();
  inst.max_duration = 60.0;
  const auto t = solve_exact(inst);
  CHECK(t.arrival_times.back() <= 60.0);
  CHECK_FALSE(t.skipped.empty());
}

TEST_CASE("ineligible POIs are skipped") {
  auto inst = oracle::relaxed_windows();
  inst.nodes[2].eligible = false;
  const auto t = solve_exact(inst);
  CHECK(t.skipped == std::vector<int>{2});
}

TEST_CASE("text format round trip") {
  std::mt19937_64 rng(19);
  const auto inst = oracle::random_instance(rng, 7, false);
  std::stringstream ss;
  write_instance(ss, inst);
  const auto back = read_instance(ss);
  REQUIRE(back.size() == inst.size());
  CHECK(back.alpha == inst.alpha);
  CHECK(back.max_duration == inst.max_duration);
  CHECK((back.cost - inst.cost).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < inst.size(); ++i) {
    CHECK(back.nodes[i].id == inst.nodes[i].id);
    CHECK(back.nodes[i].tw_open == inst.nodes[i].tw_open);
    CHECK(back.nodes[i].tw_close == inst.nodes[i].tw_close);
    CHECK(back.nodes[i].prize == inst.nodes[i].prize);
    CHECK(back.nodes[i].eligible == inst.nodes[i].eligible);
  }
  CHECK(solve_exact(back).objective == solve_exact(inst).objective);
}

TEST_CASE("malformed instance text") {
  auto parse_kind = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_instance(in);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kArgument;
  };
  CHECK(parse_kind("table1 2\n0 0 10 0\n") == ErrorKind::kParse);
  CHECK(parse_kind("bogus 1\n") == ErrorKind::kParse);
  CHECK(parse_kind("table1 2\n0 0 10 0\n1 0 10 5\ntable2\n0 1\n2 0\n") == ErrorKind::kValidation);
  CHECK(parse_kind("table1 2\n0 0 10 0\n1 5 1 5\ntable2\n0 1\n1 0\n") == ErrorKind::kParse);
}

}  // TEST_SUITE
