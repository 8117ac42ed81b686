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

#include "swarmnav/pctsp.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace swarmnav::pctsp {

namespace {

// Next line that is neither blank nor a '#' comment.
bool next_line(std::istream& in, std::string& line, int& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

[[noreturn]] void parse_error(int lineno, const std::string& msg) {
  fail(ErrorKind::kParse, "instance line " + std::to_string(lineno) + ": " + msg);
}

}  // namespace

PctspInstance read_instance(std::istream& in) {
  PctspInstance inst;
  std::string line;
  int lineno = 0;
  int n = -1;
  while (next_line(in, line, lineno)) {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "depot") {
      if (!(ss >> inst.depot)) parse_error(lineno, "expected depot index");
    } else if (key == "alpha") {
      if (!(ss >> inst.alpha)) parse_error(lineno, "expected alpha");
    } else if (key == "max_duration") {
      if (!(ss >> inst.max_duration)) parse_error(lineno, "expected max_duration");
    } else if (key == "table1") {
      if (!(ss >> n) || n < 1) parse_error(lineno, "expected node count >= 1");
      for (int i = 0; i < n; ++i) {
        if (!next_line(in, line, lineno)) parse_error(lineno, "table1 truncated");
        std::istringstream row(line);
        Node node;
        int eligible = 1;
        if (!(row >> node.id >> node.tw_open >> node.tw_close >> node.prize)) {
          parse_error(lineno, "expected: id tw_open tw_close prize [eligible]");
        }
        if (row >> eligible) node.eligible = eligible != 0;
        if (node.tw_open > node.tw_close) parse_error(lineno, "tw_close < tw_open for node " + std::to_string(node.id));
        if (node.prize < 0.0) parse_error(lineno, "negative prize for node " + std::to_string(node.id));
        inst.nodes.push_back(node);
      }
    } else if (key == "table2") {
      if (n < 0) parse_error(lineno, "table2 before table1");
      inst.cost = Eigen::MatrixXd::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        if (!next_line(in, line, lineno)) parse_error(lineno, "table2 truncated");
        std::istringstream row(line);
        for (int j = 0; j < n; ++j) {
          if (!(row >> inst.cost(i, j))) parse_error(lineno, "expected " + std::to_string(n) + " costs");
        }
      }
    } else {
      parse_error(lineno, "unknown section '" + key + "'");
    }
  }
  if (n < 0) fail(ErrorKind::kParse, "instance: missing table1");
  if (inst.cost.rows() != n) fail(ErrorKind::kParse, "instance: missing table2");
  if (inst.depot < 0 || inst.depot >= n) fail(ErrorKind::kValidation, "instance: depot index out of range");
  for (int i = 0; i < n; ++i) {
    if (inst.cost(i, i) != 0.0) fail(ErrorKind::kValidation, "instance: cost diagonal must be zero");
    for (int j = 0; j < n; ++j) {
      if (inst.cost(i, j) < 0.0) fail(ErrorKind::kValidation, "instance: negative cost");
      if (inst.cost(i, j) != inst.cost(j, i)) fail(ErrorKind::kValidation, "instance: cost matrix not symmetric");
    }
  }
  return inst;
}

PctspInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open instance file '" + path + "'");
  return read_instance(in);
}

void write_instance(std::ostream& out, const PctspInstance& inst) {
  out << "# prize-collecting TSP with time windows\n";
  out << fmt::format("depot {}\nalpha {}\nmax_duration {}\n", inst.depot, inst.alpha, inst.max_duration);
  out << "# table 1: id tw_open tw_close prize eligible\n";
  out << "table1 " << inst.size() << "\n";
  for (const auto& n : inst.nodes) {
    out << fmt::format("{} {} {} {} {}\n", n.id, n.tw_open, n.tw_close, n.prize, n.eligible ? 1 : 0);
  }
  out << "# table 2: symmetric travel cost in seconds, service included\n";
  out << "table2\n";
  for (int i = 0; i < inst.size(); ++i) {
    for (int j = 0; j < inst.size(); ++j) out << (j ? " " : "") << fmt::format("{}", inst.cost(i, j));
    out << "\n";
  }
}

void save_instance(const PctspInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::kIo, "cannot write instance file '" + path + "'");
  write_instance(out, inst);
}

void write_tour(std::ostream& out, const PctspInstance& inst, const Tour& tour) {
  auto ids = [&](const std::vector<int>& idx) {
    std::string s;
    for (int i : idx) s += fmt::format(" {}", inst.nodes[i].id);
    return s;
  };
  out << "visit_order" << ids(tour.visit_order) << "\n";
  out << "arrival_times";
  for (double t : tour.arrival_times) out << fmt::format(" {}", t);
  out << "\n";
  out << fmt::format("collected_prize {}\ntravel_cost {}\nobjective {}\n", tour.collected_prize, tour.travel_cost,
                     tour.objective);
  out << "skipped" << ids(tour.skipped) << "\n";
  out << "optimal " << (tour.optimal ? 1 : 0) << "\n";
}

}  // namespace swarmnav::pctsp
