// Copyright 2026 The Authors.
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

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mcm/graph.hpp"

namespace mcm {

/// Parse a SNAP-style edge list: one "u v" pair per line, '#' lines ignored.
/// Node ids are compacted to 0..n-1 in first-appearance order, duplicate
/// pairs collapse, both directions are added, rows get uniform probabilities
/// and sinks a self-loop.
inline TransitionMatrix load_edge_list(std::istream& in) {
  std::map<long long, int> compact;
  std::vector<std::pair<int, int>> pairs;
  auto intern = [&](long long raw) {
    auto [it, inserted] = compact.emplace(raw, static_cast<int>(compact.size()));
    return it->second;
  };
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    long long a, b;
    if (!(fields >> a >> b))
      throw DataError("malformed edge list line " + std::to_string(line_number));
    std::string extra;
    if (fields >> extra)
      throw DataError("trailing tokens on edge list line " +
                      std::to_string(line_number));
    const int u = intern(a);
    const int v = intern(b);
    pairs.emplace_back(u, v);
  }
  if (compact.empty()) throw DataError("edge list contains no edges");

  const int n = static_cast<int>(compact.size());
  std::vector<std::set<int>> adjacency(n);
  for (const auto& [u, v] : pairs) {
    if (u == v) {
      adjacency[u].insert(u);
    } else {
      adjacency[u].insert(v);
      adjacency[v].insert(u);
    }
  }
  std::vector<std::vector<Link>> rows(n);
  for (int u = 0; u < n; ++u) {
    if (adjacency[u].empty()) adjacency[u].insert(u);
    const double p = 1.0 / static_cast<double>(adjacency[u].size());
    for (int v : adjacency[u]) rows[u].push_back({v, p});
  }
  return TransitionMatrix(std::move(rows));
}

inline TransitionMatrix load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list: " + path);
  return load_edge_list(in);
}

// ---------------------------------------------------------------------------
// Native text formats. Matrix: "n" on line 1, then "u v p" triples with 17
// significant digits, so a write/read round trip is bit-exact. Distribution:
// "n" on line 1, then one mass per line.

inline void write_matrix(std::ostream& out, const TransitionMatrix& matrix) {
  out << matrix.node_count() << "\n";
  char buffer[64];
  for (int u = 0; u < matrix.node_count(); ++u)
    for (const Link& link : matrix.row(u)) {
      std::snprintf(buffer, sizeof(buffer), "%d %d %.17g", u, link.node, link.p);
      out << buffer << "\n";
    }
}

inline TransitionMatrix read_matrix(std::istream& in) {
  int n = 0;
  if (!(in >> n) || n <= 0) throw DataError("bad node count in matrix file");
  std::vector<std::vector<Link>> rows(n);
  int u, v;
  double p;
  while (in >> u >> v >> p) {
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw DataError("edge endpoint out of range in matrix file");
    rows[u].push_back({v, p});
  }
  return TransitionMatrix(std::move(rows));
}

inline void write_distribution(std::ostream& out, const ItemDistribution& items) {
  out << items.size() << "\n";
  char buffer[64];
  for (int u = 0; u < items.size(); ++u) {
    std::snprintf(buffer, sizeof(buffer), "%.17g", items[u]);
    out << buffer << "\n";
  }
}

inline ItemDistribution read_distribution(std::istream& in) {
  int n = 0;
  if (!(in >> n) || n <= 0) throw DataError("bad length in distribution file");
  std::vector<double> x(n);
  for (int u = 0; u < n; ++u)
    if (!(in >> x[u])) throw DataError("truncated distribution file");
  return ItemDistribution(std::move(x));
}

inline TransitionMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open matrix file: " + path);
  return read_matrix(in);
}

inline ItemDistribution read_distribution_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open distribution file: " + path);
  return read_distribution(in);
}

// ---------------------------------------------------------------------------
// Trip logs.

struct TripRecord {
  std::string bike_id;  // may be empty
  std::string start_station;
  std::string end_station;
  long long start_time = 0;
  long long end_time = 0;
};

/// Trip CSV with header bike_id,start_station,end_station,start_time,end_time
/// (bike_id column optional).
inline std::vector<TripRecord> read_trips(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty trip file");
  std::vector<std::string> header;
  {
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) header.push_back(field);
  }
  const bool has_bike = !header.empty() && header.front() == "bike_id";
  const std::size_t expected = has_bike ? 5 : 4;
  if (header.size() != expected) throw DataError("unrecognized trip CSV header");

  std::vector<TripRecord> trips;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    std::stringstream fields(line);
    std::vector<std::string> cols;
    std::string field;
    while (std::getline(fields, field, ',')) cols.push_back(field);
    if (cols.size() != expected)
      throw DataError("malformed trip on line " + std::to_string(line_number));
    TripRecord trip;
    std::size_t i = 0;
    if (has_bike) trip.bike_id = cols[i++];
    trip.start_station = cols[i++];
    trip.end_station = cols[i++];
    trip.start_time = std::stoll(cols[i++]);
    trip.end_time = std::stoll(cols[i++]);
    if (trip.start_station.empty() || trip.end_station.empty())
      throw DataError("empty station id on line " + std::to_string(line_number));
    if (trip.start_time > trip.end_time)
      throw DataError("trip ends before it starts on line " +
                      std::to_string(line_number));
    trips.push_back(std::move(trip));
  }
  return trips;
}

struct TripChain {
  TransitionMatrix matrix;
  ItemDistribution items;
  std::vector<std::string> station_ids;  // dense index -> original id
};

/// Build a chain from a trip log over the window [t_start, t_end]:
/// P(u,v) = n_uv / n_u where n_uv counts items at u at t_start that end up at
/// v at t_end. With bike ids, each bike's trips are chained; without them,
/// departures are matched to station inventory first-in-first-out. Items that
/// never move feed the self-loop; stations with no items get probability-1
/// self-loops. x(u) is the inventory at t_start.
inline TripChain build_trip_chain(
    const std::vector<TripRecord>& all_trips,
    const std::map<std::string, long long>& station_counts, long long t_start,
    long long t_end) {
  if (t_start > t_end) throw DataError("invalid time window");

  std::map<std::string, int> index;
  std::vector<std::string> names;
  for (const auto& [station, count] : station_counts) {
    if (count < 0) throw DataError("negative inventory at station " + station);
    index.emplace(station, static_cast<int>(names.size()));
    names.push_back(station);
  }
  if (names.empty()) throw DataError("no stations");
  const int n = static_cast<int>(names.size());

  auto station_index = [&](const std::string& station) {
    auto it = index.find(station);
    if (it == index.end())
      throw DataError("trip references unknown station " + station);
    return it->second;
  };

  std::vector<TripRecord> trips;
  for (const TripRecord& trip : all_trips)
    if (trip.start_time >= t_start && trip.end_time <= t_end)
      trips.push_back(trip);
  std::stable_sort(trips.begin(), trips.end(),
                   [](const TripRecord& a, const TripRecord& b) {
                     return a.start_time < b.start_time;
                   });

  // counts[u][v] = n_uv
  std::vector<std::map<int, long long>> counts(n);
  std::vector<long long> inventory(n, 0);
  for (const auto& [station, count] : station_counts)
    inventory[index[station]] = count;

  const bool has_ids = !trips.empty() && !trips.front().bike_id.empty();
  if (has_ids) {
    // Chain each bike: origin is its first departure, destination its last
    // arrival inside the window.
    std::map<std::string, std::pair<int, int>> bike_span;
    for (const TripRecord& trip : trips) {
      if (trip.bike_id.empty()) throw DataError("missing bike id");
      const int from = station_index(trip.start_station);
      const int to = station_index(trip.end_station);
      auto [it, inserted] = bike_span.emplace(trip.bike_id, std::make_pair(from, to));
      if (!inserted) it->second.second = to;
    }
    for (const auto& [bike, span] : bike_span) {
      if (--inventory[span.first] < 0)
        throw DataError("more departures than items at station " +
                        names[span.first]);
      ++counts[span.first][span.second];
    }
  } else {
    // FIFO pools of (origin) tags per station.
    std::vector<std::deque<int>> pool(n);
    for (int u = 0; u < n; ++u) pool[u].assign(inventory[u], u);
    for (const TripRecord& trip : trips) {
      const int from = station_index(trip.start_station);
      const int to = station_index(trip.end_station);
      if (pool[from].empty())
        throw DataError("more departures than items at station " + names[from]);
      const int origin = pool[from].front();
      pool[from].pop_front();
      pool[to].push_back(origin);
    }
    for (int v = 0; v < n; ++v)
      for (int origin : pool[v]) ++counts[origin][v];
    for (int u = 0; u < n; ++u) inventory[u] = 0;  // folded into counts
  }
  if (has_ids)
    for (int u = 0; u < n; ++u)
      if (inventory[u] > 0) counts[u][u] += inventory[u];

  std::vector<double> x(n, 0.0);
  std::vector<std::vector<Link>> rows(n);
  for (const auto& [station, count] : station_counts)
    x[index[station]] = static_cast<double>(count);
  for (int u = 0; u < n; ++u) {
    long long total = 0;
    for (const auto& [v, c] : counts[u]) total += c;
    if (total == 0) {
      rows[u].push_back({u, 1.0});
      continue;
    }
    for (const auto& [v, c] : counts[u])
      rows[u].push_back({v, static_cast<double>(c) / static_cast<double>(total)});
  }
  // Stations with zero inventory still need positive mass somewhere; the
  // distribution as a whole must be non-trivial.
  double mass = 0.0;
  for (double v : x) mass += v;
  if (!(mass > 0.0)) throw DataError("no items at any station");

  return {TransitionMatrix(std::move(rows)), ItemDistribution(std::move(x)),
          std::move(names)};
}

// ---------------------------------------------------------------------------
// Experiment reports.

struct ReportRow {
  std::string graph;
  std::string distribution;
  std::string algorithm;
  int k;
  double objective;
  double ratio;
};

inline void write_report(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "graph,distribution,algorithm,k,objective,ratio\n";
  char buffer[128];
  for (const ReportRow& row : rows) {
    std::snprintf(buffer, sizeof(buffer), "%d,%.17g,%.17g", row.k,
                  row.objective, row.ratio);
    out << row.graph << ',' << row.distribution << ',' << row.algorithm << ','
        << buffer << "\n";
  }
}

inline void write_report_file(const std::string& path,
                              const std::vector<ReportRow>& rows) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write report: " + path);
  write_report(out, rows);
}

inline std::vector<ReportRow> read_report(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line != "graph,distribution,algorithm,k,objective,ratio")
    throw DataError("bad report header");
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream fields(line);
    ReportRow row;
    std::string k, objective, ratio;
    if (!std::getline(fields, row.graph, ',') ||
        !std::getline(fields, row.distribution, ',') ||
        !std::getline(fields, row.algorithm, ',') ||
        !std::getline(fields, k, ',') || !std::getline(fields, objective, ',') ||
        !std::getline(fields, ratio, ','))
      throw DataError("malformed report row");
    row.k = std::stoi(k);
    row.objective = std::stod(objective);
    row.ratio = std::stod(ratio);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mcm
