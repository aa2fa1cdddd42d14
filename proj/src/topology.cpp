#include "las/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace las {

NodeTopology::NodeTopology(std::vector<Vec2> positions,
                           std::vector<std::vector<int>> adjacency,
                           std::vector<int> edge_nodes)
    : positions_(std::move(positions)),
      adjacency_(std::move(adjacency)),
      edge_nodes_(std::move(edge_nodes)) {
  validate();
  build_columns();
}

NodeTopology NodeTopology::grid(int rows, int cols, double spacing_m) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid: rows and cols must be >= 1");
  const int n = rows * cols;
  std::vector<Vec2> pos(n);
  std::vector<std::vector<int>> adj(n);
  std::vector<int> edges;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int u = id(r, c);
      pos[u] = {c * spacing_m, r * spacing_m};
      if (r > 0) adj[u].push_back(id(r - 1, c));
      if (r + 1 < rows) adj[u].push_back(id(r + 1, c));
      if (c > 0) adj[u].push_back(id(r, c - 1));
      if (c + 1 < cols) adj[u].push_back(id(r, c + 1));
      if (r == 0 || c == 0 || r == rows - 1 || c == cols - 1) edges.push_back(u);
    }
  }
  if (n == 1) edges = {0};
  return NodeTopology(std::move(pos), std::move(adj), std::move(edges));
}

NodeTopology NodeTopology::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("topology: cannot open " + path);
  nlohmann::json j;
  in >> j;
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    return grid(g.at("rows").get<int>(), g.at("cols").get<int>(),
                g.value("spacing_m", 1.0));
  }
  std::vector<Vec2> pos;
  for (const auto& p : j.at("positions")) pos.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  std::vector<std::vector<int>> adj = j.at("adjacency").get<std::vector<std::vector<int>>>();
  std::vector<int> edges = j.at("edge_nodes").get<std::vector<int>>();
  return NodeTopology(std::move(pos), std::move(adj), std::move(edges));
}

const std::vector<int>& NodeTopology::neighbours(int node) const {
  if (node < 0 || node >= node_count()) throw std::out_of_range("topology: node id out of range");
  return adjacency_[static_cast<std::size_t>(node)];
}

std::vector<int> NodeTopology::distances_from(int source) const {
  if (source < 0 || source >= node_count()) throw std::out_of_range("topology: node id out of range");
  std::vector<int> dist(positions_.size(), -1);
  std::deque<int> queue{source};
  dist[static_cast<std::size_t>(source)] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : adjacency_[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(v)] < 0) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

std::uint64_t NodeTopology::fingerprint() const {
  // FNV-1a over the structural description.
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ull;
    }
  };
  mix(static_cast<std::uint64_t>(node_count()));
  for (const auto& neigh : adjacency_)
    for (int v : neigh) mix(static_cast<std::uint64_t>(v) + 1);
  for (int e : edge_nodes_) mix(static_cast<std::uint64_t>(e) + 0x51ull);
  for (const auto& p : positions_) {
    mix(static_cast<std::uint64_t>(std::llround(p.x * 1e6)));
    mix(static_cast<std::uint64_t>(std::llround(p.y * 1e6)));
  }
  return h;
}

void NodeTopology::validate() const {
  const int n = node_count();
  if (n < 1) throw std::invalid_argument("topology: empty node set");
  if (static_cast<int>(adjacency_.size()) != n)
    throw std::invalid_argument("topology: adjacency size mismatch");
  if (edge_nodes_.empty()) throw std::invalid_argument("topology: edge node set is empty");
  for (int e : edge_nodes_)
    if (e < 0 || e >= n) throw std::invalid_argument("topology: edge node id out of range");
  for (int u = 0; u < n; ++u) {
    for (int v : adjacency_[static_cast<std::size_t>(u)]) {
      if (v < 0 || v >= n) throw std::invalid_argument("topology: neighbour id out of range");
      const auto& back = adjacency_[static_cast<std::size_t>(v)];
      if (std::find(back.begin(), back.end(), u) == back.end())
        throw std::invalid_argument("topology: adjacency is not symmetric");
    }
  }
  const auto dist = n > 1 ? distances_from(0) : std::vector<int>{0};
  for (int d : dist)
    if (d < 0) throw std::invalid_argument("topology: graph is not connected");
}

void NodeTopology::build_columns() {
  std::map<long long, std::vector<int>> by_x;
  for (int u = 0; u < node_count(); ++u)
    by_x[std::llround(positions_[static_cast<std::size_t>(u)].x * 1e6)].push_back(u);
  columns_.clear();
  for (auto& [x, nodes] : by_x) columns_.push_back(std::move(nodes));
}

}  // namespace las
