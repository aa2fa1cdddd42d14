#pragma once

#include <string>
#include <vector>

namespace las {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Node graph of the sculpture: neighbour lists drive cascade propagation,
// positions drive IR sensing, edge nodes terminate cascades.
class NodeTopology {
 public:
  NodeTopology(std::vector<Vec2> positions,
               std::vector<std::vector<int>> adjacency,
               std::vector<int> edge_nodes);

  // Canonical build: rows x cols grid, 4-neighbour adjacency, boundary nodes
  // are the edge set.
  static NodeTopology grid(int rows, int cols, double spacing_m = 1.0);

  static NodeTopology from_json_file(const std::string& path);

  int node_count() const { return static_cast<int>(positions_.size()); }
  const std::vector<Vec2>& positions() const { return positions_; }
  const std::vector<int>& neighbours(int node) const;
  const std::vector<int>& edge_nodes() const { return edge_nodes_; }

  // Unweighted graph distance from `source` to every node (BFS).
  std::vector<int> distances_from(int source) const;

  // Node ids grouped by x position, ordered left to right; used by sweeps
  // along the long axis.
  const std::vector<std::vector<int>>& columns() const { return columns_; }

  // Stable identity for compatibility checks between runs.
  std::uint64_t fingerprint() const;

 private:
  void validate() const;
  void build_columns();

  std::vector<Vec2> positions_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> edge_nodes_;
  std::vector<std::vector<int>> columns_;
};

}  // namespace las
