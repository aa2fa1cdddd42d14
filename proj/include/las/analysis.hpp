#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "las/params.hpp"

namespace las {

struct Clustering {
  int k = 0;
  Eigen::MatrixXd centroids;             // k x d
  std::vector<int> assignments;          // one cluster id per row
  double inertia = 0.0;                  // sum of squared distances
  std::vector<double> inertia_history;   // per Lloyd iteration, winning restart
};

// K-means over row-wise data: k-means++ seeding, Lloyd iterations to an
// assignment fixpoint (or max_iterations), best of `restarts` seeded runs by
// inertia. Centroid draws invert one uniform against the cumulative weight
// mass, so duplicating every row leaves the result unchanged.
Clustering kmeans(const Eigen::MatrixXd& data, int k, std::uint64_t seed,
                  int restarts = 10, int max_iterations = 300);

// Per-cluster, per-dimension signed difference between centroids and a
// reference point (the behaviour defaults in normalized coordinates).
Eigen::MatrixXd centroid_vs_reference(const Clustering& clustering,
                                      const Eigen::RowVectorXd& reference);

Eigen::MatrixXd centroid_vs_pb(const Clustering& clustering);

// Paired percentiles Q_0..Q_100 of two samples, linearly interpolated
// between closest order statistics.
std::vector<std::pair<double, double>> qq_table(const std::vector<double>& a,
                                                const std::vector<double>& b);

double percentile(std::vector<double> values, double q);

// Rows projected onto their two principal axes (for plotting clusters).
Eigen::MatrixXd principal_plane_projection(const Eigen::MatrixXd& data);

}  // namespace las
