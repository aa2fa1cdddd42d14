#include "las/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "las/rng.hpp"

namespace las {

namespace {

// Index drawn by inverting one uniform against the cumulative weights.
Eigen::Index weighted_pick(const Eigen::VectorXd& weights, Rng& rng) {
  const double total = weights.sum();
  if (total <= 0.0) {
    // All residuals zero: every point already sits on a centroid.
    return static_cast<Eigen::Index>(
        rng.uniform_index(static_cast<std::uint64_t>(weights.size())));
  }
  const double target = rng.uniform() * total;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (target < acc) return i;
  }
  return weights.size() - 1;
}

struct LloydResult {
  Eigen::MatrixXd centroids;
  std::vector<int> assignments;
  double inertia = 0.0;
  std::vector<double> history;
};

LloydResult run_restart(const Eigen::MatrixXd& data, int k, Rng rng, int max_iterations) {
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();

  // k-means++ seeding.
  Eigen::MatrixXd centroids(k, d);
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(n);
  for (int c = 0; c < k; ++c) {
    const Eigen::Index pick = weighted_pick(weights, rng);
    centroids.row(c) = data.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dist = (data.row(i) - centroids.row(c)).squaredNorm();
      weights[i] = c == 0 ? dist : std::min(weights[i], dist);
    }
  }

  LloydResult result;
  result.assignments.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> previous(static_cast<std::size_t>(n), -2);

  for (int iter = 0; iter < max_iterations; ++iter) {
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_dist = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double dist = (data.row(i) - centroids.row(c)).squaredNorm();
        if (dist < best_dist) {
          best_dist = dist;
          best = c;
        }
      }
      result.assignments[static_cast<std::size_t>(i)] = best;
      inertia += best_dist;
    }
    result.history.push_back(inertia);
    result.inertia = inertia;
    if (result.assignments == previous) break;
    previous = result.assignments;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = result.assignments[static_cast<std::size_t>(i)];
      sums.row(c) += data.row(i);
      counts[c] += 1.0;
    }
    for (int c = 0; c < k; ++c)
      if (counts[c] > 0.0) centroids.row(c) = sums.row(c) / counts[c];
    // Empty clusters keep their previous centroid.
  }
  result.centroids = std::move(centroids);
  return result;
}

}  // namespace

Clustering kmeans(const Eigen::MatrixXd& data, int k, std::uint64_t seed, int restarts,
                  int max_iterations) {
  if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
  if (data.rows() < k) throw std::invalid_argument("kmeans: fewer rows than clusters");
  if (restarts < 1) throw std::invalid_argument("kmeans: need at least one restart");

  const Rng root(seed);
  LloydResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    LloydResult candidate =
        run_restart(data, k, root.split({0xc105ull, static_cast<std::uint64_t>(r)}),
                    max_iterations);
    if (candidate.inertia < best.inertia) best = std::move(candidate);
  }

  Clustering out;
  out.k = k;
  out.centroids = std::move(best.centroids);
  out.assignments = std::move(best.assignments);
  out.inertia = best.inertia;
  out.inertia_history = std::move(best.history);
  return out;
}

Eigen::MatrixXd centroid_vs_reference(const Clustering& clustering,
                                      const Eigen::RowVectorXd& reference) {
  if (clustering.centroids.cols() != reference.size())
    throw std::invalid_argument("centroid diff: dimension mismatch");
  return clustering.centroids.rowwise() - reference;
}

Eigen::MatrixXd centroid_vs_pb(const Clustering& clustering) {
  const auto defaults = normalized_defaults();
  Eigen::RowVectorXd reference(kActionDim);
  for (int j = 0; j < kActionDim; ++j) reference[j] = defaults[static_cast<std::size_t>(j)];
  return centroid_vs_reference(clustering, reference);
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile: empty sample");
  if (q < 0.0 || q > 100.0) throw std::invalid_argument("percentile: q outside [0,100]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q / 100.0;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

std::vector<std::pair<double, double>> qq_table(const std::vector<double>& a,
                                                const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("qq_table: empty sample");
  std::vector<double> sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  auto at = [](const std::vector<double>& sorted, double q) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q / 100.0;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
  };

  std::vector<std::pair<double, double>> out;
  out.reserve(101);
  for (int q = 0; q <= 100; ++q)
    out.emplace_back(at(sa, static_cast<double>(q)), at(sb, static_cast<double>(q)));
  return out;
}

Eigen::MatrixXd principal_plane_projection(const Eigen::MatrixXd& data) {
  if (data.rows() < 1 || data.cols() < 2)
    throw std::invalid_argument("projection: need at least one row and two columns");
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - mean;
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / std::max<double>(1.0, static_cast<double>(data.rows() - 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  // Eigenvalues ascend; take the last two columns, sign-fixed for stability.
  Eigen::MatrixXd axes(data.cols(), 2);
  for (int j = 0; j < 2; ++j) {
    Eigen::VectorXd axis = solver.eigenvectors().col(data.cols() - 1 - j);
    Eigen::Index peak;
    axis.cwiseAbs().maxCoeff(&peak);
    if (axis[peak] < 0.0) axis = -axis;
    axes.col(j) = axis;
  }
  return centered * axes;
}

}  // namespace las
