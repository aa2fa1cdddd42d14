#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "las/analysis.hpp"
#include "las/rng.hpp"

using namespace las;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;

namespace {

MatrixXd gaussian_blobs(const MatrixXd& centers, int per_blob, double sigma, Rng& rng,
                        std::vector<int>* labels = nullptr) {
  const Eigen::Index k = centers.rows();
  const Eigen::Index d = centers.cols();
  MatrixXd data(k * per_blob, d);
  for (Eigen::Index c = 0; c < k; ++c)
    for (int i = 0; i < per_blob; ++i) {
      for (Eigen::Index j = 0; j < d; ++j)
        data(c * per_blob + i, j) = centers(c, j) + sigma * rng.normal();
      if (labels) labels->push_back(static_cast<int>(c));
    }
  return data;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  REQUIRE(a.size() == b.size());
  std::map<std::pair<int, int>, long long> table;
  std::map<int, long long> row_sum, col_sum;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}]++;
    row_sum[a[i]]++;
    col_sum[b[i]]++;
  }
  auto choose2 = [](long long n) { return n * (n - 1) / 2.0; };
  double sum_table = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [key, n] : table) sum_table += choose2(n);
  for (const auto& [key, n] : row_sum) sum_rows += choose2(n);
  for (const auto& [key, n] : col_sum) sum_cols += choose2(n);
  const double total = choose2(static_cast<long long>(a.size()));
  const double expected = sum_rows * sum_cols / total;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  return (sum_table - expected) / (max_index - expected);
}

}  // namespace

TEST_CASE("k equal to the row count puts every point in its own cluster") {
  Rng rng(1);
  MatrixXd data(5, 3);
  for (int i = 0; i < data.size(); ++i) data.data()[i] = rng.uniform(-1.0, 1.0);
  const Clustering c = kmeans(data, 5, 7);
  CHECK(c.inertia == 0.0);
  std::vector<int> seen = c.assignments;
  std::sort(seen.begin(), seen.end());
  CHECK(seen == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("two well-separated blobs are recovered to their means") {
  Rng rng(3);
  MatrixXd centers(2, 4);
  centers << 5, 5, 5, 5, -5, -5, -5, -5;
  std::vector<int> truth;
  const MatrixXd data = gaussian_blobs(centers, 50, 0.1, rng, &truth);

  const Clustering c = kmeans(data, 2, 11);

  // Sample means per true blob.
  MatrixXd blob_mean = MatrixXd::Zero(2, 4);
  for (int b = 0; b < 2; ++b) {
    blob_mean.row(b) = data.middleRows(b * 50, 50).colwise().mean();
  }
  // Match clusters to blobs by distance.
  for (int b = 0; b < 2; ++b) {
    double best = 1e18;
    for (int q = 0; q < 2; ++q)
      best = std::min(best, (c.centroids.row(q) - blob_mean.row(b)).norm());
    CHECK(best <= 1e-6);
  }
}

TEST_CASE("interleaved duplication does not change the clustering") {
  Rng rng(5);
  MatrixXd data(40, 6);
  for (int i = 0; i < data.size(); ++i) data.data()[i] = rng.uniform(-1.0, 1.0);

  MatrixXd doubled(80, 6);
  for (int i = 0; i < 40; ++i) {
    doubled.row(2 * i) = data.row(i);
    doubled.row(2 * i + 1) = data.row(i);
  }

  const Clustering a = kmeans(data, 4, 99);
  const Clustering b = kmeans(doubled, 4, 99);
  // Identical up to the rounding of the doubled-length mean sums.
  CHECK((a.centroids - b.centroids).cwiseAbs().maxCoeff() <= 1e-12);
  for (int i = 0; i < 40; ++i) {
    CHECK(b.assignments[static_cast<std::size_t>(2 * i)] == a.assignments[static_cast<std::size_t>(i)]);
    CHECK(b.assignments[static_cast<std::size_t>(2 * i + 1)] == a.assignments[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("same seed same clustering; k larger than rows rejected") {
  Rng rng(7);
  MatrixXd data(30, 5);
  for (int i = 0; i < data.size(); ++i) data.data()[i] = rng.normal();
  const Clustering a = kmeans(data, 3, 42);
  const Clustering b = kmeans(data, 3, 42);
  CHECK(a.assignments == b.assignments);
  CHECK(a.centroids == b.centroids);
  CHECK(a.inertia == b.inertia);
  CHECK_THROWS_AS(kmeans(data, 31, 1), std::invalid_argument);
}

TEST_CASE("lloyd inertia never increases") {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    MatrixXd data(60, 4);
    for (int i = 0; i < data.size(); ++i) data.data()[i] = rng.normal();
    const Clustering c = kmeans(data, 5, rng.next_u64());
    REQUIRE(!c.inertia_history.empty());
    for (std::size_t i = 1; i < c.inertia_history.size(); ++i)
      CHECK(c.inertia_history[i] <= c.inertia_history[i - 1] + 1e-9);
    CHECK(c.inertia == c.inertia_history.back());
  }
}

TEST_CASE("six tight blobs in the action box are recovered almost perfectly") {
  Rng rng(13);
  const double sigma = 0.02;
  MatrixXd centers(6, kActionDim);
  // Corners of the [-1,1] box, at least 10 sigma apart.
  for (int c = 0; c < 6; ++c)
    for (int j = 0; j < kActionDim; ++j)
      centers(c, j) = (((c >> (j % 3)) & 1) ? 0.8 : -0.8) * ((c % 2) ? 1.0 : 0.9);
  std::vector<int> truth;
  const MatrixXd data = gaussian_blobs(centers, 80, sigma, rng, &truth);

  const Clustering c = kmeans(data, 6, 17);
  CHECK(adjusted_rand_index(truth, c.assignments) >= 0.99);
}

TEST_CASE("centroid differences against the defaults") {
  const auto defaults = normalized_defaults();

  SUBCASE("published normalization of the moth ramp default") {
    // t_ru_m: 1.5 on [0,5] -> normalized -0.4.
    CHECK(defaults[0] == doctest::Approx(-0.4).epsilon(1e-12));
    // t_sma: 0.7 sits below its [1,5] action range; clamped to -1.
    CHECK(defaults[10] == -1.0);
  }

  SUBCASE("a centroid equal to the defaults gives a zero row") {
    Clustering c;
    c.k = 1;
    c.centroids.resize(1, kActionDim);
    for (int j = 0; j < kActionDim; ++j) c.centroids(0, j) = defaults[static_cast<std::size_t>(j)];
    const MatrixXd diff = centroid_vs_pb(c);
    CHECK(diff.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("a centroid at normalized zero differs from t_ru_m default by +0.4") {
    Clustering c;
    c.k = 1;
    c.centroids = MatrixXd::Zero(1, kActionDim);
    const MatrixXd diff = centroid_vs_pb(c);
    CHECK(diff(0, 0) == doctest::Approx(0.4).epsilon(1e-12));
  }

  SUBCASE("differences stay within [-2, 2] for any in-box centroids") {
    Rng rng(19);
    Clustering c;
    c.k = 8;
    c.centroids.resize(8, kActionDim);
    for (int i = 0; i < c.centroids.size(); ++i)
      c.centroids.data()[i] = rng.uniform(-1.0, 1.0);
    const MatrixXd diff = centroid_vs_pb(c);
    CHECK(diff.maxCoeff() <= 2.0);
    CHECK(diff.minCoeff() >= -2.0);
  }
}

TEST_CASE("qq tables") {
  SUBCASE("identical samples sit on the identity line") {
    Rng rng(21);
    std::vector<double> a(57);
    for (auto& v : a) v = rng.normal();
    const auto table = qq_table(a, a);
    REQUIRE(table.size() == 101);
    for (const auto& [x, y] : table) CHECK(x == y);
  }

  SUBCASE("adding one shifts the second coordinate exactly") {
    Rng rng(23);
    std::vector<double> a(40), b;
    for (auto& v : a) v = rng.uniform(0.0, 10.0);
    for (double v : a) b.push_back(v + 1.0);
    for (const auto& [x, y] : qq_table(a, b))
      CHECK(y == doctest::Approx(x + 1.0).epsilon(1e-12));
  }

  SUBCASE("1..100 puts the 75th percentile at 75.25") {
    std::vector<double> a(100);
    for (int i = 0; i < 100; ++i) a[static_cast<std::size_t>(i)] = i + 1;
    CHECK(percentile(a, 75.0) == doctest::Approx(75.25).epsilon(1e-12));
    const auto table = qq_table(a, a);
    CHECK(table[75].first == doctest::Approx(75.25).epsilon(1e-12));
  }

  SUBCASE("endpoints are the sample extremes") {
    Rng rng(27);
    std::vector<double> a(33), b(21);
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = rng.normal();
    const auto table = qq_table(a, b);
    CHECK(table.front().first == *std::min_element(a.begin(), a.end()));
    CHECK(table.front().second == *std::min_element(b.begin(), b.end()));
    CHECK(table.back().first == *std::max_element(a.begin(), a.end()));
    CHECK(table.back().second == *std::max_element(b.begin(), b.end()));
  }

  SUBCASE("empty samples are rejected") {
    CHECK_THROWS_AS(qq_table({}, {1.0}), std::invalid_argument);
  }
}

TEST_CASE("principal plane projection keeps the dominant spread") {
  Rng rng(29);
  MatrixXd data(200, kActionDim);
  for (int i = 0; i < 200; ++i) {
    const double t = rng.normal() * 3.0;
    for (int j = 0; j < kActionDim; ++j)
      data(i, j) = t * (j == 0 ? 1.0 : 0.1) + 0.01 * rng.normal();
  }
  const MatrixXd proj = principal_plane_projection(data);
  REQUIRE(proj.rows() == 200);
  REQUIRE(proj.cols() == 2);
  const double var_x = proj.col(0).squaredNorm();
  const double var_y = proj.col(1).squaredNorm();
  CHECK(var_x > var_y);
}
