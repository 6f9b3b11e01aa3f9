#include "doctest.h"

#include <set>

#include "ada/partition.hpp"
#include "oracles.hpp"

using namespace ada;

namespace {

// Optimal 1-D k-means by dynamic programming over sorted points.
double optimal_1d_inertia(std::vector<double> v, std::size_t q) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  std::vector<double> s(n + 1, 0.0), s2(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    s[i + 1] = s[i] + v[i];
    s2[i + 1] = s2[i] + v[i] * v[i];
  }
  auto cost = [&](std::size_t a, std::size_t b) {  // points [a, b)
    const double m = static_cast<double>(b - a);
    const double sum = s[b] - s[a];
    return (s2[b] - s2[a]) - sum * sum / m;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> dp(q + 1, std::vector<double>(n + 1, inf));
  dp[0][0] = 0.0;
  for (std::size_t k = 1; k <= q; ++k)
    for (std::size_t b = k; b <= n; ++b)
      for (std::size_t a = k - 1; a < b; ++a)
        dp[k][b] = std::min(dp[k][b], dp[k - 1][a] + cost(a, b));
  return dp[q][n];
}

// Inertia of an assignment recomputed from scratch.
double inertia_of(const Matrix& x, const AnchorAssignment& a) {
  const Matrix means = oracle::naive_group_mean(a.labels(), x);
  return (x - means).squaredNorm();
}

}  // namespace

TEST_CASE("kmeans separates two duplicated point clouds") {
  Matrix x(10, 2);
  for (Index i = 0; i < 5; ++i) x.row(i) << 0, 0;
  for (Index i = 5; i < 10; ++i) x.row(i) << 10, 10;
  const auto r = kmeans(x, KMeansConfig{.q = 2, .seed = 4});
  CHECK(r.inertia == 0.0);
  for (std::size_t i = 1; i < 5; ++i) CHECK(r.assignment.label(i) == r.assignment.label(0));
  for (std::size_t i = 6; i < 10; ++i) CHECK(r.assignment.label(i) == r.assignment.label(5));
  CHECK(r.assignment.label(0) != r.assignment.label(5));
}

TEST_CASE("kmeans with q = n gives singleton clusters and zero inertia") {
  Rng rng(1);
  const Matrix x = oracle::random_matrix(12, 3, rng);
  const auto r = kmeans(x, KMeansConfig{.q = 12, .seed = 2});
  CHECK(r.inertia == 0.0);
  std::set<std::size_t> used(r.assignment.labels().begin(), r.assignment.labels().end());
  CHECK(used.size() == 12);
}

TEST_CASE("kmeans on 30 uniform points, q=5, matches the exact 1-D optimum") {
  Rng rng(30);
  Matrix x(30, 1);
  std::vector<double> v;
  for (Index i = 0; i < 30; ++i) {
    x(i, 0) = rng.uniform(-3, 3);
    v.push_back(x(i, 0));
  }
  const auto r = kmeans(x, KMeansConfig{.q = 5, .seed = 7});
  const auto sizes = r.assignment.group_sizes();
  for (auto s : sizes) CHECK(s > 0);
  CHECK(r.inertia == doctest::Approx(inertia_of(x, r.assignment)).epsilon(1e-12));
  CHECK(r.inertia == doctest::Approx(optimal_1d_inertia(v, 5)).epsilon(1e-9));
}

TEST_CASE("property: Lloyd inertia never increases; result is a fixed point") {
  Rng rng(99);
  for (int t = 0; t < 25; ++t) {
    const auto n = 20 + rng.uniform_index(150);
    const auto q = 1 + rng.uniform_index(8);
    const Matrix x = oracle::random_matrix(static_cast<Index>(n), 2, rng);
    const KMeansConfig cfg{.q = q, .seed = rng.next_u64(), .n_init = 3};
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto run = kmeans_single(x, cfg, s);
      for (std::size_t k = 1; k < run.inertia_trace.size(); ++k) {
        CHECK(run.inertia_trace[k] <= run.inertia_trace[k - 1] * (1 + 1e-12));
      }
    }
    const auto r = kmeans(x, cfg);
    for (auto s : r.assignment.group_sizes()) CHECK(s > 0);
    // Every point sits at (one of) its nearest centroids.
    for (Index i = 0; i < x.rows(); ++i) {
      const auto own = static_cast<Index>(r.assignment.label(static_cast<std::size_t>(i)));
      const double d_own = (x.row(i) - r.centroids.row(own)).squaredNorm();
      for (Index c = 0; c < r.centroids.rows(); ++c) {
        CHECK(d_own <= (x.row(i) - r.centroids.row(c)).squaredNorm() + 1e-12);
      }
    }
  }
}

TEST_CASE("kmeans is deterministic for a seed") {
  Rng rng(5);
  const Matrix x = oracle::random_matrix(80, 3, rng);
  const KMeansConfig cfg{.q = 6, .seed = 123};
  const auto a = kmeans(x, cfg);
  const auto b = kmeans(x, cfg);
  CHECK(a.assignment.labels() == b.assignment.labels());
  CHECK(a.inertia == b.inertia);
  CHECK(a.centroids == b.centroids);
}

TEST_CASE("kmeans keeps all groups populated with many duplicates") {
  Matrix x(20, 1);
  for (Index i = 0; i < 20; ++i) x(i, 0) = static_cast<double>(i % 4);
  const auto r = kmeans(x, KMeansConfig{.q = 4, .seed = 0});
  for (auto s : r.assignment.group_sizes()) CHECK(s == 5);
  CHECK(r.inertia == 0.0);
}

TEST_CASE("kmeans errors") {
  Matrix x = Matrix::Zero(3, 1);
  CHECK_THROWS_AS(kmeans(x, KMeansConfig{.q = 4}), Error);
  CHECK_THROWS_AS(kmeans(x, KMeansConfig{.q = 0}), Error);
}

TEST_CASE("clustering_features appends the target") {
  Matrix x(2, 1);
  x << 1, 2;
  Vector y(2);
  y << 5, 6;
  const Matrix f = clustering_features(x, y, true);
  CHECK(f.cols() == 2);
  CHECK(f(1, 1) == 6.0);
  CHECK(clustering_features(x, y, false) == x);
}

TEST_CASE("equal_width_bins examples") {
  Vector g(3);
  g << 0, 0.4, 0.9;
  CHECK(equal_width_bins(g, 2, 0, 1).labels() == std::vector<std::size_t>{0, 0, 1});
  CHECK(equal_width_bins(g, 1, 0, 1).labels() == std::vector<std::size_t>{0, 0, 0});

  Rng rng(100);
  Vector u(100);
  for (Index i = 0; i < 100; ++i) u(i) = rng.uniform();
  const auto a = equal_width_bins(u, 10, 0, 1);
  for (Index i = 0; i < 100; ++i) {
    const long expect = std::clamp(static_cast<long>(std::ceil(10 * u(i))) - 1, 0L, 9L);
    CHECK(static_cast<long>(a.label(static_cast<std::size_t>(i))) == expect);
  }
}

TEST_CASE("equal_width_bins rejects out-of-range values, naming the sample") {
  Vector g(3);
  g << 0.1, 1.5, 0.2;
  try {
    equal_width_bins(g, 2, 0, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("sample 1") != std::string::npos);
  }
  CHECK_THROWS_AS(equal_width_bins(g, 2, 1, 1), Error);
}

TEST_CASE("property: equal_width_bins is monotone") {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    Vector g(50);
    for (Index i = 0; i < 50; ++i) g(i) = rng.uniform(-2, 5);
    const auto q = 1 + rng.uniform_index(12);
    const auto a = equal_width_bins(g, q, -2, 5);
    for (Index i = 0; i < 50; ++i)
      for (Index j = 0; j < 50; ++j)
        if (g(i) <= g(j))
          CHECK(a.label(static_cast<std::size_t>(i)) <= a.label(static_cast<std::size_t>(j)));
  }
}

TEST_CASE("equal_size_bins examples") {
  Vector g(4);
  g << 5, 1, 3, 9;
  CHECK(equal_size_bins(g, 2).labels() == std::vector<std::size_t>{1, 0, 0, 1});
  // q = n: labels are the ranks.
  CHECK(equal_size_bins(g, 4).labels() == std::vector<std::size_t>{2, 0, 1, 3});
  // Ties broken by index.
  const auto eq = equal_size_bins(Vector::Zero(7), 3);
  CHECK(eq.labels() == std::vector<std::size_t>{0, 0, 1, 1, 2, 2, 2});
  CHECK_THROWS_AS(equal_size_bins(g, 5), Error);
}

TEST_CASE("property: equal_size_bins group sizes differ by at most one") {
  Rng rng(21);
  for (int t = 0; t < 200; ++t) {
    const auto n = 1 + rng.uniform_index(60);
    const auto q = 1 + rng.uniform_index(n);
    Vector g(static_cast<Index>(n));
    for (Index i = 0; i < g.size(); ++i) g(i) = std::floor(rng.uniform(0, 5));
    const auto sizes = equal_size_bins(g, q).group_sizes();
    const auto [mn, mx] = std::minmax_element(sizes.begin(), sizes.end());
    CHECK(*mx - *mn <= 1);
    CHECK(*mn >= 1);
  }
}
