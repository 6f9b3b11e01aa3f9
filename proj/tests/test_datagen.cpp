#include "doctest.h"

#include "ada/datagen.hpp"
#include "ada/linear.hpp"

using namespace ada;

TEST_CASE("gen_cosine grid example") {
  const auto d = gen_cosine({.n = 3, .x_lo = 0.0, .x_hi = M_PI, .angular_freq = 1.0,
                             .noise_sd = 0.0, .grid = true});
  CHECK(d.x(0, 0) == 0.0);
  CHECK(d.x(1, 0) == doctest::Approx(M_PI / 2));
  CHECK(d.x(2, 0) == M_PI);
  CHECK(d.y(0) == 1.0);
  CHECK(std::abs(d.y(1)) < 1e-15);
  CHECK(d.y(2) == -1.0);
}

TEST_CASE("gen_cosine small illustration configuration") {
  const auto d = gen_cosine({.n = 30, .x_lo = -3.0, .x_hi = 3.0, .angular_freq = M_PI,
                             .noise_sd = 0.0, .seed = 30});
  for (Index i = 0; i < 30; ++i) {
    CHECK(std::abs(d.y(i)) <= 1.0);
    CHECK(d.y(i) == std::cos(M_PI * d.x(i, 0)));
    CHECK(d.x(i, 0) >= -3.0);
    CHECK(d.x(i, 0) <= 3.0);
  }
}

TEST_CASE("gen_cosine noise moment") {
  const auto d = gen_cosine({.n = 10000, .noise_sd = 0.1, .seed = 1});
  const Vector e = d.y.array() - d.x.col(0).array().cos();
  const double sd = std::sqrt((e.array() - e.mean()).square().sum() / (e.size() - 1));
  CHECK(sd >= 0.095);
  CHECK(sd <= 0.105);
}

TEST_CASE("gen_cosine determinism and validation") {
  const CosineConfig c{.n = 50, .seed = 9};
  const auto a = gen_cosine(c), b = gen_cosine(c);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK_FALSE(gen_cosine({.n = 50, .seed = 10}).x == a.x);
  CHECK_THROWS_AS(gen_cosine({.n = 5, .x_lo = 1.0, .x_hi = 1.0}), Error);
  CHECK_THROWS_AS(gen_cosine({.n = 5, .noise_sd = -1.0}), Error);
  CHECK_THROWS_AS(gen_cosine({.n = 0}), Error);
}

TEST_CASE("gen_linear_scm noiseless") {
  const auto d = gen_linear_scm({.n = 100, .d = 4, .anchor_shift_strength = 0.0,
                                 .noise_sd = 0.0, .seed = 2});
  CHECK((d.y - d.x * d.true_coef).cwiseAbs().maxCoeff() < 1e-12);
  const auto fit = fit_ols(d.x, d.y);
  CHECK((fit.coef - d.true_coef).cwiseAbs().maxCoeff() < 1e-8);

  const auto one = gen_linear_scm({.n = 20, .d = 1, .noise_sd = 0.0, .seed = 3});
  CHECK((one.y - one.true_coef(0) * one.x.col(0)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("gen_linear_scm held-out error is the noise floor") {
  const LinearScmConfig base{.n = 200, .seed = 4};
  const auto train = gen_linear_scm(base);
  auto test_cfg = base;
  test_cfg.n = 5000;
  const auto test = gen_linear_scm(test_cfg);
  const auto fit = fit_ols(train.x, train.y);
  const double mse = (fit.predict(test.x) - test.y).squaredNorm() / 5000.0;
  CHECK(mse >= 0.8 * base.noise_sd * base.noise_sd);
  CHECK(mse <= 1.2 * base.noise_sd * base.noise_sd);
}

TEST_CASE("gen_linear_scm structure") {
  const LinearScmConfig c{.n = 300, .d = 3, .groups = 4, .anchor_shift_strength = 5.0, .seed = 8};
  const auto a = gen_linear_scm(c), b = gen_linear_scm(c);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK(a.anchor_labels == b.anchor_labels);
  CHECK(a.anchor_labels.size() == 300);
  for (auto l : a.anchor_labels) CHECK(l < 4);

  // Group means sit near shift * unit vectors.
  for (std::size_t r = 0; r < 4; ++r) {
    Eigen::RowVectorXd m = Eigen::RowVectorXd::Zero(3);
    double cnt = 0;
    for (Index i = 0; i < 300; ++i) {
      if (a.anchor_labels[static_cast<std::size_t>(i)] == r) {
        m += a.x.row(i);
        cnt += 1;
      }
    }
    if (cnt >= 30) CHECK(std::abs(m.norm() / cnt - 5.0) < 1.0);
  }
  CHECK_THROWS_AS(gen_linear_scm({.n = 0}), Error);
  CHECK_THROWS_AS(gen_linear_scm({.d = 0}), Error);
}
