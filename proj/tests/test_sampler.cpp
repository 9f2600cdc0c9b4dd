#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "segpost/decode.hpp"
#include "segpost/engine.hpp"
#include "segpost/errors.hpp"
#include "segpost/oracle.hpp"
#include "segpost/sampler.hpp"
#include "support.hpp"

using namespace segpost;

TEST_CASE("unique segmentation is always sampled") {
  const LogDensityTable table(Grid(2, 2, -0.3));
  const auto prior = TransitionPrior::homogeneous(2, 2);
  const auto state = forward_backward(table, prior);
  const auto s = sample_segmentations(state, table, prior, 25, 9);
  REQUIRE(s.size() == 25);
  for (const auto& c : s) CHECK(c.positions() == std::vector<std::size_t>{1});
}

TEST_CASE("zero samples is an error") {
  const LogDensityTable table(Grid(4, 2, 0.0));
  const auto prior = TransitionPrior::homogeneous(2, 4);
  const auto state = forward_backward(table, prior);
  CHECK_THROWS_AS(sample_segmentations(state, table, prior, 0, 1), InputError);
}

TEST_CASE("samples are valid and reproducible") {
  std::mt19937_64 rng(14);
  const auto inst = testing::random_instance(rng, 200, 7, false, true);
  const auto state = forward_backward(inst.table, inst.prior);
  const auto a = sample_segmentations(state, inst.table, inst.prior, 300, 42);
  const auto b = sample_segmentations(state, inst.table, inst.prior, 300, 42);
  const auto c = sample_segmentations(state, inst.table, inst.prior, 300, 43);
  CHECK(a == b);
  CHECK(a != c);
  for (const auto& s : a) {
    const auto& p = s.positions();
    REQUIRE(p.size() == 6);
    for (std::size_t j = 0; j < p.size(); ++j) {
      CHECK(p[j] >= 1);
      CHECK(p[j] <= 199);
      if (j > 0) CHECK(p[j] > p[j - 1]);
    }
  }
  // A prefix of a longer run draws the same samples.
  const auto longer = sample_segmentations(state, inst.table, inst.prior, 500, 42);
  CHECK(std::equal(a.begin(), a.end(), longer.begin()));
}

TEST_CASE("joint frequencies and marginals match the exact posterior") {
  std::mt19937_64 rng(123);
  const std::size_t n = 12, K = 3, m = 50000;
  const auto inst = testing::random_instance(rng, n, K, false, true);
  const auto state = forward_backward(inst.table, inst.prior);
  const auto exact = oracle::enumerate_posterior(inst.table, inst.prior);
  const auto samples = sample_segmentations(state, inst.table, inst.prior, m, 2024);

  std::map<std::vector<std::size_t>, std::size_t> joint;
  Grid marginal(K - 1, n, 0.0);
  for (const auto& s : samples) {
    ++joint[s.positions()];
    for (std::size_t r = 0; r + 1 < K; ++r) marginal(r, s.positions()[r]) += 1.0 / m;
  }

  for (std::size_t a = 1; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const ChangePoints cps({a, b}, n);
      const double p = std::exp(log_joint(inst.table, inst.prior, cps) - exact.log_evidence);
      const double sd = std::sqrt(p * (1 - p) / m);
      const double freq = static_cast<double>(joint[cps.positions()]) / m;
      CHECK(std::abs(freq - p) <= 4 * sd + 1e-12);
    }
  }
  for (std::size_t r = 0; r + 1 < K; ++r) {
    double tv = 0.0;
    for (std::size_t p = 1; p < n; ++p) {
      const double e = exact.changepoint_marginal(r, p);
      CHECK(std::abs(marginal(r, p) - e) <= 4 * std::sqrt(e * (1 - e) / m) + 1e-12);
      tv += 0.5 * std::abs(marginal(r, p) - e);
    }
    CHECK(tv < 0.02);
  }
}

TEST_CASE("forced jumps at the right boundary") {
  // All mass pushes change-points late; the last K-1 rows must still be used.
  Grid g(8, 4, 0.0);
  for (std::size_t i = 0; i < 8; ++i) g(i, 0) = 5.0;
  const LogDensityTable table(g);
  const auto prior = TransitionPrior::homogeneous(4, 8);
  const auto state = forward_backward(table, prior);
  for (const auto& s : sample_segmentations(state, table, prior, 200, 3)) {
    CHECK(s.positions().back() <= 7);
    CHECK(s.segments() == 4);
  }
}

TEST_CASE("gaussian bootstrap obeys the law of large numbers") {
  const auto model = EmissionModel::gaussian_heteroscedastic({{-3.0, 0.5}, {4.0, 2.0}});
  const std::size_t n = 20000;
  const ChangePoints cps({10000}, n);
  const auto seq = parametric_bootstrap(cps, model, n, 77);
  const auto v = seq.values();
  const double m0 = std::accumulate(v.begin(), v.begin() + 10000, 0.0) / 10000;
  const double m1 = std::accumulate(v.begin() + 10000, v.end(), 0.0) / 10000;
  CHECK(std::abs(m0 + 3.0) < 4 * 0.5 / 100);
  CHECK(std::abs(m1 - 4.0) < 4 * 2.0 / 100);
}

TEST_CASE("poisson bootstrap dispersion") {
  const auto model = EmissionModel::poisson({1.0, 6.0});
  const std::size_t n = 10001;
  const ChangePoints cps({10000}, n);
  const auto seq = parametric_bootstrap(cps, model, n, 5);
  CHECK(seq.is_count_data());
  const auto v = seq.values();
  const double mean = std::accumulate(v.begin(), v.begin() + 10000, 0.0) / 10000;
  double var = 0.0;
  for (std::size_t i = 0; i < 10000; ++i) var += (v[i] - mean) * (v[i] - mean);
  var /= 9999;
  CHECK(var / mean >= 0.9);
  CHECK(var / mean <= 1.1);
}

TEST_CASE("bootstrap determinism and unsupported family") {
  const auto model = EmissionModel::gaussian_homoscedastic({0.0, 1.0}, 1.0);
  const ChangePoints cps({50}, 100);
  const auto a = parametric_bootstrap(cps, model, 100, 8);
  const auto b = parametric_bootstrap(cps, model, 100, 8);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));

  const auto external = EmissionModel::external(LogDensityTable(Grid(100, 2, 0.0)));
  CHECK_THROWS_AS(parametric_bootstrap(cps, external, 100, 8), InputError);
  CHECK_THROWS_AS(parametric_bootstrap(ChangePoints({50}, 100), model, 99, 8), InputError);
}
