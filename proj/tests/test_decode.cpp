#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "segpost/decode.hpp"
#include "segpost/engine.hpp"
#include "segpost/errors.hpp"
#include "segpost/oracle.hpp"
#include "support.hpp"

using namespace segpost;

TEST_CASE("single segment decodes to no change-points") {
  const LogDensityTable table(Grid(6, 1, -1.5));
  const auto r = viterbi(table, TransitionPrior::homogeneous(1, 6));
  CHECK(r.changepoints.positions().empty());
  CHECK(r.log_posterior == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("two points two segments") {
  const LogDensityTable table(Grid(2, 2, -0.5));
  const auto r = viterbi(table, TransitionPrior::homogeneous(2, 2));
  CHECK(r.changepoints.positions() == std::vector<std::size_t>{1});
}

TEST_CASE("frozen toy MAP") {
  const ObservationSequence data({0.3, -0.5, 0.1, 2.2, 1.7, 2.4, 1.9, -1.2, -0.8, -1.5});
  const auto model = EmissionModel::gaussian_homoscedastic({0.0, 2.0, -1.0}, 1.0);
  const auto r = viterbi(log_density_table(data, model), TransitionPrior::homogeneous(3, 10));
  CHECK(r.changepoints.positions() == std::vector<std::size_t>{3, 7});
  CHECK(r.log_posterior == doctest::Approx(-0.2741038721629714).epsilon(1e-10));
}

TEST_CASE("exact ties keep the chain in its segment as long as possible") {
  const LogDensityTable table(Grid(5, 3, 0.0));
  const auto prior = TransitionPrior::homogeneous(3, 5);
  CHECK(viterbi(table, prior).changepoints.positions() == std::vector<std::size_t>{3, 4});
  CHECK(oracle::enumerate_posterior(table, prior).map.positions() == std::vector<std::size_t>{3, 4});
}

TEST_CASE("viterbi equals the enumerated MAP") {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = testing::uniform_size(rng, 2, 15);
    const std::size_t K = testing::uniform_size(rng, 1, std::min<std::size_t>(n, 4));
    const auto inst = testing::random_instance(rng, n, K, rep % 2 == 0, rep % 3 == 0);
    const auto exact = oracle::enumerate_posterior(inst.table, inst.prior);
    const auto r = viterbi(inst.table, inst.prior);
    CHECK(r.changepoints == exact.map);
    CHECK(r.log_joint == doctest::Approx(exact.map_log_joint).epsilon(1e-12));
    CHECK(r.log_posterior == doctest::Approx(exact.map_log_joint - exact.log_evidence).epsilon(1e-10));
    CHECK(log_joint(inst.table, inst.prior, r.changepoints) == doctest::Approx(r.log_joint).epsilon(1e-12));
  }
}

TEST_CASE("MAP never scores below the segmentation used to fit the model") {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = testing::uniform_size(rng, 20, 300);
    const std::size_t K = testing::uniform_size(rng, 2, 6);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::normal_distribution<double>(static_cast<double>(i * K / n), 1.0)(rng);
    const ObservationSequence data(x);
    std::vector<std::size_t> pos;
    for (std::size_t k = 1; k < K; ++k) pos.push_back(k * n / K + 1);
    const ChangePoints init(pos, n);
    const auto model = fit_mle(data, init, Family::GaussianHomoscedastic);
    const auto table = log_density_table(data, model);
    const auto prior = TransitionPrior::homogeneous(K, n);
    const auto r = viterbi(table, prior);
    CHECK(r.log_joint >= log_joint(table, prior, init) - 1e-9);
    const auto& p = r.changepoints.positions();
    CHECK(std::is_sorted(p.begin(), p.end()));
    CHECK(std::adjacent_find(p.begin(), p.end()) == p.end());
  }
}

TEST_CASE("path maximum never exceeds the path sum") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = testing::uniform_size(rng, 2, 100);
    const std::size_t K = testing::uniform_size(rng, 1, std::min<std::size_t>(n, 5));
    const auto inst = testing::random_instance(rng, n, K, rep % 2 == 0, true);
    const auto r = viterbi(inst.table, inst.prior);
    CHECK(r.log_posterior <= 1e-9);
  }
}

TEST_CASE("log_joint validates its inputs") {
  const LogDensityTable table(Grid(5, 2, 0.0));
  const auto prior = TransitionPrior::homogeneous(2, 5);
  CHECK_THROWS_AS(log_joint(table, prior, ChangePoints({1, 2}, 5)), InputError);
  CHECK_THROWS_AS(log_joint(table, prior, ChangePoints({2}, 6)), InputError);
}
