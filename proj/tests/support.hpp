#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "segpost/emissions.hpp"
#include "segpost/grid.hpp"
#include "segpost/prior.hpp"
#include "segpost/types.hpp"

namespace segpost::testing {

struct Instance {
  ObservationSequence data;
  EmissionModel model;
  LogDensityTable table;
  TransitionPrior prior;
};

inline std::size_t uniform_size(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline Grid random_eta_table(std::mt19937_64& rng, std::size_t K, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  Grid eta(K, n);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t i = 0; i < n; ++i) eta(k, i) = u(rng);
  return eta;
}

// Random gaussian or poisson instance with random segment parameters and
// either a random homogeneous eta or a random tabulated prior.
inline Instance random_instance(std::mt19937_64& rng, std::size_t n, std::size_t K, bool poisson, bool tabulated) {
  std::vector<double> values(n);
  std::vector<double> locations(K);
  if (poisson) {
    std::uniform_real_distribution<double> rate(0.5, 8.0);
    for (auto& r : locations) r = rate(rng);
    for (std::size_t i = 0; i < n; ++i) {
      values[i] = static_cast<double>(std::poisson_distribution<int>(locations[i * K / n])(rng));
    }
  } else {
    std::normal_distribution<double> mean(0.0, 2.0);
    for (auto& m : locations) m = mean(rng);
    for (std::size_t i = 0; i < n; ++i) {
      values[i] = std::normal_distribution<double>(locations[i * K / n], 1.0)(rng);
    }
  }
  ObservationSequence data(values);
  auto model = poisson ? EmissionModel::poisson(locations)
                       : EmissionModel::gaussian_homoscedastic(locations,
                                                               std::uniform_real_distribution<double>(0.5, 2.0)(rng));
  auto table = log_density_table(data, model);
  auto prior = tabulated ? TransitionPrior::tabulated(random_eta_table(rng, K, n))
                         : TransitionPrior::homogeneous(K, n, std::uniform_real_distribution<double>(0.05, 0.95)(rng));
  return {std::move(data), std::move(model), std::move(table), std::move(prior)};
}

}  // namespace segpost::testing
