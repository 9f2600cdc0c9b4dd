#pragma once

#include <cstddef>
#include <cstdint>

#include "segpost/emissions.hpp"
#include "segpost/grid.hpp"
#include "segpost/prior.hpp"
#include "segpost/types.hpp"

namespace segpost::oracle {

inline constexpr std::uint64_t kMaxSegmentations = 1000000;

// Exact posterior quantities by summing over every K-segmentation.
struct Enumeration {
  std::uint64_t count = 0;
  double log_evidence = 0.0;
  Grid state_posterior;        // n x K
  Grid changepoint_marginal;   // (K-1) x n; entry (r-1, p) = P(CP_r = p), p 1-based
  ChangePoints map;
  double map_log_joint = 0.0;
};

// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

// Visits segmentations in lexicographic order of their change-point vectors.
// Exact MAP ties resolve to the later change-points, compared from the last
// change-point backwards. Throws InputError above kMaxSegmentations.
Enumeration enumerate_posterior(const LogDensityTable& table, const TransitionPrior& prior);

}  // namespace segpost::oracle
