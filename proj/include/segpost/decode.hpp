#pragma once

#include <cstdint>

#include "segpost/emissions.hpp"
#include "segpost/grid.hpp"
#include "segpost/prior.hpp"
#include "segpost/types.hpp"

namespace segpost {

struct ViterbiResult {
  ChangePoints changepoints;
  double log_joint = 0.0;      // log max_S P(x, S)
  double log_posterior = 0.0;  // log P(S_map | x, S in M_K)
};

// MAP K-segmentation. Exact ties resolve to the segmentation whose
// change-points are latest, compared from the last one backwards.
ViterbiResult viterbi(const LogDensityTable& table, const TransitionPrior& prior);

// Log of the joint P(x, S) for one segmentation under the prior.
double log_joint(const LogDensityTable& table, const TransitionPrior& prior, const ChangePoints& changepoints);

}  // namespace segpost
