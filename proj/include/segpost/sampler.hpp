#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "segpost/emissions.hpp"
#include "segpost/engine.hpp"
#include "segpost/prior.hpp"
#include "segpost/types.hpp"

namespace segpost {

// Exact i.i.d. draws from P(S | x, S in M_K). Sample j uses stream j of the
// seed, so results do not depend on how samples are scheduled.
std::vector<ChangePoints> sample_segmentations(const ForwardBackwardState& state, const LogDensityTable& table,
                                               const TransitionPrior& prior, std::size_t count,
                                               std::uint64_t seed);

// New observations drawn segment by segment from the fitted emission laws.
ObservationSequence parametric_bootstrap(const ChangePoints& changepoints, const EmissionModel& model,
                                         std::size_t length, std::uint64_t seed);

}  // namespace segpost
