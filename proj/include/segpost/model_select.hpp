#pragma once

#include <cstddef>
#include <vector>

#include "segpost/emissions.hpp"
#include "segpost/types.hpp"

namespace segpost {

// Top-down binary segmentation under squared error: starting from one
// segment, repeatedly split the segment whose best single cut removes the most
// within-segment sum of squares, until there are K segments.
ChangePoints greedy_segment(const ObservationSequence& data, std::size_t segments);

// Within-segment sum of squared deviations from segment means.
double segmentation_sse(const ObservationSequence& data, const ChangePoints& changepoints);

struct RefineResult {
  ChangePoints changepoints;
  std::size_t iterations = 0;
};

inline constexpr std::size_t kMaxRefineIterations = 20;

// Alternates MLE fitting and Viterbi decoding under the uniform prior until
// the change-point set stops moving, capped at kMaxRefineIterations.
RefineResult refine(const ObservationSequence& data, const ChangePoints& initial, Family family,
                    DegeneracyPolicy policy = DegeneracyPolicy::Throw);

struct ModelScore {
  std::size_t segments = 0;
  double log_likelihood = 0.0;
  std::size_t parameters = 0;
  double bic = 0.0;
  bool degenerate = false;
};

// Free parameters counted by the BIC penalty; change-point locations excluded.
std::size_t parameter_count(Family family, std::size_t segments);

struct Selection {
  std::size_t segments = 0;
  ChangePoints changepoints;
  EmissionModel model;
  std::vector<ModelScore> scores;
};

// For K = 1..max_segments: greedy -> refine -> MLE, scored by
// BIC = LL - K' log n. The largest BIC wins; ties go to the smaller K.
Selection select_segments(const ObservationSequence& data, std::size_t max_segments, Family family);

}  // namespace segpost
