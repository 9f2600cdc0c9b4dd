#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "segpost/emissions.hpp"
#include "segpost/types.hpp"

namespace segpost {

// Alternating-mean design: odd segments (1st, 3rd, ...) have mean theta0,
// even segments theta1. Gaussian noise has unit scale.
struct SimulationDesign {
  std::size_t length = 0;
  ChangePoints truth;
  double theta0 = 0.0;
  double theta1 = 0.0;
  Family family = Family::GaussianHomoscedastic;
  std::uint64_t seed = 0;
};

// n = 500 with change-points after 22, 65, 108, 219, 252, 435.
// theta0 is 0 for gaussian and 1 for poisson data.
SimulationDesign standard_design(Family family, double theta1, std::uint64_t seed);

// n = 10000 with 39 change-points drawn uniformly, redrawn until no segment
// is shorter than 25 observations.
SimulationDesign large_design(Family family, double theta1, std::uint64_t seed);

// Uniform change-points with a minimum segment length, by rejection.
ChangePoints random_changepoints(std::size_t length, std::size_t count, std::size_t min_segment,
                                 std::uint64_t seed);

struct SimulatedSequence {
  ObservationSequence data;
  std::vector<double> truth;  // true mean at every position
};

SimulatedSequence generate(const SimulationDesign& design);

enum class LossMetric { MeanSquared, MeanAbsolute };

// Per-observation average of squared or absolute error.
double loss(std::span<const double> estimate, std::span<const double> truth, LossMetric metric);

enum class Pipeline {
  GreedyBic,  // greedy least squares + Viterbi refinement + BIC, then posterior means
  Truth,      // MLE at the true segmentation, then posterior means
};

std::string_view to_string(Pipeline pipeline);

struct PipelineOutput {
  std::vector<double> posterior_mean;
  std::size_t segments = 0;
};

// Posterior mean track produced by a pipeline on one sequence.
PipelineOutput run_pipeline(const ObservationSequence& data, Family family, Pipeline pipeline,
                          const ChangePoints& truth, std::size_t max_segments = 20);

struct LossReport {
  double mse = 0.0;
  double mae = 0.0;
  std::size_t replicates = 0;
  double mean_selected_segments = 0.0;  // GreedyBic only
  double correct_segments_fraction = 0.0;  // GreedyBic only
};

enum class DesignSize { Standard, Large };

// Average losses over replicates r = 0..count-1, replicate r seeded from (seed, r).
LossReport run_replicates(DesignSize size, Family family, double theta1, Pipeline pipeline, std::size_t count,
                          std::uint64_t seed, std::size_t max_segments = 20);

}  // namespace segpost
