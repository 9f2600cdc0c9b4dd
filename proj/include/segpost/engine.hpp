#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "segpost/emissions.hpp"
#include "segpost/grid.hpp"
#include "segpost/prior.hpp"

namespace segpost {

// Forward and backward tables of the constrained chain, kept row-normalised.
//
//   log_forward(i, k)  = log P(x_1..x_i, S_i = k)
//   log_backward(i, k) = log P(x_{i+1}..x_n, S_n = K | S_i = k)
//
// The stored tables use the prior's reduced weights and are shifted so that
// each row of scaled_forward log-sums to 0 (log_scale[i] is the shift of row
// i) and scaled_forward + scaled_backward is the log state posterior. No
// quantity of size O(n) enters a posterior, so long sequences keep full
// relative precision. The accessors undo both adjustments.
// Cells outside the feasible band (k > i or K-1-k > n-1-i, 0-based) hold -inf.
struct ForwardBackwardState {
  Grid scaled_forward;
  Grid scaled_backward;
  std::vector<double> log_scale;
  std::vector<double> log_prefix;  // running sums of log_scale
  double log_evidence = 0.0;
  double omitted_log_stay = 0.0;  // per-step prior weights left out of the tables
  double omitted_log_jump = 0.0;

  std::size_t length() const { return scaled_forward.rows(); }
  std::size_t segments() const { return scaled_forward.cols(); }

  double log_forward(std::size_t i, std::size_t k) const {
    return scaled_forward(i, k) + log_prefix[i] + omitted(i - k, k);
  }
  double log_backward(std::size_t i, std::size_t k) const {
    const std::size_t n = length();
    const std::size_t K = segments();
    return scaled_backward(i, k) + (log_prefix[n - 1] - log_prefix[i]) +
           omitted((n - 1 - i) - (K - 1 - k), K - 1 - k);
  }

 private:
  double omitted(std::size_t stays, std::size_t jumps) const {
    double v = 0.0;
    if (stays) v += static_cast<double>(stays) * omitted_log_stay;
    if (jumps) v += static_cast<double>(jumps) * omitted_log_jump;
    return v;
  }
};

// Lowest and highest feasible 0-based segment at 0-based position i.
inline std::size_t first_feasible_segment(std::size_t i, std::size_t n, std::size_t K) {
  return K + i >= n ? K + i - n : 0;
}
inline std::size_t last_feasible_segment(std::size_t i, std::size_t K) {
  return i < K - 1 ? i : K - 1;
}

// Plain unnormalised log recursions; forward_backward computes the same
// quantities with per-row rescaling.
Grid forward(const LogDensityTable& table, const TransitionPrior& prior);
Grid backward(const LogDensityTable& table, const TransitionPrior& prior);
ForwardBackwardState forward_backward(const LogDensityTable& table, const TransitionPrior& prior);

// log of the summed joint probability over all K-segmentations.
double log_evidence(const ForwardBackwardState& state);

// P(S_i = k | x, S in M_K); n x K, rows sum to 1.
Grid state_posterior(const ForwardBackwardState& state);

// Posterior of the rank-th change-point (1-based rank) over the positions
// where it can occur. Positions are 1-based "last index of segment rank".
struct ChangePointDistribution {
  std::size_t rank = 0;
  std::size_t first = 0;  // position of probs[0]
  std::vector<double> probs;

  std::size_t last() const { return first + probs.size() - 1; }
  // 0 outside the support.
  double at(std::size_t position) const;
  // Highest-mass position; the smallest one wins ties.
  std::size_t mode() const;
};

ChangePointDistribution changepoint_marginal(const ForwardBackwardState& state, const LogDensityTable& table,
                                             const TransitionPrior& prior, std::size_t rank);

// Posterior expectation of the segment location at every position.
std::vector<double> posterior_mean_track(const Grid& state_posterior, std::span<const double> locations);
std::vector<double> posterior_mean_track(const ForwardBackwardState& state, const EmissionModel& model);

struct ConfidenceInterval {
  double level = 0.0;
  std::size_t lower = 0;
  std::size_t upper = 0;
  double achieved = 0.0;
};

// Equal-tailed interval: lower is the first position whose CDF reaches
// (1-level)/2, upper the first whose CDF reaches 1-(1-level)/2.
ConfidenceInterval confidence_interval(const ChangePointDistribution& dist, double level);

struct ChangePointSummary {
  ChangePointDistribution distribution;
  std::size_t mode = 0;
  double mode_probability = 0.0;
  std::size_t reference = 0;  // initial location supplied by the caller, 0 if none
  double reference_probability = 0.0;
  std::vector<ConfidenceInterval> intervals;
};

struct ChangePointReport {
  std::size_t length = 0;
  std::size_t segments = 0;
  double log_evidence = 0.0;
  std::vector<ChangePointSummary> changepoints;
  Grid state_posterior;
  std::vector<double> posterior_mean;  // empty for external log-densities
};

// Runs forward-backward and collects every per-change-point and per-position
// quantity. `reference` may be empty or hold K-1 initial locations.
ChangePointReport build_report(const LogDensityTable& table, const TransitionPrior& prior,
                               const EmissionModel& model, std::span<const double> levels,
                               std::span<const std::size_t> reference = {});

}  // namespace segpost
