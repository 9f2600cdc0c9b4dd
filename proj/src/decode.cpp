#include "segpost/decode.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "segpost/engine.hpp"
#include "segpost/errors.hpp"

namespace segpost {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

ViterbiResult viterbi(const LogDensityTable& table, const TransitionPrior& prior) {
  if (table.length() != prior.length() || table.segments() != prior.segments()) {
    throw InputError("log-density table does not match prior dimensions");
  }
  const std::size_t n = table.length();
  const std::size_t K = table.segments();
  const auto state = forward_backward(table, prior);
  const auto& c = state.log_scale;

  // Shifting row i by log_scale[i] leaves the argmax alone and makes the final
  // cell the log posterior of the path instead of a large joint value.
  Grid v(n, K, kNegInf);
  std::vector<std::uint8_t> jumped(n * K, 0);
  v(0, 0) = table(0, 0) - c[0];
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t lo = first_feasible_segment(i, n, K);
    const std::size_t hi = last_feasible_segment(i, K);
    for (std::size_t k = lo; k <= hi; ++k) {
      const double stay = v(i - 1, k) + prior.reduced_log_stay(k, i);
      const double jump = k > 0 ? v(i - 1, k - 1) + prior.reduced_log_jump(k - 1, i) : kNegInf;
      // Ties go to the jump: traced back from the end, this keeps every
      // change-point as late as the optimum allows.
      if (jump >= stay && jump > kNegInf) {
        v(i, k) = jump + (table(i, k) - c[i]);
        jumped[i * K + k] = 1;
      } else {
        v(i, k) = stay + (table(i, k) - c[i]);
      }
    }
  }

  ViterbiResult out;
  out.log_posterior = v(n - 1, K - 1);
  if (out.log_posterior == kNegInf) {
    throw DegenerateError("no K-segmentation has positive probability");
  }
  out.log_joint = out.log_posterior + state.log_evidence;
  std::vector<std::size_t> positions(K - 1);
  std::size_t k = K - 1;
  for (std::size_t i = n - 1; i > 0 && k > 0; --i) {
    if (jumped[i * K + k]) {
      // Row i opens segment k, so segment k-1 ends at 1-based position i.
      positions[k - 1] = i;
      --k;
    }
  }
  out.changepoints = ChangePoints(std::move(positions), n);
  return out;
}

double log_joint(const LogDensityTable& table, const TransitionPrior& prior, const ChangePoints& changepoints) {
  if (changepoints.length() != table.length() || changepoints.segments() != table.segments()) {
    throw InputError("segmentation does not match log-density table dimensions");
  }
  const auto labels = changepoints.labels();
  double acc = table(0, 0);
  for (std::size_t i = 1; i < labels.size(); ++i) {
    const std::size_t k = labels[i];
    acc += (k == labels[i - 1] ? prior.log_stay(k, i) : prior.log_jump(k - 1, i)) + table(i, k);
  }
  return acc;
}

}  // namespace segpost
