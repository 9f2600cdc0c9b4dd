#include "segpost/sampler.hpp"

#include <cmath>
#include <random>
#include <string>

#include "segpost/errors.hpp"
#include "segpost/rng.hpp"

namespace segpost {

std::vector<ChangePoints> sample_segmentations(const ForwardBackwardState& state, const LogDensityTable& table,
                                               const TransitionPrior& prior, std::size_t count,
                                               std::uint64_t seed) {
  if (count == 0) throw InputError("number of samples must be at least 1");
  const std::size_t n = state.length();
  const std::size_t K = state.segments();
  if (table.length() != n || table.segments() != K || prior.length() != n || prior.segments() != K) {
    throw InputError("sampler inputs have inconsistent dimensions");
  }
  const Grid& lb = state.scaled_backward;
  const CounterRng root(seed);

  std::vector<ChangePoints> out;
  out.reserve(count);
  std::vector<std::size_t> positions;
  for (std::size_t s = 0; s < count; ++s) {
    CounterRng rng = root.split(s);
    positions.clear();
    std::size_t k = 0;
    for (std::size_t i = 1; i < n && k + 1 < K; ++i) {
      // Staying would leave fewer positions than remaining segments.
      const bool forced = K - 1 - k > n - 1 - i;
      bool jump = forced;
      if (!forced) {
        const double log_p =
            prior.reduced_log_jump(k, i) + table(i, k + 1) + lb(i, k + 1) - lb(i - 1, k) - state.log_scale[i];
        jump = rng.uniform() < std::exp(log_p);
      }
      if (jump) {
        positions.push_back(i);
        ++k;
      }
    }
    out.emplace_back(positions, n);
  }
  return out;
}

ObservationSequence parametric_bootstrap(const ChangePoints& changepoints, const EmissionModel& model,
                                         std::size_t length, std::uint64_t seed) {
  if (model.family() == Family::External) {
    throw InputError("cannot draw observations from an external log-density table");
  }
  if (changepoints.length() != length || changepoints.segments() != model.segments()) {
    throw InputError("segmentation does not match n=" + std::to_string(length) + ", K=" +
                     std::to_string(model.segments()));
  }
  CounterRng rng(seed);
  std::vector<double> values(length);
  for (std::size_t k = 0; k < changepoints.segments(); ++k) {
    const auto& p = model.params()[k];
    for (std::size_t i = changepoints.segment_begin(k); i < changepoints.segment_end(k); ++i) {
      switch (model.family()) {
        case Family::GaussianHomoscedastic:
          values[i] = std::normal_distribution<double>(p.location, *model.shared_scale())(rng);
          break;
        case Family::GaussianHeteroscedastic:
          values[i] = std::normal_distribution<double>(p.location, *p.scale)(rng);
          break;
        case Family::Poisson:
          values[i] = static_cast<double>(std::poisson_distribution<long long>(p.location)(rng));
          break;
        case Family::External: break;
      }
    }
  }
  return ObservationSequence(std::move(values));
}

}  // namespace segpost
