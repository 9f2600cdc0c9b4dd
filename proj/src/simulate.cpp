#include "segpost/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "segpost/engine.hpp"
#include "segpost/errors.hpp"
#include "segpost/model_select.hpp"
#include "segpost/prior.hpp"
#include "segpost/rng.hpp"

namespace segpost {

namespace {

double base_mean(Family family) { return family == Family::Poisson ? 1.0 : 0.0; }

void check_design_family(Family family) {
  if (family != Family::GaussianHomoscedastic && family != Family::Poisson) {
    throw InputError("simulation designs support gaussian-homoscedastic and poisson only");
  }
}

}  // namespace

SimulationDesign standard_design(Family family, double theta1, std::uint64_t seed) {
  check_design_family(family);
  SimulationDesign d;
  d.length = 500;
  d.truth = ChangePoints({22, 65, 108, 219, 252, 435}, d.length);
  d.theta0 = base_mean(family);
  d.theta1 = theta1;
  d.family = family;
  d.seed = seed;
  return d;
}

SimulationDesign large_design(Family family, double theta1, std::uint64_t seed) {
  check_design_family(family);
  SimulationDesign d;
  d.length = 10000;
  d.truth = random_changepoints(d.length, 39, 25, mix64(seed ^ 0x5eedc0deULL));
  d.theta0 = base_mean(family);
  d.theta1 = theta1;
  d.family = family;
  d.seed = seed;
  return d;
}

ChangePoints random_changepoints(std::size_t length, std::size_t count, std::size_t min_segment,
                                 std::uint64_t seed) {
  if ((count + 1) * min_segment > length) {
    throw InputError("cannot place " + std::to_string(count) + " change-points in n=" + std::to_string(length) +
                     " with minimum segment length " + std::to_string(min_segment));
  }
  CounterRng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(1, length - 1);
  std::vector<std::size_t> positions(count);
  for (std::size_t attempt = 0; attempt < 1000000; ++attempt) {
    for (auto& p : positions) p = pick(rng);
    std::sort(positions.begin(), positions.end());
    bool ok = true;
    std::size_t prev = 0;
    for (std::size_t p : positions) {
      if (p - prev < min_segment) ok = false;
      prev = p;
    }
    if (ok && length - prev >= min_segment) return ChangePoints(positions, length);
  }
  throw InputError("rejection sampling of change-points did not converge");
}

SimulatedSequence generate(const SimulationDesign& design) {
  check_design_family(design.family);
  if (design.truth.length() != design.length) throw InputError("design change-points do not match its length");
  if (design.family == Family::Poisson && !(design.theta0 > 0.0 && design.theta1 > 0.0)) {
    throw InputError("poisson design means must be positive");
  }
  CounterRng rng(design.seed);
  std::vector<double> values(design.length);
  std::vector<double> truth(design.length);
  for (std::size_t k = 0; k < design.truth.segments(); ++k) {
    const double mean = k % 2 == 0 ? design.theta0 : design.theta1;
    for (std::size_t i = design.truth.segment_begin(k); i < design.truth.segment_end(k); ++i) {
      truth[i] = mean;
      if (design.family == Family::Poisson) {
        values[i] = static_cast<double>(std::poisson_distribution<long long>(mean)(rng));
      } else {
        values[i] = std::normal_distribution<double>(mean, 1.0)(rng);
      }
    }
  }
  return {ObservationSequence(std::move(values)), std::move(truth)};
}

double loss(std::span<const double> estimate, std::span<const double> truth, LossMetric metric) {
  if (estimate.size() != truth.size() || truth.empty()) {
    throw InputError("loss needs two non-empty tracks of equal length");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = estimate[i] - truth[i];
    acc += metric == LossMetric::MeanSquared ? d * d : std::abs(d);
  }
  return acc / static_cast<double>(truth.size());
}

std::string_view to_string(Pipeline pipeline) {
  return pipeline == Pipeline::GreedyBic ? "greedy+posterior" : "truth+posterior";
}

PipelineOutput run_pipeline(const ObservationSequence& data, Family family, Pipeline pipeline,
                            const ChangePoints& truth, std::size_t max_segments) {
  ChangePoints segmentation;
  EmissionModel model;
  if (pipeline == Pipeline::GreedyBic) {
    auto selection = select_segments(data, std::min(max_segments, data.size()), family);
    segmentation = std::move(selection.changepoints);
    model = std::move(selection.model);
  } else {
    segmentation = truth;
    model = fit_mle(data, truth, family, DegeneracyPolicy::Floor);
  }
  const std::size_t K = segmentation.segments();
  PipelineOutput out;
  out.segments = K;
  if (K == 1) {
    out.posterior_mean.assign(data.size(), model.params()[0].location);
    return out;
  }
  const auto table = log_density_table(data, model);
  const auto prior = TransitionPrior::homogeneous(K, data.size());
  const auto state = forward_backward(table, prior);
  out.posterior_mean = posterior_mean_track(state, model);
  return out;
}

LossReport run_replicates(DesignSize size, Family family, double theta1, Pipeline pipeline, std::size_t count,
                          std::uint64_t seed, std::size_t max_segments) {
  LossReport report;
  report.replicates = count;
  std::size_t correct = 0;
  for (std::size_t r = 0; r < count; ++r) {
    const std::uint64_t rep_seed = mix64(seed ^ mix64(r + 1));
    const auto design = size == DesignSize::Standard ? standard_design(family, theta1, rep_seed)
                                                     : large_design(family, theta1, rep_seed);
    const auto sim = generate(design);
    const auto out = run_pipeline(sim.data, family, pipeline, design.truth, max_segments);
    report.mse += loss(out.posterior_mean, sim.truth, LossMetric::MeanSquared);
    report.mae += loss(out.posterior_mean, sim.truth, LossMetric::MeanAbsolute);
    report.mean_selected_segments += static_cast<double>(out.segments);
    if (out.segments == design.truth.segments()) ++correct;
  }
  if (count > 0) {
    const double c = static_cast<double>(count);
    report.mse /= c;
    report.mae /= c;
    report.mean_selected_segments /= c;
    report.correct_segments_fraction = static_cast<double>(correct) / c;
  }
  return report;
}

}  // namespace segpost
