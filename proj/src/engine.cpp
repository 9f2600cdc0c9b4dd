#include "segpost/engine.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "segpost/errors.hpp"

namespace segpost {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (a == kNegInf) return kNegInf;
  // Below e^-50 the correction is under 2e-22; skipping it also keeps exp
  // away from its slow subnormal range.
  if (b - a < -50.0) return a;
  return a + std::log1p(std::exp(b - a));
}

void check_dimensions(const LogDensityTable& table, const TransitionPrior& prior) {
  if (table.length() != prior.length() || table.segments() != prior.segments()) {
    throw InputError("log-density table is " + std::to_string(table.length()) + "x" +
                     std::to_string(table.segments()) + " but prior is for n=" +
                     std::to_string(prior.length()) + ", K=" + std::to_string(prior.segments()));
  }
  if (prior.segments() > prior.length()) {
    throw InputError("infeasible: K exceeds n");
  }
}

}  // namespace

Grid forward(const LogDensityTable& table, const TransitionPrior& prior) {
  check_dimensions(table, prior);
  const std::size_t n = table.length();
  const std::size_t K = table.segments();
  Grid f(n, K, kNegInf);
  f(0, 0) = table(0, 0);
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t lo = first_feasible_segment(i, n, K);
    const std::size_t hi = last_feasible_segment(i, K);
    for (std::size_t k = lo; k <= hi; ++k) {
      const double stay = f(i - 1, k) + prior.log_stay(k, i);
      const double jump = k > 0 ? f(i - 1, k - 1) + prior.log_jump(k - 1, i) : kNegInf;
      f(i, k) = log_add(stay, jump) + table(i, k);
    }
  }
  return f;
}

Grid backward(const LogDensityTable& table, const TransitionPrior& prior) {
  check_dimensions(table, prior);
  const std::size_t n = table.length();
  const std::size_t K = table.segments();
  Grid b(n, K, kNegInf);
  b(n - 1, K - 1) = 0.0;
  for (std::size_t i = n - 1; i-- > 0;) {
    const std::size_t lo = first_feasible_segment(i, n, K);
    const std::size_t hi = last_feasible_segment(i, K);
    for (std::size_t k = lo; k <= hi; ++k) {
      const double stay = prior.log_stay(k, i + 1) + table(i + 1, k) + b(i + 1, k);
      const double jump =
          k + 1 < K ? prior.log_jump(k, i + 1) + table(i + 1, k + 1) + b(i + 1, k + 1) : kNegInf;
      b(i, k) = log_add(stay, jump);
    }
  }
  return b;
}

ForwardBackwardState forward_backward(const LogDensityTable& table, const TransitionPrior& prior) {
  check_dimensions(table, prior);
  const std::size_t n = table.length();
  const std::size_t K = table.segments();
  ForwardBackwardState state;
  state.scaled_forward = Grid(n, K, kNegInf);
  state.scaled_backward = Grid(n, K, kNegInf);
  state.log_scale.assign(n, 0.0);
  state.log_prefix.assign(n, 0.0);
  Grid& f = state.scaled_forward;
  Grid& b = state.scaled_backward;
  auto& c = state.log_scale;

  const auto impossible = [] {
    return DegenerateError("evidence is zero: no K-segmentation has positive probability");
  };
  f(0, 0) = 0.0;
  c[0] = table(0, 0);
  if (c[0] == kNegInf) throw impossible();
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t lo = first_feasible_segment(i, n, K);
    const std::size_t hi = last_feasible_segment(i, K);
    double total = kNegInf;
    for (std::size_t k = lo; k <= hi; ++k) {
      const double stay = f(i - 1, k) + prior.reduced_log_stay(k, i);
      const double jump = k > 0 ? f(i - 1, k - 1) + prior.reduced_log_jump(k - 1, i) : kNegInf;
      f(i, k) = log_add(stay, jump) + table(i, k);
      total = log_add(total, f(i, k));
    }
    if (total == kNegInf) throw impossible();
    for (std::size_t k = lo; k <= hi; ++k) f(i, k) -= total;
    c[i] = total;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += c[i];
    state.log_prefix[i] = acc;
  }
  state.omitted_log_stay = prior.omitted_log_stay();
  state.omitted_log_jump = prior.omitted_log_jump();
  state.log_evidence = acc + static_cast<double>(n - K) * state.omitted_log_stay +
                       static_cast<double>(K - 1) * state.omitted_log_jump;

  b(n - 1, K - 1) = 0.0;
  for (std::size_t i = n - 1; i-- > 0;) {
    const std::size_t lo = first_feasible_segment(i, n, K);
    const std::size_t hi = last_feasible_segment(i, K);
    for (std::size_t k = lo; k <= hi; ++k) {
      const double stay = prior.reduced_log_stay(k, i + 1) + table(i + 1, k) + b(i + 1, k);
      const double jump = k + 1 < K
                              ? prior.reduced_log_jump(k, i + 1) + table(i + 1, k + 1) + b(i + 1, k + 1)
                              : kNegInf;
      b(i, k) = log_add(stay, jump) - c[i + 1];
    }
  }
  return state;
}

double log_evidence(const ForwardBackwardState& state) { return state.log_evidence; }

Grid state_posterior(const ForwardBackwardState& state) {
  const std::size_t n = state.length();
  const std::size_t K = state.segments();
  Grid post(n, K, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = first_feasible_segment(i, n, K);
    const std::size_t hi = last_feasible_segment(i, K);
    for (std::size_t k = lo; k <= hi; ++k) {
      post(i, k) = std::exp(state.scaled_forward(i, k) + state.scaled_backward(i, k));
    }
  }
  return post;
}

double ChangePointDistribution::at(std::size_t position) const {
  if (position < first || position > last()) return 0.0;
  return probs[position - first];
}

std::size_t ChangePointDistribution::mode() const {
  std::size_t best = 0;
  for (std::size_t j = 1; j < probs.size(); ++j) {
    if (probs[j] > probs[best]) best = j;
  }
  return first + best;
}

ChangePointDistribution changepoint_marginal(const ForwardBackwardState& state, const LogDensityTable& table,
                                             const TransitionPrior& prior, std::size_t rank) {
  const std::size_t n = state.length();
  const std::size_t K = state.segments();
  if (rank < 1 || rank >= K) {
    throw InputError("change-point rank " + std::to_string(rank) + " outside [1, " +
                     std::to_string(K - 1) + "]");
  }
  check_dimensions(table, prior);
  // Segment rank-1 (0-based) ends at 1-based position p, i.e. 0-based row p-1,
  // and segment rank starts at row p.
  ChangePointDistribution dist;
  dist.rank = rank;
  dist.first = rank;
  const std::size_t last = n - K + rank;
  dist.probs.resize(last - dist.first + 1, 0.0);
  const std::size_t from = rank - 1;
  for (std::size_t p = dist.first; p <= last; ++p) {
    const double v = state.scaled_forward(p - 1, from) + prior.reduced_log_jump(from, p) + table(p, rank) +
                     state.scaled_backward(p, rank) - state.log_scale[p];
    dist.probs[p - dist.first] = std::exp(v);
  }
  return dist;
}

std::vector<double> posterior_mean_track(const Grid& state_posterior, std::span<const double> locations) {
  if (locations.size() != state_posterior.cols()) {
    throw InputError("posterior has " + std::to_string(state_posterior.cols()) + " segments but " +
                     std::to_string(locations.size()) + " locations were given");
  }
  std::vector<double> track(state_posterior.rows(), 0.0);
  for (std::size_t i = 0; i < track.size(); ++i) {
    const auto row = state_posterior.row(i);
    // Dividing by the row total keeps the result a convex combination even
    // when the row sums to 1 only up to rounding.
    double acc = 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      acc += row[k] * locations[k];
      total += row[k];
    }
    track[i] = acc / total;
  }
  return track;
}

std::vector<double> posterior_mean_track(const ForwardBackwardState& state, const EmissionModel& model) {
  if (model.family() == Family::External) {
    throw InputError("external log-density model has no segment locations");
  }
  const auto locations = model.locations();
  return posterior_mean_track(state_posterior(state), locations);
}

ConfidenceInterval confidence_interval(const ChangePointDistribution& dist, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw InputError("confidence level must lie in (0, 1), got " + std::to_string(level));
  }
  const double tail = (1.0 - level) / 2.0;
  ConfidenceInterval ci;
  ci.level = level;
  ci.lower = dist.last();
  ci.upper = dist.last();
  double cdf = 0.0;
  double below_lower = 0.0;
  bool have_lower = false;
  for (std::size_t j = 0; j < dist.probs.size(); ++j) {
    const double before = cdf;
    cdf += dist.probs[j];
    if (!have_lower && cdf >= tail) {
      ci.lower = dist.first + j;
      below_lower = before;
      have_lower = true;
    }
    if (cdf >= 1.0 - tail) {
      ci.upper = dist.first + j;
      break;
    }
  }
  double upto_upper = 0.0;
  for (std::size_t p = dist.first; p <= ci.upper; ++p) upto_upper += dist.probs[p - dist.first];
  ci.achieved = upto_upper - below_lower;
  return ci;
}

ChangePointReport build_report(const LogDensityTable& table, const TransitionPrior& prior,
                               const EmissionModel& model, std::span<const double> levels,
                               std::span<const std::size_t> reference) {
  const std::size_t K = table.segments();
  if (!reference.empty() && reference.size() + 1 != K) {
    throw InputError("expected " + std::to_string(K - 1) + " reference change-points, got " +
                     std::to_string(reference.size()));
  }
  const auto state = forward_backward(table, prior);
  ChangePointReport report;
  report.length = table.length();
  report.segments = K;
  report.log_evidence = state.log_evidence;
  report.state_posterior = state_posterior(state);
  if (model.family() != Family::External) {
    report.posterior_mean = posterior_mean_track(report.state_posterior, model.locations());
  }
  for (std::size_t rank = 1; rank < K; ++rank) {
    ChangePointSummary s;
    s.distribution = changepoint_marginal(state, table, prior, rank);
    s.mode = s.distribution.mode();
    s.mode_probability = s.distribution.at(s.mode);
    if (!reference.empty()) {
      s.reference = reference[rank - 1];
      s.reference_probability = s.distribution.at(s.reference);
    }
    for (double level : levels) s.intervals.push_back(confidence_interval(s.distribution, level));
    report.changepoints.push_back(std::move(s));
  }
  return report;
}

}  // namespace segpost
