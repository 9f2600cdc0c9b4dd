#include "segpost/model_select.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "segpost/decode.hpp"
#include "segpost/errors.hpp"
#include "segpost/prior.hpp"

namespace segpost {

namespace {

class PrefixSums {
 public:
  explicit PrefixSums(std::span<const double> x) : sum_(x.size() + 1, 0.0), sq_(x.size() + 1, 0.0) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double c = x[i] - mean;
      sum_[i + 1] = sum_[i] + c;
      sq_[i + 1] = sq_[i] + c * c;
    }
  }

  // Sum of squared deviations on [b, e).
  double sse(std::size_t b, std::size_t e) const {
    const double s = sum_[e] - sum_[b];
    const double v = sq_[e] - sq_[b] - s * s / static_cast<double>(e - b);
    return v > 0.0 ? v : 0.0;
  }

 private:
  std::vector<double> sum_;
  std::vector<double> sq_;
};

struct Piece {
  std::size_t begin;
  std::size_t end;
  std::size_t cut = 0;  // first index of the right half; 0 when unsplittable
  double gain = -1.0;
};

void best_cut(const PrefixSums& ps, Piece& piece) {
  piece.cut = 0;
  piece.gain = -1.0;
  if (piece.end - piece.begin < 2) return;
  const double whole = ps.sse(piece.begin, piece.end);
  double best = 0.0;
  for (std::size_t t = piece.begin + 1; t < piece.end; ++t) {
    const double cost = ps.sse(piece.begin, t) + ps.sse(t, piece.end);
    if (piece.cut == 0 || cost < best) {
      best = cost;
      piece.cut = t;
    }
  }
  piece.gain = whole - best;
}

}  // namespace

ChangePoints greedy_segment(const ObservationSequence& data, std::size_t segments) {
  const std::size_t n = data.size();
  if (segments < 1 || segments > n) {
    throw InputError("infeasible: cannot split n=" + std::to_string(n) + " observations into K=" +
                     std::to_string(segments) + " segments");
  }
  const PrefixSums ps(data.values());
  std::vector<Piece> pieces{{0, n}};
  best_cut(ps, pieces.front());
  while (pieces.size() < segments) {
    auto pick = pieces.end();
    for (auto it = pieces.begin(); it != pieces.end(); ++it) {
      if (it->cut == 0) continue;
      if (pick == pieces.end() || it->gain > pick->gain) pick = it;
    }
    Piece right{pick->cut, pick->end};
    pick->end = pick->cut;
    best_cut(ps, *pick);
    best_cut(ps, right);
    pieces.insert(pick + 1, right);
  }
  std::vector<std::size_t> positions;
  for (std::size_t j = 1; j < pieces.size(); ++j) positions.push_back(pieces[j].begin);
  return ChangePoints(std::move(positions), n);
}

double segmentation_sse(const ObservationSequence& data, const ChangePoints& changepoints) {
  const PrefixSums ps(data.values());
  double total = 0.0;
  for (std::size_t k = 0; k < changepoints.segments(); ++k) {
    total += ps.sse(changepoints.segment_begin(k), changepoints.segment_end(k));
  }
  return total;
}

RefineResult refine(const ObservationSequence& data, const ChangePoints& initial, Family family,
                    DegeneracyPolicy policy) {
  RefineResult result{initial, 0};
  const std::size_t K = initial.segments();
  if (K == 1) return result;
  const auto prior = TransitionPrior::homogeneous(K, data.size());
  while (result.iterations < kMaxRefineIterations) {
    const auto model = fit_mle(data, result.changepoints, family, policy);
    const auto table = log_density_table(data, model);
    ++result.iterations;
    auto decoded = viterbi(table, prior).changepoints;
    if (decoded == result.changepoints) break;
    result.changepoints = std::move(decoded);
  }
  return result;
}

std::size_t parameter_count(Family family, std::size_t segments) {
  switch (family) {
    case Family::GaussianHomoscedastic: return segments + 1;
    case Family::GaussianHeteroscedastic: return 2 * segments;
    case Family::Poisson: return segments;
    case Family::External: break;
  }
  throw InputError("model selection is not defined for external log-density tables");
}

Selection select_segments(const ObservationSequence& data, std::size_t max_segments, Family family) {
  const std::size_t n = data.size();
  if (max_segments < 1 || max_segments > n) {
    throw InputError("maximum K must lie in [1, n=" + std::to_string(n) + "], got " +
                     std::to_string(max_segments));
  }
  parameter_count(family, 1);
  const double log_n = std::log(static_cast<double>(n));

  Selection best;
  for (std::size_t K = 1; K <= max_segments; ++K) {
    const auto initial = greedy_segment(data, K);
    const auto refined = refine(data, initial, family, DegeneracyPolicy::Floor).changepoints;
    auto model = fit_mle(data, refined, family, DegeneracyPolicy::Floor);
    const auto table = log_density_table(data, model);

    ModelScore score;
    score.segments = K;
    score.log_likelihood = log_likelihood(table, refined);
    score.parameters = parameter_count(family, K);
    score.bic = score.log_likelihood - static_cast<double>(score.parameters) * log_n;
    score.degenerate = model.degenerate();
    best.scores.push_back(score);

    if (K == 1 || score.bic > best.scores[best.segments - 1].bic) {
      best.segments = K;
      best.changepoints = refined;
      best.model = std::move(model);
    }
  }
  return best;
}

}  // namespace segpost
