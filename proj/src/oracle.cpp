#include "segpost/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "segpost/errors.hpp"

namespace segpost::oracle {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t j = 1; j <= k; ++j) {
    const std::uint64_t num = n - k + j;
    if (r > std::numeric_limits<std::uint64_t>::max() / num) return std::numeric_limits<std::uint64_t>::max();
    r = r * num / j;
  }
  return r;
}

namespace {

// log P(x | S) + log P(S), written out term by term from the chain definition.
double segmentation_log_weight(const LogDensityTable& table, const TransitionPrior& prior,
                               const std::vector<std::size_t>& cps) {
  const std::size_t n = table.length();
  double w = 0.0;
  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      // cps are 1-based ends: a jump into segment seg+1 happens at 0-based row cps[seg].
      if (seg < cps.size() && cps[seg] == i) {
        w += prior.log_jump(seg, i);
        ++seg;
      } else {
        w += prior.log_stay(seg, i);
      }
    }
    w += table(i, seg);
  }
  return w;
}

bool later_from_back(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::lexicographical_compare(b.rbegin(), b.rend(), a.rbegin(), a.rend());
}

}  // namespace

Enumeration enumerate_posterior(const LogDensityTable& table, const TransitionPrior& prior) {
  const std::size_t n = table.length();
  const std::size_t K = table.segments();
  if (prior.length() != n || prior.segments() != K) throw InputError("oracle inputs have inconsistent dimensions");
  if (K > n) throw InputError("infeasible: K exceeds n");
  const std::uint64_t total = binomial(n - 1, K - 1);
  if (total > kMaxSegmentations) {
    throw InputError("oracle would enumerate " + std::to_string(total) + " segmentations (limit " +
                     std::to_string(kMaxSegmentations) + ")");
  }

  std::vector<std::vector<std::size_t>> all;
  std::vector<double> weights;
  all.reserve(total);
  weights.reserve(total);

  std::vector<std::size_t> cps(K - 1);
  for (std::size_t j = 0; j + 1 < K; ++j) cps[j] = j + 1;
  while (true) {
    all.push_back(cps);
    weights.push_back(segmentation_log_weight(table, prior, cps));
    // Advance to the next combination of K-1 values from {1..n-1}.
    std::size_t j = K - 1;
    while (j > 0 && cps[j - 1] == n - 1 - (K - 1 - j)) --j;
    if (j == 0) break;
    ++cps[j - 1];
    for (std::size_t t = j; t + 1 < K; ++t) cps[t] = cps[t - 1] + 1;
  }

  Enumeration out;
  out.count = all.size();
  const double peak = *std::max_element(weights.begin(), weights.end());
  if (peak == -std::numeric_limits<double>::infinity()) {
    throw DegenerateError("all segmentations have zero probability");
  }
  double mass = 0.0;
  for (double w : weights) mass += std::exp(w - peak);
  out.log_evidence = peak + std::log(mass);

  out.state_posterior = Grid(n, K, 0.0);
  out.changepoint_marginal = Grid(K > 1 ? K - 1 : 0, n, 0.0);
  std::size_t best = 0;
  for (std::size_t s = 0; s < all.size(); ++s) {
    const double p = std::exp(weights[s] - out.log_evidence);
    const auto& c = all[s];
    std::size_t seg = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (seg < c.size() && c[seg] == i) ++seg;
      out.state_posterior(i, seg) += p;
    }
    for (std::size_t r = 0; r < c.size(); ++r) out.changepoint_marginal(r, c[r]) += p;
    if (weights[s] > weights[best] || (weights[s] == weights[best] && later_from_back(c, all[best]))) best = s;
  }
  out.map = ChangePoints(all[best], n);
  out.map_log_joint = weights[best];
  return out;
}

}  // namespace segpost::oracle
