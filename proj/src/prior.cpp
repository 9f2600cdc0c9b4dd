#include "segpost/prior.hpp"

#include <cmath>
#include <string>

#include "segpost/errors.hpp"

namespace segpost {

TransitionPrior TransitionPrior::homogeneous(std::size_t segments, std::size_t length, double eta) {
  if (segments < 1) throw InputError("number of segments must be at least 1");
  if (segments > length) {
    throw InputError("infeasible: K=" + std::to_string(segments) + " segments exceed n=" +
                     std::to_string(length) + " observations");
  }
  if (!(eta > 0.0 && eta < 1.0)) {
    throw InputError("eta must lie in (0, 1), got " + std::to_string(eta));
  }
  TransitionPrior p;
  p.segments_ = segments;
  p.length_ = length;
  p.homogeneous_ = true;
  p.eta_ = eta;
  p.log_stay_const_ = std::log1p(-eta);
  p.log_jump_const_ = std::log(eta);
  return p;
}

TransitionPrior TransitionPrior::tabulated(const Grid& eta) {
  const std::size_t K = eta.rows();
  const std::size_t n = eta.cols();
  if (K < 1) throw InputError("tabulated prior has no rows");
  if (K > n) {
    throw InputError("infeasible: tabulated prior has K=" + std::to_string(K) + " rows but only n=" +
                     std::to_string(n) + " columns");
  }
  TransitionPrior p;
  p.segments_ = K;
  p.length_ = n;
  p.homogeneous_ = false;
  p.log_stay_ = Grid(n, K);
  p.log_jump_ = Grid(n, K);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = eta(k, i);
      if (!(v >= 0.0 && v < 1.0)) {
        throw InputError("tabulated jump probability at row " + std::to_string(k + 1) + ", column " +
                         std::to_string(i + 1) + " must lie in [0, 1), got " + std::to_string(v));
      }
      p.log_stay_(i, k) = std::log1p(-v);
      p.log_jump_(i, k) = std::log(v);
    }
  }
  return p;
}

void TransitionPrior::check_index(std::size_t k, std::size_t i) const {
  if (k >= segments_ || i < 1 || i >= length_) {
    throw InputError("prior index out of range: segment " + std::to_string(k) + ", position " +
                     std::to_string(i));
  }
}

double TransitionPrior::checked_log_stay(std::size_t k, std::size_t i) const {
  check_index(k, i);
  return log_stay(k, i);
}

double TransitionPrior::checked_log_jump(std::size_t k, std::size_t i) const {
  check_index(k, i);
  return log_jump(k, i);
}

}  // namespace segpost
