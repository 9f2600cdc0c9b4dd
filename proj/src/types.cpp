#include "segpost/types.hpp"

#include <cmath>

#include "segpost/errors.hpp"

namespace segpost {

ObservationSequence::ObservationSequence(std::vector<double> values, std::vector<std::string> labels)
    : values_(std::move(values)), labels_(std::move(labels)) {
  if (values_.size() < 2) {
    throw InputError("observation sequence needs at least 2 values, got " +
                     std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InputError("observation " + std::to_string(i + 1) + " is not finite");
    }
  }
  if (!labels_.empty() && labels_.size() != values_.size()) {
    throw InputError("label count " + std::to_string(labels_.size()) +
                     " does not match value count " + std::to_string(values_.size()));
  }
}

bool ObservationSequence::is_count_data() const {
  for (double v : values_) {
    if (v < 0.0 || v != std::floor(v)) return false;
  }
  return true;
}

ChangePoints::ChangePoints(std::vector<std::size_t> positions, std::size_t n)
    : positions_(std::move(positions)), n_(n) {
  if (positions_.size() + 1 > n_) {
    throw InputError(std::to_string(positions_.size() + 1) + " segments cannot fit in " +
                     std::to_string(n_) + " observations");
  }
  std::size_t prev = 0;
  for (std::size_t p : positions_) {
    if (p < 1 || p > n_ - 1) {
      throw InputError("change-point " + std::to_string(p) + " outside [1, " +
                       std::to_string(n_ - 1) + "]");
    }
    if (p <= prev) {
      throw InputError("change-points must be strictly increasing (" + std::to_string(p) +
                       " after " + std::to_string(prev) + ")");
    }
    prev = p;
  }
}

std::vector<std::size_t> ChangePoints::labels() const {
  std::vector<std::size_t> out(n_);
  for (std::size_t k = 0; k < segments(); ++k) {
    for (std::size_t i = segment_begin(k); i < segment_end(k); ++i) out[i] = k;
  }
  return out;
}

}  // namespace segpost
