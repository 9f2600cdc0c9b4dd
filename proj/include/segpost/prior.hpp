#pragma once

#include <cstddef>

#include "segpost/grid.hpp"

namespace segpost {

// Prior over segmentations given by a left-to-right chain that, between
// positions i-1 and i, leaves segment k for k+1 with probability eta_k(i).
//
// Indices are 0-based: segment k in [0, K), position i in [1, n). The
// probability is source-indexed, so eta(k, i) governs leaving segment k.
// Position 0 is never consulted since the chain starts in segment 0.
class TransitionPrior {
 public:
  // Uniform prior on K-segmentations. Requires 1 <= K <= n and 0 < eta < 1.
  static TransitionPrior homogeneous(std::size_t segments, std::size_t length, double eta = 0.5);

  // `eta` is K rows by n columns; entries in [0, 1). Column 0 is ignored.
  static TransitionPrior tabulated(const Grid& eta);

  std::size_t segments() const { return segments_; }
  std::size_t length() const { return length_; }
  bool is_homogeneous() const { return homogeneous_; }
  double homogeneous_eta() const { return eta_; }

  double log_stay(std::size_t k, std::size_t i) const {
    return homogeneous_ ? log_stay_const_ : log_stay_(i, k);
  }
  double log_jump(std::size_t k, std::size_t i) const {
    return homogeneous_ ? log_jump_const_ : log_jump_(i, k);
  }

  // Weights used by the recursions. A homogeneous prior gives every
  // K-segmentation the same mass, so its constant factors are left out
  // (weight 0) and restored through omitted_log_stay/jump. Posteriors then do
  // not depend on eta even in floating point.
  double reduced_log_stay(std::size_t k, std::size_t i) const { return homogeneous_ ? 0.0 : log_stay_(i, k); }
  double reduced_log_jump(std::size_t k, std::size_t i) const { return homogeneous_ ? 0.0 : log_jump_(i, k); }
  double omitted_log_stay() const { return homogeneous_ ? log_stay_const_ : 0.0; }
  double omitted_log_jump() const { return homogeneous_ ? log_jump_const_ : 0.0; }

  // Bounds-checked variants; throw InputError when (k, i) is out of range.
  double checked_log_stay(std::size_t k, std::size_t i) const;
  double checked_log_jump(std::size_t k, std::size_t i) const;

 private:
  TransitionPrior() = default;
  void check_index(std::size_t k, std::size_t i) const;

  std::size_t segments_ = 0;
  std::size_t length_ = 0;
  bool homogeneous_ = true;
  double eta_ = 0.5;
  double log_stay_const_ = 0.0;
  double log_jump_const_ = 0.0;
  // n x K, transposed from the K x n input for row-wise access in the recursions.
  Grid log_stay_;
  Grid log_jump_;
};

}  // namespace segpost
