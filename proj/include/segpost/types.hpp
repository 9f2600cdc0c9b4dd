#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace segpost {

// Ordered observations x_1..x_n with optional position labels.
class ObservationSequence {
 public:
  ObservationSequence() = default;
  // Throws InputError when n < 2, a value is not finite, or labels do not match in length.
  explicit ObservationSequence(std::vector<double> values, std::vector<std::string> labels = {});

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  bool has_labels() const { return !labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }

  // True when every value is a non-negative integer.
  bool is_count_data() const;

 private:
  std::vector<double> values_;
  std::vector<std::string> labels_;
};

// Change-point locations as 1-based "last index of segment k", strictly
// increasing in [1, n-1]. K-1 entries describe K non-empty segments.
class ChangePoints {
 public:
  ChangePoints() = default;
  // Throws InputError unless positions are strictly increasing within [1, n-1].
  ChangePoints(std::vector<std::size_t> positions, std::size_t n);

  std::size_t length() const { return n_; }
  std::size_t segments() const { return positions_.size() + 1; }
  const std::vector<std::size_t>& positions() const { return positions_; }

  // Half-open 0-based observation range of segment k (0-based).
  std::size_t segment_begin(std::size_t k) const { return k == 0 ? 0 : positions_[k - 1]; }
  std::size_t segment_end(std::size_t k) const {
    return k + 1 == segments() ? n_ : positions_[k];
  }

  // 0-based segment index of every observation.
  std::vector<std::size_t> labels() const;

  bool operator==(const ChangePoints&) const = default;

 private:
  std::vector<std::size_t> positions_;
  std::size_t n_ = 0;
};

}  // namespace segpost
