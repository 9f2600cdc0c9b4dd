#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "segpost/grid.hpp"
#include "segpost/types.hpp"

namespace segpost {

enum class Family {
  GaussianHomoscedastic,
  GaussianHeteroscedastic,
  Poisson,
  External,
};

std::string_view to_string(Family family);
// Accepts "gaussian-homoscedastic", "gaussian-heteroscedastic", "poisson", "external-log-density".
Family parse_family(std::string_view name);

struct SegmentParams {
  double location = 0.0;
  std::optional<double> scale;  // heteroscedastic only
};

// n x K table of log g_k(x_i). -inf is allowed, NaN and +inf are not.
class LogDensityTable {
 public:
  LogDensityTable() = default;
  explicit LogDensityTable(Grid entries);

  std::size_t length() const { return entries_.rows(); }
  std::size_t segments() const { return entries_.cols(); }
  double operator()(std::size_t i, std::size_t k) const { return entries_(i, k); }
  const Grid& grid() const { return entries_; }

  // Same table with every entry shifted by c.
  LogDensityTable shifted(double c) const;

 private:
  Grid entries_;
};

class EmissionModel {
 public:
  // `degenerate` marks a model whose scale or rate was floored during fitting.
  static EmissionModel gaussian_homoscedastic(std::vector<double> means, double scale,
                                              bool degenerate = false);
  static EmissionModel gaussian_heteroscedastic(std::vector<SegmentParams> params,
                                                bool degenerate = false);
  static EmissionModel poisson(std::vector<double> rates, bool degenerate = false);
  static EmissionModel external(LogDensityTable table);

  Family family() const { return family_; }
  std::size_t segments() const;
  const std::vector<SegmentParams>& params() const { return params_; }
  std::vector<double> locations() const;
  std::optional<double> shared_scale() const { return shared_scale_; }
  const std::optional<LogDensityTable>& external_table() const { return external_; }

  // Set when fitting floored a degenerate scale or rate instead of failing.
  bool degenerate() const { return degenerate_; }

  // log g_k(x) for the parametric families.
  double log_density(double x, std::size_t k) const;

 private:
  Family family_ = Family::GaussianHomoscedastic;
  std::vector<SegmentParams> params_;
  std::optional<double> shared_scale_;
  std::optional<LogDensityTable> external_;
  bool degenerate_ = false;
};

enum class DegeneracyPolicy {
  Throw,  // zero scale or rate raises DegenerateError
  Floor,  // floor at 1e-12 * data range (+ tiny epsilon) and flag the model
};

// Maximum-likelihood segment parameters for a fixed segmentation.
// Homoscedastic scale pools within-segment squared deviations over n.
EmissionModel fit_mle(const ObservationSequence& data, const ChangePoints& changepoints, Family family,
                      DegeneracyPolicy policy = DegeneracyPolicy::Throw);

LogDensityTable log_density_table(const ObservationSequence& data, const EmissionModel& model);

// Sum of table entries along the segmentation.
double log_likelihood(const LogDensityTable& table, const ChangePoints& changepoints);

}  // namespace segpost
