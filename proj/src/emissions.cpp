#include "segpost/emissions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "segpost/errors.hpp"

namespace segpost {

namespace {

constexpr double kRelativeScaleFloor = 1e-12;
constexpr double kAbsoluteScaleEpsilon = 1e-150;

double data_range(std::span<const double> values) {
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

double gaussian_log_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * std::log(2.0 * std::numbers::pi) - std::log(sd) - 0.5 * z * z;
}

double poisson_log_pmf(double x, double rate) {
  return x * std::log(rate) - rate - std::lgamma(x + 1.0);
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InputError(std::string(what) + " must be positive and finite, got " + std::to_string(v));
  }
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::GaussianHomoscedastic: return "gaussian-homoscedastic";
    case Family::GaussianHeteroscedastic: return "gaussian-heteroscedastic";
    case Family::Poisson: return "poisson";
    case Family::External: return "external-log-density";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "gaussian-homoscedastic" || name == "gaussian") return Family::GaussianHomoscedastic;
  if (name == "gaussian-heteroscedastic") return Family::GaussianHeteroscedastic;
  if (name == "poisson") return Family::Poisson;
  if (name == "external-log-density" || name == "external") return Family::External;
  throw InputError("unknown emission family '" + std::string(name) + "'");
}

LogDensityTable::LogDensityTable(Grid entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.cols() == 0) {
    throw InputError("log-density table is empty");
  }
  for (std::size_t i = 0; i < entries_.rows(); ++i) {
    for (std::size_t k = 0; k < entries_.cols(); ++k) {
      const double v = entries_(i, k);
      if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
        throw InputError("log-density table entry (" + std::to_string(i + 1) + ", " +
                         std::to_string(k + 1) + ") is NaN or +inf");
      }
    }
  }
}

LogDensityTable LogDensityTable::shifted(double c) const {
  Grid out = entries_;
  for (double& v : out.data()) v += c;
  return LogDensityTable(std::move(out));
}

EmissionModel EmissionModel::gaussian_homoscedastic(std::vector<double> means, double scale,
                                                    bool degenerate) {
  check_positive(scale, "shared scale");
  if (means.empty()) throw InputError("emission model needs at least one segment");
  EmissionModel m;
  m.family_ = Family::GaussianHomoscedastic;
  for (double mu : means) m.params_.push_back({mu, std::nullopt});
  m.shared_scale_ = scale;
  m.degenerate_ = degenerate;
  return m;
}

EmissionModel EmissionModel::gaussian_heteroscedastic(std::vector<SegmentParams> params,
                                                      bool degenerate) {
  if (params.empty()) throw InputError("emission model needs at least one segment");
  for (const auto& p : params) {
    if (!p.scale) throw InputError("heteroscedastic segment is missing its scale");
    check_positive(*p.scale, "segment scale");
  }
  EmissionModel m;
  m.family_ = Family::GaussianHeteroscedastic;
  m.params_ = std::move(params);
  m.degenerate_ = degenerate;
  return m;
}

EmissionModel EmissionModel::poisson(std::vector<double> rates, bool degenerate) {
  if (rates.empty()) throw InputError("emission model needs at least one segment");
  EmissionModel m;
  m.family_ = Family::Poisson;
  for (double r : rates) {
    check_positive(r, "poisson mean");
    m.params_.push_back({r, std::nullopt});
  }
  m.degenerate_ = degenerate;
  return m;
}

EmissionModel EmissionModel::external(LogDensityTable table) {
  EmissionModel m;
  m.family_ = Family::External;
  m.external_ = std::move(table);
  return m;
}

std::size_t EmissionModel::segments() const {
  return family_ == Family::External ? external_->segments() : params_.size();
}

std::vector<double> EmissionModel::locations() const {
  std::vector<double> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.location);
  return out;
}

double EmissionModel::log_density(double x, std::size_t k) const {
  switch (family_) {
    case Family::GaussianHomoscedastic: return gaussian_log_pdf(x, params_[k].location, *shared_scale_);
    case Family::GaussianHeteroscedastic: return gaussian_log_pdf(x, params_[k].location, *params_[k].scale);
    case Family::Poisson: return poisson_log_pmf(x, params_[k].location);
    case Family::External: break;
  }
  throw InputError("external log-density model has no closed-form density");
}

EmissionModel fit_mle(const ObservationSequence& data, const ChangePoints& changepoints, Family family,
                      DegeneracyPolicy policy) {
  if (changepoints.length() != data.size()) {
    throw InputError("segmentation is for n=" + std::to_string(changepoints.length()) +
                     " but data has n=" + std::to_string(data.size()));
  }
  if (family == Family::External) {
    throw InputError("external log-density family has no parameters to fit");
  }
  if (family == Family::Poisson && !data.is_count_data()) {
    throw InputError("poisson family requires non-negative integer observations");
  }

  const auto x = data.values();
  const std::size_t K = changepoints.segments();
  const double range = data_range(x);
  const double threshold = kRelativeScaleFloor * range;
  const double floor_value = threshold + kAbsoluteScaleEpsilon;
  bool floored = false;

  std::vector<double> means(K);
  std::vector<double> sse(K);
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t b = changepoints.segment_begin(k);
    const std::size_t e = changepoints.segment_end(k);
    if (e <= b) throw InputError("segment " + std::to_string(k + 1) + " is empty");
    double sum = 0.0;
    for (std::size_t i = b; i < e; ++i) sum += x[i];
    means[k] = sum / static_cast<double>(e - b);
    double ss = 0.0;
    for (std::size_t i = b; i < e; ++i) ss += (x[i] - means[k]) * (x[i] - means[k]);
    sse[k] = ss;
  }

  auto guard_scale = [&](double scale, const std::string& what) {
    if (scale == 0.0 || scale < threshold) {
      if (policy == DegeneracyPolicy::Throw) {
        throw DegenerateError(what + " is degenerate (" + std::to_string(scale) + ")");
      }
      floored = true;
      return floor_value;
    }
    return scale;
  };

  switch (family) {
    case Family::GaussianHomoscedastic: {
      double total = 0.0;
      for (double s : sse) total += s;
      double scale = std::sqrt(total / static_cast<double>(data.size()));
      scale = guard_scale(scale, "pooled scale");
      return EmissionModel::gaussian_homoscedastic(std::move(means), scale, floored);
    }
    case Family::GaussianHeteroscedastic: {
      std::vector<SegmentParams> params(K);
      for (std::size_t k = 0; k < K; ++k) {
        const std::size_t len = changepoints.segment_end(k) - changepoints.segment_begin(k);
        if (len < 2 && policy == DegeneracyPolicy::Throw) {
          throw DegenerateError("segment " + std::to_string(k + 1) +
                                " has a single observation; its scale is degenerate");
        }
        double scale = std::sqrt(sse[k] / static_cast<double>(len));
        scale = guard_scale(scale, "scale of segment " + std::to_string(k + 1));
        params[k] = {means[k], scale};
      }
      return EmissionModel::gaussian_heteroscedastic(std::move(params), floored);
    }
    case Family::Poisson: {
      for (std::size_t k = 0; k < K; ++k) {
        if (means[k] == 0.0) {
          if (policy == DegeneracyPolicy::Throw) {
            throw DegenerateError("segment " + std::to_string(k + 1) + " has mean 0; poisson rate is degenerate");
          }
          means[k] = floor_value;
          floored = true;
        }
      }
      return EmissionModel::poisson(std::move(means), floored);
    }
    case Family::External: break;
  }
  throw InputError("unsupported family");
}

LogDensityTable log_density_table(const ObservationSequence& data, const EmissionModel& model) {
  const std::size_t n = data.size();
  if (model.family() == Family::External) {
    const auto& table = *model.external_table();
    if (table.length() != n) {
      throw InputError("external log-density table has " + std::to_string(table.length()) +
                       " rows but data has " + std::to_string(n));
    }
    return table;
  }
  if (model.family() == Family::Poisson && !data.is_count_data()) {
    throw InputError("poisson family requires non-negative integer observations");
  }
  const std::size_t K = model.segments();
  Grid out(n, K);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < K; ++k) out(i, k) = model.log_density(data[i], k);
  }
  return LogDensityTable(std::move(out));
}

double log_likelihood(const LogDensityTable& table, const ChangePoints& changepoints) {
  if (table.length() != changepoints.length() || table.segments() != changepoints.segments()) {
    throw InputError("segmentation does not match log-density table dimensions");
  }
  double ll = 0.0;
  for (std::size_t k = 0; k < changepoints.segments(); ++k) {
    for (std::size_t i = changepoints.segment_begin(k); i < changepoints.segment_end(k); ++i) {
      ll += table(i, k);
    }
  }
  return ll;
}

}  // namespace segpost
