#include "segpost/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "segpost/errors.hpp"

namespace segpost::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && !std::isnan(out);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  const bool has_delim = line.find_first_of(",\t") != std::string::npos;
  if (has_delim) {
    std::string field;
    for (char c : line) {
      if (c == ',' || c == '\t') {
        fields.push_back(trim(field));
        field.clear();
      } else {
        field += c;
      }
    }
    fields.push_back(trim(field));
  } else {
    std::istringstream ss(line);
    std::string field;
    while (ss >> field) fields.push_back(field);
  }
  return fields;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read file '" + path.string() + "'");
  return in;
}

}  // namespace

ObservationSequence parse_observations(std::istream& in, const std::string& source) {
  std::vector<double> values;
  std::vector<std::string> labels;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    double v = 0.0;
    if (!parse_double(fields[0], v)) {
      if (first) {
        first = false;
        continue;
      }
      throw InputError(source + ":" + std::to_string(line_no) + ": non-numeric value '" + fields[0] + "'");
    }
    first = false;
    values.push_back(v);
    if (fields.size() > 1) labels.push_back(fields[1]);
  }
  if (!labels.empty() && labels.size() != values.size()) {
    throw InputError(source + ": label column is present on only some rows");
  }
  try {
    return ObservationSequence(std::move(values), std::move(labels));
  } catch (const InputError& e) {
    throw InputError(source + ": " + e.what());
  }
}

ObservationSequence read_observations(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_observations(in, path.string());
}

Grid parse_grid(std::istream& in, bool header, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool skip = header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (skip) {
      skip = false;
      continue;
    }
    const auto fields = split_fields(line);
    std::vector<double> row;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0.0;
      if (!parse_double(fields[c], v)) {
        throw InputError(source + ":" + std::to_string(line_no) + ": column " + std::to_string(c + 1) +
                         " is not numeric ('" + fields[c] + "')");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError(source + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(rows.front().size()) + " columns, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(source + ": no numeric rows");
  Grid g(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) g(r, c) = rows[r][c];
  }
  return g;
}

Grid read_grid(const std::filesystem::path& path, bool header) {
  auto in = open(path);
  return parse_grid(in, header, path.string());
}

std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    char* end = nullptr;
    const long long v = std::strtoll(item.c_str(), &end, 10);
    if (end != item.c_str() + item.size() || v < 1) {
      throw InputError("'" + item + "' is not a positive integer index");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    double v = 0.0;
    if (!parse_double(item, v)) throw InputError("'" + item + "' is not a number");
    out.push_back(v);
  }
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double round_significant(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_number(v).c_str(), nullptr);
}

nlohmann::json to_json(const ChangePointReport& report, const EmissionModel& model) {
  using nlohmann::json;
  json out;
  out["n"] = report.length;
  out["K"] = report.segments;
  out["family"] = std::string(to_string(model.family()));
  out["log_evidence"] = round_significant(report.log_evidence);
  if (model.family() != Family::External) {
    json params;
    json locations = json::array();
    for (double m : model.locations()) locations.push_back(round_significant(m));
    params["locations"] = locations;
    if (model.shared_scale()) params["scale"] = round_significant(*model.shared_scale());
    if (model.family() == Family::GaussianHeteroscedastic) {
      json scales = json::array();
      for (const auto& p : model.params()) scales.push_back(round_significant(*p.scale));
      params["scales"] = scales;
    }
    params["degenerate"] = model.degenerate();
    out["model"] = params;
  }
  json cps = json::array();
  for (const auto& s : report.changepoints) {
    json c;
    c["rank"] = s.distribution.rank;
    if (s.reference != 0) {
      c["initial"] = s.reference;
      c["probability_at_initial"] = round_significant(s.reference_probability);
    }
    c["mode"] = s.mode;
    c["mode_probability"] = round_significant(s.mode_probability);
    json intervals = json::array();
    for (const auto& ci : s.intervals) {
      intervals.push_back({{"level", round_significant(ci.level)},
                           {"lower", ci.lower},
                           {"upper", ci.upper},
                           {"achieved", round_significant(ci.achieved)}});
    }
    c["intervals"] = intervals;
    cps.push_back(c);
  }
  out["changepoints"] = cps;
  return out;
}

nlohmann::json to_json(const ViterbiResult& result) {
  return {{"changepoints", result.changepoints.positions()},
          {"log_joint", round_significant(result.log_joint)},
          {"log_posterior", round_significant(result.log_posterior)}};
}

void write_tracks(std::ostream& out, const ChangePointReport& report, const ObservationSequence* data) {
  const bool labels = data != nullptr && data->has_labels();
  const std::size_t K = report.segments;
  out << "position";
  if (labels) out << "\tlabel";
  for (std::size_t k = 1; k <= K; ++k) out << "\tstate_" << k;
  if (!report.posterior_mean.empty()) out << "\tposterior_mean";
  for (std::size_t r = 1; r < K; ++r) out << "\tcp_" << r;
  out << '\n';
  for (std::size_t i = 0; i < report.length; ++i) {
    out << (i + 1);
    if (labels) out << '\t' << data->labels()[i];
    for (std::size_t k = 0; k < K; ++k) out << '\t' << format_number(report.state_posterior(i, k));
    if (!report.posterior_mean.empty()) out << '\t' << format_number(report.posterior_mean[i]);
    for (const auto& s : report.changepoints) out << '\t' << format_number(s.distribution.at(i + 1));
    out << '\n';
  }
}

void write_samples(std::ostream& out, std::span<const ChangePoints> samples) {
  for (const auto& s : samples) {
    const auto& p = s.positions();
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j) out << ',';
      out << p[j];
    }
    out << '\n';
  }
}

void write_scores(std::ostream& out, std::span<const ModelScore> scores) {
  out << "K\tLL\tK_prime\tBIC\tdegenerate\n";
  for (const auto& s : scores) {
    out << s.segments << '\t' << format_number(s.log_likelihood) << '\t' << s.parameters << '\t'
        << format_number(s.bic) << '\t' << (s.degenerate ? 1 : 0) << '\n';
  }
}

}  // namespace segpost::io
