#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "segpost/decode.hpp"
#include "segpost/emissions.hpp"
#include "segpost/engine.hpp"
#include "segpost/grid.hpp"
#include "segpost/model_select.hpp"
#include "segpost/types.hpp"

namespace segpost::io {

// One value per line in the first comma- or tab-separated column, an optional
// label in the second. A first line whose value does not parse is a header.
ObservationSequence parse_observations(std::istream& in, const std::string& source);
ObservationSequence read_observations(const std::filesystem::path& path);

// Tab- or whitespace-separated numeric table; "-inf" is accepted.
Grid parse_grid(std::istream& in, bool header, const std::string& source);
Grid read_grid(const std::filesystem::path& path, bool header);

// "68,96" -> {68, 96}.
std::vector<std::size_t> parse_index_list(const std::string& text);
std::vector<double> parse_number_list(const std::string& text);

// 12 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string format_number(double v);

// Rounds v to 12 significant digits so JSON output stays reproducible.
double round_significant(double v);

nlohmann::json to_json(const ChangePointReport& report, const EmissionModel& model);
nlohmann::json to_json(const ViterbiResult& result);

// position, [label], state_1..state_K, posterior_mean, cp_1..cp_{K-1}
void write_tracks(std::ostream& out, const ChangePointReport& report, const ObservationSequence* data);

// One row per sample, K-1 comma-separated positions.
void write_samples(std::ostream& out, std::span<const ChangePoints> samples);

void write_scores(std::ostream& out, std::span<const ModelScore> scores);

}  // namespace segpost::io
