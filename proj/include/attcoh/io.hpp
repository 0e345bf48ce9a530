#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "attcoh/ensemble.hpp"

namespace attcoh::io {

// Response CSV: header "participant,B1,...,Bk", one row per participant.
// Questionnaire files hold integers 0..8; raw files hold real charges.
ResponseMatrix parse_responses(const std::filesystem::path& path);
ResponseMatrix parse_responses(std::istream& in, const std::string& space);

ResponseMatrix parse_responses_raw(const std::filesystem::path& path);
ResponseMatrix parse_responses_raw(std::istream& in, const std::string& space);

void write_responses(const ResponseMatrix& matrix, std::ostream& out);
void write_responses(const ResponseMatrix& matrix, const std::filesystem::path& path);

// Scenario JSON:
//   {"spaces":[{"name":..., "layers":[{"J","m","beta","count","sign","g"?}]}],
//    "stimulus_count"?, "seed", "output_mode"?}
// Defaults: g = 2, stimulus_count = 12, output_mode = "questionnaire".
// The seed is mandatory.
ScenarioConfig parse_scenario(const std::filesystem::path& path);
ScenarioConfig parse_scenario(std::istream& in);
ScenarioConfig parse_scenario_text(const std::string& text);

} // namespace attcoh::io
