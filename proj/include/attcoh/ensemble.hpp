#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "attcoh/model.hpp"

namespace attcoh {

enum class OutputMode { raw_charge, questionnaire };

enum class Execution { serial, parallel };

const char* to_string(OutputMode mode);
OutputMode output_mode_from_string(const std::string& s);

// One block of identically parameterized agents sharing a coupling sign.
struct LayerGroup {
    LayerParams params;
    int count = 0;
    int sign = +1;   // -1 or +1
};

struct SpaceSpec {
    std::string name;
    std::vector<LayerGroup> layers;
    int agent_total() const;
};

struct ScenarioConfig {
    std::vector<SpaceSpec> spaces;
    int stimulus_count = 12;
    std::uint64_t seed = 0;
    OutputMode output_mode = OutputMode::questionnaire;
};

void validate_scenario(const ScenarioConfig& config);

// Deterministic roster for one attitude space: agents are laid out group by
// group in configuration order, ids "1".."N".
struct Population {
    std::string space;
    std::uint64_t space_index = 0;
    std::vector<LayerGroup> groups;
    std::vector<int> agent_group;              // per agent, index into groups
    std::vector<std::string> participant_ids;

    std::size_t size() const { return agent_group.size(); }
    int coupling_sign(std::size_t agent) const { return groups[agent_group[agent]].sign; }
    const LayerParams& layer(std::size_t agent) const { return groups[agent_group[agent]].params; }
};

std::vector<Population> build_population(const ScenarioConfig& config);

// participants x stimulus grid of responses. Raw mode holds the signed
// charge g*m*sigma; questionnaire mode the projected 0..8 integer value.
struct ResponseMatrix {
    std::string space;
    OutputMode mode = OutputMode::questionnaire;
    int stimulus_count = 0;
    std::vector<std::string> participants;
    std::vector<double> values;   // row-major, participants x stimulus_count

    std::size_t rows() const { return participants.size(); }
    double at(std::size_t row, int stimulus) const {
        return values[row * static_cast<std::size_t>(stimulus_count) + stimulus - 1];
    }
    double& at(std::size_t row, int stimulus) {
        return values[row * static_cast<std::size_t>(stimulus_count) + stimulus - 1];
    }
};

// round(u) clamped to the 0..8 instrument scale
double questionnaire_project(double u);

// Draw sigma for every (agent, stimulus) cell from the agent's level
// distribution at field sign*B. Draws are keyed by
// (seed, space_index, agent, stimulus), so the same seed reproduces the
// matrix bit for bit under any execution schedule; Execution::serial is the
// reference path, Execution::parallel the OpenMP kernel.
ResponseMatrix sample_responses(const Population& pop, int stimulus_count,
                                std::uint64_t seed, OutputMode mode,
                                Execution exec = Execution::parallel);

// Noiseless counterpart: every agent responds with its layer's expected
// charge (projected in questionnaire mode).
ResponseMatrix expected_responses(const Population& pop, int stimulus_count,
                                  OutputMode mode);

struct TrajectoryStats {
    std::vector<double> mean;
    std::vector<double> variance;   // N-1 denominator; 0 for a single row
};

TrajectoryStats ensemble_mean_trajectory(const ResponseMatrix& matrix);

struct SignGroupTrajectory {
    int sign = +1;
    std::size_t count = 0;
    std::vector<double> mean;   // signed charge per stimulus
    double saturation = 0.0;    // member-average g*J*m
};

struct LayerPlateau {
    int sign = +1;
    double J = 0.0;
    std::size_t count = 0;
    double value = 0.0;   // signed group mean at the final stimulus
};

struct PolarizationSplit {
    std::vector<SignGroupTrajectory> groups;   // at most two, +1 first
    std::vector<LayerPlateau> plateaus;        // one per configured layer group
    bool polarized = false;
};

// Mean signed trajectory per coupling-sign group. The polarized flag is set
// when the two sign groups end on opposite signs and each final mean exceeds
// half its group's saturation in magnitude. Questionnaire values are
// re-signed from the roster before averaging.
PolarizationSplit polarization_split(const ResponseMatrix& matrix, const Population& pop);

} // namespace attcoh
