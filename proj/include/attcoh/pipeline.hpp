#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "attcoh/ensemble.hpp"
#include "attcoh/fitting.hpp"
#include "attcoh/multivariate.hpp"
#include "attcoh/stratification.hpp"

namespace attcoh {

inline constexpr const char* kToolName = "attcoh";
inline constexpr const char* kToolVersion = "0.1.0";

// Stimulus grid used for the noiseless reference census; long enough for
// every packaged layer's projected trajectory to reach its plateau.
inline constexpr int kExpectedCensusGrid = 30;

struct LayerReport {
    double J = 0.0;
    std::size_t count = 0;
    std::vector<double> mean;                  // data trajectory, B = 1..stimulus_count
    std::optional<FitResult> fit;
    std::string fit_skip_reason;               // set when fit is absent
    std::optional<ResidualDiagnostic> residual_diag;
    std::optional<double> onset_data;
    std::optional<double> onset_curve;         // from the fitted parameters
};

struct SpaceReport {
    std::string name;
    std::size_t participants = 0;
    std::vector<LayerCensusEntry> census;            // data-based
    std::size_t unassigned = 0;
    std::vector<LayerCensusEntry> census_expected;   // noiseless reference (simulated runs)
    std::vector<LayerReport> layers;
    std::vector<double> profile_mean;
    std::vector<double> profile_variance;            // empty when N < 2
    std::vector<double> profile_chi;
    std::vector<double> profile_differential_chi;
    std::vector<double> histogram_edges;
    std::vector<std::vector<std::size_t>> histograms;   // per stimulus
};

struct CorrelationReport {
    std::vector<std::string> names;
    Matrix correlation;
    Matrix r2;
};

struct AnalysisReport {
    std::string config_hash;
    std::optional<std::uint64_t> seed;   // absent for file-based analyses
    int stimulus_count = 0;
    OutputMode output_mode = OutputMode::questionnaire;
    int tail_len = 3;
    std::vector<SpaceReport> spaces;
    std::optional<PatternCensus> patterns;
    std::optional<CorrelationReport> correlation;
    std::optional<PcaResult> pca_result;
    std::string multivariate_skip_reason;   // set when correlation/pca absent
};

// Simulate the scenario and run the full analysis chain: stratify, fit each
// layer, onsets, profiles, histograms, pattern census, correlation table and
// PCA. Identical config and seed give a byte-identical report.
AnalysisReport run_pipeline(const ScenarioConfig& config, int tail_len = 3);

// The same analysis on already collected questionnaire matrices.
AnalysisReport run_pipeline(const std::vector<ResponseMatrix>& matrices, int tail_len = 3);

nlohmann::ordered_json report_to_json(const AnalysisReport& report);
std::string report_to_string(const AnalysisReport& report);

// Tab-separated tables backing the standard figures: per-space layer curves,
// response histograms and susceptibility/fluctuation profiles. One file per
// figure analog. Rejects reports without spaces.
void emit_plot_tables(const nlohmann::json& report, const std::filesystem::path& out_dir);

// The bundled three-space study scenario (opinion, emotion, action) with the
// published layer parameters and sizes.
ScenarioConfig packaged_scenario(std::uint64_t seed);

std::string config_hash(const ScenarioConfig& config);

} // namespace attcoh
