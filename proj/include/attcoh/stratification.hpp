#pragma once

#include <optional>
#include <span>
#include <vector>

#include "attcoh/ensemble.hpp"
#include "attcoh/fitting.hpp"

namespace attcoh {

struct LayerCensusEntry {
    double J = 0.0;
    std::size_t count = 0;
};

struct LayerAssignment {
    // per participant: assigned J, or NaN when the tail saturates at 0
    std::vector<double> J;
    std::vector<LayerCensusEntry> census;   // J descending
    std::size_t unassigned = 0;

    bool assigned(std::size_t i) const;
};

// Tail-mode stratification of a questionnaire matrix: the saturated response
// s_sat is the mode of the last tail_len responses (ties resolved toward the
// larger value) and the participant joins the layer J = s_sat - 1/2.
// Participants saturating at 0 stay unassigned.
LayerAssignment assign_layers(const ResponseMatrix& matrix, int tail_len = 3);

struct LayerTrajectory {
    double J = 0.0;
    std::size_t count = 0;
    std::vector<std::size_t> members;   // row indices
    FitInput input;                     // column means over members
};

std::vector<LayerTrajectory> layer_mean_trajectories(const ResponseMatrix& matrix,
                                                     const LayerAssignment& assignment,
                                                     double g = kDefaultSplitting);

// First grid point where the mean trajectory reaches J, or nothing.
std::optional<double> coherence_onset(std::span<const double> stimulus,
                                      std::span<const double> mean, double J);

// Closed-form onset: the B solving <U>(B) = J, located by bisection to 1e-6.
// Nothing when the curve cannot reach J below search_limit.
std::optional<double> coherence_onset(const LayerParams& params, double search_limit = 1e6);

// Per-stimulus cross-sectional variance (N-1 denominator). Needs >= 2 rows.
std::vector<double> fluctuation_profile(const ResponseMatrix& matrix);

struct SusceptibilityProfile {
    std::vector<double> chi;                // mean(B)/B, B = 1..stimulus_count
    std::vector<double> differential_chi;   // mean(B) - mean(B-1); mean(1) at B=1
};

SusceptibilityProfile susceptibility_profile(const ResponseMatrix& matrix);

struct PatternCensusEntry {
    std::string code;        // e.g. "7.5/6.5/3.5"
    std::vector<double> J;   // one per space
    std::size_t count = 0;
};

struct PatternCensus {
    std::vector<PatternCensusEntry> patterns;   // sorted by J tuple, descending
    std::size_t skipped = 0;                    // participants unassigned somewhere
};

// Cross-space attitudinal patterns: per participant the tuple of assigned J
// values, counted over the shared roster. Rosters must match exactly.
PatternCensus pattern_census(const std::vector<ResponseMatrix>& spaces,
                             const std::vector<LayerAssignment>& assignments);

} // namespace attcoh
