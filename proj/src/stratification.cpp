#include "attcoh/stratification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace attcoh {

namespace {

constexpr double kUnassigned = std::numeric_limits<double>::quiet_NaN();

void require_questionnaire(const ResponseMatrix& matrix) {
    if (matrix.mode != OutputMode::questionnaire) {
        throw ValidationError("questionnaire-scale matrix required");
    }
    for (double v : matrix.values) {
        if (!(v >= 0.0 && v <= 8.0) || v != std::round(v)) {
            throw ValidationError("questionnaire matrix holds a non 0..8 integer value");
        }
    }
}

std::string pattern_code(const std::vector<double>& js) {
    std::string code;
    char buf[16];
    for (std::size_t i = 0; i < js.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.1f", js[i]);
        if (i) code += '/';
        code += buf;
    }
    return code;
}

} // namespace

bool LayerAssignment::assigned(std::size_t i) const { return !std::isnan(J[i]); }

LayerAssignment assign_layers(const ResponseMatrix& matrix, int tail_len) {
    require_questionnaire(matrix);
    if (tail_len < 1) throw ValidationError("tail_len must be >= 1");
    if (tail_len > matrix.stimulus_count) {
        throw ValidationError("tail_len exceeds the stimulus count");
    }

    LayerAssignment assignment;
    assignment.J.resize(matrix.rows(), kUnassigned);
    std::map<double, std::size_t, std::greater<double>> census;

    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        int counts[9] = {0};
        for (int b = matrix.stimulus_count - tail_len + 1; b <= matrix.stimulus_count; ++b) {
            counts[static_cast<int>(matrix.at(i, b))]++;
        }
        int s_sat = 0;
        int best = 0;
        for (int v = 0; v <= 8; ++v) {
            if (counts[v] >= best && counts[v] > 0) {   // >= resolves ties upward
                best = counts[v];
                s_sat = v;
            }
        }
        if (s_sat == 0) {
            ++assignment.unassigned;
            continue;
        }
        const double J = s_sat - 0.5;
        assignment.J[i] = J;
        ++census[J];
    }

    for (const auto& [J, count] : census) assignment.census.push_back({J, count});
    return assignment;
}

std::vector<LayerTrajectory> layer_mean_trajectories(const ResponseMatrix& matrix,
                                                     const LayerAssignment& assignment,
                                                     double g) {
    if (assignment.J.size() != matrix.rows()) {
        throw ValidationError("assignment does not cover the matrix rows");
    }
    std::vector<LayerTrajectory> out;
    for (const LayerCensusEntry& entry : assignment.census) {
        LayerTrajectory traj;
        traj.J = entry.J;
        for (std::size_t i = 0; i < matrix.rows(); ++i) {
            if (assignment.assigned(i) && assignment.J[i] == entry.J) traj.members.push_back(i);
        }
        traj.count = traj.members.size();
        if (traj.count == 0) continue;   // foreign assignment, skip the empty layer

        traj.input.J = entry.J;
        traj.input.g = g;
        traj.input.stimulus.resize(matrix.stimulus_count);
        traj.input.mean_charge.resize(matrix.stimulus_count);
        for (int b = 1; b <= matrix.stimulus_count; ++b) {
            double sum = 0.0;
            for (std::size_t i : traj.members) sum += matrix.at(i, b);
            traj.input.stimulus[b - 1] = static_cast<double>(b);
            traj.input.mean_charge[b - 1] = sum / static_cast<double>(traj.count);
        }
        out.push_back(std::move(traj));
    }
    return out;
}

std::optional<double> coherence_onset(std::span<const double> stimulus,
                                      std::span<const double> mean, double J) {
    if (stimulus.size() != mean.size() || stimulus.empty()) {
        throw ValidationError("coherence_onset: trajectory is empty or ragged");
    }
    for (std::size_t i = 0; i < stimulus.size(); ++i) {
        if (mean[i] >= J) return stimulus[i];
    }
    return std::nullopt;
}

std::optional<double> coherence_onset(const LayerParams& params, double search_limit) {
    if (params.saturation_charge() <= params.J) return std::nullopt;

    double hi = 1.0;
    while (expected_charge(params, hi) < params.J) {
        hi *= 2.0;
        if (hi > search_limit) return std::nullopt;
    }
    double lo = hi > 1.0 ? hi / 2.0 : 0.0;
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (expected_charge(params, mid) >= params.J ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> fluctuation_profile(const ResponseMatrix& matrix) {
    if (matrix.rows() < 2) {
        throw ValidationError("fluctuation_profile: need at least 2 participants");
    }
    return ensemble_mean_trajectory(matrix).variance;
}

SusceptibilityProfile susceptibility_profile(const ResponseMatrix& matrix) {
    const TrajectoryStats stats = ensemble_mean_trajectory(matrix);
    SusceptibilityProfile profile;
    profile.chi.resize(matrix.stimulus_count);
    profile.differential_chi.resize(matrix.stimulus_count);
    for (int b = 1; b <= matrix.stimulus_count; ++b) {
        profile.chi[b - 1] = stats.mean[b - 1] / static_cast<double>(b);
        profile.differential_chi[b - 1] =
            b == 1 ? stats.mean[0] : stats.mean[b - 1] - stats.mean[b - 2];
    }
    return profile;
}

PatternCensus pattern_census(const std::vector<ResponseMatrix>& spaces,
                             const std::vector<LayerAssignment>& assignments) {
    if (spaces.empty() || spaces.size() != assignments.size()) {
        throw ValidationError("pattern_census: one assignment per space required");
    }
    const std::vector<std::string>& roster = spaces.front().participants;
    for (const ResponseMatrix& m : spaces) {
        if (m.participants != roster) {
            throw ValidationError("pattern_census: participant rosters differ between spaces");
        }
    }
    for (const LayerAssignment& a : assignments) {
        if (a.J.size() != roster.size()) {
            throw ValidationError("pattern_census: assignment does not cover the roster");
        }
    }

    std::map<std::vector<double>, std::size_t, std::greater<std::vector<double>>> counts;
    PatternCensus census;
    for (std::size_t i = 0; i < roster.size(); ++i) {
        std::vector<double> tuple;
        tuple.reserve(assignments.size());
        bool complete = true;
        for (const LayerAssignment& a : assignments) {
            if (!a.assigned(i)) {
                complete = false;
                break;
            }
            tuple.push_back(a.J[i]);
        }
        if (!complete) {
            ++census.skipped;
            continue;
        }
        ++counts[tuple];
    }

    for (const auto& [tuple, count] : counts) {
        census.patterns.push_back({pattern_code(tuple), tuple, count});
    }
    return census;
}

} // namespace attcoh
