#include "attcoh/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "attcoh/rng.hpp"

namespace attcoh {

const char* to_string(OutputMode mode) {
    return mode == OutputMode::raw_charge ? "raw" : "questionnaire";
}

OutputMode output_mode_from_string(const std::string& s) {
    if (s == "raw") return OutputMode::raw_charge;
    if (s == "questionnaire") return OutputMode::questionnaire;
    throw ValidationError("output_mode must be \"raw\" or \"questionnaire\", got \"" + s + "\"");
}

int SpaceSpec::agent_total() const {
    int n = 0;
    for (const auto& g : layers) n += g.count;
    return n;
}

void validate_scenario(const ScenarioConfig& config) {
    if (config.spaces.empty()) throw ValidationError("scenario has no attitude spaces");
    if (config.stimulus_count < 1) throw ValidationError("stimulus_count must be >= 1");
    for (const auto& space : config.spaces) {
        if (space.name.empty()) throw ValidationError("space name must not be empty");
        if (space.layers.empty()) {
            throw ValidationError("space \"" + space.name + "\" has no layer groups");
        }
        for (const auto& group : space.layers) {
            if (group.count < 1) {
                throw ValidationError("space \"" + space.name + "\": layer agent count must be >= 1");
            }
            if (group.sign != -1 && group.sign != +1) {
                throw ValidationError("space \"" + space.name + "\": coupling sign must be -1 or +1");
            }
            // re-run parameter validation in case the struct was filled by hand
            LayerParams check(group.params.J, group.params.m, group.params.beta, group.params.g);
            (void)check;
        }
    }
    const int total = config.spaces.front().agent_total();
    for (const auto& space : config.spaces) {
        if (space.agent_total() != total) {
            throw ValidationError("spaces must share one participant roster; \"" +
                                  space.name + "\" has " + std::to_string(space.agent_total()) +
                                  " agents, expected " + std::to_string(total));
        }
    }
}

std::vector<Population> build_population(const ScenarioConfig& config) {
    validate_scenario(config);
    std::vector<Population> pops;
    pops.reserve(config.spaces.size());
    for (std::size_t s = 0; s < config.spaces.size(); ++s) {
        const SpaceSpec& space = config.spaces[s];
        Population pop;
        pop.space = space.name;
        pop.space_index = s;
        pop.groups = space.layers;
        const int total = space.agent_total();
        pop.agent_group.reserve(total);
        pop.participant_ids.reserve(total);
        for (std::size_t g = 0; g < space.layers.size(); ++g) {
            for (int k = 0; k < space.layers[g].count; ++k) {
                pop.agent_group.push_back(static_cast<int>(g));
            }
        }
        for (int i = 0; i < total; ++i) pop.participant_ids.push_back(std::to_string(i + 1));
        pops.push_back(std::move(pop));
    }
    return pops;
}

double questionnaire_project(double u) {
    double r = std::round(u);
    return std::clamp(r, 0.0, 8.0);
}

namespace {

// per-group inverse-CDF tables over the 2J+1 levels, one per stimulus value
struct GroupSampler {
    double charge_step = 0.0;      // g*m
    double sigma_min = 0.0;        // -J
    int sign = +1;
    std::vector<std::vector<double>> cdf;   // [stimulus-1][level]
};

std::vector<GroupSampler> build_samplers(const Population& pop, int stimulus_count) {
    std::vector<GroupSampler> samplers(pop.groups.size());
    for (std::size_t g = 0; g < pop.groups.size(); ++g) {
        const LayerGroup& group = pop.groups[g];
        GroupSampler& s = samplers[g];
        s.charge_step = group.params.g * group.params.m;
        s.sigma_min = -group.params.J;
        s.sign = group.sign;
        s.cdf.resize(stimulus_count);
        for (int b = 1; b <= stimulus_count; ++b) {
            const LevelDistribution dist =
                level_distribution_at_field(group.params, group.sign * static_cast<double>(b));
            std::vector<double>& c = s.cdf[b - 1];
            c.resize(dist.probs.size());
            double acc = 0.0;
            for (std::size_t i = 0; i < dist.probs.size(); ++i) {
                acc += dist.probs[i];
                c[i] = acc;
            }
            c.back() = 1.0;   // guard against rounding in the final bin
        }
    }
    return samplers;
}

double project_value(double raw, int sign, OutputMode mode) {
    if (mode == OutputMode::raw_charge) return raw;
    return questionnaire_project(sign < 0 ? std::abs(raw) : raw);
}

} // namespace

ResponseMatrix sample_responses(const Population& pop, int stimulus_count,
                                std::uint64_t seed, OutputMode mode, Execution exec) {
    if (stimulus_count < 1) throw ValidationError("stimulus_count must be >= 1");
    if (pop.size() == 0) throw ValidationError("population is empty");

    const std::vector<GroupSampler> samplers = build_samplers(pop, stimulus_count);

    ResponseMatrix matrix;
    matrix.space = pop.space;
    matrix.mode = mode;
    matrix.stimulus_count = stimulus_count;
    matrix.participants = pop.participant_ids;
    matrix.values.resize(pop.size() * static_cast<std::size_t>(stimulus_count));

    const std::int64_t n = static_cast<std::int64_t>(pop.size());
    const std::uint64_t space_index = pop.space_index;

    auto fill_row = [&](std::int64_t i) {
        const GroupSampler& s = samplers[pop.agent_group[static_cast<std::size_t>(i)]];
        double* row = matrix.values.data() + i * stimulus_count;
        for (int b = 1; b <= stimulus_count; ++b) {
            const double u = rng::uniform01(seed, space_index,
                                            static_cast<std::uint64_t>(i),
                                            static_cast<std::uint64_t>(b));
            const std::vector<double>& cdf = s.cdf[b - 1];
            std::size_t level = 0;
            while (level + 1 < cdf.size() && u >= cdf[level]) ++level;
            const double raw = s.charge_step * (s.sigma_min + static_cast<double>(level));
            row[b - 1] = project_value(raw, s.sign, mode);
        }
    };

    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) fill_row(i);
    } else {
        for (std::int64_t i = 0; i < n; ++i) fill_row(i);
    }
    return matrix;
}

ResponseMatrix expected_responses(const Population& pop, int stimulus_count, OutputMode mode) {
    if (stimulus_count < 1) throw ValidationError("stimulus_count must be >= 1");
    if (pop.size() == 0) throw ValidationError("population is empty");

    // one trajectory per group, shared by its members
    std::vector<std::vector<double>> group_values(pop.groups.size());
    for (std::size_t g = 0; g < pop.groups.size(); ++g) {
        const LayerGroup& group = pop.groups[g];
        group_values[g].resize(stimulus_count);
        for (int b = 1; b <= stimulus_count; ++b) {
            const double u = group.sign * expected_charge(group.params, static_cast<double>(b));
            group_values[g][b - 1] = project_value(u, group.sign, mode);
        }
    }

    ResponseMatrix matrix;
    matrix.space = pop.space;
    matrix.mode = mode;
    matrix.stimulus_count = stimulus_count;
    matrix.participants = pop.participant_ids;
    matrix.values.resize(pop.size() * static_cast<std::size_t>(stimulus_count));
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const std::vector<double>& src = group_values[pop.agent_group[i]];
        std::copy(src.begin(), src.end(),
                  matrix.values.begin() + static_cast<std::ptrdiff_t>(i * stimulus_count));
    }
    return matrix;
}

TrajectoryStats ensemble_mean_trajectory(const ResponseMatrix& matrix) {
    const std::size_t n = matrix.rows();
    if (n == 0 || matrix.stimulus_count == 0) {
        throw ValidationError("ensemble_mean_trajectory: empty matrix");
    }
    TrajectoryStats stats;
    stats.mean.resize(matrix.stimulus_count);
    stats.variance.resize(matrix.stimulus_count, 0.0);
    for (int b = 1; b <= matrix.stimulus_count; ++b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += matrix.at(i, b);
        const double mean = sum / static_cast<double>(n);
        stats.mean[b - 1] = mean;
        if (n >= 2) {
            double ss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = matrix.at(i, b) - mean;
                ss += d * d;
            }
            stats.variance[b - 1] = ss / static_cast<double>(n - 1);
        }
    }
    return stats;
}

PolarizationSplit polarization_split(const ResponseMatrix& matrix, const Population& pop) {
    if (matrix.rows() != pop.size()) {
        throw ValidationError("polarization_split: matrix rows do not match population size");
    }
    const int sc = matrix.stimulus_count;
    const bool questionnaire = matrix.mode == OutputMode::questionnaire;

    auto signed_value = [&](std::size_t i, int b) {
        const double v = matrix.at(i, b);
        return questionnaire ? pop.coupling_sign(i) * v : v;
    };

    PolarizationSplit split;
    for (int sign : {+1, -1}) {
        SignGroupTrajectory traj;
        traj.sign = sign;
        traj.mean.assign(sc, 0.0);
        double sat = 0.0;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            if (pop.coupling_sign(i) != sign) continue;
            ++traj.count;
            sat += pop.layer(i).saturation_charge();
            for (int b = 1; b <= sc; ++b) traj.mean[b - 1] += signed_value(i, b);
        }
        if (traj.count == 0) continue;
        for (double& v : traj.mean) v /= static_cast<double>(traj.count);
        traj.saturation = sat / static_cast<double>(traj.count);
        split.groups.push_back(std::move(traj));
    }

    // per configured layer group: signed mean at the final stimulus
    for (std::size_t g = 0; g < pop.groups.size(); ++g) {
        LayerPlateau plateau;
        plateau.sign = pop.groups[g].sign;
        plateau.J = pop.groups[g].params.J;
        double sum = 0.0;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            if (pop.agent_group[i] != static_cast<int>(g)) continue;
            ++plateau.count;
            sum += signed_value(i, sc);
        }
        if (plateau.count > 0) plateau.value = sum / static_cast<double>(plateau.count);
        split.plateaus.push_back(plateau);
    }

    if (split.groups.size() == 2) {
        const SignGroupTrajectory& a = split.groups[0];
        const SignGroupTrajectory& b = split.groups[1];
        const double fa = a.mean.back(), fb = b.mean.back();
        split.polarized = fa * fb < 0.0 &&
                          std::abs(fa) > 0.5 * a.saturation &&
                          std::abs(fb) > 0.5 * b.saturation;
    }
    return split;
}

} // namespace attcoh
