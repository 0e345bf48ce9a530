#include "attcoh/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "attcoh/io.hpp"

namespace attcoh {

namespace {

using json = nlohmann::ordered_json;

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json scenario_to_json(const ScenarioConfig& config) {
    json doc;
    doc["seed"] = config.seed;
    doc["stimulus_count"] = config.stimulus_count;
    doc["output_mode"] = to_string(config.output_mode);
    doc["spaces"] = json::array();
    for (const SpaceSpec& space : config.spaces) {
        json js;
        js["name"] = space.name;
        js["layers"] = json::array();
        for (const LayerGroup& group : space.layers) {
            json jl;
            jl["J"] = group.params.J;
            jl["g"] = group.params.g;
            jl["m"] = group.params.m;
            jl["beta"] = group.params.beta;
            jl["count"] = group.count;
            jl["sign"] = group.sign;
            js["layers"].push_back(jl);
        }
        doc["spaces"].push_back(js);
    }
    return doc;
}

std::vector<double> questionnaire_bin_edges() {
    std::vector<double> edges;
    for (int v = 0; v <= 9; ++v) edges.push_back(v - 0.5);
    return edges;
}

std::vector<double> raw_bin_edges(double max_saturation) {
    const int top = static_cast<int>(std::ceil(max_saturation)) + 1;
    std::vector<double> edges;
    for (int v = -top; v <= top + 1; ++v) edges.push_back(v - 0.5);
    return edges;
}

// shared analysis chain once the questionnaire view (for stratification) and
// the analysis view (trajectories, fits, profiles) are settled
void analyze_space(SpaceReport& report, const ResponseMatrix& analysis,
                   const ResponseMatrix& questionnaire, int tail_len,
                   std::vector<double> histogram_edges) {
    report.participants = analysis.rows();

    const LayerAssignment assignment = assign_layers(questionnaire, tail_len);
    report.census = assignment.census;
    report.unassigned = assignment.unassigned;

    const std::vector<LayerTrajectory> trajectories =
        layer_mean_trajectories(analysis, assignment);
    for (const LayerTrajectory& traj : trajectories) {
        LayerReport layer;
        layer.J = traj.J;
        layer.count = traj.count;
        layer.mean = traj.input.mean_charge;
        try {
            layer.fit = fit_layer(traj.input);
            layer.residual_diag = residual_symmetry(*layer.fit);
            const LayerParams fitted(traj.J, layer.fit->m, layer.fit->beta, traj.input.g);
            layer.onset_curve = coherence_onset(fitted);
        } catch (const NumericalError& e) {
            layer.fit_skip_reason = e.what();
        } catch (const ValidationError& e) {
            layer.fit_skip_reason = e.what();
        }
        layer.onset_data =
            coherence_onset(traj.input.stimulus, traj.input.mean_charge, traj.J);
        report.layers.push_back(std::move(layer));
    }

    const TrajectoryStats stats = ensemble_mean_trajectory(analysis);
    report.profile_mean = stats.mean;
    if (analysis.rows() >= 2) report.profile_variance = stats.variance;
    const SusceptibilityProfile susc = susceptibility_profile(analysis);
    report.profile_chi = susc.chi;
    report.profile_differential_chi = susc.differential_chi;

    report.histogram_edges = std::move(histogram_edges);
    for (int b = 1; b <= analysis.stimulus_count; ++b) {
        report.histograms.push_back(histogram(analysis, b, report.histogram_edges));
    }
}

void analyze_cross_space(AnalysisReport& report,
                         const std::vector<ResponseMatrix>& questionnaires,
                         const std::vector<LayerAssignment>& assignments) {
    report.patterns = pattern_census(questionnaires, assignments);

    TrajectoryBundle bundle;
    char buf[32];
    for (const SpaceReport& space : report.spaces) {
        for (const LayerReport& layer : space.layers) {
            std::snprintf(buf, sizeof(buf), "%s/J=%.1f", space.name.c_str(), layer.J);
            bundle.names.push_back(buf);
            bundle.values.push_back(layer.mean);
        }
    }
    if (bundle.values.size() < 2) {
        report.multivariate_skip_reason = "fewer than 2 layer trajectories";
        return;
    }
    try {
        CorrelationReport corr;
        corr.names = bundle.names;
        corr.correlation = correlation_matrix(bundle);
        corr.r2.assign(bundle.values.size(),
                       std::vector<double>(bundle.values.size(), 1.0));
        for (std::size_t i = 0; i < bundle.values.size(); ++i) {
            for (std::size_t j = 0; j < bundle.values.size(); ++j) {
                const double r = corr.correlation[i][j];
                corr.r2[i][j] = r * r;
            }
        }
        report.pca_result = pca(corr.correlation);
        report.correlation = std::move(corr);
    } catch (const ValidationError& e) {
        report.multivariate_skip_reason = e.what();
        report.correlation.reset();
        report.pca_result.reset();
    }
}

} // namespace

std::string config_hash(const ScenarioConfig& config) {
    return hex64(fnv1a64(scenario_to_json(config).dump()));
}

AnalysisReport run_pipeline(const ScenarioConfig& config, int tail_len) {
    validate_scenario(config);

    AnalysisReport report;
    report.config_hash = config_hash(config);
    report.seed = config.seed;
    report.stimulus_count = config.stimulus_count;
    report.output_mode = config.output_mode;
    report.tail_len = tail_len;

    const std::vector<Population> populations = build_population(config);

    double max_saturation = 0.0;
    for (const SpaceSpec& space : config.spaces) {
        for (const LayerGroup& group : space.layers) {
            max_saturation = std::max(max_saturation, group.params.saturation_charge());
        }
    }

    std::vector<ResponseMatrix> questionnaires;
    std::vector<LayerAssignment> assignments;
    for (const Population& pop : populations) {
        ResponseMatrix questionnaire = sample_responses(
            pop, config.stimulus_count, config.seed, OutputMode::questionnaire);
        // the raw view shares the seed, hence the same underlying draws
        const bool raw = config.output_mode == OutputMode::raw_charge;
        ResponseMatrix analysis =
            raw ? sample_responses(pop, config.stimulus_count, config.seed,
                                   OutputMode::raw_charge)
                : questionnaire;

        SpaceReport space;
        space.name = pop.space;
        analyze_space(space, analysis, questionnaire, tail_len,
                      raw ? raw_bin_edges(max_saturation) : questionnaire_bin_edges());

        // noiseless reference census on a grid long enough to saturate
        const int grid = std::max(config.stimulus_count, kExpectedCensusGrid);
        const ResponseMatrix expected =
            expected_responses(pop, grid, OutputMode::questionnaire);
        space.census_expected = assign_layers(expected, tail_len).census;

        assignments.push_back(assign_layers(questionnaire, tail_len));
        questionnaires.push_back(std::move(questionnaire));
        report.spaces.push_back(std::move(space));
    }

    analyze_cross_space(report, questionnaires, assignments);
    return report;
}

AnalysisReport run_pipeline(const std::vector<ResponseMatrix>& matrices, int tail_len) {
    if (matrices.empty()) throw ValidationError("run_pipeline: no response matrices");

    AnalysisReport report;
    report.stimulus_count = matrices.front().stimulus_count;
    report.output_mode = OutputMode::questionnaire;
    report.tail_len = tail_len;

    std::string hash_input;
    std::vector<LayerAssignment> assignments;
    for (const ResponseMatrix& matrix : matrices) {
        if (matrix.mode != OutputMode::questionnaire) {
            throw ValidationError("run_pipeline: questionnaire matrices required");
        }
        if (matrix.stimulus_count != report.stimulus_count) {
            throw ValidationError("run_pipeline: stimulus counts differ between spaces");
        }
        std::ostringstream os;
        io::write_responses(matrix, os);
        hash_input += matrix.space;
        hash_input += os.str();

        SpaceReport space;
        space.name = matrix.space;
        analyze_space(space, matrix, matrix, tail_len, questionnaire_bin_edges());
        assignments.push_back(assign_layers(matrix, tail_len));
        report.spaces.push_back(std::move(space));
    }
    report.config_hash = hex64(fnv1a64(hash_input));

    analyze_cross_space(report, matrices, assignments);
    return report;
}

namespace {

json census_to_json(const std::vector<LayerCensusEntry>& census) {
    json arr = json::array();
    for (const LayerCensusEntry& entry : census) {
        arr.push_back(json{{"J", entry.J}, {"count", entry.count}});
    }
    return arr;
}

json fit_to_json(const FitResult& fit, const ResidualDiagnostic& diag) {
    json jf;
    jf["J"] = fit.J;
    jf["g"] = fit.g;
    jf["m"] = fit.m;
    jf["beta"] = fit.beta;
    jf["r_squared"] = fit.r_squared;
    jf["sse"] = fit.sse;
    jf["converged"] = fit.converged;
    jf["iterations"] = fit.iterations;
    jf["starts_tried"] = fit.starts_tried;
    jf["residuals"] = fit.residuals;
    jf["residual_diagnostic"] = json{{"mean_residual", diag.mean_residual},
                                     {"sign_balance", diag.sign_balance},
                                     {"skewness", diag.skewness},
                                     {"symmetric", diag.symmetric}};
    return jf;
}

} // namespace

json report_to_json(const AnalysisReport& report) {
    json doc;
    doc["tool"] = json{{"name", kToolName}, {"version", kToolVersion}};
    json prov;
    prov["config_hash"] = report.config_hash;
    if (report.seed) prov["seed"] = *report.seed;
    prov["stimulus_count"] = report.stimulus_count;
    prov["output_mode"] = to_string(report.output_mode);
    prov["tail_len"] = report.tail_len;
    doc["provenance"] = prov;

    doc["spaces"] = json::array();
    for (const SpaceReport& space : report.spaces) {
        json js;
        js["name"] = space.name;
        js["participants"] = space.participants;
        js["census"] = census_to_json(space.census);
        js["unassigned"] = space.unassigned;
        if (!space.census_expected.empty()) {
            js["census_expected"] = census_to_json(space.census_expected);
        }

        js["layers"] = json::array();
        for (const LayerReport& layer : space.layers) {
            json jl;
            jl["J"] = layer.J;
            jl["count"] = layer.count;
            jl["mean"] = layer.mean;
            if (layer.fit) {
                jl["fit"] = fit_to_json(*layer.fit, *layer.residual_diag);
            } else {
                jl["fit_skipped"] = layer.fit_skip_reason;
            }
            jl["onset_data"] = layer.onset_data ? json(*layer.onset_data) : json(nullptr);
            jl["onset_curve"] = layer.onset_curve ? json(*layer.onset_curve) : json(nullptr);
            js["layers"].push_back(jl);
        }

        json profile;
        profile["mean"] = space.profile_mean;
        if (!space.profile_variance.empty()) profile["variance"] = space.profile_variance;
        profile["chi"] = space.profile_chi;
        profile["differential_chi"] = space.profile_differential_chi;
        js["profile"] = profile;

        js["histogram_edges"] = space.histogram_edges;
        js["histograms"] = space.histograms;
        doc["spaces"].push_back(js);
    }

    if (report.patterns) {
        json jp;
        jp["skipped"] = report.patterns->skipped;
        jp["patterns"] = json::array();
        for (const PatternCensusEntry& entry : report.patterns->patterns) {
            jp["patterns"].push_back(json{{"code", entry.code}, {"count", entry.count}});
        }
        doc["pattern_census"] = jp;
    }

    if (report.correlation) {
        json jc;
        jc["names"] = report.correlation->names;
        jc["matrix"] = report.correlation->correlation;
        jc["r2"] = report.correlation->r2;
        doc["correlation"] = jc;
    }
    if (report.pca_result) {
        json jp;
        jp["eigenvalues"] = report.pca_result->eigenvalues;
        jp["retained"] = report.pca_result->retained;
        jp["variance_share"] = report.pca_result->variance_share();
        jp["loadings"] = report.pca_result->loadings;
        jp["communalities"] = report.pca_result->communalities;
        doc["pca"] = jp;
    }
    if (!report.multivariate_skip_reason.empty()) {
        doc["multivariate_skipped"] = report.multivariate_skip_reason;
    }
    return doc;
}

std::string report_to_string(const AnalysisReport& report) {
    return report_to_json(report).dump(2) + "\n";
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
    if (!out) throw ValidationError("write failed: " + path.string());
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace

void emit_plot_tables(const nlohmann::json& report, const std::filesystem::path& out_dir) {
    if (!report.contains("spaces") || !report.at("spaces").is_array() ||
        report.at("spaces").empty()) {
        throw ValidationError("emit_plot_tables: report has no spaces");
    }
    std::filesystem::create_directories(out_dir);

    for (const auto& space : report.at("spaces")) {
        const std::string name = space.at("name").get<std::string>();

        // layer curves: data mean, fitted curve, residual
        {
            std::ostringstream os;
            os << "J\tB\tmean_U\tfitted_U\tresidual\n";
            for (const auto& layer : space.at("layers")) {
                const double J = layer.at("J").get<double>();
                const auto mean = layer.at("mean").get<std::vector<double>>();
                const bool has_fit = layer.contains("fit");
                LayerParams params;
                if (has_fit) {
                    const auto& fit = layer.at("fit");
                    params = LayerParams(J, fit.at("m").get<double>(),
                                         fit.at("beta").get<double>(),
                                         fit.at("g").get<double>());
                }
                for (std::size_t b = 1; b <= mean.size(); ++b) {
                    os << fmt(J) << '\t' << b << '\t' << fmt(mean[b - 1]) << '\t';
                    if (has_fit) {
                        const double fitted =
                            expected_charge(params, static_cast<double>(b));
                        os << fmt(fitted) << '\t' << fmt(mean[b - 1] - fitted) << '\n';
                    } else {
                        os << "nan\tnan\n";
                    }
                }
            }
            write_text(out_dir / (name + "_layers.tsv"), os.str());
        }

        // response histograms per stimulus
        {
            std::ostringstream os;
            os << "B\tbin_upper\tcount\n";
            const auto edges = space.at("histogram_edges").get<std::vector<double>>();
            const auto& hists = space.at("histograms");
            for (std::size_t b = 1; b <= hists.size(); ++b) {
                const auto counts = hists[b - 1].get<std::vector<std::size_t>>();
                for (std::size_t i = 0; i < counts.size(); ++i) {
                    os << b << '\t' << fmt(edges[i + 1]) << '\t' << counts[i] << '\n';
                }
            }
            write_text(out_dir / (name + "_histograms.tsv"), os.str());
        }

        // susceptibility and fluctuation profile
        {
            std::ostringstream os;
            os << "B\tchi\tdifferential_chi\tvariance\n";
            const auto& profile = space.at("profile");
            const auto chi = profile.at("chi").get<std::vector<double>>();
            const auto dchi = profile.at("differential_chi").get<std::vector<double>>();
            std::vector<double> variance(chi.size(),
                                         std::numeric_limits<double>::quiet_NaN());
            if (profile.contains("variance")) {
                variance = profile.at("variance").get<std::vector<double>>();
            }
            for (std::size_t b = 1; b <= chi.size(); ++b) {
                os << b << '\t' << fmt(chi[b - 1]) << '\t' << fmt(dchi[b - 1]) << '\t'
                   << fmt(variance[b - 1]) << '\n';
            }
            write_text(out_dir / (name + "_profile.tsv"), os.str());
        }
    }
}

ScenarioConfig packaged_scenario(std::uint64_t seed) {
    // published layer parameters and sizes of the three-space fan study
    ScenarioConfig config;
    config.seed = seed;
    config.stimulus_count = 12;
    config.output_mode = OutputMode::questionnaire;

    SpaceSpec opinion;
    opinion.name = "opinion";
    opinion.layers = {{LayerParams(7.5, 0.552, 0.100), 97, +1}};

    SpaceSpec emotion;
    emotion.name = "emotion";
    emotion.layers = {{LayerParams(7.5, 0.547, 0.094), 71, +1},
                      {LayerParams(6.5, 0.515, 0.073), 26, +1}};

    SpaceSpec action;
    action.name = "action";
    action.layers = {{LayerParams(7.5, 0.554, 0.099), 24, +1},
                     {LayerParams(5.5, 0.567, 0.088), 18, +1},
                     {LayerParams(4.5, 0.531, 0.139), 12, +1},
                     {LayerParams(3.5, 0.526, 0.190), 43, +1}};

    config.spaces = {std::move(opinion), std::move(emotion), std::move(action)};
    return config;
}

} // namespace attcoh
