// attcoh — simulate, fit and analyze globally coupled attitude-coherence
// ensembles. Subcommands: simulate, fit, stratify, analyze, reproduce,
// plot-data. All state flows through flags and files; exit codes are
// 0 (success), 2 (validation error), 3 (numerical failure).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "attcoh/io.hpp"
#include "attcoh/pipeline.hpp"

namespace {

using attcoh::AnalysisReport;
using attcoh::OutputMode;
using attcoh::ResponseMatrix;
using attcoh::ScenarioConfig;

void write_or_print(const std::string& text, const std::string& output) {
    if (output.empty() || output == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(output);
    if (!out) throw attcoh::ValidationError("cannot write " + output);
    out << text;
    if (!out) throw attcoh::ValidationError("write failed: " + output);
}

ScenarioConfig load_scenario(const std::string& path, std::optional<std::uint64_t> seed,
                             const std::string& mode) {
    ScenarioConfig config = attcoh::io::parse_scenario(std::filesystem::path(path));
    if (seed) config.seed = *seed;
    if (!mode.empty()) config.output_mode = attcoh::output_mode_from_string(mode);
    return config;
}

void cmd_simulate(const std::string& scenario_path, const std::string& output_dir,
                  std::optional<std::uint64_t> seed, const std::string& mode,
                  const std::vector<std::string>& only_spaces) {
    const ScenarioConfig config = load_scenario(scenario_path, seed, mode);
    const std::vector<attcoh::Population> pops = attcoh::build_population(config);

    std::filesystem::create_directories(output_dir);
    std::size_t written = 0;
    for (const attcoh::Population& pop : pops) {
        if (!only_spaces.empty() &&
            std::find(only_spaces.begin(), only_spaces.end(), pop.space) ==
                only_spaces.end()) {
            continue;
        }
        const ResponseMatrix matrix = attcoh::sample_responses(
            pop, config.stimulus_count, config.seed, config.output_mode);
        attcoh::io::write_responses(
            matrix, std::filesystem::path(output_dir) / (pop.space + ".csv"));
        ++written;
    }
    if (written == 0) {
        throw attcoh::ValidationError("no spaces matched the --space filter");
    }
    std::cerr << "wrote " << written << " response file(s) to " << output_dir << "\n";
}

nlohmann::ordered_json stratify_json(const ResponseMatrix& matrix, int tail_len) {
    const attcoh::LayerAssignment assignment = attcoh::assign_layers(matrix, tail_len);
    nlohmann::ordered_json doc;
    doc["space"] = matrix.space;
    doc["participants"] = matrix.rows();
    doc["tail_len"] = tail_len;
    doc["census"] = nlohmann::ordered_json::array();
    for (const attcoh::LayerCensusEntry& entry : assignment.census) {
        doc["census"].push_back({{"J", entry.J}, {"count", entry.count}});
    }
    doc["unassigned"] = assignment.unassigned;
    doc["assignment"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        doc["assignment"].push_back(
            assignment.assigned(i)
                ? nlohmann::ordered_json(assignment.J[i])
                : nlohmann::ordered_json(nullptr));
    }
    return doc;
}

void cmd_stratify(const std::string& input, const std::string& space, int tail_len,
                  const std::string& output) {
    ResponseMatrix matrix = attcoh::io::parse_responses(input);
    if (!space.empty()) matrix.space = space;
    write_or_print(stratify_json(matrix, tail_len).dump(2) + "\n", output);
}

void cmd_fit(const std::string& input, const std::string& space, int tail_len,
             double g, const std::string& output) {
    ResponseMatrix matrix = attcoh::io::parse_responses(input);
    if (!space.empty()) matrix.space = space;

    const attcoh::LayerAssignment assignment = attcoh::assign_layers(matrix, tail_len);
    const std::vector<attcoh::LayerTrajectory> trajectories =
        attcoh::layer_mean_trajectories(matrix, assignment, g);

    nlohmann::ordered_json doc;
    doc["space"] = matrix.space;
    doc["tail_len"] = tail_len;
    doc["layers"] = nlohmann::ordered_json::array();
    for (const attcoh::LayerTrajectory& traj : trajectories) {
        nlohmann::ordered_json jl;
        jl["J"] = traj.J;
        jl["count"] = traj.count;
        jl["mean"] = traj.input.mean_charge;
        try {
            const attcoh::FitResult fit = attcoh::fit_layer(traj.input);
            jl["fit"] = {{"m", fit.m},
                         {"beta", fit.beta},
                         {"r_squared", fit.r_squared},
                         {"converged", fit.converged},
                         {"iterations", fit.iterations},
                         {"starts_tried", fit.starts_tried}};
        } catch (const attcoh::NumericalError& e) {
            jl["fit_skipped"] = e.what();
        }
        doc["layers"].push_back(jl);
    }
    if (assignment.unassigned > 0) doc["unassigned"] = assignment.unassigned;
    write_or_print(doc.dump(2) + "\n", output);
}

void cmd_analyze(const std::vector<std::string>& inputs, int tail_len,
                 const std::string& output, const std::string& tables_dir) {
    std::vector<ResponseMatrix> matrices;
    for (const std::string& path : inputs) {
        matrices.push_back(attcoh::io::parse_responses(path));
    }
    const AnalysisReport report = attcoh::run_pipeline(matrices, tail_len);
    const nlohmann::ordered_json doc = attcoh::report_to_json(report);
    write_or_print(doc.dump(2) + "\n", output);
    if (!tables_dir.empty()) attcoh::emit_plot_tables(doc, tables_dir);
}

void cmd_reproduce(std::uint64_t seed, int tail_len, const std::string& output,
                   const std::string& tables_dir, const std::string& responses_dir) {
    const ScenarioConfig config = attcoh::packaged_scenario(seed);
    if (!responses_dir.empty()) {
        std::filesystem::create_directories(responses_dir);
        for (const attcoh::Population& pop : attcoh::build_population(config)) {
            const ResponseMatrix matrix = attcoh::sample_responses(
                pop, config.stimulus_count, config.seed, config.output_mode);
            attcoh::io::write_responses(
                matrix, std::filesystem::path(responses_dir) / (pop.space + ".csv"));
        }
    }
    const AnalysisReport report = attcoh::run_pipeline(config, tail_len);
    const nlohmann::ordered_json doc = attcoh::report_to_json(report);
    write_or_print(doc.dump(2) + "\n", output);
    if (!tables_dir.empty()) attcoh::emit_plot_tables(doc, tables_dir);
}

void cmd_plot_data(const std::string& report_path, const std::string& output_dir) {
    std::ifstream in(report_path);
    if (!in) throw attcoh::ValidationError("cannot open " + report_path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw attcoh::ValidationError(std::string("report parse error: ") + e.what());
    }
    attcoh::emit_plot_tables(doc, output_dir);
}

void print_error(const char* code, const std::string& message) {
    nlohmann::ordered_json err;
    err["code"] = code;
    err["message"] = message;
    std::cerr << err.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"globally coupled attitude-coherence model toolkit"};
    app.require_subcommand(1);

    std::string scenario_path, input, output, output_dir, tables_dir, responses_dir;
    std::string mode, space, report_path;
    std::vector<std::string> inputs, spaces;
    std::optional<std::uint64_t> seed_flag;
    std::uint64_t seed = 42;
    int tail_len = 3;
    double g = attcoh::kDefaultSplitting;

    auto* simulate = app.add_subcommand("simulate", "sample response CSVs from a scenario");
    simulate->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    simulate->add_option("--output", output_dir, "output directory")->required();
    simulate->add_option("--seed", seed_flag, "override the scenario seed");
    simulate->add_option("--mode", mode, "raw|questionnaire (overrides the scenario)");
    simulate->add_option("--space", spaces, "only write the named space(s)");

    auto* fit = app.add_subcommand("fit", "stratify a response CSV and fit each layer");
    fit->add_option("--input", input, "questionnaire response CSV")->required();
    fit->add_option("--space", space, "space label for the report");
    fit->add_option("--tail-len", tail_len, "saturation tail length (default 3)");
    fit->add_option("--g", g, "splitting factor (default 2)");
    fit->add_option("--output", output, "output file (default stdout)");

    auto* stratify = app.add_subcommand("stratify", "assign participants to coherence layers");
    stratify->add_option("--input", input, "questionnaire response CSV")->required();
    stratify->add_option("--space", space, "space label for the report");
    stratify->add_option("--tail-len", tail_len, "saturation tail length (default 3)");
    stratify->add_option("--output", output, "output file (default stdout)");

    auto* analyze = app.add_subcommand("analyze", "full analysis of response CSVs");
    analyze->add_option("--input", inputs, "response CSV(s), one per space")->required();
    analyze->add_option("--tail-len", tail_len, "saturation tail length (default 3)");
    analyze->add_option("--output", output, "report file (default stdout)");
    analyze->add_option("--tables", tables_dir, "also emit plot tables here");

    auto* reproduce =
        app.add_subcommand("reproduce", "run the packaged three-space study end to end");
    reproduce->add_option("--seed", seed, "simulation seed (default 42)");
    reproduce->add_option("--tail-len", tail_len, "saturation tail length (default 3)");
    reproduce->add_option("--output", output, "report file (default stdout)");
    reproduce->add_option("--tables", tables_dir, "also emit plot tables here");
    reproduce->add_option("--responses", responses_dir, "also write the response CSVs here");

    auto* plot_data = app.add_subcommand("plot-data", "emit plot tables from a report");
    plot_data->add_option("--report", report_path, "report JSON file")->required();
    plot_data->add_option("--output", output_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        if (rc == 0) return 0;   // --help and friends
        print_error("usage", e.what());
        return 2;
    }

    try {
        if (simulate->parsed()) {
            cmd_simulate(scenario_path, output_dir, seed_flag, mode, spaces);
        } else if (fit->parsed()) {
            cmd_fit(input, space, tail_len, g, output);
        } else if (stratify->parsed()) {
            cmd_stratify(input, space, tail_len, output);
        } else if (analyze->parsed()) {
            cmd_analyze(inputs, tail_len, output, tables_dir);
        } else if (reproduce->parsed()) {
            cmd_reproduce(seed, tail_len, output, tables_dir, responses_dir);
        } else if (plot_data->parsed()) {
            cmd_plot_data(report_path, output_dir);
        }
    } catch (const attcoh::ValidationError& e) {
        print_error("validation", e.what());
        return 2;
    } catch (const attcoh::NumericalError& e) {
        print_error("numerical", e.what());
        return 3;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 3;
    }
    return 0;
}
