#include "attcoh/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace attcoh::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

ResponseMatrix parse_stream(std::istream& in, const std::string& space, bool questionnaire) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("response file is empty");
    line = strip_cr(line);

    const std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "participant") {
        throw ValidationError("malformed header: expected \"participant,B1,...\"");
    }
    const int stimulus_count = static_cast<int>(header.size()) - 1;
    for (int b = 1; b <= stimulus_count; ++b) {
        const std::string expected = "B" + std::to_string(b);
        if (header[b] != expected) {
            throw ValidationError("malformed header: column " + std::to_string(b + 1) +
                                  " is \"" + header[b] + "\", expected \"" + expected + "\"");
        }
    }

    ResponseMatrix matrix;
    matrix.space = space;
    matrix.mode = questionnaire ? OutputMode::questionnaire : OutputMode::raw_charge;
    matrix.stimulus_count = stimulus_count;

    std::size_t row = 0;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        ++row;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ValidationError("row " + std::to_string(row) + ": expected " +
                                  std::to_string(header.size()) + " cells, got " +
                                  std::to_string(cells.size()));
        }
        if (cells[0].empty()) {
            throw ValidationError("row " + std::to_string(row) + ": empty participant id");
        }
        matrix.participants.push_back(cells[0]);
        for (int b = 1; b <= stimulus_count; ++b) {
            const std::string& cell = cells[b];
            const std::string where =
                "row " + std::to_string(row) + ", column B" + std::to_string(b);
            errno = 0;
            char* end = nullptr;
            if (questionnaire) {
                const long v = std::strtol(cell.c_str(), &end, 10);
                if (end == cell.c_str() || *end != '\0' || errno == ERANGE) {
                    throw ValidationError(where + ": \"" + cell + "\" is not an integer");
                }
                if (v < 0 || v > 8) {
                    throw ValidationError(where + ": value " + std::to_string(v) +
                                          " out of range [0,8]");
                }
                matrix.values.push_back(static_cast<double>(v));
            } else {
                const double v = std::strtod(cell.c_str(), &end);
                if (end == cell.c_str() || *end != '\0' || !std::isfinite(v)) {
                    throw ValidationError(where + ": \"" + cell + "\" is not a finite number");
                }
                matrix.values.push_back(v);
            }
        }
    }
    if (matrix.participants.empty()) throw ValidationError("response file has no data rows");
    return matrix;
}

std::ifstream open_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    return in;
}

nlohmann::json require_field(const nlohmann::json& obj, const std::string& key,
                             const std::string& where) {
    if (!obj.contains(key)) throw ValidationError(where + key + ": required");
    return obj.at(key);
}

double number_field(const nlohmann::json& obj, const std::string& key,
                    const std::string& where) {
    const nlohmann::json v = require_field(obj, key, where);
    if (!v.is_number()) throw ValidationError(where + key + ": must be a number");
    return v.get<double>();
}

} // namespace

ResponseMatrix parse_responses(std::istream& in, const std::string& space) {
    return parse_stream(in, space, true);
}

ResponseMatrix parse_responses(const std::filesystem::path& path) {
    std::ifstream in = open_file(path);
    try {
        return parse_stream(in, path.stem().string(), true);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

ResponseMatrix parse_responses_raw(std::istream& in, const std::string& space) {
    return parse_stream(in, space, false);
}

ResponseMatrix parse_responses_raw(const std::filesystem::path& path) {
    std::ifstream in = open_file(path);
    try {
        return parse_stream(in, path.stem().string(), false);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_responses(const ResponseMatrix& matrix, std::ostream& out) {
    out << "participant";
    for (int b = 1; b <= matrix.stimulus_count; ++b) out << ",B" << b;
    out << '\n';
    char buf[40];
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        out << matrix.participants[i];
        for (int b = 1; b <= matrix.stimulus_count; ++b) {
            const double v = matrix.at(i, b);
            if (matrix.mode == OutputMode::questionnaire) {
                std::snprintf(buf, sizeof(buf), "%d", static_cast<int>(v));
            } else {
                std::snprintf(buf, sizeof(buf), "%.17g", v);
            }
            out << ',' << buf;
        }
        out << '\n';
    }
}

void write_responses(const ResponseMatrix& matrix, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    write_responses(matrix, out);
    if (!out) throw ValidationError("write failed: " + path.string());
}

ScenarioConfig parse_scenario(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("scenario JSON parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("scenario: top level must be an object");

    ScenarioConfig config;

    const nlohmann::json seed = require_field(doc, "seed", "");
    if (!seed.is_number_integer() && !seed.is_number_unsigned()) {
        throw ValidationError("seed: must be an integer");
    }
    config.seed = seed.get<std::uint64_t>();

    if (doc.contains("stimulus_count")) {
        const nlohmann::json sc = doc.at("stimulus_count");
        if (!sc.is_number_integer() || sc.get<long long>() < 1) {
            throw ValidationError("stimulus_count: must be an integer >= 1");
        }
        config.stimulus_count = sc.get<int>();
    }
    if (doc.contains("output_mode")) {
        const nlohmann::json om = doc.at("output_mode");
        if (!om.is_string()) throw ValidationError("output_mode: must be a string");
        config.output_mode = output_mode_from_string(om.get<std::string>());
    }

    const nlohmann::json spaces = require_field(doc, "spaces", "");
    if (!spaces.is_array() || spaces.empty()) {
        throw ValidationError("spaces: must be a non-empty array");
    }

    for (std::size_t s = 0; s < spaces.size(); ++s) {
        const std::string sw = "spaces[" + std::to_string(s) + "].";
        const nlohmann::json& js = spaces[s];
        if (!js.is_object()) throw ValidationError(sw + ": must be an object");

        SpaceSpec space;
        const nlohmann::json name = require_field(js, "name", sw);
        if (!name.is_string() || name.get<std::string>().empty()) {
            throw ValidationError(sw + "name: must be a non-empty string");
        }
        space.name = name.get<std::string>();

        const nlohmann::json layers = require_field(js, "layers", sw);
        if (!layers.is_array() || layers.empty()) {
            throw ValidationError(sw + "layers: must be a non-empty array");
        }
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const std::string lw = sw + "layers[" + std::to_string(l) + "].";
            const nlohmann::json& jl = layers[l];
            if (!jl.is_object()) throw ValidationError(lw + ": must be an object");

            const double J = number_field(jl, "J", lw);
            if (!is_valid_spin(J)) {
                throw ValidationError(lw + "J: must be a half-integer in [0.5, 7.5]");
            }
            const double m = number_field(jl, "m", lw);
            const double beta = number_field(jl, "beta", lw);
            double g = kDefaultSplitting;
            if (jl.contains("g")) g = number_field(jl, "g", lw);
            if (!(m > 0.0)) throw ValidationError(lw + "m: must be > 0");
            if (!(beta > 0.0)) throw ValidationError(lw + "beta: must be > 0");
            if (!(g > 0.0)) throw ValidationError(lw + "g: must be > 0");

            const nlohmann::json count = require_field(jl, "count", lw);
            if (!count.is_number_integer() || count.get<long long>() < 1) {
                throw ValidationError(lw + "count: must be an integer >= 1");
            }
            const nlohmann::json sign = require_field(jl, "sign", lw);
            if (!sign.is_number_integer() ||
                (sign.get<long long>() != 1 && sign.get<long long>() != -1)) {
                throw ValidationError(lw + "sign: must be -1 or 1");
            }

            LayerGroup group;
            group.params = LayerParams(J, m, beta, g);
            group.count = count.get<int>();
            group.sign = static_cast<int>(sign.get<long long>());
            space.layers.push_back(group);
        }
        config.spaces.push_back(std::move(space));
    }

    validate_scenario(config);
    return config;
}

ScenarioConfig parse_scenario(const std::filesystem::path& path) {
    std::ifstream in = open_file(path);
    try {
        return parse_scenario(in);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

ScenarioConfig parse_scenario_text(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in);
}

} // namespace attcoh::io
