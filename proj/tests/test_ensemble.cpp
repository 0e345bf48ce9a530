#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "attcoh/ensemble.hpp"
#include "oracle.hpp"

using namespace attcoh;

namespace {

ScenarioConfig single_layer_config(int n, std::uint64_t seed,
                                   OutputMode mode = OutputMode::raw_charge) {
    ScenarioConfig config;
    config.seed = seed;
    config.output_mode = mode;
    config.spaces = {{"opinion", {{LayerParams(7.5, 0.552, 0.1), n, +1}}}};
    return config;
}

double layer_mean_at(const ResponseMatrix& m, int b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) sum += m.at(i, b);
    return sum / static_cast<double>(m.rows());
}

} // namespace

TEST_CASE("build_population lays out the configured roster") {
    ScenarioConfig config;
    config.seed = 1;
    config.spaces = {{"action",
                      {{LayerParams(7.5, 0.554, 0.099), 24, +1},
                       {LayerParams(5.5, 0.567, 0.088), 18, +1},
                       {LayerParams(4.5, 0.531, 0.139), 12, +1},
                       {LayerParams(3.5, 0.526, 0.190), 43, +1}}}};
    const Population pop = build_population(config).front();
    CHECK(pop.size() == 97);
    CHECK(pop.participant_ids.front() == "1");
    CHECK(pop.participant_ids.back() == "97");
    CHECK(pop.agent_group[0] == 0);
    CHECK(pop.agent_group[23] == 0);
    CHECK(pop.agent_group[24] == 1);
    CHECK(pop.agent_group[96] == 3);
    CHECK(pop.layer(0).J == 7.5);
    CHECK(pop.layer(96).J == 3.5);
}

TEST_CASE("scenario validation") {
    ScenarioConfig config = single_layer_config(97, 1);
    CHECK_NOTHROW(validate_scenario(config));

    SUBCASE("empty layer list") {
        config.spaces[0].layers.clear();
        CHECK_THROWS_AS(validate_scenario(config), ValidationError);
    }
    SUBCASE("bad sign") {
        config.spaces[0].layers[0].sign = 0;
        CHECK_THROWS_AS(validate_scenario(config), ValidationError);
    }
    SUBCASE("rosters must match across spaces") {
        config.spaces.push_back({"emotion", {{LayerParams(6.5, 0.515, 0.073), 26, +1}}});
        CHECK_THROWS_AS(validate_scenario(config), ValidationError);
    }
    SUBCASE("no spaces") {
        config.spaces.clear();
        CHECK_THROWS_AS(validate_scenario(config), ValidationError);
    }
}

TEST_CASE("sampling determinism") {
    const ScenarioConfig config = single_layer_config(500, 99);
    const Population pop = build_population(config).front();

    const ResponseMatrix a = sample_responses(pop, 12, 99, OutputMode::raw_charge);
    const ResponseMatrix b = sample_responses(pop, 12, 99, OutputMode::raw_charge);
    CHECK(a.values == b.values);

    const ResponseMatrix serial =
        sample_responses(pop, 12, 99, OutputMode::raw_charge, Execution::serial);
    CHECK(a.values == serial.values);   // thread schedule cannot matter

    const ResponseMatrix other = sample_responses(pop, 12, 100, OutputMode::raw_charge);
    CHECK(a.values != other.values);
}

TEST_CASE("sample mean approaches the closed-form charge") {
    const int n = 100'000;
    const Population pop = build_population(single_layer_config(n, 7)).front();
    const ResponseMatrix matrix = sample_responses(pop, 12, 7, OutputMode::raw_charge);

    const double expect = oracle::mean_charge(7.5, 2.0, 0.552, 0.1, 12.0);
    CHECK(expect == doctest::Approx(7.88).epsilon(2e-4));
    const double se = oracle::mean_se(7.5, 2.0, 0.552, 0.1, 12.0, n);
    CHECK(std::abs(layer_mean_at(matrix, 12) - expect) < 4.0 * se);
}

TEST_CASE("law of large numbers scaling") {
    // rms deviation of the sample mean shrinks like 1/sqrt(N)
    const double expect = oracle::mean_charge(7.5, 2.0, 0.552, 0.1, 6.0);
    auto rms_dev = [&](int n) {
        double acc = 0.0;
        const int reps = 20;
        for (int r = 0; r < reps; ++r) {
            const Population pop =
                build_population(single_layer_config(n, 1000 + r)).front();
            const ResponseMatrix m =
                sample_responses(pop, 6, 1000 + r, OutputMode::raw_charge);
            const double d = layer_mean_at(m, 6) - expect;
            acc += d * d;
        }
        return std::sqrt(acc / reps);
    };
    const double ratio = rms_dev(100) / rms_dev(10'000);
    CHECK(ratio > 5.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("sign symmetry") {
    ScenarioConfig config = single_layer_config(20'000, 11);
    const ResponseMatrix plus =
        sample_responses(build_population(config).front(), 12, 11, OutputMode::raw_charge);
    config.spaces[0].layers[0].sign = -1;
    const ResponseMatrix minus =
        sample_responses(build_population(config).front(), 12, 11, OutputMode::raw_charge);

    const double se = oracle::mean_se(7.5, 2.0, 0.552, 0.1, 12.0, 20'000);
    CHECK(std::abs(layer_mean_at(plus, 12) + layer_mean_at(minus, 12)) < 8.0 * se);
}

TEST_CASE("questionnaire projection stays on the instrument scale") {
    CHECK(questionnaire_project(8.28) == 8.0);
    CHECK(questionnaire_project(4.5) == 5.0);
    CHECK(questionnaire_project(-3.2) == 0.0);
    CHECK(questionnaire_project(11.0) == 8.0);

    ScenarioConfig config;
    config.seed = 3;
    config.spaces = {{"mixed",
                      {{LayerParams(7.5, 0.552, 0.1), 300, +1},
                       {LayerParams(3.5, 0.526, 0.19), 300, -1}}}};
    const Population pop = build_population(config).front();
    const ResponseMatrix matrix = sample_responses(pop, 12, 3, OutputMode::questionnaire);
    for (double v : matrix.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 8.0);
        CHECK(v == std::round(v));
    }
}

TEST_CASE("ensemble mean trajectory") {
    SUBCASE("constant matrix has zero variance") {
        ResponseMatrix m;
        m.space = "x";
        m.mode = OutputMode::raw_charge;
        m.stimulus_count = 4;
        m.participants = {"1", "2", "3"};
        m.values.assign(12, 2.5);
        const TrajectoryStats stats = ensemble_mean_trajectory(m);
        for (double v : stats.mean) CHECK(v == 2.5);
        for (double v : stats.variance) CHECK(v == 0.0);
    }
    SUBCASE("empty matrix rejected") {
        ResponseMatrix m;
        m.stimulus_count = 4;
        CHECK_THROWS_AS(ensemble_mean_trajectory(m), ValidationError);
    }
    SUBCASE("mean tracks the model, variance the fluctuation identity") {
        const int n = 100'000;
        const Population pop = build_population(single_layer_config(n, 21)).front();
        const ResponseMatrix matrix = sample_responses(pop, 12, 21, OutputMode::raw_charge);
        const TrajectoryStats stats = ensemble_mean_trajectory(matrix);
        for (int b = 1; b <= 12; ++b) {
            const double expect = oracle::mean_charge(7.5, 2.0, 0.552, 0.1, b);
            const double se = oracle::mean_se(7.5, 2.0, 0.552, 0.1, b, n);
            CHECK(std::abs(stats.mean[b - 1] - expect) < 4.0 * se);
        }
        // raw-charge variance at the final stimulus: 0.6012 by the
        // fluctuation-dissipation oracle
        const double var_expect = oracle::charge_variance(7.5, 2.0, 0.552, 0.1, 12.0);
        CHECK(var_expect == doctest::Approx(0.60117).epsilon(1e-4));
        const double var_se = oracle::variance_se(7.5, 2.0, 0.552, 0.1, 12.0, n);
        CHECK(std::abs(stats.variance[11] - var_expect) < 4.0 * var_se);
    }
}

TEST_CASE("polarization split") {
    SUBCASE("single-sign population never flags") {
        const Population pop = build_population(single_layer_config(2000, 5)).front();
        const ResponseMatrix matrix = sample_responses(pop, 12, 5, OutputMode::raw_charge);
        const PolarizationSplit split = polarization_split(matrix, pop);
        CHECK(split.groups.size() == 1);
        CHECK_FALSE(split.polarized);
    }
    SUBCASE("symmetric two-sign population polarizes") {
        ScenarioConfig config;
        config.seed = 17;
        config.spaces = {{"opinion",
                          {{LayerParams(7.5, 0.552, 0.1), 10'000, +1},
                           {LayerParams(7.5, 0.552, 0.1), 10'000, -1}}}};
        const Population pop = build_population(config).front();
        const ResponseMatrix matrix = sample_responses(pop, 12, 17, OutputMode::raw_charge);
        const PolarizationSplit split = polarization_split(matrix, pop);
        REQUIRE(split.groups.size() == 2);
        CHECK(split.polarized);

        // the two plateaus straddle zero symmetrically
        const double expect = oracle::mean_charge(7.5, 2.0, 0.552, 0.1, 12.0);
        const double se = oracle::mean_se(7.5, 2.0, 0.552, 0.1, 12.0, 10'000);
        CHECK(std::abs(split.groups[0].mean.back() - expect) < 4.0 * se);
        CHECK(std::abs(split.groups[1].mean.back() + expect) < 4.0 * se);

        double grand = 0.0;
        for (std::size_t i = 0; i < matrix.rows(); ++i) grand += matrix.at(i, 12);
        grand /= static_cast<double>(matrix.rows());
        CHECK(std::abs(grand) < 4.0 * se);   // symmetric within sampling error
    }
    SUBCASE("mixed signs and constraints give distinct group plateaus") {
        ScenarioConfig config;
        config.seed = 23;
        config.spaces = {{"mixed",
                          {{LayerParams(7.5, 0.552, 0.1), 4000, +1},
                           {LayerParams(7.5, 0.552, 0.1), 4000, -1},
                           {LayerParams(3.5, 0.526, 0.19), 4000, +1},
                           {LayerParams(3.5, 0.526, 0.19), 4000, -1}}}};
        const Population pop = build_population(config).front();
        const ResponseMatrix matrix = sample_responses(pop, 12, 23, OutputMode::raw_charge);
        const PolarizationSplit split = polarization_split(matrix, pop);
        REQUIRE(split.plateaus.size() == 4);
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = i + 1; j < 4; ++j) {
                CHECK(std::abs(split.plateaus[i].value - split.plateaus[j].value) > 0.5);
            }
        }
    }
}
