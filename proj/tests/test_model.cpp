#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "attcoh/model.hpp"
#include "oracle.hpp"

using namespace attcoh;

namespace {

const LayerParams kOpinion(7.5, 0.552, 0.100);   // the single opinion layer

std::vector<double> valid_spins() {
    std::vector<double> out;
    for (int k = 1; k <= 15; ++k) out.push_back(0.5 * k);
    return out;
}

} // namespace

TEST_CASE("spin validation") {
    for (double J : valid_spins()) CHECK(is_valid_spin(J));
    CHECK_FALSE(is_valid_spin(0.0));
    CHECK_FALSE(is_valid_spin(0.25));
    CHECK_FALSE(is_valid_spin(3.2));
    CHECK_FALSE(is_valid_spin(8.0));   // above the 15/2 cap
    CHECK_FALSE(is_valid_spin(-0.5));

    CHECK_THROWS_AS(brillouin(8.0, 1.0), ValidationError);
    CHECK_THROWS_AS(LayerParams(8.0, 0.5, 0.1), ValidationError);
    CHECK_THROWS_AS(LayerParams(7.5, -0.5, 0.1), ValidationError);
    CHECK_THROWS_AS(LayerParams(7.5, 0.5, 0.0), ValidationError);
    CHECK_THROWS_AS(LayerParams(7.5, 0.5, 0.1, -2.0), ValidationError);
    CHECK(LayerParams(7.5, 0.5, 0.1).g == kDefaultSplitting);
    CHECK(LayerParams(7.5, 0.5, 0.1).level_count() == 16);
    CHECK(LayerParams(0.5, 1.0, 1.0).level_count() == 2);
}

TEST_CASE("brillouin limits and identities") {
    CHECK(brillouin(7.5, 0.0) == 0.0);
    // saturation: the gap to 1 decays like 2b*exp(-2bx) with b = 1/(2J); at
    // x = 50 it is still ~1.7e-4 (the oracle agrees), 1e-10 needs x ~ 160+
    CHECK(brillouin(7.5, 50.0) ==
          doctest::Approx(oracle::boltzmann_moments(7.5, 50.0 / 7.5).mean_sigma / 7.5)
              .epsilon(1e-12));
    CHECK(1.0 - brillouin(7.5, 50.0) == doctest::Approx(2.0 / 15.0 * std::exp(-2.0 * 50.0 / 15.0))
                                            .epsilon(1e-2));
    CHECK(brillouin(7.5, 200.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(brillouin(7.5, -200.0) == doctest::Approx(-1.0).epsilon(1e-10));

    // two-level identity: B_{1/2}(x) = tanh(x)
    CHECK(brillouin(0.5, 1.0) == doctest::Approx(std::tanh(1.0)).epsilon(1e-14));
    for (double x : {0.1, 0.5, 2.0, 5.0}) {
        CHECK(brillouin(0.5, x) == doctest::Approx(std::tanh(x)).epsilon(1e-13));
    }

    // the Brillouin argument of the opinion layer at B = 12 is 9.936
    CHECK(kOpinion.beta * kOpinion.g * kOpinion.J * kOpinion.m * 12.0 ==
          doctest::Approx(9.936).epsilon(1e-12));
    CHECK(brillouin(7.5, 9.936) == doctest::Approx(0.95171589171481).epsilon(1e-12));
    // same value through the summation oracle
    const double by_sum = oracle::boltzmann_moments(7.5, 9.936 / 7.5).mean_sigma / 7.5;
    CHECK(brillouin(7.5, 9.936) == doctest::Approx(by_sum).epsilon(1e-13));
}

TEST_CASE("brillouin properties: odd, increasing, bounded") {
    for (double J : valid_spins()) {
        double prev = -1.0;
        for (double x = -6.0; x <= 6.0; x += 0.25) {
            const double v = brillouin(J, x);
            CHECK(std::abs(v) < 1.0);
            CHECK(v == doctest::Approx(-brillouin(J, -x)).epsilon(1e-14));
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("brillouin series branch") {
    // slope at 0 approaches (J+1)/(3J)
    for (double J : valid_spins()) {
        const double x = 1e-8;
        CHECK(brillouin(J, x) / x ==
              doctest::Approx((J + 1.0) / (3.0 * J)).epsilon(1e-6));
    }
    // the two branches agree across the switch point (the residual is the
    // true slope times the 2e-9 step plus ~1e-12 of branch mismatch)
    for (double J : {0.5, 2.0, 7.5}) {
        const double below = brillouin(J, 0.999999e-3);
        const double above = brillouin(J, 1.000001e-3);
        CHECK(std::abs(below - above) < 5e-9);
    }
    // deep inside the old cancellation region the series keeps full accuracy
    CHECK(brillouin(0.5, 5.5e-6) == doctest::Approx(std::tanh(5.5e-6)).epsilon(1e-12));
}

TEST_CASE("closed form equals direct summation on the full grid") {
    const double g = 2.0, m = 0.55, beta = 0.1;
    for (double J : valid_spins()) {
        for (double B = 0.0; B <= 20.0; B += 0.5) {
            const double closed = J * brillouin(J, beta * g * J * m * B);
            const double summed = oracle::boltzmann_moments(J, beta * g * m * B).mean_sigma;
            CHECK(std::abs(closed - summed) <= 1e-12);
        }
    }
}

TEST_CASE("level distribution") {
    SUBCASE("B = 0 is uniform") {
        const LevelDistribution dist = level_distribution(kOpinion, 0.0);
        CHECK(dist.probs.size() == 16);
        for (double p : dist.probs) CHECK(p == doctest::Approx(1.0 / 16).epsilon(1e-14));
    }
    SUBCASE("two-level Boltzmann weights") {
        const LayerParams p(0.5, 1.0, 1.0);   // g defaults to 2
        const LevelDistribution dist = level_distribution(p, 1.0);
        // exponents -+ beta*g*m*B/2 = -+1
        const double lo = std::exp(-1.0) / (std::exp(-1.0) + std::exp(1.0));
        CHECK(dist.probs[0] == doctest::Approx(lo).epsilon(1e-14));
        CHECK(dist.probs[1] == doctest::Approx(1.0 - lo).epsilon(1e-14));
    }
    SUBCASE("normalization and mean identity across a grid") {
        for (double J : {0.5, 2.5, 5.0, 7.5}) {
            const LayerParams p(J, 0.55, 0.1);
            for (double B = 0.0; B <= 20.0; B += 2.5) {
                const LevelDistribution dist = level_distribution(p, B);
                double total = 0.0;
                for (double q : dist.probs) {
                    CHECK(q >= 0.0);
                    total += q;
                }
                CHECK(std::abs(total - 1.0) <= 1e-12);
                CHECK(std::abs(dist.mean_sigma() -
                               J * brillouin(J, p.beta * p.g * J * p.m * B)) <= 1e-12);
            }
        }
    }
    SUBCASE("huge fields do not overflow") {
        const LevelDistribution dist = level_distribution(kOpinion, 1e6);
        CHECK(dist.probs.back() == doctest::Approx(1.0));
        CHECK(std::isfinite(dist.mean_sigma()));
    }
    CHECK_THROWS_AS(level_distribution(kOpinion, -1.0), ValidationError);
}

TEST_CASE("expected charge") {
    CHECK(expected_charge(kOpinion, 0.0) == 0.0);
    CHECK(expected_charge(kOpinion, 12.0) ==
          doctest::Approx(7.88020758340).epsilon(1e-11));
    CHECK(expected_charge(kOpinion, 12.0) ==
          doctest::Approx(oracle::mean_charge(7.5, 2.0, 0.552, 0.1, 12.0)).epsilon(1e-13));

    // saturation: g*J*m = 8.28, approached monotonically
    CHECK(kOpinion.saturation_charge() == doctest::Approx(8.28).epsilon(1e-12));
    CHECK(expected_charge(kOpinion, 1e6) ==
          doctest::Approx(8.28).epsilon(1e-9));
    double prev = -1.0;
    for (double B = 0.0; B <= 30.0; B += 0.5) {
        const double u = expected_charge(kOpinion, B);
        CHECK(u >= prev);
        CHECK(u <= kOpinion.saturation_charge());
        prev = u;
    }
}

TEST_CASE("charge variance") {
    SUBCASE("uniform value at B = 0") {
        for (double J : {0.5, 3.5, 7.5}) {
            const LayerParams p(J, 0.7, 0.2);
            const double expect = p.g * p.m * p.g * p.m * J * (J + 1.0) / 3.0;
            CHECK(exact_charge_variance(p, 0.0) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
    SUBCASE("collapses at saturation") {
        const LayerParams p(0.5, 1.0, 1.0);
        CHECK(exact_charge_variance(p, 50.0) < 1e-12);
    }
    SUBCASE("matches the summation oracle") {
        for (double B : {0.5, 3.0, 12.0}) {
            CHECK(exact_charge_variance(kOpinion, B) ==
                  doctest::Approx(oracle::charge_variance(7.5, 2.0, 0.552, 0.1, B))
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("fluctuation-dissipation: beta * Var(U) = d<U>/dB") {
    const double g = 2.0, m = 0.55, beta = 0.1, h = 1e-4;
    for (double J : valid_spins()) {
        const LayerParams p(J, m, beta, g);
        for (double B = 0.0; B <= 20.0; B += 0.5) {
            const double fd = differential_susceptibility(p, B, h);
            const double fluct = beta * exact_charge_variance(p, B);
            CHECK(fd == doctest::Approx(fluct).epsilon(1e-6));
        }
    }
}

TEST_CASE("susceptibility") {
    CHECK_THROWS_AS(susceptibility(kOpinion, 0.0), ValidationError);
    CHECK(susceptibility(kOpinion, 12.0) == doctest::Approx(0.65668).epsilon(1e-4));
    CHECK(susceptibility(kOpinion, 12.0) ==
          doctest::Approx(expected_charge(kOpinion, 12.0) / 12.0).epsilon(1e-15));

    // two-level closed form: chi = g*J*m*tanh(beta*g*J*m*B)/B
    const LayerParams two(0.5, 1.0, 1.0);
    CHECK(susceptibility(two, 1.0) == doctest::Approx(std::tanh(1.0)).epsilon(1e-13));
}

TEST_CASE("differential susceptibility") {
    SUBCASE("zero-field limit") {
        const double expect =
            kOpinion.beta * kOpinion.g * kOpinion.m * kOpinion.g * kOpinion.m *
            kOpinion.J * (kOpinion.J + 1.0) / 3.0;
        CHECK(differential_susceptibility(kOpinion, 0.0, 1e-4) ==
              doctest::Approx(expect).epsilon(1e-3));
    }
    SUBCASE("vanishes at saturation") {
        CHECK(differential_susceptibility(kOpinion, 1e4) < 1e-8);
    }
    SUBCASE("matches an independent central difference") {
        auto f = [](double B) { return expected_charge(kOpinion, B); };
        for (double B : {1.0, 6.0, 12.0}) {
            CHECK(differential_susceptibility(kOpinion, B) ==
                  doctest::Approx(oracle::central_difference(f, B, 1e-4)).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(differential_susceptibility(kOpinion, 1.0, 0.0), ValidationError);
}
