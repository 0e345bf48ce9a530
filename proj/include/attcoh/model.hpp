#pragma once

#include <vector>

#include "attcoh/errors.hpp"

namespace attcoh {

// Largest admissible personal constraint (15/2). Values are half-integer
// multiples of 1/2 up to this bound.
inline constexpr double kMaxSpin = 7.5;

// Default splitting factor used throughout the analyses.
inline constexpr double kDefaultSplitting = 2.0;

bool is_valid_spin(double J);

// Response law of one coherence layer. J caps the attainable extremity
// (2J+1 discrete levels), g and m scale level charge in questionnaire
// points, beta is the inverse social temperature. The mean response under
// a cumulative stimulus count B is g*J*m*brillouin(J, beta*g*J*m*B),
// saturating at g*J*m.
struct LayerParams {
    double J = 0.5;
    double g = kDefaultSplitting;
    double m = 0.0;
    double beta = 0.0;

    LayerParams() = default;
    LayerParams(double spin, double moment, double inv_temp,
                double splitting = kDefaultSplitting);

    int level_count() const;                                  // 2J+1
    double saturation_charge() const { return g * J * m; }    // asymptote of the mean
};

// Brillouin function
//   B_J(x) = ((2J+1)/(2J)) coth(((2J+1)/(2J)) x) - (1/(2J)) coth(x/(2J)).
// Odd, strictly increasing, |B_J| < 1. The coth singularity at x = 0 is
// handled by an odd series branch for |x| < 1e-6; both branches agree to
// better than 1e-10 at the switch point.
double brillouin(double J, double x);

// Occupancy of the 2J+1 levels sigma = -J, -J+1, ..., +J.
struct LevelDistribution {
    double J = 0.5;
    std::vector<double> probs;   // index i corresponds to sigma = -J + i

    double sigma(int i) const { return -J + i; }
    double mean_sigma() const;
    double mean_sigma_sq() const;
    // Fourth central moment of sigma; used for variance standard errors.
    double central_moment4() const;
};

// Boltzmann occupancy probs(sigma) ~ exp(beta*g*m*sigma*B). Its mean equals
// J*brillouin(J, beta*g*J*m*B). Requires B >= 0.
LevelDistribution level_distribution(const LayerParams& p, double B);

// Same occupancy at a signed field value; negative fields mirror the
// distribution. This is the route agents with negative coupling take.
LevelDistribution level_distribution_at_field(const LayerParams& p, double field);

// Mean attitudinal charge <U>(B) = g*J*m*brillouin(J, beta*g*J*m*B).
// Monotone non-decreasing in B, bounded by g*J*m.
double expected_charge(const LayerParams& p, double B);

// Var(U) = (g*m)^2 (<sigma^2> - <sigma>^2) of the level distribution.
// Equals (1/beta) d<U>/dB.
double exact_charge_variance(const LayerParams& p, double B);

// chi(B) = <U>(B)/B. Undefined at B = 0; use differential_susceptibility
// for the zero-field limit.
double susceptibility(const LayerParams& p, double B);

// Finite-difference d<U>/dB: central at B >= h, forward below.
double differential_susceptibility(const LayerParams& p, double B, double h = 1e-4);

} // namespace attcoh
