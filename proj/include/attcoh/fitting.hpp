#pragma once

#include <vector>

#include "attcoh/model.hpp"

namespace attcoh {

// Mean-charge trajectory of one layer with its constraint fixed; the free
// parameters (m, beta) are estimated against it.
struct FitInput {
    std::vector<double> stimulus;      // strictly increasing, length >= 3
    std::vector<double> mean_charge;   // same length
    double J = 0.5;
    double g = kDefaultSplitting;
};

struct FitResult {
    double m = 0.0;
    double beta = 0.0;
    double r_squared = 0.0;
    double sse = 0.0;
    std::vector<double> residuals;   // data - model
    bool converged = false;
    int iterations = 0;              // iterations spent by the winning start
    int starts_tried = 0;
    double J = 0.5;
    double g = kDefaultSplitting;
};

// Sum of squared deviations between the trajectory and the closed-form mean
// charge at (m, beta).
double sse(const FitInput& input, double m, double beta);

// Least-squares estimate of (m, beta), both positive. BFGS with central
// finite-difference gradients (1e-6 relative step), multistarted over
// m in {0.3..0.8 step 0.1} x beta in {0.02, 0.05, 0.1, 0.2, 0.4}; a start
// converges when the gradient norm drops below 1e-8 or the step below
// 1e-10. The lowest-sse start wins. Throws NumericalError on constant
// (non-identifiable) data.
FitResult fit_layer(const FitInput& input);

struct ResidualDiagnostic {
    double mean_residual = 0.0;
    double sign_balance = 0.5;   // fraction of positive residuals among nonzero ones
    double skewness = 0.0;
    bool symmetric = true;       // |sign_balance - 0.5| <= 0.25 and |skewness| <= 1
};

ResidualDiagnostic residual_symmetry(const FitResult& fit);

} // namespace attcoh
