#pragma once

#include <span>
#include <string>
#include <vector>

#include "attcoh/ensemble.hpp"

namespace attcoh {

// Named mean trajectories on a common stimulus grid.
struct TrajectoryBundle {
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;   // one trajectory per name
};

using Matrix = std::vector<std::vector<double>>;

// Pearson correlations between all trajectory pairs; unit diagonal.
// A zero-variance trajectory is rejected by name.
Matrix correlation_matrix(const TrajectoryBundle& bundle);

struct PcaResult {
    std::vector<double> eigenvalues;            // descending
    Matrix loadings;                            // loadings[var][component]
    std::vector<double> communalities;          // row sums of squared retained loadings
    int retained = 0;                           // eigenvalue > 1 components

    double variance_share() const;              // retained eigenvalue mass / variable count
};

// Eigendecomposition of a correlation matrix (cyclic Jacobi); components
// with eigenvalue strictly above 1 are retained and loadings are
// eigenvectors scaled by sqrt(eigenvalue).
PcaResult pca(const Matrix& corr);

// Squared Pearson correlation; identical to the R^2 of the simple linear
// regression in either direction.
double pairwise_r2(std::span<const double> a, std::span<const double> b);

// Right-closed histogram of the responses at stimulus B: bin i counts values
// in (edges[i], edges[i+1]], the first bin includes its lower edge.
std::vector<std::size_t> histogram(const ResponseMatrix& matrix, int B,
                                   std::span<const double> edges);

} // namespace attcoh
