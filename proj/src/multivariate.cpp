#include "attcoh/multivariate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace attcoh {

namespace {

struct SeriesStats {
    double mean = 0.0;
    double sd = 0.0;   // population scaling; only ratios are used
};

SeriesStats series_stats(std::span<const double> v) {
    SeriesStats s;
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size()));
    return s;
}

double pearson(std::span<const double> a, std::span<const double> b,
               const SeriesStats& sa, const SeriesStats& sb) {
    double cov = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) cov += (a[i] - sa.mean) * (b[i] - sb.mean);
    cov /= static_cast<double>(a.size());
    return cov / (sa.sd * sb.sd);
}

// cyclic Jacobi eigendecomposition of a symmetric matrix; V ends up holding
// eigenvectors in its columns
void jacobi_eigen(Matrix a, std::vector<double>& eigenvalues, Matrix& vectors) {
    const std::size_t n = a.size();
    vectors.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) vectors[i][i] = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-26 * static_cast<double>(n * n)) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double tau = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = vectors[k][p], vkq = vectors[k][q];
                    vectors[k][p] = c * vkp - s * vkq;
                    vectors[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = a[i][i];
}

} // namespace

Matrix correlation_matrix(const TrajectoryBundle& bundle) {
    const std::size_t n = bundle.values.size();
    if (n < 2) throw ValidationError("correlation_matrix: need at least 2 trajectories");
    if (bundle.names.size() != n) {
        throw ValidationError("correlation_matrix: names and trajectories differ in count");
    }
    const std::size_t len = bundle.values.front().size();
    if (len < 2) throw ValidationError("correlation_matrix: trajectories too short");

    std::vector<SeriesStats> stats(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (bundle.values[i].size() != len) {
            throw ValidationError("correlation_matrix: trajectory lengths differ");
        }
        stats[i] = series_stats(bundle.values[i]);
        if (!(stats[i].sd > 0.0)) {
            throw ValidationError("correlation_matrix: zero variance trajectory \"" +
                                  bundle.names[i] + "\"");
        }
    }

    Matrix corr(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double r = pearson(bundle.values[i], bundle.values[j], stats[i], stats[j]);
            corr[i][j] = r;
            corr[j][i] = r;
        }
    }
    return corr;
}

double PcaResult::variance_share() const {
    if (eigenvalues.empty()) return 0.0;
    double retained_mass = 0.0;
    for (int k = 0; k < retained; ++k) retained_mass += eigenvalues[k];
    return retained_mass / static_cast<double>(eigenvalues.size());
}

PcaResult pca(const Matrix& corr) {
    const std::size_t n = corr.size();
    if (n == 0) throw ValidationError("pca: empty matrix");
    for (std::size_t i = 0; i < n; ++i) {
        if (corr[i].size() != n) throw ValidationError("pca: matrix is not square");
        if (std::abs(corr[i][i] - 1.0) > 1e-9) {
            throw ValidationError("pca: diagonal must be 1 (correlation matrix expected)");
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(corr[i][j] - corr[j][i]) > 1e-9) {
                throw ValidationError("pca: matrix is not symmetric");
            }
        }
    }

    std::vector<double> eigenvalues;
    Matrix vectors;
    jacobi_eigen(corr, eigenvalues, vectors);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return eigenvalues[a] > eigenvalues[b]; });

    PcaResult result;
    result.eigenvalues.resize(n);
    result.loadings.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        result.eigenvalues[k] = eigenvalues[src];

        // fix the eigenvector sign: largest-magnitude component positive
        std::size_t imax = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (std::abs(vectors[i][src]) > std::abs(vectors[imax][src])) imax = i;
        }
        const double flip = vectors[imax][src] < 0.0 ? -1.0 : 1.0;
        const double scale = std::sqrt(std::max(eigenvalues[src], 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            result.loadings[i][k] = flip * vectors[i][src] * scale;
        }
    }

    result.retained = static_cast<int>(
        std::count_if(result.eigenvalues.begin(), result.eigenvalues.end(),
                      [](double v) { return v > 1.0; }));

    result.communalities.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (int k = 0; k < result.retained; ++k) {
            result.communalities[i] += result.loadings[i][k] * result.loadings[i][k];
        }
    }
    return result;
}

double pairwise_r2(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw ValidationError("pairwise_r2: trajectories must share a length >= 2");
    }
    const SeriesStats sa = series_stats(a);
    const SeriesStats sb = series_stats(b);
    if (!(sa.sd > 0.0) || !(sb.sd > 0.0)) {
        throw ValidationError("pairwise_r2: zero variance trajectory");
    }
    const double r = pearson(a, b, sa, sb);
    return r * r;
}

std::vector<std::size_t> histogram(const ResponseMatrix& matrix, int B,
                                   std::span<const double> edges) {
    if (B < 1 || B > matrix.stimulus_count) {
        throw ValidationError("histogram: stimulus index out of range");
    }
    if (edges.size() < 2) throw ValidationError("histogram: need at least 2 edges");
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (!(edges[i] > edges[i - 1])) {
            throw ValidationError("histogram: edges must be strictly increasing");
        }
    }

    std::vector<std::size_t> counts(edges.size() - 1, 0);
    for (std::size_t row = 0; row < matrix.rows(); ++row) {
        const double v = matrix.at(row, B);
        if (v < edges.front() || v > edges.back()) continue;
        if (v == edges.front()) {   // the first bin is closed on both sides
            ++counts[0];
            continue;
        }
        for (std::size_t i = 1; i < edges.size(); ++i) {
            if (v <= edges[i]) {
                ++counts[i - 1];
                break;
            }
        }
    }
    return counts;
}

} // namespace attcoh
