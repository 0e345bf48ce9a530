#include "attcoh/fitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

namespace attcoh {

namespace {

constexpr double kGradTol = 1e-8;
constexpr double kStepTol = 1e-10;
constexpr int kMaxIterations = 300;

const std::array<double, 6> kStartM{0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
const std::array<double, 5> kStartBeta{0.02, 0.05, 0.1, 0.2, 0.4};

using Vec2 = std::array<double, 2>;

double norm2(const Vec2& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1]); }

void validate_input(const FitInput& input) {
    if (input.stimulus.size() != input.mean_charge.size()) {
        throw ValidationError("fit input: stimulus and charge lengths differ");
    }
    if (input.stimulus.size() < 3) {
        throw ValidationError("fit input: need at least 3 points");
    }
    for (std::size_t i = 1; i < input.stimulus.size(); ++i) {
        if (!(input.stimulus[i] > input.stimulus[i - 1])) {
            throw ValidationError("fit input: stimulus values must be strictly increasing");
        }
    }
    if (!is_valid_spin(input.J)) throw ValidationError("fit input: invalid J");
    if (!(input.g > 0.0)) throw ValidationError("fit input: g must be positive");
}

double objective(const FitInput& input, double m, double beta) {
    if (!(m > 0.0) || !(beta > 0.0) || !std::isfinite(m) || !std::isfinite(beta)) {
        return std::numeric_limits<double>::infinity();
    }
    const LayerParams p(input.J, m, beta, input.g);
    double acc = 0.0;
    for (std::size_t i = 0; i < input.stimulus.size(); ++i) {
        const double d = input.mean_charge[i] - expected_charge(p, input.stimulus[i]);
        acc += d * d;
    }
    return acc;
}

Vec2 fd_gradient(const std::function<double(const Vec2&)>& f, const Vec2& x) {
    Vec2 g{};
    for (int i = 0; i < 2; ++i) {
        const double h = 1e-6 * std::max(std::abs(x[i]), 1e-8);
        Vec2 xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

struct BfgsOutcome {
    Vec2 x{};
    double fx = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

BfgsOutcome bfgs_minimize(const std::function<double(const Vec2&)>& f, Vec2 x) {
    BfgsOutcome out;
    double fx = f(x);
    if (!std::isfinite(fx)) {
        out.x = x;
        out.fx = fx;
        return out;
    }

    // inverse Hessian approximation, 2x2, starts at identity
    double h00 = 1.0, h01 = 0.0, h11 = 1.0;
    Vec2 grad = fd_gradient(f, x);

    for (int iter = 1; iter <= kMaxIterations; ++iter) {
        out.iterations = iter;
        if (norm2(grad) < kGradTol) {
            out.converged = true;
            break;
        }

        Vec2 dir{-(h00 * grad[0] + h01 * grad[1]), -(h01 * grad[0] + h11 * grad[1])};
        double slope = dir[0] * grad[0] + dir[1] * grad[1];
        if (!(slope < 0.0)) {   // not a descent direction, reset to steepest descent
            h00 = h11 = 1.0;
            h01 = 0.0;
            dir = {-grad[0], -grad[1]};
            slope = -(grad[0] * grad[0] + grad[1] * grad[1]);
        }

        // backtracking Armijo line search; infeasible (nonpositive) trial
        // points evaluate to +inf and get rejected the same way
        double t = 1.0;
        Vec2 xn{};
        double fn = 0.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            xn = {x[0] + t * dir[0], x[1] + t * dir[1]};
            fn = f(xn);
            if (std::isfinite(fn) && fn <= fx + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            // no progress possible along this direction at any representable step
            out.converged = true;
            break;
        }

        const Vec2 step{t * dir[0], t * dir[1]};
        const Vec2 grad_new = fd_gradient(f, xn);
        const Vec2 y{grad_new[0] - grad[0], grad_new[1] - grad[1]};
        const double sy = step[0] * y[0] + step[1] * y[1];

        if (sy > 1e-12 * norm2(step) * norm2(y)) {
            // BFGS update of the inverse Hessian:
            // H <- (I - r s y^T) H (I - r y s^T) + r s s^T, r = 1/(s^T y)
            const double r = 1.0 / sy;
            const double hy0 = h00 * y[0] + h01 * y[1];
            const double hy1 = h01 * y[0] + h11 * y[1];
            const double yhy = y[0] * hy0 + y[1] * hy1;
            const double c = (1.0 + r * yhy) * r;
            h00 += c * step[0] * step[0] - r * (step[0] * hy0 + step[0] * hy0);
            h01 += c * step[0] * step[1] - r * (step[0] * hy1 + step[1] * hy0);
            h11 += c * step[1] * step[1] - r * (step[1] * hy1 + step[1] * hy1);
        } else {
            h00 = h11 = 1.0;
            h01 = 0.0;
        }

        x = xn;
        fx = fn;
        grad = grad_new;

        if (norm2(step) < kStepTol) {
            out.converged = true;
            break;
        }
    }

    out.x = x;
    out.fx = fx;
    return out;
}

} // namespace

double sse(const FitInput& input, double m, double beta) {
    validate_input(input);
    if (!(m > 0.0) || !(beta > 0.0)) throw ValidationError("sse: m and beta must be positive");
    return objective(input, m, beta);
}

FitResult fit_layer(const FitInput& input) {
    validate_input(input);

    const auto [lo, hi] =
        std::minmax_element(input.mean_charge.begin(), input.mean_charge.end());
    if (*lo == *hi) {
        throw NumericalError("fit_layer: constant trajectory is non-identifiable");
    }

    auto f = [&input](const Vec2& x) { return objective(input, x[0], x[1]); };

    BfgsOutcome best;
    int starts = 0;
    for (double m0 : kStartM) {
        for (double beta0 : kStartBeta) {
            ++starts;
            BfgsOutcome run = bfgs_minimize(f, Vec2{m0, beta0});
            if (run.fx < best.fx) best = run;
        }
    }

    double mean = 0.0;
    for (double v : input.mean_charge) mean += v;
    mean /= static_cast<double>(input.mean_charge.size());
    double ss_tot = 0.0;
    for (double v : input.mean_charge) ss_tot += (v - mean) * (v - mean);

    FitResult result;
    result.m = best.x[0];
    result.beta = best.x[1];
    result.sse = best.fx;
    result.r_squared = 1.0 - best.fx / ss_tot;
    result.converged = best.converged;
    result.iterations = best.iterations;
    result.starts_tried = starts;
    result.J = input.J;
    result.g = input.g;

    const LayerParams p(input.J, result.m, result.beta, input.g);
    result.residuals.resize(input.stimulus.size());
    for (std::size_t i = 0; i < input.stimulus.size(); ++i) {
        result.residuals[i] = input.mean_charge[i] - expected_charge(p, input.stimulus[i]);
    }
    return result;
}

ResidualDiagnostic residual_symmetry(const FitResult& fit) {
    ResidualDiagnostic diag;
    const std::vector<double>& r = fit.residuals;
    if (r.empty()) return diag;

    double sum = 0.0;
    std::size_t positive = 0, nonzero = 0;
    for (double v : r) {
        sum += v;
        if (v > 0.0) ++positive;
        if (v != 0.0) ++nonzero;
    }
    diag.mean_residual = sum / static_cast<double>(r.size());
    diag.sign_balance =
        nonzero == 0 ? 0.5 : static_cast<double>(positive) / static_cast<double>(nonzero);

    double m2 = 0.0, m3 = 0.0;
    for (double v : r) {
        const double d = v - diag.mean_residual;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= static_cast<double>(r.size());
    m3 /= static_cast<double>(r.size());
    diag.skewness = m2 > 1e-300 ? m3 / std::pow(m2, 1.5) : 0.0;

    diag.symmetric = std::abs(diag.sign_balance - 0.5) <= 0.25 && std::abs(diag.skewness) <= 1.0;
    return diag;
}

} // namespace attcoh
