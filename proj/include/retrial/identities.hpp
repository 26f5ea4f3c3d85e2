#pragma once

// Numerical consistency diagnostics for the closed-form analysis. Each returns
// the measured gap; callers compare it with their own tolerance.

#include <algorithm>
#include <array>
#include <cmath>

#include "retrial/analytic.hpp"
#include "retrial/model.hpp"

namespace retrial::identities {

inline constexpr std::array<double, 5> pgf_grid = {0.1, 0.3, 0.5, 0.7, 0.9};

/// |P(1 - eps) - 1| for the orbit PGF.
inline double orbit_normalization_gap(const ModelParams& p, double eps = 1e-7) {
    return std::abs(analytic::orbit_pgf(p, 1.0 - eps) - 1.0);
}

inline double system_normalization_gap(const ModelParams& p, double eps = 1e-7) {
    return std::abs(analytic::system_pgf(p, 1.0 - eps) - 1.0);
}

inline double relative_gap(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Largest relative difference between the closed-form orbit PGF and the sum of
/// the partial PGFs over `pgf_grid`.
inline double orbit_pgf_identity_gap(const ModelParams& p) {
    double worst = 0.0;
    for (double z : pgf_grid) {
        worst = std::max(worst, relative_gap(analytic::orbit_pgf(p, z),
                                             analytic::orbit_pgf_from_partials(p, z)));
    }
    return worst;
}

inline double system_pgf_identity_gap(const ModelParams& p) {
    double worst = 0.0;
    for (double z : pgf_grid) {
        worst = std::max(worst, relative_gap(analytic::system_pgf(p, z),
                                             analytic::system_pgf_from_partials(p, z)));
    }
    return worst;
}

/// One-sided second-order difference of the orbit PGF at z = 1:
/// P'(1) ~ (3 P(1) - 4 P(1-h) + P(1-2h)) / (2h).
inline double orbit_pgf_slope_at_one(const ModelParams& p, double h = 1e-5) {
    const double p1 = 1.0;
    const double ph = analytic::orbit_pgf(p, 1.0 - h);
    const double p2h = analytic::orbit_pgf(p, 1.0 - 2.0 * h);
    return (3.0 * p1 - 4.0 * ph + p2h) / (2.0 * h);
}

/// Relative gap between the difference quotient and the closed-form E[N].
inline double moment_derivative_gap(const ModelParams& p, double h = 1e-5) {
    return relative_gap(orbit_pgf_slope_at_one(p, h), analytic::mean_orbit_size(p));
}

/// |E[W_0] + E[W_1] + E[W_2] - E[N]/lambda| relative to E[W].
inline double wait_decomposition_gap(const ModelParams& p) {
    const auto w = analytic::mean_waiting_time(p);
    return relative_gap(w.parts.sum(), w.mean);
}

}  // namespace retrial::identities
