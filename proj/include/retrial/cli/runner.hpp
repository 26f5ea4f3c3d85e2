#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "retrial/analytic.hpp"
#include "retrial/cli/config.hpp"
#include "retrial/ctmc_oracle.hpp"
#include "retrial/identities.hpp"
#include "retrial/simulator.hpp"

namespace retrial::cli {

inline constexpr int metric_count = 6;
inline constexpr std::array<const char*, metric_count> metric_names = {"e_n", "e_m", "p_a",
                                                                       "p_f", "p_w", "e_w"};

using MetricVector = std::array<double, metric_count>;

inline MetricVector to_vector(const SteadyStateMetrics& m) {
    return {m.mean_orbit, m.mean_system, m.availability, m.failure_frequency,
            m.orbit_entry_prob, m.mean_wait};
}

/// One output line: an engine's metrics at one parameter point.
struct ResultRow {
    std::string param;             ///< swept parameter, empty for single-point runs
    std::optional<double> value;   ///< its value at this row
    Engine engine = Engine::analytic;
    bool stable = true;
    double rho_eff = 0.0;
    std::optional<MetricVector> metrics;      ///< empty for unstable sweep rows
    std::optional<MetricVector> half_widths;  ///< simulation rows only
    std::optional<WaitDecomposition> wait_parts;
    std::optional<int> oracle_n_max;
};

inline ResultRow evaluate(const ModelParams& p, Engine engine, const RunConfig& cfg) {
    ResultRow row;
    row.engine = engine;
    const auto verdict = check_stability(p);
    row.stable = verdict.stable;
    row.rho_eff = verdict.rho_eff;
    switch (engine) {
        case Engine::analytic: {
            const auto m = analytic::metrics(p);
            row.metrics = to_vector(m);
            row.wait_parts = m.wait_decomposition;
            break;
        }
        case Engine::oracle: {
            const auto r = ctmc::solve(p, cfg.oracle);
            row.metrics = to_vector(r.metrics);
            row.oracle_n_max = r.n_max;
            break;
        }
        case Engine::simulate: {
            const auto e = sim::estimate(p, cfg.sim.value_or(sim::SimConfig{}));
            row.metrics = MetricVector{e.mean_orbit.point, e.mean_system.point, e.availability.point,
                                       e.failure_frequency.point, e.orbit_entry_prob.point,
                                       e.mean_wait.point};
            row.half_widths = MetricVector{e.mean_orbit.half_width, e.mean_system.half_width,
                                           e.availability.half_width, e.failure_frequency.half_width,
                                           e.orbit_entry_prob.half_width, e.mean_wait.half_width};
            break;
        }
    }
    return row;
}

/// Single-point evaluation. Analytic and oracle engines throw StabilityError on an
/// unstable model; the simulator runs regardless and its row is flagged.
inline std::vector<ResultRow> run_point(const RunConfig& cfg, const std::vector<Engine>& engines) {
    std::vector<ResultRow> rows;
    for (Engine e : engines) rows.push_back(evaluate(cfg.model, e, cfg));
    return rows;
}

/// Evaluates every grid point in order. Unstable points yield rows with no metrics.
inline std::vector<ResultRow> run_sweep(const RunConfig& cfg, const SweepSpec& sweep) {
    if (sweep.values.empty()) throw ConfigError("sweep.values", "grid is empty");
    for (std::size_t i = 1; i < sweep.values.size(); ++i) {
        if (!(sweep.values[i] > sweep.values[i - 1])) {
            throw ConfigError("sweep.values[" + std::to_string(i) + "]", "grid must be strictly ascending");
        }
    }
    std::vector<ModelParams> points;
    points.reserve(sweep.values.size());
    for (std::size_t i = 0; i < sweep.values.size(); ++i) {
        const std::string path = "sweep.values[" + std::to_string(i) + "]";
        points.push_back(detail::wrap(path, [&] {
            return with_parameter(cfg.model, sweep.param, sweep.values[i]);
        }));
    }

    std::vector<ResultRow> rows;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto verdict = check_stability(points[i]);
        for (Engine e : sweep.engines) {
            ResultRow row;
            if (verdict.stable) {
                row = evaluate(points[i], e, cfg);
            } else {
                row.engine = e;
                row.stable = false;
                row.rho_eff = verdict.rho_eff;
            }
            row.param = sweep.param;
            row.value = sweep.values[i];
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

enum class CheckStatus { pass, fail, skipped };

inline const char* status_name(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::skipped: return "skipped";
    }
    return "?";
}

struct Check {
    std::string name;
    CheckStatus status = CheckStatus::skipped;
    double value = NAN;      ///< measured gap (or covered count)
    double tolerance = NAN;  ///< threshold the value is compared against
    std::string detail;
};

struct ValidationReport {
    std::vector<Check> checks;

    bool passed() const {
        for (const auto& c : checks) {
            if (c.status == CheckStatus::fail) return false;
        }
        return true;
    }
};

struct ValidationOptions {
    /// Test hook: analytic metrics are multiplied by (1 + perturbation) before
    /// being compared with the other engines.
    double analytic_perturbation = 0.0;
    bool run_simulation = true;
};

inline constexpr double oracle_rel_tol = 1e-6;
inline constexpr double normalization_tol = 1e-4;
inline constexpr double pgf_identity_tol = 1e-9;
inline constexpr double moment_derivative_tol = 1e-4;
inline constexpr double exact_identity_tol = 1e-12;
inline constexpr int coverage_required = 5;

inline ValidationReport validate(const RunConfig& cfg, const ValidationOptions& opt = {}) {
    ValidationReport report;
    const ModelParams& p = cfg.model;
    auto add = [&](std::string name, double value, double tol, std::string detail = {}) {
        report.checks.push_back({std::move(name), value <= tol ? CheckStatus::pass : CheckStatus::fail,
                                 value, tol, std::move(detail)});
    };

    const auto verdict = check_stability(p);
    {
        std::ostringstream os;
        os.precision(17);
        os << "rho_eff=" << verdict.rho_eff;
        report.checks.push_back({"stability", verdict.stable ? CheckStatus::pass : CheckStatus::fail,
                                 verdict.rho_eff, 1.0 - stability_guard, os.str()});
    }
    if (!verdict.stable) return report;

    add("normalization_orbit", identities::orbit_normalization_gap(p), normalization_tol);
    add("normalization_system", identities::system_normalization_gap(p), normalization_tol);
    add("pgf_identity_orbit", identities::orbit_pgf_identity_gap(p), pgf_identity_tol);
    add("pgf_identity_system", identities::system_pgf_identity_gap(p), pgf_identity_tol);
    add("moment_derivative", identities::moment_derivative_gap(p), moment_derivative_tol);

    const SteadyStateMetrics a = analytic::metrics(p);
    add("mean_system_identity", std::abs(a.mean_system - a.mean_orbit - a.orbit_entry_prob),
        exact_identity_tol);
    add("little_law_analytic", identities::relative_gap(a.mean_wait * p.lambda, a.mean_orbit),
        4.0 * std::numeric_limits<double>::epsilon());
    add("wait_decomposition", identities::wait_decomposition_gap(p), pgf_identity_tol);

    MetricVector analytic_values = to_vector(a);
    for (double& v : analytic_values) v *= 1.0 + opt.analytic_perturbation;

    // Oracle leg: E[W] is E[N]/lambda on both sides, so only the first five are compared.
    if (p.all_exponential()) {
        const auto o = to_vector(ctmc::solve(p, cfg.oracle).metrics);
        for (int k = 0; k < 5; ++k) {
            add(std::string("oracle_") + metric_names[k],
                identities::relative_gap(analytic_values[k], o[k]), oracle_rel_tol);
        }
    } else {
        for (int k = 0; k < 5; ++k) {
            report.checks.push_back({std::string("oracle_") + metric_names[k], CheckStatus::skipped,
                                     NAN, oracle_rel_tol, "oracle needs exponential laws"});
        }
    }

    if (opt.run_simulation) {
        const auto e = sim::estimate(p, cfg.sim.value_or(sim::SimConfig{}));
        const std::array<const sim::MetricEstimate*, metric_count> est = {
            &e.mean_orbit, &e.mean_system, &e.availability,
            &e.failure_frequency, &e.orbit_entry_prob, &e.mean_wait};
        int covered = 0;
        std::string missed;
        for (int k = 0; k < metric_count; ++k) {
            if (est[k]->covers(analytic_values[k])) {
                ++covered;
            } else {
                missed += missed.empty() ? "" : " ";
                missed += metric_names[k];
            }
        }
        report.checks.push_back({"simulation_coverage",
                                 covered >= coverage_required ? CheckStatus::pass : CheckStatus::fail,
                                 static_cast<double>(covered), static_cast<double>(coverage_required),
                                 missed.empty() ? "all metrics covered" : "not covered: " + missed});
        const double little_gap = std::abs(e.mean_wait.point * p.lambda - e.mean_orbit.point);
        report.checks.push_back({"little_law_simulation",
                                 little_gap <= e.mean_orbit.half_width ? CheckStatus::pass : CheckStatus::fail,
                                 little_gap, e.mean_orbit.half_width, "|lambda*W - N| vs E[N] half-width"});
    } else {
        report.checks.push_back({"simulation_coverage", CheckStatus::skipped, NAN, NAN, "disabled"});
    }
    return report;
}

}  // namespace retrial::cli
