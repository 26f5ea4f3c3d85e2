#pragma once

// Closed-form steady state of the unreliable M/G/1 retrial queue with coupled
// switching: generating-function kernel, orbit/system PGFs and the mean-value
// performance measures.
//
// Notation in comments: delta_i(z) is the PGF of the number of inbound arrivals
// during one generalized type-i service (service plus embedded repairs), and
// h_i(z) is the Laplace argument that produces it from the plain service law.

#include <cmath>
#include <sstream>

#include "retrial/distributions.hpp"
#include "retrial/errors.hpp"
#include "retrial/metrics.hpp"
#include "retrial/model.hpp"
#include "retrial/quadrature.hpp"

namespace retrial::analytic {

/// Absolute tolerance on the exponent integral of phi.
inline constexpr double phi_tolerance = 1e-10;
/// Within this distance of u = 1 the phi integrand is replaced by its limit.
inline constexpr double phi_singular_band = 1e-8;

namespace detail {

inline void check_unit_interval(double z) {
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError("z must lie in [0, 1]");
}

/// 1 - delta_i(z), computed without forming delta_i first.
inline double delta_complement(const ModelParams& p, CallType i, double z) {
    const double w = 1.0 - z;
    const double h = p.lambda * w + p.beta(i) * p.repair(i).laplace_complement(p.lambda * w);
    return p.service(i).laplace_complement(h);
}

}  // namespace detail

/// h_i(z) = lambda + beta_i - lambda z - beta_i R_i~(lambda - lambda z).
inline double kernel_h(const ModelParams& p, CallType i, double z) {
    detail::check_unit_interval(z);
    const double w = 1.0 - z;
    return p.lambda * w + p.beta(i) * p.repair(i).laplace_complement(p.lambda * w);
}

/// delta_i(z) = S_i~(h_i(z)).
inline double kernel_delta(const ModelParams& p, CallType i, double z) {
    return p.service(i).laplace(kernel_h(p, i, z));
}

/// d delta_i / dz at z = 1, equal to lambda * mu_{i,1} * (1 + beta_i gamma_{i,1}).
inline double kernel_delta_slope_at_one(const ModelParams& p, CallType i) {
    return p.lambda * load_summary(p).busy_mean_of(i);
}

/// Integrand of the phi exponent,
/// [lambda (1 - delta_1(u)) + alpha (1 - delta_2(u))] / (nu [delta_1(u) - u]).
/// The 0/0 at u = 1 is replaced by its L'Hopital limit inside `phi_singular_band`.
inline double phi_integrand(const ModelParams& p, double u) {
    const double w = 1.0 - u;
    if (w <= phi_singular_band) {
        const double d1 = kernel_delta_slope_at_one(p, CallType::inbound);
        const double d2 = kernel_delta_slope_at_one(p, CallType::outbound);
        return (p.lambda * d1 + p.alpha * d2) / (p.nu * (1.0 - d1));
    }
    const double c1 = detail::delta_complement(p, CallType::inbound, u);
    const double c2 = p.alpha > 0.0 ? detail::delta_complement(p, CallType::outbound, u) : 0.0;
    return (p.lambda * c1 + p.alpha * c2) / (p.nu * (w - c1));
}

/// Integral of phi_integrand over [z, 1]; phi(z) = exp(-phi_exponent(z)).
inline double phi_exponent(const ModelParams& p, double z) {
    require_stable(p);
    detail::check_unit_interval(z);
    if (z == 1.0) return 0.0;
    const auto r = quad::integrate([&](double u) { return phi_integrand(p, u); }, z, 1.0,
                                   phi_tolerance);
    if (!r.converged) {
        std::ostringstream os;
        os << "phi quadrature did not converge at z=" << z << ": achieved error " << r.error
           << " > " << phi_tolerance;
        throw NumericError(os.str());
    }
    return r.value;
}

inline double phi(const ModelParams& p, double z) { return std::exp(-phi_exponent(p, z)); }

/// Partial generating functions of the server state at orbit-PGF argument z.
struct PartialPgfs {
    double idle = 0.0;        ///< P_0(z)
    double busy_in = 0.0;     ///< P~_1(z, 0)
    double busy_out = 0.0;    ///< P~_2(z, 0)
    double failed_in = 0.0;   ///< P~~_3(z, 0, 0)
    double failed_out = 0.0;  ///< P~~_4(z, 0, 0)

    double occupied() const { return busy_in + busy_out + failed_in + failed_out; }
    double sum() const { return idle + occupied(); }
};

/// Value of P_0 at z = 1: the probability that the server is idle.
inline double idle_probability(const LoadSummary& s) {
    return (1.0 - s.rho_eff) / (1.0 + s.sigma_eff);
}

/// Requires 0 <= z < 1; the limits at z = 1 come from the metric functions.
inline PartialPgfs partial_pgfs(const ModelParams& p, double z) {
    const LoadSummary s = require_stable(p);
    detail::check_unit_interval(z);
    if (z == 1.0) throw DomainError("partial PGFs are 0/0 at z = 1; use the metric functions");

    const double w = 1.0 - z;
    const double lw = p.lambda * w;
    const double c1 = detail::delta_complement(p, CallType::inbound, z);
    const double c2 = detail::delta_complement(p, CallType::outbound, z);
    const double h1 = kernel_h(p, CallType::inbound, z);
    const double h2 = kernel_h(p, CallType::outbound, z);

    PartialPgfs out;
    out.idle = idle_probability(s) * phi(p, z);
    out.busy_in = (lw + p.alpha * c2) * c1 / ((w - c1) * h1) * out.idle;
    out.busy_out = p.alpha * c2 / h2 * out.idle;
    out.failed_in = p.beta1 * p.repair1.laplace_complement(lw) / lw * out.busy_in;
    out.failed_out = p.beta2 * p.repair2.laplace_complement(lw) / lw * out.busy_out;
    return out;
}

/// Orbit-size PGF as the sum of the partial PGFs.
inline double orbit_pgf_from_partials(const ModelParams& p, double z) {
    return partial_pgfs(p, z).sum();
}

/// System-size PGF from the partials: every occupied-server state holds one extra call.
inline double system_pgf_from_partials(const ModelParams& p, double z) {
    const PartialPgfs pp = partial_pgfs(p, z);
    return pp.idle + z * pp.occupied();
}

/// Orbit-size PGF, P(z) = [lambda (1-z) + alpha (1 - delta_2)] / (lambda [delta_1 - z]) P_0(z).
inline double orbit_pgf(const ModelParams& p, double z) {
    const LoadSummary s = require_stable(p);
    detail::check_unit_interval(z);
    if (z == 1.0) return 1.0;
    const double w = 1.0 - z;
    const double c1 = detail::delta_complement(p, CallType::inbound, z);
    const double c2 = detail::delta_complement(p, CallType::outbound, z);
    const double p0 = idle_probability(s) * phi(p, z);
    return (p.lambda * w + p.alpha * c2) / (p.lambda * (w - c1)) * p0;
}

/// System-size PGF, R(z) = [lambda (1-z) delta_1 + alpha z (1 - delta_2)] / (lambda [delta_1 - z]) P_0(z).
inline double system_pgf(const ModelParams& p, double z) {
    const LoadSummary s = require_stable(p);
    detail::check_unit_interval(z);
    if (z == 1.0) return 1.0;
    const double w = 1.0 - z;
    const double c1 = detail::delta_complement(p, CallType::inbound, z);
    const double c2 = detail::delta_complement(p, CallType::outbound, z);
    const double p0 = idle_probability(s) * phi(p, z);
    return (p.lambda * w * (1.0 - c1) + p.alpha * z * c2) / (p.lambda * (w - c1)) * p0;
}

/// E[N]: generalized-service residual term for each call type plus the retrial term.
inline double mean_orbit_size(const ModelParams& p) {
    const LoadSummary s = require_stable(p);
    const double inbound = p.lambda * p.lambda * s.busy_second[0] / (2.0 * (1.0 - s.rho_eff));
    const double outbound = p.lambda * p.alpha * s.busy_second[1] / (2.0 * (1.0 + s.sigma_eff));
    const double retrial = p.lambda * (s.rho_eff + s.sigma_eff) / (p.nu * (1.0 - s.rho_eff));
    return inbound + outbound + retrial;
}

/// P_w: probability that an arriving inbound call finds the server occupied.
inline double orbit_entry_probability(const ModelParams& p) {
    const LoadSummary s = require_stable(p);
    return (s.rho_eff + s.sigma_eff) / (1.0 + s.sigma_eff);
}

/// E[M] = E[N] + P_w.
inline double mean_system_size(const ModelParams& p) {
    return mean_orbit_size(p) + orbit_entry_probability(p);
}

inline double availability(const ModelParams& p) {
    const LoadSummary s = require_stable(p);
    return ((1.0 + s.sigma) * (1.0 - s.rho_eff) + s.rho * (1.0 + s.sigma_eff)) /
           (1.0 + s.sigma_eff);
}

/// P_f = beta_1 P[busy-in] + beta_2 P[busy-out].
inline double failure_frequency(const ModelParams& p) {
    const LoadSummary s = require_stable(p);
    return s.rho * p.beta1 + s.sigma * p.beta2 * idle_probability(s);
}

struct WaitingTime {
    double mean = 0.0;  ///< E[W] = E[N] / lambda
    WaitDecomposition parts;
};

inline WaitingTime mean_waiting_time(const ModelParams& p) {
    const LoadSummary s = require_stable(p);
    const double en = mean_orbit_size(p);
    WaitingTime w;
    w.mean = en / p.lambda;
    w.parts.idle = orbit_entry_probability(p) / p.nu;
    w.parts.inbound = en * s.busy_mean[0] + s.rho_eff * s.busy_residual_of(CallType::inbound);
    w.parts.outbound = s.sigma_eff * idle_probability(s) * s.busy_residual_of(CallType::outbound) +
                       s.sigma_eff * w.parts.idle;
    return w;
}

inline SteadyStateMetrics metrics(const ModelParams& p) {
    require_stable(p);
    SteadyStateMetrics m;
    m.mean_orbit = mean_orbit_size(p);
    m.orbit_entry_prob = orbit_entry_probability(p);
    m.mean_system = m.mean_orbit + m.orbit_entry_prob;
    m.availability = availability(p);
    m.failure_frequency = failure_frequency(p);
    const WaitingTime w = mean_waiting_time(p);
    m.mean_wait = w.mean;
    m.wait_decomposition = w.parts;
    return m;
}

}  // namespace retrial::analytic
