#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>

#include "retrial/distributions.hpp"
#include "retrial/errors.hpp"

namespace retrial {

enum class CallType { inbound = 1, outbound = 2 };

/// One instance of the unreliable retrial queue with coupled switching.
///
/// Inbound calls arrive at rate `lambda`; blocked ones join the orbit and each
/// retries at rate `nu`. An idle server places an outgoing call at rate `alpha`.
/// While serving a type-i call the server fails at rate beta_i and is repaired
/// with law repair_i; service resumes where it stopped.
struct ModelParams {
    double lambda = 1.0;
    double alpha = 0.0;
    double nu = 1.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    Distribution service1;
    Distribution service2;
    Distribution repair1;
    Distribution repair2;

    double beta(CallType i) const { return i == CallType::inbound ? beta1 : beta2; }
    const Distribution& service(CallType i) const {
        return i == CallType::inbound ? service1 : service2;
    }
    const Distribution& repair(CallType i) const {
        return i == CallType::inbound ? repair1 : repair2;
    }

    bool all_exponential() const {
        return service1.is_exponential() && service2.is_exponential() &&
               repair1.is_exponential() && repair2.is_exponential();
    }

    void validate() const {
        auto finite = [](double v) { return std::isfinite(v); };
        if (!(lambda > 0.0) || !finite(lambda)) throw ParameterError("lambda must be > 0");
        if (!(nu > 0.0) || !finite(nu)) throw ParameterError("nu must be > 0");
        if (!(alpha >= 0.0) || !finite(alpha)) throw ParameterError("alpha must be >= 0");
        if (!(beta1 >= 0.0) || !finite(beta1)) throw ParameterError("beta1 must be >= 0");
        if (!(beta2 >= 0.0) || !finite(beta2)) throw ParameterError("beta2 must be >= 0");
    }
};

/// Composite load quantities. "busy" refers to the generalized service time B_i,
/// i.e. service stretched by the repairs that interrupt it.
struct LoadSummary {
    double rho = 0.0;        ///< lambda * mu_{1,1}
    double sigma = 0.0;      ///< alpha * mu_{2,1}
    double rho_eff = 0.0;    ///< rho * (1 + beta1 gamma_{1,1})
    double sigma_eff = 0.0;  ///< sigma * (1 + beta2 gamma_{2,1})
    double busy_mean[2] = {0.0, 0.0};    ///< E[B_i]
    double busy_second[2] = {0.0, 0.0};  ///< E[B_i^2]

    double busy_mean_of(CallType i) const { return busy_mean[static_cast<int>(i) - 1]; }
    double busy_second_of(CallType i) const { return busy_second[static_cast<int>(i) - 1]; }
    /// Mean residual generalized service time E[B_i^2] / (2 E[B_i]).
    double busy_residual_of(CallType i) const {
        return busy_second_of(i) / (2.0 * busy_mean_of(i));
    }
};

inline LoadSummary load_summary(const ModelParams& p) {
    LoadSummary s;
    for (CallType i : {CallType::inbound, CallType::outbound}) {
        const double mu1 = p.service(i).moment(1);
        const double mu2 = p.service(i).moment(2);
        const double g1 = p.repair(i).moment(1);
        const double g2 = p.repair(i).moment(2);
        const double stretch = 1.0 + p.beta(i) * g1;
        const int k = static_cast<int>(i) - 1;
        s.busy_mean[k] = mu1 * stretch;
        s.busy_second[k] = p.beta(i) * mu1 * g2 + stretch * stretch * mu2;
    }
    s.rho = p.lambda * p.service1.moment(1);
    s.sigma = p.alpha * p.service2.moment(1);
    s.rho_eff = p.lambda * s.busy_mean[0];
    s.sigma_eff = p.alpha * s.busy_mean[1];
    return s;
}

/// Analytic operations refuse loads within this distance of the ergodicity boundary.
inline constexpr double stability_guard = 1e-9;

struct StabilityVerdict {
    bool stable;
    double rho_eff;
};

inline StabilityVerdict check_stability(const ModelParams& p) {
    const double rho_eff = load_summary(p).rho_eff;
    return {rho_eff < 1.0 - stability_guard, rho_eff};
}

inline std::string stability_message(double rho_eff) {
    std::ostringstream os;
    os.precision(17);
    os << "model is unstable: lambda*mu11*(1+beta1*gamma11) = " << rho_eff
       << " but ergodicity requires lambda*mu11*(1+beta1*gamma11) < 1";
    return os.str();
}

/// Throws StabilityError unless the model is ergodic.
inline LoadSummary require_stable(const ModelParams& p) {
    p.validate();
    LoadSummary s = load_summary(p);
    if (!(s.rho_eff < 1.0 - stability_guard)) {
        throw StabilityError(stability_message(s.rho_eff), s.rho_eff);
    }
    return s;
}

/// Mean one-step drift of the orbit size embedded at service completions,
/// given k customers in orbit. Tends to rho_eff - 1 as k grows.
inline double drift(const ModelParams& p, std::uint64_t k) {
    const LoadSummary s = load_summary(p);
    const double kn = static_cast<double>(k) * p.nu;
    const double denom = p.lambda + kn + p.alpha;
    const double outbound_load = p.lambda * s.busy_mean[1];
    return (kn * (s.rho_eff - 1.0) + p.lambda * s.rho_eff + p.alpha * outbound_load) / denom;
}

}  // namespace retrial
