#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>

#include "retrial/errors.hpp"
#include "retrial/random.hpp"

namespace retrial {

struct Exponential {
    double rate;
};

/// Erlang of order two: sum of two independent Exp(rate).
struct Erlang2 {
    double rate;
};

/// Mixture: with probability `weight` Exp(rate1), otherwise Exp(rate2).
struct Hyperexponential {
    double weight;
    double rate1;
    double rate2;
};

enum class DistributionKind { exponential, erlang2, hyperexponential };

/// Service or repair time law. Immutable once constructed; invalid parameters
/// are rejected at construction.
class Distribution {
public:
    using Law = std::variant<Exponential, Erlang2, Hyperexponential>;

    /// Exp(1); exists so parameter blocks can be default-initialised.
    Distribution() : law_(Exponential{1.0}) {}
    Distribution(Law law) : law_(law) { validate(); }  // NOLINT(google-explicit-constructor)

    static Distribution exponential(double rate) { return Distribution(Exponential{rate}); }
    static Distribution erlang2(double rate) { return Distribution(Erlang2{rate}); }
    static Distribution hyperexponential(double weight, double rate1, double rate2) {
        return Distribution(Hyperexponential{weight, rate1, rate2});
    }

    /// Exponential with the given mean; shorthand used throughout tests and configs.
    static Distribution exponential_mean(double mean) {
        if (!(mean > 0.0)) throw ParameterError("exponential mean must be positive");
        return exponential(1.0 / mean);
    }

    const Law& law() const noexcept { return law_; }

    DistributionKind kind() const noexcept {
        return static_cast<DistributionKind>(law_.index());
    }
    bool is_exponential() const noexcept { return kind() == DistributionKind::exponential; }

    /// Raw moment E[X^k], k in {1, 2}.
    double moment(int k) const {
        if (k != 1 && k != 2) {
            throw DomainError("moment order " + std::to_string(k) + " unsupported (only 1 and 2)");
        }
        const double fact = k == 1 ? 1.0 : 2.0;
        return std::visit(
            [&](const auto& d) -> double {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, Exponential>) {
                    return fact / std::pow(d.rate, k);
                } else if constexpr (std::is_same_v<T, Erlang2>) {
                    return k == 1 ? 2.0 / d.rate : 6.0 / (d.rate * d.rate);
                } else {
                    return d.weight * fact / std::pow(d.rate1, k) +
                           (1.0 - d.weight) * fact / std::pow(d.rate2, k);
                }
            },
            law_);
    }

    double mean() const { return moment(1); }

    /// Laplace-Stieltjes transform E[exp(-theta X)], theta >= 0.
    double laplace(double theta) const {
        check_theta(theta);
        return std::visit(
            [&](const auto& d) -> double {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, Exponential>) {
                    return d.rate / (d.rate + theta);
                } else if constexpr (std::is_same_v<T, Erlang2>) {
                    const double r = d.rate / (d.rate + theta);
                    return r * r;
                } else {
                    return d.weight * d.rate1 / (d.rate1 + theta) +
                           (1.0 - d.weight) * d.rate2 / (d.rate2 + theta);
                }
            },
            law_);
    }

    /// 1 - laplace(theta), evaluated without cancellation for small theta.
    double laplace_complement(double theta) const {
        check_theta(theta);
        return std::visit(
            [&](const auto& d) -> double {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, Exponential>) {
                    return theta / (d.rate + theta);
                } else if constexpr (std::is_same_v<T, Erlang2>) {
                    const double s = d.rate + theta;
                    return theta * (2.0 * d.rate + theta) / (s * s);
                } else {
                    return d.weight * theta / (d.rate1 + theta) +
                           (1.0 - d.weight) * theta / (d.rate2 + theta);
                }
            },
            law_);
    }

    double sample(RandomStream& rng) const {
        return std::visit(
            [&](const auto& d) -> double {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, Exponential>) {
                    return rng.exponential(d.rate);
                } else if constexpr (std::is_same_v<T, Erlang2>) {
                    const double first = rng.exponential(d.rate);
                    return first + rng.exponential(d.rate);
                } else {
                    const bool first_branch = rng.uniform() < d.weight;
                    return rng.exponential(first_branch ? d.rate1 : d.rate2);
                }
            },
            law_);
    }

    /// Same family and shape, all rates scaled so that the mean becomes `target_mean`.
    Distribution with_mean(double target_mean) const {
        if (!(target_mean > 0.0)) throw ParameterError("target mean must be positive");
        const double factor = mean() / target_mean;
        return std::visit(
            [&](const auto& d) -> Distribution {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, Hyperexponential>) {
                    return Distribution(Hyperexponential{d.weight, d.rate1 * factor, d.rate2 * factor});
                } else {
                    return Distribution(T{d.rate * factor});
                }
            },
            law_);
    }

    std::string describe() const {
        std::ostringstream os;
        std::visit(
            [&](const auto& d) {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, Exponential>) {
                    os << "exp(rate=" << d.rate << ")";
                } else if constexpr (std::is_same_v<T, Erlang2>) {
                    os << "erlang2(rate=" << d.rate << ")";
                } else {
                    os << "hyperexp(a=" << d.weight << ", rate1=" << d.rate1
                       << ", rate2=" << d.rate2 << ")";
                }
            },
            law_);
        return os.str();
    }

private:
    static void check_rate(double r, const char* name) {
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw ParameterError(std::string(name) + " must be a positive finite rate");
        }
    }

    static void check_theta(double theta) {
        if (!(theta >= 0.0)) throw DomainError("Laplace transform argument must be >= 0");
    }

    void validate() const {
        std::visit(
            [](const auto& d) {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, Hyperexponential>) {
                    check_rate(d.rate1, "rate1");
                    check_rate(d.rate2, "rate2");
                    if (!(d.weight >= 0.0 && d.weight <= 1.0)) {
                        throw ParameterError("hyperexponential weight must lie in [0, 1]");
                    }
                } else {
                    check_rate(d.rate, "rate");
                }
            },
            law_);
    }

    Law law_;
};

}  // namespace retrial
