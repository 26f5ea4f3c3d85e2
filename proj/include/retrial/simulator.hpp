#pragma once

// Discrete-event simulation of the retrial queue with coupled switching and
// active server failures (preemptive-resume repair), for any supported
// service/repair laws. Independent replications give Student-t intervals.

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "retrial/errors.hpp"
#include "retrial/model.hpp"
#include "retrial/random.hpp"

namespace retrial::sim {

enum class Mode : int { idle = 0, busy_in = 1, busy_out = 2, failed_in = 3, failed_out = 4 };

inline constexpr int mode_count = 5;

/// Mutable state of one trajectory.
struct ServerState {
    Mode mode = Mode::idle;
    double remaining_service = 0.0;  ///< frozen while failed
    double remaining_repair = 0.0;   ///< only meaningful while failed
    std::uint64_t orbit = 0;
};

struct SimConfig {
    double warmup = -1.0;  ///< negative: 10% of horizon
    double horizon = 1e5;  ///< measured time after warmup
    int replications = 20;
    std::uint64_t seed = 0x5EED5EEDULL;
    double confidence = 0.95;

    double effective_warmup() const { return warmup < 0.0 ? 0.1 * horizon : warmup; }

    void validate() const {
        if (!(horizon > 0.0)) throw ConfigError("sim.horizon", "must be > 0");
        if (replications < 2) {
            throw ConfigError("sim.replications", "at least 2 replications are needed for a variance estimate");
        }
        if (!(confidence > 0.0 && confidence < 1.0)) {
            throw ConfigError("sim.confidence", "must lie strictly between 0 and 1");
        }
    }
};

/// Event totals over the whole run, warmup included.
struct EventCounts {
    std::uint64_t arrivals = 0;
    std::uint64_t arrivals_served_immediately = 0;
    std::uint64_t retrials = 0;
    std::uint64_t successful_retrials = 0;
    std::uint64_t outgoing_initiated = 0;
    std::uint64_t failures = 0;
    std::uint64_t repairs = 0;
    std::uint64_t completed_in = 0;
    std::uint64_t completed_out = 0;

    EventCounts& operator+=(const EventCounts& o) {
        arrivals += o.arrivals;
        arrivals_served_immediately += o.arrivals_served_immediately;
        retrials += o.retrials;
        successful_retrials += o.successful_retrials;
        outgoing_initiated += o.outgoing_initiated;
        failures += o.failures;
        repairs += o.repairs;
        completed_in += o.completed_in;
        completed_out += o.completed_out;
        return *this;
    }
};

/// Time averages over the measurement window of one replication.
struct ReplicationResult {
    double mean_orbit = 0.0;
    double mean_system = 0.0;
    std::array<double, mode_count> mode_fraction{};
    double availability = 0.0;
    double failure_rate = 0.0;      ///< failures per unit time
    double orbit_entry_prob = 0.0;  ///< fraction of window arrivals that found the server occupied
    double mean_wait = 0.0;         ///< orbit residence per window arrival (0 for served-on-arrival)
    std::uint64_t window_arrivals = 0;

    EventCounts counts;
    ServerState final_state;
    /// Largest |busy time accumulated - drawn requirement| over completed services.
    double max_service_mismatch = 0.0;
};

namespace detail {

class Engine {
public:
    Engine(const ModelParams& p, std::uint64_t seed, double warmup, double horizon)
        : p_(p), rng_(seed), window_start_(warmup), window_end_(warmup + horizon) {}

    ReplicationResult run() {
        while (true) {
            const double exp_rate = exponential_rate();
            const double timer = deterministic_timer();
            const double exp_dt = exp_rate > 0.0 ? rng_.exponential(exp_rate) : INFINITY;
            const bool timer_fires = timer <= exp_dt;
            const double dt = timer_fires ? timer : exp_dt;
            if (now_ + dt >= window_end_) {
                advance(window_end_ - now_);
                break;
            }
            advance(dt);
            if (timer_fires) {
                on_timer();
            } else {
                on_exponential(exp_rate);
            }
        }
        return finish();
    }

private:
    bool in_window(double t) const { return t >= window_start_ && t <= window_end_; }

    double exponential_rate() const {
        double r = p_.lambda + static_cast<double>(state_.orbit) * p_.nu;
        switch (state_.mode) {
            case Mode::idle: r += p_.alpha; break;
            case Mode::busy_in: r += p_.beta1; break;
            case Mode::busy_out: r += p_.beta2; break;
            default: break;
        }
        return r;
    }

    double deterministic_timer() const {
        switch (state_.mode) {
            case Mode::busy_in:
            case Mode::busy_out: return state_.remaining_service;
            case Mode::failed_in:
            case Mode::failed_out: return state_.remaining_repair;
            default: return INFINITY;
        }
    }

    void advance(double dt) {
        // Accumulate the part of [now, now+dt] that lies inside the window.
        const double lo = std::max(now_, window_start_);
        const double hi = std::min(now_ + dt, window_end_);
        if (hi > lo) {
            const double span = hi - lo;
            const double n = static_cast<double>(state_.orbit);
            orbit_area_ += n * span;
            system_area_ += (n + (state_.mode == Mode::idle ? 0.0 : 1.0)) * span;
            mode_time_[static_cast<int>(state_.mode)] += span;
        }
        if (state_.mode == Mode::busy_in || state_.mode == Mode::busy_out) {
            state_.remaining_service -= dt;
            served_so_far_ += dt;
        } else if (state_.mode == Mode::failed_in || state_.mode == Mode::failed_out) {
            state_.remaining_repair -= dt;
        }
        now_ += dt;
    }

    void start_service(Mode mode, const Distribution& law) {
        state_.mode = mode;
        requirement_ = law.sample(rng_);
        state_.remaining_service = requirement_;
        served_so_far_ = 0.0;
    }

    void on_timer() {
        switch (state_.mode) {
            case Mode::busy_in:
            case Mode::busy_out: {
                max_mismatch_ = std::max(max_mismatch_, std::abs(served_so_far_ - requirement_));
                if (state_.mode == Mode::busy_in) {
                    ++counts_.completed_in;
                } else {
                    ++counts_.completed_out;
                }
                state_.mode = Mode::idle;
                state_.remaining_service = 0.0;
                break;
            }
            case Mode::failed_in:
            case Mode::failed_out:
                ++counts_.repairs;
                state_.mode = state_.mode == Mode::failed_in ? Mode::busy_in : Mode::busy_out;
                state_.remaining_repair = 0.0;
                break;
            default: break;
        }
    }

    void on_exponential(double total_rate) {
        double u = rng_.uniform() * total_rate;
        if ((u -= p_.lambda) < 0.0) return on_arrival();
        const double retrial_rate = static_cast<double>(state_.orbit) * p_.nu;
        if ((u -= retrial_rate) < 0.0) return on_retrial();
        // Whatever remains is the mode-specific clock: outgoing call or failure.
        switch (state_.mode) {
            case Mode::idle:
                ++counts_.outgoing_initiated;
                start_service(Mode::busy_out, p_.service2);
                break;
            case Mode::busy_in:
                fail(Mode::failed_in, p_.repair1);
                break;
            case Mode::busy_out:
                fail(Mode::failed_out, p_.repair2);
                break;
            default: break;
        }
    }

    void fail(Mode failed, const Distribution& repair) {
        ++counts_.failures;
        if (in_window(now_)) ++window_failures_;
        state_.mode = failed;
        state_.remaining_repair = repair.sample(rng_);
    }

    void on_arrival() {
        ++counts_.arrivals;
        const bool counted = in_window(now_);
        if (counted) ++window_arrivals_;
        if (state_.mode == Mode::idle) {
            ++counts_.arrivals_served_immediately;
            start_service(Mode::busy_in, p_.service1);
            return;
        }
        if (counted) ++window_blocked_;
        ++state_.orbit;
        orbit_entries_.push_back({now_, counted});
    }

    void on_retrial() {
        ++counts_.retrials;
        if (state_.mode != Mode::idle) return;
        ++counts_.successful_retrials;
        // Orbit members are exchangeable; the one whose timer fired is uniform.
        const auto k = static_cast<std::size_t>(rng_.uniform() * static_cast<double>(orbit_entries_.size()));
        const auto entry = orbit_entries_[std::min(k, orbit_entries_.size() - 1)];
        orbit_entries_[std::min(k, orbit_entries_.size() - 1)] = orbit_entries_.back();
        orbit_entries_.pop_back();
        if (entry.counted) sojourn_sum_ += now_ - entry.time;
        --state_.orbit;
        start_service(Mode::busy_in, p_.service1);
    }

    ReplicationResult finish() {
        // Customers still in orbit contribute their residence up to the window end.
        for (const auto& e : orbit_entries_) {
            if (e.counted) sojourn_sum_ += window_end_ - e.time;
        }
        const double span = window_end_ - window_start_;
        ReplicationResult r;
        r.mean_orbit = orbit_area_ / span;
        r.mean_system = system_area_ / span;
        for (int c = 0; c < mode_count; ++c) r.mode_fraction[c] = mode_time_[c] / span;
        r.availability = r.mode_fraction[0] + r.mode_fraction[1] + r.mode_fraction[2];
        r.failure_rate = static_cast<double>(window_failures_) / span;
        r.window_arrivals = window_arrivals_;
        const double arrivals = static_cast<double>(std::max<std::uint64_t>(window_arrivals_, 1));
        r.orbit_entry_prob = static_cast<double>(window_blocked_) / arrivals;
        r.mean_wait = sojourn_sum_ / arrivals;
        r.counts = counts_;
        r.final_state = state_;
        r.max_service_mismatch = max_mismatch_;
        return r;
    }

    struct OrbitEntry {
        double time;
        bool counted;  ///< arrived inside the measurement window
    };

    const ModelParams& p_;
    RandomStream rng_;
    const double window_start_;
    const double window_end_;
    double now_ = 0.0;
    ServerState state_;
    double requirement_ = 0.0;
    double served_so_far_ = 0.0;
    double max_mismatch_ = 0.0;

    EventCounts counts_;
    std::uint64_t window_arrivals_ = 0;
    std::uint64_t window_blocked_ = 0;
    std::uint64_t window_failures_ = 0;
    double orbit_area_ = 0.0;
    double system_area_ = 0.0;
    std::array<double, mode_count> mode_time_{};
    double sojourn_sum_ = 0.0;
    std::vector<OrbitEntry> orbit_entries_;
};

}  // namespace detail

/// One independent replication. Unstable parameters are accepted; the orbit then grows.
inline ReplicationResult run_replication(const ModelParams& p, const SimConfig& c, int replication_index) {
    p.validate();
    if (!(c.horizon > 0.0)) throw ConfigError("sim.horizon", "must be > 0");
    const std::uint64_t seed = replication_seed(c.seed, static_cast<std::uint64_t>(replication_index));
    return detail::Engine(p, seed, c.effective_warmup(), c.horizon).run();
}

struct MetricEstimate {
    double point = 0.0;
    double half_width = 0.0;
    int replications = 0;

    bool covers(double value) const { return std::abs(value - point) <= half_width; }
};

struct SimEstimate {
    MetricEstimate mean_orbit;
    MetricEstimate mean_system;
    MetricEstimate availability;
    MetricEstimate failure_frequency;
    MetricEstimate orbit_entry_prob;
    MetricEstimate mean_wait;
    std::array<MetricEstimate, mode_count> mode_fraction;
    EventCounts counts;  ///< summed over replications
    std::vector<ReplicationResult> replications;
};

/// Mean and Student-t half-width of a sample.
inline MetricEstimate summarize(const std::vector<double>& xs, double confidence) {
    const auto n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const boost::math::students_t t(n - 1.0);
    const double q = boost::math::quantile(t, 0.5 + 0.5 * confidence);
    return {mean, q * sd / std::sqrt(n), static_cast<int>(xs.size())};
}

inline SimEstimate estimate(const ModelParams& p, const SimConfig& c) {
    c.validate();
    p.validate();
    SimEstimate out;
    out.replications.reserve(static_cast<std::size_t>(c.replications));
    for (int r = 0; r < c.replications; ++r) {
        out.replications.push_back(run_replication(p, c, r));
        out.counts += out.replications.back().counts;
    }
    auto collect = [&](auto member) {
        std::vector<double> xs;
        xs.reserve(out.replications.size());
        for (const auto& rep : out.replications) xs.push_back(member(rep));
        return summarize(xs, c.confidence);
    };
    out.mean_orbit = collect([](const ReplicationResult& r) { return r.mean_orbit; });
    out.mean_system = collect([](const ReplicationResult& r) { return r.mean_system; });
    out.availability = collect([](const ReplicationResult& r) { return r.availability; });
    out.failure_frequency = collect([](const ReplicationResult& r) { return r.failure_rate; });
    out.orbit_entry_prob = collect([](const ReplicationResult& r) { return r.orbit_entry_prob; });
    out.mean_wait = collect([](const ReplicationResult& r) { return r.mean_wait; });
    for (int m = 0; m < mode_count; ++m) {
        out.mode_fraction[m] = collect([m](const ReplicationResult& r) { return r.mode_fraction[m]; });
    }
    return out;
}

}  // namespace retrial::sim
