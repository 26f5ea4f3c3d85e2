#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "retrial/analytic.hpp"
#include "retrial/ctmc_oracle.hpp"
#include "retrial/identities.hpp"
#include "support/test_support.hpp"

using namespace retrial;
using Catch::Approx;
using testing::reference_config;
using testing::rel_diff;

namespace {

ModelParams kernel_example() {
    ModelParams p = reference_config();
    p.lambda = 1.2;
    p.beta1 = 0.4;
    p.repair1 = Distribution::exponential(2.0);
    return p;
}

ModelParams unstable_config() {
    ModelParams p = reference_config();
    p.lambda = 2.5;
    p.beta1 = 0.0;
    p.service1 = Distribution::exponential_mean(0.5);
    return p;
}

}  // namespace

TEST_CASE("kernel h", "[analytic][kernel]") {
    const ModelParams p = kernel_example();
    CHECK(analytic::kernel_h(p, CallType::inbound, 1.0) == 0.0);
    CHECK(analytic::kernel_h(p, CallType::outbound, 1.0) == 0.0);
    // 1.2 + 0.4 - 0.6 - 0.4 * 2 / 2.6
    CHECK(analytic::kernel_h(p, CallType::inbound, 0.5) == Approx(1.0 - 0.8 / 2.6).epsilon(1e-12));
    CHECK(analytic::kernel_h(p, CallType::inbound, 0.5) == Approx(0.6923).margin(5e-5));

    ModelParams q = p;
    q.beta1 = 0.0;
    CHECK(analytic::kernel_h(q, CallType::inbound, 0.0) == Approx(q.lambda));

    CHECK_THROWS_AS(analytic::kernel_h(p, CallType::inbound, 1.0 + 1e-12), DomainError);
    CHECK_THROWS_AS(analytic::kernel_h(p, CallType::inbound, -0.1), DomainError);
    for (double z = 0.0; z < 1.0; z += 0.05) CHECK(analytic::kernel_h(p, CallType::inbound, z) > 0.0);
}

TEST_CASE("kernel delta", "[analytic][kernel]") {
    ModelParams p = reference_config();
    p.service1 = Distribution::erlang2(6.0);
    p.repair1 = Distribution::hyperexponential(0.4, 1.0, 5.0);
    CHECK(analytic::kernel_delta(p, CallType::inbound, 1.0) == 1.0);

    for (double z : {0.0, 0.3, 0.9}) {
        const double d = analytic::kernel_delta(p, CallType::inbound, z);
        CHECK(d > 0.0);
        CHECK(d <= 1.0);
    }

    ModelParams q = p;
    q.beta1 = 0.0;
    for (double z : {0.0, 0.4, 0.8}) {
        CHECK(analytic::kernel_delta(q, CallType::inbound, z) ==
              Approx(q.service1.laplace(q.lambda * (1.0 - z))));
    }

    const double h = 1e-6;
    const double slope = (analytic::kernel_delta(p, CallType::inbound, 1.0) -
                          analytic::kernel_delta(p, CallType::inbound, 1.0 - h)) / h;
    const double rho_eff = load_summary(p).rho_eff;
    CHECK(rel_diff(slope, rho_eff) < 1e-4);
    CHECK(analytic::kernel_delta_slope_at_one(p, CallType::inbound) == Approx(rho_eff));
}

TEST_CASE("phi", "[analytic][phi]") {
    const ModelParams p = reference_config();
    CHECK(analytic::phi(p, 1.0) == 1.0);
    const double at09 = analytic::phi(p, 0.9);
    CHECK(at09 > 0.0);
    CHECK(at09 < 1.0);

    SECTION("matches an independent Simpson quadrature") {
        for (double z : {0.0, 0.5}) {
            const double expected = testing::phi_by_simpson(p, z);
            CHECK(rel_diff(analytic::phi(p, z), expected) < 1e-9);
        }
        ModelParams q = p;
        q.service1 = Distribution::exponential_mean(0.6);  // rho_eff = 0.864
        CHECK(rel_diff(analytic::phi(q, 0.5), testing::phi_by_simpson(q, 0.5)) < 1e-9);
    }

    SECTION("nondecreasing on [0, 1]") {
        double prev = analytic::phi(p, 0.0);
        for (int k = 1; k <= 40; ++k) {
            const double cur = analytic::phi(p, k / 40.0);
            CHECK(cur >= prev);
            prev = cur;
        }
    }

    SECTION("integrand limit at u = 1 is continuous") {
        const double limit = analytic::phi_integrand(p, 1.0);
        CHECK(rel_diff(analytic::phi_integrand(p, 1.0 - 1e-6), limit) < 1e-5);
    }

    CHECK_THROWS_AS(analytic::phi(unstable_config(), 0.5), StabilityError);
}

TEST_CASE("partial generating functions", "[analytic][pgf]") {
    const ModelParams p = reference_config();
    const auto s = load_summary(p);

    SECTION("limits as z -> 1") {
        const auto pp = analytic::partial_pgfs(p, 1.0 - 1e-7);
        CHECK(rel_diff(pp.idle, (1.0 - s.rho_eff) / (1.0 + s.sigma_eff)) < 1e-5);
        CHECK(rel_diff(pp.busy_in, s.rho) < 1e-5);
        CHECK(rel_diff(pp.busy_out, s.sigma * (1.0 - s.rho_eff) / (1.0 + s.sigma_eff)) < 1e-5);
        CHECK(rel_diff(pp.failed_in, s.rho * p.beta1 * p.repair1.mean()) < 1e-5);
    }

    SECTION("limits agree with the CTMC state probabilities") {
        const auto o = ctmc::solve(p).distribution;
        const auto pp = analytic::partial_pgfs(p, 1.0 - 1e-7);
        CHECK(rel_diff(pp.idle, o.mode_probability(ctmc::ServerMode::idle)) < 1e-5);
        CHECK(rel_diff(pp.busy_in, o.mode_probability(ctmc::ServerMode::busy_in)) < 1e-5);
        CHECK(rel_diff(pp.busy_out, o.mode_probability(ctmc::ServerMode::busy_out)) < 1e-5);
        CHECK(rel_diff(pp.failed_in, o.mode_probability(ctmc::ServerMode::failed_in)) < 1e-5);
        CHECK(rel_diff(pp.failed_out, o.mode_probability(ctmc::ServerMode::failed_out)) < 1e-5);
    }

    SECTION("no failures means no failed-state mass") {
        ModelParams q = p;
        q.beta1 = q.beta2 = 0.0;
        for (double z : {0.0, 0.5, 0.99}) {
            const auto pp = analytic::partial_pgfs(q, z);
            CHECK(pp.failed_in == 0.0);
            CHECK(pp.failed_out == 0.0);
        }
    }

    SECTION("sum of partials is the orbit PGF") {
        CHECK(rel_diff(analytic::partial_pgfs(p, 0.5).sum(), analytic::orbit_pgf(p, 0.5)) < 1e-12);
    }

    CHECK_THROWS_AS(analytic::partial_pgfs(p, 1.0), DomainError);
    CHECK_THROWS_AS(analytic::partial_pgfs(unstable_config(), 0.5), StabilityError);
}

TEST_CASE("orbit and system PGFs", "[analytic][pgf]") {
    const ModelParams p = reference_config();
    CHECK(analytic::orbit_pgf(p, 1.0) == 1.0);
    CHECK(analytic::system_pgf(p, 1.0) == 1.0);
    const double p0 = analytic::orbit_pgf(p, 0.0);
    CHECK(p0 > 0.0);
    CHECK(p0 < 1.0);

    SECTION("agree with the CTMC distribution") {
        const auto d = ctmc::solve(p).distribution;
        for (double z : {0.0, 0.5, 0.9}) {
            double orbit = 0.0, system = 0.0;
            for (int n = 0; n <= d.n_max; ++n) {
                for (int c = 0; c < ctmc::mode_count; ++c) {
                    const double v = d.at(static_cast<ctmc::ServerMode>(c), n);
                    orbit += v * std::pow(z, n);
                    system += v * std::pow(z, n + (c == 0 ? 0 : 1));
                }
            }
            CHECK(std::abs(analytic::orbit_pgf(p, z) - orbit) < 1e-6);
            CHECK(std::abs(analytic::system_pgf(p, z) - system) < 1e-6);
        }
    }

    SECTION("R(0) is the probability of an empty system") {
        CHECK(rel_diff(analytic::system_pgf(p, 0.0), analytic::partial_pgfs(p, 0.0).idle) < 1e-12);
    }
}

TEST_CASE("mean orbit size", "[analytic][metrics]") {
    SECTION("classical M/M/1 retrial reduction") {
        ModelParams p = reference_config();
        p.alpha = 0.0;
        p.beta1 = p.beta2 = 0.0;
        p.lambda = 0.8;
        p.nu = 1.7;
        p.service1 = Distribution::exponential_mean(0.9);
        const double rho = 0.72;
        const double expected = rho * rho / (1.0 - rho) + p.lambda * rho / (p.nu * (1.0 - rho));
        CHECK(rel_diff(analytic::mean_orbit_size(p), expected) < 1e-12);
    }

    SECTION("general service without failures or outgoing calls") {
        ModelParams p = reference_config();
        p.alpha = 0.0;
        p.beta1 = 0.0;
        p.service1 = Distribution::hyperexponential(0.3, 1.0, 6.0);
        const double expected = testing::classical_retrial_mean_orbit(
            p.lambda, p.service1.moment(1), p.service1.moment(2), p.nu);
        CHECK(rel_diff(analytic::mean_orbit_size(p), expected) < 1e-12);
    }

    SECTION("vanishes with the arrival rate") {
        ModelParams p = reference_config();
        p.lambda = 1e-9;
        CHECK(analytic::mean_orbit_size(p) < 1e-8);
    }

    SECTION("matches the CTMC oracle on the reference configuration") {
        const ModelParams p = reference_config();
        CHECK(rel_diff(analytic::mean_orbit_size(p), ctmc::oracle_metrics(p).mean_orbit) < 1e-6);
    }

    CHECK_THROWS_AS(analytic::mean_orbit_size(unstable_config()), StabilityError);
}

TEST_CASE("system size, availability, failure frequency, orbit entry", "[analytic][metrics]") {
    const ModelParams p = reference_config();
    const auto s = load_summary(p);
    const auto m = analytic::metrics(p);
    const auto o = ctmc::oracle_metrics(p);

    // E[M] is formed as E[N] + P_w, so the identity holds up to one rounding.
    CHECK(std::abs(m.mean_system - m.mean_orbit - m.orbit_entry_prob) <= 2.0 * std::numeric_limits<double>::epsilon() * m.mean_system);
    CHECK(rel_diff(m.mean_system, o.mean_system) < 1e-6);
    CHECK(rel_diff(m.availability, o.availability) < 1e-6);
    CHECK(rel_diff(m.failure_frequency, o.failure_frequency) < 1e-6);
    CHECK(rel_diff(m.orbit_entry_prob, o.orbit_entry_prob) < 1e-6);

    SECTION("availability is the complement of the repair-state mass") {
        const auto pp = analytic::partial_pgfs(p, 1.0 - 1e-6);
        CHECK(std::abs(m.availability - (1.0 - pp.failed_in - pp.failed_out)) < 1e-4);
    }

    SECTION("orbit entry probability arithmetic") {
        ModelParams q = p;
        q.service1 = Distribution::exponential_mean(0.5);
        q.repair1 = Distribution::exponential_mean(0.5);
        // rho_eff = 0.72, sigma_eff = 0.044
        CHECK(analytic::orbit_entry_probability(q) == Approx(0.764 / 1.044).epsilon(1e-12));
        CHECK(analytic::orbit_entry_probability(q) == Approx(0.73180).margin(5e-6));
        q.alpha = 0.0;
        CHECK(analytic::orbit_entry_probability(q) == Approx(load_summary(q).rho_eff));
    }

    SECTION("failure-free degenerations") {
        ModelParams q = p;
        q.beta1 = q.beta2 = 0.0;
        CHECK(analytic::availability(q) == 1.0);
        CHECK(analytic::failure_frequency(q) == 0.0);
        q.alpha = 0.0;
        CHECK(analytic::mean_system_size(q) == Approx(analytic::mean_orbit_size(q) + s.rho));
    }

    SECTION("failure frequency grows with the arrival rate") {
        ModelParams q = p;
        double prev = -1.0;
        for (double lambda : {0.4, 0.8, 1.2, 1.6, 2.0}) {
            q.lambda = lambda;
            REQUIRE(check_stability(q).stable);
            const double pf = analytic::failure_frequency(q);
            CHECK(pf > prev);
            prev = pf;
        }
    }
}

TEST_CASE("mean waiting time", "[analytic][metrics]") {
    const ModelParams p = reference_config();
    const auto w = analytic::mean_waiting_time(p);
    CHECK(w.mean == analytic::mean_orbit_size(p) / p.lambda);
    CHECK(rel_diff(w.mean * p.lambda, analytic::mean_orbit_size(p)) <= 4.0 * std::numeric_limits<double>::epsilon());
    CHECK(w.parts.idle == Approx(analytic::orbit_entry_probability(p) / p.nu));
    CHECK(rel_diff(w.parts.sum(), w.mean) < 1e-12);

    SECTION("classical retrial wait") {
        ModelParams q = p;
        q.alpha = 0.0;
        q.beta1 = q.beta2 = 0.0;
        const double rho = q.lambda * q.service1.mean();
        const double expected = (rho * q.service1.mean() + rho / q.nu) / (1.0 - rho);
        CHECK(rel_diff(analytic::mean_waiting_time(q).mean, expected) < 1e-12);
    }
}

TEST_CASE("failure-free model ignores repair laws", "[analytic][property]") {
    ModelParams a = reference_config();
    a.beta1 = a.beta2 = 0.0;
    ModelParams b = a;
    b.repair1 = Distribution::hyperexponential(0.2, 0.1, 9.0);
    b.repair2 = Distribution::erlang2(0.3);
    const auto ma = analytic::metrics(a), mb = analytic::metrics(b);
    CHECK(ma.mean_orbit == mb.mean_orbit);
    CHECK(ma.availability == mb.availability);
    for (double z : {0.2, 0.6}) CHECK(analytic::orbit_pgf(a, z) == analytic::orbit_pgf(b, z));
}

TEST_CASE("randomized invariants over stable models", "[analytic][property]") {
    std::mt19937_64 rng(20240611);
    for (int i = 0; i < 100; ++i) {
        const ModelParams p = testing::random_stable_config(rng, /*mixed=*/true);
        REQUIRE(check_stability(p).stable);
        const auto m = analytic::metrics(p);
        INFO("config " << i);
        CHECK(m.availability >= 0.0);
        CHECK(m.availability <= 1.0);
        CHECK(m.orbit_entry_prob >= 0.0);
        CHECK(m.orbit_entry_prob <= 1.0);
        CHECK(m.failure_frequency >= 0.0);
        CHECK(m.mean_orbit > 0.0);
        CHECK(std::abs(m.mean_system - m.mean_orbit - m.orbit_entry_prob) <= 2.0 * std::numeric_limits<double>::epsilon() * m.mean_system);
        CHECK(rel_diff(m.wait_decomposition->sum(), m.mean_wait) < 1e-12);
        if (i % 5 == 0) {
            CHECK(identities::orbit_normalization_gap(p) < 1e-4);
            CHECK(identities::orbit_pgf_identity_gap(p) < 1e-9);
            CHECK(identities::system_pgf_identity_gap(p) < 1e-9);
            CHECK(identities::moment_derivative_gap(p) < 1e-4);
        }
    }
}
