#pragma once

// Truncated continuous-time Markov chain for the all-exponential case, solved
// directly for its stationary distribution. Serves as ground truth for the
// closed-form analysis.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "retrial/errors.hpp"
#include "retrial/metrics.hpp"
#include "retrial/model.hpp"

namespace retrial::ctmc {

/// Server state, numbered as in the model: idle, busy with an inbound or outbound
/// call, failed during an inbound or outbound call.
enum class ServerMode : int { idle = 0, busy_in = 1, busy_out = 2, failed_in = 3, failed_out = 4 };

inline constexpr int mode_count = 5;

/// Generator of the chain on {(c, n) : c in 0..4, 0 <= n <= n_max}.
/// Arrivals that would push the orbit past n_max are dropped.
class TruncatedChain {
public:
    using Generator = Eigen::SparseMatrix<double, Eigen::RowMajor>;

    TruncatedChain(int n_max, Generator q) : n_max_(n_max), q_(std::move(q)) {}

    int n_max() const noexcept { return n_max_; }
    int state_count() const noexcept { return mode_count * (n_max_ + 1); }
    const Generator& generator() const noexcept { return q_; }

    // Level-major ordering keeps the generator banded.
    int index(ServerMode c, int n) const noexcept { return n * mode_count + static_cast<int>(c); }

private:
    int n_max_;
    Generator q_;
};

inline TruncatedChain build_chain(const ModelParams& p, int n_max) {
    p.validate();
    if (!p.all_exponential()) {
        throw UnsupportedModelError(
            "CTMC oracle requires exponential service and repair times; got service1=" +
            p.service1.describe() + ", service2=" + p.service2.describe() +
            ", repair1=" + p.repair1.describe() + ", repair2=" + p.repair2.describe());
    }
    if (n_max < 1) throw ParameterError("n_max must be >= 1");

    const double m1 = 1.0 / p.service1.mean();
    const double m2 = 1.0 / p.service2.mean();
    const double r1 = 1.0 / p.repair1.mean();
    const double r2 = 1.0 / p.repair2.mean();
    const int states = mode_count * (n_max + 1);

    auto idx = [](ServerMode c, int n) { return n * mode_count + static_cast<int>(c); };
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(states) * 4);
    std::vector<double> outflow(states, 0.0);
    auto add = [&](ServerMode from, int n, ServerMode to, int m, double rate) {
        if (rate <= 0.0) return;
        const int i = idx(from, n);
        triplets.emplace_back(i, idx(to, m), rate);
        outflow[i] += rate;
    };

    using M = ServerMode;
    for (int n = 0; n <= n_max; ++n) {
        const bool room = n < n_max;
        add(M::idle, n, M::busy_in, n, p.lambda);
        if (n >= 1) add(M::idle, n, M::busy_in, n - 1, n * p.nu);
        add(M::idle, n, M::busy_out, n, p.alpha);

        add(M::busy_in, n, M::idle, n, m1);
        if (room) add(M::busy_in, n, M::busy_in, n + 1, p.lambda);
        add(M::busy_in, n, M::failed_in, n, p.beta1);

        add(M::busy_out, n, M::idle, n, m2);
        if (room) add(M::busy_out, n, M::busy_out, n + 1, p.lambda);
        add(M::busy_out, n, M::failed_out, n, p.beta2);

        add(M::failed_in, n, M::busy_in, n, r1);
        if (room) add(M::failed_in, n, M::failed_in, n + 1, p.lambda);

        add(M::failed_out, n, M::busy_out, n, r2);
        if (room) add(M::failed_out, n, M::failed_out, n + 1, p.lambda);
    }
    for (int i = 0; i < states; ++i) triplets.emplace_back(i, i, -outflow[i]);

    TruncatedChain::Generator q(states, states);
    q.setFromTriplets(triplets.begin(), triplets.end());
    q.makeCompressed();
    return TruncatedChain(n_max, std::move(q));
}

struct StationaryDistribution {
    int n_max = 0;
    std::vector<double> pi;  ///< indexed like TruncatedChain::index
    double residual = 0.0;   ///< ||pi Q||_inf

    double at(ServerMode c, int n) const { return pi[n * mode_count + static_cast<int>(c)]; }

    /// Probability mass on the truncation level; small when n_max is adequate.
    double tail_mass() const {
        double s = 0.0;
        for (int c = 0; c < mode_count; ++c) s += pi[n_max * mode_count + c];
        return s;
    }

    double mode_probability(ServerMode c) const {
        double s = 0.0;
        for (int n = 0; n <= n_max; ++n) s += at(c, n);
        return s;
    }
};

/// Solves pi Q = 0, sum(pi) = 1 by sparse LU on Q^T with one balance row
/// replaced by the normalization row.
inline StationaryDistribution stationary(const TruncatedChain& chain) {
    const int states = chain.state_count();
    Eigen::SparseMatrix<double> a = chain.generator().transpose();  // column-major Q^T
    const int replaced = 0;
    {
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(static_cast<std::size_t>(a.nonZeros()) + states);
        for (int col = 0; col < a.outerSize(); ++col) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(a, col); it; ++it) {
                if (it.row() != replaced) triplets.emplace_back(it.row(), it.col(), it.value());
            }
        }
        for (int col = 0; col < states; ++col) triplets.emplace_back(replaced, col, 1.0);
        a.setFromTriplets(triplets.begin(), triplets.end());
    }
    a.makeCompressed();

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(states);
    rhs[replaced] = 1.0;

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> solver;
    solver.compute(a);
    if (solver.info() != Eigen::Success) {
        throw NumericError("CTMC generator factorization failed: " + solver.lastErrorMessage());
    }
    Eigen::VectorXd x = solver.solve(rhs);
    if (solver.info() != Eigen::Success) throw NumericError("CTMC stationary solve failed");

    StationaryDistribution out;
    out.n_max = chain.n_max();
    out.pi.assign(x.data(), x.data() + states);
    for (double& v : out.pi) {
        if (v < -1e-12) {
            std::ostringstream os;
            os << "CTMC stationary solve produced a negative probability " << v;
            throw NumericError(os.str());
        }
        v = std::max(v, 0.0);
    }
    double total = 0.0;
    for (double v : out.pi) total += v;
    for (double& v : out.pi) v /= total;

    const Eigen::Map<const Eigen::VectorXd> pi(out.pi.data(), states);
    const Eigen::VectorXd balance = chain.generator().transpose() * pi;
    out.residual = balance.cwiseAbs().maxCoeff();
    return out;
}

/// Time-average performance measures of a stationary distribution.
inline SteadyStateMetrics metrics_from(const ModelParams& p, const StationaryDistribution& d) {
    SteadyStateMetrics m;
    double orbit = 0.0, occupied = 0.0;
    for (int n = 0; n <= d.n_max; ++n) {
        for (int c = 0; c < mode_count; ++c) {
            const double v = d.at(static_cast<ServerMode>(c), n);
            orbit += n * v;
            if (c != 0) occupied += v;
        }
    }
    m.mean_orbit = orbit;
    m.orbit_entry_prob = occupied;
    m.mean_system = orbit + occupied;
    m.availability = d.mode_probability(ServerMode::idle) +
                     d.mode_probability(ServerMode::busy_in) +
                     d.mode_probability(ServerMode::busy_out);
    m.failure_frequency = p.beta1 * d.mode_probability(ServerMode::busy_in) +
                          p.beta2 * d.mode_probability(ServerMode::busy_out);
    m.mean_wait = orbit / p.lambda;
    return m;
}

struct OracleOptions {
    int initial_n_max = 200;
    int max_n_max = 12800;
    double tol = 1e-10;  ///< relative change in E[N] between successive doublings
};

struct OracleResult {
    SteadyStateMetrics metrics;
    StationaryDistribution distribution;
    int n_max = 0;
    double last_change = 0.0;  ///< relative E[N] change at the final doubling
};

/// Solves at increasing truncation levels (doubling) until E[N] settles.
inline OracleResult solve(const ModelParams& p, const OracleOptions& opt = {}) {
    if (!p.all_exponential()) build_chain(p, 1);  // throws the unsupported-model diagnostic
    require_stable(p);

    int n_max = opt.initial_n_max;
    auto dist = stationary(build_chain(p, n_max));
    auto m = metrics_from(p, dist);
    double change = INFINITY;
    while (n_max * 2 <= opt.max_n_max) {
        const int next = n_max * 2;
        auto next_dist = stationary(build_chain(p, next));
        auto next_m = metrics_from(p, next_dist);
        change = std::abs(next_m.mean_orbit - m.mean_orbit) / std::max(1.0, next_m.mean_orbit);
        n_max = next;
        dist = std::move(next_dist);
        m = next_m;
        if (change < opt.tol) return {m, std::move(dist), n_max, change};
    }
    std::ostringstream os;
    os << "CTMC truncation did not converge by n_max=" << n_max << " (last relative E[N] change "
       << change << ", tol " << opt.tol << ", tail mass " << dist.tail_mass() << ")";
    throw NumericError(os.str());
}

inline SteadyStateMetrics oracle_metrics(const ModelParams& p, double tol = 1e-10) {
    OracleOptions opt;
    opt.tol = tol;
    return solve(p, opt).metrics;
}

}  // namespace retrial::ctmc
