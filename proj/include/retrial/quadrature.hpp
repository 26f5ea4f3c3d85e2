#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

namespace retrial::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;  ///< estimated absolute error
    int intervals = 0;
    bool converged = false;
};

namespace detail {

// 15-point Kronrod abscissae (descending, last is the centre) and weights, with the
// embedded 7-point Gauss weights for the even-indexed abscissae.
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gauss_kronrod_15(const F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = kronrod_weights[7] * fc;
    double gauss = gauss_weights[3] * fc;
    double mean_abs = kronrod_weights[7] * std::abs(fc);
    std::array<double, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        f1[j] = f(centre - dx);
        f2[j] = f(centre + dx);
        kronrod += kronrod_weights[j] * (f1[j] + f2[j]);
        mean_abs += kronrod_weights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) gauss += gauss_weights[j / 2] * (f1[j] + f2[j]);
    }
    // QUADPACK-style scaling of |K15 - G7|.
    const double mean = kronrod * 0.5;
    double asc = kronrod_weights[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) {
        asc += kronrod_weights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    }
    double err = std::abs((kronrod - gauss) * half);
    asc *= std::abs(half);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    const double resabs = mean_abs * std::abs(half);
    const double eps = 50.0 * std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / eps) err = std::max(eps * resabs, err);
    return {a, b, kronrod * half, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
/// Bisects the segment with the largest error estimate until the summed
/// estimate falls below `abs_tol` or `max_intervals` is reached.
template <class F>
Result integrate(const F& f, double a, double b, double abs_tol, int max_intervals = 2000) {
    if (a == b) return {0.0, 0.0, 0, true};
    std::priority_queue<detail::Segment> heap;
    heap.push(detail::gauss_kronrod_15(f, a, b));
    double error = heap.top().error;
    int intervals = 1;
    while (error > abs_tol && intervals < max_intervals) {
        const detail::Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            heap.push(worst);  // cannot split further in double precision
            break;
        }
        const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
        const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++intervals;
    }
    // Re-sum to shed the drift accumulated by incremental updates.
    double value = 0.0, err = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    return {value, err, intervals, err <= abs_tol};
}

}  // namespace retrial::quad
