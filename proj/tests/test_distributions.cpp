#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "retrial/distributions.hpp"

using namespace retrial;
using Catch::Approx;

namespace {

std::vector<Distribution> sample_laws() {
    return {Distribution::exponential(2.0), Distribution::exponential(0.3),
            Distribution::erlang2(3.0),     Distribution::erlang2(0.5),
            Distribution::hyperexponential(0.3, 1.0, 4.0),
            Distribution::hyperexponential(0.9, 0.2, 7.0),
            Distribution::hyperexponential(0.0, 1.0, 2.0)};
}

}  // namespace

TEST_CASE("construction validates parameters", "[distributions]") {
    CHECK(Distribution::exponential(2.0).mean() == 0.5);
    CHECK_THROWS_AS(Distribution::erlang2(-1.0), ParameterError);
    CHECK_THROWS_AS(Distribution::exponential(0.0), ParameterError);
    CHECK_THROWS_AS(Distribution::exponential(NAN), ParameterError);
    CHECK_NOTHROW(Distribution::hyperexponential(0.3, 1.0, 4.0));
    CHECK_THROWS_AS(Distribution::hyperexponential(1.2, 1.0, 4.0), ParameterError);
    CHECK_THROWS_AS(Distribution::hyperexponential(-0.1, 1.0, 4.0), ParameterError);
    CHECK_THROWS_AS(Distribution::hyperexponential(0.5, 1.0, 0.0), ParameterError);
}

TEST_CASE("raw moments", "[distributions]") {
    CHECK(Distribution::exponential(2.0).moment(1) == Approx(0.5));
    CHECK(Distribution::exponential(2.0).moment(2) == Approx(0.5));
    CHECK(Distribution::erlang2(2.0).moment(1) == Approx(1.0));
    CHECK(Distribution::erlang2(2.0).moment(2) == Approx(1.5));
    CHECK(Distribution::hyperexponential(0.5, 1.0, 2.0).moment(1) == Approx(0.75));
    CHECK(Distribution::hyperexponential(0.5, 1.0, 2.0).moment(2) == Approx(0.5 * 2.0 + 0.5 * 0.5));
    CHECK_THROWS_AS(Distribution::exponential(1.0).moment(3), DomainError);
    CHECK_THROWS_AS(Distribution::exponential(1.0).moment(0), DomainError);

    for (const auto& d : sample_laws()) {
        CHECK(d.moment(1) > 0.0);
        CHECK(d.moment(2) >= d.moment(1) * d.moment(1));
    }
}

TEST_CASE("Laplace transform values", "[distributions]") {
    for (const auto& d : sample_laws()) CHECK(d.laplace(0.0) == 1.0);
    CHECK(Distribution::exponential(2.0).laplace(2.0) == Approx(0.5));
    CHECK(Distribution::erlang2(3.0).laplace(3.0) == Approx(0.25));
    CHECK(Distribution::hyperexponential(0.3, 1.0, 4.0).laplace(1.0) ==
          Approx(0.3 * 0.5 + 0.7 * 0.8));
    CHECK_THROWS_AS(Distribution::exponential(1.0).laplace(-1e-3), DomainError);
    CHECK_THROWS_AS(Distribution::exponential(1.0).laplace_complement(-1.0), DomainError);
}

TEST_CASE("Laplace transform is strictly decreasing", "[distributions][property]") {
    for (const auto& d : sample_laws()) {
        double prev = d.laplace(0.0);
        for (double theta = 0.01; theta < 50.0; theta *= 1.3) {
            const double cur = d.laplace(theta);
            CHECK(cur < prev);
            CHECK(cur > 0.0);
            prev = cur;
        }
    }
}

TEST_CASE("complement agrees with 1 - laplace", "[distributions]") {
    for (const auto& d : sample_laws()) {
        for (double theta : {1e-6, 0.1, 1.0, 10.0}) {
            CHECK(d.laplace_complement(theta) == Approx(1.0 - d.laplace(theta)).epsilon(1e-4));
        }
        // For tiny theta the complement must carry the mean, which 1 - laplace cannot.
        CHECK(d.laplace_complement(1e-14) / 1e-14 == Approx(d.moment(1)).epsilon(1e-9));
    }
}

TEST_CASE("finite differences of the transform recover the moments", "[distributions][property]") {
    for (const auto& d : sample_laws()) {
        const double m1 = d.moment(1), m2 = d.moment(2);
        for (double h : {1e-4, 1e-5}) {
            const double slope = -(d.laplace(h) - d.laplace(0.0)) / h;
            CHECK(std::abs(slope - m1) / m1 < 1e-3);
        }
        const double h = 1e-3;
        const double curvature = (d.laplace(h) - 1.0 + h * m1) * 2.0 / (h * h);
        CHECK(std::abs(curvature - m2) / m2 < 1e-2);
    }
}

TEST_CASE("sampling is deterministic per seed", "[distributions][sampling]") {
    const auto d = Distribution::exponential(1.0);
    RandomStream a(42), b(42), c(43);
    const double first = d.sample(a);
    CHECK(first == d.sample(b));
    CHECK(first != d.sample(c));
}

TEST_CASE("sample means converge to the first moment", "[distributions][sampling]") {
    SECTION("Erlang-2, 1e6 draws within 1% of 2.0") {
        const auto d = Distribution::erlang2(1.0);
        RandomStream rng(7);
        double sum = 0.0;
        const int n = 1000000;
        for (int i = 0; i < n; ++i) sum += d.sample(rng);
        CHECK(std::abs(sum / n - 2.0) / 2.0 < 0.01);
    }
    SECTION("degenerate hyperexponential behaves as Exp(2)") {
        const auto d = Distribution::hyperexponential(1.0, 2.0, 99.0);
        RandomStream rng(11);
        double sum = 0.0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) sum += d.sample(rng);
        CHECK(std::abs(sum / n - 0.5) / 0.5 < 0.02);
    }
    SECTION("every family within 5 standard errors over 1e6 draws") {
        const int n = 1000000;
        std::uint64_t seed = 100;
        for (const auto& d : sample_laws()) {
            RandomStream rng(seed++);
            double sum = 0.0;
            for (int i = 0; i < n; ++i) {
                const double x = d.sample(rng);
                REQUIRE(x >= 0.0);
                sum += x;
            }
            const double sd = std::sqrt(d.moment(2) - d.moment(1) * d.moment(1));
            CHECK(std::abs(sum / n - d.moment(1)) < 5.0 * sd / std::sqrt(double(n)));
        }
    }
}

TEST_CASE("with_mean keeps the family and coefficient of variation", "[distributions]") {
    for (const auto& d : sample_laws()) {
        const auto scaled = d.with_mean(3.7);
        CHECK(scaled.kind() == d.kind());
        CHECK(scaled.mean() == Approx(3.7));
        const double cv2 = d.moment(2) / (d.moment(1) * d.moment(1));
        const double scaled_cv2 = scaled.moment(2) / (scaled.moment(1) * scaled.moment(1));
        CHECK(scaled_cv2 == Approx(cv2));
    }
    CHECK_THROWS_AS(Distribution::exponential(1.0).with_mean(0.0), ParameterError);
}
