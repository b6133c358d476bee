#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "lossdist/errors.hpp"
#include "lossdist/modpoisson.hpp"
#include "lossdist/numeric.hpp"
#include "lossdist/specfun.hpp"
#include "oracles.hpp"

using namespace lossdist;

namespace {

std::vector<double> random_pds(std::mt19937& gen, int n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> pd(n);
    for (double& p : pd) p = u(gen);
    return pd;
}

double direct_tail(const SchemeCoefficients& c, double x) {
    CompensatedSum s;
    const std::int64_t kmax = truncation_index(c.lambda, c.order);
    for (std::int64_t k = kmax; k > static_cast<std::int64_t>(std::floor(x)); --k)
        s.add(signed_measure_pmf(c, k));
    return s.value();
}

double direct_call(const SchemeCoefficients& c, double K) {
    CompensatedSum s;
    const std::int64_t kmax = truncation_index(c.lambda, c.order);
    for (std::int64_t k = 0; k <= kmax; ++k) {
        const double payoff = static_cast<double>(k) - K;
        if (payoff > 0.0) s.add(payoff * signed_measure_pmf(c, k));
    }
    return s.value();
}

} // namespace

TEST_SUITE("modpoisson") {

TEST_CASE("power sums") {
    const std::vector<double> pd{0.1, 0.2};
    auto ps = power_sums(pd, 4);
    CHECK(ps[0] == 2.0);
    CHECK(ps[1] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(ps[2] == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(ps[3] == doctest::Approx(0.009).epsilon(1e-15));
    CHECK(ps[4] == doctest::Approx(0.0017).epsilon(1e-15));
    CHECK_THROWS_AS(power_sums(pd, 1), input_error);
}

TEST_CASE("scheme coefficients: pinned small-portfolio values") {
    const std::vector<double> pd{0.1, 0.2};
    auto c = coefficients(pd, 4);
    CHECK(c.order == 4);
    CHECK(c.lambda == doctest::Approx(0.3).epsilon(1e-15));
    REQUIRE(c.b.size() == 5);
    CHECK(c.b[0] == 1.0);
    CHECK(c.b[1] == 0.0);
    CHECK(c.b[2] == doctest::Approx(-0.025).epsilon(1e-14));          // -p2/2
    CHECK(c.b[3] == doctest::Approx(0.003).epsilon(1e-14));           // p3/3
    CHECK(c.b[4] == doctest::Approx(-0.0001125).epsilon(1e-12));      // -p4/4 + p2^2/8
}

TEST_CASE("scheme coefficients: order bounds and degenerate orders") {
    const std::vector<double> pd{0.05, 0.07, 0.02};
    CHECK_THROWS_AS(coefficients(pd, 31), input_error);
    CHECK_THROWS_AS(coefficients(pd, -1), input_error);
    CHECK_NOTHROW(coefficients(pd, 30));

    auto c0 = coefficients(pd, 0);
    CHECK(c0.b == std::vector<double>{1.0});
    auto c1 = coefficients(pd, 1);
    CHECK(c1.b == std::vector<double>{1.0, 0.0});
    CHECK(c1.lambda == doctest::Approx(0.14).epsilon(1e-15));
}

TEST_CASE("order-2 signed measure has the classical closed form") {
    std::mt19937 gen(17);
    const auto pd = random_pds(gen, 20, 0.01, 0.2);
    auto c = coefficients(pd, 2);
    const double lam = c.lambda;
    const double b2 = c.b[2];
    for (std::int64_t k = 0; k <= truncation_index(lam, 2); ++k) {
        const double kk = static_cast<double>(k);
        const double expected =
            poisson_pmf(lam, k) *
            (1.0 + b2 * (1.0 - 2.0 * kk / lam + kk * (kk - 1.0) / (lam * lam)));
        CHECK(signed_measure_pmf(c, k) ==
              doctest::Approx(expected).epsilon(1e-12).scale(1e-30));
    }
}

TEST_CASE("signed measure: unit mass and exact mean") {
    std::mt19937 gen(54);
    for (int rep = 0; rep < 5; ++rep) {
        const auto pd = random_pds(gen, 30, 0.01, 0.3);
        for (int r : {0, 1, 2, 4, 6, 10}) {
            auto c = coefficients(pd, r);
            CompensatedSum mass, mean;
            for (std::int64_t k = 0; k <= truncation_index(c.lambda, r); ++k) {
                const double v = signed_measure_pmf(c, k);
                mass.add(v);
                mean.add(static_cast<double>(k) * v);
            }
            CHECK(mass.value() == doctest::Approx(1.0).epsilon(1e-10));
            if (r >= 1)
                CHECK(mean.value() == doctest::Approx(c.lambda).epsilon(1e-9));
        }
    }
}

TEST_CASE("expectation agrees with direct summation and the Poisson base case") {
    std::mt19937 gen(99);
    const auto pd = random_pds(gen, 15, 0.02, 0.25);
    const auto f = [](std::int64_t k) {
        return static_cast<double>(k) * static_cast<double>(k);
    };
    for (int r : {0, 2, 4}) {
        auto c = coefficients(pd, r);
        CompensatedSum direct;
        for (std::int64_t k = 0; k <= truncation_index(c.lambda, r); ++k)
            direct.add(f(k) * signed_measure_pmf(c, k));
        CHECK(expectation(c, f) == doctest::Approx(direct.value()).epsilon(1e-10));
        if (r == 0) {
            const double lam = c.lambda;
            CHECK(expectation(c, f) == doctest::Approx(lam + lam * lam).epsilon(1e-12));
        }
    }
}

TEST_CASE("correction is local to the r-window below the threshold") {
    std::mt19937 gen(3);
    const auto pd = random_pds(gen, 12, 0.02, 0.2);
    for (int r : {2, 4, 6}) {
        auto c = coefficients(pd, r);
        const double x = 4.3, K = 5.0;
        const auto indicator = [x](std::int64_t t) { return t > x ? 1.0 : 0.0; };
        const auto payoff = [K](std::int64_t t) {
            return t > K ? static_cast<double>(t) - K : 0.0;
        };
        // outside the window the alternating sums cancel exactly in real
        // arithmetic; allow only product-rounding noise
        const std::int64_t fx = 4, fK = 5;
        for (std::int64_t j = fx - r - 5; j <= fx + 5; ++j) {
            const double d = correction_delta(c.b, indicator, j);
            if (j < fx - r + 1 || j > fx) CHECK(std::abs(d) <= 1e-15);
        }
        for (std::int64_t j = fK - r - 5; j <= fK + 5; ++j) {
            const double d = correction_delta(c.b, payoff, j);
            if (j < fK - r + 1 || j > fK) CHECK(std::abs(d) <= 1e-14);
        }
    }
}

TEST_CASE("tail estimate: conventions and direct-summation equality") {
    std::mt19937 gen(1234);
    const auto pd0 = random_pds(gen, 10, 0.02, 0.2);
    auto c0 = coefficients(pd0, 0);
    CHECK(tail_estimate(c0, -0.5) == 1.0);
    for (double x : {0.0, 1.0, 2.5, 6.0})
        CHECK(tail_estimate(c0, x) ==
              doctest::Approx(poisson_tail(c0.lambda, static_cast<std::int64_t>(x)))
                  .epsilon(1e-13));

    for (int rep = 0; rep < 10; ++rep) {
        const int n = 5 + static_cast<int>(gen() % 26);
        const auto pd = random_pds(gen, n, 0.01, 0.35);
        for (int r : {2, 4, 6}) {
            auto c = coefficients(pd, r);
            for (double x : {-0.5, 0.0, 0.5, 1.0, 2.5, 4.0, 7.5, 11.0}) {
                const double direct = x < 0.0 ? 1.0 : direct_tail(c, x);
                CHECK(tail_estimate(c, x) ==
                      doctest::Approx(direct).epsilon(1e-10).scale(1.0));
            }
        }
    }
}

TEST_CASE("call estimate: strike zero, parity, direct summation") {
    std::mt19937 gen(77);
    const auto pd = random_pds(gen, 25, 0.02, 0.3);
    for (int r : {0, 2, 4, 6}) {
        auto c = coefficients(pd, r);
        CHECK(call_estimate(c, 0.0) == c.lambda);

        for (double K : {2.5, 7.0, 12.0}) {
            CHECK(call_estimate(c, K) ==
                  doctest::Approx(direct_call(c, K)).epsilon(1e-10).scale(1.0));
            // put-call parity under a unit-mass, mean-lambda signed measure
            CompensatedSum put;
            for (std::int64_t k = 0; k <= truncation_index(c.lambda, r); ++k) {
                const double payoff = K - static_cast<double>(k);
                if (payoff > 0.0) put.add(payoff * signed_measure_pmf(c, k));
            }
            CHECK(call_estimate(c, K) - put.value() ==
                  doctest::Approx(c.lambda - K).epsilon(1e-9).scale(1.0));
        }
    }
    CHECK_THROWS_AS(call_estimate(coefficients(pd, 2), -1.0), input_error);
}

TEST_CASE("coefficients from raw moments agree with the partition formula") {
    std::mt19937 gen(2026);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 2 + static_cast<int>(gen() % 49);
        const int r = 2 + static_cast<int>(gen() % 5);
        const auto pd = random_pds(gen, n, 0.005, 0.3);
        const auto pmf = oracles::bernoulli_pmf(pd);
        const auto mom = oracles::raw_moments(pmf, r);
        auto cm = coefficients_from_moments(mom, r);
        auto cp = coefficients(pd, r);
        CHECK(cm.lambda == doctest::Approx(cp.lambda).epsilon(1e-12));
        for (int k = 0; k <= r; ++k)
            CHECK(cm.b[k] == doctest::Approx(cp.b[k]).epsilon(1e-10).scale(1.0));
    }
    CHECK_THROWS_AS(coefficients_from_moments(std::vector<double>{}, 2), input_error);
    CHECK_THROWS_AS(coefficients_from_moments(std::vector<double>{0.1}, 21), input_error);
}

TEST_CASE("factorial cumulants match through order r and die off above it") {
    std::mt19937 gen(4096);
    for (int rep = 0; rep < 6; ++rep) {
        const int n = 4 + static_cast<int>(gen() % 9);
        const auto pd = random_pds(gen, n, 5e-4, 2e-3);
        const auto ps = power_sums(pd, 7);
        for (int r = 1; r <= 4; ++r) {
            auto c = coefficients(pd, r);
            const std::int64_t kmax = truncation_index(c.lambda, r);
            auto kappa = oracles::factorial_cumulants(
                [&](std::int64_t k) {
                    return static_cast<long double>(signed_measure_pmf(c, k));
                },
                kmax, r + 2);
            for (int j = 1; j <= r; ++j) {
                const double exact =
                    (j % 2 == 1 ? 1.0 : -1.0) * oracles::factorial_u64(j - 1) * ps[j];
                CHECK(static_cast<double>(kappa[j]) ==
                      doctest::Approx(exact).epsilon(1e-7).scale(1.0));
            }
            CHECK(std::abs(static_cast<double>(kappa[r + 1])) <= 1e-7);
            CHECK(std::abs(static_cast<double>(kappa[r + 2])) <= 1e-7);
        }
    }
}

TEST_CASE("total variation against the exact pmf improves with the order") {
    std::mt19937 gen(31337);
    const auto pd = random_pds(gen, 50, 0.02, 0.08);
    const auto exact = oracles::bernoulli_pmf(pd);
    double prev = 2.0;
    for (int r : {0, 2, 4, 6, 10}) {
        auto c = coefficients(pd, r);
        CompensatedSum tv;
        const std::int64_t kmax = truncation_index(c.lambda, r);
        for (std::int64_t k = 0; k <= kmax; ++k) {
            const double ref = k < static_cast<std::int64_t>(exact.size())
                                   ? exact[k] : 0.0;
            tv.add(std::abs(signed_measure_pmf(c, k) - ref));
        }
        CHECK(tv.value() <= prev + 1e-12);
        prev = tv.value();
    }
    CHECK(prev < 1e-5);  // order 10 is already sharp on this slice
}

} // TEST_SUITE
