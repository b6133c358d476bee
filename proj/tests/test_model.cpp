#include <cmath>
#include <string>

#include "doctest.h"
#include "lossdist/errors.hpp"
#include "lossdist/numeric.hpp"
#include "lossdist/portfolio.hpp"
#include "lossdist/rng.hpp"

using namespace lossdist;

namespace {

Portfolio flat_portfolio(int n, double pd, double rho) {
    Portfolio p;
    p.avg_pd.assign(n, pd);
    p.rho = rho;
    return p;
}

} // namespace

TEST_SUITE("model") {

TEST_CASE("philox known-answer vectors") {
    // Reference vectors from the counter-RNG paper's test set.
    auto r1 = philox4x32_block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                               {0xffffffffu, 0xffffffffu});
    CHECK(r1[0] == 0x408f276du);
    CHECK(r1[1] == 0x41c83b0eu);
    CHECK(r1[2] == 0xa20bc7c6u);
    CHECK(r1[3] == 0x6d5451fdu);

    auto r2 = philox4x32_block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                               {0xa4093822u, 0x299f31d0u});
    CHECK(r2[0] == 0xd16cfe09u);
    CHECK(r2[1] == 0x94fdccebu);
    CHECK(r2[2] == 0x5001e420u);
    CHECK(r2[3] == 0x24126ea1u);
}

TEST_CASE("uniform draws are deterministic and inside the open interval") {
    double lo = 1.0, hi = 0.0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const double u = uniform_open01(42, 7, i);
        CHECK(u == uniform_open01(42, 7, i));
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(uniform_open01(42, 7, 0) != uniform_open01(43, 7, 0));
    CHECK(uniform_open01(42, 7, 0) != uniform_open01(42, 8, 0));
}

TEST_CASE("conditional pds: sign convention and degenerate correlation") {
    auto port = flat_portfolio(4, 0.05, 0.3);

    auto mid = conditional_pd(port, 0.0);
    const double expected =
        std_normal_cdf(std_normal_quantile(0.05) / std::sqrt(0.7));
    CHECK(mid.pd[0] == doctest::Approx(expected).epsilon(1e-14));

    // a LOW factor value means HIGH conditional default probability
    auto stressed = conditional_pd(port, -3.0);
    auto benign = conditional_pd(port, 3.0);
    CHECK(stressed.pd[0] > mid.pd[0]);
    CHECK(benign.pd[0] < mid.pd[0]);

    auto indep = conditional_pd(flat_portfolio(3, 0.07, 0.0), -5.0);
    CHECK(indep.pd[1] == 0.07);

    // clamping keeps the slice inside (0,1) even at absurd factor values
    auto extreme = conditional_pd(port, -60.0);
    CHECK(extreme.pd[0] <= 1.0 - 1e-16);
    CHECK(extreme.pd[0] > 0.99);
}

TEST_CASE("factor integration recovers the unconditional pd exactly") {
    // integral of the copula map over the factor is the unconditional pd
    for (double rho : {0.1, 0.3, 0.6}) {
        auto port = flat_portfolio(8, 0.05, rho);
        const auto quad = gauss_hermite(64);
        const double mixed = integrate_factor(port, quad, [](const ConditionalSlice& s) {
            CompensatedSum m;
            for (double p : s.pd) m.add(p);
            return m.value() / static_cast<double>(s.pd.size());
        });
        CHECK(mixed == doctest::Approx(0.05).epsilon(1e-12));
    }
}

TEST_CASE("factor integration attaches the node index to failures") {
    auto port = flat_portfolio(2, 0.05, 0.2);
    const auto quad = gauss_hermite(8);
    try {
        integrate_factor(port, quad, [](const ConditionalSlice&) -> double {
            throw numeric_error("inner failure");
        });
        FAIL("expected numeric_error");
    } catch (const numeric_error& e) {
        CHECK(std::string(e.what()).find("node 0") != std::string::npos);
        CHECK(std::string(e.what()).find("inner failure") != std::string::npos);
    }
}

TEST_CASE("severity validation") {
    Severity ok{{0.2, 0.5, 0.3}};
    CHECK_NOTHROW(ok.validate());
    CHECK(ok.mean() == doctest::Approx(1.1).epsilon(1e-14));
    CHECK(ok.second_moment() == doctest::Approx(0.5 + 4 * 0.3).epsilon(1e-14));

    const Severity bad_sum{{0.2, 0.9}};
    const Severity negative{{-0.1, 1.1}};
    const Severity empty{{}};
    CHECK_THROWS_AS(bad_sum.validate(), input_error);
    CHECK_THROWS_AS(negative.validate(), input_error);
    CHECK_THROWS_AS(empty.validate(), input_error);
}

TEST_CASE("portfolio JSON: explicit pd list") {
    auto port = portfolio_from_json(R"({"n": 3, "rho": 0.2, "avg_pd": [0.01, 0.02, 0.03]})");
    CHECK(port.size() == 3);
    CHECK(port.rho == 0.2);
    CHECK(port.avg_pd[2] == 0.03);
    CHECK(!port.exposure);
    CHECK(port.notional_per_obligor == 1.0);
    CHECK(port.max_loss() == 3);
}

TEST_CASE("portfolio JSON: pd grid") {
    auto port = portfolio_from_json(
        R"({"n": 5, "rho": 0.3, "pd_grid": {"lo": 0.02, "hi": 0.08}})");
    REQUIRE(port.size() == 5);
    CHECK(port.avg_pd[0] == doctest::Approx(0.02).epsilon(1e-15));
    CHECK(port.avg_pd[1] == doctest::Approx(0.035).epsilon(1e-15));
    CHECK(port.avg_pd[2] == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(port.avg_pd[4] == doctest::Approx(0.08).epsilon(1e-15));
}

TEST_CASE("portfolio JSON: lognormal pds are deterministic per seed") {
    const std::string cfg =
        R"({"n": 2000, "rho": 0.1, "pd_lognormal": {"mean": 0.03, "sd": 0.015, "seed": 9}})";
    auto a = portfolio_from_json(cfg);
    auto b = portfolio_from_json(cfg);
    CHECK(a.avg_pd == b.avg_pd);

    auto c = portfolio_from_json(
        R"({"n": 2000, "rho": 0.1, "pd_lognormal": {"mean": 0.03, "sd": 0.015, "seed": 10}})");
    CHECK(a.avg_pd != c.avg_pd);

    CompensatedSum s;
    for (double p : a.avg_pd) s.add(p);
    CHECK(s.value() / 2000.0 == doctest::Approx(0.03).epsilon(0.05));
    for (double p : a.avg_pd) CHECK((p > 0.0 && p < 1.0));
}

TEST_CASE("portfolio JSON: exposures and notional") {
    auto port = portfolio_from_json(
        R"({"n": 2, "avg_pd": [0.1, 0.2], "exposure": {"pmf": [0.0, 0.5, 0.5]},
            "notional_per_obligor": 1000000.0})");
    REQUIRE(port.exposure.has_value());
    CHECK(port.exposure->max_value() == 2);
    CHECK(port.notional_per_obligor == 1e6);
    CHECK(port.max_loss() == 4);
}

TEST_CASE("portfolio JSON: diagnostics name the offending field") {
    auto expect_mentions = [](const std::string& text, const std::string& needle) {
        try {
            portfolio_from_json(text);
            FAIL("expected input_error for ", text);
        } catch (const input_error& e) {
            CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos,
                          "message was: ", e.what());
        }
    };
    expect_mentions(R"({"n": 3, "rho": 1.2, "avg_pd": [0.01, 0.02, 0.03]})", "rho");
    expect_mentions(R"({"n": 3, "avg_pd": [0.01, 0.02]})", "avg_pd");
    expect_mentions(R"({"n": 2, "avg_pd": [0.01, 1.5]})", "avg_pd[1]");
    expect_mentions(R"({"n": 2})", "avg_pd");
    expect_mentions(R"({"n": 2, "avg_pd": [0.1, 0.1], "pd_grid": {"lo": 0.1, "hi": 0.2}})",
                    "exactly one");
    expect_mentions(R"({"n": 2, "avg_pd": [0.1, 0.1], "exposure": {"pmf": [0.5, 0.6]}})",
                    "exposure.pmf");
    expect_mentions(R"({"n": 2, "avg_pd": [0.1, 0.1], "typo_field": 1})", "typo_field");
    expect_mentions(R"({"n": 0, "avg_pd": []})", "n");
    expect_mentions(R"(not json)", "JSON");
}

} // TEST_SUITE
