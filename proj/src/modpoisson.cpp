#include "lossdist/modpoisson.hpp"

#include <cmath>
#include <string>

#include "lossdist/combinatorics.hpp"
#include "lossdist/errors.hpp"
#include "lossdist/numeric.hpp"
#include "lossdist/specfun.hpp"

namespace lossdist {

namespace {

constexpr int kMaxOrder = 30;

// Pascal triangle rows up to n; exact in double for n <= 30.
std::vector<std::vector<double>> binomial_rows(int n) {
    std::vector<std::vector<double>> c(n + 1);
    for (int i = 0; i <= n; ++i) {
        c[i].assign(i + 1, 1.0);
        for (int j = 1; j < i; ++j) c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
    }
    return c;
}

void check_order(int r, int limit, const char* where) {
    if (r < 0) throw input_error(std::string(where) + ": order must be non-negative");
    if (r > limit)
        throw input_error(std::string(where) + ": unsupported order " + std::to_string(r) +
                          " (maximum " + std::to_string(limit) + ")");
}

} // namespace

std::vector<double> power_sums(std::span<const double> pd, int r) {
    if (r < 2) throw input_error("power_sums: order must be >= 2");
    std::vector<CompensatedSum> acc(r + 1);
    for (double p : pd) {
        double pk = 1.0;
        for (int k = 0; k <= r; ++k) {
            acc[k].add(pk);
            pk *= p;
        }
    }
    std::vector<double> out(r + 1);
    for (int k = 0; k <= r; ++k) out[k] = acc[k].value();
    return out;
}

SchemeCoefficients coefficients(std::span<const double> pd, int r) {
    check_order(r, kMaxOrder, "coefficients");
    SchemeCoefficients c;
    c.order = r;
    c.b.assign(r + 1, 0.0);
    c.b[0] = 1.0;

    if (r < 2) {
        CompensatedSum lam;
        for (double p : pd) lam.add(p);
        c.lambda = lam.value();
        return c;
    }

    const auto ps = power_sums(pd, r);
    c.lambda = ps[1];
    for (int k = 2; k <= r; ++k) {
        CompensatedSum bk;
        for (const auto& part : partitions_with_min_part(k, 2)) {
            double prod = 1.0;
            for (int m : part.parts) prod *= ps[m];
            prod /= static_cast<double>(z_lambda(part));
            bk.add(((k - part.length()) % 2 == 0) ? prod : -prod);
        }
        c.b[k] = bk.value();
    }
    return c;
}

SchemeCoefficients coefficients_from_moments(std::span<const double> moments, int r) {
    check_order(r, 20, "coefficients_from_moments");
    if (moments.empty() || static_cast<int>(moments.size()) < r)
        throw input_error("coefficients_from_moments: need moments M_1..M_r");
    SchemeCoefficients c;
    c.order = r;
    c.b.assign(r + 1, 0.0);
    c.b[0] = 1.0;
    c.lambda = moments[0];
    if (r < 1) return c;

    const StirlingTable st(r);
    const double m1 = moments[0];
    // Falling powers of -1 times factorials, assembled per order k:
    // b_k = (-1)^k M1^k / k! +
    //       sum_{1<=m<=l<=k} (-1)^{k-m} c(l,m) / (l! (k-l)!) M_m M1^{k-l}
    std::vector<double> fact(r + 1, 1.0);
    for (int i = 1; i <= r; ++i) fact[i] = fact[i - 1] * i;
    for (int k = 1; k <= r; ++k) {
        CompensatedSum bk;
        bk.add((k % 2 == 0 ? 1.0 : -1.0) * std::pow(m1, k) / fact[k]);
        for (int l = 1; l <= k; ++l) {
            for (int m = 1; m <= l; ++m) {
                const double sign = ((k - m) % 2 == 0) ? 1.0 : -1.0;
                const double stir = static_cast<double>(st.first_kind(l, m));
                bk.add(sign * stir / (fact[l] * fact[k - l]) * moments[m - 1] *
                       std::pow(m1, k - l));
            }
        }
        c.b[k] = bk.value();
    }
    return c;
}

double signed_measure_pmf(const SchemeCoefficients& c, std::int64_t k) {
    if (k < 0) return 0.0;
    const auto binom = binomial_rows(c.order);
    CompensatedSum acc;
    for (int j = 0; j <= c.order; ++j) {
        if (c.b[j] == 0.0) continue;
        for (int l = 0; l <= j; ++l) {
            const double sign = ((j - l) % 2 == 0) ? 1.0 : -1.0;
            acc.add(c.b[j] * sign * binom[j][l] * poisson_pmf(c.lambda, k - l));
        }
    }
    return acc.value();
}

double correction_delta(std::span<const double> b,
                        const std::function<double(std::int64_t)>& f, std::int64_t j) {
    const int r = static_cast<int>(b.size()) - 1;
    const auto binom = binomial_rows(r);
    CompensatedSum acc;
    for (int k = 1; k <= r; ++k) {
        if (b[k] == 0.0) continue;
        for (int l = 0; l <= k; ++l) {
            const double sign = ((k - l) % 2 == 0) ? 1.0 : -1.0;
            acc.add(b[k] * sign * binom[k][l] * f(j + l));
        }
    }
    return acc.value();
}

double expectation(const SchemeCoefficients& c,
                   const std::function<double(std::int64_t)>& f) {
    const std::int64_t kmax = truncation_index(c.lambda, c.order);
    CompensatedSum acc;
    for (std::int64_t j = 0; j <= kmax; ++j) {
        const double pj = poisson_pmf(c.lambda, j);
        acc.add(pj * f(j));
        acc.add(pj * correction_delta(c.b, f, j));
    }
    return acc.value();
}

double tail_estimate(const SchemeCoefficients& c, double x) {
    if (x < 0.0) return 1.0;
    const std::int64_t fx = static_cast<std::int64_t>(std::floor(x));
    double value = poisson_tail(c.lambda, fx);
    const auto indicator = [x](std::int64_t t) { return t > x ? 1.0 : 0.0; };
    const std::int64_t jlo = std::max<std::int64_t>(0, fx - c.order + 1);
    for (std::int64_t j = jlo; j <= fx; ++j)
        value += poisson_pmf(c.lambda, j) * correction_delta(c.b, indicator, j);
    return value;
}

double call_estimate(const SchemeCoefficients& c, double K) {
    if (!(K >= 0.0)) throw input_error("call_estimate: strike must be >= 0");
    if (K == 0.0) return c.lambda;  // exact mean; all corrections vanish
    const std::int64_t ck = static_cast<std::int64_t>(std::ceil(K));
    const std::int64_t fk = static_cast<std::int64_t>(std::floor(K));
    double value = c.lambda * poisson_tail(c.lambda, ck - 2) -
                   K * poisson_tail(c.lambda, ck - 1);
    const auto payoff = [K](std::int64_t t) {
        const double d = static_cast<double>(t) - K;
        return d > 0.0 ? d : 0.0;
    };
    const std::int64_t jlo = std::max<std::int64_t>(0, fk - c.order + 1);
    for (std::int64_t j = jlo; j <= fk; ++j)
        value += poisson_pmf(c.lambda, j) * correction_delta(c.b, payoff, j);
    return value;
}

std::int64_t truncation_index(double lambda, int order) {
    return static_cast<std::int64_t>(std::ceil(lambda + 40.0 * std::sqrt(lambda))) +
           10 * static_cast<std::int64_t>(order);
}

} // namespace lossdist
