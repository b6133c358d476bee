#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace lossdist {

// Mod-Poisson approximation scheme of order r for a sum of independent
// Bernoullis: the signed measure nu whose generating function in z = e^{i xi}-1
// is (1 + sum_{k=2}^r b_k z^k) exp(lambda z). It matches the target's
// factorial cumulants up to order r.
struct SchemeCoefficients {
    int order = 0;
    double lambda = 0.0;
    // b[k] for k = 0..order with b[0] = 1 (the Poisson part) and b[1] = 0.
    std::vector<double> b;
};

// Power sums p_k = sum_i pd_i^k for k = 0..r (slot k), compensated summation.
// Requires r >= 2.
std::vector<double> power_sums(std::span<const double> pd, int r);

// Scheme coefficients via the sum over integer partitions with parts >= 2:
// b_k = sum_{lambda |- k, parts >= 2} (-1)^{k - len(lambda)} p_lambda / z_lambda.
// 0 <= r <= 30.
SchemeCoefficients coefficients(std::span<const double> pd, int r);

// Same scheme recovered from the raw moments M_1..M_r of the target count
// (moments[k-1] = E[L^k]), through the signed Stirling transform. r <= 20.
SchemeCoefficients coefficients_from_moments(std::span<const double> moments, int r);

// Mass of the signed measure at k: a finite alternating combination of
// Poisson masses at k, k-1, .., k-r.
double signed_measure_pmf(const SchemeCoefficients& c, std::int64_t k);

// Forward-difference correction Delta(r,f)(j) = sum_k b_k sum_{l=0}^{k}
// (-1)^{k-l} C(k,l) f(j+l); b[0] excluded.
double correction_delta(std::span<const double> b,
                        const std::function<double(std::int64_t)>& f, std::int64_t j);

// Expectation of f under the signed measure: E_Poisson[f] + E_Poisson[Delta(r,f)],
// both truncated at truncation_index(lambda, order).
double expectation(const SchemeCoefficients& c,
                   const std::function<double(std::int64_t)>& f);

// P{L > x} under the signed measure: regularized-gamma head plus a correction
// supported on the r Poisson masses ending at floor(x). Returns 1 for x < 0.
double tail_estimate(const SchemeCoefficients& c, double x);

// Stop-loss transform E[(L - K)^+] under the signed measure, K >= 0. The
// gamma-head terms are expressed through poisson_tail so that small K (where
// the tail index goes negative) needs no special case.
double call_estimate(const SchemeCoefficients& c, double K);

// Truncation index ceil(lambda + 40 sqrt(lambda)) + 10 r used for summations
// over the whole support.
std::int64_t truncation_index(double lambda, int order);

} // namespace lossdist
