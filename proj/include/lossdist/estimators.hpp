#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lossdist/portfolio.hpp"
#include "lossdist/severity.hpp"

namespace lossdist {

// Discrete loss law on {0..N} in exposure units.
struct LossDistribution {
    std::vector<double> pmf;

    std::int64_t max_loss() const { return static_cast<std::int64_t>(pmf.size()) - 1; }
};

// Simulation estimate with its asymptotic standard error.
struct EstimateWithCI {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t runs = 0;
    double confidence = 0.95;
};

// Exact conditional loss pmf by one-obligor-at-a-time convolution: O(n^2) for
// unit exposures, O(n^2 m^2) with a severity on {0..m}. A support larger than
// the memory budget raises resource_error.
LossDistribution recursive_pmf(const ConditionalSlice& slice,
                               const std::optional<Severity>& exposure);

// Conditional cgf data at lam >= 0: value = sum_i log(1 + p_i (M(lam) - 1))
// with M the severity mgf (unit exposures when absent), plus the first two
// lam-derivatives. Callers pick the normalization: ld_tail divides by n, the
// importance-sampling weights use the raw sum.
struct CgfValue {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};
CgfValue conditional_cgf(const ConditionalSlice& slice,
                         const std::optional<Severity>& exposure, double lam);

// Exponential-tilt parameter: the unique lam > 0 with d/dlam cgf = x_total,
// found by safeguarded Newton (bisection fallback) to residual 1e-12.
// nullopt when the slice mean already reaches x_total (no tilt needed);
// input_error when x_total sits at or beyond the achievable supremum.
std::optional<double> tilt_parameter(const ConditionalSlice& slice,
                                     const std::optional<Severity>& exposure,
                                     double x_total);

// Sharp large-deviations tail value at per-obligor level x:
// exp(-n (lam x - F(lam))) / sqrt(2 pi n lam^2 F''(lam)) with F the
// per-obligor normalized cgf. nullopt when x sits at or below the conditional
// mean (the saddlepoint degenerates to lam = 0 and the formula blows up);
// the mixing layer substitutes tail value 1 there.
std::optional<double> ld_tail(const ConditionalSlice& slice, double x_per_obligor,
                              const std::optional<Severity>& exposure);

// Gaussian second-order correction for the call value E[(L - K)^+] on a
// slice with unit exposures: Bachelier value for the centered strike plus the
// third-moment term sum p(1-p)(1-2p) * Ktilde * phi_sigma(Ktilde) / (6 sigma^2).
// A degenerate slice (sigma = 0) returns (mean - K)^+ exactly.
double stein_gaussian_call(const ConditionalSlice& slice, double K);

// Poisson second-order correction for the call value at an integer strike
// K >= 1, unit exposures: Poisson(lambda) call value plus
// -(1/2) sum p_i^2 * e^{-lambda} lambda^{K-1} / (K-1)!. Coincides with the
// order-2 signed-measure call value.
double stein_poisson_call(const ConditionalSlice& slice, double K);

// Bernoulli success probability after exponential tilting by lam, given the
// severity mgf value M = E[e^{lam Z}] (unit exposure: M = e^lam). Saturates
// to 1 when p*M overflows.
double tilted_pd(double p, double lam, double mgf_value);

// Plain two-stage Monte Carlo for P{L > x}: factor draw, then conditional
// defaults and exposures. Counter-based draws keyed by (seed, run, obligor)
// make the result independent of batching and thread count.
EstimateWithCI mc_tail(const Portfolio& port, double x, std::int64_t runs,
                       std::uint64_t seed);

// One-step importance sampling: untilted factor, exponentially tilted
// conditional defaults/exposures at the per-factor saddlepoint, weights
// exp(-lam L + cgf). Runs where x sits below the conditional mean fall back
// to the untilted draw with unit weight.
EstimateWithCI is_tail_onestep(const Portfolio& port, double x, std::int64_t runs,
                               std::uint64_t seed);

// Two-step importance sampling: the factor is drawn from Normal(mu, 1) with
// mu maximizing cgf(lam_x(z), z) - lam_x(z) x - z^2/2, and the weight picks
// up the extra factor exp(mu^2/2 - mu psi).
EstimateWithCI is_tail_twostep(const Portfolio& port, double x, std::int64_t runs,
                               std::uint64_t seed);

// The outer factor shift used by is_tail_twostep: dense grid over [-8, 8]
// step 0.05, golden-section refinement to 1e-8, values within 1e-7 of zero
// snapped to zero so a factor-free portfolio reduces to one-step exactly.
double is_outer_shift(const Portfolio& port, double x);

} // namespace lossdist
