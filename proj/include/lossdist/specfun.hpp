#pragma once

#include <cstdint>
#include <vector>

namespace lossdist {

// Regularized lower incomplete gamma P(x, lam) = gamma(x, lam) / Gamma(x).
// Series expansion for lam < x + 1, continued fraction of the complement
// otherwise. x > 0, lam >= 0.
double regularized_gamma_p(double x, double lam);

// Raw lower incomplete gamma. Accurate wherever the value is representable;
// overflows to +inf together with Gamma(x) for large x.
double lower_incomplete_gamma(double x, double lam);

double poisson_pmf(double lam, std::int64_t k);

// P{Poisson(lam) > k} = P(k+1, lam); k < 0 gives 1.
double poisson_tail(double lam, std::int64_t k);

double std_normal_pdf(double x);
double std_normal_cdf(double x);

// Inverse of std_normal_cdf; u must lie strictly inside (0,1).
double std_normal_quantile(double u);

struct Quadrature {
    std::vector<double> nodes;    // ascending
    std::vector<double> weights;  // sum to 1
};

// Gauss-Hermite rule for the standard normal weight (probabilists' form),
// built via Golub-Welsch. 1 <= n <= 512.
Quadrature gauss_hermite(int n);

} // namespace lossdist
