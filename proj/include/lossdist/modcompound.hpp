#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lossdist/severity.hpp"

namespace lossdist {

// Mod-compound-Poisson approximation scheme of order r for portfolio losses
// L = sum_i Z_i Y_i with i.i.d. integer exposures Z_i: the base law becomes
// the compound Poisson CP(lambda, Z) and the corrector stays the polynomial
// 1 + sum_{k=2}^r b_k z^k in z = e^{i xi}-1, so the finite-difference
// machinery of the plain scheme carries over unchanged.
struct CompoundCoefficients {
    int order = 0;
    double lambda = 0.0;
    Severity severity;
    // b[k] for k = 0..order with b[0] = 1 and b[1] = 0.
    std::vector<double> b;
};

// Factorial moments E[(Z)_j] = E[Z (Z-1) .. (Z-j+1)] for j = 0..r (slot j;
// slot 0 is 1), compensated finite sums over the severity support. r >= 1.
std::vector<double> factorial_moments(const Severity& z, int r);

// Scheme coefficients by truncated series composition: with
// s(z) = sum_{j=1}^r E[(Z)_j]/j! z^j (so that mu_Z-hat - 1 = s(z) + O(z^{r+1})),
// a(z) = sum_{k=2}^r ((-1)^{k-1}/k) p_k s(z)^k and b = exp(a), all truncated
// at degree r. 0 <= r <= 12. With Z == 1 the result reduces to the plain
// scheme coefficients(pd, r).
CompoundCoefficients cp_coefficients(std::span<const double> pd, const Severity& z,
                                     int r);

// pmf of CP(lam, Z) on {0..kmax} by Panjer recursion. An atom of Z at zero is
// thinned away first (lambda' = lam (1 - q_0), Z' = Z | Z >= 1); the
// recursion itself is run in a rescaled frame so that lam' beyond the exp
// underflow threshold still yields the representable part of the pmf.
std::vector<double> cp_pmf(double lam, const Severity& z, std::int64_t kmax);

// Truncation index for whole-support summations: smallest k whose cumulative
// CP mass reaches 1 - 1e-12, capped at lam m + 40 sqrt(lam m E[Z^2]) + 10 r.
std::int64_t cp_truncation_index(double lam, const Severity& z, int order);

// Expectation of f under the order-r signed measure:
// E_CP[f] + E_CP[Delta(r,f)], truncated at cp_truncation_index.
double cp_expectation(const CompoundCoefficients& c,
                      const std::function<double(std::int64_t)>& f);

} // namespace lossdist
