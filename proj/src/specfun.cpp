#include "lossdist/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lossdist/errors.hpp"

namespace lossdist {

namespace {

constexpr double kEps = 1e-16;
constexpr double kFpMin = std::numeric_limits<double>::min() / kEps;
constexpr int kMaxIter = 20000;

// Series for P(x, lam), valid and fast for lam < x + 1.
double gamma_p_series(double x, double lam) {
    double ap = x;
    double del = 1.0 / x;
    double sum = del;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        del *= lam / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps)
            return sum * std::exp(-lam + x * std::log(lam) - std::lgamma(x));
    }
    throw numeric_error("regularized_gamma_p: series did not converge");
}

// Modified Lentz continued fraction for Q(x, lam), lam >= x + 1.
double gamma_q_continued_fraction(double x, double lam) {
    double b = lam + 1.0 - x;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -i * (i - x);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps)
            return h * std::exp(-lam + x * std::log(lam) - std::lgamma(x));
    }
    throw numeric_error("regularized_gamma_p: continued fraction did not converge");
}

} // namespace

double regularized_gamma_p(double x, double lam) {
    if (!(x > 0.0)) throw input_error("regularized_gamma_p: x must be positive");
    if (!(lam >= 0.0)) throw input_error("regularized_gamma_p: lam must be non-negative");
    if (lam == 0.0) return 0.0;
    if (lam < x + 1.0) return gamma_p_series(x, lam);
    return 1.0 - gamma_q_continued_fraction(x, lam);
}

double lower_incomplete_gamma(double x, double lam) {
    if (!(x > 0.0)) throw input_error("lower_incomplete_gamma: x must be positive");
    if (!(lam >= 0.0)) throw input_error("lower_incomplete_gamma: lam must be non-negative");
    if (lam == 0.0) return 0.0;
    const double p = regularized_gamma_p(x, lam);
    if (p == 0.0) return 0.0;
    if (x <= 170.0) return p * std::tgamma(x);
    return std::exp(std::lgamma(x) + std::log(p));
}

double poisson_pmf(double lam, std::int64_t k) {
    if (!(lam >= 0.0)) throw input_error("poisson_pmf: lam must be non-negative");
    if (k < 0) return 0.0;
    if (lam == 0.0) return k == 0 ? 1.0 : 0.0;
    const double kk = static_cast<double>(k);
    return std::exp(kk * std::log(lam) - lam - std::lgamma(kk + 1.0));
}

double poisson_tail(double lam, std::int64_t k) {
    if (!(lam >= 0.0)) throw input_error("poisson_tail: lam must be non-negative");
    if (k < 0) return 1.0;
    if (lam == 0.0) return 0.0;
    return regularized_gamma_p(static_cast<double>(k) + 1.0, lam);
}

double std_normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

double std_normal_quantile(double u) {
    if (!(u > 0.0 && u < 1.0))
        throw input_error("std_normal_quantile: u must lie in (0,1), got " + std::to_string(u));

    // Acklam's rational approximation, then one Halley step.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;

    double x;
    if (u < p_low) {
        const double q = std::sqrt(-2.0 * std::log(u));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (u <= 1.0 - p_low) {
        const double q = u - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - u));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    const double pdf = std_normal_pdf(x);
    if (pdf > 0.0) {
        const double e = std_normal_cdf(x) - u;
        const double t = e / pdf;
        x -= t / (1.0 + 0.5 * x * t);
    }
    return x;
}

namespace {

// Implicit-shift QL on a symmetric tridiagonal matrix, accumulating only the
// first row of the eigenvector matrix (all Golub-Welsch needs for weights).
// d: diagonal, e: subdiagonal in e[0..n-2], z: first-row accumulator.
void tridiagonal_ql_first_row(std::vector<double>& d, std::vector<double>& e,
                              std::vector<double>& z) {
    const int n = static_cast<int>(d.size());
    e.resize(n, 0.0);
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m != l) {
                if (iter++ == 60)
                    throw numeric_error("gauss_hermite: QL iteration did not converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i = m - 1;
                for (; i >= l; --i) {
                    double f = s * e[i];
                    const double bb = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * bb;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - bb;
                    f = z[i + 1];
                    z[i + 1] = s * z[i] + c * f;
                    z[i] = c * z[i] - s * f;
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

} // namespace

Quadrature gauss_hermite(int n) {
    if (n < 1 || n > 512)
        throw input_error("gauss_hermite: node count must lie in [1, 512], got " +
                          std::to_string(n));
    std::vector<double> d(n, 0.0);
    std::vector<double> e(std::max(n - 1, 0));
    for (int k = 1; k < n; ++k) e[k - 1] = std::sqrt(static_cast<double>(k));
    std::vector<double> z(n, 0.0);
    z[0] = 1.0;
    tridiagonal_ql_first_row(d, e, z);

    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] < d[b]; });

    Quadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        q.nodes[i] = d[idx[i]];
        q.weights[i] = z[idx[i]] * z[idx[i]];  // first-moment normalization is 1
    }
    return q;
}

} // namespace lossdist
