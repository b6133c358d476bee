#include "lossdist/modcompound.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lossdist/combinatorics.hpp"
#include "lossdist/errors.hpp"
#include "lossdist/modpoisson.hpp"
#include "lossdist/numeric.hpp"

namespace lossdist {

namespace {

// The set-partition double sum behind these coefficients grows like the Bell
// numbers; the series path below is O(r^2) but is only exercised this far.
constexpr int kMaxCompoundOrder = 12;

void check_order(int r, int limit, const char* where) {
    if (r < 0) throw input_error(std::string(where) + ": order must be non-negative");
    if (r > limit)
        throw input_error(std::string(where) + ": unsupported order " + std::to_string(r) +
                          " (maximum " + std::to_string(limit) + ")");
}

SeriesCoefficients product_truncated(const SeriesCoefficients& u,
                                     const SeriesCoefficients& v, int deg) {
    SeriesCoefficients out(static_cast<std::size_t>(deg) + 1, 0.0);
    for (int i = 0; i <= deg && i < static_cast<int>(u.size()); ++i) {
        if (u[i] == 0.0) continue;
        const int jmax = std::min(deg - i, static_cast<int>(v.size()) - 1);
        for (int j = 0; j <= jmax; ++j) out[i + j] += u[i] * v[j];
    }
    return out;
}

} // namespace

std::vector<double> factorial_moments(const Severity& z, int r) {
    if (r < 1) throw input_error("factorial_moments: order must be >= 1");
    z.validate();
    std::vector<double> fm(static_cast<std::size_t>(r) + 1, 0.0);
    fm[0] = 1.0;
    for (int j = 1; j <= r; ++j) {
        CompensatedSum acc;
        for (std::size_t k = static_cast<std::size_t>(j); k < z.pmf.size(); ++k) {
            double fall = 1.0;  // (k)_j = k (k-1) .. (k-j+1)
            for (int t = 0; t < j; ++t) fall *= static_cast<double>(k - t);
            acc.add(fall * z.pmf[k]);
        }
        fm[j] = acc.value();
    }
    return fm;
}

CompoundCoefficients cp_coefficients(std::span<const double> pd, const Severity& z,
                                     int r) {
    check_order(r, kMaxCompoundOrder, "cp_coefficients");
    z.validate();
    CompoundCoefficients c;
    c.order = r;
    c.severity = z;
    CompensatedSum lam;
    for (double p : pd) lam.add(p);
    c.lambda = lam.value();
    c.b.assign(static_cast<std::size_t>(r) + 1, 0.0);
    c.b[0] = 1.0;
    if (r < 2) return c;

    const std::vector<double> psum = power_sums(pd, r);
    const std::vector<double> fm = factorial_moments(z, r);
    SeriesCoefficients s(static_cast<std::size_t>(r) + 1, 0.0);
    double fact = 1.0;
    for (int j = 1; j <= r; ++j) {
        fact *= static_cast<double>(j);
        s[j] = fm[j] / fact;
    }

    // a(z) = sum_{k=2}^r ((-1)^{k-1}/k) p_k s(z)^k; s has no constant term, so
    // s^k contributes from degree k on and the truncation closes at degree r.
    SeriesCoefficients a(static_cast<std::size_t>(r) + 1, 0.0);
    SeriesCoefficients spow = s;
    for (int k = 2; k <= r; ++k) {
        spow = product_truncated(spow, s, r);
        const double w = (k % 2 == 0 ? -1.0 : 1.0) / static_cast<double>(k) * psum[k];
        for (int d = k; d <= r; ++d) a[d] += w * spow[d];
    }
    c.b = series_exp(a);
    return c;
}

std::vector<double> cp_pmf(double lam, const Severity& z, std::int64_t kmax) {
    if (!(lam >= 0.0) || !std::isfinite(lam))
        throw input_error("cp_pmf: lambda must be finite and non-negative");
    if (kmax < 0) throw input_error("cp_pmf: kmax must be non-negative");
    z.validate();
    const std::vector<double>& q = z.pmf;
    const std::int64_t m = z.max_value();
    std::vector<double> out(static_cast<std::size_t>(kmax) + 1, 0.0);
    const double lam_eff = lam * (1.0 - q[0]);
    if (lam_eff == 0.0) {
        out[0] = 1.0;
        return out;
    }

    // Panjer: g_k = (lam/k) sum_{j=1}^{min(k,m)} j q_j g_{k-j}, g_0 = e^{-lam'}.
    // The atom at zero is thinned into lam' = lam (1 - q_0); the (1 - q_0)
    // cancels against the conditioned severity weights q_j / (1 - q_0) inside
    // the sum. The recursion is linear in g_0, so for large lam' we seed a
    // shifted start, rescale the live window whenever it grows too large, and
    // materialize each final entry with the scale current at its step.
    const double shift = lam_eff > 700.0 ? lam_eff - 700.0 : 0.0;
    double log_scale = -shift;  // true g_k = work[k] * exp(log_scale at step k)
    double scale = std::exp(log_scale);
    std::vector<double> work(out.size(), 0.0);
    work[0] = std::exp(-(lam_eff - shift));
    out[0] = work[0] * scale;
    constexpr double kRescaleAt = 1e280;
    for (std::int64_t k = 1; k <= kmax; ++k) {
        CompensatedSum acc;
        const std::int64_t jmax = std::min(k, m);
        for (std::int64_t j = 1; j <= jmax; ++j)
            acc.add(static_cast<double>(j) * q[static_cast<std::size_t>(j)] *
                    work[static_cast<std::size_t>(k - j)]);
        double gk = lam / static_cast<double>(k) * acc.value();
        if (gk > kRescaleAt) {
            const std::int64_t lo = std::max<std::int64_t>(0, k - m);
            for (std::int64_t i = lo; i < k; ++i)
                work[static_cast<std::size_t>(i)] /= kRescaleAt;
            gk /= kRescaleAt;
            log_scale += std::log(kRescaleAt);
            scale = std::exp(log_scale);
        }
        work[static_cast<std::size_t>(k)] = gk;
        out[static_cast<std::size_t>(k)] = gk * scale;
    }
    return out;
}

std::int64_t cp_truncation_index(double lam, const Severity& z, int order) {
    z.validate();
    const double m = static_cast<double>(z.max_value());
    const double cap_d =
        lam * m + 40.0 * std::sqrt(lam * m * z.second_moment()) + 10.0 * order;
    const std::int64_t cap = std::max<std::int64_t>(
        static_cast<std::int64_t>(std::ceil(cap_d)), 10 * static_cast<std::int64_t>(order));
    const std::vector<double> g = cp_pmf(lam, z, cap);
    CompensatedSum cum;
    for (std::int64_t k = 0; k <= cap; ++k) {
        cum.add(g[static_cast<std::size_t>(k)]);
        if (cum.value() >= 1.0 - 1e-12) return k;
    }
    return cap;
}

double cp_expectation(const CompoundCoefficients& c,
                      const std::function<double(std::int64_t)>& f) {
    const std::int64_t kmax = cp_truncation_index(c.lambda, c.severity, c.order);
    const std::vector<double> g = cp_pmf(c.lambda, c.severity, kmax);
    const std::span<const double> b(c.b);
    CompensatedSum acc;
    for (std::int64_t k = 0; k <= kmax; ++k)
        acc.add(g[static_cast<std::size_t>(k)] * (f(k) + correction_delta(b, f, k)));
    return acc.value();
}

} // namespace lossdist
