#include "lossdist/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "lossdist/errors.hpp"
#include "lossdist/numeric.hpp"
#include "lossdist/rng.hpp"
#include "lossdist/specfun.hpp"

namespace lossdist {

namespace {

constexpr std::size_t kMaxSupport = std::size_t{1} << 25;  // pmf entries budget

// Highest index with positive severity mass; trailing zeros would break the
// top-scaled mgf sums below.
int top_support(const Severity& z) {
    int m = z.max_value();
    while (m > 0 && z.pmf[static_cast<std::size_t>(m)] == 0.0) --m;
    return m;
}

int thread_budget() {
    if (const char* env = std::getenv("RISK_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(std::min<long>(v, 256));
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

constexpr std::int64_t kBatch = 4096;

// Per-run contributions folded batch-by-batch in index order: the partial
// sums, and therefore the result, do not depend on the thread count.
template <class Fn>
std::pair<double, double> accumulate_runs(std::int64_t runs, const Fn& fn) {
    const std::int64_t nbatch = (runs + kBatch - 1) / kBatch;
    std::vector<std::pair<double, double>> partial(static_cast<std::size_t>(nbatch));
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        try {
            for (std::int64_t b = next.fetch_add(1); b < nbatch; b = next.fetch_add(1)) {
                CompensatedSum s1, s2;
                const std::int64_t end = std::min(runs, (b + 1) * kBatch);
                for (std::int64_t t = b * kBatch; t < end; ++t) {
                    const double c = fn(t);
                    s1.add(c);
                    s2.add(c * c);
                }
                partial[static_cast<std::size_t>(b)] = {s1.value(), s2.value()};
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    const int threads = static_cast<int>(
        std::min<std::int64_t>(thread_budget(), std::max<std::int64_t>(nbatch, 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    CompensatedSum s1, s2;
    for (const auto& [a, b] : partial) {
        s1.add(a);
        s2.add(b);
    }
    return {s1.value(), s2.value()};
}

// Shared two-stage sampler. Draw layout per run t: counter 0 is the factor,
// 1+2i the default of obligor i, 2+2i its severity; every draw is a pure
// function of (seed, t, counter). With tilt off and mu = 0 this is plain
// Monte Carlo; the tilted paths reuse the same uniforms, so a run whose tilt
// degenerates to zero reproduces the plain draw bit for bit.
EstimateWithCI simulate_tail(const Portfolio& port, double x, std::int64_t runs,
                             std::uint64_t seed, bool tilt, double mu) {
    port.validate();
    if (runs < 1) throw input_error("tail simulation: runs must be >= 1");
    EstimateWithCI out;
    out.runs = runs;
    const std::optional<Severity>& z = port.exposure;
    const int meff = z ? top_support(*z) : 1;
    const int n = port.size();
    if (x >= static_cast<double>(n) * static_cast<double>(meff)) return out;  // empty event

    auto contribution = [&, x](std::int64_t t) -> double {
        const double u0 = uniform_open01(seed, t, 0);
        const double psi = mu + std_normal_quantile(u0);
        const ConditionalSlice slice = conditional_pd(port, psi);
        double lam = 0.0;
        if (tilt) lam = tilt_parameter(slice, z, x).value_or(0.0);

        double log_weight = 0.0;
        double E = 1.0, S0 = 1.0;
        thread_local std::vector<double> cdfbuf;
        if (z) {
            cdfbuf.assign(static_cast<std::size_t>(meff) + 1, 0.0);
            double cum = 0.0;
            for (int j = 0; j <= meff; ++j) {
                cum += z->pmf[static_cast<std::size_t>(j)] *
                       std::exp(lam * static_cast<double>(j - meff));
                cdfbuf[static_cast<std::size_t>(j)] = cum;
            }
            S0 = cum;
            for (double& c : cdfbuf) c /= S0;
        }
        if (lam > 0.0) {
            E = std::exp(-lam * static_cast<double>(meff));
            log_weight = conditional_cgf(slice, z, lam).value;
        }

        std::int64_t loss = 0;
        for (int i = 0; i < n; ++i) {
            const double p = slice.pd[static_cast<std::size_t>(i)];
            double q = p;
            if (lam > 0.0) q = p * S0 / ((1.0 - p) * E + p * S0);
            const double u =
                uniform_open01(seed, static_cast<std::uint64_t>(t),
                               1 + 2 * static_cast<std::uint64_t>(i));
            if (u >= q) continue;
            std::int64_t unit = 1;
            if (z) {
                const double us =
                    uniform_open01(seed, static_cast<std::uint64_t>(t),
                                   2 + 2 * static_cast<std::uint64_t>(i));
                int j = 0;
                while (j < meff && us >= cdfbuf[static_cast<std::size_t>(j)]) ++j;
                unit = j;
            }
            loss += unit;
        }
        if (static_cast<double>(loss) <= x) return 0.0;
        double w = 1.0;
        if (lam > 0.0) w = std::exp(-lam * static_cast<double>(loss) + log_weight);
        if (mu != 0.0) w *= std::exp(0.5 * mu * mu - mu * psi);
        return w;
    };

    const auto [s1, s2] = accumulate_runs(runs, contribution);
    const double r = static_cast<double>(runs);
    out.mean = s1 / r;
    out.std_error = std::sqrt(std::max(0.0, s2 / r - out.mean * out.mean) / r);
    return out;
}

} // namespace

LossDistribution recursive_pmf(const ConditionalSlice& slice,
                               const std::optional<Severity>& exposure) {
    const std::vector<double>& pd = slice.pd;
    const std::size_t n = pd.size();
    if (!exposure) {
        if (n + 1 > kMaxSupport)
            throw resource_error("recursive_pmf: support of " + std::to_string(n + 1) +
                                 " entries exceeds the memory budget");
        std::vector<double> p(n + 1, 0.0);
        p[0] = 1.0;
        std::size_t used = 0;
        for (double q : pd) {
            for (std::size_t k = used + 1; k-- > 0;) {
                p[k + 1] += p[k] * q;
                p[k] *= 1.0 - q;
            }
            ++used;
        }
        return {std::move(p)};
    }
    exposure->validate();
    const std::size_t m = static_cast<std::size_t>(exposure->max_value());
    const std::size_t support = n * m + 1;
    if (support > kMaxSupport)
        throw resource_error("recursive_pmf: support of " + std::to_string(support) +
                             " entries exceeds the memory budget");
    const std::vector<double>& q = exposure->pmf;
    std::vector<double> cur(support, 0.0), next(support, 0.0);
    cur[0] = 1.0;
    std::size_t top = 0;
    for (double p : pd) {
        const std::size_t new_top = std::min(top + m, support - 1);
        std::fill(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(new_top) + 1,
                  0.0);
        for (std::size_t k = 0; k <= top; ++k) {
            const double w = cur[k];
            if (w == 0.0) continue;
            next[k] += (1.0 - p) * w;
            for (std::size_t j = 0; j <= m; ++j) next[k + j] += p * q[j] * w;
        }
        cur.swap(next);
        top = new_top;
    }
    return {std::move(cur)};
}

CgfValue conditional_cgf(const ConditionalSlice& slice,
                         const std::optional<Severity>& exposure, double lam) {
    if (!(lam >= 0.0) || !std::isfinite(lam))
        throw input_error("conditional_cgf: lam must be finite and non-negative");
    // Severity mgf sums scaled by e^{-lam m} (top of the support) so that no
    // intermediate overflows however hard the tilt saturates.
    double m = 1.0, S0 = 1.0, S1 = 1.0, S2 = 1.0;
    if (exposure) {
        exposure->validate();
        const int meff = top_support(*exposure);
        m = static_cast<double>(meff);
        S0 = S1 = S2 = 0.0;
        for (int j = 0; j <= meff; ++j) {
            const double w = exposure->pmf[static_cast<std::size_t>(j)] *
                             std::exp(lam * (static_cast<double>(j) - m));
            S0 += w;
            S1 += static_cast<double>(j) * w;
            S2 += static_cast<double>(j) * static_cast<double>(j) * w;
        }
    }
    const double E = std::exp(-lam * m);
    CompensatedSum value, d1, d2;
    for (double p : slice.pd) {
        if (p <= 0.0) continue;
        const double den = (1.0 - p) * E + p * S0;
        const double f1 = p * S1 / den;
        value.add(lam * m + std::log(den));
        d1.add(f1);
        d2.add(p * S2 / den - f1 * f1);
    }
    return {value.value(), d1.value(), d2.value()};
}

std::optional<double> tilt_parameter(const ConditionalSlice& slice,
                                     const std::optional<Severity>& exposure,
                                     double x_total) {
    if (slice.pd.empty()) throw input_error("tilt_parameter: empty slice");
    const double m = exposure ? static_cast<double>(top_support(*exposure)) : 1.0;
    double sup = 0.0;
    for (double p : slice.pd)
        if (p > 0.0) sup += m;
    if (x_total >= sup)
        throw input_error("tilt_parameter: target mean at or beyond the achievable "
                          "supremum");
    if (x_total <= conditional_cgf(slice, exposure, 0.0).d1) return std::nullopt;

    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (conditional_cgf(slice, exposure, hi).d1 < x_total) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 60) throw numeric_error("tilt_parameter: bracketing failed");
    }
    double lam = 0.5 * (lo + hi);
    const double tol = 1e-12 * std::max(1.0, std::abs(x_total));
    for (int it = 0; it < 200; ++it) {
        const CgfValue c = conditional_cgf(slice, exposure, lam);
        const double resid = c.d1 - x_total;
        if (std::abs(resid) <= tol) return lam;
        if (resid < 0.0)
            lo = lam;
        else
            hi = lam;
        const double newton = c.d2 > 0.0 ? lam - resid / c.d2 : lam;
        lam = (newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
    }
    return lam;  // bracket ground down to fp width; residual is noise-limited
}

std::optional<double> ld_tail(const ConditionalSlice& slice, double x_per_obligor,
                              const std::optional<Severity>& exposure) {
    const std::size_t n = slice.pd.size();
    if (n == 0) throw input_error("ld_tail: empty slice");
    if (!(x_per_obligor > 0.0))
        throw input_error("ld_tail: x_per_obligor must be positive");
    const double nn = static_cast<double>(n);
    const auto lam = tilt_parameter(slice, exposure, x_per_obligor * nn);
    if (!lam) return std::nullopt;
    const CgfValue c = conditional_cgf(slice, exposure, *lam);
    const double rate = *lam * x_per_obligor - c.value / nn;
    const double curvature = c.d2 / nn;
    return std::exp(-nn * rate) /
           std::sqrt(2.0 * std::numbers::pi * nn * *lam * *lam * curvature);
}

double stein_gaussian_call(const ConditionalSlice& slice, double K) {
    CompensatedSum mean, var, third;
    for (double p : slice.pd) {
        mean.add(p);
        var.add(p * (1.0 - p));
        third.add(p * (1.0 - p) * (1.0 - 2.0 * p));
    }
    const double sigma2 = var.value();
    if (sigma2 <= 0.0) return std::max(mean.value() - K, 0.0);
    const double sigma = std::sqrt(sigma2);
    const double ks = K - mean.value();
    const double zarg = ks / sigma;
    const double base = sigma * std_normal_pdf(zarg) - ks * (1.0 - std_normal_cdf(zarg));
    const double corr = third.value() * ks * std_normal_pdf(zarg) / (6.0 * sigma2 * sigma);
    return base + corr;
}

double stein_poisson_call(const ConditionalSlice& slice, double K) {
    if (!(K >= 1.0) || std::floor(K) != K)
        throw input_error("stein_poisson_call: strike must be a positive integer");
    CompensatedSum lam_sum, p2_sum;
    for (double p : slice.pd) {
        lam_sum.add(p);
        p2_sum.add(p * p);
    }
    const double lam = lam_sum.value();
    const std::int64_t k = static_cast<std::int64_t>(K);
    const double base = lam * poisson_tail(lam, k - 2) - K * poisson_tail(lam, k - 1);
    return base - 0.5 * p2_sum.value() * poisson_pmf(lam, k - 1);
}

double tilted_pd(double p, double lam, double mgf_value) {
    (void)lam;  // enters only through the mgf value
    const double pm = p * mgf_value;
    if (!std::isfinite(pm) || pm > 1e300) return 1.0;
    return pm / ((1.0 - p) + pm);
}

EstimateWithCI mc_tail(const Portfolio& port, double x, std::int64_t runs,
                       std::uint64_t seed) {
    return simulate_tail(port, x, runs, seed, /*tilt=*/false, /*mu=*/0.0);
}

EstimateWithCI is_tail_onestep(const Portfolio& port, double x, std::int64_t runs,
                               std::uint64_t seed) {
    return simulate_tail(port, x, runs, seed, /*tilt=*/true, /*mu=*/0.0);
}

EstimateWithCI is_tail_twostep(const Portfolio& port, double x, std::int64_t runs,
                               std::uint64_t seed) {
    const double mu = is_outer_shift(port, x);
    return simulate_tail(port, x, runs, seed, /*tilt=*/true, mu);
}

double is_outer_shift(const Portfolio& port, double x) {
    port.validate();
    const std::optional<Severity>& z = port.exposure;
    const int meff = z ? top_support(*z) : 1;
    if (x >= static_cast<double>(port.size()) * static_cast<double>(meff)) return 0.0;

    auto objective = [&](double zv) -> double {
        const ConditionalSlice slice = conditional_pd(port, zv);
        const auto lam = tilt_parameter(slice, z, x);
        if (!lam) return -0.5 * zv * zv;  // no tilt: cgf(0) = 0
        const CgfValue c = conditional_cgf(slice, z, *lam);
        return c.value - *lam * x - 0.5 * zv * zv;
    };

    double best_z = -8.0, best_v = objective(-8.0);
    for (int i = 1; i <= 320; ++i) {
        const double zv = -8.0 + 0.05 * static_cast<double>(i);
        const double v = objective(zv);
        if (v > best_v) {
            best_v = v;
            best_z = zv;
        }
    }
    double a = best_z - 0.05, b = best_z + 0.05;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    double f1 = objective(c1), f2 = objective(c2);
    while (b - a > 1e-8) {
        if (f1 >= f2) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - gr * (b - a);
            f1 = objective(c1);
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + gr * (b - a);
            f2 = objective(c2);
        }
    }
    double mu = 0.5 * (a + b);
    if (std::abs(mu) <= 1e-7) mu = 0.0;
    return mu;
}

} // namespace lossdist
