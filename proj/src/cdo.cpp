#include "lossdist/cdo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "lossdist/estimators.hpp"
#include "lossdist/modcompound.hpp"
#include "lossdist/modpoisson.hpp"
#include "lossdist/numeric.hpp"

namespace lossdist {

namespace {

bool is_integer(double x) { return x == std::floor(x); }

// Mean exposure per obligor in loss units.
double exposure_mean(const Portfolio& port) {
    return port.exposure ? port.exposure->mean() : 1.0;
}

double conditional_mean(const ConditionalSlice& slice, double mean_z) {
    CompensatedSum acc;
    for (double p : slice.pd) acc.add(p);
    return acc.value() * mean_z;
}

// E[(L - K)^+ | slice] for one strike under one engine. Strikes at or below
// zero reduce to E[L] - K and strikes at or beyond the maximum loss to 0,
// exactly, for every engine.
double conditional_call(const ConditionalSlice& slice, const Portfolio& port,
                        double strike, const CdoEngine& engine) {
    if (strike <= 0.0) return conditional_mean(slice, exposure_mean(port)) - strike;
    if (strike >= static_cast<double>(port.max_loss())) return 0.0;

    switch (engine.kind) {
    case CdoEngine::Kind::recursive: {
        const auto d = recursive_pmf(slice, port.exposure);
        CompensatedSum acc;
        for (std::size_t k = d.pmf.size(); k-- > 0;) {
            const double payoff = static_cast<double>(k) - strike;
            if (payoff <= 0.0) break;
            acc.add(payoff * d.pmf[k]);
        }
        return acc.value();
    }
    case CdoEngine::Kind::modpoisson:
        return call_estimate(coefficients(slice.pd, engine.order), strike);
    case CdoEngine::Kind::stein_gauss:
        return stein_gaussian_call(slice, strike);
    case CdoEngine::Kind::stein_poisson:
        return stein_poisson_call(slice, strike);
    case CdoEngine::Kind::modcompound: {
        const Severity z = port.exposure ? *port.exposure : Severity{{0.0, 1.0}};
        const auto c = cp_coefficients(slice.pd, z, engine.order);
        return cp_expectation(c, [strike](std::int64_t k) {
            return std::max(static_cast<double>(k) - strike, 0.0);
        });
    }
    }
    throw input_error("engine: unknown kind");
}

// Call spread in one pass; the recursive engine shares one conditional pmf
// between both strikes.
double conditional_call_spread(const ConditionalSlice& slice, const Portfolio& port,
                               double ka, double kd, const CdoEngine& engine) {
    if (engine.kind == CdoEngine::Kind::recursive && ka > 0.0 &&
        kd < static_cast<double>(port.max_loss())) {
        const auto d = recursive_pmf(slice, port.exposure);
        CompensatedSum acc;
        for (std::size_t k = d.pmf.size(); k-- > 0;) {
            const double payoff = std::min(static_cast<double>(k), kd) -
                                  std::min(static_cast<double>(k), ka);
            if (payoff <= 0.0) break;
            acc.add(payoff * d.pmf[k]);
        }
        return acc.value();
    }
    return conditional_call(slice, port, ka, engine) -
           conditional_call(slice, port, kd, engine);
}

void validate_engine(const Portfolio& port, const CdoEngine& engine, double ka,
                     double kd) {
    const bool unit_only = engine.kind == CdoEngine::Kind::modpoisson ||
                           engine.kind == CdoEngine::Kind::stein_gauss ||
                           engine.kind == CdoEngine::Kind::stein_poisson;
    if (unit_only && port.exposure)
        throw input_error("engine: requires unit exposures");
    if (engine.kind == CdoEngine::Kind::stein_poisson) {
        const auto max_loss = static_cast<double>(port.max_loss());
        for (double k : {ka, kd})
            if (k > 0.0 && k < max_loss && !is_integer(k))
                throw input_error("strike: stein-poisson requires integer strikes");
    }
}

} // namespace

void TrancheSpec::validate() const {
    if (!(attach >= 0.0)) throw input_error("attach: must be nonnegative");
    if (!(detach <= 1.0)) throw input_error("detach: must not exceed 1");
    if (!(attach < detach)) throw input_error("attach: must lie strictly below detach");
}

namespace {

// Fraction-times-notional products that are integers in exact arithmetic can
// land an ulp off (0.03 * 100 = 2.999...96); snap those so integer-strike
// engines and tranche partitions behave as written.
double snap_strike(double k) {
    const double r = std::round(k);
    return std::fabs(k - r) <= 1e-9 * std::max(1.0, std::fabs(k)) ? r : k;
}

} // namespace

double TrancheSpec::attach_strike(const Portfolio& port) const {
    return snap_strike(attach * static_cast<double>(port.max_loss()));
}

double TrancheSpec::detach_strike(const Portfolio& port) const {
    return snap_strike(detach * static_cast<double>(port.max_loss()));
}

void PaymentSchedule::validate() const {
    if (times.size() < 2)
        throw input_error("times: need t_0 = 0 and at least one payment date");
    if (times.front() != 0.0) throw input_error("times: must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw input_error("times: must be strictly increasing");
    if (!std::isfinite(rate)) throw input_error("rate: must be finite");
}

PaymentSchedule make_schedule(double maturity, int payments_per_year, double rate) {
    if (!(maturity > 0.0)) throw input_error("maturity: must be positive");
    if (payments_per_year < 1)
        throw input_error("payments_per_year: must be at least 1");
    PaymentSchedule sched;
    sched.rate = rate;
    const double step = 1.0 / payments_per_year;
    for (double t = 0.0; t < maturity - 0.5 * step; t += step)
        sched.times.push_back(t);
    sched.times.push_back(maturity);
    sched.validate();
    return sched;
}

double term_pd(double pbar, double t, double horizon) {
    if (!(horizon > 0.0)) throw input_error("horizon: must be positive");
    if (!(t >= 0.0)) throw input_error("t: must be nonnegative");
    if (pbar <= 0.0) return 0.0;
    return -std::expm1((t / horizon) * std::log1p(-pbar));
}

double expected_call(const Portfolio& port, double strike, const CdoEngine& engine,
                     const Quadrature& quad) {
    port.validate();
    if (!std::isfinite(strike)) throw input_error("strike: must be finite");
    validate_engine(port, engine, strike, strike);
    return integrate_factor(port, quad, [&](const ConditionalSlice& slice) {
        return conditional_call(slice, port, strike, engine);
    });
}

double expected_tranche_loss(const Portfolio& port, const TrancheSpec& tranche,
                             double t, const CdoEngine& engine,
                             const Quadrature& quad, double horizon) {
    port.validate();
    tranche.validate();
    if (!(horizon > 0.0)) throw input_error("horizon: must be positive");
    if (!(t >= 0.0)) throw input_error("t: must be nonnegative");
    if (t == 0.0) return 0.0;

    const double ka = tranche.attach_strike(port);
    const double kd = tranche.detach_strike(port);
    validate_engine(port, engine, ka, kd);

    Portfolio at_t = port;
    for (double& p : at_t.avg_pd) p = term_pd(p, t, horizon);
    return integrate_factor(at_t, quad, [&](const ConditionalSlice& slice) {
        return conditional_call_spread(slice, at_t, ka, kd, engine);
    });
}

double default_leg(const Portfolio& port, const TrancheSpec& tranche,
                   const PaymentSchedule& sched, const CdoEngine& engine,
                   const Quadrature& quad) {
    sched.validate();
    const double horizon = sched.maturity();
    CompensatedSum acc;
    double prev = 0.0;  // no losses at inception
    for (std::size_t i = 1; i < sched.times.size(); ++i) {
        const double el =
            expected_tranche_loss(port, tranche, sched.times[i], engine, quad, horizon);
        acc.add(std::exp(-sched.rate * sched.times[i]) * (el - prev));
        prev = el;
    }
    return acc.value();
}

double premium_leg(const Portfolio& port, const TrancheSpec& tranche,
                   const PaymentSchedule& sched, const CdoEngine& engine,
                   const Quadrature& quad, double spread) {
    sched.validate();
    if (!(spread >= 0.0)) throw input_error("spread: must be nonnegative");
    const double horizon = sched.maturity();
    const double width =
        tranche.detach_strike(port) - tranche.attach_strike(port);
    CompensatedSum acc;
    for (std::size_t i = 1; i < sched.times.size(); ++i) {
        const double el =
            expected_tranche_loss(port, tranche, sched.times[i], engine, quad, horizon);
        const double accrual = sched.times[i] - sched.times[i - 1];
        acc.add(std::exp(-sched.rate * sched.times[i]) * accrual * (width - el));
    }
    return spread * acc.value();
}

double fair_spread_bp(const Portfolio& port, const TrancheSpec& tranche,
                      const PaymentSchedule& sched, const CdoEngine& engine,
                      const Quadrature& quad) {
    const double premium = premium_leg(port, tranche, sched, engine, quad, 1.0);
    if (!(premium > 0.0))
        throw degenerate_tranche_error(
            "premium leg: vanishes at unit spread (tranche wiped out)");
    const double deflt = default_leg(port, tranche, sched, engine, quad);
    return 1e4 * deflt / premium;
}

} // namespace lossdist
