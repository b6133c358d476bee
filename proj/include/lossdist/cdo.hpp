#pragma once

#include <cstdint>
#include <vector>

#include "lossdist/errors.hpp"
#include "lossdist/portfolio.hpp"
#include "lossdist/specfun.hpp"

namespace lossdist {

// Loss layer of a synthetic CDO, expressed as fractions of the portfolio
// notional. Strikes convert to loss units against the maximum representable
// loss, so a {0, 1} tranche spans the whole loss distribution.
struct TrancheSpec {
    double attach = 0.0;
    double detach = 1.0;

    void validate() const;  // throws input_error naming the offending field

    double attach_strike(const Portfolio& port) const;
    double detach_strike(const Portfolio& port) const;
};

// Premium payment grid t_0 = 0 < t_1 < ... < t_N = T with a deterministic
// continuously compounded discount rate.
struct PaymentSchedule {
    std::vector<double> times;
    double rate = 0.0;

    void validate() const;
    double maturity() const { return times.back(); }
};

// Regular schedule with `payments_per_year` dates per year up to `maturity`.
PaymentSchedule make_schedule(double maturity, int payments_per_year, double rate);

// Term structure of the unconditional default probability under a constant
// hazard calibrated so that p(horizon) = pbar: p(t) = 1 - (1 - pbar)^(t/horizon).
double term_pd(double pbar, double t, double horizon);

// Estimator used for the conditional stop-loss transforms behind the tranche
// expectations.
struct CdoEngine {
    enum class Kind {
        recursive,      // exact conditional pmf
        modpoisson,     // mod-Poisson scheme of `order` (unit exposures)
        stein_gauss,    // Gaussian first-order correction (unit exposures)
        stein_poisson,  // Poisson first-order correction (unit exposures,
                        // integer strikes)
        modcompound,    // mod-compound-Poisson scheme of `order`
    };
    Kind kind = Kind::recursive;
    int order = 4;
};

// Premium leg is identically zero: the tranche is wiped out from the first
// payment date on, so no spread can equate the legs.
class degenerate_tranche_error : public numeric_error {
public:
    explicit degenerate_tranche_error(const std::string& msg) : numeric_error(msg) {}
};

// E[(L - strike)^+] for the static loss distribution, mixed over the factor
// rule. The strike is on the integer loss lattice (units of one obligor's
// notional times one severity unit).
double expected_call(const Portfolio& port, double strike, const CdoEngine& engine,
                     const Quadrature& quad);

// E[(L_t - K_a)^+] - E[(L_t - K_d)^+], the expected tranche loss at time t,
// mixed over the systemic factor with term-adjusted conditional pds.
double expected_tranche_loss(const Portfolio& port, const TrancheSpec& tranche,
                             double t, const CdoEngine& engine,
                             const Quadrature& quad, double horizon);

// sum_n e^{-r t_n} (EL(t_n) - EL(t_{n-1})), the discounted expected tranche
// write-down payments.
double default_leg(const Portfolio& port, const TrancheSpec& tranche,
                   const PaymentSchedule& sched, const CdoEngine& engine,
                   const Quadrature& quad);

// spread * sum_n e^{-r t_n} (t_n - t_{n-1}) E[N_{t_n}] with outstanding
// notional E[N_t] = (K_d - K_a) - EL(t).
double premium_leg(const Portfolio& port, const TrancheSpec& tranche,
                   const PaymentSchedule& sched, const CdoEngine& engine,
                   const Quadrature& quad, double spread);

// default_leg / premium_leg(1), reported in basis points. Throws
// degenerate_tranche_error when the unit-spread premium leg vanishes.
double fair_spread_bp(const Portfolio& port, const TrancheSpec& tranche,
                      const PaymentSchedule& sched, const CdoEngine& engine,
                      const Quadrature& quad);

} // namespace lossdist
