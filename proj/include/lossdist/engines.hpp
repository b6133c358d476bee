#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lossdist/estimators.hpp"
#include "lossdist/portfolio.hpp"

namespace lossdist {

// Estimation method selector shared by the batch front end, the acceptance
// suite, and the python bindings.  Every method estimates functionals of the
// same mixed loss distribution; they differ in how the conditional law given
// the common factor is approximated.
enum class Method {
    recursive,      // exact conditional convolution recursion
    modpoisson,     // mod-Poisson approximation scheme of order r
    modcompound,    // mod-compound-Poisson approximation scheme of order r
    ld,             // large-deviations (Bahadur-Rao) tail approximation
    stein_gauss,    // first-order Chen-Stein correction to the Gaussian limit
    stein_poisson,  // first-order Chen-Stein correction to the Poisson limit
    mc,             // plain Monte Carlo over factor and defaults
    is1,            // importance sampling, obligor tilting only
    is2,            // importance sampling, obligor tilting plus factor shift
};

// Parses the hyphenated public names ("stein-gauss", "is2", ...).  Throws
// input_error naming the `method` field on unknown input.
Method method_from_name(const std::string& name);
const char* method_name(Method m);
bool is_simulation_method(Method m);

struct EngineConfig {
    Method method = Method::recursive;
    int order = 4;               // scheme order (modpoisson / modcompound)
    int nodes = 64;              // Gauss-Hermite node count for the factor rule
    std::int64_t runs = 100000;  // simulation runs (mc / is1 / is2)
    std::uint64_t seed = 1;      // simulation seed

    void validate() const;  // throws input_error naming the offending field
};

struct TailValue {
    double estimate = 0.0;
    double std_error = 0.0;  // zero for semi-analytic methods
    std::int64_t runs = 0;   // zero for semi-analytic methods
};

// P{L > x} where x is a loss level in currency units (lattice index times
// Portfolio::notional_per_obligor).  Semi-analytic methods report the raw
// mixed estimate, which for signed approximations may leave [0,1] by the
// approximation error in the far tail.
TailValue tail_probability(const Portfolio& port, const EngineConfig& cfg, double x);

struct VarEsPoint {
    double alpha = 0.0;
    double var = 0.0;  // currency units
    double es = 0.0;   // currency units
    bool monotone_warning = false;
    double seconds = 0.0;  // wall time for this row (setup charged to first row)
};

// VaR/ES at each confidence level.  The recursive method evaluates the mixed
// pmf once; every other method goes through its lattice tail function wrapped
// in RegularizedTail (clamped to [0,1] and monotone-reconciled) before the
// quantile search.  Rows are returned in the order the levels were given.
std::vector<VarEsPoint> var_es_points(const Portfolio& port, const EngineConfig& cfg,
                                      const std::vector<double>& alphas);

// Weighted mixture of the conditional loss pmfs over the factor rule.
LossDistribution mixed_pmf(const Portfolio& port, const Quadrature& quad);

}  // namespace lossdist
