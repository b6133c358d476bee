#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lossdist/severity.hpp"
#include "lossdist/specfun.hpp"

namespace lossdist {

// One-factor credit portfolio. Losses are counted in exposure units; the
// notional only enters monetary reporting.
struct Portfolio {
    std::vector<double> avg_pd;        // unconditional pds, one per obligor
    double rho = 0.0;                  // squared factor correlation, in [0,1)
    std::optional<Severity> exposure;  // absent = every exposure equals 1
    double notional_per_obligor = 1.0;

    int size() const { return static_cast<int>(avg_pd.size()); }

    // Largest representable loss in exposure units.
    std::int64_t max_loss() const;

    void validate() const;  // throws input_error naming the offending field
};

// Default probabilities conditional on one value of the systemic factor.
struct ConditionalSlice {
    std::vector<double> pd;
    double psi = 0.0;
};

// Gaussian-copula conditioning. Low factor values push pds up. Results are
// clamped to [1e-300, 1 - 1e-16] so downstream logs and quantiles stay finite.
ConditionalSlice conditional_pd(const Portfolio& port, double psi);

// Expectation of f over the systemic factor using the given quadrature rule,
// compensated summation over nodes. Failures inside f are rethrown with the
// offending node index attached.
double integrate_factor(const Portfolio& port, const Quadrature& quad,
                        const std::function<double(const ConditionalSlice&)>& f);

// Loaders for the portfolio JSON schema. Schema violations throw input_error
// with a message naming the offending field.
Portfolio portfolio_from_json(const std::string& text);
Portfolio load_portfolio(const std::string& path);

} // namespace lossdist
