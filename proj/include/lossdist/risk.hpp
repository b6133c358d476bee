#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lossdist/estimators.hpp"

namespace lossdist {

// Quantile report for a batch of confidence levels.
struct RiskReport {
    std::vector<double> alpha;
    std::vector<std::int64_t> var;
    std::vector<double> es;
    std::string method;
    double seconds = 0.0;
};

// Left-continuous step quantile: smallest k with P{L <= k} >= alpha.
std::int64_t var_from_pmf(const LossDistribution& dist, double alpha);

// Discrete expected shortfall
//   (1/(1-alpha)) ((P{L <= VaR} - alpha) VaR + sum_{k > VaR} k P{L = k}).
double es_from_pmf(const LossDistribution& dist, double alpha);

struct TailVarResult {
    std::int64_t var = 0;
    // Set when two evaluations violated survival-function monotonicity by
    // more than 1e-9; the reported quantile still comes from the search.
    bool monotone_warning = false;
};

struct TailEsResult {
    double es = 0.0;
    // Truncation bound kmax * tail(kmax), reported as uncertainty.
    double truncation = 0.0;
    bool monotone_warning = false;
};

// Quantile from a pointwise survival function P{L > k}: exponential
// bracketing from k_hint, then binary search; O(log N) evaluations.
TailVarResult var_from_tail(const std::function<double(std::int64_t)>& tail,
                            double alpha, std::int64_t k_hint);

// Expected shortfall from a pointwise survival function, summed up to kmax
// with the remainder reported, not silently dropped.
TailEsResult es_from_tail(const std::function<double(std::int64_t)>& tail,
                          double alpha, std::int64_t var_alpha, std::int64_t kmax);

// Memoizing adaptor that turns a raw pointwise tail estimate into a valid
// survival function: values clamped into [0,1] and reconciled with every
// previously evaluated lattice point so the recorded set stays non-increasing
// (signed-measure estimates can wobble below zero deep in the tail).
// Confined to one evaluation context; not safe for concurrent queries.
class RegularizedTail {
  public:
    explicit RegularizedTail(std::function<double(std::int64_t)> raw)
        : raw_(std::move(raw)) {}

    double operator()(std::int64_t k) const;

  private:
    std::function<double(std::int64_t)> raw_;
    mutable std::map<std::int64_t, double> memo_;
};

} // namespace lossdist
