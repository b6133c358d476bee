#include "lossdist/risk.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>

#include "lossdist/errors.hpp"
#include "lossdist/numeric.hpp"

namespace lossdist {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw input_error("alpha: must lie in (0,1)");
}

// Evaluation cache for one quantile search. Also watches for survival-
// function violations between any two recorded lattice points.
struct SearchEvals {
    const std::function<double(std::int64_t)>& tail;
    std::map<std::int64_t, double> seen;
    bool warning = false;

    double operator()(std::int64_t k) {
        auto it = seen.find(k);
        if (it != seen.end()) return it->second;
        const double v = tail(k);
        if (!std::isfinite(v))
            throw numeric_error("tail estimate not finite at k=" + std::to_string(k));
        auto pos = seen.emplace(k, v).first;
        if (pos != seen.begin() && v > std::prev(pos)->second + 1e-9) warning = true;
        auto nx = std::next(pos);
        if (nx != seen.end() && nx->second > v + 1e-9) warning = true;
        return v;
    }
};

} // namespace

std::int64_t var_from_pmf(const LossDistribution& dist, double alpha) {
    check_alpha(alpha);
    if (dist.pmf.empty()) throw input_error("pmf: must not be empty");
    CompensatedSum cum;
    for (std::int64_t k = 0; k <= dist.max_loss(); ++k) {
        cum.add(dist.pmf[k]);
        if (cum.value() >= alpha) return k;
    }
    return dist.max_loss();
}

double es_from_pmf(const LossDistribution& dist, double alpha) {
    const std::int64_t var = var_from_pmf(dist, alpha);
    CompensatedSum below;
    for (std::int64_t k = 0; k <= var; ++k) below.add(dist.pmf[k]);
    CompensatedSum beyond;
    for (std::int64_t k = var + 1; k <= dist.max_loss(); ++k)
        beyond.add(static_cast<double>(k) * dist.pmf[k]);
    return ((below.value() - alpha) * static_cast<double>(var) + beyond.value()) /
           (1.0 - alpha);
}

TailVarResult var_from_tail(const std::function<double(std::int64_t)>& tail,
                            double alpha, std::int64_t k_hint) {
    check_alpha(alpha);
    SearchEvals eval{tail};
    const auto covered = [&](std::int64_t k) { return 1.0 - eval(k) >= alpha; };

    // Bracket (lo, hi]: quantile not reached at lo, reached at hi.
    std::int64_t lo = -1, hi = -1;
    const std::int64_t start = std::max<std::int64_t>(k_hint, 0);
    if (covered(start)) {
        hi = start;
        for (std::int64_t off = 1;; off *= 2) {
            const std::int64_t k = start - off;
            if (k < 0) break;
            if (covered(k)) {
                hi = k;
            } else {
                lo = k;
                break;
            }
        }
    } else {
        lo = start;
        for (std::int64_t off = 1;; off *= 2) {
            if (off > (std::int64_t{1} << 48))
                throw numeric_error("var_from_tail: no quantile within search range");
            const std::int64_t k = start + off;
            if (covered(k)) {
                hi = k;
                break;
            }
            lo = k;
        }
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (covered(mid))
            hi = mid;
        else
            lo = mid;
    }
    return {hi, eval.warning};
}

TailEsResult es_from_tail(const std::function<double(std::int64_t)>& tail,
                          double alpha, std::int64_t var_alpha, std::int64_t kmax) {
    check_alpha(alpha);
    if (kmax < var_alpha)
        throw input_error("kmax: must be at least the quantile");
    SearchEvals eval{tail};

    // sum_{k=var+1}^{kmax} k (T(k-1) - T(k)) telescoped into
    // (var+1) T(var) + sum_{j=var+1}^{kmax-1} T(j) - kmax T(kmax).
    const double t_var = eval(var_alpha);
    CompensatedSum beyond;
    double t_kmax = t_var;
    if (kmax > var_alpha) {
        beyond.add((static_cast<double>(var_alpha) + 1.0) * t_var);
        for (std::int64_t j = var_alpha + 1; j < kmax; ++j) beyond.add(eval(j));
        t_kmax = eval(kmax);
        beyond.add(-static_cast<double>(kmax) * t_kmax);
    }

    TailEsResult out;
    out.es = (((1.0 - t_var) - alpha) * static_cast<double>(var_alpha) +
              beyond.value()) /
             (1.0 - alpha);
    out.truncation = std::max(0.0, static_cast<double>(kmax) * t_kmax);
    out.monotone_warning = eval.warning;
    return out;
}

double RegularizedTail::operator()(std::int64_t k) const {
    auto it = memo_.find(k);
    if (it != memo_.end()) return it->second;
    double v = raw_(k);
    if (!std::isfinite(v))
        throw numeric_error("tail estimate not finite at k=" + std::to_string(k));
    v = std::clamp(v, 0.0, 1.0);
    auto pos = memo_.emplace(k, v).first;
    if (pos != memo_.begin()) v = std::min(v, std::prev(pos)->second);
    auto nx = std::next(pos);
    if (nx != memo_.end()) v = std::max(v, nx->second);
    pos->second = v;
    return v;
}

} // namespace lossdist
