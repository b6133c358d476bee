#include "lossdist/engines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>

#include "lossdist/errors.hpp"
#include "lossdist/modcompound.hpp"
#include "lossdist/modpoisson.hpp"
#include "lossdist/numeric.hpp"
#include "lossdist/risk.hpp"

namespace lossdist {

namespace {

struct MethodName {
    Method m;
    const char* name;
};

constexpr MethodName kMethodNames[] = {
    {Method::recursive, "recursive"},
    {Method::modpoisson, "modpoisson"},
    {Method::modcompound, "modcompound"},
    {Method::ld, "ld"},
    {Method::stein_gauss, "stein-gauss"},
    {Method::stein_poisson, "stein-poisson"},
    {Method::mc, "mc"},
    {Method::is1, "is1"},
    {Method::is2, "is2"},
};

void require_unit_exposure(const Portfolio& port, Method m) {
    if (port.exposure)
        throw input_error(std::string("method: ") + method_name(m) +
                          " supports unit exposures only; use modcompound for "
                          "stochastic exposures");
}

Severity effective_severity(const Portfolio& port) {
    return port.exposure ? *port.exposure : Severity{{0.0, 1.0}};
}

// P{L > t} from a conditional pmf, summed from the far tail down so the
// smallest masses accumulate first.
double pmf_tail(const LossDistribution& dist, double t) {
    double acc = 0.0;
    for (std::int64_t k = dist.max_loss(); k >= 0 && static_cast<double>(k) > t; --k)
        acc += dist.pmf[static_cast<std::size_t>(k)];
    return acc;
}

// E[(L - 0)^+] equals the conditional mean; the Chen-Stein call formulas are
// undefined at strike zero, so both corrections fall back to the exact mean.
double stein_call(Method m, const ConditionalSlice& slice, std::int64_t K) {
    if (K <= 0) {
        CompensatedSum mean;
        for (double p : slice.pd) mean.add(p);
        return mean.value();
    }
    return m == Method::stein_gauss ? stein_gaussian_call(slice, static_cast<double>(K))
                                    : stein_poisson_call(slice, static_cast<double>(K));
}

// Deterministic weighted reduction over precomputed per-node values, with the
// same error envelope as integrate_factor (numeric failures carry the node).
double mix_nodes(const std::vector<double>& weights,
                 const std::function<double(std::size_t)>& node_value) {
    CompensatedSum acc;
    for (std::size_t m = 0; m < weights.size(); ++m) {
        try {
            acc.add(weights[m] * node_value(m));
        } catch (const input_error&) {
            throw;
        } catch (const std::exception& e) {
            throw numeric_error("factor node " + std::to_string(m) + ": " + e.what());
        }
    }
    return acc.value();
}

std::vector<ConditionalSlice> factor_slices(const Portfolio& port,
                                            const Quadrature& quad) {
    std::vector<ConditionalSlice> slices;
    slices.reserve(quad.nodes.size());
    for (double psi : quad.nodes) slices.push_back(conditional_pd(port, psi));
    return slices;
}

EstimateWithCI simulated_tail(const Portfolio& port, const EngineConfig& cfg,
                              double t) {
    switch (cfg.method) {
        case Method::mc:
            return mc_tail(port, t, cfg.runs, cfg.seed);
        case Method::is1:
            return is_tail_onestep(port, t, cfg.runs, cfg.seed);
        default:
            return is_tail_twostep(port, t, cfg.runs, cfg.seed);
    }
}

// Lattice tail function P{L > k} for the method, with precomputed per-node
// state shared across evaluations.  Boundary arguments short-circuit so the
// per-slice estimators are only consulted on the interior of the support.
std::function<double(std::int64_t)> make_lattice_tail(const Portfolio& port,
                                                      const EngineConfig& cfg) {
    const std::int64_t kmax = port.max_loss();
    auto guard = [kmax](std::function<double(std::int64_t)> core) {
        return [kmax, core = std::move(core)](std::int64_t k) {
            if (k < 0) return 1.0;
            if (k >= kmax) return 0.0;
            return core(k);
        };
    };

    if (is_simulation_method(cfg.method)) {
        const Portfolio p = port;
        const EngineConfig c = cfg;
        return guard([p, c](std::int64_t k) {
            return simulated_tail(p, c, static_cast<double>(k)).mean;
        });
    }

    const Quadrature quad = gauss_hermite(cfg.nodes);
    auto weights = std::make_shared<std::vector<double>>(quad.weights);

    switch (cfg.method) {
        case Method::modpoisson: {
            require_unit_exposure(port, cfg.method);
            auto coeffs = std::make_shared<std::vector<SchemeCoefficients>>();
            for (const auto& s : factor_slices(port, quad))
                coeffs->push_back(coefficients(s.pd, cfg.order));
            return guard([weights, coeffs](std::int64_t k) {
                return mix_nodes(*weights, [&](std::size_t m) {
                    return tail_estimate((*coeffs)[m], static_cast<double>(k));
                });
            });
        }
        case Method::modcompound: {
            auto coeffs = std::make_shared<std::vector<CompoundCoefficients>>();
            const Severity sev = effective_severity(port);
            for (const auto& s : factor_slices(port, quad))
                coeffs->push_back(cp_coefficients(s.pd, sev, cfg.order));
            return guard([weights, coeffs](std::int64_t k) {
                return mix_nodes(*weights, [&](std::size_t m) {
                    return cp_expectation((*coeffs)[m], [k](std::int64_t j) {
                        return j > k ? 1.0 : 0.0;
                    });
                });
            });
        }
        case Method::ld: {
            auto slices =
                std::make_shared<std::vector<ConditionalSlice>>(factor_slices(port, quad));
            const auto exposure = port.exposure;
            const double n = static_cast<double>(port.size());
            return guard([weights, slices, exposure, n](std::int64_t k) {
                if (k <= 0) return 1.0;  // below every conditional mean
                const double xper = static_cast<double>(k) / n;
                return mix_nodes(*weights, [&](std::size_t m) {
                    return ld_tail((*slices)[m], xper, exposure).value_or(1.0);
                });
            });
        }
        case Method::stein_gauss:
        case Method::stein_poisson: {
            require_unit_exposure(port, cfg.method);
            auto slices =
                std::make_shared<std::vector<ConditionalSlice>>(factor_slices(port, quad));
            const Method m = cfg.method;
            return guard([weights, slices, m](std::int64_t k) {
                return mix_nodes(*weights, [&](std::size_t i) {
                    return stein_call(m, (*slices)[i], k) -
                           stein_call(m, (*slices)[i], k + 1);
                });
            });
        }
        default:
            break;
    }
    throw input_error("method: no lattice tail for this method");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Method method_from_name(const std::string& name) {
    for (const auto& entry : kMethodNames)
        if (name == entry.name) return entry.m;
    std::string known;
    for (const auto& entry : kMethodNames) {
        if (!known.empty()) known += ", ";
        known += entry.name;
    }
    throw input_error("method: unknown method '" + name + "' (known: " + known + ")");
}

const char* method_name(Method m) {
    for (const auto& entry : kMethodNames)
        if (entry.m == m) return entry.name;
    return "unknown";
}

bool is_simulation_method(Method m) {
    return m == Method::mc || m == Method::is1 || m == Method::is2;
}

void EngineConfig::validate() const {
    if (order < 0) throw input_error("order: must be non-negative");
    if (nodes < 1) throw input_error("nodes: must be at least 1");
    if (is_simulation_method(method) && runs < 1)
        throw input_error("runs: must be at least 1");
}

LossDistribution mixed_pmf(const Portfolio& port, const Quadrature& quad) {
    port.validate();
    LossDistribution out;
    out.pmf.assign(static_cast<std::size_t>(port.max_loss()) + 1, 0.0);
    for (std::size_t m = 0; m < quad.nodes.size(); ++m) {
        try {
            const LossDistribution d =
                recursive_pmf(conditional_pd(port, quad.nodes[m]), port.exposure);
            for (std::size_t k = 0; k < d.pmf.size(); ++k)
                out.pmf[k] += quad.weights[m] * d.pmf[k];
        } catch (const input_error& e) {
            throw input_error("factor node " + std::to_string(m) + ": " + e.what());
        } catch (const std::exception& e) {
            throw numeric_error("factor node " + std::to_string(m) + ": " + e.what());
        }
    }
    return out;
}

TailValue tail_probability(const Portfolio& port, const EngineConfig& cfg, double x) {
    port.validate();
    cfg.validate();
    if (!std::isfinite(x)) throw input_error("x: must be finite");

    const double scale = port.notional_per_obligor;
    const double t = x / scale;
    const auto kmax = static_cast<double>(port.max_loss());
    if (t < 0.0) return {1.0, 0.0, 0};
    if (t >= kmax) return {0.0, 0.0, 0};

    try {
        switch (cfg.method) {
            case Method::recursive: {
                const double est = integrate_factor(
                    port, gauss_hermite(cfg.nodes), [&](const ConditionalSlice& s) {
                        return pmf_tail(recursive_pmf(s, port.exposure), t);
                    });
                return {est, 0.0, 0};
            }
            case Method::modpoisson: {
                require_unit_exposure(port, cfg.method);
                const double est = integrate_factor(
                    port, gauss_hermite(cfg.nodes), [&](const ConditionalSlice& s) {
                        return tail_estimate(coefficients(s.pd, cfg.order), t);
                    });
                return {est, 0.0, 0};
            }
            case Method::modcompound: {
                const Severity sev = effective_severity(port);
                const double est = integrate_factor(
                    port, gauss_hermite(cfg.nodes), [&](const ConditionalSlice& s) {
                        const auto c = cp_coefficients(s.pd, sev, cfg.order);
                        return cp_expectation(
                            c, [t](std::int64_t k) { return k > t ? 1.0 : 0.0; });
                    });
                return {est, 0.0, 0};
            }
            case Method::ld: {
                const double xper = t / static_cast<double>(port.size());
                if (xper <= 0.0) return {1.0, 0.0, 0};
                const double est = integrate_factor(
                    port, gauss_hermite(cfg.nodes), [&](const ConditionalSlice& s) {
                        return ld_tail(s, xper, port.exposure).value_or(1.0);
                    });
                return {est, 0.0, 0};
            }
            case Method::stein_gauss:
            case Method::stein_poisson: {
                require_unit_exposure(port, cfg.method);
                const auto j = static_cast<std::int64_t>(std::floor(t));
                const Method m = cfg.method;
                const double est = integrate_factor(
                    port, gauss_hermite(cfg.nodes), [&](const ConditionalSlice& s) {
                        return stein_call(m, s, j) - stein_call(m, s, j + 1);
                    });
                return {est, 0.0, 0};
            }
            case Method::mc:
            case Method::is1:
            case Method::is2: {
                const EstimateWithCI e = simulated_tail(port, cfg, t);
                return {e.mean, e.std_error, e.runs};
            }
        }
    } catch (const input_error&) {
        throw;
    } catch (const numeric_error& e) {
        throw numeric_error(std::string(method_name(cfg.method)) + ": " + e.what());
    } catch (const std::exception& e) {
        throw numeric_error(std::string(method_name(cfg.method)) + ": " + e.what());
    }
    throw numeric_error("method: unreachable dispatch");
}

std::vector<VarEsPoint> var_es_points(const Portfolio& port, const EngineConfig& cfg,
                                      const std::vector<double>& alphas) {
    port.validate();
    cfg.validate();
    if (alphas.empty())
        throw input_error("alpha: at least one confidence level is required");
    for (double a : alphas)
        if (!(a > 0.0 && a < 1.0)) throw input_error("alpha: must lie in (0,1)");

    const double scale = port.notional_per_obligor;
    const std::int64_t kmax = port.max_loss();

    // Process levels in ascending order so quantile hints chain; report rows
    // in the caller's order.
    std::vector<std::size_t> idx(alphas.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t i, std::size_t j) { return alphas[i] < alphas[j]; });

    std::vector<VarEsPoint> out(alphas.size());
    try {
        if (cfg.method == Method::recursive) {
            auto t0 = std::chrono::steady_clock::now();
            const LossDistribution mixed = mixed_pmf(port, gauss_hermite(cfg.nodes));
            for (std::size_t i : idx) {
                const double a = alphas[i];
                const std::int64_t v = var_from_pmf(mixed, a);
                const double es = es_from_pmf(mixed, a);
                out[i] = {a, static_cast<double>(v) * scale, es * scale, false,
                          seconds_since(t0)};
                t0 = std::chrono::steady_clock::now();
            }
        } else {
            auto t0 = std::chrono::steady_clock::now();
            const RegularizedTail tail(make_lattice_tail(port, cfg));
            std::int64_t hint = 0;
            for (std::size_t i : idx) {
                const double a = alphas[i];
                const TailVarResult v =
                    var_from_tail([&tail](std::int64_t k) { return tail(k); }, a, hint);
                hint = v.var;
                const TailEsResult e = es_from_tail(
                    [&tail](std::int64_t k) { return tail(k); }, a, v.var, kmax);
                out[i] = {a, static_cast<double>(v.var) * scale, e.es * scale,
                          v.monotone_warning || e.monotone_warning, seconds_since(t0)};
                t0 = std::chrono::steady_clock::now();
            }
        }
    } catch (const input_error&) {
        throw;
    } catch (const numeric_error& e) {
        throw numeric_error(std::string(method_name(cfg.method)) + ": " + e.what());
    } catch (const std::exception& e) {
        throw numeric_error(std::string(method_name(cfg.method)) + ": " + e.what());
    }
    return out;
}

}  // namespace lossdist
