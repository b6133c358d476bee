#include "lossdist/portfolio.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lossdist/errors.hpp"
#include "lossdist/numeric.hpp"
#include "lossdist/rng.hpp"

namespace lossdist {

namespace {

constexpr double kPdMin = 1e-300;
constexpr double kPdMax = 1.0 - 1e-16;

// Counter space reserved for portfolio generation, disjoint from simulation
// runs (which use counter_hi < 2^63).
constexpr std::uint64_t kGenStream = ~std::uint64_t{0};

} // namespace

double Severity::mean() const {
    CompensatedSum s;
    for (size_t j = 0; j < pmf.size(); ++j) s.add(static_cast<double>(j) * pmf[j]);
    return s.value();
}

double Severity::second_moment() const {
    CompensatedSum s;
    for (size_t j = 0; j < pmf.size(); ++j)
        s.add(static_cast<double>(j) * static_cast<double>(j) * pmf[j]);
    return s.value();
}

void Severity::validate() const {
    if (pmf.empty()) throw input_error("exposure.pmf: must not be empty");
    CompensatedSum s;
    for (size_t j = 0; j < pmf.size(); ++j) {
        if (!(pmf[j] >= 0.0))
            throw input_error("exposure.pmf[" + std::to_string(j) + "]: must be non-negative");
        s.add(pmf[j]);
    }
    if (std::abs(s.value() - 1.0) > 1e-12)
        throw input_error("exposure.pmf: masses must sum to 1 within 1e-12");
}

std::int64_t Portfolio::max_loss() const {
    const std::int64_t m = exposure ? exposure->max_value() : 1;
    return static_cast<std::int64_t>(size()) * m;
}

void Portfolio::validate() const {
    if (avg_pd.empty()) throw input_error("n: portfolio must contain at least one obligor");
    if (!(rho >= 0.0 && rho < 1.0)) throw input_error("rho: must lie in [0,1)");
    for (size_t i = 0; i < avg_pd.size(); ++i)
        if (!(avg_pd[i] > 0.0 && avg_pd[i] < 1.0))
            throw input_error("avg_pd[" + std::to_string(i) + "]: must lie in (0,1)");
    if (exposure) exposure->validate();
    if (!(notional_per_obligor > 0.0))
        throw input_error("notional_per_obligor: must be positive");
}

ConditionalSlice conditional_pd(const Portfolio& port, double psi) {
    ConditionalSlice slice;
    slice.psi = psi;
    slice.pd.resize(port.avg_pd.size());
    const double sr = std::sqrt(port.rho);
    const double sq = std::sqrt(1.0 - port.rho);
    for (size_t i = 0; i < port.avg_pd.size(); ++i) {
        double q;
        if (port.rho == 0.0) {
            q = port.avg_pd[i];
        } else {
            q = std_normal_cdf((std_normal_quantile(port.avg_pd[i]) - sr * psi) / sq);
        }
        slice.pd[i] = std::min(std::max(q, kPdMin), kPdMax);
    }
    return slice;
}

double integrate_factor(const Portfolio& port, const Quadrature& quad,
                        const std::function<double(const ConditionalSlice&)>& f) {
    CompensatedSum acc;
    for (size_t m = 0; m < quad.nodes.size(); ++m) {
        const ConditionalSlice slice = conditional_pd(port, quad.nodes[m]);
        try {
            acc.add(quad.weights[m] * f(slice));
        } catch (const input_error& e) {
            throw input_error("factor node " + std::to_string(m) + ": " + e.what());
        } catch (const std::exception& e) {
            throw numeric_error("factor node " + std::to_string(m) + ": " + e.what());
        }
    }
    return acc.value();
}

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& field, const std::string& why) {
    throw input_error(field + ": " + why);
}

double require_number(const json& j, const std::string& field) {
    if (!j.contains(field)) field_error(field, "missing required field");
    if (!j.at(field).is_number()) field_error(field, "must be a number");
    return j.at(field).get<double>();
}

} // namespace

Portfolio portfolio_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw input_error(std::string("portfolio JSON: ") + e.what());
    }
    if (!j.is_object()) throw input_error("portfolio JSON: top level must be an object");

    static const char* known[] = {"n",          "rho",         "avg_pd",
                                  "pd_grid",    "pd_lognormal", "exposure",
                                  "notional_per_obligor"};
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || item.key() == k;
        if (!ok) field_error(item.key(), "unknown field");
    }

    if (!j.contains("n")) field_error("n", "missing required field");
    if (!j.at("n").is_number_integer() || j.at("n").get<long long>() < 1)
        field_error("n", "must be a positive integer");
    const int n = j.at("n").get<int>();

    Portfolio port;
    port.rho = j.contains("rho") ? require_number(j, "rho") : 0.0;

    const int specs = static_cast<int>(j.contains("avg_pd")) +
                      static_cast<int>(j.contains("pd_grid")) +
                      static_cast<int>(j.contains("pd_lognormal"));
    if (specs != 1)
        throw input_error(
            "portfolio JSON: exactly one of avg_pd, pd_grid, pd_lognormal is required");

    if (j.contains("avg_pd")) {
        if (!j.at("avg_pd").is_array()) field_error("avg_pd", "must be an array");
        port.avg_pd = j.at("avg_pd").get<std::vector<double>>();
        if (static_cast<int>(port.avg_pd.size()) != n)
            field_error("avg_pd", "length must equal n");
    } else if (j.contains("pd_grid")) {
        const json& g = j.at("pd_grid");
        if (!g.is_object()) field_error("pd_grid", "must be an object");
        const double lo = require_number(g, "lo");
        const double hi = require_number(g, "hi");
        if (!(lo > 0.0 && lo <= hi && hi < 1.0))
            field_error("pd_grid", "requires 0 < lo <= hi < 1");
        port.avg_pd.resize(n);
        for (int i = 0; i < n; ++i)
            port.avg_pd[i] = (n == 1) ? lo : lo + (hi - lo) * i / (n - 1);
    } else {
        const json& g = j.at("pd_lognormal");
        if (!g.is_object()) field_error("pd_lognormal", "must be an object");
        const double mean = require_number(g, "mean");
        const double sd = require_number(g, "sd");
        if (!(mean > 0.0 && mean < 1.0)) field_error("pd_lognormal.mean", "must lie in (0,1)");
        if (!(sd > 0.0)) field_error("pd_lognormal.sd", "must be positive");
        if (!g.contains("seed")) field_error("pd_lognormal.seed", "missing required field");
        const std::uint64_t seed = g.at("seed").get<std::uint64_t>();
        // moment-matched lognormal draws through the deterministic counter RNG
        const double s2 = std::log1p((sd / mean) * (sd / mean));
        const double mu = std::log(mean) - 0.5 * s2;
        const double sigma = std::sqrt(s2);
        port.avg_pd.resize(n);
        for (int i = 0; i < n; ++i) {
            const double z = std_normal_quantile(
                uniform_open01(seed, kGenStream, static_cast<std::uint64_t>(i)));
            port.avg_pd[i] =
                std::min(std::max(std::exp(mu + sigma * z), 1e-8), 1.0 - 1e-8);
        }
    }

    if (j.contains("exposure")) {
        const json& e = j.at("exposure");
        if (!e.is_object() || !e.contains("pmf") || !e.at("pmf").is_array())
            field_error("exposure", "must be an object with a pmf array");
        Severity sev;
        sev.pmf = e.at("pmf").get<std::vector<double>>();
        port.exposure = std::move(sev);
    }
    if (j.contains("notional_per_obligor"))
        port.notional_per_obligor = require_number(j, "notional_per_obligor");

    port.validate();
    return port;
}

Portfolio load_portfolio(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("portfolio file: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return portfolio_from_json(buf.str());
}

} // namespace lossdist
