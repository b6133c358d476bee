// Batch front end for the loss-distribution engines: parses portfolio and
// tranche configurations, dispatches to any estimation method, and emits
// CSV/JSON rows with fixed, documented columns.
//
// Exit codes: 0 success, 2 configuration error (diagnostic names the offending
// field), 3 numeric failure (diagnostic names the method and factor node),
// 4 resource limit.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lossdist/cdo.hpp"
#include "lossdist/engines.hpp"
#include "lossdist/errors.hpp"
#include "lossdist/portfolio.hpp"

namespace {

using namespace lossdist;

// ---------------------------------------------------------------------------
// formatting and output

std::string fmt_g(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt_bp(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string fmt_secs(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

struct Cell {
    std::string text;
    bool numeric = false;
    bool integer = false;
};

Cell num(double v) { return {fmt_g(v), true, false}; }
Cell num_int(std::int64_t v) { return {std::to_string(v), true, true}; }
Cell num_bp(double v) { return {fmt_bp(v), true, false}; }
Cell num_secs(double v) { return {fmt_secs(v), true, false}; }
Cell str(std::string s) { return {std::move(s), false, false}; }

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

void write_output(const Table& t, const std::string& path, const std::string& format) {
    std::string payload;
    if (format == "csv") {
        std::ostringstream os;
        for (std::size_t i = 0; i < t.columns.size(); ++i)
            os << (i ? "," : "") << t.columns[i];
        os << "\n";
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << (i ? "," : "") << row[i].text;
            os << "\n";
        }
        payload = os.str();
    } else {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto& row : t.rows) {
            nlohmann::ordered_json obj;
            for (std::size_t i = 0; i < row.size(); ++i)
                if (row[i].integer)
                    obj[t.columns[i]] = std::stoll(row[i].text);
                else if (row[i].numeric)
                    obj[t.columns[i]] = std::stod(row[i].text);
                else
                    obj[t.columns[i]] = row[i].text;
            rows.push_back(std::move(obj));
        }
        payload = rows.dump(2) + "\n";
    }
    if (path == "-") {
        std::cout << payload;
    } else {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw input_error("output: cannot open '" + path + "' for writing");
        f << payload;
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// options shared by the subcommands

struct CommonOpts {
    std::string portfolio_path;
    std::string method = "recursive";
    int order = 4;
    int nodes = 64;
    std::int64_t runs = 100000;
    std::uint64_t seed = 1;
    std::string output = "-";
    std::string format = "csv";
    bool fixed_timing = false;
};

void add_output_options(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("-o,--output", o.output, "output path ('-' writes to stdout)")
        ->capture_default_str();
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_flag("--fixed-timing", o.fixed_timing,
                  "write 0 in the seconds columns (byte-stable regression output)");
}

void add_common_options(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("-p,--portfolio", o.portfolio_path, "portfolio JSON file")
        ->required();
    cmd->add_option("-m,--method", o.method,
                    "estimation method (recursive, modpoisson, modcompound, ld, "
                    "stein-gauss, stein-poisson, mc, is1, is2)")
        ->capture_default_str();
    cmd->add_option("-r,--order", o.order, "approximation scheme order")
        ->capture_default_str();
    cmd->add_option("-N,--nodes", o.nodes, "Gauss-Hermite factor node count")
        ->capture_default_str();
    cmd->add_option("--runs", o.runs, "simulation runs (mc, is1, is2)")
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "simulation seed")->capture_default_str();
    add_output_options(cmd, o);
}

EngineConfig engine_config(const CommonOpts& o) {
    EngineConfig cfg;
    cfg.method = method_from_name(o.method);
    cfg.order = o.order;
    cfg.nodes = o.nodes;
    cfg.runs = o.runs;
    cfg.seed = o.seed;
    return cfg;
}

CdoEngine cdo_engine_from(Method m, int order) {
    switch (m) {
        case Method::recursive:
            return {CdoEngine::Kind::recursive, order};
        case Method::modpoisson:
            return {CdoEngine::Kind::modpoisson, order};
        case Method::modcompound:
            return {CdoEngine::Kind::modcompound, order};
        case Method::stein_gauss:
            return {CdoEngine::Kind::stein_gauss, order};
        case Method::stein_poisson:
            return {CdoEngine::Kind::stein_poisson, order};
        default:
            throw input_error(
                std::string("method: ") + method_name(m) +
                " is not a cdo pricing engine (large-deviations and simulation "
                "methods are excluded; use recursive, modpoisson, modcompound, "
                "stein-gauss, or stein-poisson)");
    }
}

std::vector<TrancheSpec> load_tranches(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw input_error("tranches: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw input_error(std::string("tranches JSON: ") + e.what());
    }
    if (!j.is_array() || j.empty())
        throw input_error("tranches: must be a non-empty JSON array of {attach, detach}");
    std::vector<TrancheSpec> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string where = "tranches[" + std::to_string(i) + "]";
        const auto& o = j[i];
        if (!o.is_object()) throw input_error(where + ": must be an object");
        for (const auto& item : o.items())
            if (item.key() != "attach" && item.key() != "detach")
                throw input_error(where + "." + item.key() + ": unknown field");
        for (const char* key : {"attach", "detach"})
            if (!o.contains(key) || !o.at(key).is_number())
                throw input_error(where + "." + key + ": missing or not a number");
        TrancheSpec t{o.at("attach").get<double>(), o.at("detach").get<double>()};
        try {
            t.validate();
        } catch (const input_error& e) {
            throw input_error(where + ": " + e.what());
        }
        out.push_back(t);
    }
    return out;
}

// ---------------------------------------------------------------------------
// row builders shared by the subcommands and the bench presets

const std::vector<std::string> kTailColumns = {
    "method", "order", "x", "estimate", "std_error", "runs", "seconds"};
const std::vector<std::string> kVarEsColumns = {"method", "order",
                                                "alpha",  "var",
                                                "es",     "seconds"};
const std::vector<std::string> kCdoColumns = {
    "tranche",        "attach",         "detach", "default_leg_bp",
    "premium_leg_bp", "fair_spread_bp", "engine", "seconds"};

void append_tail_rows(Table& t, const Portfolio& port, const EngineConfig& cfg,
                      const std::vector<double>& xs, bool fixed_timing) {
    for (double x : xs) {
        const auto t0 = std::chrono::steady_clock::now();
        const TailValue tv = tail_probability(port, cfg, x);
        const double secs = fixed_timing ? 0.0 : seconds_since(t0);
        t.add({str(method_name(cfg.method)), num_int(cfg.order), num(x),
               num(tv.estimate), num(tv.std_error), num_int(tv.runs),
               num_secs(secs)});
    }
}

void append_var_es_rows(Table& t, const Portfolio& port, const EngineConfig& cfg,
                        const std::vector<double>& alphas, bool fixed_timing) {
    if (is_simulation_method(cfg.method))
        std::cerr << "note: var-es with " << method_name(cfg.method)
                  << " re-simulates the portfolio per lattice point; expected "
                     "shortfall is high-variance in the far tail\n";
    const auto rows = var_es_points(port, cfg, alphas);
    bool warned = false;
    for (const auto& row : rows) {
        if (row.monotone_warning && !warned) {
            std::cerr << "note: " << method_name(cfg.method)
                      << " tail was non-monotone before regularization\n";
            warned = true;
        }
        t.add({str(method_name(cfg.method)), num_int(cfg.order), num(row.alpha),
               num(row.var), num(row.es),
               num_secs(fixed_timing ? 0.0 : row.seconds)});
    }
}

void append_cdo_rows(Table& t, const Portfolio& port,
                     const std::vector<TrancheSpec>& tranches,
                     const PaymentSchedule& sched, Method method, int order,
                     const Quadrature& quad, bool fixed_timing) {
    const CdoEngine engine = cdo_engine_from(method, order);
    const double total_notional =
        static_cast<double>(port.max_loss()) * port.notional_per_obligor;
    for (std::size_t i = 0; i < tranches.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        const double deflt = default_leg(port, tranches[i], sched, engine, quad);
        const double prem1 = premium_leg(port, tranches[i], sched, engine, quad, 1.0);
        if (!(prem1 > 0.0))
            throw degenerate_tranche_error(
                "premium leg: vanishes at unit spread (tranche wiped out)");
        const double fair = 1e4 * deflt / prem1;
        const double secs = fixed_timing ? 0.0 : seconds_since(t0);
        // legs are quoted in basis points of total portfolio notional, so
        // fair_spread_bp = 1e4 * default_leg_bp / premium_leg_bp
        t.add({num_int(static_cast<std::int64_t>(i) + 1), num(tranches[i].attach),
               num(tranches[i].detach), num_bp(1e4 * deflt / total_notional),
               num_bp(1e4 * prem1 / total_notional), num_bp(fair),
               str(method_name(method)), num_secs(secs)});
    }
}

// ---------------------------------------------------------------------------
// subcommand runners

void run_tail(const CommonOpts& o, const std::vector<double>& xs) {
    const Portfolio port = load_portfolio(o.portfolio_path);
    Table t;
    t.columns = kTailColumns;
    append_tail_rows(t, port, engine_config(o), xs, o.fixed_timing);
    write_output(t, o.output, o.format);
}

void run_var_es(const CommonOpts& o, const std::vector<double>& alphas) {
    const Portfolio port = load_portfolio(o.portfolio_path);
    Table t;
    t.columns = kVarEsColumns;
    append_var_es_rows(t, port, engine_config(o), alphas, o.fixed_timing);
    write_output(t, o.output, o.format);
}

void run_cdo(const CommonOpts& o, const std::string& tranches_path, double maturity,
             int freq, double rate) {
    const Portfolio port = load_portfolio(o.portfolio_path);
    const std::vector<TrancheSpec> tranches = load_tranches(tranches_path);
    const PaymentSchedule sched = make_schedule(maturity, freq, rate);
    const Method method = method_from_name(o.method);
    Table t;
    t.columns = kCdoColumns;
    append_cdo_rows(t, port, tranches, sched, method, o.order,
                    gauss_hermite(o.nodes), o.fixed_timing);
    write_output(t, o.output, o.format);
}

// ---------------------------------------------------------------------------
// bench presets: deterministic built-in portfolios, one preset per published
// experiment grid

Portfolio grid_portfolio(int n, double lo, double hi, double rho) {
    Portfolio port;
    port.avg_pd.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        port.avg_pd[static_cast<std::size_t>(i)] =
            (n == 1) ? lo : lo + (hi - lo) * i / (n - 1);
    port.rho = rho;
    return port;
}

Portfolio benchmark_portfolio() { return grid_portfolio(250, 0.02, 0.08, 0.3); }
Portfolio cdo_benchmark_portfolio() { return grid_portfolio(100, 0.01, 0.10, 0.1); }

EngineConfig preset_config(Method m, int order, int nodes, std::int64_t runs) {
    EngineConfig cfg;
    cfg.method = m;
    cfg.order = order;
    cfg.nodes = nodes;
    cfg.runs = runs;
    cfg.seed = 1;
    return cfg;
}

// Tail curves across all method families on the 250-obligor benchmark; the
// error view of the same figure uses the recursive rows as the reference.
Table bench_tail_curves(bool fixed_timing) {
    const Portfolio port = benchmark_portfolio();
    std::vector<double> xs;
    for (int x = 10; x <= 240; x += 10) xs.push_back(x);
    Table t;
    t.columns = kTailColumns;
    append_tail_rows(t, port, preset_config(Method::recursive, 0, 64, 0), xs,
                     fixed_timing);
    for (int r : {4, 6, 10})
        append_tail_rows(t, port, preset_config(Method::modpoisson, r, 64, 0), xs,
                         fixed_timing);
    append_tail_rows(t, port, preset_config(Method::ld, 0, 64, 0), xs, fixed_timing);
    append_tail_rows(t, port, preset_config(Method::mc, 0, 64, 20000), xs,
                     fixed_timing);
    append_tail_rows(t, port, preset_config(Method::is2, 0, 64, 10000), xs,
                     fixed_timing);
    return t;
}

// VaR/ES at the four standard confidence levels; the factor rule is run at 256
// nodes because the far-tail expected shortfall needs a converged integral.
Table bench_var_es_table(bool fixed_timing) {
    const Portfolio port = benchmark_portfolio();
    const std::vector<double> alphas = {0.95, 0.99, 0.9999, 0.999999};
    Table t;
    t.columns = kVarEsColumns;
    append_var_es_rows(t, port, preset_config(Method::recursive, 0, 256, 0), alphas,
                       fixed_timing);
    for (int r : {4, 6, 10})
        append_var_es_rows(t, port, preset_config(Method::modpoisson, r, 256, 0),
                           alphas, fixed_timing);
    return t;
}

// VaR comparison across every method family over a denser ladder of levels.
Table bench_var_errors(bool fixed_timing) {
    const Portfolio port = benchmark_portfolio();
    const std::vector<double> alphas = {0.9,   0.95,   0.99,  0.995,
                                        0.999, 0.9995, 0.9999};
    Table t;
    t.columns = kVarEsColumns;
    append_var_es_rows(t, port, preset_config(Method::recursive, 0, 64, 0), alphas,
                       fixed_timing);
    for (int r : {4, 6, 10})
        append_var_es_rows(t, port, preset_config(Method::modpoisson, r, 64, 0),
                           alphas, fixed_timing);
    append_var_es_rows(t, port, preset_config(Method::ld, 0, 64, 0), alphas,
                       fixed_timing);
    append_var_es_rows(t, port, preset_config(Method::mc, 0, 64, 20000), alphas,
                       fixed_timing);
    append_var_es_rows(t, port, preset_config(Method::is2, 0, 64, 10000), alphas,
                       fixed_timing);
    return t;
}

const std::vector<std::string> kTimingColumns = {"method", "order",   "n", "x",
                                                 "estimate", "seconds"};

// Wall time of a single mixed tail evaluation as the portfolio grows.
Table bench_timing_sweep(bool fixed_timing) {
    Table t;
    t.columns = kTimingColumns;
    for (int n : {100, 300, 1000, 3000, 10000}) {
        const Portfolio port = grid_portfolio(n, 0.02, 0.08, 0.3);
        const double x = 0.1 * n;
        const std::vector<EngineConfig> cfgs = {
            preset_config(Method::recursive, 0, 16, 0),
            preset_config(Method::modpoisson, 6, 16, 0),
            preset_config(Method::mc, 0, 16, 10000),
            preset_config(Method::is2, 0, 16, 1000),
        };
        for (const auto& cfg : cfgs) {
            const auto t0 = std::chrono::steady_clock::now();
            const TailValue tv = tail_probability(port, cfg, x);
            const double secs = fixed_timing ? 0.0 : seconds_since(t0);
            t.add({str(method_name(cfg.method)), num_int(cfg.order), num_int(n),
                   num(x), num(tv.estimate), num_secs(secs)});
        }
    }
    return t;
}

// Wall time of the mod-Poisson scheme as the approximation order grows
// (single slice: zero correlation collapses the factor rule to one node).
Table bench_order_timing(bool fixed_timing) {
    const Portfolio port = grid_portfolio(1000, 0.02, 0.08, 0.0);
    const double x = 100.0;
    Table t;
    t.columns = kTimingColumns;
    for (int r = 2; r <= 30; r += 2) {
        const auto cfg = preset_config(Method::modpoisson, r, 1, 0);
        const auto t0 = std::chrono::steady_clock::now();
        const TailValue tv = tail_probability(port, cfg, x);
        const double secs = fixed_timing ? 0.0 : seconds_since(t0);
        t.add({str("modpoisson"), num_int(r), num_int(1000), num(x),
               num(tv.estimate), num_secs(secs)});
    }
    return t;
}

// Plain Monte Carlo against importance sampling at a moderate and a rare tail
// point of the benchmark (the exact tail there is about 1e-2 and 1e-4).
Table bench_rare_event(bool fixed_timing) {
    const Portfolio port = benchmark_portfolio();
    const std::vector<double> xs = {81.0, 169.0};
    Table t;
    t.columns = kTailColumns;
    append_tail_rows(t, port, preset_config(Method::recursive, 0, 64, 0), xs,
                     fixed_timing);
    for (std::int64_t runs : {10000, 100000, 1000000})
        append_tail_rows(t, port, preset_config(Method::mc, 0, 64, runs), xs,
                         fixed_timing);
    append_tail_rows(t, port, preset_config(Method::is1, 0, 64, 10000), xs,
                     fixed_timing);
    for (std::int64_t runs : {1000, 10000, 100000})
        append_tail_rows(t, port, preset_config(Method::is2, 0, 64, runs), xs,
                         fixed_timing);
    return t;
}

// Five standard tranches priced by every cdo engine on the 100-obligor
// benchmark.
Table bench_cdo_table(bool fixed_timing) {
    const Portfolio port = cdo_benchmark_portfolio();
    const std::vector<TrancheSpec> tranches = {
        {0.00, 0.03}, {0.03, 0.07}, {0.07, 0.10}, {0.10, 0.15}, {0.15, 0.30}};
    const PaymentSchedule sched = make_schedule(5.0, 4, 0.03);
    const Quadrature quad = gauss_hermite(64);
    Table t;
    t.columns = kCdoColumns;
    append_cdo_rows(t, port, tranches, sched, Method::recursive, 0, quad,
                    fixed_timing);
    append_cdo_rows(t, port, tranches, sched, Method::stein_gauss, 0, quad,
                    fixed_timing);
    append_cdo_rows(t, port, tranches, sched, Method::stein_poisson, 0, quad,
                    fixed_timing);
    for (int r : {4, 6, 10})
        append_cdo_rows(t, port, tranches, sched, Method::modpoisson, r, quad,
                        fixed_timing);
    return t;
}

// Static call prices across strikes as the default-probability level moves the
// loss distribution from the Poisson toward the Gaussian regime.
Table bench_calls_grid(bool fixed_timing) {
    Table t;
    t.columns = {"method", "order", "mean_pd", "strike", "estimate", "seconds"};
    const Quadrature quad = gauss_hermite(64);
    for (double m : {0.01, 0.05, 0.10, 0.50}) {
        const Portfolio port = grid_portfolio(100, 0.5 * m, 1.5 * m, 0.1);
        const double lambda_bar = 100.0 * m;
        std::set<std::int64_t> strikes;
        for (double f : {0.5, 1.0, 1.5, 2.0, 3.0, 5.0}) {
            const auto k = static_cast<std::int64_t>(std::ceil(f * lambda_bar));
            if (k >= 1 && k < 100) strikes.insert(k);
        }
        struct EngineRow {
            Method method;
            int order;
        };
        const EngineRow engines[] = {{Method::recursive, 0},  {Method::modpoisson, 2},
                                     {Method::modpoisson, 6}, {Method::modpoisson, 10},
                                     {Method::stein_gauss, 0}, {Method::stein_poisson, 0}};
        for (const auto& e : engines) {
            const CdoEngine engine = cdo_engine_from(e.method, e.order);
            for (std::int64_t k : strikes) {
                const auto t0 = std::chrono::steady_clock::now();
                const double call =
                    expected_call(port, static_cast<double>(k), engine, quad);
                const double secs = fixed_timing ? 0.0 : seconds_since(t0);
                t.add({str(method_name(e.method)), num_int(e.order), num(m),
                       num_int(k), num(call), num_secs(secs)});
            }
        }
    }
    return t;
}

struct Preset {
    const char* name;
    const char* description;
    Table (*build)(bool fixed_timing);
};

const Preset kPresets[] = {
    {"tail-curves", "tail estimates across methods on the 250-obligor benchmark",
     bench_tail_curves},
    {"tail-errors", "alias of tail-curves (error view of the same rows)",
     bench_tail_curves},
    {"var-es-table", "VaR/ES at standard levels, recursive vs scheme orders",
     bench_var_es_table},
    {"var-errors", "VaR across methods over a denser ladder of levels",
     bench_var_errors},
    {"timing-sweep", "single tail evaluation wall time vs portfolio size",
     bench_timing_sweep},
    {"order-timing", "scheme wall time vs approximation order on one slice",
     bench_order_timing},
    {"rare-event", "Monte Carlo vs importance sampling at moderate and rare tails",
     bench_rare_event},
    {"cdo-table", "five standard tranches priced by every cdo engine",
     bench_cdo_table},
    {"calls-grid", "call prices across strikes and default-probability levels",
     bench_calls_grid},
};

void run_bench(const std::string& preset, const CommonOpts& o) {
    for (const auto& p : kPresets) {
        if (preset == p.name) {
            write_output(p.build(o.fixed_timing), o.output, o.format);
            return;
        }
    }
    std::string known;
    for (const auto& p : kPresets) {
        if (!known.empty()) known += ", ";
        known += p.name;
    }
    throw input_error("preset: unknown preset '" + preset + "' (known: " + known + ")");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "lossdist: credit-portfolio loss distributions, risk measures, and "
        "synthetic CDO tranche pricing under a one-factor Gaussian copula"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "lossdist 0.1.0");

    CommonOpts tail_opts;
    std::vector<double> xs;
    CLI::App* tail_cmd = app.add_subcommand(
        "tail", "estimate exceedance probabilities P{L > x}");
    add_common_options(tail_cmd, tail_opts);
    tail_cmd->add_option("-x,--x", xs, "loss thresholds (comma separated)")
        ->required()
        ->delimiter(',');

    CommonOpts var_opts;
    std::vector<double> alphas;
    CLI::App* var_cmd =
        app.add_subcommand("var-es", "estimate VaR and expected shortfall");
    add_common_options(var_cmd, var_opts);
    var_cmd->add_option("-a,--alpha", alphas, "confidence levels (comma separated)")
        ->required()
        ->delimiter(',');

    CommonOpts cdo_opts;
    std::string tranches_path;
    double maturity = 5.0;
    int freq = 4;
    double rate = 0.03;
    CLI::App* cdo_cmd =
        app.add_subcommand("cdo", "price CDO tranches (legs and fair spreads)");
    add_common_options(cdo_cmd, cdo_opts);
    cdo_cmd->add_option("-t,--tranches", tranches_path,
                        "JSON array of {attach, detach} fractions")
        ->required();
    cdo_cmd->add_option("--maturity", maturity, "contract maturity in years")
        ->capture_default_str();
    cdo_cmd->add_option("--freq", freq, "premium payments per year")
        ->capture_default_str();
    cdo_cmd->add_option("--rate", rate, "continuously compounded discount rate")
        ->capture_default_str();

    CommonOpts bench_opts;
    std::string preset;
    CLI::App* bench_cmd = app.add_subcommand(
        "bench", "regenerate a published experiment grid on built-in benchmarks");
    bench_cmd->add_option("--preset", preset, "experiment preset name")->required();
    add_output_options(bench_cmd, bench_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (tail_cmd->parsed())
            run_tail(tail_opts, xs);
        else if (var_cmd->parsed())
            run_var_es(var_opts, alphas);
        else if (cdo_cmd->parsed())
            run_cdo(cdo_opts, tranches_path, maturity, freq, rate);
        else
            run_bench(preset, bench_opts);
        return 0;
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const resource_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
