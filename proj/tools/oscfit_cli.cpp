// Command-line surface: ingestion, crisis-window fitting, scans, return
// statistics, correlation summaries, coefficient map-back, and synthetic
// data generation. `fit` and `corr` emit JSON; the rest emit TSV.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "oscfit/analytics.hpp"
#include "oscfit/dynamics.hpp"
#include "oscfit/errors.hpp"
#include "oscfit/fitting.hpp"
#include "oscfit/mapback.hpp"
#include "oscfit/model.hpp"
#include "oscfit/series.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUsage = 4;

oscfit::CrisisWindow resolve_window(const std::string& spec) {
    for (const auto& w : oscfit::builtin_windows())
        if (w.name == spec) return w;
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw CLI::ValidationError("--window",
                                   "expected a preset name (1987/1998/2001/2008) or start:end");
    return {"custom", spec.substr(0, colon), spec.substr(colon + 1)};
}

std::vector<double> parse_grid(const std::string& spec) {
    double lo = 0.0, hi = 0.0, step = 0.0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0.0 ||
        lo <= 0.0 || hi < lo)
        throw CLI::ValidationError("--w-grid", "expected lo:hi:step with 0 < lo <= hi");
    std::vector<double> grid;
    for (double w = lo; w <= hi + 1e-9; w += step) grid.push_back(w);
    return grid;
}

json params_to_json(const oscfit::ShockFitParams& p) {
    return {{"A", p.A},       {"B", p.B}, {"alpha", p.alpha}, {"C", p.C},
            {"beta", p.beta}, {"w", p.w}, {"phi", p.phi}};
}

oscfit::ShockFitParams params_from_json(const json& j) {
    oscfit::ShockFitParams p;
    p.A = j.at("A");
    p.B = j.at("B");
    p.alpha = j.at("alpha");
    p.C = j.at("C");
    p.beta = j.at("beta");
    p.w = j.at("w");
    p.phi = j.at("phi");
    return p;
}

json fit_result_to_json(const oscfit::FitResult& r) {
    return {{"params", params_to_json(r.params)},
            {"sse", r.sse},
            {"n_points", r.n_points},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"seed_w", r.seed_w}};
}

struct SeriesOptions {
    std::string window = "1987";
    bool no_onset = false;
};

oscfit::NormalizedSeries load_series(const std::string& csv, const SeriesOptions& opt) {
    const oscfit::PriceSeries prices = oscfit::load_csv(csv);
    oscfit::NormalizedSeries series =
        oscfit::extract_window(prices, resolve_window(opt.window));
    return opt.no_onset ? series : series.from_onset();
}

void emit(const json& doc) { std::cout << doc.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"damped-oscillator shock-model toolkit for crash-window index data"};
    app.require_subcommand(1);

    // ---- fit ----
    auto* fit = app.add_subcommand("fit", "fit a shock model to a crisis window (JSON)");
    std::string fit_csv, fit_variant_name = "single", fit_grid_spec;
    SeriesOptions fit_opt;
    std::optional<int> fit_horizon;
    bool fit_nonneg_beta = true;
    std::uint64_t fit_seed = 0;
    double fit_tol = 1e-6;
    fit->add_option("csv", fit_csv, "price CSV (date,close)")->required();
    fit->add_option("--window", fit_opt.window, "preset name or start:end")->required();
    fit->add_option("--variant", fit_variant_name, "single|double|twomode")
        ->check(CLI::IsMember({"single", "double", "twomode"}));
    fit->add_option("--w-grid", fit_grid_spec, "frequency grid lo:hi:step");
    fit->add_option("--horizon", fit_horizon, "use only the first k samples");
    fit->add_flag("--nonneg-beta,!--no-nonneg-beta", fit_nonneg_beta,
                  "project beta onto [0, inf) (default on)");
    fit->add_flag("--no-onset", fit_opt.no_onset, "fit the full window, not from the peak");
    fit->add_option("--seed", fit_seed, "restart-jitter seed (recorded in output)");
    fit->add_option("--tol", fit_tol, "relative SSE convergence tolerance");

    // ---- scan-w ----
    auto* scan = app.add_subcommand("scan-w", "multi-start frequency scan (JSON)");
    std::string scan_csv, scan_grid_spec;
    SeriesOptions scan_opt;
    std::optional<int> scan_horizon;
    std::uint64_t scan_seed = 0;
    scan->add_option("csv", scan_csv, "price CSV (date,close)")->required();
    scan->add_option("--window", scan_opt.window, "preset name or start:end")->required();
    scan->add_option("--w-grid", scan_grid_spec, "frequency grid lo:hi:step");
    scan->add_option("--horizon", scan_horizon, "use only the first k samples");
    scan->add_flag("--no-onset", scan_opt.no_onset, "scan the full window");
    scan->add_option("--seed", scan_seed, "restart-jitter seed (recorded in output)");

    // ---- profile ----
    auto* profile = app.add_subcommand("profile", "error landscape along one parameter (TSV)");
    std::string prof_csv, prof_params_path, prof_param;
    SeriesOptions prof_opt;
    double prof_lo = 0.0, prof_hi = 1.0;
    int prof_steps = 101;
    profile->add_option("csv", prof_csv, "price CSV (date,close)")->required();
    profile->add_option("--window", prof_opt.window)->required();
    profile->add_option("--params", prof_params_path, "fit JSON holding the frozen params")
        ->required();
    profile->add_option("--param", prof_param, "A|B|alpha|C|beta|w|phi")->required();
    profile->add_option("--lo", prof_lo)->required();
    profile->add_option("--hi", prof_hi)->required();
    profile->add_option("--steps", prof_steps);
    profile->add_flag("--no-onset", prof_opt.no_onset);

    // ---- curve ----
    auto* curve = app.add_subcommand("curve", "evaluate a fitted curve (TSV)");
    std::string curve_params_path;
    double curve_tmax = 30.0, curve_step = 0.1;
    curve->add_option("--params", curve_params_path, "fit JSON")->required();
    curve->add_option("--t-max", curve_tmax);
    curve->add_option("--step", curve_step);

    // ---- returns ----
    auto* returns = app.add_subcommand("returns", "daily log-returns (TSV)");
    std::string ret_csv;
    returns->add_option("csv", ret_csv)->required();

    // ---- logdensity ----
    auto* logdens = app.add_subcommand("logdensity", "log-density histogram (TSV)");
    std::string ld_csv;
    double ld_bin = 0.004;
    logdens->add_option("csv", ld_csv)->required();
    logdens->add_option("--bin", ld_bin, "bin width (default 0.004)");

    // ---- corr ----
    auto* corr = app.add_subcommand("corr", "cross-market correlation summary (JSON)");
    std::vector<std::string> corr_csvs;
    std::string corr_window;
    corr->add_option("csv", corr_csvs, "two or more price CSVs")->required()->expected(-2);
    corr->add_option("--window", corr_window, "restrict to a crisis window");

    // ---- mapback ----
    auto* mapback = app.add_subcommand("mapback",
                                       "map fitted params to oscillator coefficients (JSON)");
    std::string mb_fit_path, mb_mass_spec = "unit", mb_market, mb_reference = "NYSE";
    std::vector<std::string> mb_csvs;
    mapback->add_option("fit", mb_fit_path, "fit JSON from the fit command")->required();
    mapback->add_option("--mass", mb_mass_spec, "unit | cap:<table file> | invvol");
    mapback->add_option("--market", mb_market, "market label for the mass lookup");
    mapback->add_option("--reference", mb_reference, "unit-mass market (default NYSE)");
    mapback->add_option("--returns-csv", mb_csvs, "price CSVs for invvol masses");

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "synthetic model samples (TSV)");
    std::string sy_params_path;
    int sy_n = 27;
    double sy_sigma = 0.0;
    std::uint64_t sy_seed = 0;
    synth->add_option("--params", sy_params_path, "single-shock params JSON")->required();
    synth->add_option("--n", sy_n);
    synth->add_option("--sigma", sy_sigma);
    synth->add_option("--seed", sy_seed);

    // ---- ode-check ----
    auto* ode = app.add_subcommand("ode-check",
                                   "closed form vs RK4 discrepancy for oscillator coeffs (JSON)");
    std::string ode_coeffs_path;
    double ode_days = 30.0, ode_dt = 1e-3;
    ode->add_option("--coeffs", ode_coeffs_path, "JSON with m,gamma,k,Pstar,delta,shock_alpha,P0,Pdot0")
        ->required();
    ode->add_option("--days", ode_days);
    ode->add_option("--dt", ode_dt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*fit) {
            oscfit::NormalizedSeries series = load_series(fit_csv, fit_opt);
            oscfit::FitConfig cfg = oscfit::FitConfig::refine_defaults();
            if (!fit_grid_spec.empty()) cfg.w_grid = parse_grid(fit_grid_spec);
            cfg.fit_horizon = fit_horizon;
            cfg.enforce_nonneg_beta = fit_nonneg_beta;
            cfg.seed = fit_seed;
            cfg.convergence_tol = fit_tol;
            json doc = {{"command", "fit"},
                        {"label", series.label},
                        {"window", {{"start", series.window_start}, {"end", series.window_end}}},
                        {"variant", fit_variant_name},
                        {"onset_t", series.t.front()},
                        {"P0", series.values.front()},
                        {"config",
                         {{"w_grid_size", cfg.w_grid.size()},
                          {"horizon", fit_horizon ? json(*fit_horizon) : json()},
                          {"nonneg_beta", cfg.enforce_nonneg_beta},
                          {"tol", cfg.convergence_tol},
                          {"seed", cfg.seed}}}};
            if (fit_variant_name == "single") {
                doc["result"] = fit_result_to_json(oscfit::fit_single(series, cfg));
            } else if (fit_variant_name == "twomode") {
                const auto r = oscfit::fit_two_mode(series, cfg);
                json modes = json::array();
                for (const auto& m : r.params.modes)
                    modes.push_back({{"C", m.C}, {"beta", m.beta}, {"w", m.w}, {"phi", m.phi}});
                doc["result"] = {{"params",
                                  {{"A", r.params.A},
                                   {"B", r.params.B},
                                   {"alpha", r.params.alpha},
                                   {"modes", modes}}},
                                 {"sse", r.sse},
                                 {"n_points", r.n_points}};
            } else {
                const auto r = oscfit::fit_double_shock(series, cfg,
                                                        oscfit::default_t0_grid(series));
                doc["result"] = {{"params",
                                  {{"base", params_to_json(r.params.base)},
                                   {"D", r.params.D},
                                   {"zeta", r.params.zeta},
                                   {"Eamp", r.params.Eamp},
                                   {"eta", r.params.eta},
                                   {"t0", r.params.t0}}},
                                 {"sse", r.sse},
                                 {"n_points", r.n_points}};
            }
            emit(doc);
        } else if (*scan) {
            oscfit::NormalizedSeries series = load_series(scan_csv, scan_opt);
            oscfit::FitConfig cfg = oscfit::FitConfig::scan_defaults();
            if (!scan_grid_spec.empty()) cfg.w_grid = parse_grid(scan_grid_spec);
            cfg.fit_horizon = scan_horizon;
            cfg.seed = scan_seed;
            json basins = json::array();
            for (const auto& r : oscfit::scan_w(series, cfg))
                basins.push_back(fit_result_to_json(r));
            emit({{"command", "scan-w"},
                  {"label", series.label},
                  {"config",
                   {{"w_grid_size", cfg.w_grid.size()},
                    {"horizon", scan_horizon ? json(*scan_horizon) : json()},
                    {"tol", cfg.convergence_tol},
                    {"seed", cfg.seed}}},
                  {"basins", basins}});
        } else if (*profile) {
            oscfit::NormalizedSeries series = load_series(prof_csv, prof_opt);
            std::ifstream in(prof_params_path);
            if (!in) throw oscfit::ParseError("cannot open " + prof_params_path);
            json j = json::parse(in);
            const json& pj = j.contains("result") ? j["result"]["params"] : j;
            const auto pts = oscfit::landscape_profile(params_from_json(pj), series,
                                                       prof_param, prof_lo, prof_hi,
                                                       prof_steps);
            std::printf("# %s\tsse\n", prof_param.c_str());
            for (const auto& [x, s] : pts) std::printf("%.12g\t%.12g\n", x, s);
        } else if (*curve) {
            std::ifstream in(curve_params_path);
            if (!in) throw oscfit::ParseError("cannot open " + curve_params_path);
            json j = json::parse(in);
            const json& pj = j.contains("result") ? j["result"]["params"] : j;
            const oscfit::ShockFitParams p = params_from_json(pj);
            std::printf("# t\tvalue\n");
            for (double t = curve_step; t <= curve_tmax + 1e-9; t += curve_step)
                std::printf("%.12g\t%.12g\n", t, oscfit::eval_single_shock(p, t));
        } else if (*returns) {
            const auto rs = oscfit::log_returns(oscfit::load_csv(ret_csv));
            std::printf("# date\tlog_return\n");
            for (std::size_t i = 0; i < rs.values.size(); ++i)
                std::printf("%s\t%.12g\n", rs.dates[i].c_str(), rs.values[i]);
        } else if (*logdens) {
            const auto rs = oscfit::log_returns(oscfit::load_csv(ld_csv));
            const auto hist = oscfit::log_density_histogram(rs, ld_bin);
            std::printf("# bin_left\tlog_density\n");
            for (const auto& bar : hist.bars)
                std::printf("%.12g\t%.12g\n", bar.left_edge, bar.log_density);
        } else if (*corr) {
            std::vector<oscfit::ReturnSeries> all;
            for (const auto& path : corr_csvs) {
                oscfit::PriceSeries prices = oscfit::load_csv(path);
                if (!corr_window.empty()) {
                    const oscfit::CrisisWindow w = resolve_window(corr_window);
                    oscfit::PriceSeries cut;
                    cut.label = prices.label;
                    for (const auto& row : prices.rows)
                        if (row.date >= w.start && row.date <= w.end) cut.rows.push_back(row);
                    prices = std::move(cut);
                }
                all.push_back(oscfit::log_returns(prices));
            }
            const auto summary = oscfit::correlation_matrix(all);
            emit({{"command", "corr"},
                  {"labels", summary.labels},
                  {"matrix", summary.matrix},
                  {"avg_offdiag", summary.avg_offdiag},
                  {"lambda_max", summary.lambda_max}});
        } else if (*mapback) {
            std::ifstream in(mb_fit_path);
            if (!in) throw oscfit::ParseError("cannot open " + mb_fit_path);
            json j = json::parse(in);
            const json& pj = j.contains("result") ? j["result"]["params"] : j;
            const oscfit::ShockFitParams p = params_from_json(pj);
            const double P0 = j.value("P0", 1.0);
            std::string market = mb_market;
            if (market.empty()) market = j.value("label", std::string("unknown"));
            double mass = 1.0;
            if (mb_mass_spec.rfind("cap:", 0) == 0) {
                const auto caps = oscfit::load_capitalization_table(mb_mass_spec.substr(4));
                const auto assign = oscfit::capitalization_mass(caps, mb_reference);
                const auto it = assign.masses.find(market);
                if (it == assign.masses.end())
                    throw oscfit::ParseError("mapback: no capitalization for '" + market + "'");
                mass = it->second;
            } else if (mb_mass_spec == "invvol") {
                std::vector<oscfit::ReturnSeries> all;
                for (const auto& path : mb_csvs)
                    all.push_back(oscfit::log_returns(oscfit::load_csv(path)));
                const auto assign = oscfit::inverse_volatility_mass(all, mb_reference);
                const auto it = assign.masses.find(market);
                if (it == assign.masses.end())
                    throw oscfit::ParseError("mapback: no volatility series for '" + market +
                                             "'");
                mass = it->second;
            } else if (mb_mass_spec != "unit") {
                throw CLI::ValidationError("--mass", "expected unit, cap:<file>, or invvol");
            }
            const auto mapped = oscfit::map_back(p, mass, P0);
            emit({{"command", "mapback"},
                  {"market", market},
                  {"mass", mass},
                  {"Pstar", mapped.Pstar},
                  {"c1", mapped.c1},
                  {"gamma", mapped.gamma},
                  {"k", mapped.k},
                  {"delta", mapped.delta},
                  {"b", mapped.b},
                  {"P0", mapped.P0},
                  {"c1_residual",
                   mapped.c1_residual ? json(*mapped.c1_residual) : json()}});
        } else if (*synth) {
            std::ifstream in(sy_params_path);
            if (!in) throw oscfit::ParseError("cannot open " + sy_params_path);
            json j = json::parse(in);
            const json& pj = j.contains("result") ? j["result"]["params"] : j;
            const oscfit::ShockFitParams p = params_from_json(pj);
            const auto series = oscfit::synthesize(
                [&](double t) { return oscfit::eval_single_shock(p, t); }, sy_n, sy_sigma,
                sy_seed);
            std::printf("# t\tvalue\n");
            for (std::size_t i = 0; i < series.size(); ++i)
                std::printf("%.12g\t%.12g\n", series.t[i], series.values[i]);
        } else if (*ode) {
            std::ifstream in(ode_coeffs_path);
            if (!in) throw oscfit::ParseError("cannot open " + ode_coeffs_path);
            json j = json::parse(in);
            oscfit::OscillatorCoeffs c;
            c.m = j.at("m");
            c.gamma = j.at("gamma");
            c.k = j.at("k");
            c.Pstar = j.value("Pstar", 0.0);
            c.delta = j.value("delta", 0.0);
            c.shock_alpha = j.value("shock_alpha", 0.0);
            const double P0 = j.value("P0", c.Pstar);
            const double Pdot0 = j.value("Pdot0", 0.0);
            const auto closed = oscfit::closed_form_solution(c, P0, Pdot0);
            const int n = static_cast<int>(ode_days / ode_dt + 0.5);
            const auto samples = oscfit::integrate_ode(c, P0, Pdot0, ode_dt, n);
            double sup = 0.0;
            for (const auto& s : samples)
                sup = std::max(sup, std::abs(s.P - closed(s.t)));
            const auto kind = oscfit::classify_solution(c);
            const char* regime =
                kind.regime == oscfit::SolutionKind::Regime::Overdamped   ? "overdamped"
                : kind.regime == oscfit::SolutionKind::Regime::Critical   ? "critical"
                                                                          : "underdamped";
            emit({{"command", "ode-check"},
                  {"regime", regime},
                  {"discriminant", kind.discriminant},
                  {"sup_norm_diff", sup},
                  {"dt", ode_dt},
                  {"days", ode_days}});
        }
    } catch (const oscfit::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const oscfit::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
