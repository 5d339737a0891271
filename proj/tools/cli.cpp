#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polariton/classify.hpp"
#include "polariton/coefficients.hpp"
#include "polariton/config.hpp"
#include "polariton/detection.hpp"
#include "polariton/errors.hpp"
#include "polariton/fullmodel.hpp"
#include "polariton/groundstate.hpp"
#include "polariton/meanfield.hpp"
#include "polariton/output.hpp"
#include "polariton/parallel.hpp"
#include "polariton/quantum_ed.hpp"

#ifndef POLARITON_DEFAULT_VALIDATION
#define POLARITON_DEFAULT_VALIDATION "validation/validation_params.json"
#endif

namespace polariton::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Context {
    RunConfig cfg;
    fs::path out_dir;
    int workers = 1;
    std::uint64_t seed = 0;
    std::ostream& out;
    std::ostream& err;

    fs::path file(const std::string& name) const { return out_dir / name; }
    const std::string& hash() const { return cfg.hash; }
};

// JSON cannot hold NaN or infinity; those become null.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json coefficients_json(const EffectiveCoefficients& k) {
    return {{"V1", k.V1}, {"V2", k.V2}, {"U", k.U}, {"Tplus", k.Tplus}, {"Tminus", k.Tminus}, {"N", k.N}};
}

std::vector<double> tminus_grid(const SweepSection& s) {
    std::vector<double> g(static_cast<std::size_t>(s.points));
    for (int i = 0; i < s.points; ++i)
        g[static_cast<std::size_t>(i)] =
            i == s.points - 1 ? s.tminus_max : s.tminus_min + (s.tminus_max - s.tminus_min) * i / (s.points - 1);
    return g;
}

int cmd_coeffs(const Context& c) {
    const auto& p = c.cfg.require_microscopic("coeffs");
    const auto spectrum = diagonalize_spectrum(p);
    const auto k = effective_coefficients(p, c.cfg.N, c.cfg.coefficient_options);
    const auto regime = validate_regime(p, c.cfg.regime);

    json denominators = json::array();
    for (const auto& d : resonance_denominators(p, spectrum)) denominators.push_back({{"name", d.name}, {"value", d.value}});
    json body = {{"coefficients", coefficients_json(k)},
                 {"lambda", spectrum.lambda},
                 {"gamma", spectrum.gamma},
                 {"lambda_printed", printed_lambda(p)},
                 {"denominators", denominators}};
    write_json(c.file("coefficients.json"), c.hash(), body);

    json records = json::array();
    for (const auto& r : regime.records)
        records.push_back({{"group", r.group},
                           {"lhs", r.lhs},
                           {"rhs", r.rhs},
                           {"lhs_value", number(r.lhs_value)},
                           {"rhs_value", number(r.rhs_value)},
                           {"ratio", number(r.ratio)},
                           {"pass", r.pass}});
    json report = {{"records", records},
                   {"much_less", c.cfg.regime.much_less},
                   {"coupling_ratio", number(regime.coupling_ratio)},
                   {"separation_ratio", number(regime.separation_ratio)},
                   {"denominator_ratio", number(regime.denominator_ratio)},
                   {"residual_delta5", regime.residual_delta5},
                   {"residual_delta6", regime.residual_delta6},
                   {"resonance_ok", regime.resonance_ok},
                   {"pass", regime.pass}};
    write_json(c.file("regime.json"), c.hash(), report);

    if (!regime.pass) {
        for (const auto& r : regime.records)
            if (!r.pass) c.err << "warning: regime check failed: [" << r.group << "] " << r.lhs << " << " << r.rhs << '\n';
    }
    c.out << "V1=" << format_number(k.V1) << " V2=" << format_number(k.V2) << " U=" << format_number(k.U)
          << " T+=" << format_number(k.Tplus) << " T-=" << format_number(k.Tminus) << " regime "
          << (regime.pass ? "PASS" : "FAIL") << '\n';
    return 0;
}

int cmd_portrait(const Context& c) {
    const auto k = c.cfg.resolved_coefficients();
    const auto grid = energy_contour_grid(k, c.cfg.portrait);
    CsvWriter csv(c.file("portrait.csv"), c.hash(), "theta,xi,h_over_NU",
                  {"row-major: xi is the outer index, theta the inner one; " + std::to_string(grid.xi.size()) +
                   " x " + std::to_string(grid.theta.size())});
    for (std::size_t i = 0; i < grid.xi.size(); ++i)
        for (std::size_t j = 0; j < grid.theta.size(); ++j) csv.row({grid.theta[j], grid.xi[i], grid.at(i, j)});
    csv.close();
    c.out << "grid " << grid.xi.size() << " x " << grid.theta.size() << '\n';
    return 0;
}

int cmd_evolve(const Context& c) {
    const auto k = c.cfg.resolved_coefficients();
    const auto& e = c.cfg.evolve;
    const double t_end = e.t_end > 0.0 ? e.t_end : 50.0 * characteristic_period(k);
    const auto traj = integrate(e.initial, k, t_end, e.integrator);
    CsvWriter csv(c.file("trajectory.csv"), c.hash(), "t,xi,theta,energy,d",
                  {"theta is unwrapped; termination " + to_string(traj.termination)});
    for (const auto& s : traj.samples) csv.row({s.t, s.state.xi, s.state.theta, s.energy, s.d});
    csv.close();
    c.out << traj.samples.size() << " samples, termination " << to_string(traj.termination) << ", max energy drift "
          << format_number(traj.max_energy_drift()) << '\n';
    return 0;
}

int cmd_classify(const Context& c) {
    const auto k = c.cfg.resolved_coefficients();
    const auto& cs = c.cfg.classify;
    std::vector<MeanFieldState> starts = cs.initial;
    if (cs.lattice) {
        const auto& l = *cs.lattice;
        for (int i = 0; i < l.n_xi; ++i)
            for (int j = 0; j < l.n_theta; ++j) {
                const double xi = l.n_xi == 1 ? l.xi_min : l.xi_min + (l.xi_max - l.xi_min) * i / (l.n_xi - 1);
                const double th = -std::numbers::pi + 2.0 * std::numbers::pi * (j + 0.5) / l.n_theta;
                starts.push_back({xi, th});
            }
    }
    if (starts.empty()) throw ConfigError("classify: no initial conditions (give classify.initial_conditions or a lattice)");

    std::vector<ModeClassification> results(starts.size());
    parallel_for(starts.size(), c.workers, [&](std::size_t i) { results[i] = classify(starts[i], k, cs.period); });

    CsvWriter csv(c.file("classification.csv"), c.hash(), "xi0,theta0,label,winding,period,xi_sign_fixed");
    std::map<std::string, int> counts;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        const auto& r = results[i];
        const auto label = to_string(r.label);
        ++counts[label];
        csv.row({starts[i].xi, starts[i].theta, label, static_cast<long long>(r.winding), r.period,
                 std::string(r.xi_sign_fixed ? "true" : "false")});
    }
    csv.close();

    if (cs.separatrix && k.Tminus != 0.0) {
        const auto set = separatrix(k);
        CsvWriter sep(c.file("separatrix.csv"), c.hash(), "branch,xi,theta");
        for (std::size_t b = 0; b < set.branches.size(); ++b)
            for (const auto& s : set.branches[b]) sep.row({static_cast<long long>(b), s.xi, s.theta});
        sep.close();
        json saddles = json::array();
        for (const auto& s : set.saddles) saddles.push_back({{"xi", s.xi}, {"theta", s.theta}, {"exponent", s.exponent}});
        json fixed = json::array();
        for (const auto& f : find_fixed_points(k).points)
            fixed.push_back({{"xi", f.xi}, {"theta", f.theta}, {"stability", to_string(f.stability)}, {"exponent", f.exponent}});
        write_json(c.file("separatrix.json"), c.hash(),
                   {{"invariant_line", number(set.line_xi.value_or(NAN))},
                    {"level", set.level},
                    {"branches", set.branches.size()},
                    {"saddles", saddles},
                    {"fixed_points", fixed}});
    }
    for (const auto& [label, n] : counts) c.out << label << ' ' << n << '\n';
    return 0;
}

EffectiveCoefficients sweep_template(const Context& c) {
    auto k = c.cfg.resolved_coefficients();
    k.Tminus = 0.0;
    return k;
}

json crossings_json(const CriticalSearch& r) {
    return {{"crossings", r.crossings},
            {"ambiguous", r.ambiguous},
            {"status", r.crossings.empty() ? "NO TRANSITION" : "TRANSITION"}};
}

int cmd_groundstate(const Context& c) {
    const auto templ = sweep_template(c);
    const auto grid = tminus_grid(c.cfg.sweep);
    const double unit = templ.U != 0.0 ? std::abs(templ.U) : 1.0;
    std::vector<GroundStateResult> rows(grid.size());
    parallel_for(grid.size(), c.workers, [&](std::size_t i) {
        auto k = templ;
        k.Tminus = grid[i];
        rows[i] = ground_state(k);
    });
    CsvWriter csv(c.file("groundstate.csv"), c.hash(), "tminus,e0,e_pi,xi0,xi_pi,phase,d_g",
                  {"energies per particle in units of |U|"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& r = rows[i];
        csv.row({grid[i], r.e0 / unit, r.e_pi / unit, r.xi0, r.xi_pi, to_string(r.phase), r.d_g});
    }
    csv.close();
    const auto crit = critical_tminus(templ, c.cfg.sweep.tminus_min, c.cfg.sweep.tminus_max);
    write_json(c.file("groundstate_summary.json"), c.hash(),
               {{"mean_field", crossings_json(crit)}, {"tminus_range", {c.cfg.sweep.tminus_min, c.cfg.sweep.tminus_max}}});
    if (crit.crossings.empty())
        c.out << "NO TRANSITION\n";
    else
        for (double x : crit.crossings) c.out << "crossing at T-=" << format_number(x) << '\n';
    return 0;
}

int cmd_edsweep(const Context& c) {
    const auto templ = sweep_template(c);
    const auto grid = tminus_grid(c.cfg.sweep);
    int n = c.cfg.sweep.n;
    if (n == 0) {
        if (std::abs(templ.N - std::round(templ.N)) > 0.0)
            throw ConfigError("ed-sweep: N = " + format_number(templ.N) + " is not an integer; set sweep.n");
        n = static_cast<int>(std::lround(templ.N));
    }
    SweepOptions so;
    so.jump_factor = c.cfg.sweep.jump_factor;
    so.keep_amplitudes = c.cfg.sweep.keep_amplitudes;
    so.workers = c.workers;
    const auto table = sweep_tminus(templ, n, grid, so);

    CsvWriter csv(c.file("ed_sweep.csv"), c.hash(), "tminus,e_g,entropy,mean_xi");
    for (const auto& r : table.rows) csv.row({r.tminus, r.e_g, r.entropy, r.mean_xi});
    csv.close();
    if (so.keep_amplitudes) {
        CsvWriter amp(c.file("ed_amplitudes.csv"), c.hash(), "tminus,n1,amplitude");
        for (const auto& r : table.rows)
            for (std::size_t i = 0; i < r.amplitudes.size(); ++i)
                amp.row({r.tminus, static_cast<long long>(i), r.amplitudes[i]});
        amp.close();
    }

    const auto crit = critical_tminus(templ, c.cfg.sweep.tminus_min, c.cfg.sweep.tminus_max);
    json ed = {{"jump_found", table.jump.found},
               {"max_delta_s", table.jump.max_delta_s},
               {"median_delta_s", table.jump.median_delta_s},
               {"neighbour_delta_s", table.jump.neighbour_delta_s},
               {"jump_factor", so.jump_factor},
               {"kink_tminus", number(table.kink_tminus.value_or(NAN))}};
    std::optional<double> jump_at;
    if (table.jump.found) {
        const auto i = static_cast<std::size_t>(table.jump.interval);
        jump_at = 0.5 * (grid[i] + grid[i + 1]);
        ed["jump_interval"] = {grid[i], grid[i + 1]};
        ed["jump_tminus"] = *jump_at;
    }
    json summary = {{"n", n}, {"mean_field", crossings_json(crit)}, {"ed", ed}};
    const bool transition = jump_at || !crit.crossings.empty();
    summary["status"] = transition ? "TRANSITION" : "NO TRANSITION";
    if (jump_at && !crit.crossings.empty()) summary["difference"] = *jump_at - crit.crossings.front();
    write_json(c.file("ed_summary.json"), c.hash(), summary);

    if (!transition) {
        c.out << "NO TRANSITION\n";
    } else {
        c.out << "mean-field crossing: "
              << (crit.crossings.empty() ? std::string("none") : format_number(crit.crossings.front())) << '\n';
        c.out << "entropy jump: " << (jump_at ? format_number(*jump_at) : std::string("none")) << '\n';
        if (summary.contains("difference"))
            c.out << "difference: " << format_number(summary["difference"].get<double>()) << '\n';
    }
    return 0;
}

int cmd_validate(const Context& c) {
    const auto& p = c.cfg.require_microscopic("validate");
    auto opts = c.cfg.validate.compare;
    opts.workers = c.workers;
    const auto rep = compare(p, c.cfg.validate.occupations, opts);

    json runs = json::array();
    for (const auto& r : rep.runs) {
        const auto name = "fidelity_" + std::to_string(r.n1) + "_" + std::to_string(r.n2) + ".csv";
        CsvWriter csv(c.file(name), c.hash(), "t,f_full,f_eff,deviation,norm_drift");
        for (std::size_t i = 0; i < r.full.t.size(); ++i)
            csv.row({r.full.t[i], r.full.fidelity[i], r.f_eff[i], r.deviation[i], r.full.norm_drift[i]});
        csv.close();
        json run = {{"n1", r.n1},
                    {"n2", r.n2},
                    {"file", name},
                    {"sup_deviation", r.sup_deviation},
                    {"dt", r.full.dt},
                    {"steps", r.full.steps},
                    {"sector_size", r.full.sector_size},
                    {"max_norm_drift", r.full.max_norm_drift},
                    {"max_leakage", r.full.max_leakage}};
        if (r.cutoff_change) run["cutoff_change"] = *r.cutoff_change;
        if (r.dt_change) run["dt_change"] = *r.dt_change;
        runs.push_back(run);
    }
    write_json(c.file("validate_summary.json"), c.hash(),
               {{"coefficients", coefficients_json(rep.coefficients)},
                {"regime", {{"pass", rep.regime.pass},
                            {"coupling_ratio", number(rep.regime.coupling_ratio)},
                            {"separation_ratio", number(rep.regime.separation_ratio)},
                            {"denominator_ratio", number(rep.regime.denominator_ratio)}}},
                {"status", rep.out_of_regime ? "OUT-OF-REGIME" : "IN-REGIME"},
                {"t_end", rep.t_end},
                {"cutoff", rep.cutoff},
                {"tolerance", opts.tolerance},
                {"within_tolerance", rep.within_tolerance},
                {"runs", runs}});

    if (rep.out_of_regime) c.err << "warning: OUT-OF-REGIME parameters; the effective model is not expected to hold\n";
    for (const auto& r : rep.runs)
        c.out << "(" << r.n1 << "," << r.n2 << ") sup|F_full - F_eff| = " << format_number(r.sup_deviation) << '\n';
    c.out << "within tolerance: " << (rep.within_tolerance ? "true" : "false") << '\n';
    return 0;
}

std::vector<SignalSample> read_signal(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("detect: cannot read " + path.string());
    std::vector<SignalSample> out;
    std::string line;
    bool header = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "gamma_t,signal") throw ConfigError("detect: " + path.string() + " must have header gamma_t,signal");
            header = true;
            continue;
        }
        std::istringstream row(line);
        SignalSample s;
        char comma = 0;
        if (!(row >> s.gamma_t >> comma >> s.count) || comma != ',')
            throw ConfigError("detect: malformed row " + std::to_string(lineno) + " in " + path.string());
        out.push_back(s);
    }
    return out;
}

int cmd_detect(const Context& c) {
    const auto& d = c.cfg.detect;
    std::vector<SignalSample> samples;
    const bool generated = d.input_csv.empty();
    if (generated) {
        samples = generate_signal(d.state, d.gamma_t, d.noise_sigma, c.seed, d.convention);
        CsvWriter csv(c.file("signal.csv"), c.hash(), "gamma_t,signal");
        for (const auto& s : samples) csv.row({s.gamma_t, s.count});
        csv.close();
    } else {
        samples = read_signal(d.input_csv);
    }
    const auto est = infer_eta(samples, d.state.zeta, d.state.n, d.convention);
    json report = {{"sin_eta", est.sin_eta},
                   {"clipped", est.clipped},
                   {"candidates", est.candidates},
                   {"residual_rms", est.residual_rms},
                   {"usable_samples", est.usable_samples},
                   {"convention", d.convention == PhaseConvention::standard ? "standard" : "conjugate"},
                   {"source", generated ? "generated" : d.input_csv}};
    if (generated) report["true_sin_eta"] = std::sin(d.state.eta);
    write_json(c.file("detect_report.json"), c.hash(), report);
    c.out << "sin(eta) = " << format_number(est.sin_eta) << ", candidates";
    for (double e : est.candidates) c.out << ' ' << format_number(e);
    c.out << '\n';
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulation engine for the extended two-component Bose-Hubbard model of a two-mode polariton condensate"};
    std::string verb, config_path, out_dir = ".";
    int workers = default_workers();
    std::uint64_t seed = 0;
    app.add_option("verb", verb, "coeffs | portrait | evolve | classify | groundstate | ed-sweep | validate | detect")
        ->required()
        ->check(CLI::IsMember({"coeffs", "portrait", "evolve", "classify", "groundstate", "ed-sweep", "validate", "detect"}));
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_dir, "output directory (created if missing)");
    app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "seed for detection noise");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : static_cast<int>(ExitCode::config);
    }

    try {
        if (config_path.empty()) {
            if (verb != "validate") throw ConfigError(verb + ": --config is required");
            config_path = POLARITON_DEFAULT_VALIDATION;
        }
        Context ctx{load_config(config_path), out_dir, workers, seed, out, err};
        std::error_code ec;
        fs::create_directories(ctx.out_dir, ec);
        if (ec) throw ConfigError("cannot create output directory " + out_dir + ": " + ec.message());

        if (verb == "coeffs") return cmd_coeffs(ctx);
        if (verb == "portrait") return cmd_portrait(ctx);
        if (verb == "evolve") return cmd_evolve(ctx);
        if (verb == "classify") return cmd_classify(ctx);
        if (verb == "groundstate") return cmd_groundstate(ctx);
        if (verb == "ed-sweep") return cmd_edsweep(ctx);
        if (verb == "validate") return cmd_validate(ctx);
        return cmd_detect(ctx);
    } catch (const Error& e) {
        const char* kind = e.code() == ExitCode::config            ? "config error"
                           : e.code() == ExitCode::identifiability ? "identifiability error"
                                                                   : "numerical error";
        err << kind << ": " << e.what() << '\n';
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace polariton::cli
