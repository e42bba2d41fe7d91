#include "obslab/commands.hpp"

#include "obslab/dynamics.hpp"
#include "obslab/error.hpp"
#include "obslab/numerics.hpp"
#include "obslab/observability.hpp"
#include "obslab/wkb.hpp"

#include <cmath>

namespace obslab {

Json to_json(const RunConfig& c) {
    Json j;
    j["command"] = c.command;
    j["potential"] = c.potential;
    j["set"] = c.set;
    j["set2"] = c.set2;
    j["K"] = c.K;
    j["accuracy"] = c.accuracy;
    j["horizon"] = c.horizon;
    j["k_list"] = c.k_list;
    j["T_list"] = c.T_list;
    j["lambdas"] = c.lambdas;
    j["M_list"] = c.M_list;
    j["mw_list"] = c.mw_list;
    j["X"] = c.X;
    j["h"] = c.h;
    j["free_operator"] = c.free_operator;
    j["S"] = c.S;
    j["T"] = c.T;
    j["state"] = c.state;
    j["modes"] = c.modes;
    j["dt"] = c.dt;
    j["decompose"] = c.decompose;
    j["seed"] = c.seed;
    return j;
}

RunConfig config_from_json(const Json& j) {
    RunConfig c;
    try {
        c.command = j.at("command").get<std::string>();
        auto get = [&](const char* key, auto& field) {
            if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
        };
        get("potential", c.potential);
        get("set", c.set);
        get("set2", c.set2);
        get("K", c.K);
        get("accuracy", c.accuracy);
        get("horizon", c.horizon);
        get("k_list", c.k_list);
        get("T_list", c.T_list);
        get("lambdas", c.lambdas);
        get("M_list", c.M_list);
        get("mw_list", c.mw_list);
        get("X", c.X);
        get("h", c.h);
        get("free_operator", c.free_operator);
        get("S", c.S);
        get("T", c.T);
        get("state", c.state);
        get("modes", c.modes);
        get("dt", c.dt);
        get("decompose", c.decompose);
        get("seed", c.seed);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::precondition, std::string("bad run config: ") + e.what());
    }
    return c;
}

namespace {

Json envelope(const RunConfig& c) {
    Json j;
    j["schema_version"] = report_schema_version;
    j["artifact_version"] = artifact_version;
    j["command"] = c.command;
    j["config"] = to_json(c);
    j["results"] = Json::object();
    j["artifacts"] = Json::array();
    return j;
}

void attach(ReportDocument& doc, std::string name, std::string content) {
    doc.body["artifacts"].push_back(name);
    doc.files.push_back({std::move(name), std::move(content)});
}

Json fit_json(double value, double target, double tolerance, const char* method) {
    Json j;
    j["value"] = value;
    j["target"] = target;
    j["tolerance"] = tolerance;
    j["method"] = method;
    return j;
}

std::vector<int> as_ints(const std::vector<double>& v, const char* what) {
    std::vector<int> out;
    for (double x : v) {
        require(x == std::floor(x), std::string(what) + " must be integers");
        out.push_back(static_cast<int>(x));
    }
    return out;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

ReportDocument cmd_spectrum(const RunConfig& c) {
    require(c.K >= 1, "K must be at least 1");
    require(c.accuracy > 0 && c.accuracy < 1, "accuracy must lie in (0, 1)");
    const auto V = parse_potential(c.potential);
    const auto t = solve_spectrum(V, c.K, c.accuracy);
    ReportDocument doc{envelope(c), {}};
    auto& r = doc.body["results"];

    Json spec;
    spec["method"] = "finite differences, Sturm bisection, inverse iteration; grid halved until converged";
    spec["tolerance"] = c.accuracy;
    spec["potential"] = V.describe();
    spec["grid"] = {{"X", t.grid.X}, {"N", t.grid.N}, {"h", t.grid.h()}};
    spec["lambdas"] = t.lambdas();
    spec["max_residual"] = t.max_residual;
    spec["boundary_mass"] = t.boundary_mass;
    spec["order"] = {{"min", t.order_min}, {"max", t.order_max}};
    r["spectrum"] = spec;

    if (V.is_monomial() && c.K >= 20) {
        const auto w = check_weyl_law(t);
        Json wj;
        wj["method"] = "least squares of log lambda_k on log k over the upper half of the table";
        wj["tolerance"] = 0.02;
        wj["exponent"] = fit_json(w.exponent, w.target_exponent, 0.02, "log-log fit in k");
        wj["shifted_exponent"] = fit_json(w.shifted_exponent, w.target_exponent, 0.02, "log-log fit in k - 1/2");
        wj["constant"] = w.constant;
        wj["quantized_constant"] = w.quantized_constant;
        wj["k_range"] = {w.k_first, w.k_last};
        r["weyl"] = wj;
    }
    if (c.K >= 10) {
        const auto g = gap_profile(t);
        Json gj;
        gj["method"] = "successive differences; tail slope from log gap on log k over the upper half";
        gj["tolerance"] = c.accuracy;
        gj["min_gap"] = g.min_gap;
        gj["min_gap_index"] = g.min_gap_index;
        gj["tail_slope"] = fit_json(g.tail_slope, g.target_slope, 0.05, "log-log fit of gaps");
        gj["regime"] = V.growth() > 1 ? "growing" : "uniform";
        r["gaps"] = gj;
    }

    CsvTable csv;
    csv.comments = {"spectrum of " + V.describe(), "accuracy " + fmt("%.3g", c.accuracy)};
    csv.header = {"k", "lambda", "mu", "parity", "residual"};
    for (const auto& p : t.pairs)
        csv.rows.push_back({double(p.k), p.lambda, p.mu.value_or(NAN),
                            p.parity ? double(*p.parity == Parity::odd) : NAN, p.residual});
    attach(doc, "spectrum.csv", dump_csv(csv));
    return doc;
}

ReportDocument cmd_setmass(const RunConfig& c) {
    require(c.K >= 1, "K must be at least 1");
    const auto V = parse_potential(c.potential);
    require(V.is_monomial(), "setmass uses monomial potentials");
    const auto family = parse_set(c.set);
    const auto E = RealSet::generate(family, c.horizon);
    ReportDocument doc{envelope(c), {}};
    auto& r = doc.body["results"];

    const auto v = classify(E, std::max(4096.0, c.horizon), 0.5);
    Json cj;
    cj["method"] = v.method == VerdictMethod::analytic ? "analytic" : "numeric-probe";
    cj["tolerance"] = 0.01;
    cj["set"] = family.describe();
    cj["thick"] = v.thick.holds;
    if (v.thick.witness) cj["thick_witness"] = {{"gamma", v.thick.witness->gamma}, {"L", v.thick.witness->L}};
    cj["weakly_thick"] = v.weakly_thick.holds;
    cj["gamma_estimate"] = v.weakly_thick.gamma_estimate;
    cj["horizon_used"] = v.horizon_used;
    r["classification"] = cj;

    const auto t = solve_spectrum(V, c.K, c.accuracy);
    const auto m = eigenmass(E, t);
    Json mj;
    mj["method"] = "trapezoid of |phi_k|^2 over the set with partial-cell weights";
    mj["tolerance"] = 1e-9;
    mj["masses"] = m.masses;
    mj["folded_masses"] = m.folded_masses;
    mj["inf_mass"] = m.inf_mass;
    mj["inf_index"] = m.inf_index;
    Json mins;
    for (int K : {10, 20, 30, 40})
        if (K <= c.K) mins[std::to_string(K)] = min_mass_upto(m, K);
    mj["min_mass_upto"] = mins;
    mj["decay_exponent"] = m.decay_exponent;
    mj["verdict"] = to_string(m.verdict);
    mj["gap_regime"] = m.gap_regime;
    mj["time_regime"] = m.time_regime;
    r["eigenmass"] = mj;

    if (c.decompose > 0) {
        const auto s = mass_profile_decomposition(E, t, c.decompose);
        r["decomposition"] = {{"method", "eigenmass split at the WKB region boundaries"},
                              {"tolerance", 1e-9},
                              {"k", c.decompose},
                              {"I1", s.I1},
                              {"I2", s.I2},
                              {"I3", s.I3},
                              {"total", s.total}};
    }

    CsvTable csv;
    csv.comments = {"eigenfunction mass on " + family.describe(), "potential " + V.describe()};
    csv.header = {"k", "lambda", "mass", "folded_mass"};
    for (std::size_t k = 0; k < m.masses.size(); ++k)
        csv.rows.push_back({double(k + 1), t.pairs[k].lambda, m.masses[k], m.folded_masses[k]});
    attach(doc, "setmass.csv", dump_csv(csv));
    return doc;
}

ReportDocument cmd_wkb(const RunConfig& c) {
    const auto V = parse_potential(c.potential);
    require(V.is_monomial(), "wkb uses monomial potentials");
    require(!c.k_list.empty(), "wkb needs a k range");
    const auto ks = as_ints(c.k_list, "k values");
    const int k_first = *std::min_element(ks.begin(), ks.end());
    const int k_last = *std::max_element(ks.begin(), ks.end());
    require(k_first >= 1, "k must be positive");
    const auto t = solve_spectrum(V, k_last, c.accuracy);
    ReportDocument doc{envelope(c), {}};
    auto& r = doc.body["results"];

    const int m = V.m();
    const auto sweep = amplitude_sweep(t, k_first, k_last);
    Json sj;
    sj["method"] = "least-squares amplitudes over the middle half of the oscillatory region and the far tail";
    sj["tolerance"] = 0.1;
    sj["a_minus_exponent"] = fit_json(sweep.slope_a_minus, sweep.target_a, 0.1, "log|a-| on log mu");
    sj["a_plus_exponent"] = fit_json(sweep.slope_a_plus, sweep.target_a, 0.1, "log|a+| on log mu");
    sj["C_exponent"] = fit_json(sweep.slope_c, sweep.target_c, 0.1, "log|C| on log lambda");
    sj["max_error_ratio"] = fit_json(sweep.max_error_ratio, 5, 5, "max |phi - wkb| / error budget");
    r["scaling"] = sj;

    Json profiles = Json::array();
    for (const auto& p : sweep.profiles) {
        if (std::find(ks.begin(), ks.end(), p.k) == ks.end()) continue;
        Json pj;
        pj["k"] = p.k;
        pj["lambda"] = p.lambda;
        pj["mu"] = p.mu;
        pj["parity"] = to_string(p.parity);
        pj["region"] = {{"delta", p.delta}, {"inner", p.inner_edge()}, {"outer", p.outer_edge()}};
        pj["a_minus"] = p.a_minus;
        pj["a_plus"] = p.a_plus;
        pj["osc_window"] = {p.osc_window.lo, p.osc_window.hi};
        pj["tail_window"] = {p.tail_window.lo, p.tail_window.hi};
        pj["osc_max_residual"] = p.osc_max_residual;
        pj["osc_edge_budget"] = p.osc_edge_budget;
        pj["osc_max_error_ratio"] = p.osc_max_error_ratio;
        pj["tail_max_residual"] = p.tail_max_residual;
        pj["tail_logslope_spread"] = p.tail_logslope_spread;
        pj["turning_constant"] = p.turning_constant;
        pj["zero_offset_cells"] = p.zero_offset_cells;
        pj["zero_offset_cells_full"] = p.zero_offset_cells_full;
        pj["C_abs"] = amplitude_constant(t, p.k);
        profiles.push_back(pj);

        CsvTable csv;
        csv.comments = {"WKB comparison, m=" + std::to_string(m) + " k=" + std::to_string(p.k)};
        csv.header = {"x", "numeric", "wkb", "error_budget", "region"};
        const auto& phi = t.pairs[p.k - 1].phi;
        const std::size_t stride = std::max<std::size_t>(1, t.grid.N / 4000);
        for (std::size_t i = 0; i < t.grid.N; i += stride) {
            const double x = t.grid.node(i);
            const auto w = wkb_eval(p, x);
            csv.rows.push_back({x, phi[i], w.value, w.error_bound, double(static_cast<int>(w.region))});
        }
        attach(doc, "wkb_m" + std::to_string(m) + "_k" + std::to_string(p.k) + ".csv", dump_csv(csv));
    }
    r["profiles"] = {{"method", "WKB amplitudes fitted per mode, errors against the Airy-matched budget"},
                     {"tolerance", 5.0},
                     {"modes", profiles}};
    return doc;
}

ReportDocument cmd_mintime(const RunConfig& c) {
    require(!c.T_list.empty() && !c.k_list.empty(), "mintime needs T and k lists");
    const auto family = parse_set(c.set);
    double reach = 0;
    for (double k : c.k_list) reach = std::max(reach, std::fabs(k));
    const auto E = RealSet::generate(family, std::max(c.horizon, reach + 64));
    const auto tab = minimal_time_scan(E, c.T_list, c.k_list, c.dt);
    ReportDocument doc{envelope(c), {}};
    Json j;
    j["method"] = "closed-form coherent packet, composite midpoint in time, step refined once";
    j["tolerance"] = 1e-2;
    j["set"] = family.describe();
    j["T"] = tab.T;
    j["k"] = tab.k;
    j["Q"] = tab.Q;
    j["Q_refined"] = tab.Q_refined;
    j["dt"] = tab.dt;
    j["stable"] = tab.stable;
    j["max_change"] = tab.max_change;
    j["critical_time"] = pi / 2;
    doc.body["results"]["mintime"] = j;

    CsvTable csv;
    csv.comments = {"Q(k,T) on " + family.describe(), "dt " + fmt("%.6g", tab.dt),
                    std::string("stable ") + (tab.stable ? "yes" : "no")};
    csv.header = {"T"};
    for (double k : tab.k) csv.header.push_back("k=" + fmt("%g", k));
    for (std::size_t i = 0; i < tab.T.size(); ++i) {
        std::vector<double> row{tab.T[i]};
        row.insert(row.end(), tab.Q[i].begin(), tab.Q[i].end());
        csv.rows.push_back(row);
    }
    attach(doc, "mintime.csv", dump_csv(csv));
    return doc;
}

ReportDocument cmd_resolvent(const RunConfig& c) {
    require(!c.lambdas.empty(), "resolvent needs a lambda list");
    const auto family = parse_set(c.set);
    ProbeGrid g;
    g.X = c.X;
    g.h = c.h;
    const auto E = RealSet::generate(family, std::max(c.horizon, c.X + 1));
    ReportDocument doc{envelope(c), {}};
    std::vector<ResolventProbe> probes;
    if (c.free_operator) {
        probes = resolvent_sweep(E, g, c.M_list, c.mw_list, c.lambdas, c.seed).probes;
    } else {
        const auto V = parse_potential(c.potential);
        for (double M : c.M_list)
            for (double mw : c.mw_list) probes.push_back(resolvent_margin(E, g, M, mw, c.lambdas, V, c.seed));
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < probes.size(); ++i)
        if (probes[i].min_margin() > probes[best].min_margin()) best = i;

    Json j;
    j["method"] = "shift-invert Lanczos on M(A-lambda)^T(A-lambda) + m_w D_E, Rayleigh quotient of the Ritz vector";
    j["tolerance"] = 1e-4;
    j["set"] = family.describe();
    j["operator"] = c.free_operator ? "free" : parse_potential(c.potential).describe();
    j["grid"] = {{"X", g.X}, {"h", g.spacing()}, {"N", g.size()}, {"periodic", g.periodic},
                 {"reliable_lambda", g.reliable_lambda()}};
    j["lambdas"] = c.lambdas;
    Json pj = Json::array();
    for (const auto& p : probes)
        pj.push_back({{"M", p.M}, {"m_w", p.m_w}, {"min_margin", p.min_margin()}, {"margins", p.margins}});
    j["probes"] = pj;
    j["best"] = {{"M", probes[best].M}, {"m_w", probes[best].m_w}, {"min_margin", probes[best].min_margin()}};
    j["inequality_holds"] = probes[best].min_margin() >= 1;
    doc.body["results"]["resolvent"] = j;

    CsvTable csv;
    csv.comments = {"margin curves on " + family.describe()};
    csv.header = {"lambda"};
    for (const auto& p : probes) csv.header.push_back("M=" + fmt("%g", p.M) + " m_w=" + fmt("%g", p.m_w));
    for (std::size_t l = 0; l < c.lambdas.size(); ++l) {
        std::vector<double> row{c.lambdas[l]};
        for (const auto& p : probes) row.push_back(p.margins[l]);
        csv.rows.push_back(row);
    }
    attach(doc, "resolvent.csv", dump_csv(csv));
    return doc;
}

namespace {

std::function<Complex(double)> parse_state(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::vector<double> v = colon == std::string::npos ? std::vector<double>{} : parse_list(spec.substr(colon + 1));
    auto arg = [&](std::size_t i, double dflt) { return i < v.size() ? v[i] : dflt; };
    if (kind == "gaussian") {
        const double x0 = arg(0, 0);
        return [x0](double x) { return Complex(std::exp(-(x - x0) * (x - x0) / 2), 0); };
    }
    if (kind == "bump") {
        const double c0 = arg(0, 0), r = arg(1, 5);
        require(r > 0, "bump radius must be positive");
        return [c0, r](double x) {
            const double s = (x - c0) / r;
            return Complex(std::fabs(s) < 1 ? std::exp(-1 / (1 - s * s)) : 0.0, 0);
        };
    }
    if (kind == "coherent") {
        const double k = arg(0, 0);
        return [k](double x) { return coherent_value(k, 0, x); };
    }
    throw Error(ErrorKind::precondition, "unknown state '" + spec + "'");
}

}  // namespace

ReportDocument cmd_twotime(const RunConfig& c) {
    require(c.S >= 0 && c.S < c.T, "twotime needs 0 <= S < T");
    require(c.modes >= 1, "modes must be positive");
    const auto table = hermite_table(c.modes, uniform_grid(c.X, c.h));
    const auto f = sample(table.grid, parse_state(c.state));
    const auto f1 = parse_set(c.set);
    const auto f2 = c.set2.empty() ? f1 : parse_set(c.set2);
    const double H = std::max(c.horizon, c.X + 1);
    const auto rec = two_time_quotient(f, c.S, c.T, RealSet::generate(f1, H), RealSet::generate(f2, H), table);
    ReportDocument doc{envelope(c), {}};
    Json j;
    j["method"] = "exact-eigenvalue Hermite expansion, trapezoid masses with partial cells";
    j["tolerance"] = 1e-8;
    j["S"] = rec.S;
    j["T"] = rec.T;
    j["sets"] = {f1.describe(), f2.describe()};
    j["state"] = c.state;
    j["norm2"] = rec.norm2;
    j["mass_S"] = rec.mass_S;
    j["mass_T"] = rec.mass_T;
    j["quotient"] = finite_or_string(rec.quotient);
    j["regime"] = rec.regime;
    doc.body["results"]["twotime"] = j;
    return doc;
}

ReportDocument run_command(const RunConfig& c) {
    if (c.command == "spectrum") return cmd_spectrum(c);
    if (c.command == "setmass") return cmd_setmass(c);
    if (c.command == "wkb") return cmd_wkb(c);
    if (c.command == "mintime") return cmd_mintime(c);
    if (c.command == "resolvent") return cmd_resolvent(c);
    if (c.command == "twotime") return cmd_twotime(c);
    throw Error(ErrorKind::precondition, "unknown command '" + c.command + "'");
}

std::filesystem::path write_report(ReportDocument doc, const RunConfig& c, double wall_clock) {
    std::filesystem::path dir = c.out_dir.empty() ? "." : c.out_dir;
    if (wall_clock >= 0) doc.body["meta"] = {{"wall_clock_seconds", wall_clock}};
    for (const auto& f : doc.files) write_atomic(dir / f.name, f.content);
    write_atomic(dir / (c.command + ".config.json"), dump_json(to_json(c)));
    const auto path = dir / (c.command + ".json");
    write_atomic(path, dump_json(doc.body));
    return path;
}

int exit_code_for(ErrorKind kind) { return is_numeric_failure(kind) ? 3 : 2; }

}  // namespace obslab
