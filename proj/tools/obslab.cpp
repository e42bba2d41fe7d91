// obslab: spectra, eigenfunction masses, WKB profiles and observability probes from the command line.
#include "obslab/commands.hpp"
#include "obslab/error.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace obslab;

namespace {

// list flags take "a,b", "a..b" or "a..b:step" and pi expressions
struct ListFlag {
    std::string raw;
    std::vector<double>* target;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral and observability probes for Schrodinger operators with power potentials"};
    app.require_subcommand(0, 1);

    RunConfig c;
    std::string out_dir, replay;
    bool no_clock = false;
    app.add_option("--config", replay, "replay a stored <command>.config.json");
    app.add_option("--out", out_dir, "output directory (default $OBSLAB_OUT, then .)");
    app.add_flag("--no-clock", no_clock, "leave wall-clock timing out of the report");

    std::vector<ListFlag> lists;
    std::string m_flag, accuracy_flag, horizon_flag, X_flag, h_flag, S_flag, T_flag, dt_flag;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--out", out_dir, "output directory");
        sub->add_flag("--no-clock", no_clock, "leave wall-clock timing out of the report");
    };
    auto list = [&](CLI::App* sub, const char* name, std::vector<double>& target, const char* help) {
        lists.push_back({"", &target});
        sub->add_option(name, lists.back().raw, help);
    };
    lists.reserve(16);

    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues, Weyl fit and gaps");
    spectrum->add_option("--m", m_flag, "monomial exponent, V = x^{2m}");
    spectrum->add_option("--potential", c.potential, "monomial:m or shifted:C,c");
    spectrum->add_option("--K", c.K, "number of eigenpairs");
    spectrum->add_option("--accuracy", accuracy_flag, "relative eigenvalue accuracy");
    common(spectrum);

    auto* setmass = app.add_subcommand("setmass", "eigenfunction mass on a set");
    setmass->add_option("--m", m_flag, "monomial exponent");
    setmass->add_option("--set", c.set, "halfline:a bounded:R periodic:x0 dyadic:c,p polygap:eps intervals:a:b,.. file:path");
    setmass->add_option("--K", c.K, "number of eigenpairs");
    setmass->add_option("--accuracy", accuracy_flag, "relative eigenvalue accuracy");
    setmass->add_option("--horizon", horizon_flag, "half-width of the materialized set");
    setmass->add_option("--decompose", c.decompose, "split e_k by region for this k");
    common(setmass);

    auto* wkb = app.add_subcommand("wkb", "WKB amplitudes and profiles");
    wkb->add_option("--m", m_flag, "monomial exponent");
    list(wkb, "--k", c.k_list, "modes, e.g. 10..40:10");
    wkb->add_option("--accuracy", accuracy_flag, "relative eigenvalue accuracy");
    common(wkb);

    auto* mintime = app.add_subcommand("mintime", "observation quotient for coherent packets");
    mintime->add_option("--set", c.set, "observation set");
    list(mintime, "--T", c.T_list, "horizons, pi expressions allowed");
    list(mintime, "--k", c.k_list, "packet wavenumbers");
    mintime->add_option("--dt", dt_flag, "time step");
    mintime->add_option("--horizon", horizon_flag, "half-width of the materialized set");
    common(mintime);

    auto* resolvent = app.add_subcommand("resolvent", "resolvent inequality margins");
    resolvent->add_option("--set", c.set, "observation set");
    list(resolvent, "--lambda", c.lambdas, "spectral parameters");
    list(resolvent, "--M", c.M_list, "M candidates");
    list(resolvent, "--mw", c.mw_list, "m_w candidates");
    resolvent->add_option("--X", X_flag, "periodic box half-width");
    resolvent->add_option("--step", h_flag, "grid step");
    resolvent->add_option("--potential", c.potential, "used with --with-potential");
    bool with_potential = false;
    resolvent->add_flag("--with-potential", with_potential, "probe -d^2/dx^2 + V instead of the free operator");
    resolvent->add_option("--seed", c.seed, "Lanczos start vector seed");
    common(resolvent);

    auto* twotime = app.add_subcommand("twotime", "mass quotient between two times");
    twotime->add_option("--S", S_flag, "first time");
    twotime->add_option("--T", T_flag, "second time");
    twotime->add_option("--set", c.set, "set at time S");
    twotime->add_option("--set2", c.set2, "set at time T (default: same)");
    twotime->add_option("--state", c.state, "gaussian:x0 bump:c,r coherent:k");
    twotime->add_option("--modes", c.modes, "Hermite modes");
    twotime->add_option("--X", X_flag, "grid half-width");
    twotime->add_option("--step", h_flag, "grid step");
    common(twotime);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!replay.empty()) {
            std::ifstream f(replay);
            if (!f) throw Error(ErrorKind::precondition, "cannot open " + replay);
            std::stringstream ss;
            ss << f.rdbuf();
            Json j;
            try {
                j = Json::parse(ss.str());
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorKind::precondition, std::string("bad config: ") + e.what());
            }
            c = config_from_json(j);
        } else {
            CLI::App* chosen = nullptr;
            for (auto* s : app.get_subcommands()) chosen = s;
            if (!chosen) {
                std::cerr << app.help();
                return 2;
            }
            c.command = chosen->get_name();
            if (!m_flag.empty()) c.potential = "monomial:" + m_flag;
            if (!accuracy_flag.empty()) c.accuracy = parse_number(accuracy_flag);
            if (!horizon_flag.empty()) c.horizon = parse_number(horizon_flag);
            if (!X_flag.empty()) c.X = parse_number(X_flag);
            if (!h_flag.empty()) c.h = parse_number(h_flag);
            if (!S_flag.empty()) c.S = parse_number(S_flag);
            if (!T_flag.empty()) c.T = parse_number(T_flag);
            if (!dt_flag.empty()) c.dt = parse_number(dt_flag);
            for (const auto& l : lists)
                if (!l.raw.empty()) *l.target = parse_list(l.raw);
            c.free_operator = !with_potential;
            if (c.command == "twotime" && X_flag.empty()) c.X = 40;
            if (c.command == "twotime" && h_flag.empty()) c.h = 0.01;
        }
        if (!out_dir.empty()) {
            c.out_dir = out_dir;
        } else if (const char* env = std::getenv("OBSLAB_OUT")) {
            c.out_dir = env;
        }
        const auto start = std::chrono::steady_clock::now();
        auto doc = run_command(c);
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const auto path = write_report(std::move(doc), c, no_clock ? -1.0 : elapsed);
        std::printf("%s\n", path.string().c_str());
        return 0;
    } catch (const Error& e) {
        std::fprintf(stderr, "obslab: %s\n", e.what());
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "obslab: %s\n", e.what());
        return 2;
    }
}
