#pragma once

#include "obslab/error.hpp"
#include "obslab/report.hpp"

#include <string>
#include <vector>

namespace obslab {

constexpr int report_schema_version = 1;
constexpr const char* artifact_version = "1.0.0";

// Everything a command reads. Stored next to each report so a run can be replayed.
struct RunConfig {
    std::string command;
    std::string potential = "monomial:1";
    std::string set = "halfline:0";
    std::string set2;  // twotime: observation set at time T (defaults to set)
    int K = 40;
    double accuracy = 1e-6;
    double horizon = 100;
    std::vector<double> k_list;  // wkb modes, mintime wavenumbers
    std::vector<double> T_list;  // mintime horizons
    std::vector<double> lambdas;
    std::vector<double> M_list{1e-3, 1e-2, 1e-1};
    std::vector<double> mw_list{1, 3, 10, 30};
    double X = 40;  // resolvent probe / dynamics grid half-width
    double h = 0.05;
    bool free_operator = true;  // resolvent: -d^2/dx^2 or -d^2/dx^2 + V
    double S = 0;
    double T = 0;
    std::string state = "gaussian:2";  // twotime initial data
    int modes = 1200;
    double dt = 0.01;
    int decompose = 0;  // setmass: also split e_k for this k
    unsigned seed = 7;
    std::string out_dir;
};

Json to_json(const RunConfig& c);
RunConfig config_from_json(const Json& j);

struct Artifact {
    std::string name;  // file name inside the output directory
    std::string content;
};

struct ReportDocument {
    Json body;  // schema_version, artifact_version, command, config, results, artifacts
    std::vector<Artifact> files;
};

ReportDocument cmd_spectrum(const RunConfig& c);
ReportDocument cmd_setmass(const RunConfig& c);
ReportDocument cmd_wkb(const RunConfig& c);
ReportDocument cmd_mintime(const RunConfig& c);
ReportDocument cmd_resolvent(const RunConfig& c);
ReportDocument cmd_twotime(const RunConfig& c);

ReportDocument run_command(const RunConfig& c);

// Writes <command>.json, <command>.config.json and the CSV artifacts; returns the report path.
// wall_clock < 0 leaves the timing field out so replays are byte-identical.
std::filesystem::path write_report(ReportDocument doc, const RunConfig& c, double wall_clock);

// exit code contract: 0 ok, 2 precondition, 3 numeric failure
int exit_code_for(ErrorKind kind);

}  // namespace obslab
