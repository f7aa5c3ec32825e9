#pragma once

#include <string>

#include "rmt/diagnostics.hpp"
#include "rmt/initial_data.hpp"
#include "rmt/mesh.hpp"
#include "rmt/params.hpp"

namespace rmt {

struct RunConfig {
    GeometryKind geometry = GeometryKind::Disk;
    double radius = 1.0;
    double lx = 1.0, ly = 1.0;
    double h_target = 0.1;
    RawParams raw_params;
    InitialPreset ic;
    double dt = -1.0;  // negative: resolve via default_dt ("auto")
    double t_end = 1.0;
    ThermalBC thermal_bc = ThermalBC::Neumann;
    LyapunovConfig lyapunov;
    std::string output_dir = ".";
    double solver_tol = 1e-10;
};

/// Parse a config file; throws ConfigError naming the offending field.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

/// Serialization used for config_echo.json; round-trips through the parser.
std::string config_to_json(const RunConfig& cfg);

Mesh build_mesh(const RunConfig& cfg);
Mesh build_mesh_at(const RunConfig& cfg, double h_target);

/// Subcommand drivers. Return process exit codes: 0 success, 2 config
/// error, 3 solver failure. Reports land in out_dir; a JSON summary is
/// also printed to stdout for eigen/bogovskii/decay-fit.
int run_simulate(const RunConfig& cfg, const std::string& out_dir);
int run_eigen(const RunConfig& cfg, const std::string& mode, const std::string& out_dir);
int run_bogovskii(const RunConfig& cfg, const std::string& out_dir);
int run_decay_fit(const std::string& csv_path, double t_start);

/// RMT_LOG=quiet|info|debug; messages go to stderr only.
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

} // namespace rmt
