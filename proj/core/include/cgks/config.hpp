#pragma once

#include <string>

namespace cgks {

// Flat run parameters shared by the command line and config files. Every key
// is spelled exactly like the struct comment says; unknown keys are rejected.
struct RunConfig {
    std::string case_name = "advection";  // key "case": advection | tgv
    int mesh_n = 20;                      // cells per axis
    std::string mode = "linear";          // reconstruction blend: linear | nonlinear
    double ma = 0.1;                      // vortex Mach number
    double re = 1600.0;                   // vortex Reynolds number
    double prandtl = 0.7;
    double gamma = 1.4;
    double cfl = 0.5;
    double t_final = -1.0;                // < 0 uses the case default
    double distortion = 0.0;              // mesh distortion amplitude
    int workers = 0;                      // 0: CGKS_WORKERS env or 1
    std::string out_dir = "out";
    int snapshots = 10;                   // evenly spaced field dumps, 0 = none
    int diag_every = 1;                   // diagnostics row every k steps
    double geno_sharpness = 4.0;          // key "geno.sharpness"
    double geno_epsilon = 1e-15;          // key "geno.epsilon"
    double geno_r = 2.0;                  // key "geno.r"
};

// Applies "key = value"; throws std::invalid_argument on unknown keys or
// unparsable values.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

// Reads a flat "key = value" file ('#' starts a comment). Missing file throws.
void load_config_file(RunConfig& cfg, const std::string& path);

// Full key = value listing, stable order, value formatting that round-trips.
std::string serialize_config(const RunConfig& cfg);

// Post-parse checks (positive sizes, known case and mode names, ...).
void validate_config(const RunConfig& cfg);

}  // namespace cgks
