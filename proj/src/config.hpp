/*
 * Flat key = value run configuration with validation.
 */
#pragma once

#include <string>

#include "integrator.hpp"

namespace vpl {

struct RunConfig {
    // domain
    std::vector<Box> boxes{Box{}};
    double h_x = 1.0 / 32.0;
    int active_dims = 1;
    // velocity grid
    int n_v = 16;
    double v_max = 6.0;
    // physics
    double gamma = 0.0;
    double l_weight = -1.0;  // < 0: default to 3 q(gamma)
    double nu = 0.05;
    double eps = 0.1;
    double R = -1.0;  // < 0: default to 0.6 v_max
    // stepping
    double dt = -1.0;  // < 0: default to 0.45 h_x / v_max
    double t_end = 1.0;
    double picard_tol = 1e-9;
    int picard_max = 10;
    Scheme scheme = Scheme::imex_ak;
    bool streaming = true;
    bool linear = false;
    // diagnostics
    int diag_order = 1;
    int cadence = 5;
    double fit_t0 = 0.2, fit_t1 = 2.0;
    FitMode fit_mode = FitMode::fixed_p;
    double x_delta = 0.0, x_p = 1.0;  // parameters of the X(t) tracker
    // output
    std::string out_dir = "out";
    std::vector<double> snapshot_times;
    std::uint64_t seed = 12345;

    PotentialParams potential() const { return PotentialParams{gamma}; }
    double effective_l() const { return l_weight >= 0.0 ? l_weight : 3.0 * potential().weight_q(); }
    double effective_R() const { return R >= 0.0 ? R : 0.6 * v_max; }
    double effective_dt() const { return dt > 0.0 ? dt : 0.45 * h_x / v_max; }
    SplitParams split() const { return SplitParams{eps, effective_R()}; }
    StepConfig step_config() const {
        return StepConfig{effective_dt(), t_end, picard_tol, picard_max, scheme, streaming,
                          linear};
    }
};

// Parses the flat key = value text ('#' comments); unknown keys, type
// mismatches and constraint violations raise ConfigError with the line.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

// canonical serialization; parse(serialize(c)) == c
std::string serialize_config(const RunConfig& cfg);

PhaseGrid build_phase_grid(const RunConfig& cfg);

}  // namespace vpl
