/*
 * Time advance: IMEX step with explicit transport / field / source / K /
 * Gamma and an implicit backward-Euler solve of the dissipative part A,
 * wrapped in a per-step fixed-point (Picard) iteration that re-solves the
 * Poisson problem from the updated charge moments each pass.  At
 * convergence the step is backward Euler in all collision and field terms
 * with transport frozen at the old state.
 */
#pragma once

#include <functional>

#include "field.hpp"
#include "landau.hpp"
#include "transport.hpp"

namespace vpl {

struct StepError : std::runtime_error {
    explicit StepError(const std::string& what) : std::runtime_error(what) {}
};

enum class Scheme { imex_ak, fully_explicit };

struct StepConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    double picard_tol = 1e-9;
    int picard_max = 10;
    Scheme scheme = Scheme::imex_ak;
    bool streaming = true;    // disable for space-homogeneous studies
    bool linear = false;      // drop Gamma and the quadratic field terms
};

struct StepStats {
    int picard_iters = 0;
    double picard_residual = 0.0;
    int cg_iters_max = 0;
};

// raw charge moment per cell: integral (f_+ - f_-) mu^{1/2} dv
std::vector<double> charge_density(const PhaseGrid& g, const DistState& f);

class Integrator {
  public:
    Integrator(const PhaseGrid& grid, const CollisionTables& tables);

    StepStats step(DistState& f, FieldState& field, const StepConfig& cfg) const;

    // hook(step_index, f, field) is called at step 0 and then every
    // `cadence` steps plus at the final step
    void run(DistState& f, FieldState& field, const StepConfig& cfg, int cadence,
             const std::function<void(int, const DistState&, const FieldState&)>& hook) const;

    FieldState solve_field(const DistState& f) const;

    double cg_tol = 1e-12;
    int cg_max_iter = 400;

  private:
    const PhaseGrid* grid_;
    const CollisionTables* tables_;
    PoissonSolver poisson_;
    GhostLayer ghosts_;

    // per-cell CG solve of (I + dt A) x = b for the species pair
    int solve_implicit_cell(double dt, std::span<const double> bp, std::span<const double> bm,
                            std::span<double> xp, std::span<double> xm) const;
};

}  // namespace vpl
