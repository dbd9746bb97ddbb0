/*
 * Self-consistent electrostatic field: -Lap phi = rho with homogeneous
 * Neumann walls and zero-mean normalization, E = -grad phi.
 *
 * Conjugate gradient on the (symmetric, null-space-deflated) Neumann
 * Laplacian; the constant mode is projected out of the right-hand side and
 * of every iterate.  Right-hand sides whose mean exceeds 1e-8 |rho| are
 * rejected as a solvability violation (the continuum guarantees charge
 * neutrality; larger means indicate an upstream bug).
 */
#pragma once

#include "state.hpp"

namespace vpl {

struct SolveError : std::runtime_error {
    explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

class PoissonSolver {
  public:
    explicit PoissonSolver(const SpatialDomain& dom) : dom_(&dom) {}

    // rho per cell; throws SolveError on incompatible mean or stagnation
    FieldState solve(const std::vector<double>& rho) const;

    // Neumann five/seven-point Laplacian (missing neighbors mirror evenly)
    void apply_laplacian(const std::vector<double>& phi, std::vector<double>& out) const;

    double rel_tolerance = 1e-10;

  private:
    const SpatialDomain* dom_;
};

// E = -grad phi by centered differences with even mirror ghosts at walls
void electric_field(const SpatialDomain& dom, const std::vector<double>& phi, FieldState& out);

double field_energy(const SpatialDomain& dom, const FieldState& f);

}  // namespace vpl
