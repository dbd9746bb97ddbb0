/*
 * Non-collisional terms: upwind free streaming with specular-reflection
 * ghost closure, the electric-field terms, and the field source.
 *
 * Ghost values are exact grid reflections, g(x_ghost, v) = f(x_mirror, R v),
 * so the wall flux of any even-in-v_n moment cancels node by node.  The
 * field terms are applied in the conjugated flux form
 *   -/+ mu^{-1/2} div_v ( E  mu^{1/2} f_pm )
 * with a face-averaged velocity divergence whose boundary fluxes vanish;
 * the species mass moment is then conserved to roundoff for any state.
 */
#pragma once

#include "field.hpp"
#include "state.hpp"

namespace vpl {

struct GhostLayer {
    // per boundary face: mirror cell (= adjacent interior cell for the
    // single-ghost first-order closure)
    std::vector<int> mirror_cell;
    // per axis: node reflection index map v -> R_axis v
    std::array<std::vector<int>, 3> reflect_map;
};

GhostLayer build_ghost_layer(const PhaseGrid& g);

// out += -v . grad_x f (first-order upwind per axis, specular ghosts)
void streaming_rhs(const PhaseGrid& g, const GhostLayer& ghosts, const DistState& f,
                   DistState& out);

// out += -/+ mu^{-1/2} div_v (E mu^{1/2} f_pm)   (sign: -, + for species +, -)
void field_terms_rhs(const PhaseGrid& g, const DistState& f, const FieldState& field,
                     DistState& out);

// out += +/- E . v mu^{1/2}   (sign: +, - for species +, -)
void source_rhs(const PhaseGrid& g, const FieldState& field, DistState& out);

// upwind mass flux of species s through one boundary face,
// integral of (v . n) f over the velocity grid with ghost closure
double wall_mass_flux(const PhaseGrid& g, const GhostLayer& ghosts, const DistState& f,
                      const BoundaryFace& face, int species);

}  // namespace vpl
