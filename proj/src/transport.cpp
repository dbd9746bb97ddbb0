#include "transport.hpp"

#include <cmath>

#include "maxwellian.hpp"

namespace vpl {

GhostLayer build_ghost_layer(const PhaseGrid& g) {
    GhostLayer gl;
    gl.mirror_cell.resize(g.domain.faces.size());
    for (std::size_t i = 0; i < g.domain.faces.size(); ++i)
        gl.mirror_cell[i] = g.domain.faces[i].cell;
    for (int ax = 0; ax < 3; ++ax) {
        gl.reflect_map[ax].resize(g.n_nodes());
        for (int k = 0; k < g.n_nodes(); ++k)
            gl.reflect_map[ax][k] = g.vgrid.reflect_index(k, ax);
    }
    return gl;
}

void streaming_rhs(const PhaseGrid& g, const GhostLayer& ghosts, const DistState& f,
                   DistState& out) {
    const int n = g.n_nodes();
    const int nv = g.vgrid.n_v;
    const double ihx = 1.0 / g.domain.h_x;

#pragma omp parallel for collapse(2) schedule(static)
    for (int s = 0; s < 2; ++s)
        for (int c = 0; c < g.n_cells(); ++c) {
            auto fc = f.species_cell(g, s, c);
            auto oc = out.species_cell(g, s, c);
            for (int ax = 0; ax < g.domain.active_dims; ++ax) {
                int lo = g.domain.neighbor(c, ax, 0), hi = g.domain.neighbor(c, ax, 1);
                auto fl = f.species_cell(g, s, lo >= 0 ? lo : c);
                auto fh = f.species_cell(g, s, hi >= 0 ? hi : c);
                const int* refl = ghosts.reflect_map[ax].data();
                for (int k = 0; k < n; ++k) {
                    int kd = ax == 0 ? k / (nv * nv) : (ax == 1 ? (k / nv) % nv : k % nv);
                    double vd = g.vgrid.coords[kd];
                    // upwind face fluxes; ghosts carry the reflected node
                    double f_up_hi = vd > 0.0 ? fc[k] : (hi >= 0 ? fh[k] : fc[refl[k]]);
                    double f_up_lo = vd > 0.0 ? (lo >= 0 ? fl[k] : fc[refl[k]]) : fc[k];
                    oc[k] -= vd * (f_up_hi - f_up_lo) * ihx;
                }
            }
        }
}

namespace {

// face-averaged divergence along a velocity axis with zero boundary fluxes:
// out_k = (Xhat_{k+1/2} - Xhat_{k-1/2}) / h, Xhat = midpoint average
void dtilde(const VelocityGrid& g, int axis, std::span<const double> in, std::span<double> out) {
    const int n = g.n_v;
    const double ih2 = 0.5 / g.h_v;
    const int stride = axis == 0 ? n * n : (axis == 1 ? n : 1);
    for (int a = 0; a < n * n; ++a) {
        int base;
        if (axis == 0) base = a;
        else if (axis == 1) base = (a / n) * n * n + a % n;
        else base = a * n;
        const double* p = in.data() + base;
        double* q = out.data() + base;
        q[0] = (p[stride] + p[0]) * ih2;
        for (int k = 1; k < n - 1; ++k)
            q[k * stride] = (p[(k + 1) * stride] - p[(k - 1) * stride]) * ih2;
        q[(n - 1) * stride] = -(p[(n - 1) * stride] + p[(n - 2) * stride]) * ih2;
    }
}

}  // namespace

void field_terms_rhs(const PhaseGrid& g, const DistState& f, const FieldState& field,
                     DistState& out) {
    const int n = g.n_nodes();
#pragma omp parallel for collapse(2) schedule(static)
    for (int s = 0; s < 2; ++s)
        for (int c = 0; c < g.n_cells(); ++c) {
            double sign = s == 0 ? -1.0 : 1.0;
            auto fc = f.species_cell(g, s, c);
            auto oc = out.species_cell(g, s, c);
            std::vector<double> flux(n), div(n);
            for (int ax = 0; ax < 3; ++ax) {
                double e_ax = field.e[ax][c];
                if (e_ax == 0.0) continue;
                for (int k = 0; k < n; ++k)
                    flux[k] = e_ax * sqrt_maxwellian(g.vgrid.node(k)) * fc[k];
                dtilde(g.vgrid, ax, flux, div);
                for (int k = 0; k < n; ++k)
                    oc[k] += sign * div[k] / sqrt_maxwellian(g.vgrid.node(k));
            }
        }
}

void source_rhs(const PhaseGrid& g, const FieldState& field, DistState& out) {
    const int n = g.n_nodes();
#pragma omp parallel for schedule(static)
    for (int c = 0; c < g.n_cells(); ++c) {
        auto op = out.species_cell(g, 0, c);
        auto om = out.species_cell(g, 1, c);
        for (int k = 0; k < n; ++k) {
            Vec3 v = g.vgrid.node(k);
            double ev = field.e[0][c] * v[0] + field.e[1][c] * v[1] + field.e[2][c] * v[2];
            double src = ev * sqrt_maxwellian(v);
            op[k] += src;
            om[k] -= src;
        }
    }
}

double wall_mass_flux(const PhaseGrid& g, const GhostLayer& ghosts, const DistState& f,
                      const BoundaryFace& face, int species) {
    const int nv = g.vgrid.n_v;
    auto fc = f.species_cell(g, species, face.cell);
    const int* refl = ghosts.reflect_map[face.axis].data();
    double s = 0.0;
    for (int k = 0; k < g.n_nodes(); ++k) {
        int kd = face.axis == 0 ? k / (nv * nv) : (face.axis == 1 ? (k / nv) % nv : k % nv);
        double vn = g.vgrid.coords[kd] * face.sign;
        double f_up = vn > 0.0 ? fc[k] : fc[refl[k]];  // outgoing interior, incoming ghost
        s += vn * f_up;
    }
    return s * g.vgrid.quadrature_weight();
}

}  // namespace vpl
