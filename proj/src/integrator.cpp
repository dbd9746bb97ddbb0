#include "integrator.hpp"

#include <cmath>

#include "maxwellian.hpp"

namespace vpl {

std::vector<double> charge_density(const PhaseGrid& g, const DistState& f) {
    std::vector<double> rho(g.n_cells(), 0.0);
    const int n = g.n_nodes();
    std::vector<double> smu(n);
    for (int k = 0; k < n; ++k) smu[k] = sqrt_maxwellian(g.vgrid.node(k));
    const double wt = g.vgrid.quadrature_weight();
#pragma omp parallel for schedule(static)
    for (int c = 0; c < g.n_cells(); ++c) {
        auto fp = f.species_cell(g, 0, c);
        auto fm = f.species_cell(g, 1, c);
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += (fp[k] - fm[k]) * smu[k];
        rho[c] = s * wt;
    }
    return rho;
}

Integrator::Integrator(const PhaseGrid& grid, const CollisionTables& tables)
    : grid_(&grid), tables_(&tables), poisson_(grid.domain), ghosts_(build_ghost_layer(grid)) {}

FieldState Integrator::solve_field(const DistState& f) const {
    return poisson_.solve(charge_density(*grid_, f));
}

int Integrator::solve_implicit_cell(double dt, std::span<const double> bp,
                                    std::span<const double> bm, std::span<double> xp,
                                    std::span<double> xm) const {
    const int n = grid_->n_nodes();
    double nb2 = 0.0;
    for (int k = 0; k < n; ++k) nb2 += bp[k] * bp[k] + bm[k] * bm[k];
    if (nb2 == 0.0) {
        std::fill(xp.begin(), xp.end(), 0.0);
        std::fill(xm.begin(), xm.end(), 0.0);
        return 0;
    }

    // residual from the warm start in x
    std::vector<double> ap(n), am(n), rp(n), rm(n), pp(n), pm(n);
    apply_A(*tables_, xp, xm, ap, am);
    for (int k = 0; k < n; ++k) {
        rp[k] = bp[k] - (xp[k] + dt * ap[k]);
        rm[k] = bm[k] - (xm[k] + dt * am[k]);
    }
    std::copy(rp.begin(), rp.end(), pp.begin());
    std::copy(rm.begin(), rm.end(), pm.begin());
    double rr = 0.0;
    for (int k = 0; k < n; ++k) rr += rp[k] * rp[k] + rm[k] * rm[k];
    const double tol2 = cg_tol * cg_tol * nb2;

    int it = 0;
    for (; it < cg_max_iter && rr > tol2; ++it) {
        apply_A(*tables_, pp, pm, ap, am);
        for (int k = 0; k < n; ++k) {
            ap[k] = pp[k] + dt * ap[k];
            am[k] = pm[k] + dt * am[k];
        }
        double pap = 0.0;
        for (int k = 0; k < n; ++k) pap += pp[k] * ap[k] + pm[k] * am[k];
        double alpha = rr / pap;
        for (int k = 0; k < n; ++k) {
            xp[k] += alpha * pp[k];
            xm[k] += alpha * pm[k];
            rp[k] -= alpha * ap[k];
            rm[k] -= alpha * am[k];
        }
        double rr_new = 0.0;
        for (int k = 0; k < n; ++k) rr_new += rp[k] * rp[k] + rm[k] * rm[k];
        double beta = rr_new / rr;
        rr = rr_new;
        for (int k = 0; k < n; ++k) {
            pp[k] = rp[k] + beta * pp[k];
            pm[k] = rm[k] + beta * pm[k];
        }
    }
    if (rr > tol2)
        throw StepError("implicit collision solve: CG stagnated, residual " +
                        std::to_string(std::sqrt(rr / nb2)));
    return it;
}

StepStats Integrator::step(DistState& f, FieldState& field, const StepConfig& cfg) const {
    const PhaseGrid& g = *grid_;
    const int n = g.n_nodes();
    const double dt = cfg.dt;
    StepStats stats;

    // transport of the old state, fixed across the Picard loop
    DistState expl_fixed(g);
    if (cfg.streaming) streaming_rhs(g, ghosts_, f, expl_fixed);

    if (cfg.scheme == Scheme::fully_explicit) {
        DistState rhs(expl_fixed);
        if (!cfg.linear) field_terms_rhs(g, f, field, rhs);
        source_rhs(g, field, rhs);
#pragma omp parallel for schedule(static)
        for (int c = 0; c < g.n_cells(); ++c) {
            std::vector<double> lp(n), lm(n), gp(n), gm(n);
            auto fp = f.species_cell(g, 0, c), fm = f.species_cell(g, 1, c);
            auto rp = rhs.species_cell(g, 0, c), rm = rhs.species_cell(g, 1, c);
            apply_L(*tables_, fp, fm, lp, lm);
            if (!cfg.linear) {
                apply_Gamma(*tables_, fp, fm, fp, fm, gp, gm);
                for (int k = 0; k < n; ++k) {
                    rp[k] += lp[k] + gp[k];
                    rm[k] += lm[k] + gm[k];
                }
            } else {
                for (int k = 0; k < n; ++k) {
                    rp[k] += lp[k];
                    rm[k] += lm[k];
                }
            }
        }
        f.axpy(dt, rhs);
        f.time += dt;
        field = solve_field(f);
        stats.picard_iters = 1;
        return stats;
    }

    DistState f_new(f);          // Picard iterate, warm start at f^n
    FieldState field_k = field;
    double ref_norm = 0.0;
    for (double x : f.data) ref_norm += x * x;
    ref_norm = std::sqrt(ref_norm);

    for (int it = 0; it < cfg.picard_max; ++it) {
        // explicit pieces at the current iterate
        DistState rhs(expl_fixed);
        if (!cfg.linear) field_terms_rhs(g, f_new, field_k, rhs);
        source_rhs(g, field_k, rhs);

        DistState f_next(g, f.time + dt);
        int cg_max = 0;
        double diff2 = 0.0, new_norm2 = 0.0;
        std::string cell_error;
#pragma omp parallel for schedule(dynamic) \
    reduction(max : cg_max) reduction(+ : diff2, new_norm2)
        for (int c = 0; c < g.n_cells(); ++c) {
            try {
                std::vector<double> kp(n), km(n), gp(n), gm(n);
                auto fkp = f_new.species_cell(g, 0, c), fkm = f_new.species_cell(g, 1, c);
                auto rp = rhs.species_cell(g, 0, c), rm = rhs.species_cell(g, 1, c);
                apply_K(*tables_, fkp, fkm, kp, km);
                if (!cfg.linear) {
                    apply_Gamma(*tables_, fkp, fkm, fkp, fkm, gp, gm);
                    for (int k = 0; k < n; ++k) {
                        kp[k] += gp[k];
                        km[k] += gm[k];
                    }
                }
                auto f0p = f.species_cell(g, 0, c), f0m = f.species_cell(g, 1, c);
                std::vector<double> bp(n), bm(n);
                for (int k = 0; k < n; ++k) {
                    bp[k] = f0p[k] + dt * (rp[k] + kp[k]);
                    bm[k] = f0m[k] + dt * (rm[k] + km[k]);
                }
                auto xp = f_next.species_cell(g, 0, c), xm = f_next.species_cell(g, 1, c);
                std::copy(fkp.begin(), fkp.end(), xp.begin());
                std::copy(fkm.begin(), fkm.end(), xm.begin());
                int cg = solve_implicit_cell(dt, bp, bm, xp, xm);
                cg_max = std::max(cg_max, cg);
                for (int k = 0; k < n; ++k) {
                    double dp = xp[k] - fkp[k], dm = xm[k] - fkm[k];
                    diff2 += dp * dp + dm * dm;
                    new_norm2 += xp[k] * xp[k] + xm[k] * xm[k];
                }
            } catch (const std::exception& e) {
#pragma omp critical
                cell_error = e.what();
            }
        }
        if (!cell_error.empty()) throw StepError(cell_error);
        stats.cg_iters_max = std::max(stats.cg_iters_max, cg_max);
        stats.picard_iters = it + 1;
        double ref = std::max({ref_norm, std::sqrt(new_norm2), 1e-300});
        stats.picard_residual = std::sqrt(diff2) / ref;

        f_new = std::move(f_next);
        field_k = solve_field(f_new);

        if (stats.picard_residual <= cfg.picard_tol) break;
        if (it == cfg.picard_max - 1)
            throw StepError("picard iteration: no convergence, residual " +
                            std::to_string(stats.picard_residual) + " after " +
                            std::to_string(cfg.picard_max) + " iterations");
    }

    f = std::move(f_new);
    f.time += dt;
    field = std::move(field_k);
    return stats;
}

void Integrator::run(DistState& f, FieldState& field, const StepConfig& cfg, int cadence,
                     const std::function<void(int, const DistState&, const FieldState&)>& hook)
    const {
    // the run begins by solving the field from the initial moments
    field = solve_field(f);
    if (hook) hook(0, f, field);
    if (cfg.t_end <= 0.0) return;
    int n_steps = static_cast<int>(std::ceil(cfg.t_end / cfg.dt - 1e-12));
    for (int s = 1; s <= n_steps; ++s) {
        step(f, field, cfg);
        if (hook && (s % std::max(1, cadence) == 0 || s == n_steps)) hook(s, f, field);
    }
}

}  // namespace vpl
