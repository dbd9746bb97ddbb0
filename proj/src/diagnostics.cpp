#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace vpl {

namespace {

// x-derivative of a phase-space state along an active axis, centered with
// specular-reflection ghosts (mirror cell carries the reflected node)
void dx_dist(const PhaseGrid& g, const GhostLayer& ghosts, int axis, const DistState& in,
             DistState& out) {
    const int n = g.n_nodes();
    const double ih2 = 0.5 / g.domain.h_x;
    for (int s = 0; s < 2; ++s)
        for (int c = 0; c < g.n_cells(); ++c) {
            int lo = g.domain.neighbor(c, axis, 0), hi = g.domain.neighbor(c, axis, 1);
            auto fc = in.species_cell(g, s, c);
            auto fl = in.species_cell(g, s, lo >= 0 ? lo : c);
            auto fh = in.species_cell(g, s, hi >= 0 ? hi : c);
            auto oc = out.species_cell(g, s, c);
            const int* refl = ghosts.reflect_map[axis].data();
            for (int k = 0; k < n; ++k) {
                double vl = lo >= 0 ? fl[k] : fc[refl[k]];
                double vh = hi >= 0 ? fh[k] : fc[refl[k]];
                oc[k] = (vh - vl) * ih2;
            }
        }
}

// v-derivative per cell
void dv_dist(const PhaseGrid& g, int axis, const DistState& in, DistState& out) {
    for (int s = 0; s < 2; ++s)
        for (int c = 0; c < g.n_cells(); ++c)
            dbar(g.vgrid, axis, in.species_cell(g, s, c), out.species_cell(g, s, c));
}

// cell-field derivative: centered interior, one-sided toward the interior
// at walls
std::vector<double> dx_field(const PhaseGrid& g, int axis, const std::vector<double>& u) {
    std::vector<double> out(u.size(), 0.0);
    if (!g.domain.axis_active(axis)) return out;
    const double h = g.domain.h_x;
    for (int c = 0; c < g.n_cells(); ++c) {
        int lo = g.domain.neighbor(c, axis, 0), hi = g.domain.neighbor(c, axis, 1);
        if (lo >= 0 && hi >= 0)
            out[c] = (u[hi] - u[lo]) * 0.5 / h;
        else if (hi >= 0)
            out[c] = (u[hi] - u[c]) / h;
        else if (lo >= 0)
            out[c] = (u[c] - u[lo]) / h;
    }
    return out;
}

double l2x(const PhaseGrid& g, const std::vector<double>& u) {
    double s = 0.0;
    for (double x : u) s += x * x;
    return std::sqrt(s * g.domain.cell_volume);
}

// multi-indices over `dims` axes with |alpha| <= max_order
std::vector<std::array<int, 3>> multi_indices(int dims, int max_order) {
    std::vector<std::array<int, 3>> out;
    for (int a1 = 0; a1 <= max_order; ++a1)
        for (int a2 = 0; a2 <= (dims > 1 ? max_order - a1 : 0); ++a2)
            for (int a3 = 0; a3 <= (dims > 2 ? max_order - a1 - a2 : 0); ++a3) {
                if (a1 + a2 + a3 > max_order) continue;
                if (dims < 2 && a2 > 0) continue;
                if (dims < 3 && a3 > 0) continue;
                out.push_back({a1, a2, a3});
            }
    return out;
}

}  // namespace

Conserved conserved_quantities(const PhaseGrid& g, const DistState& f, const FieldState& field) {
    Conserved out;
    const int n = g.n_nodes();
    std::vector<double> smu(n), v2(n);
    for (int k = 0; k < n; ++k) {
        Vec3 v = g.vgrid.node(k);
        smu[k] = sqrt_maxwellian(v);
        v2[k] = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    }
    const double wt = g.vgrid.quadrature_weight();
    double mp = 0.0, mm = 0.0, en = 0.0;
    for (int c = 0; c < g.n_cells(); ++c) {
        auto fp = f.species_cell(g, 0, c), fm = f.species_cell(g, 1, c);
        for (int k = 0; k < n; ++k) {
            mp += fp[k] * smu[k];
            mm += fm[k] * smu[k];
            en += (fp[k] + fm[k]) * v2[k] * smu[k];
        }
    }
    out.mass_plus = mp * wt * g.domain.cell_volume;
    out.mass_minus = mm * wt * g.domain.cell_volume;
    out.total_energy = en * wt * g.domain.cell_volume + field_energy(g.domain, field);
    return out;
}

double min_distribution(const PhaseGrid& g, const DistState& f) {
    const int n = g.n_nodes();
    std::vector<double> mu(n), smu(n);
    for (int k = 0; k < n; ++k) {
        Vec3 v = g.vgrid.node(k);
        mu[k] = maxwellian(v);
        smu[k] = sqrt_maxwellian(v);
    }
    double m = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 2; ++s)
        for (int c = 0; c < g.n_cells(); ++c) {
            auto fc = f.species_cell(g, s, c);
            for (int k = 0; k < n; ++k) m = std::min(m, mu[k] + smu[k] * fc[k]);
        }
    return m;
}

EnergyFunctional energy_functional(const PhaseGrid& g, const CollisionTables& tables,
                                   const DistState& f, const FieldState& field, double l,
                                   double nu, int diag_order) {
    EnergyFunctional out;
    GhostLayer ghosts = build_ghost_layer(g);
    const int n = g.n_nodes();
    const double wt = g.vgrid.quadrature_weight();

    auto alphas = multi_indices(g.domain.active_dims, diag_order);
    for (const auto& alpha : alphas) {
        int oa = alpha[0] + alpha[1] + alpha[2];
        // d^alpha f, then all beta with |alpha| + |beta| <= order
        DistState da(f);
        DistState scratch(g);
        for (int ax = 0; ax < 3; ++ax)
            for (int rep = 0; rep < alpha[ax]; ++rep) {
                dx_dist(g, ghosts, ax, da, scratch);
                std::swap(da.data, scratch.data);
            }
        auto betas = multi_indices(3, diag_order - oa);
        for (const auto& beta : betas) {
            int ob = beta[0] + beta[1] + beta[2];
            DistState dab(da);
            for (int ax = 0; ax < 3; ++ax)
                for (int rep = 0; rep < beta[ax]; ++rep) {
                    dv_dist(g, ax, dab, scratch);
                    std::swap(dab.data, scratch.data);
                }
            WeightSpec w{l, nu, oa, ob, tables.params};
            WeightSpec w0{l, 0.0, oa, ob, tables.params};
            std::vector<double> wsq(n), wsq0(n);
            for (int k = 0; k < n; ++k) {
                double ww = weight_eval(w, g.vgrid.node(k));
                double ww0 = weight_eval(w0, g.vgrid.node(k));
                wsq[k] = ww * ww;
                wsq0[k] = ww0 * ww0;
            }
            double acc = 0.0, acc0 = 0.0, accd = 0.0;
            for (int s = 0; s < 2; ++s)
                for (int c = 0; c < g.n_cells(); ++c) {
                    auto dc = dab.species_cell(g, s, c);
                    for (int k = 0; k < n; ++k) {
                        acc += wsq[k] * dc[k] * dc[k];
                        acc0 += wsq0[k] * dc[k] * dc[k];
                    }
                    accd += norm_D_sigma(tables, dc, w);
                }
            out.e_nu += acc * wt * g.domain.cell_volume;
            out.e_plain += acc0 * wt * g.domain.cell_volume;
            out.d_nu += accd * g.domain.cell_volume;
        }
        // field contribution once per alpha
        double facc = 0.0;
        for (int comp = 0; comp < 3; ++comp) {
            std::vector<double> de = field.e[comp];
            std::vector<double> tmp;
            for (int ax = 0; ax < 3; ++ax)
                for (int rep = 0; rep < alpha[ax]; ++rep) de = dx_field(g, ax, de);
            for (double x : de) facc += x * x;
        }
        out.e_nu += facc * g.domain.cell_volume;
        out.e_plain += facc * g.domain.cell_volume;
        out.d_nu += facc * g.domain.cell_volume;
    }
    return out;
}

DecayFit fit_decay(const std::vector<std::pair<double, double>>& series, FitMode mode,
                   double fixed_p, double window_t0, double window_t1) {
    std::vector<double> ts, ys;
    for (const auto& [t, e] : series) {
        if (t < window_t0 || t > window_t1) continue;
        if (e <= 0.0) throw FitError("decay fit: non-positive energy value at t = " +
                                     std::to_string(t));
        ts.push_back(t);
        ys.push_back(std::log(e));
    }
    if (ts.size() < 10) throw FitError("decay fit: fewer than 10 points in the fit window");

    auto linear_fit = [&](double p, double& delta, double& r2) {
        // least squares of log E = c0 - delta t^p
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double m = static_cast<double>(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            double x = std::pow(ts[i], p);
            sx += x;
            sy += ys[i];
            sxx += x * x;
            sxy += x * ys[i];
        }
        double denom = m * sxx - sx * sx;
        if (std::abs(denom) < 1e-300) throw FitError("decay fit: degenerate window");
        double slope = (m * sxy - sx * sy) / denom;
        double icept = (sy - slope * sx) / m;
        delta = -slope;
        double ss_res = 0, ss_tot = 0, mean_y = sy / m;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            double pred = icept + slope * std::pow(ts[i], p);
            ss_res += (ys[i] - pred) * (ys[i] - pred);
            ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
        }
        r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    };

    DecayFit fit;
    fit.window_t0 = ts.front();
    fit.window_t1 = ts.back();
    if (mode == FitMode::fixed_p) {
        fit.p_exponent = fixed_p;
        linear_fit(fixed_p, fit.delta, fit.r_squared);
        return fit;
    }
    // free p: coarse grid over (0, 1] then local refinement
    double best_p = 1.0, best_r2 = -std::numeric_limits<double>::infinity(), best_delta = 0.0;
    auto eval = [&](double p) {
        double d, r2;
        linear_fit(p, d, r2);
        if (r2 > best_r2) {
            best_r2 = r2;
            best_p = p;
            best_delta = d;
        }
    };
    for (double p = 0.05; p <= 1.0 + 1e-12; p += 0.01) eval(p);
    for (double p = std::max(0.01, best_p - 0.01); p <= std::min(1.0, best_p + 0.01) + 1e-12;
         p += 0.001)
        eval(p);
    fit.p_exponent = best_p;
    fit.delta = best_delta;
    fit.r_squared = best_r2;
    return fit;
}

ResidualReport fluid_residuals(const PhaseGrid& g, const CollisionTables& tables,
                               const Projector& proj, const DistState& f_old,
                               const DistState& f_new, const FieldState& field_new, double dt,
                               bool with_g_terms) {
    ResidualReport rep;
    const int n = g.n_nodes();
    const int nc = g.n_cells();
    const double wt = g.vgrid.quadrature_weight();
    GhostLayer ghosts = build_ghost_layer(g);

    DistState pf_old(g), pf_new(g);
    MomentSet m_old = proj.project(g, f_old, &pf_old);
    MomentSet m_new = proj.project(g, f_new, &pf_new);

    DistState micro_old(f_old), micro_new(f_new);
    micro_old.axpy(-1.0, pf_old);
    micro_new.axpy(-1.0, pf_new);

    // h = -v . grad_x {I-P} f + L f  at the new state
    DistState h_state(g);
    streaming_rhs(g, ghosts, micro_new, h_state);
    DistState l_state(g);
#pragma omp parallel for schedule(static)
    for (int c = 0; c < nc; ++c)
        apply_L(tables, f_new.species_cell(g, 0, c), f_new.species_cell(g, 1, c),
                l_state.species_cell(g, 0, c), l_state.species_cell(g, 1, c));
    h_state.axpy(1.0, l_state);

    // g = field terms + Gamma(f, f) at the new state (zero in linear runs)
    DistState g_state(g);
    if (with_g_terms) {
        field_terms_rhs(g, f_new, field_new, g_state);
        DistState gamma(g);
#pragma omp parallel for schedule(static)
        for (int c = 0; c < nc; ++c) {
            auto fp = f_new.species_cell(g, 0, c), fm = f_new.species_cell(g, 1, c);
            apply_Gamma(tables, fp, fm, fp, fm, gamma.species_cell(g, 0, c),
                        gamma.species_cell(g, 1, c));
        }
        g_state.axpy(1.0, gamma);
    }

    // velocity moment helpers per cell
    std::vector<double> smu(n), v2(n);
    std::array<std::vector<double>, 3> vco;
    for (int d = 0; d < 3; ++d) vco[d].resize(n);
    for (int k = 0; k < n; ++k) {
        Vec3 v = g.vgrid.node(k);
        smu[k] = sqrt_maxwellian(v);
        v2[k] = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        for (int d = 0; d < 3; ++d) vco[d][k] = v[d];
    }

    auto micro_sum = [&](const DistState& st, int c, std::vector<double>& buf) {
        auto p = st.species_cell(g, 0, c), m = st.species_cell(g, 1, c);
        for (int k = 0; k < n; ++k) buf[k] = p[k] + m[k];
    };
    auto micro_diff = [&](const DistState& st, int c, std::vector<double>& buf) {
        auto p = st.species_cell(g, 0, c), m = st.species_cell(g, 1, c);
        for (int k = 0; k < n; ++k) buf[k] = p[k] - m[k];
    };

    // macroscopic fields and their moments
    std::vector<double> avg_a_old(nc), avg_a_new(nc), diff_a_old(nc), diff_a_new(nc);
    for (int c = 0; c < nc; ++c) {
        avg_a_old[c] = 0.5 * (m_old.a_plus[c] + m_old.a_minus[c]);
        avg_a_new[c] = 0.5 * (m_new.a_plus[c] + m_new.a_minus[c]);
        diff_a_old[c] = m_old.a_plus[c] - m_old.a_minus[c];
        diff_a_new[c] = m_new.a_plus[c] - m_new.a_minus[c];
    }

    std::array<std::array<std::vector<double>, 3>, 3> theta_old, theta_new, theta_diff_new;
    std::array<std::vector<double>, 3> lam_old, lam_new, g_old_vec, g_new_vec;
    for (int j = 0; j < 3; ++j) {
        lam_old[j].assign(nc, 0.0);
        lam_new[j].assign(nc, 0.0);
        g_old_vec[j].assign(nc, 0.0);
        g_new_vec[j].assign(nc, 0.0);
        for (int m = 0; m < 3; ++m) {
            theta_old[j][m].assign(nc, 0.0);
            theta_new[j][m].assign(nc, 0.0);
            theta_diff_new[j][m].assign(nc, 0.0);
        }
    }
    std::vector<double> buf(n);
    for (int c = 0; c < nc; ++c) {
        micro_sum(micro_old, c, buf);
        for (int j = 0; j < 3; ++j) {
            lam_old[j][c] = lambda_moment(g.vgrid, buf, j);
            for (int m = j; m < 3; ++m) {
                double t = theta_moment(g.vgrid, buf, j, m);
                theta_old[j][m][c] = theta_old[m][j][c] = t;
            }
        }
        micro_sum(micro_new, c, buf);
        for (int j = 0; j < 3; ++j) {
            lam_new[j][c] = lambda_moment(g.vgrid, buf, j);
            for (int m = j; m < 3; ++m) {
                double t = theta_moment(g.vgrid, buf, j, m);
                theta_new[j][m][c] = theta_new[m][j][c] = t;
            }
        }
        micro_diff(micro_old, c, buf);
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += buf[k] * vco[j][k] * smu[k];
            g_old_vec[j][c] = s * wt;
        }
        micro_diff(micro_new, c, buf);
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += buf[k] * vco[j][k] * smu[k];
            g_new_vec[j][c] = s * wt;
            for (int m = j; m < 3; ++m) {
                double t = theta_moment(g.vgrid, buf, j, m);
                theta_diff_new[j][m][c] = theta_diff_new[m][j][c] = t;
            }
        }
    }

    // (1) d_t (a_+ + a_-)/2 + div b = 0
    {
        std::vector<double> res(nc, 0.0);
        for (int j = 0; j < 3; ++j) {
            auto db = dx_field(g, j, m_new.b[j]);
            for (int c = 0; c < nc; ++c) res[c] += db[c];
        }
        for (int c = 0; c < nc; ++c) res[c] += (avg_a_new[c] - avg_a_old[c]) / dt;
        rep.balance[0] = l2x(g, res);
    }
    // (2) d_t b_j + d_j(avg_a + 2c) + 1/2 sum_m d_m Theta_jm = 1/2 sum_pm (g_pm, v_j mu^{1/2})
    {
        double acc = 0.0;
        std::vector<double> pres(nc);
        for (int j = 0; j < 3; ++j) {
            std::vector<double> scal(nc);
            for (int c = 0; c < nc; ++c) scal[c] = avg_a_new[c] + 2.0 * m_new.c[c];
            auto dscal = dx_field(g, j, scal);
            for (int c = 0; c < nc; ++c)
                pres[c] = (m_new.b[j][c] - m_old.b[j][c]) / dt + dscal[c];
            for (int m = 0; m < 3; ++m) {
                auto dth = dx_field(g, m, theta_new[j][m]);
                for (int c = 0; c < nc; ++c) pres[c] += 0.5 * dth[c];
            }
            for (int c = 0; c < nc; ++c) {
                auto gp = g_state.species_cell(g, 0, c), gm = g_state.species_cell(g, 1, c);
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += (gp[k] + gm[k]) * vco[j][k] * smu[k];
                pres[c] -= 0.5 * s * wt;
            }
            double r = l2x(g, pres);
            acc += r * r;
        }
        rep.balance[1] = std::sqrt(acc);
    }
    // (3) d_t c + 1/3 div b + 5/6 sum_j d_j Lambda_j = 1/12 sum_pm (g_pm, (|v|^2-3) mu^{1/2})
    {
        std::vector<double> res(nc, 0.0);
        for (int j = 0; j < 3; ++j) {
            auto db = dx_field(g, j, m_new.b[j]);
            auto dl = dx_field(g, j, lam_new[j]);
            for (int c = 0; c < nc; ++c) res[c] += db[c] / 3.0 + (5.0 / 6.0) * dl[c];
        }
        for (int c = 0; c < nc; ++c) {
            res[c] += (m_new.c[c] - m_old.c[c]) / dt;
            auto gp = g_state.species_cell(g, 0, c), gm = g_state.species_cell(g, 1, c);
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += (gp[k] + gm[k]) * (v2[k] - 3.0) * smu[k];
            res[c] -= s * wt / 12.0;
        }
        rep.balance[2] = l2x(g, res);
    }
    // (4) d_t (1/2 Theta_jm + 2 c delta_jm) + d_j b_m + d_m b_j
    //       = 1/2 sum_pm Theta_jm(g_pm + h_pm)
    {
        double acc = 0.0;
        std::vector<double> pres(nc), gh(n);
        for (int j = 0; j < 3; ++j)
            for (int m = 0; m < 3; ++m) {
                auto dbm = dx_field(g, j, m_new.b[m]);
                auto dbj = dx_field(g, m, m_new.b[j]);
                for (int c = 0; c < nc; ++c) {
                    double th_t = 0.5 * (theta_new[j][m][c] - theta_old[j][m][c]) / dt;
                    if (j == m) th_t += 2.0 * (m_new.c[c] - m_old.c[c]) / dt;
                    pres[c] = th_t + dbm[c] + dbj[c];
                    auto gp = g_state.species_cell(g, 0, c), gmn = g_state.species_cell(g, 1, c);
                    auto hp = h_state.species_cell(g, 0, c), hm = h_state.species_cell(g, 1, c);
                    for (int k = 0; k < n; ++k) gh[k] = gp[k] + gmn[k] + hp[k] + hm[k];
                    pres[c] -= 0.5 * theta_moment(g.vgrid, gh, j, m);
                }
                double r = l2x(g, pres);
                acc += r * r;
            }
        rep.balance[3] = std::sqrt(acc);
    }
    // (5) 1/2 d_t Lambda_j + d_j c = 1/2 Lambda_j(g_+ + g_- + h_+ + h_-)
    {
        double acc = 0.0;
        std::vector<double> pres(nc), gh(n);
        for (int j = 0; j < 3; ++j) {
            auto dc = dx_field(g, j, m_new.c);
            for (int c = 0; c < nc; ++c) {
                pres[c] = 0.5 * (lam_new[j][c] - lam_old[j][c]) / dt + dc[c];
                auto gp = g_state.species_cell(g, 0, c), gmn = g_state.species_cell(g, 1, c);
                auto hp = h_state.species_cell(g, 0, c), hm = h_state.species_cell(g, 1, c);
                for (int k = 0; k < n; ++k) gh[k] = gp[k] + gmn[k] + hp[k] + hm[k];
                pres[c] -= 0.5 * lambda_moment(g.vgrid, gh, j);
            }
            double r = l2x(g, pres);
            acc += r * r;
        }
        rep.balance[4] = std::sqrt(acc);
    }
    // charge continuity: d_t (a_+ - a_-) + div G = 0
    {
        std::vector<double> res(nc, 0.0);
        for (int j = 0; j < 3; ++j) {
            auto dg = dx_field(g, j, g_new_vec[j]);
            for (int c = 0; c < nc; ++c) res[c] += dg[c];
        }
        for (int c = 0; c < nc; ++c) res[c] += (diff_a_new[c] - diff_a_old[c]) / dt;
        rep.charge[0] = l2x(g, res);
    }
    // current balance: d_t G + grad(a_+ - a_-) - 2 E + div Theta([1,-1]) = RHS
    {
        double acc = 0.0;
        std::vector<double> pres(nc), gl(n);
        for (int j = 0; j < 3; ++j) {
            auto da = dx_field(g, j, diff_a_new);
            for (int c = 0; c < nc; ++c) {
                pres[c] = (g_new_vec[j][c] - g_old_vec[j][c]) / dt + da[c] -
                          2.0 * field_new.e[j][c];
            }
            for (int m = 0; m < 3; ++m) {
                auto dth = dx_field(g, m, theta_diff_new[j][m]);
                for (int c = 0; c < nc; ++c) pres[c] += dth[c];
            }
            for (int c = 0; c < nc; ++c) {
                auto gp = g_state.species_cell(g, 0, c), gmn = g_state.species_cell(g, 1, c);
                auto lp = l_state.species_cell(g, 0, c), lm = l_state.species_cell(g, 1, c);
                double s = 0.0;
                for (int k = 0; k < n; ++k)
                    s += ((gp[k] - gmn[k]) + (lp[k] - lm[k])) * vco[j][k] * smu[k];
                pres[c] -= s * wt;
            }
            double r = l2x(g, pres);
            acc += r * r;
        }
        rep.charge[1] = std::sqrt(acc);
    }

    rep.boundary = boundary_compatibility(g, proj, f_new, field_new);
    return rep;
}

std::vector<BoundaryMaxima> boundary_compatibility(const PhaseGrid& g, const Projector& proj,
                                                   const DistState& f, const FieldState& field) {
    MomentSet m = proj.project(g, f);
    // phi from E is not available here; recover nothing, use phi only if the
    // caller stored it in FieldState
    std::vector<BoundaryMaxima> out;
    for (int axis = 0; axis < g.domain.active_dims; ++axis) {
        BoundaryMaxima bm;
        bm.axis = axis;
        bool any = false;
        for (const auto& face : g.domain.faces) {
            if (face.axis != axis) continue;
            any = true;
            int c0 = face.cell;
            int in_side = face.sign > 0 ? 0 : 1;
            int c1 = g.domain.neighbor(c0, axis, in_side);
            int c2 = c1 >= 0 ? g.domain.neighbor(c1, axis, in_side) : -1;
            int c3 = c2 >= 0 ? g.domain.neighbor(c2, axis, in_side) : -1;
            double h = g.domain.h_x, s = face.sign;

            auto d1 = [&](const std::vector<double>& u) {
                return c1 >= 0 ? s * (u[c0] - u[c1]) / h : 0.0;
            };
            auto d2 = [&](const std::vector<double>& u) {
                return c2 >= 0 ? (u[c0] - 2.0 * u[c1] + u[c2]) / (h * h) : 0.0;
            };
            auto d3 = [&](const std::vector<double>& u) {
                return c3 >= 0 ? s * (u[c0] - 3.0 * u[c1] + 3.0 * u[c2] - u[c3]) / (h * h * h)
                               : 0.0;
            };

            bm.b_i = std::max(bm.b_i, std::abs(m.b[axis][c0]));
            bm.d_a_plus = std::max(bm.d_a_plus, std::abs(d1(m.a_plus)));
            bm.d_a_minus = std::max(bm.d_a_minus, std::abs(d1(m.a_minus)));
            bm.d_c = std::max(bm.d_c, std::abs(d1(m.c)));
            for (int j = 0; j < 3; ++j)
                if (j != axis) bm.d_b_tangent = std::max(bm.d_b_tangent, std::abs(d1(m.b[j])));
            bm.dd_b_i = std::max(bm.dd_b_i, std::abs(d2(m.b[axis])));
            bm.ddd_a_plus = std::max(bm.ddd_a_plus, std::abs(d3(m.a_plus)));
            bm.ddd_a_minus = std::max(bm.ddd_a_minus, std::abs(d3(m.a_minus)));
            bm.ddd_c = std::max(bm.ddd_c, std::abs(d3(m.c)));
            for (int j = 0; j < 3; ++j)
                if (j != axis) bm.ddd_b_tangent = std::max(bm.ddd_b_tangent, std::abs(d3(m.b[j])));
            bm.phi_third = std::max(bm.phi_third, std::abs(d3(field.phi)));
        }
        if (any) out.push_back(bm);
    }
    return out;
}

double hessian_identity_ratio(const PhaseGrid& g, const std::vector<double>& u) {
    double num = 0.0;
    std::vector<double> lap(g.n_cells(), 0.0);
    for (int i = 0; i < g.domain.active_dims; ++i) {
        auto di = dx_field(g, i, u);
        for (int j = 0; j < g.domain.active_dims; ++j) {
            auto dij = dx_field(g, j, di);
            double r = l2x(g, dij);
            num += r * r;
            if (i == j)
                for (int c = 0; c < g.n_cells(); ++c) lap[c] += dij[c];
        }
    }
    double den = l2x(g, lap);
    return den > 0.0 ? num / (den * den) : 1.0;
}

}  // namespace vpl
