/*
 * Linearized operator L, bilinear operator Gamma, A/K splitting and the
 * dissipation norms.  Everything is assembled from the conjugated fluxes
 *   mu sigma^{ij} Dbar_j (mu^{-1/2} f)      (same-species part)
 *   mu (kern^{ij} * mu Dbar_j (mu^{-1/2} f)) (cross-species convolution part)
 * closed by the explicit transpose of Dbar, so the discrete operator is
 * symmetric and annihilates the collision invariants exactly.
 */
#include <cmath>

#include "conv_engine.hpp"
#include "landau.hpp"

namespace vpl {

namespace {
constexpr int kMap[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};

struct Scratch {
    int n = 0;
    std::vector<double> u_p, u_m, u_s, tmp, tmp2, acc;
    std::array<std::vector<double>, 3> grad, flux, conv_out;
    void ensure(int n_nodes) {
        if (n == n_nodes) return;
        n = n_nodes;
        for (auto* v : {&u_p, &u_m, &u_s, &tmp, &tmp2, &acc}) v->assign(n, 0.0);
        for (auto& g : grad) g.assign(n, 0.0);
        for (auto& g : flux) g.assign(n, 0.0);
        for (auto& g : conv_out) g.assign(n, 0.0);
    }
};

Scratch& scratch(int n) {
    thread_local Scratch s;
    s.ensure(n);
    return s;
}

}  // namespace

void dbar(const VelocityGrid& g, int axis, std::span<const double> in, std::span<double> out) {
    const int n = g.n_v;
    const double ih2 = 0.5 / g.h_v;
    const int stride = axis == 0 ? n * n : (axis == 1 ? n : 1);
    // n^2 lines per axis; a encodes the two transverse indices
    for (int a = 0; a < n * n; ++a) {
        int base;
        if (axis == 0) base = a;                             // a = x2*n + x3
        else if (axis == 1) base = (a / n) * n * n + a % n;  // a = x1*n + x3
        else base = a * n;                                   // a = x1*n + x2
        const double* p = in.data() + base;
        double* q = out.data() + base;
        q[0] = (-3.0 * p[0] + 4.0 * p[stride] - p[2 * stride]) * ih2;
        for (int k = 1; k < n - 1; ++k)
            q[k * stride] = (p[(k + 1) * stride] - p[(k - 1) * stride]) * ih2;
        q[(n - 1) * stride] = (3.0 * p[(n - 1) * stride] - 4.0 * p[(n - 2) * stride] +
                               p[(n - 3) * stride]) * ih2;
    }
}

void dbar_transpose(const VelocityGrid& g, int axis, std::span<const double> in,
                    std::span<double> out) {
    const int n = g.n_v;
    const double ih2 = 0.5 / g.h_v;
    const int stride = axis == 0 ? n * n : (axis == 1 ? n : 1);
    for (int a = 0; a < n * n; ++a) {
        int base;
        if (axis == 0) base = a;
        else if (axis == 1) base = (a / n) * n * n + a % n;
        else base = a * n;
        const double* w = in.data() + base;
        double* q = out.data() + base;
        for (int k = 0; k < n; ++k) q[k * stride] = 0.0;
        // row 0: (-3, 4, -1) / (2h) at columns 0,1,2
        q[0] += -3.0 * ih2 * w[0];
        q[stride] += 4.0 * ih2 * w[0];
        q[2 * stride] += -ih2 * w[0];
        // interior rows k: -1/(2h) at k-1, +1/(2h) at k+1
        for (int k = 1; k < n - 1; ++k) {
            q[(k - 1) * stride] -= ih2 * w[k * stride];
            q[(k + 1) * stride] += ih2 * w[k * stride];
        }
        // row n-1: (1, -4, 3) / (2h) at columns n-3, n-2, n-1
        q[(n - 3) * stride] += ih2 * w[(n - 1) * stride];
        q[(n - 2) * stride] += -4.0 * ih2 * w[(n - 1) * stride];
        q[(n - 1) * stride] += 3.0 * ih2 * w[(n - 1) * stride];
    }
}

namespace {

// out = -2 mu^{-1/2} sum_i DbarT_i ( mu sigma^{ij} Dbar_j (mu^{-1/2} f) )
void apply_L1(const CollisionTables& t, std::span<const double> f, std::span<double> out,
              Scratch& s) {
    const int n = t.grid.n_nodes();
    for (int i = 0; i < n; ++i) s.u_p[i] = f[i] * t.inv_smu[i];
    for (int j = 0; j < 3; ++j) dbar(t.grid, j, s.u_p, s.grad[j]);
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < n; ++k) {
            double v = 0.0;
            for (int j = 0; j < 3; ++j) v += t.sigma[kMap[i][j]][k] * s.grad[j][k];
            s.flux[i][k] = t.mu[k] * v;
        }
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < 3; ++i) {
        dbar_transpose(t.grid, i, s.flux[i], s.tmp);
        for (int k = 0; k < n; ++k) out[k] += s.tmp[k];
    }
    for (int k = 0; k < n; ++k) out[k] *= -2.0 * t.inv_smu[k];
}

// cross-species convolution part: out = mu^{-1/2} sum_i DbarT_i ( mu C^i ),
// C^i = sum_j kern^{ij} * ( mu Dbar_j u );  u is mu^{-1/2} (species sum)
void apply_M(const CollisionTables& t, ConvEngine::Family fam, const std::vector<double>& u,
             std::span<double> out, Scratch& s, bool use_a1 = false) {
    const int n = t.grid.n_nodes();
    for (int j = 0; j < 3; ++j) {
        dbar(t.grid, j, u, s.grad[j]);
        for (int k = 0; k < n; ++k) s.grad[j][k] *= t.mu[k];
    }
    if (use_a1)
        t.conv->conv_vec3_a1(s.grad, s.conv_out);
    else
        t.conv->conv_vec3(fam, s.grad, s.conv_out);
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < n; ++k) s.flux[0][k] = t.mu[k] * s.conv_out[i][k];
        dbar_transpose(t.grid, i, s.flux[0], s.tmp);
        for (int k = 0; k < n; ++k) out[k] += s.tmp[k];
    }
    for (int k = 0; k < n; ++k) out[k] *= t.inv_smu[k];
}

}  // namespace

void apply_L(const CollisionTables& t, std::span<const double> fp, std::span<const double> fm,
             std::span<double> out_p, std::span<double> out_m) {
    const int n = t.grid.n_nodes();
    auto& s = scratch(n);
    apply_L1(t, fp, out_p, s);
    apply_L1(t, fm, out_m, s);
    for (int i = 0; i < n; ++i) s.u_s[i] = (fp[i] + fm[i]) * t.inv_smu[i];
    std::vector<double>& shared = s.tmp2;
    apply_M(t, ConvEngine::kFull, s.u_s, shared, s);
    for (int i = 0; i < n; ++i) {
        out_p[i] += shared[i];
        out_m[i] += shared[i];
    }
}

void apply_Gamma(const CollisionTables& t, std::span<const double> gp, std::span<const double> gm,
                 std::span<const double> hp, std::span<const double> hm, std::span<double> out_p,
                 std::span<double> out_m) {
    const int n = t.grid.n_nodes();
    auto& s = scratch(n);
    // field factor a = mu^{-1/2}(g_+ + g_-) and its convolutions
    std::vector<double> a(n), mu_a(n);
    for (int i = 0; i < n; ++i) {
        a[i] = (gp[i] + gm[i]) * t.inv_smu[i];
        mu_a[i] = t.mu[i] * a[i];
    }
    std::array<std::vector<double>, 6> c1;
    t.conv->conv_scalar6(ConvEngine::kFull, mu_a, c1);
    for (int j = 0; j < 3; ++j) {
        dbar(t.grid, j, a, s.grad[j]);
        for (int k = 0; k < n; ++k) s.grad[j][k] *= t.mu[k];
    }
    std::array<std::vector<double>, 3> c2;
    t.conv->conv_vec3(ConvEngine::kFull, s.grad, c2);

    auto one_species = [&](std::span<const double> h, std::span<double> out) {
        for (int i = 0; i < n; ++i) s.u_p[i] = h[i] * t.inv_smu[i];
        for (int j = 0; j < 3; ++j) dbar(t.grid, j, s.u_p, s.grad[j]);
        std::fill(out.begin(), out.end(), 0.0);
        for (int i = 0; i < 3; ++i) {
            for (int k = 0; k < n; ++k) {
                double J = -c2[i][k] * s.u_p[k];
                for (int j = 0; j < 3; ++j) J += c1[kMap[i][j]][k] * s.grad[j][k];
                s.flux[0][k] = t.mu[k] * J;
            }
            dbar_transpose(t.grid, i, s.flux[0], s.tmp);
            for (int k = 0; k < n; ++k) out[k] += s.tmp[k];
        }
        for (int k = 0; k < n; ++k) out[k] *= -t.inv_smu[k];
    };
    one_species(hp, out_p);
    one_species(hm, out_m);
}

void apply_K(const CollisionTables& t, std::span<const double> fp, std::span<const double> fm,
             std::span<double> out_p, std::span<double> out_m) {
    const int n = t.grid.n_nodes();
    auto& s = scratch(n);
    std::vector<double> us_masked(n);
    for (int i = 0; i < n; ++i)
        us_masked[i] = t.mask_R[i] * (fp[i] + fm[i]) * t.inv_smu[i];
    std::vector<double>& mk = s.tmp2;
    apply_M(t, ConvEngine::kK1, us_masked, mk, s);
    for (int i = 0; i < n; ++i) {
        double shared = t.mask_R[i] * mk[i];
        double mult = 2.0 * t.div_sigma_vec[i] * t.mask_R[i];
        out_p[i] = mult * fp[i] + shared;
        out_m[i] = mult * fm[i] + shared;
    }
}

void apply_A(const CollisionTables& t, std::span<const double> fp, std::span<const double> fm,
             std::span<double> out_p, std::span<double> out_m) {
    const int n = t.grid.n_nodes();
    auto& s = scratch(n);
    std::vector<double> us(n), us_masked(n), m_k1(n), m_k1_masked(n), m_a1(n);
    for (int i = 0; i < n; ++i) {
        us[i] = (fp[i] + fm[i]) * t.inv_smu[i];
        us_masked[i] = t.mask_R[i] * us[i];
    }
    apply_M(t, ConvEngine::kK1, us, m_k1, s);
    apply_M(t, ConvEngine::kK1, us_masked, m_k1_masked, s);
    apply_M(t, ConvEngine::kFull, us, m_a1, s, /*use_a1=*/true);

    apply_L1(t, fp, out_p, s);
    apply_L1(t, fm, out_m, s);
    for (int i = 0; i < n; ++i) {
        double shared = m_a1[i] + m_k1[i] - t.mask_R[i] * m_k1_masked[i];
        double mult = 2.0 * t.div_sigma_vec[i] * t.mask_R[i];
        out_p[i] = -(out_p[i] - mult * fp[i] + shared);
        out_m[i] = -(out_m[i] - mult * fm[i] + shared);
    }
}

double norm_D_sigma(const CollisionTables& t, std::span<const double> f, const WeightSpec& w) {
    const int n = t.grid.n_nodes();
    auto& s = scratch(n);
    for (int j = 0; j < 3; ++j) dbar(t.grid, j, f, s.grad[j]);
    const double wt = t.grid.quadrature_weight();
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
        Vec3 v{t.vcoord[0][k], t.vcoord[1][k], t.vcoord[2][k]};
        double ww = weight_eval(w, v);
        double quad = 0.0, mult = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double sij = t.sigma[kMap[i][j]][k];
                quad += sij * s.grad[i][k] * s.grad[j][k];
                mult += sij * 0.25 * v[i] * v[j];
            }
        total += ww * ww * (quad + mult * f[k] * f[k]);
    }
    return total * wt;
}

double norm_D_pv(const CollisionTables& t, std::span<const double> f, const WeightSpec& w) {
    const int n = t.grid.n_nodes();
    auto& s = scratch(n);
    for (int j = 0; j < 3; ++j) dbar(t.grid, j, f, s.grad[j]);
    const double wt = t.grid.quadrature_weight();
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
        Vec3 v{t.vcoord[0][k], t.vcoord[1][k], t.vcoord[2][k]};
        double ww = weight_eval(w, v);
        double br2 = 1.0 + v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        double r2 = br2 - 1.0;
        double g2 = 0.0, gv = 0.0;
        for (int j = 0; j < 3; ++j) {
            g2 += s.grad[j][k] * s.grad[j][k];
            gv += s.grad[j][k] * v[j];
        }
        double par = r2 > 0.0 ? gv * gv / r2 : 0.0;  // |P_v grad f|^2
        double perp = g2 - par;
        double bg = std::pow(br2, 0.5 * t.params.gamma);
        double bg2 = std::pow(br2, 0.5 * (t.params.gamma + 2.0));
        total += ww * ww * (bg * par + bg2 * perp + bg2 * f[k] * f[k]);
    }
    return total * wt;
}

double norm_D(const CollisionTables& t, std::span<const double> fp, std::span<const double> fm,
              const WeightSpec& w) {
    return norm_D_sigma(t, fp, w) + norm_D_sigma(t, fm, w);
}

}  // namespace vpl
