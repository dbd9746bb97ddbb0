/*
 * Landau collision machinery.
 *
 * Kernel matrix phi^{ij}(z) = (delta_ij - z_i z_j/|z|^2) |z|^{gamma+2},
 * convolution tables
 *   sigma^{ij} = phi^{ij} * mu,   sigma^i = phi^{ij} * (v_j/2 mu),
 * the linearized operator L = [L_+, L_-], the bilinear operator Gamma,
 * the A/K splitting with a smooth small-|v| cutoff chi, the dissipation
 * norms, and the velocity weights w_{l,nu}(alpha,beta).
 *
 * Discretization: all collision terms are assembled in the Maxwellian-
 * conjugated divergence form
 *   L^{(1)} f = 2 mu^{-1/2} d_i ( mu sigma^{ij} d_j (mu^{-1/2} f) ),
 *   (Gamma, cross-species part analogous, with per-evaluation convolutions)
 * using one derivative stencil Dbar (centered in the interior, one-sided
 * second-order at the ends) and its explicit transpose in divergence
 * positions.  Dbar annihilates constants and is exact on linear and
 * quadratic monomials, which makes the discrete operator exactly
 * self-adjoint, exactly mass/momentum/energy conserving, and gives it the
 * exact six-dimensional kernel
 *   { [1,0] mu^{1/2}, [0,1] mu^{1/2}, [1,1] v_j mu^{1/2}, [1,1] |v|^2 mu^{1/2} }
 * up to roundoff.
 *
 * Convolutions run on a zero-padded FFT by default; a direct O(n_v^6)
 * reference sum is kept for validation.  The kernel's singular z=0 cell is
 * replaced by its exact cell average (2/3) delta_ij Integral_cell |z|^{gamma+2} dz.
 */
#pragma once

#include <array>
#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "geometry.hpp"
#include "maxwellian.hpp"

namespace vpl {

struct PotentialParams {
    double gamma = 0.0;  // in [-3, 1]
    static constexpr double s = 1.0;
    bool hard() const { return gamma >= -2.0; }
    // weight exponents of w_{l,nu}(alpha,beta) at s = 1
    double weight_r() const { return hard() ? 1.0 : -gamma + 1.0; }
    double weight_q() const { return hard() ? 1.0 : -2.0 * gamma + 1.0; }
    // theoretical decay exponent p
    double decay_p() const { return hard() ? 1.0 : 1.0 / (-gamma - 1.0); }
};

struct WeightSpec {
    double l = 3.0;
    double nu = 0.0;          // exponential rate, soft potentials only
    int alpha_order = 0;      // |alpha|
    int beta_order = 0;       // |beta|
    PotentialParams pot;
};

double weight_eval(const WeightSpec& spec, const Vec3& v);

struct SplitParams {
    double eps = 0.1;   // chi(|z|) = 1 for |z| < eps, 0 for |z| > 2 eps
    double R = 3.6;     // velocity truncation of the bounded part K
};

// phi^{ij}(v); symmetric PSD with null vector v.  v = 0 with gamma <= -2 is
// singular and must not be evaluated (tables use the cell average instead).
std::array<std::array<double, 3>, 3> phi_matrix(const Vec3& v, const PotentialParams& params);

// smooth bump built from exp(-1/t): 1 on [0, eps], 0 on [2 eps, inf)
double chi_cutoff(double r, double eps);

class ConvEngine;  // FFT/direct convolution backend (internal)

struct CollisionTables {
    VelocityGrid grid;
    PotentialParams params;
    SplitParams split;

    // per-node geometry caches
    std::vector<double> mu, smu, inv_smu;  // mu, mu^{1/2}, mu^{-1/2}
    std::array<std::vector<double>, 3> vcoord;

    // sigma^{ij}: symmetric, components ordered 11,22,33,12,13,23
    std::array<std::vector<double>, 6> sigma;
    std::array<std::vector<double>, 3> sigma_vec;           // sigma^i
    std::array<std::array<std::vector<double>, 6>, 3> dsigma;  // d_k sigma^{ij}
    std::vector<double> div_sigma_vec;                      // sum_i d_i sigma^i
    std::vector<double> mask_R;                             // 1_{|v| <= R}

    double cell_integral = 0.0;      // Integral_cell |z|^{gamma+2} dz
    double cell_integral_chi = 0.0;  // same with chi(|z|) factor

    std::shared_ptr<ConvEngine> conv;

    double sigma_at(int node, int i, int j) const {
        static constexpr int map[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
        return sigma[map[i][j]][node];
    }
};

// Tables by singularity-aware quadrature; throws on isotropy self-test
// failure (off-grid evaluation at v = 0 deviating from delta_ij structure).
CollisionTables build_tables(const VelocityGrid& grid, const PotentialParams& params,
                             const SplitParams& split = {});

// Off-grid evaluation of sigma^{ij} at an arbitrary point (quadrature with
// subcell refinement near the singularity); used by the build self-test and
// the radial oracle checks.
std::array<std::array<double, 3>, 3> sigma_eval(const VelocityGrid& grid,
                                                const PotentialParams& params, const Vec3& v);

// ---- operator applications (single spatial cell) -------------------------
// All take nodal arrays of length grid.n_nodes() per species.

void apply_L(const CollisionTables& t, std::span<const double> fp, std::span<const double> fm,
             std::span<double> out_p, std::span<double> out_m);

void apply_Gamma(const CollisionTables& t, std::span<const double> gp, std::span<const double> gm,
                 std::span<const double> hp, std::span<const double> hm, std::span<double> out_p,
                 std::span<double> out_m);

// A and K of the splitting L = -A + K; -A f + K f reproduces apply_L up to
// roundoff by construction of the complementary chi kernels.
void apply_K(const CollisionTables& t, std::span<const double> fp, std::span<const double> fm,
             std::span<double> out_p, std::span<double> out_m);
void apply_A(const CollisionTables& t, std::span<const double> fp, std::span<const double> fm,
             std::span<double> out_p, std::span<double> out_m);

// use the direct O(n_v^6) reference sums instead of the FFT path
void set_convolution_reference_mode(bool direct);
bool convolution_reference_mode();

// ---- dissipation norms ----------------------------------------------------

// sigma-form |f|^2_{L^2_{D,w}} for a single velocity function
double norm_D_sigma(const CollisionTables& t, std::span<const double> f, const WeightSpec& w);
// equivalent P_v-form for cross-checks
double norm_D_pv(const CollisionTables& t, std::span<const double> f, const WeightSpec& w);
// two-species sum of the sigma-form
double norm_D(const CollisionTables& t, std::span<const double> fp, std::span<const double> fm,
              const WeightSpec& w);

// ---- derivative stencil ---------------------------------------------------
// Dbar: centered interior, second-order one-sided ends; exact on constants,
// linears and quadratics.  dbar_transpose is its adjoint in the unweighted
// nodal inner product.
void dbar(const VelocityGrid& g, int axis, std::span<const double> in, std::span<double> out);
void dbar_transpose(const VelocityGrid& g, int axis, std::span<const double> in,
                    std::span<double> out);

}  // namespace vpl
