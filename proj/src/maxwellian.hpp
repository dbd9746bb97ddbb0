/*
 * Global Maxwellian, velocity quadrature and the macroscopic projection.
 *
 * mu(v) = (2 pi)^{-3/2} exp(-|v|^2/2).  The solver evolves the perturbation
 * f with F = mu + mu^{1/2} f; all velocity moments use the same midpoint
 * quadrature weight h_v^3 so conservation checks are internally consistent.
 *
 * The projection P onto the kernel of the linearized collision operator,
 *   span{ [1,0] mu^{1/2}, [0,1] mu^{1/2}, [1,1] v_j mu^{1/2}, [1,1](|v|^2-3) mu^{1/2} },
 * is computed through the Gram matrix of the discrete basis (6x6 normal
 * equations per spatial cell): truncation at v_max breaks exact continuum
 * orthogonality, and the Gram-corrected solve restores idempotence to
 * roundoff.
 */
#pragma once

#include <array>
#include <span>

#include "state.hpp"

namespace vpl {

double maxwellian(const Vec3& v);
double sqrt_maxwellian(const Vec3& v);
inline double v_bracket(const Vec3& v) {  // <v> = sqrt(1 + |v|^2)
    return std::sqrt(1.0 + v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

// Grid quadrature of v1^p1 v2^p2 v3^p3 mu(v).  exact = closed-form Gaussian
// moment (product of double factorials); warn set when total degree > 6.
struct GaussMoment {
    double value = 0.0;
    double exact = 0.0;
    bool warn = false;
};
GaussMoment gauss_moment(const VelocityGrid& grid, const std::array<int, 3>& powers);

// exact closed-form monomial moment, no grid involved (test oracle lives on
// top of this as well)
double gauss_moment_exact(const std::array<int, 3>& powers);

// Macroscopic coefficients per cell: a+, a-, b1..b3, c.
struct MomentSet {
    std::vector<double> a_plus, a_minus, c;
    std::array<std::vector<double>, 3> b;

    explicit MomentSet(int n_cells = 0) { resize(n_cells); }
    void resize(int n_cells) {
        a_plus.assign(n_cells, 0.0);
        a_minus.assign(n_cells, 0.0);
        c.assign(n_cells, 0.0);
        for (auto& bj : b) bj.assign(n_cells, 0.0);
    }
};

// Stress / heat-flux moments of the microscopic part, plus the species
// difference current G and the streaming source h_pm when requested.
struct FluidMoments {
    // theta[j][m] symmetric; entries applied to {I-P}f . [1,1]
    std::array<std::array<std::vector<double>, 3>, 3> theta;
    std::array<std::vector<double>, 3> lambda;
    std::array<std::vector<double>, 3> g_vec;  // ({I-P}f . [1,-1], v mu^{1/2})
};

class Projector {
  public:
    explicit Projector(const VelocityGrid& grid);

    // coefficients for one velocity slice pair (f_+, f_-)
    void coefficients(std::span<const double> f_plus, std::span<const double> f_minus,
                      double out[6]) const;
    // P f for one cell written into pf_{plus,minus}
    void apply(std::span<const double> f_plus, std::span<const double> f_minus,
               std::span<double> pf_plus, std::span<double> pf_minus) const;

    MomentSet project(const PhaseGrid& g, const DistState& f, DistState* pf = nullptr) const;

    const std::vector<double>& basis(int k) const { return basis_[k]; }  // single-species factor

  private:
    int n_ = 0;
    double wt_ = 0.0;
    // basis velocity factors: 0: mu^{1/2} (+ species), 1: mu^{1/2} (- species),
    // 2..4: v_j mu^{1/2} (both), 5: (|v|^2-3) mu^{1/2} (both)
    std::array<std::vector<double>, 6> basis_;
    std::array<std::array<double, 6>, 6> gram_inv_{};
};

// Theta_{jm}(h) = (h, (v_j v_m - 1) mu^{1/2}),  Lambda_j(h) = (1/10)(h, (|v|^2-5) v_j mu^{1/2})
double theta_moment(const VelocityGrid& grid, std::span<const double> h, int j, int m);
double lambda_moment(const VelocityGrid& grid, std::span<const double> h, int j);

// Moments of the microscopic part per the fluid-type balance laws.
FluidMoments fluid_moments(const PhaseGrid& g, const DistState& f, const Projector& proj);

}  // namespace vpl
