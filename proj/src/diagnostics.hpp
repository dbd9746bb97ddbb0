/*
 * Energy and dissipation functionals, conservation trackers, decay-rate
 * fits, fluid-type balance residuals and boundary-compatibility maxima.
 */
#pragma once

#include <optional>

#include "integrator.hpp"
#include "landau.hpp"
#include "maxwellian.hpp"

namespace vpl {

struct EnergyReport {
    double t = 0.0;
    double e_nu = 0.0, d_nu = 0.0, e_plain = 0.0;
    double mass_plus = 0.0, mass_minus = 0.0, total_energy = 0.0;
    double min_F = 0.0;
    double x_functional = 0.0;  // running sup e^{delta t^p} E + sup E_nu
};

struct DecayFit {
    double delta = 0.0;
    double p_exponent = 1.0;
    double r_squared = 0.0;
    double window_t0 = 0.0, window_t1 = 0.0;
};

struct FitError : std::runtime_error {
    explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

// max-norm boundary values on one face family Gamma_i
struct BoundaryMaxima {
    int axis = 0;
    double b_i = 0.0;                       // |b_i|
    double d_a_plus = 0.0, d_a_minus = 0.0; // |d_i a_pm|
    double d_c = 0.0;                       // |d_i c|
    double d_b_tangent = 0.0;               // max_{j != i} |d_i b_j|
    double dd_b_i = 0.0;                    // |d_ii b_i|
    double ddd_a_plus = 0.0, ddd_a_minus = 0.0, ddd_c = 0.0, ddd_b_tangent = 0.0;
    double phi_third = 0.0;                 // |d_iii phi|
};

struct ResidualReport {
    // L2_x residuals of the five fluid-type balance lines (component sums)
    std::array<double, 5> balance{};
    // species-difference system: charge continuity and current balance
    std::array<double, 2> charge{};
    std::vector<BoundaryMaxima> boundary;
};

// conserved quantities: per-species mass and combined kinetic+field energy
struct Conserved {
    double mass_plus = 0.0, mass_minus = 0.0, total_energy = 0.0;
};
Conserved conserved_quantities(const PhaseGrid& g, const DistState& f, const FieldState& field);

double min_distribution(const PhaseGrid& g, const DistState& f);  // min of mu + mu^{1/2} f

// instant energy / dissipation functionals at the given derivative order:
// sums of |w_{l,nu}(alpha,beta) d^alpha_beta f|^2_{L2_{x,v}} (+ L2_D analog)
// over |alpha|+|beta| <= order, plus |d^alpha E|^2 over |alpha| <= order
struct EnergyFunctional {
    double e_nu = 0.0, d_nu = 0.0, e_plain = 0.0;
};
EnergyFunctional energy_functional(const PhaseGrid& g, const CollisionTables& tables,
                                   const DistState& f, const FieldState& field, double l,
                                   double nu, int diag_order);

enum class FitMode { fixed_p, free_p };
DecayFit fit_decay(const std::vector<std::pair<double, double>>& series, FitMode mode,
                   double fixed_p = 1.0, double window_t0 = 0.0,
                   double window_t1 = std::numeric_limits<double>::infinity());

// balance-law residuals from two consecutive states (backward dt difference)
ResidualReport fluid_residuals(const PhaseGrid& g, const CollisionTables& tables,
                               const Projector& proj, const DistState& f_old,
                               const DistState& f_new, const FieldState& field_new, double dt,
                               bool with_g_terms = true);

// boundary section only (state-level compatibility maxima)
std::vector<BoundaryMaxima> boundary_compatibility(const PhaseGrid& g, const Projector& proj,
                                                   const DistState& f, const FieldState& field);

// Hessian identity measure: sum_{ij} |d_ij u|^2 / |Lap u|^2 over macroscopic
// fields (1.0 in the continuum under the measured boundary conditions)
double hessian_identity_ratio(const PhaseGrid& g, const std::vector<double>& u);

}  // namespace vpl
