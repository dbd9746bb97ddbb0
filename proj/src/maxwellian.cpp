#include "maxwellian.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace vpl {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double maxwellian(const Vec3& v) {
    double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    return std::pow(kTwoPi, -1.5) * std::exp(-0.5 * v2);
}

double sqrt_maxwellian(const Vec3& v) {
    double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    return std::pow(kTwoPi, -0.75) * std::exp(-0.25 * v2);
}

double gauss_moment_exact(const std::array<int, 3>& powers) {
    double m = 1.0;
    for (int d = 0; d < 3; ++d) {
        int p = powers[d];
        if (p % 2 == 1) return 0.0;
        for (int k = p - 1; k >= 2; k -= 2) m *= k;  // (p-1)!!
    }
    return m;
}

GaussMoment gauss_moment(const VelocityGrid& grid, const std::array<int, 3>& powers) {
    GaussMoment r;
    r.warn = powers[0] + powers[1] + powers[2] > 6;
    r.exact = gauss_moment_exact(powers);
    // separable: product of 1-D sums
    double prod = 1.0;
    for (int d = 0; d < 3; ++d) {
        double s = 0.0;
        for (int k = 0; k < grid.n_v; ++k) {
            double v = grid.coords[k];
            s += std::pow(v, powers[d]) * std::exp(-0.5 * v * v);
        }
        prod *= s * grid.h_v / std::sqrt(kTwoPi);
    }
    r.value = prod;
    return r;
}

Projector::Projector(const VelocityGrid& grid) : n_(grid.n_nodes()), wt_(grid.quadrature_weight()) {
    for (auto& b : basis_) b.assign(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        Vec3 v = grid.node(i);
        double sm = sqrt_maxwellian(v);
        double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        basis_[0][i] = sm;
        basis_[1][i] = sm;
        for (int j = 0; j < 3; ++j) basis_[2 + j][i] = v[j] * sm;
        basis_[5][i] = (v2 - 3.0) * sm;
    }

    // two-species Gram matrix: species masks are [1,0],[0,1],[1,1],[1,1],[1,1],[1,1]
    auto species_overlap = [](int a, int b) -> double {
        auto plus = [](int k) { return k != 1; };   // component on species +
        auto minus = [](int k) { return k != 0; };  // component on species -
        return (plus(a) && plus(b) ? 1.0 : 0.0) + (minus(a) && minus(b) ? 1.0 : 0.0);
    };
    Eigen::Matrix<double, 6, 6> gram;
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
            double s = 0.0;
            for (int i = 0; i < n_; ++i) s += basis_[a][i] * basis_[b][i];
            gram(a, b) = s * wt_ * species_overlap(a, b);
        }
    Eigen::Matrix<double, 6, 6> inv = gram.inverse();
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) gram_inv_[a][b] = inv(a, b);
}

void Projector::coefficients(std::span<const double> fp, std::span<const double> fm,
                             double out[6]) const {
    double rhs[6];
    for (int a = 0; a < 6; ++a) {
        double s = 0.0;
        if (a == 0) {
            for (int i = 0; i < n_; ++i) s += basis_[0][i] * fp[i];
        } else if (a == 1) {
            for (int i = 0; i < n_; ++i) s += basis_[1][i] * fm[i];
        } else {
            for (int i = 0; i < n_; ++i) s += basis_[a][i] * (fp[i] + fm[i]);
        }
        rhs[a] = s * wt_;
    }
    for (int a = 0; a < 6; ++a) {
        double s = 0.0;
        for (int b = 0; b < 6; ++b) s += gram_inv_[a][b] * rhs[b];
        out[a] = s;
    }
}

void Projector::apply(std::span<const double> fp, std::span<const double> fm,
                      std::span<double> pfp, std::span<double> pfm) const {
    double c[6];
    coefficients(fp, fm, c);
    for (int i = 0; i < n_; ++i) {
        double common = c[2] * basis_[2][i] + c[3] * basis_[3][i] + c[4] * basis_[4][i] +
                        c[5] * basis_[5][i];
        pfp[i] = c[0] * basis_[0][i] + common;
        pfm[i] = c[1] * basis_[1][i] + common;
    }
}

MomentSet Projector::project(const PhaseGrid& g, const DistState& f, DistState* pf) const {
    MomentSet m(g.n_cells());
    for (int cell = 0; cell < g.n_cells(); ++cell) {
        auto fp = f.species_cell(g, 0, cell);
        auto fm = f.species_cell(g, 1, cell);
        double c[6];
        coefficients(fp, fm, c);
        m.a_plus[cell] = c[0];
        m.a_minus[cell] = c[1];
        for (int j = 0; j < 3; ++j) m.b[j][cell] = c[2 + j];
        m.c[cell] = c[5];
        if (pf) {
            apply(fp, fm, pf->species_cell(g, 0, cell), pf->species_cell(g, 1, cell));
        }
    }
    if (pf) pf->time = f.time;
    return m;
}

double theta_moment(const VelocityGrid& grid, std::span<const double> h, int j, int m) {
    double s = 0.0;
    for (int i = 0; i < grid.n_nodes(); ++i) {
        Vec3 v = grid.node(i);
        s += h[i] * (v[j] * v[m] - 1.0) * sqrt_maxwellian(v);
    }
    return s * grid.quadrature_weight();
}

double lambda_moment(const VelocityGrid& grid, std::span<const double> h, int j) {
    double s = 0.0;
    for (int i = 0; i < grid.n_nodes(); ++i) {
        Vec3 v = grid.node(i);
        double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        s += h[i] * (v2 - 5.0) * v[j] * sqrt_maxwellian(v);
    }
    return 0.1 * s * grid.quadrature_weight();
}

FluidMoments fluid_moments(const PhaseGrid& g, const DistState& f, const Projector& proj) {
    FluidMoments fm;
    int nc = g.n_cells();
    for (int j = 0; j < 3; ++j) {
        fm.lambda[j].assign(nc, 0.0);
        fm.g_vec[j].assign(nc, 0.0);
        for (int m = 0; m < 3; ++m) fm.theta[j][m].assign(nc, 0.0);
    }
    int n = g.n_nodes();
    std::vector<double> micro_sum(n), micro_diff(n), pfp(n), pfm(n);
    double wt = g.vgrid.quadrature_weight();
    for (int cell = 0; cell < nc; ++cell) {
        auto fp = f.species_cell(g, 0, cell);
        auto fmn = f.species_cell(g, 1, cell);
        proj.apply(fp, fmn, pfp, pfm);
        for (int i = 0; i < n; ++i) {
            micro_sum[i] = (fp[i] - pfp[i]) + (fmn[i] - pfm[i]);
            micro_diff[i] = (fp[i] - pfp[i]) - (fmn[i] - pfm[i]);
        }
        for (int j = 0; j < 3; ++j) {
            for (int m = j; m < 3; ++m) {
                double t = theta_moment(g.vgrid, micro_sum, j, m);
                fm.theta[j][m][cell] = t;
                fm.theta[m][j][cell] = t;
            }
            fm.lambda[j][cell] = lambda_moment(g.vgrid, micro_sum, j);
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                Vec3 v = g.vgrid.node(i);
                s += micro_diff[i] * v[j] * sqrt_maxwellian(v);
            }
            fm.g_vec[j][cell] = s * wt;
        }
    }
    return fm;
}

}  // namespace vpl
