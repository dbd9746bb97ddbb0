#include "field.hpp"

#include <cmath>

namespace vpl {

void PoissonSolver::apply_laplacian(const std::vector<double>& phi,
                                    std::vector<double>& out) const {
    const auto& d = *dom_;
    const double ih2 = 1.0 / (d.h_x * d.h_x);
    out.assign(d.n_cells(), 0.0);
    for (int c = 0; c < d.n_cells(); ++c) {
        double acc = 0.0;
        for (int ax = 0; ax < d.active_dims; ++ax)
            for (int side = 0; side < 2; ++side) {
                int nb = d.neighbor(c, ax, side);
                if (nb >= 0) acc += phi[nb] - phi[c];  // Neumann: missing neighbor mirrors phi[c]
            }
        out[c] = acc * ih2;
    }
}

namespace {
double vol_mean(const std::vector<double>& u) {
    double s = 0.0;
    for (double x : u) s += x;
    return s / static_cast<double>(u.size());  // uniform cells
}
void remove_mean(std::vector<double>& u) {
    double m = vol_mean(u);
    for (double& x : u) x -= m;
}
double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
}  // namespace

FieldState PoissonSolver::solve(const std::vector<double>& rho) const {
    const auto& d = *dom_;
    const int n = d.n_cells();
    double norm_rho = std::sqrt(dot(rho, rho) * d.cell_volume);
    double mean = vol_mean(rho);
    double mean_integral = mean * d.total_volume();
    if (std::abs(mean_integral) > 1e-8 * std::max(norm_rho, 1e-300))
        throw SolveError("poisson: incompatible right-hand side, mean integral " +
                         std::to_string(mean_integral) + " exceeds 1e-8 |rho| = " +
                         std::to_string(1e-8 * norm_rho));

    std::vector<double> b(rho);
    remove_mean(b);

    FieldState out(n);
    double nb2 = dot(b, b);
    if (nb2 == 0.0) return out;  // phi = 0, E = 0

    // CG on A phi = b with A = -Laplacian (SPD on the zero-mean subspace)
    std::vector<double>&x = out.phi;
    std::vector<double> r(b), p(b), ap(n);
    double rr = nb2;
    const double tol2 = rel_tolerance * rel_tolerance * nb2;
    int max_iter = 20 * n + 100;
    int it = 0;
    for (; it < max_iter && rr > tol2; ++it) {
        apply_laplacian(p, ap);
        for (double& v : ap) v = -v;
        double alpha = rr / dot(p, ap);
        for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
        for (int i = 0; i < n; ++i) r[i] -= alpha * ap[i];
        remove_mean(r);  // deflate the constant null space
        double rr_new = dot(r, r);
        double beta = rr_new / rr;
        rr = rr_new;
        for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    if (rr > tol2)
        throw SolveError("poisson: CG stagnated, residual " + std::to_string(std::sqrt(rr / nb2)));
    remove_mean(x);
    out.mean_phi = vol_mean(x);
    electric_field(d, x, out);
    return out;
}

void electric_field(const SpatialDomain& dom, const std::vector<double>& phi, FieldState& out) {
    const double ih2 = 0.5 / dom.h_x;
    for (int ax = 0; ax < 3; ++ax) {
        out.e[ax].assign(dom.n_cells(), 0.0);
        if (!dom.axis_active(ax)) continue;
        for (int c = 0; c < dom.n_cells(); ++c) {
            int lo = dom.neighbor(c, ax, 0), hi = dom.neighbor(c, ax, 1);
            double pl = lo >= 0 ? phi[lo] : phi[c];  // even mirror: d_n phi = 0
            double ph = hi >= 0 ? phi[hi] : phi[c];
            out.e[ax][c] = -(ph - pl) * ih2;
        }
    }
}

double field_energy(const SpatialDomain& dom, const FieldState& f) {
    double s = 0.0;
    for (int c = 0; c < dom.n_cells(); ++c)
        s += f.e[0][c] * f.e[0][c] + f.e[1][c] * f.e[1][c] + f.e[2][c] * f.e[2][c];
    return s * dom.cell_volume;
}

}  // namespace vpl
