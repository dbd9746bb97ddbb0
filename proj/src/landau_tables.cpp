/*
 * Kernel evaluation, singularity-aware cell integrals, convolution engine
 * and sigma-table construction.
 */
#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>

#include "conv_engine.hpp"
#include "landau.hpp"

namespace vpl {

namespace {
constexpr double kPi = 3.14159265358979323846;
// component order 11,22,33,12,13,23
constexpr int kSymI[6] = {0, 1, 2, 0, 0, 1};
constexpr int kSymJ[6] = {0, 1, 2, 1, 2, 2};

bool g_direct_mode = false;
}  // namespace

void set_convolution_reference_mode(bool direct) { g_direct_mode = direct; }
bool convolution_reference_mode() { return g_direct_mode; }

std::array<std::array<double, 3>, 3> phi_matrix(const Vec3& v, const PotentialParams& params) {
    double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    std::array<std::array<double, 3>, 3> m{};
    if (r2 == 0.0) {
        if (params.gamma <= -2.0)
            throw std::domain_error("phi_matrix: singular at v = 0 for gamma <= -2");
        return m;  // |v|^{gamma+2} -> 0
    }
    double s = std::pow(r2, 0.5 * (params.gamma + 2.0));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            m[i][j] = ((i == j ? 1.0 : 0.0) - v[i] * v[j] / r2) * s;
    return m;
}

double chi_cutoff(double r, double eps) {
    if (r <= eps) return 1.0;
    if (r >= 2.0 * eps) return 0.0;
    auto rho = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    double t = (r - eps) / eps;  // in (0,1)
    return rho(1.0 - t) / (rho(t) + rho(1.0 - t));
}

namespace {

// distance from the origin to the boundary of the cube [-a,a]^3 along
// direction w (|w| = 1); the cube is star-shaped about 0
double ray_exit(const Vec3& w, double a) {
    double m = std::max({std::abs(w[0]), std::abs(w[1]), std::abs(w[2])});
    return a / m;
}

// Integral over the mesh cell [-h/2,h/2]^3 of |z|^{gamma+2} g(|z|) with
// g == 1 or g == chi; exact in the radial direction, composite Simpson in
// the radial cutoff region and a fine product rule over angles.
double cell_radial_integral(double h, double gamma, bool with_chi, double eps) {
    const double a = 0.5 * h;
    const int nt = 96, np = 192;  // polar x azimuthal panels (one octant)
    double total = 0.0;
    for (int it = 0; it < nt; ++it) {
        double c0 = static_cast<double>(it) / nt, c1 = static_cast<double>(it + 1) / nt;
        double cm = 0.5 * (c0 + c1);            // cos(theta) midpoint, octant: in [0,1]
        double dc = (c1 - c0);
        double st = std::sqrt(std::max(0.0, 1.0 - cm * cm));
        for (int ip = 0; ip < np; ++ip) {
            double ph = (ip + 0.5) * (0.5 * kPi) / np;
            Vec3 w{st * std::cos(ph), st * std::sin(ph), cm};
            double R = ray_exit(w, a);
            double inner;
            if (!with_chi) {
                inner = std::pow(R, gamma + 5.0) / (gamma + 5.0);
            } else {
                double r1 = std::min(R, eps);
                inner = std::pow(r1, gamma + 5.0) / (gamma + 5.0);
                double r2 = std::min(R, 2.0 * eps);
                if (r2 > r1) {
                    const int ns = 200;  // Simpson panels over the bump shoulder
                    double hs = (r2 - r1) / (2 * ns);
                    double acc = 0.0;
                    auto f = [&](double r) {
                        return std::pow(r, gamma + 4.0) * chi_cutoff(r, eps);
                    };
                    for (int k = 0; k < ns; ++k) {
                        double x0 = r1 + 2 * k * hs;
                        acc += f(x0) + 4.0 * f(x0 + hs) + f(x0 + 2 * hs);
                    }
                    inner += acc * hs / 3.0;
                }
            }
            total += inner * dc * (0.5 * kPi / np);
        }
    }
    return 8.0 * total;  // octant symmetry
}

struct SymMat {
    double m[6];
};

SymMat phi_sym(const Vec3& z, double gamma) {
    SymMat out{};
    double r2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
    double s = std::pow(r2, 0.5 * (gamma + 2.0));
    for (int c = 0; c < 6; ++c) {
        int i = kSymI[c], j = kSymJ[c];
        out.m[c] = ((i == j ? 1.0 : 0.0) - z[i] * z[j] / r2) * s;
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// convolution engine

namespace {
std::mutex g_fftw_mutex;  // FFTW plan creation is not thread-safe
}

struct ConvEngine::Workspace {
    int pad = 0;
    std::vector<double> real;
    std::vector<std::complex<double>> spec, acc0, acc1, acc2;
    void ensure(int p, std::size_t nspec) {
        if (pad == p) return;
        pad = p;
        real.assign(static_cast<std::size_t>(p) * p * p, 0.0);
        spec.assign(nspec, {});
        acc0.assign(nspec, {});
        acc1.assign(nspec, {});
        acc2.assign(nspec, {});
    }
};

ConvEngine::Workspace& ConvEngine::ws() const {
    thread_local Workspace w;
    w.ensure(pad_, spec_size_);
    return w;
}

ConvEngine::ConvEngine(const VelocityGrid& grid, const PotentialParams& params,
                       const SplitParams& split, double i_cell, double i_cell_chi) {
    n_ = grid.n_v;
    nk_ = 2 * n_ - 1;
    pad_ = 2 * n_;
    off_ = n_ - 1;
    spec_size_ = static_cast<std::size_t>(pad_) * pad_ * (pad_ / 2 + 1);

    const double h = grid.h_v;
    const double wt = grid.quadrature_weight();
    const std::size_t nk3 = static_cast<std::size_t>(nk_) * nk_ * nk_;
    for (int c = 0; c < 6; ++c) {
        kern_full_[c].assign(nk3, 0.0);
        kern_k1_[c].assign(nk3, 0.0);
    }

    for (int d1 = -off_; d1 <= off_; ++d1)
        for (int d2 = -off_; d2 <= off_; ++d2)
            for (int d3 = -off_; d3 <= off_; ++d3) {
                std::size_t idx =
                    (static_cast<std::size_t>(d1 + off_) * nk_ + (d2 + off_)) * nk_ + (d3 + off_);
                if (d1 == 0 && d2 == 0 && d3 == 0) {
                    // singular cell: exact cell average, isotropic by symmetry
                    for (int c = 0; c < 3; ++c) {
                        kern_full_[c][idx] = (2.0 / 3.0) * i_cell;
                        kern_k1_[c][idx] = (2.0 / 3.0) * (i_cell - i_cell_chi);
                    }
                    A1Entry e{};
                    e.dz[0] = e.dz[1] = e.dz[2] = 0;
                    for (int c = 0; c < 3; ++c) e.m[c] = (2.0 / 3.0) * i_cell_chi;
                    a1_entries_.push_back(e);
                    continue;
                }
                Vec3 z{d1 * h, d2 * h, d3 * h};
                SymMat pm = phi_sym(z, params.gamma);
                double r = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
                double cchi = chi_cutoff(r, split.eps);
                bool has_a1 = cchi > 0.0;
                A1Entry e{};
                e.dz[0] = d1;
                e.dz[1] = d2;
                e.dz[2] = d3;
                for (int c = 0; c < 6; ++c) {
                    double kf = pm.m[c] * wt;
                    double ka = kf * cchi;
                    kern_full_[c][idx] = kf;
                    kern_k1_[c][idx] = kf - ka;
                    e.m[c] = ka;
                }
                if (has_a1) a1_entries_.push_back(e);
            }

    // padded kernel spectra and plans
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    std::vector<double> buf(static_cast<std::size_t>(pad_) * pad_ * pad_, 0.0);
    std::vector<std::complex<double>> spec(spec_size_);
    plan_fwd_ = fftw_plan_dft_r2c_3d(pad_, pad_, pad_, buf.data(),
                                     reinterpret_cast<fftw_complex*>(spec.data()),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_bwd_ = fftw_plan_dft_c2r_3d(pad_, pad_, pad_, reinterpret_cast<fftw_complex*>(spec.data()),
                                     buf.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);

    auto load_kernel = [&](const std::vector<double>& kern,
                           std::vector<std::complex<double>>& khat) {
        std::fill(buf.begin(), buf.end(), 0.0);
        for (int d1 = -off_; d1 <= off_; ++d1)
            for (int d2 = -off_; d2 <= off_; ++d2)
                for (int d3 = -off_; d3 <= off_; ++d3) {
                    std::size_t src = (static_cast<std::size_t>(d1 + off_) * nk_ + (d2 + off_)) *
                                          nk_ + (d3 + off_);
                    int p1 = (d1 + pad_) % pad_, p2 = (d2 + pad_) % pad_, p3 = (d3 + pad_) % pad_;
                    buf[(static_cast<std::size_t>(p1) * pad_ + p2) * pad_ + p3] = kern[src];
                }
        khat.resize(spec_size_);
        fftw_execute_dft_r2c(plan_fwd_, buf.data(), reinterpret_cast<fftw_complex*>(khat.data()));
    };
    for (int c = 0; c < 6; ++c) {
        load_kernel(kern_full_[c], khat_full_[c]);
        load_kernel(kern_k1_[c], khat_k1_[c]);
    }
}

ConvEngine::~ConvEngine() {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    if (plan_fwd_) fftw_destroy_plan(plan_fwd_);
    if (plan_bwd_) fftw_destroy_plan(plan_bwd_);
}

namespace {
// map (i,j) -> symmetric component index
constexpr int kMap[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
}

void ConvEngine::conv_direct(const std::vector<double>* kern, std::span<const double> a,
                             std::array<std::vector<double>, 6>& out6) const {
    const int n = n_;
    for (int c = 0; c < 6; ++c) out6[c].assign(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int x1 = 0; x1 < n; ++x1)
        for (int x2 = 0; x2 < n; ++x2)
            for (int x3 = 0; x3 < n; ++x3) {
                std::size_t vi = (static_cast<std::size_t>(x1) * n + x2) * n + x3;
                double acc[6] = {0, 0, 0, 0, 0, 0};
                for (int y1 = 0; y1 < n; ++y1)
                    for (int y2 = 0; y2 < n; ++y2) {
                        std::size_t krow =
                            (static_cast<std::size_t>(x1 - y1 + off_) * nk_ + (x2 - y2 + off_)) *
                            nk_ + off_ + x3;
                        std::size_t arow = (static_cast<std::size_t>(y1) * n + y2) * n;
                        for (int y3 = 0; y3 < n; ++y3) {
                            double g = a[arow + y3];
                            std::size_t ki = krow - y3;
                            for (int c = 0; c < 6; ++c) acc[c] += kern[c][ki] * g;
                        }
                        for (int c = 0; c < 6; ++c) {
                            out6[c][vi] += acc[c];
                            acc[c] = 0.0;
                        }
                    }
            }
}

void ConvEngine::conv_direct_vec3(const std::vector<double>* kern,
                                  const std::array<std::vector<double>, 3>& in3,
                                  std::array<std::vector<double>, 3>& out3) const {
    std::array<std::vector<double>, 6> tmp;
    for (int i = 0; i < 3; ++i) out3[i].assign(static_cast<std::size_t>(n_) * n_ * n_, 0.0);
    for (int j = 0; j < 3; ++j) {
        conv_direct(kern, in3[j], tmp);
        for (int i = 0; i < 3; ++i) {
            const auto& t = tmp[kMap[i][j]];
            for (std::size_t k = 0; k < out3[i].size(); ++k) out3[i][k] += t[k];
        }
    }
}

namespace {
// pack n^3 nodal array into pad^3 buffer (zero fill)
void pack(std::span<const double> in, std::vector<double>& buf, int n, int pad) {
    std::fill(buf.begin(), buf.end(), 0.0);
    for (int x1 = 0; x1 < n; ++x1)
        for (int x2 = 0; x2 < n; ++x2) {
            const double* src = in.data() + (static_cast<std::size_t>(x1) * n + x2) * n;
            double* dst = buf.data() + (static_cast<std::size_t>(x1) * pad + x2) * pad;
            std::memcpy(dst, src, sizeof(double) * n);
        }
}
void unpack(const std::vector<double>& buf, std::vector<double>& out, int n, int pad,
            double scale) {
    out.resize(static_cast<std::size_t>(n) * n * n);
    for (int x1 = 0; x1 < n; ++x1)
        for (int x2 = 0; x2 < n; ++x2) {
            const double* src = buf.data() + (static_cast<std::size_t>(x1) * pad + x2) * pad;
            double* dst = out.data() + (static_cast<std::size_t>(x1) * n + x2) * n;
            for (int x3 = 0; x3 < n; ++x3) dst[x3] = src[x3] * scale;
        }
}
}  // namespace

void ConvEngine::conv_scalar6(Family fam, std::span<const double> a,
                              std::array<std::vector<double>, 6>& out6) const {
    const auto& kern = (fam == kFull) ? kern_full_ : kern_k1_;
    if (g_direct_mode) {
        conv_direct(kern.data(), a, out6);
        return;
    }
    const auto& khat = (fam == kFull) ? khat_full_ : khat_k1_;
    auto& w = ws();
    pack(a, w.real, n_, pad_);
    fftw_execute_dft_r2c(plan_fwd_, w.real.data(),
                         reinterpret_cast<fftw_complex*>(w.spec.data()));
    double scale = 1.0 / (static_cast<double>(pad_) * pad_ * pad_);
    for (int c = 0; c < 6; ++c) {
        for (std::size_t k = 0; k < spec_size_; ++k) w.acc0[k] = w.spec[k] * khat[c][k];
        fftw_execute_dft_c2r(plan_bwd_, reinterpret_cast<fftw_complex*>(w.acc0.data()),
                             w.real.data());
        unpack(w.real, out6[c], n_, pad_, scale);
    }
}

void ConvEngine::conv_vec3(Family fam, const std::array<std::vector<double>, 3>& in3,
                           std::array<std::vector<double>, 3>& out3) const {
    const auto& kern = (fam == kFull) ? kern_full_ : kern_k1_;
    if (g_direct_mode) {
        conv_direct_vec3(kern.data(), in3, out3);
        return;
    }
    const auto& khat = (fam == kFull) ? khat_full_ : khat_k1_;
    auto& w = ws();
    std::fill(w.acc0.begin(), w.acc0.end(), std::complex<double>{});
    std::fill(w.acc1.begin(), w.acc1.end(), std::complex<double>{});
    std::fill(w.acc2.begin(), w.acc2.end(), std::complex<double>{});
    std::complex<double>* acc[3] = {w.acc0.data(), w.acc1.data(), w.acc2.data()};
    for (int j = 0; j < 3; ++j) {
        pack(in3[j], w.real, n_, pad_);
        fftw_execute_dft_r2c(plan_fwd_, w.real.data(),
                             reinterpret_cast<fftw_complex*>(w.spec.data()));
        for (int i = 0; i < 3; ++i) {
            const auto& kh = khat[kMap[i][j]];
            for (std::size_t k = 0; k < spec_size_; ++k) acc[i][k] += w.spec[k] * kh[k];
        }
    }
    double scale = 1.0 / (static_cast<double>(pad_) * pad_ * pad_);
    for (int i = 0; i < 3; ++i) {
        fftw_execute_dft_c2r(plan_bwd_, reinterpret_cast<fftw_complex*>(acc[i]), w.real.data());
        unpack(w.real, out3[i], n_, pad_, scale);
    }
}

void ConvEngine::conv_vec3_a1(const std::array<std::vector<double>, 3>& in3,
                              std::array<std::vector<double>, 3>& out3) const {
    const int n = n_;
    for (int i = 0; i < 3; ++i) out3[i].assign(static_cast<std::size_t>(n) * n * n, 0.0);
    for (const auto& e : a1_entries_) {
        for (int x1 = std::max(0, e.dz[0]); x1 < std::min(n, n + e.dz[0]); ++x1)
            for (int x2 = std::max(0, e.dz[1]); x2 < std::min(n, n + e.dz[1]); ++x2) {
                int y1 = x1 - e.dz[0], y2 = x2 - e.dz[1];
                int x3lo = std::max(0, e.dz[2]), x3hi = std::min(n, n + e.dz[2]);
                std::size_t xrow = (static_cast<std::size_t>(x1) * n + x2) * n;
                std::size_t yrow = (static_cast<std::size_t>(y1) * n + y2) * n - e.dz[2];
                for (int x3 = x3lo; x3 < x3hi; ++x3) {
                    for (int i = 0; i < 3; ++i) {
                        double s = 0.0;
                        for (int j = 0; j < 3; ++j) s += e.m[kMap[i][j]] * in3[j][yrow + x3];
                        out3[i][xrow + x3] += s;
                    }
                }
            }
    }
}

// ---------------------------------------------------------------------------
// table construction

std::array<std::array<double, 3>, 3> sigma_eval(const VelocityGrid& grid,
                                                const PotentialParams& params, const Vec3& v) {
    std::array<std::array<double, 3>, 3> out{};
    const double h = grid.h_v;
    const double wt = grid.quadrature_weight();
    const int refine = 8;
    for (int i1 = 0; i1 < grid.n_v; ++i1)
        for (int i2 = 0; i2 < grid.n_v; ++i2)
            for (int i3 = 0; i3 < grid.n_v; ++i3) {
                Vec3 vp{grid.coords[i1], grid.coords[i2], grid.coords[i3]};
                Vec3 z{v[0] - vp[0], v[1] - vp[1], v[2] - vp[2]};
                double r = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
                if (r <= 2.0 * h) {
                    // subcell refinement close to the kernel singularity
                    double hh = h / refine;
                    for (int s1 = 0; s1 < refine; ++s1)
                        for (int s2 = 0; s2 < refine; ++s2)
                            for (int s3 = 0; s3 < refine; ++s3) {
                                Vec3 y{vp[0] + (s1 + 0.5) * hh - 0.5 * h,
                                       vp[1] + (s2 + 0.5) * hh - 0.5 * h,
                                       vp[2] + (s3 + 0.5) * hh - 0.5 * h};
                                Vec3 zz{v[0] - y[0], v[1] - y[1], v[2] - y[2]};
                                SymMat pm = phi_sym(zz, params.gamma);
                                double m = maxwellian(y) * hh * hh * hh;
                                for (int c = 0; c < 6; ++c) {
                                    out[kSymI[c]][kSymJ[c]] += pm.m[c] * m;
                                }
                            }
                } else {
                    SymMat pm = phi_sym(z, params.gamma);
                    double m = maxwellian(vp) * wt;
                    for (int c = 0; c < 6; ++c) out[kSymI[c]][kSymJ[c]] += pm.m[c] * m;
                }
            }
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) out[j][i] = out[i][j];
    return out;
}

CollisionTables build_tables(const VelocityGrid& grid, const PotentialParams& params,
                             const SplitParams& split) {
    if (params.gamma < -3.0 || params.gamma > 1.0)
        throw ConfigError("collision tables: gamma must lie in [-3, 1]");
    if (!(split.eps > 0.0) || !(split.eps < split.R) || split.R > grid.v_max * 1.7320508075688772 + 1e-12)
        throw ConfigError("collision tables: require 0 < eps < R <= sqrt(3) v_max");

    CollisionTables t;
    t.grid = grid;
    t.params = params;
    t.split = split;

    const int n = grid.n_nodes();
    t.mu.resize(n);
    t.smu.resize(n);
    t.inv_smu.resize(n);
    for (int d = 0; d < 3; ++d) t.vcoord[d].resize(n);
    t.mask_R.resize(n);
    for (int i = 0; i < n; ++i) {
        Vec3 v = grid.node(i);
        t.mu[i] = maxwellian(v);
        t.smu[i] = sqrt_maxwellian(v);
        t.inv_smu[i] = 1.0 / t.smu[i];
        for (int d = 0; d < 3; ++d) t.vcoord[d][i] = v[d];
        double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        t.mask_R[i] = r <= split.R ? 1.0 : 0.0;
    }

    t.cell_integral = cell_radial_integral(grid.h_v, params.gamma, false, 0.0);
    t.cell_integral_chi = cell_radial_integral(grid.h_v, params.gamma, true, split.eps);

    t.conv = std::make_shared<ConvEngine>(grid, params, split, t.cell_integral,
                                          t.cell_integral_chi);

    // sigma^{ij} = kern * mu
    t.conv->conv_scalar6(ConvEngine::kFull, t.mu, t.sigma);

    // sigma^i = sum_j kern^{ij} * (v_j/2 mu)
    std::array<std::vector<double>, 3> in3;
    for (int j = 0; j < 3; ++j) {
        in3[j].resize(n);
        for (int i = 0; i < n; ++i) in3[j][i] = 0.5 * t.vcoord[j][i] * t.mu[i];
    }
    t.conv->conv_vec3(ConvEngine::kFull, in3, t.sigma_vec);

    // d_k sigma^{ij} = -kern^{ij} * (v_k mu)
    for (int k = 0; k < 3; ++k) {
        std::vector<double> vkmu(n);
        for (int i = 0; i < n; ++i) vkmu[i] = t.vcoord[k][i] * t.mu[i];
        t.conv->conv_scalar6(ConvEngine::kFull, vkmu, t.dsigma[k]);
        for (int c = 0; c < 6; ++c)
            for (int i = 0; i < n; ++i) t.dsigma[k][c][i] = -t.dsigma[k][c][i];
    }

    // sum_i d_i sigma^i = sum_{ij} (d_i sigma^{ij}) v_j/2 + (1/2) tr sigma
    t.div_sigma_vec.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.5 * (t.sigma[0][i] + t.sigma[1][i] + t.sigma[2][i]);
        for (int a = 0; a < 3; ++a)
            for (int j = 0; j < 3; ++j)
                s += t.dsigma[a][kMap[a][j]][i] * 0.5 * t.vcoord[j][i];
        t.div_sigma_vec[i] = s;
    }

    // PSD sanity per node (sum of PSD rank-2 projectors with positive weights)
    for (int i = 0; i < n; ++i) {
        double d0 = t.sigma[0][i], d1 = t.sigma[1][i], d2 = t.sigma[2][i];
        double tol = -1e-12 * (d0 + d1 + d2);
        if (d0 < tol || d1 < tol || d2 < tol)
            throw std::runtime_error("collision tables: sigma diagonal negative (quadrature bug)");
    }

    // isotropy self-test at v = 0: off-diagonals vanish and the diagonal is
    // a multiple of the identity
    auto s0 = sigma_eval(grid, params, {0.0, 0.0, 0.0});
    double diag = (s0[0][0] + s0[1][1] + s0[2][2]) / 3.0;
    double dev = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            dev = std::max(dev, std::abs(s0[i][j] - (i == j ? diag : 0.0)));
    if (dev > 1e-3 * std::abs(diag))
        throw std::runtime_error("collision tables: isotropy self-test failed at v = 0, rel dev " +
                                 std::to_string(dev / std::abs(diag)));
    return t;
}

double weight_eval(const WeightSpec& spec, const Vec3& v) {
    double br = v_bracket(v);
    double expo = spec.l - spec.pot.weight_r() * spec.alpha_order -
                  spec.pot.weight_q() * spec.beta_order;
    double w = std::pow(br, expo);
    if (!spec.pot.hard()) w *= std::exp(spec.nu * br);
    return w;
}

}  // namespace vpl
