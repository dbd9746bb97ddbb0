/*
 * Discrete velocity-space convolution backend (internal).
 *
 * Kernels kern^{ij}[dz] = phi^{ij}(dz h_v) h_v^3 for dz != 0, with the
 * singular dz = 0 cell replaced by its exact average
 * (2/3) delta_ij Integral_cell |z|^{gamma+2} (chi) dz.  Families: the full
 * kernel, the large-|z| complement phi (1-chi) entering K_1 (built by
 * subtraction, so the chi split recombines exactly), and the sparse
 * small-|z| part phi chi entering A_1.
 *
 * Evaluation runs through zero-padded FFTs (exact linear convolution up to
 * roundoff); a direct O(n_v^6) reference sum is selectable globally for
 * validation.
 */
#pragma once

#include <fftw3.h>

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "landau.hpp"

namespace vpl {

class ConvEngine {
  public:
    ConvEngine(const VelocityGrid& grid, const PotentialParams& params, const SplitParams& split,
               double i_cell, double i_cell_chi);
    ~ConvEngine();
    ConvEngine(const ConvEngine&) = delete;
    ConvEngine& operator=(const ConvEngine&) = delete;

    enum Family { kFull = 0, kK1 = 1 };

    // out6[c] = kern^{(c)} * a, component order 11,22,33,12,13,23
    void conv_scalar6(Family fam, std::span<const double> a,
                      std::array<std::vector<double>, 6>& out6) const;
    // out3[i] = sum_j kern^{ij} * in3[j]
    void conv_vec3(Family fam, const std::array<std::vector<double>, 3>& in3,
                   std::array<std::vector<double>, 3>& out3) const;
    // sparse A1 kernel (phi chi): out3[i] = sum_j kernA1^{ij} * in3[j]
    void conv_vec3_a1(const std::array<std::vector<double>, 3>& in3,
                      std::array<std::vector<double>, 3>& out3) const;

    int n() const { return n_; }

  private:
    struct Workspace;
    Workspace& ws() const;

    void conv_direct(const std::vector<double>* kern, std::span<const double> a,
                     std::array<std::vector<double>, 6>& out6) const;
    void conv_direct_vec3(const std::vector<double>* kern,
                          const std::array<std::vector<double>, 3>& in3,
                          std::array<std::vector<double>, 3>& out3) const;

    int n_ = 0, pad_ = 0, off_ = 0, nk_ = 0;
    std::size_t spec_size_ = 0;
    std::array<std::vector<double>, 6> kern_full_, kern_k1_;
    std::array<std::vector<std::complex<double>>, 6> khat_full_, khat_k1_;
    struct A1Entry {
        int dz[3];
        double m[6];
    };
    std::vector<A1Entry> a1_entries_;

    fftw_plan plan_fwd_ = nullptr, plan_bwd_ = nullptr;
};

}  // namespace vpl
