/*
 * Phase-space state containers shared by all modules.
 *
 * DistState stores the two-species perturbation f = [f_+, f_-] sampled on
 * the product grid, layout [species][cell][v1][v2][v3] slowest-to-fastest.
 * FieldState stores the zero-mean potential and E = -grad phi per cell.
 */
#pragma once

#include <cstring>
#include <span>
#include <vector>

#include "geometry.hpp"

namespace vpl {

struct PhaseGrid {
    SpatialDomain domain;
    VelocityGrid vgrid;

    int n_cells() const { return domain.n_cells(); }
    int n_nodes() const { return vgrid.n_nodes(); }
    std::size_t species_stride() const {
        return static_cast<std::size_t>(n_cells()) * n_nodes();
    }
};

struct DistState {
    std::vector<double> data;  // size 2 * n_cells * n_nodes
    double time = 0.0;

    DistState() = default;
    explicit DistState(const PhaseGrid& g, double t = 0.0)
        : data(2 * g.species_stride(), 0.0), time(t) {}

    std::span<double> species_cell(const PhaseGrid& g, int s, int cell) {
        return {data.data() + (s * g.n_cells() + cell) * static_cast<std::size_t>(g.n_nodes()),
                static_cast<std::size_t>(g.n_nodes())};
    }
    std::span<const double> species_cell(const PhaseGrid& g, int s, int cell) const {
        return {data.data() + (s * g.n_cells() + cell) * static_cast<std::size_t>(g.n_nodes()),
                static_cast<std::size_t>(g.n_nodes())};
    }
    void scale(double a) {
        for (auto& x : data) x *= a;
    }
    void axpy(double a, const DistState& other) {
        for (std::size_t i = 0; i < data.size(); ++i) data[i] += a * other.data[i];
    }
};

struct FieldState {
    std::vector<double> phi;                 // per cell, zero mean
    std::array<std::vector<double>, 3> e;    // E = -grad phi per cell
    double mean_phi = 0.0;

    FieldState() = default;
    explicit FieldState(int n_cells) : phi(n_cells, 0.0) {
        for (auto& c : e) c.assign(n_cells, 0.0);
    }
};

}  // namespace vpl
