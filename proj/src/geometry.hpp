/*
 * Spatial domain (union of axis-aligned boxes) and velocity grid.
 *
 * The domain is a finite union of boxes whose extents are integer multiples
 * of a common mesh size h_x, so cell lattices of adjacent boxes match and
 * box-to-box interfaces carry no boundary faces.  Every outward normal is
 * +/- e_i for exactly one axis i.
 *
 * The velocity grid is cell-centered with an even point count per axis,
 *   v_k = (k + 1/2) h_v - v_max,
 * which makes v_i -> -v_i an exact grid symmetry: specular reflection maps
 * nodes to nodes and odd-in-v_i integrands cancel to machine precision.
 */
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vpl {

using Vec3 = std::array<double, 3>;

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct Box {
    Vec3 lo{0.0, 0.0, 0.0};
    Vec3 hi{1.0, 1.0, 1.0};
};

// v - 2 n (n . v); exact node-to-node map for axis normals.
Vec3 reflect(const Vec3& v, const Vec3& n);

enum class FaceSide { incoming, outgoing, grazing };

struct BoundaryFace {
    int axis = 0;      // normal is along this axis
    int sign = 1;      // +1: normal = +e_axis, -1: normal = -e_axis
    int cell = -1;     // adjacent interior cell
    Vec3 normal() const {
        Vec3 n{0.0, 0.0, 0.0};
        n[axis] = static_cast<double>(sign);
        return n;
    }
};

FaceSide classify_face_velocity(const BoundaryFace& face, const Vec3& v);

struct VelocityGrid {
    int n_v = 0;            // points per axis (even)
    double v_max = 0.0;     // truncation radius per axis
    double h_v = 0.0;
    std::vector<double> coords;  // per-axis node coordinates, size n_v

    VelocityGrid() = default;
    VelocityGrid(int n_v_, double v_max_);

    int n_nodes() const { return n_v * n_v * n_v; }
    double quadrature_weight() const { return h_v * h_v * h_v; }

    int index(int k1, int k2, int k3) const { return (k1 * n_v + k2) * n_v + k3; }
    Vec3 node(int idx) const {
        int k3 = idx % n_v, k2 = (idx / n_v) % n_v, k1 = idx / (n_v * n_v);
        return {coords[k1], coords[k2], coords[k3]};
    }
    // index of the node with component `axis` negated
    int reflect_index(int idx, int axis) const;
};

struct SpatialDomain {
    std::vector<Box> boxes;
    double h_x = 0.0;
    int active_dims = 1;

    // cells listed in lexicographic (i1,i2,i3) lattice order
    std::vector<std::array<int, 3>> cell_coords;   // global lattice coords
    std::vector<Vec3> cell_centers;
    // nbr[axis][side(0:-,1:+)][cell] = neighbor cell or -1 at a wall
    std::array<std::array<std::vector<int>, 2>, 3> nbr;
    std::vector<BoundaryFace> faces;
    double cell_volume = 0.0;    // includes passive-axis extents
    double face_area = 0.0;      // area element of one boundary face

    int n_cells() const { return static_cast<int>(cell_coords.size()); }
    bool axis_active(int axis) const { return axis < active_dims; }
    int neighbor(int cell, int axis, int side) const { return nbr[axis][side][cell]; }
    double total_volume() const { return cell_volume * n_cells(); }
};

// Validates boxes (no interior overlap, lattice alignment, matching passive
// extents), enumerates cells, neighbor links and boundary faces.
SpatialDomain build_domain(const std::vector<Box>& boxes, double h_x, int active_dims);

VelocityGrid build_velocity_grid(int n_v, double v_max);

}  // namespace vpl
