#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace vpl {

Vec3 reflect(const Vec3& v, const Vec3& n) {
    double vn = v[0] * n[0] + v[1] * n[1] + v[2] * n[2];
    return {v[0] - 2.0 * n[0] * vn, v[1] - 2.0 * n[1] * vn, v[2] - 2.0 * n[2] * vn};
}

FaceSide classify_face_velocity(const BoundaryFace& face, const Vec3& v) {
    double vn = v[face.axis] * face.sign;
    if (vn < 0.0) return FaceSide::incoming;
    if (vn > 0.0) return FaceSide::outgoing;
    return FaceSide::grazing;
}

VelocityGrid::VelocityGrid(int n_v_, double v_max_) : n_v(n_v_), v_max(v_max_) {
    if (n_v < 4 || n_v % 2 != 0)
        throw ConfigError("velocity grid: n_v must be even and >= 4, got " + std::to_string(n_v));
    if (v_max < 5.0)
        throw ConfigError("velocity grid: v_max must be >= 5 (Maxwellian moment accuracy), got " +
                          std::to_string(v_max));
    h_v = 2.0 * v_max / n_v;
    coords.resize(n_v);
    for (int k = 0; k < n_v; ++k) coords[k] = (k + 0.5) * h_v - v_max;
}

int VelocityGrid::reflect_index(int idx, int axis) const {
    int k[3];
    k[2] = idx % n_v;
    k[1] = (idx / n_v) % n_v;
    k[0] = idx / (n_v * n_v);
    k[axis] = n_v - 1 - k[axis];
    return index(k[0], k[1], k[2]);
}

VelocityGrid build_velocity_grid(int n_v, double v_max) { return VelocityGrid(n_v, v_max); }

namespace {

// nearest lattice index of x/h, error if x is off-lattice
int lattice_index(double x, double h, const std::string& what) {
    double q = x / h;
    int i = static_cast<int>(std::lround(q));
    if (std::abs(q - i) > 1e-9 * std::max(1.0, std::abs(q)))
        throw ConfigError("domain: " + what + " = " + std::to_string(x) +
                          " is not an integer multiple of h_x");
    return i;
}

}  // namespace

SpatialDomain build_domain(const std::vector<Box>& boxes, double h_x, int active_dims) {
    if (boxes.empty()) throw ConfigError("domain: no boxes given");
    if (h_x <= 0.0) throw ConfigError("domain: h_x must be positive");
    if (active_dims < 1 || active_dims > 3)
        throw ConfigError("domain: active_dims must be 1, 2 or 3");

    SpatialDomain dom;
    dom.boxes = boxes;
    dom.h_x = h_x;
    dom.active_dims = active_dims;

    for (size_t b = 0; b < boxes.size(); ++b)
        for (int d = 0; d < 3; ++d)
            if (!(boxes[b].hi[d] - boxes[b].lo[d] > 0.0))
                throw ConfigError("domain: box " + std::to_string(b) + " axis " +
                                  std::to_string(d) + " has non-positive extent");

    // passive axes must agree across boxes so the homogeneous volume factor is global
    for (size_t b = 1; b < boxes.size(); ++b)
        for (int d = active_dims; d < 3; ++d)
            if (boxes[b].lo[d] != boxes[0].lo[d] || boxes[b].hi[d] != boxes[0].hi[d])
                throw ConfigError("domain: box " + std::to_string(b) +
                                  " passive axis " + std::to_string(d) +
                                  " extent differs from box 0 (required for active_dims < 3)");

    // pairwise interior overlap
    for (size_t a = 0; a < boxes.size(); ++a)
        for (size_t b = a + 1; b < boxes.size(); ++b) {
            bool overlap = true;
            for (int d = 0; d < 3; ++d)
                overlap &= boxes[a].lo[d] < boxes[b].hi[d] && boxes[b].lo[d] < boxes[a].hi[d];
            if (overlap)
                throw ConfigError("domain: boxes " + std::to_string(a) + " and " +
                                  std::to_string(b) + " have overlapping interiors");
        }

    // enumerate lattice cells box by box; lattice index is global (origin 0)
    std::map<std::array<int, 3>, int> cell_of;
    for (size_t b = 0; b < boxes.size(); ++b) {
        std::array<int, 3> ilo{0, 0, 0}, ihi{1, 1, 1};
        for (int d = 0; d < active_dims; ++d) {
            ilo[d] = lattice_index(boxes[b].lo[d], h_x, "box " + std::to_string(b) + " lo");
            ihi[d] = lattice_index(boxes[b].hi[d], h_x, "box " + std::to_string(b) + " hi");
        }
        for (int i1 = ilo[0]; i1 < ihi[0]; ++i1)
            for (int i2 = ilo[1]; i2 < ihi[1]; ++i2)
                for (int i3 = ilo[2]; i3 < ihi[2]; ++i3)
                    cell_of[{i1, i2, i3}] = 0;  // filled after sort
    }

    int idx = 0;
    for (auto& kv : cell_of) kv.second = idx++;  // std::map iterates lexicographically

    dom.cell_coords.resize(cell_of.size());
    dom.cell_centers.resize(cell_of.size());
    for (const auto& kv : cell_of) {
        dom.cell_coords[kv.second] = kv.first;
        Vec3 c{0.0, 0.0, 0.0};
        for (int d = 0; d < 3; ++d) {
            if (d < active_dims)
                c[d] = (kv.first[d] + 0.5) * h_x;
            else
                c[d] = 0.5 * (boxes[0].lo[d] + boxes[0].hi[d]);
        }
        dom.cell_centers[kv.second] = c;
    }

    double passive_vol = 1.0, passive_area_axis[3] = {1.0, 1.0, 1.0};
    for (int d = active_dims; d < 3; ++d) passive_vol *= boxes[0].hi[d] - boxes[0].lo[d];
    dom.cell_volume = passive_vol;
    for (int d = 0; d < active_dims; ++d) dom.cell_volume *= h_x;
    // face area: volume / h_x along the face normal (uniform for all faces)
    (void)passive_area_axis;
    dom.face_area = dom.cell_volume / h_x;

    for (int d = 0; d < 3; ++d)
        for (int s = 0; s < 2; ++s) dom.nbr[d][s].assign(dom.n_cells(), -1);

    for (const auto& kv : cell_of) {
        for (int d = 0; d < active_dims; ++d)
            for (int s = 0; s < 2; ++s) {
                auto key = kv.first;
                key[d] += (s == 0) ? -1 : 1;
                auto it = cell_of.find(key);
                if (it != cell_of.end()) {
                    dom.nbr[d][s][kv.second] = it->second;
                } else {
                    BoundaryFace f;
                    f.axis = d;
                    f.sign = (s == 0) ? -1 : 1;
                    f.cell = kv.second;
                    dom.faces.push_back(f);
                }
            }
    }
    return dom;
}

}  // namespace vpl
