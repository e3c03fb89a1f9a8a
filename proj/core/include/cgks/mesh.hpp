#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "cgks/geometry.hpp"

namespace cgks {

// Compact stencil around a cell: itself, 6 face neighbors, 12 edge neighbors.
// Order is frozen; reconstruction operators and DOF exchange rely on it.
inline constexpr std::array<std::array<int, 3>, 19> kStencilOffsets = {{
    {0, 0, 0},
    {-1, 0, 0},
    {1, 0, 0},
    {0, -1, 0},
    {0, 1, 0},
    {0, 0, -1},
    {0, 0, 1},
    {-1, -1, 0},
    {1, -1, 0},
    {-1, 1, 0},
    {1, 1, 0},
    {-1, 0, -1},
    {1, 0, -1},
    {-1, 0, 1},
    {1, 0, 1},
    {0, -1, -1},
    {0, 1, -1},
    {0, -1, 1},
    {0, 1, 1},
}};

// kStencilOffsets[1 + 2*axis + side] is the face neighbor (side 0 = low).
inline constexpr int face_neighbor_slot(int axis, int side) { return 1 + 2 * axis + side; }

// Edge neighbors come in three groups of four; group g spans the two axes
// != edge_axis(g). Within a group the sign order is (-,-), (+,-), (-,+), (+,+).
inline constexpr int edge_group_axis(int group) { return group == 0 ? 2 : (group == 1 ? 1 : 0); }
inline constexpr int edge_neighbor_slot(int group, int member) { return 7 + 4 * group + member; }

// Plane axes of a face with normal along `axis`, cyclically ordered so that
// d(gp)/ds x d(gp)/dt points along +axis.
inline constexpr std::array<int, 2> face_plane_axes(int axis) {
    return {(axis + 1) % 3, (axis + 2) % 3};
}

struct Index3 {
    int i = 0, j = 0, k = 0;
    int& operator[](int a) { return a == 0 ? i : (a == 1 ? j : k); }
    int operator[](int a) const { return a == 0 ? i : (a == 1 ? j : k); }
    friend bool operator==(const Index3&, const Index3&) = default;
};

struct CellGeometry {
    double volume = 0.0;
    Vec3 centroid{};  // valid per cell on distorted meshes only; the shared
                      // uniform template stores cell 0's (see cell_centroid)
    Mat3 J0;      // columns: edge-adjacent nodes minus base node
    Mat3 J0inv;
    double detJ0 = 0.0;
    std::array<double, 3> h{};             // per-direction length scales (J0 column norms)
    std::array<double, 19> C{};            // volume-ratio factors of the stencil cells
    std::array<double, 12> line_length{};  // Gauss-point connector lengths, 4 per axis
};

struct FaceGeometry {
    std::array<Vec3, 4> gp;        // physical quadrature points
    std::array<Vec3, 4> normal;    // unit normals, oriented toward +axis
    std::array<double, 4> weight;  // area fractions, sum to 1
    double area = 0.0;
};

// Structured hexahedral mesh with trilinear cells. Faces are stored once per
// axis on the low side of each cell; along a periodic axis the high face of
// the last cell wraps to index 0 with a translation shift.
class StructuredMesh {
public:
    int n(int axis) const { return dims_[axis]; }
    const std::array<int, 3>& dims() const { return dims_; }
    int cell_count() const { return dims_[0] * dims_[1] * dims_[2]; }
    bool periodic(int axis) const { return periodic_[axis]; }
    bool uniform() const { return uniform_; }

    const Vec3& domain_lo() const { return lo_; }
    const Vec3& domain_hi() const { return hi_; }
    double period(int axis) const { return hi_[axis] - lo_[axis]; }

    int cell_id(const Index3& c) const { return c.i + dims_[0] * (c.j + dims_[1] * c.k); }
    Index3 cell_index(int id) const {
        return {id % dims_[0], (id / dims_[0]) % dims_[1], id / (dims_[0] * dims_[1])};
    }

    // Wraps per-axis; offsets must stay within one period. Returns the
    // neighbor id and the translation that moves its stored geometry next to
    // the base cell.
    std::pair<int, Vec3> neighbor_with_shift(const Index3& base,
                                             const std::array<int, 3>& off) const;

    const CellGeometry& cell_geometry(int id) const {
        return uniform_ ? cells_[0] : cells_[id];
    }
    Vec3 cell_base_node(int id) const;  // node at the cell's low corner
    Vec3 cell_centroid(int id) const;

    int face_count(int axis) const {
        int e[3] = {dims_[0], dims_[1], dims_[2]};
        e[axis] += periodic_[axis] ? 0 : 1;
        return e[0] * e[1] * e[2];
    }
    int face_id(int axis, const Index3& f) const {
        const int nx = dims_[0] + ((axis == 0 && !periodic_[0]) ? 1 : 0);
        const int ny = dims_[1] + ((axis == 1 && !periodic_[1]) ? 1 : 0);
        return f.i + nx * (f.j + ny * f.k);
    }
    const FaceGeometry& face_geometry(int axis, int fid) const {
        return uniform_ ? faces_[axis][0] : faces_[axis][fid];
    }
    // Physical position of quadrature point g on a face. On uniform meshes
    // the shared FaceGeometry holds the positions of face 0 only; this adds
    // the lattice offset.
    Vec3 face_gp(int axis, int fid, int g) const;
    // Physical quadrature point of a face, as seen from a cell whose stored
    // face wrapped around a periodic axis: stored point plus `shift`.
    struct CellFace {
        int fid = 0;
        Vec3 shift{};
    };
    CellFace cell_face(const Index3& c, int axis, int side) const;

    Vec3 node(int i, int j, int k) const;
    int node_count(int axis) const { return dims_[axis] + 1; }

    friend StructuredMesh build_cartesian_mesh(const std::array<int, 3>& dims, const Vec3& lo,
                                               const Vec3& hi,
                                               const std::array<bool, 3>& periodic);
    friend StructuredMesh build_distorted_mesh(int n, double amplitude, double length_scale);

private:
    std::array<int, 3> dims_{};
    std::array<bool, 3> periodic_{};
    Vec3 lo_, hi_;
    bool uniform_ = false;
    Vec3 spacing_;                        // uniform meshes only
    std::vector<Vec3> nodes_;             // distorted meshes only
    std::vector<CellGeometry> cells_;     // one entry when uniform
    std::array<std::vector<FaceGeometry>, 3> faces_;  // one entry per axis when uniform
};

// Uniform axis-aligned mesh. Each periodic axis needs >= 2 cells, each
// non-periodic axis >= 3; extents must be positive.
StructuredMesh build_cartesian_mesh(const std::array<int, 3>& dims, const Vec3& lo, const Vec3& hi,
                                    const std::array<bool, 3>& periodic);

// Periodic n^3 mesh on [-pi L, pi L]^3 with nodes displaced by
//   x += A L sin(x/L) sin(y/L),  y += A L sin(x/L) sin(y/L),  z unchanged.
// Rejects amplitudes that fold cells over (non-positive volumes or jacobians).
StructuredMesh build_distorted_mesh(int n, double amplitude, double length_scale);

// Volume of a trilinear cell given its 8 corners in lexicographic order
// (index i + 2j + 4k for corner signs along x, y, z). Signed: negative when
// the corner ordering is inverted.
double transformed_cell_volume(const std::array<Vec3, 8>& corners);

// Centroid of a trilinear cell, exact for the trilinear map.
Vec3 trilinear_cell_centroid(const std::array<Vec3, 8>& corners);

// Frame jacobian of a cell from its 8 corners: columns are the three
// edge-adjacent corners minus the base corner.
Mat3 cell_jacobian(const std::array<Vec3, 8>& corners);

// Trilinear map of a cell on the reference cube [-1/2, 1/2]^3 and its
// jacobian, from the 8 corners in lexicographic order.
Vec3 trilinear_point(const std::array<Vec3, 8>& corners, const Vec3& s);
Mat3 trilinear_jacobian(const std::array<Vec3, 8>& corners, const Vec3& s);

}  // namespace cgks
