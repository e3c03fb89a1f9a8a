#include "cgks/mesh.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cgks/quadrature.hpp"

namespace cgks {

namespace {

// Trilinear shape functions on [-1/2, 1/2]^3, corners ordered i + 2j + 4k.
inline double corner_sign(int m, int axis) {
    return ((m >> axis) & 1) ? 1.0 : -1.0;
}

}  // namespace

Mat3 trilinear_jacobian(const std::array<Vec3, 8>& c, const Vec3& s) {
    Vec3 dx{}, dy{}, dz{};
    for (int m = 0; m < 8; ++m) {
        const double sx = corner_sign(m, 0), sy = corner_sign(m, 1), sz = corner_sign(m, 2);
        const double fx = 0.5 + sx * s.x, fy = 0.5 + sy * s.y, fz = 0.5 + sz * s.z;
        dx += (sx * fy * fz) * c[m];
        dy += (fx * sy * fz) * c[m];
        dz += (fx * fy * sz) * c[m];
    }
    return Mat3::from_columns(dx, dy, dz);
}

Vec3 trilinear_point(const std::array<Vec3, 8>& c, const Vec3& s) {
    Vec3 p{};
    for (int m = 0; m < 8; ++m) {
        const double fx = 0.5 + corner_sign(m, 0) * s.x;
        const double fy = 0.5 + corner_sign(m, 1) * s.y;
        const double fz = 0.5 + corner_sign(m, 2) * s.z;
        p += (fx * fy * fz) * c[m];
    }
    return p;
}

double transformed_cell_volume(const std::array<Vec3, 8>& corners) {
    double vol = 0.0;
    for (int a = 0; a < GL::n3; ++a)
        for (int b = 0; b < GL::n3; ++b)
            for (int c = 0; c < GL::n3; ++c) {
                const double x = GL::x3[a] - 0.5, y = GL::x3[b] - 0.5, z = GL::x3[c] - 0.5;
                vol += GL::w3[a] * GL::w3[b] * GL::w3[c] *
                       det(trilinear_jacobian(corners, {x, y, z}));
            }
    return vol;
}

Vec3 trilinear_cell_centroid(const std::array<Vec3, 8>& corners) {
    double vol = 0.0;
    Vec3 first{};
    for (int a = 0; a < GL::n3; ++a)
        for (int b = 0; b < GL::n3; ++b)
            for (int c = 0; c < GL::n3; ++c) {
                const double x = GL::x3[a] - 0.5, y = GL::x3[b] - 0.5, z = GL::x3[c] - 0.5;
                const double wdet = GL::w3[a] * GL::w3[b] * GL::w3[c] *
                                    det(trilinear_jacobian(corners, {x, y, z}));
                vol += wdet;
                first += wdet * trilinear_point(corners, {x, y, z});
            }
    return first / vol;
}

Mat3 cell_jacobian(const std::array<Vec3, 8>& corners) {
    return Mat3::from_columns(corners[1] - corners[0], corners[2] - corners[0],
                              corners[4] - corners[0]);
}

namespace {

FaceGeometry make_face(const Vec3& f00, const Vec3& f10, const Vec3& f01, const Vec3& f11) {
    FaceGeometry fg;
    fg.area = 0.0;
    for (int it = 0; it < 2; ++it)
        for (int is = 0; is < 2; ++is) {
            const int g = is + 2 * it;
            const double s = GL::x2[is], t = GL::x2[it];
            fg.gp[g] = (1.0 - s) * (1.0 - t) * f00 + s * (1.0 - t) * f10 + (1.0 - s) * t * f01 +
                       s * t * f11;
            const Vec3 xs = (1.0 - t) * (f10 - f00) + t * (f11 - f01);
            const Vec3 xt = (1.0 - s) * (f01 - f00) + s * (f11 - f10);
            const Vec3 raw = cross(xs, xt);
            const double mag = norm(raw);
            fg.normal[g] = raw / mag;
            fg.weight[g] = 0.25 * mag;
            fg.area += fg.weight[g];
        }
    for (double& w : fg.weight) w /= fg.area;
    return fg;
}

std::array<Vec3, 8> gather_corners(const StructuredMesh& m, const Index3& c) {
    std::array<Vec3, 8> out;
    for (int mm = 0; mm < 8; ++mm)
        out[mm] = m.node(c.i + (mm & 1), c.j + ((mm >> 1) & 1), c.k + ((mm >> 2) & 1));
    return out;
}

// Geometry of one cell given its own corners, the corners of each stencil
// neighbor (already shifted next to it), and the neighbors' volumes.
CellGeometry finish_cell(const std::array<Vec3, 8>& own,
                         const std::array<std::array<Vec3, 8>, 19>& nbr,
                         const std::array<double, 19>& nbr_volume, int cell_id_for_error) {
    CellGeometry g;
    g.volume = transformed_cell_volume(own);
    g.centroid = trilinear_cell_centroid(own);
    g.J0 = cell_jacobian(own);
    g.detJ0 = det(g.J0);
    if (!(g.volume > 0.0) || !(g.detJ0 > 0.0))
        throw std::runtime_error("cell " + std::to_string(cell_id_for_error) +
                                 " has non-positive volume or frame jacobian");
    g.J0inv = inverse(g.J0);
    for (int a = 0; a < 3; ++a) g.h[a] = norm(g.J0.col(a));

    for (int s = 0; s < 19; ++s) {
        std::array<Vec3, 8> pre;
        for (int mm = 0; mm < 8; ++mm) pre[mm] = g.J0inv * (nbr[s][mm] - own[0]);
        g.C[s] = transformed_cell_volume(pre) * g.detJ0 / nbr_volume[s];
    }
    return g;
}

void fill_line_lengths(const StructuredMesh& m, const Index3& c, CellGeometry& g) {
    for (int a = 0; a < 3; ++a) {
        const auto lo = m.cell_face(c, a, 0);
        const auto hi = m.cell_face(c, a, 1);
        for (int q = 0; q < 4; ++q) {
            const Vec3 p0 = m.face_gp(a, lo.fid, q) + lo.shift;
            const Vec3 p1 = m.face_gp(a, hi.fid, q) + hi.shift;
            g.line_length[4 * a + q] = norm(p1 - p0);
        }
    }
}

}  // namespace

std::pair<int, Vec3> StructuredMesh::neighbor_with_shift(const Index3& base,
                                                         const std::array<int, 3>& off) const {
    Index3 nb;
    Vec3 shift{};
    for (int a = 0; a < 3; ++a) {
        int t = base[a] + off[a];
        if (t < 0) {
            assert(periodic_[a]);
            t += dims_[a];
            shift[a] -= period(a);
        } else if (t >= dims_[a]) {
            assert(periodic_[a]);
            t -= dims_[a];
            shift[a] += period(a);
        }
        nb[a] = t;
    }
    return {cell_id(nb), shift};
}

Vec3 StructuredMesh::cell_base_node(int id) const {
    const Index3 c = cell_index(id);
    return node(c.i, c.j, c.k);
}

Vec3 StructuredMesh::cell_centroid(int id) const {
    if (!uniform_) return cells_[id].centroid;
    const Index3 c = cell_index(id);
    return cells_[0].centroid +
           Vec3{c.i * spacing_.x, c.j * spacing_.y, c.k * spacing_.z};
}

StructuredMesh::CellFace StructuredMesh::cell_face(const Index3& c, int axis, int side) const {
    Index3 f = c;
    Vec3 shift{};
    if (side == 1) {
        f[axis] += 1;
        if (periodic_[axis] && f[axis] == dims_[axis]) {
            f[axis] = 0;
            shift[axis] = period(axis);
        }
    }
    return {face_id(axis, f), shift};
}

Vec3 StructuredMesh::face_gp(int axis, int fid, int g) const {
    if (!uniform_) return faces_[axis][fid].gp[g];
    const int ex = dims_[0] + ((axis == 0 && !periodic_[0]) ? 1 : 0);
    const int ey = dims_[1] + ((axis == 1 && !periodic_[1]) ? 1 : 0);
    const int fi = fid % ex, fj = (fid / ex) % ey, fk = fid / (ex * ey);
    return faces_[axis][0].gp[g] +
           Vec3{fi * spacing_.x, fj * spacing_.y, fk * spacing_.z};
}

Vec3 StructuredMesh::node(int i, int j, int k) const {
    if (uniform_) return lo_ + Vec3{i * spacing_.x, j * spacing_.y, k * spacing_.z};
    const int np = dims_[0] + 1, nq = dims_[1] + 1;
    return nodes_[i + np * (j + nq * k)];
}

namespace {

void build_faces(StructuredMesh& m, std::array<std::vector<FaceGeometry>, 3>& faces,
                 bool only_template) {
    for (int axis = 0; axis < 3; ++axis) {
        const auto pq = face_plane_axes(axis);
        const int count = only_template ? 1 : m.face_count(axis);
        faces[axis].resize(count);
        const int ex = m.n(0) + ((axis == 0 && !m.periodic(0)) ? 1 : 0);
        const int ey = m.n(1) + ((axis == 1 && !m.periodic(1)) ? 1 : 0);
        for (int fid = 0; fid < count; ++fid) {
            Index3 f{fid % ex, (fid / ex) % ey, fid / (ex * ey)};
            Index3 n10 = f, n01 = f, n11 = f;
            n10[pq[0]] += 1;
            n01[pq[1]] += 1;
            n11[pq[0]] += 1;
            n11[pq[1]] += 1;
            faces[axis][fid] =
                make_face(m.node(f.i, f.j, f.k), m.node(n10.i, n10.j, n10.k),
                          m.node(n01.i, n01.j, n01.k), m.node(n11.i, n11.j, n11.k));
        }
    }
}

}  // namespace

StructuredMesh build_cartesian_mesh(const std::array<int, 3>& dims, const Vec3& lo, const Vec3& hi,
                                    const std::array<bool, 3>& periodic) {
    for (int a = 0; a < 3; ++a) {
        const int minimum = periodic[a] ? 2 : 3;
        if (dims[a] < minimum)
            throw std::invalid_argument("axis " + std::to_string(a) + " needs at least " +
                                        std::to_string(minimum) + " cells");
        if (!(hi[a] - lo[a] > 0.0))
            throw std::invalid_argument("axis " + std::to_string(a) +
                                        " has a non-positive extent");
    }
    StructuredMesh m;
    m.dims_ = dims;
    m.periodic_ = periodic;
    m.lo_ = lo;
    m.hi_ = hi;
    m.uniform_ = true;
    m.spacing_ = Vec3{(hi.x - lo.x) / dims[0], (hi.y - lo.y) / dims[1], (hi.z - lo.z) / dims[2]};

    build_faces(m, m.faces_, true);

    const Index3 c0{0, 0, 0};
    const auto own = gather_corners(m, c0);
    std::array<std::array<Vec3, 8>, 19> nbr;
    std::array<double, 19> nbr_vol;
    const double vol = transformed_cell_volume(own);
    for (int s = 0; s < 19; ++s) {
        const auto& off = kStencilOffsets[s];
        const Vec3 shift{off[0] * m.spacing_.x, off[1] * m.spacing_.y, off[2] * m.spacing_.z};
        for (int mm = 0; mm < 8; ++mm) nbr[s][mm] = own[mm] + shift;
        nbr_vol[s] = vol;
    }
    m.cells_.resize(1);
    m.cells_[0] = finish_cell(own, nbr, nbr_vol, 0);
    fill_line_lengths(m, c0, m.cells_[0]);
    return m;
}

StructuredMesh build_distorted_mesh(int n, double amplitude, double length_scale) {
    if (n < 2) throw std::invalid_argument("distorted mesh needs at least 2 cells per axis");
    if (!(length_scale > 0.0)) throw std::invalid_argument("length scale must be positive");
    if (amplitude < 0.0) throw std::invalid_argument("distortion amplitude must be >= 0");

    const double pi = std::acos(-1.0);
    const double half = pi * length_scale;
    StructuredMesh m;
    m.dims_ = {n, n, n};
    m.periodic_ = {true, true, true};
    m.lo_ = Vec3{-half, -half, -half};
    m.hi_ = Vec3{half, half, half};
    m.uniform_ = amplitude == 0.0;
    m.spacing_ = Vec3{2.0 * half / n, 2.0 * half / n, 2.0 * half / n};

    if (m.uniform_) {
        return build_cartesian_mesh(m.dims_, m.lo_, m.hi_, m.periodic_);
    }

    const int np = n + 1;
    m.nodes_.resize(np * np * np);
    const double dx = 2.0 * half / n;
    for (int k = 0; k < np; ++k)
        for (int j = 0; j < np; ++j)
            for (int i = 0; i < np; ++i) {
                const double x = -half + i * dx, y = -half + j * dx, z = -half + k * dx;
                const double bump =
                    amplitude * length_scale * std::sin(x / length_scale) * std::sin(y / length_scale);
                m.nodes_[i + np * (j + np * k)] = Vec3{x + bump, y + bump, z};
            }

    build_faces(m, m.faces_, false);

    const int ncells = m.cell_count();
    std::vector<double> volumes(ncells);
    for (int id = 0; id < ncells; ++id) {
        volumes[id] = transformed_cell_volume(gather_corners(m, m.cell_index(id)));
        if (!(volumes[id] > 0.0))
            throw std::runtime_error("distortion amplitude folds mesh cells over");
    }

    m.cells_.resize(ncells);
    for (int id = 0; id < ncells; ++id) {
        const Index3 c = m.cell_index(id);
        const auto own = gather_corners(m, c);
        std::array<std::array<Vec3, 8>, 19> nbr;
        std::array<double, 19> nbr_vol;
        for (int s = 0; s < 19; ++s) {
            const auto [nid, shift] = m.neighbor_with_shift(c, kStencilOffsets[s]);
            const auto raw = gather_corners(m, m.cell_index(nid));
            for (int mm = 0; mm < 8; ++mm) nbr[s][mm] = raw[mm] + shift;
            nbr_vol[s] = volumes[nid];
        }
        m.cells_[id] = finish_cell(own, nbr, nbr_vol, id);
        fill_line_lengths(m, c, m.cells_[id]);
    }
    return m;
}

}  // namespace cgks
