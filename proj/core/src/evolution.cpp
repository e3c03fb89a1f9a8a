#include "cgks/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cgks/quadrature.hpp"

namespace cgks {

namespace {

// Compensated accumulator; plane sums use it so that reductions do not depend
// on how planes are distributed over workers.
struct Acc {
    double s = 0.0, c = 0.0;
    void add(double v) {
        const double t = s + v;
        c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
        s = t;
    }
    double get() const { return s + c; }
};

// Reference frame of a cell: [0,1]^3 anchored at the base node (the basis
// functions are centered monomials about (1/2,1/2,1/2)).
Vec3 face_reference_point(int axis, int side, int g) {
    const auto pq = face_plane_axes(axis);
    Vec3 xi{};
    xi[axis] = side == 0 ? 0.0 : 1.0;
    xi[pq[0]] = GL::x2[g % 2];
    xi[pq[1]] = GL::x2[g / 2];
    return xi;
}

constexpr int kMetricStride = 8;  // kinetic energy, dissipation, five totals

}  // namespace

Solver::Solver(const StructuredMesh& mesh, const SolverConfig& config)
    : mesh_(mesh), config_(config), op_(reconstruction_operator()), gate_(std::max(1, config.workers)) {
    if (config_.workers < 1) throw std::invalid_argument("worker count must be >= 1");
    for (int a = 0; a < 3; ++a)
        if (!mesh_.periodic(a))
            throw std::invalid_argument("the time driver needs a fully periodic mesh");

    nx_ = mesh_.n(0);
    ny_ = mesh_.n(1);
    nz_ = mesh_.n(2);
    ncells_ = mesh_.cell_count();

    buf_[0].resize(ncells_);
    buf_[1].resize(ncells_);
    ln_.resize(ncells_);
    dtln_.resize(ncells_);
    side_base_.resize(static_cast<std::size_t>(ncells_) * 24);
    for (int a = 0; a < 3; ++a) {
        slots_[a].resize(static_cast<std::size_t>(mesh_.face_count(a)) * 8);
        recs_[a].resize(static_cast<std::size_t>(mesh_.face_count(a)) * 4);
    }

    stencil_.resize(static_cast<std::size_t>(ncells_) * 19);
    face_of_.resize(static_cast<std::size_t>(ncells_) * 6);
    Acc vol;
    for (int c = 0; c < ncells_; ++c) {
        const Index3 idx = mesh_.cell_index(c);
        for (int s = 0; s < 19; ++s)
            stencil_[c * 19 + s] = mesh_.neighbor_with_shift(idx, kStencilOffsets[s]).first;
        for (int a = 0; a < 3; ++a)
            for (int side = 0; side < 2; ++side)
                face_of_[c * 6 + a * 2 + side] = mesh_.cell_face(idx, a, side).fid;
        vol.add(mesh_.cell_geometry(c).volume);
    }
    volume_ = vol.get();

    for (int axis = 0; axis < 3; ++axis)
        for (int side = 0; side < 2; ++side)
            for (int g = 0; g < 4; ++g)
                make_basis_table(face_reference_point(axis, side, g),
                                 face_tables_[(axis * 2 + side) * 4 + g]);
    for (int q = 0; q < 8; ++q) {
        gauss_ref_[q] = Vec3{GL::x2[q % 2], GL::x2[(q / 2) % 2], GL::x2[q / 4]};
        make_basis_table(gauss_ref_[q], gauss_tables_[q]);
    }

    const int w = config_.workers;
    plane_range_.resize(w);
    for (int i = 0; i < w; ++i)
        plane_range_[i] = {static_cast<int>(static_cast<long>(nz_) * i / w),
                           static_cast<int>(static_cast<long>(nz_) * (i + 1) / w)};
    plane_acc_.assign(static_cast<std::size_t>(nz_) * kMetricStride, 0.0);
    worker_min_rho_.assign(w, 0.0);
    worker_min_p_.assign(w, 0.0);
    worker_fallback_.assign(w, 0);

    threads_.reserve(w - 1);
    for (int i = 1; i < w; ++i) threads_.emplace_back(&Solver::worker_main, this, i);
}

Solver::~Solver() {
    job_ = Job::stop;
    gate_.arrive_and_wait();
    for (auto& t : threads_) t.join();
}

void Solver::worker_main(int w) {
    for (;;) {
        gate_.arrive_and_wait();
        if (job_ == Job::stop) return;
        run_job(w);
        gate_.arrive_and_wait();
    }
}

void Solver::run_job(int w) {
    if (job_ == Job::measure) {
        phase_reconstruct(w, -1);
        return;
    }
    for (int stage = 0; stage < 2; ++stage) {
        phase_reconstruct(w, stage);
        gate_.arrive_and_wait();
        phase_flux(w, stage);
        gate_.arrive_and_wait();
        phase_update(w, stage);
        gate_.arrive_and_wait();
        if (failed_.load(std::memory_order_relaxed)) return;
    }
}

void Solver::fail(const std::string& message) {
    std::lock_guard<std::mutex> lock(fail_mutex_);
    if (!failed_.load(std::memory_order_relaxed)) {
        fail_message_ = message;
        failed_.store(true, std::memory_order_release);
    }
}

void Solver::phase_reconstruct(int w, int stage) {
    const std::vector<CellDOF>& src = buf_[stage == 1 ? 1 : 0];
    const bool with_diag = stage == -1 || (stage == 0 && job_diag_);
    const bool write_slots = stage >= 0;
    const bool uniform = mesh_.uniform();
    const auto [plane_lo, plane_hi] = plane_range_[w];
    const int per_plane = nx_ * ny_;

    CellPolynomials rec;
    BlendedCell bc;
    std::array<const CellDOF*, 19> st{};
    Vec5 val;
    std::array<Vec5, 3> gref, gphys;

    for (int plane = plane_lo; plane < plane_hi; ++plane) {
        Acc acc[7];
        for (int c = plane * per_plane; c < (plane + 1) * per_plane; ++c) {
            const CellGeometry& geom = mesh_.cell_geometry(c);
            const std::int32_t* ids = &stencil_[static_cast<std::size_t>(c) * 19];
            for (int s = 0; s < 19; ++s) st[s] = &src[ids[s]];
            reconstruct_cell(op_, geom, st, rec);
            if (config_.blend == BlendMode::nonlinear)
                blend_nonlinear(op_, config_.geno, rec, bc);
            else
                blend_linear(rec, bc);

            if (write_slots) {
                if (uniform) {
                    for (int axis = 0; axis < 3; ++axis)
                        for (int side = 0; side < 2; ++side) {
                            const int fid = face_of_[c * 6 + axis * 2 + side];
                            const int own = side == 1 ? 0 : 1;
                            for (int g = 0; g < 4; ++g) {
                                evaluate(bc, face_tables_[(axis * 2 + side) * 4 + g], val, gref);
                                gradient_to_physical(geom.J0inv, gref, gphys);
                                SideSlot& sl = slots_[axis][(static_cast<std::size_t>(fid) * 4 + g) * 2 + own];
                                sl.q = val;
                                sl.grad = gphys;
                            }
                        }
                } else {
                    const Index3 idx = mesh_.cell_index(c);
                    const Vec3 base = mesh_.cell_base_node(c);
                    BasisTable bt;
                    for (int axis = 0; axis < 3; ++axis)
                        for (int side = 0; side < 2; ++side) {
                            const auto cf = mesh_.cell_face(idx, axis, side);
                            const int own = side == 1 ? 0 : 1;
                            for (int g = 0; g < 4; ++g) {
                                const Vec3 x = mesh_.face_gp(axis, cf.fid, g) + cf.shift;
                                make_basis_table(geom.J0inv * (x - base), bt);
                                evaluate(bc, bt, val, gref);
                                gradient_to_physical(geom.J0inv, gref, gphys);
                                SideSlot& sl = slots_[axis][(static_cast<std::size_t>(cf.fid) * 4 + g) * 2 + own];
                                sl.q = val;
                                sl.grad = gphys;
                            }
                        }
                }
            }
            if (with_diag) accumulate_cell_diagnostics(c, bc, src[c].q, reinterpret_cast<double*>(acc));
        }
        if (with_diag)
            for (int m = 0; m < 7; ++m) plane_acc_[plane * kMetricStride + m] = acc[m].get();
    }
}

void Solver::accumulate_cell_diagnostics(int cell, const BlendedCell& bc, const Vec5& avg,
                                         double* acc_raw) {
    Acc* acc = reinterpret_cast<Acc*>(acc_raw);
    const CellGeometry& geom = mesh_.cell_geometry(cell);
    const double volume = geom.volume;
    for (int v = 0; v < 5; ++v) acc[2 + v].add(avg[v] * volume);

    const double mu = config_.gas.mu;
    Vec5 val;
    std::array<Vec5, 3> gref, gphys;
    std::array<Vec3, 8> corners;
    const bool uniform = mesh_.uniform();
    if (!uniform) {
        const Index3 idx = mesh_.cell_index(cell);
        for (int m = 0; m < 8; ++m)
            corners[m] = mesh_.node(idx.i + (m & 1), idx.j + ((m >> 1) & 1), idx.k + ((m >> 2) & 1));
    }
    for (int q = 0; q < 8; ++q) {
        double weight;
        if (uniform) {
            weight = 0.125 * volume;
            evaluate(bc, gauss_tables_[q], val, gref);
            gradient_to_physical(geom.J0inv, gref, gphys);
        } else {
            const Vec3 s = gauss_ref_[q] - Vec3{0.5, 0.5, 0.5};
            weight = 0.125 * det(trilinear_jacobian(corners, s));
            const Vec3 x = trilinear_point(corners, s);
            BasisTable bt;
            make_basis_table(geom.J0inv * (x - corners[0]), bt);
            evaluate(bc, bt, val, gref);
            gradient_to_physical(geom.J0inv, gref, gphys);
        }
        const double rho = val[0];
        acc[0].add(weight * 0.5 * (val[1] * val[1] + val[2] * val[2] + val[3] * val[3]) / rho);
        if (mu > 0.0) {
            const double U = val[1] / rho, V = val[2] / rho, W = val[3] / rho;
            // d(vel_i)/d(x_j) from the conservative gradients
            const double dWdy = (gphys[1][3] - W * gphys[1][0]) / rho;
            const double dVdz = (gphys[2][2] - V * gphys[2][0]) / rho;
            const double dUdz = (gphys[2][1] - U * gphys[2][0]) / rho;
            const double dWdx = (gphys[0][3] - W * gphys[0][0]) / rho;
            const double dVdx = (gphys[0][2] - V * gphys[0][0]) / rho;
            const double dUdy = (gphys[1][1] - U * gphys[1][0]) / rho;
            const double cx = dWdy - dVdz, cy = dUdz - dWdx, cz = dVdx - dUdy;
            acc[1].add(weight * mu * (cx * cx + cy * cy + cz * cz));
        }
    }
}

void Solver::phase_flux(int w, int stage) {
    const std::vector<CellDOF>& src = buf_[stage == 1 ? 1 : 0];
    const auto [plane_lo, plane_hi] = plane_range_[w];
    const int per_plane = nx_ * ny_;
    FluxSetup setup;
    setup.gas = config_.gas;
    setup.mode = config_.collision;
    setup.dt = job_dt_;
    long fallbacks = 0;

    for (int c = plane_lo * per_plane; c < plane_hi * per_plane; ++c) {
        for (int axis = 0; axis < 3; ++axis) {
            const int fid = face_of_[c * 6 + axis * 2 + 1];
            const int nbr = stencil_[c * 19 + face_neighbor_slot(axis, 1)];
            const FaceGeometry& fg = mesh_.face_geometry(axis, fid);
            for (int g = 0; g < 4; ++g) {
                const SideSlot& sl = slots_[axis][(static_cast<std::size_t>(fid) * 4 + g) * 2];
                const SideSlot& sr = slots_[axis][(static_cast<std::size_t>(fid) * 4 + g) * 2 + 1];
                SideInput left{sl.q, sl.grad, src[c].q};
                SideInput right{sr.q, sr.grad, src[nbr].q};
                const FluxBundle b = interface_flux(setup, fg.normal[g], left, right);
                FaceRecord& r = recs_[axis][static_cast<std::size_t>(fid) * 4 + g];
                r.fn = b.flux_n;
                r.ft = b.flux_t;
                r.l0 = b.q_left0;
                r.lt = b.q_left_t;
                r.r0 = b.q_right0;
                r.rt = b.q_right_t;
                r.fallback = b.fallback ? 1 : 0;
                fallbacks += r.fallback;
            }
        }
    }
    worker_fallback_[w] += fallbacks;
}

void Solver::phase_update(int w, int stage) {
    const double dt = job_dt_;
    std::vector<CellDOF>& dst = buf_[stage == 0 ? 1 : 0];
    const auto [plane_lo, plane_hi] = plane_range_[w];
    const int per_plane = nx_ * ny_;
    double min_rho = std::numeric_limits<double>::infinity();
    double min_p = std::numeric_limits<double>::infinity();

    for (int c = plane_lo * per_plane; c < plane_hi * per_plane; ++c) {
        const CellGeometry& geom = mesh_.cell_geometry(c);
        const double inv_vol = 1.0 / geom.volume;
        Vec5 res{}, res_t{};
        std::array<Vec5, 3> grad{};
        std::array<Vec5, 24> sv;
        for (int axis = 0; axis < 3; ++axis)
            for (int side = 0; side < 2; ++side) {
                const int fid = face_of_[c * 6 + axis * 2 + side];
                const FaceGeometry& fg = mesh_.face_geometry(axis, fid);
                const double s_in = side == 0 ? 1.0 : -1.0;
                for (int g = 0; g < 4; ++g) {
                    const FaceRecord& r = recs_[axis][static_cast<std::size_t>(fid) * 4 + g];
                    const double aw = fg.area * fg.weight[g] * inv_vol;
                    res += (s_in * aw) * r.fn;
                    res_t += (s_in * aw) * r.ft;
                    const int slot = (axis * 2 + side) * 4 + g;
                    const Vec5& base = side == 1 ? r.l0 : r.r0;
                    const Vec5& rate = side == 1 ? r.lt : r.rt;
                    Vec5& stored = side_base_[static_cast<std::size_t>(c) * 24 + slot];
                    if (stage == 0) {
                        stored = base;
                        sv[slot] = base + (0.5 * dt) * rate;
                    } else {
                        sv[slot] = stored + dt * rate;
                    }
                    const Vec3& nrm = fg.normal[g];
                    const double coef = -s_in * aw;  // outward normal factor
                    grad[0] += (coef * nrm.x) * sv[slot];
                    grad[1] += (coef * nrm.y) * sv[slot];
                    grad[2] += (coef * nrm.z) * sv[slot];
                }
            }

        Vec5 qnew;
        if (stage == 0) {
            qnew = buf_[0][c].q + (0.5 * dt) * res + (0.125 * dt * dt) * res_t;
            ln_[c] = res;
            dtln_[c] = res_t;
        } else {
            qnew = buf_[0][c].q + dt * ln_[c] + (dt * dt / 6.0) * (dtln_[c] + 2.0 * res_t);
        }
        if (!primitive(qnew, config_.gas).valid())
            fail("cell average lost positivity at cell " + std::to_string(c) + " (stage " +
                 std::to_string(stage + 1) + ")");

        CellDOF& d = dst[c];
        d.q = qnew;
        d.grad = grad;
        for (int axis = 0; axis < 3; ++axis)
            for (int g = 0; g < 4; ++g)
                d.line[axis * 4 + g] = (1.0 / geom.line_length[axis * 4 + g]) *
                                       (sv[(axis * 2 + 1) * 4 + g] - sv[(axis * 2) * 4 + g]);
        if (stage == 1) {
            min_rho = std::min(min_rho, qnew[0]);
            min_p = std::min(min_p, pressure_of(qnew, config_.gas));
        }
    }
    if (stage == 1) {
        worker_min_rho_[w] = min_rho;
        worker_min_p_[w] = min_p;
    }
}

double Solver::stable_time_step() const {
    const GasModel& gas = config_.gas;
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < ncells_; ++c) {
        const CellGeometry& geom = mesh_.cell_geometry(c);
        const double h = std::min({geom.h[0], geom.h[1], geom.h[2]});
        const GasState s = primitive(buf_[0][c].q, gas);
        if (!s.valid())
            throw std::runtime_error("invalid state in time step estimate at cell " +
                                     std::to_string(c));
        const double speed = norm(s.vel) + std::sqrt(0.5 * gas.gamma / s.lambda);
        double dt = config_.cfl * h / speed;
        if (gas.mu > 0.0) dt = std::min(dt, config_.cfl * h * h * s.rho / (3.0 * gas.mu));
        best = std::min(best, dt);
    }
    return best;
}

StepStats Solver::advance(double dt, Diagnostics* diag) {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    job_ = Job::step;
    job_dt_ = dt;
    job_diag_ = diag != nullptr;
    if (job_diag_) std::fill(plane_acc_.begin(), plane_acc_.end(), 0.0);
    std::fill(worker_fallback_.begin(), worker_fallback_.end(), 0L);
    failed_.store(false, std::memory_order_relaxed);

    gate_.arrive_and_wait();
    run_job(0);
    gate_.arrive_and_wait();

    if (failed_.load(std::memory_order_acquire)) throw std::runtime_error(fail_message_);

    StepStats st;
    st.dt = dt;
    st.min_density = std::numeric_limits<double>::infinity();
    st.min_pressure = std::numeric_limits<double>::infinity();
    for (int i = 0; i < config_.workers; ++i) {
        st.fallback_points += worker_fallback_[i];
        st.min_density = std::min(st.min_density, worker_min_rho_[i]);
        st.min_pressure = std::min(st.min_pressure, worker_min_p_[i]);
    }
    if (diag) *diag = collect_diagnostics();
    return st;
}

Diagnostics Solver::measure() {
    job_ = Job::measure;
    job_diag_ = true;
    std::fill(plane_acc_.begin(), plane_acc_.end(), 0.0);
    gate_.arrive_and_wait();
    run_job(0);
    gate_.arrive_and_wait();
    return collect_diagnostics();
}

Diagnostics Solver::collect_diagnostics() const {
    Diagnostics d;
    Acc acc[7];
    for (int plane = 0; plane < nz_; ++plane)
        for (int m = 0; m < 7; ++m) acc[m].add(plane_acc_[plane * kMetricStride + m]);
    const double scale = 1.0 / (config_.reference_density * volume_);
    d.kinetic_energy = acc[0].get() * scale;
    d.dissipation = acc[1].get() * scale;
    for (int v = 0; v < 5; ++v) d.totals[v] = acc[2 + v].get();
    return d;
}

}  // namespace cgks
