#pragma once

#include <atomic>
#include <barrier>
#include <cstdint>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "cgks/gas.hpp"
#include "cgks/kinetic_flux.hpp"
#include "cgks/mesh.hpp"
#include "cgks/reconstruction.hpp"

namespace cgks {

enum class BlendMode { linear, nonlinear };

struct SolverConfig {
    GasModel gas{};
    CollisionMode collision = CollisionMode::inviscid;
    BlendMode blend = BlendMode::linear;
    GenoParams geno{};
    double cfl = 0.5;
    double reference_density = 1.0;  // rho_0 scale in the diagnostics
    int workers = 1;
};

struct StepStats {
    double dt = 0.0;
    long fallback_points = 0;  // face quadrature points that used the splitting fallback
    double min_density = 0.0;
    double min_pressure = 0.0;
};

struct Diagnostics {
    double kinetic_energy = 0.0;  // (1 / (rho_0 |Omega|)) integral of rho |U|^2 / 2
    double dissipation = 0.0;     // (1 / (rho_0 |Omega|)) integral of mu |curl U|^2
    Vec5 totals{};                // volume integrals of the conserved variables
};

// Two-stage fourth-order driver over one structured block. Workers split the
// mesh into z-plane slabs and synchronize on a barrier between the three
// per-stage passes (reconstruct/evaluate, face fluxes, cell+interface update);
// every array slot has a single writer, so results are bitwise independent of
// the worker count.
class Solver {
public:
    Solver(const StructuredMesh& mesh, const SolverConfig& config);
    ~Solver();
    Solver(const Solver&) = delete;
    Solver& operator=(const Solver&) = delete;

    const StructuredMesh& mesh() const { return mesh_; }
    const SolverConfig& config() const { return config_; }
    double domain_volume() const { return volume_; }

    // Current state, one entry per cell; fill before the first step.
    std::vector<CellDOF>& state() { return buf_[0]; }
    const std::vector<CellDOF>& state() const { return buf_[0]; }

    // Largest stable step from the current averages: the acoustic bound
    // cfl h / (|U| + c) and, with viscosity, cfl h^2 / (3 nu).
    double stable_time_step() const;

    // One two-stage step. Throws if an updated cell average loses positivity.
    // When diag is set, the pre-step state is measured on the fly.
    StepStats advance(double dt, Diagnostics* diag = nullptr);

    // Standalone measurement of the current state.
    Diagnostics measure();

private:
    struct SideSlot {
        Vec5 q{};
        std::array<Vec5, 3> grad{};
    };
    struct FaceRecord {
        Vec5 fn{}, ft{};      // interface flux and its time derivative
        Vec5 l0{}, lt{};      // left-side value record: t = 0 value, time slope
        Vec5 r0{}, rt{};
        std::uint32_t fallback = 0;
    };
    enum class Job { step, measure, stop };

    void worker_main(int w);
    void run_job(int w);
    void phase_reconstruct(int w, int stage);
    void phase_flux(int w, int stage);
    void phase_update(int w, int stage);
    void accumulate_cell_diagnostics(int cell, const BlendedCell& bc, const Vec5& avg,
                                     double* acc);
    Diagnostics collect_diagnostics() const;
    void fail(const std::string& message);

    const StructuredMesh& mesh_;
    SolverConfig config_;
    const ReconstructionOperator& op_;

    int nx_ = 0, ny_ = 0, nz_ = 0, ncells_ = 0;
    double volume_ = 0.0;

    std::vector<CellDOF> buf_[2];           // [0] current state, [1] middle stage
    std::vector<Vec5> ln_, dtln_;           // stage-one residual records
    std::vector<Vec5> side_base_;           // stage-one t=0 side values, 24 per cell
    std::array<std::vector<SideSlot>, 3> slots_;   // per axis: (fid*4 + g)*2 + side
    std::array<std::vector<FaceRecord>, 3> recs_;  // per axis: fid*4 + g
    std::vector<std::int32_t> stencil_;     // 19 ids per cell
    std::vector<std::int32_t> face_of_;     // 6 face ids per cell: axis*2 + side

    std::array<BasisTable, 24> face_tables_{};   // uniform meshes: shared GP preimages
    std::array<BasisTable, 8> gauss_tables_{};   // uniform meshes: interior 2x2x2
    std::array<Vec3, 8> gauss_ref_{};            // reference coordinates of the above

    std::vector<std::pair<int, int>> plane_range_;  // planes [lo, hi) per worker
    std::vector<double> plane_acc_;                 // 8 metric slots per z-plane
    std::vector<double> worker_min_rho_, worker_min_p_;
    std::vector<long> worker_fallback_;

    std::vector<std::thread> threads_;
    std::barrier<> gate_;
    Job job_ = Job::step;
    double job_dt_ = 0.0;
    bool job_diag_ = false;

    std::atomic<bool> failed_{false};
    std::string fail_message_;
    std::mutex fail_mutex_;
};

}  // namespace cgks
