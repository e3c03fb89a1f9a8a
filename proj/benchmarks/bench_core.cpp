#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "cgks/cases.hpp"
#include "cgks/evolution.hpp"
#include "cgks/kinetic_flux.hpp"
#include "cgks/reconstruction.hpp"

namespace {

using namespace cgks;

CellDOF smooth_dof(const Vec3& offset) {
    CellDOF d;
    const auto field = [](const Vec3& x, int i) {
        return 1.0 + 0.1 * std::sin(0.3 * x.x + 0.7 * (i + 1)) * std::cos(0.4 * x.y) +
               0.05 * x.z;
    };
    for (int i = 0; i < 5; ++i) {
        d.q[i] = field(offset, i) + (i == 4 ? 4.0 : i == 0 ? 1.0 : 0.0);
        d.grad[0][i] = 0.03 * std::cos(0.3 * offset.x + 0.7 * (i + 1));
        d.grad[1][i] = -0.04 * std::sin(0.4 * offset.y);
        d.grad[2][i] = 0.05;
        for (int l = 0; l < 12; ++l) d.line[l][i] = 0.01 * std::sin(0.9 * l + i + offset.x);
    }
    return d;
}

void reconstruct_args(benchmark::State& state, BlendMode mode) {
    const ReconstructionOperator& op = reconstruction_operator();
    StructuredMesh mesh = build_cartesian_mesh({4, 4, 4}, {0.0, 0.0, 0.0}, {4.0, 4.0, 4.0},
                                               {true, true, true});
    const CellGeometry& geom = mesh.cell_geometry(0);

    std::vector<CellDOF> dofs(19);
    std::array<const CellDOF*, 19> stencil{};
    for (int s = 0; s < 19; ++s) {
        const auto& off = kStencilOffsets[s];
        dofs[s] = smooth_dof({double(off[0]), double(off[1]), double(off[2])});
        stencil[s] = &dofs[s];
    }
    CellPolynomials rec;
    BlendedCell cell;
    GenoParams geno;
    for (auto _ : state) {
        reconstruct_cell(op, geom, stencil, rec);
        if (mode == BlendMode::nonlinear)
            blend_nonlinear(op, geno, rec, cell);
        else
            blend_linear(rec, cell);
        benchmark::DoNotOptimize(cell.a[0][0]);
    }
}

void bm_reconstruct_linear(benchmark::State& state) {
    reconstruct_args(state, BlendMode::linear);
}
void bm_reconstruct_nonlinear(benchmark::State& state) {
    reconstruct_args(state, BlendMode::nonlinear);
}

void bm_interface_flux(benchmark::State& state) {
    const GasModel gas{1.4, 0.7, 1e-3};
    FluxSetup setup{gas, CollisionMode::viscous, 1e-3};
    const Vec3 normal{0.6, 0.64, 0.48};  // not axis aligned
    SideInput left, right;
    const GasState sl{1.0, {0.3, 0.1, -0.05}, 0.8};
    const GasState sr{0.98, {0.32, 0.09, -0.04}, 0.82};
    left.q = conservative(sl, gas);
    right.q = conservative(sr, gas);
    left.fallback_q = left.q;
    right.fallback_q = right.q;
    for (int d = 0; d < 3; ++d)
        for (int i = 0; i < 5; ++i) {
            left.grad[d][i] = 0.01 * (d + 1) * (i - 2);
            right.grad[d][i] = 0.012 * (d + 1) * (2 - i);
        }
    for (auto _ : state) {
        FluxBundle out = interface_flux(setup, normal, left, right);
        benchmark::DoNotOptimize(out.flux_n[0]);
    }
}

void bm_full_step(benchmark::State& state) {
    VortexCase c;
    StructuredMesh mesh = c.make_mesh(int(state.range(0)), 0.0);
    SolverConfig sc;
    sc.gas = c.gas();
    sc.collision = CollisionMode::viscous;
    sc.blend = BlendMode::linear;
    Solver solver(mesh, sc);
    initialize_state(solver, [&c](const Vec3& x) { return c.initial(x); });
    const double dt = 0.5 * solver.stable_time_step();
    for (auto _ : state) {
        solver.advance(dt);
    }
    state.SetItemsProcessed(state.iterations() * mesh.cell_count());
}

BENCHMARK(bm_reconstruct_linear);
BENCHMARK(bm_reconstruct_nonlinear);
BENCHMARK(bm_interface_flux);
BENCHMARK(bm_full_step)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
