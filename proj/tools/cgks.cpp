#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cgks/cases.hpp"
#include "cgks/config.hpp"
#include "cgks/evolution.hpp"
#include "cgks/io.hpp"
#include "cgks/reconstruction.hpp"

namespace {

using namespace cgks;

constexpr const char* kVersion = "1.0.0";

struct KeyFlag {
    const char* names;
    const char* key;
    const char* help;
};

constexpr KeyFlag kFlags[] = {
    {"--mesh_n,--mesh", "mesh_n", "cells per axis"},
    {"--mode", "mode", "reconstruction blend: linear | nonlinear"},
    {"--ma", "ma", "vortex Mach number"},
    {"--re", "re", "vortex Reynolds number"},
    {"--prandtl", "prandtl", "Prandtl number"},
    {"--gamma", "gamma", "ratio of specific heats"},
    {"--cfl", "cfl", "CFL number in (0, 1]"},
    {"--t_final,--tfinal", "t_final", "end time (negative: case default)"},
    {"--distortion", "distortion", "mesh distortion amplitude (tgv only)"},
    {"--workers", "workers", "worker threads (0: CGKS_WORKERS env, then 1)"},
    {"--out_dir", "out_dir", "artifact directory"},
    {"--snapshots", "snapshots", "evenly spaced field dumps (0 disables)"},
    {"--diag_every", "diag_every", "diagnostics row every k steps"},
    {"--geno.sharpness", "geno.sharpness", "blending steepness C"},
    {"--geno.epsilon", "geno.epsilon", "smoothness floor"},
    {"--geno.r", "geno.r", "adaptation exponent r"},
};
constexpr std::size_t kNumFlags = std::size(kFlags);

struct ConfigCli {
    std::string config_path;
    std::array<std::string, kNumFlags> values{};
    std::array<CLI::Option*, kNumFlags> opts{};
};

void add_config_flags(CLI::App* cmd, ConfigCli& cc) {
    cmd->add_option("--config", cc.config_path,
                    "key = value file, applied before the other flags");
    for (std::size_t i = 0; i < kNumFlags; ++i)
        cc.opts[i] = cmd->add_option(kFlags[i].names, cc.values[i], kFlags[i].help);
}

RunConfig resolve_config(const ConfigCli& cc, const std::string& case_name) {
    RunConfig cfg;
    if (!cc.config_path.empty()) load_config_file(cfg, cc.config_path);
    if (!case_name.empty()) set_config_value(cfg, "case", case_name);
    for (std::size_t i = 0; i < kNumFlags; ++i)
        if (cc.opts[i] != nullptr && cc.opts[i]->count() > 0)
            set_config_value(cfg, kFlags[i].key, cc.values[i]);
    if (cfg.workers == 0) {
        if (const char* env = std::getenv("CGKS_WORKERS"))
            set_config_value(cfg, "workers", env);
        else
            cfg.workers = 1;
    }
    if (cfg.workers <= 0) throw std::invalid_argument("worker count must be positive");
    validate_config(cfg);
    return cfg;
}

struct CaseSetup {
    StructuredMesh mesh;
    SolverConfig solver;
    PrimitiveField initial;
    PrimitiveField exact_final;  // advection only
    double t_final = 0.0;
};

CaseSetup make_case(const RunConfig& cfg) {
    CaseSetup s;
    s.solver.blend = cfg.mode == "nonlinear" ? BlendMode::nonlinear : BlendMode::linear;
    s.solver.geno = GenoParams{cfg.geno_sharpness, cfg.geno_epsilon, cfg.geno_r};
    s.solver.cfl = cfg.cfl;
    s.solver.workers = cfg.workers;
    if (cfg.case_name == "advection") {
        if (cfg.distortion != 0.0)
            throw std::invalid_argument("the advection case runs on the uniform mesh");
        AdvectionCase c;
        s.mesh = c.make_mesh(cfg.mesh_n);
        s.solver.gas = c.gas();
        s.solver.gas.gamma = cfg.gamma;
        s.solver.collision = CollisionMode::off;
        s.t_final = cfg.t_final < 0.0 ? c.final_time : cfg.t_final;
        const double tf = s.t_final;
        s.initial = [c](const Vec3& x) { return c.exact(x, 0.0); };
        s.exact_final = [c, tf](const Vec3& x) { return c.exact(x, tf); };
    } else {
        VortexCase c;
        c.mach = cfg.ma;
        c.reynolds = cfg.re;
        c.prandtl = cfg.prandtl;
        c.gamma = cfg.gamma;
        s.mesh = c.make_mesh(cfg.mesh_n, cfg.distortion);
        s.solver.gas = c.gas();
        s.solver.collision = CollisionMode::viscous;
        s.solver.reference_density = c.rho0;
        s.t_final = cfg.t_final < 0.0 ? 10.0 : cfg.t_final;
        s.initial = [c](const Vec3& x) { return c.initial(x); };
    }
    return s;
}

// Volume-weighted conservative totals in canonical cell order, compensated so
// the record does not depend on the worker count.
Vec5 conservation_totals(const Solver& solver) {
    const StructuredMesh& mesh = solver.mesh();
    const auto& state = solver.state();
    double sum[5] = {}, comp[5] = {};
    const int n = mesh.cell_count();
    for (int c = 0; c < n; ++c) {
        const double vol = mesh.cell_geometry(c).volume;
        for (int i = 0; i < 5; ++i) {
            const double term = state[c].q[i] * vol;
            const double t = sum[i] + term;
            comp[i] += std::abs(sum[i]) >= std::abs(term) ? (sum[i] - t) + term
                                                          : (term - t) + sum[i];
            sum[i] = t;
        }
    }
    Vec5 out{};
    for (int i = 0; i < 5; ++i) out[i] = sum[i] + comp[i];
    return out;
}

void state_bounds(const Solver& solver, const GasModel& gas, double& min_rho, double& min_p) {
    min_rho = min_p = std::numeric_limits<double>::infinity();
    for (const CellDOF& cell : solver.state()) {
        min_rho = std::min(min_rho, cell.q[0]);
        min_p = std::min(min_p, pressure_of(cell.q, gas));
    }
}

void advance_to(Solver& solver, double t_final) {
    double t = 0.0;
    while (t < t_final) {
        double dt = solver.stable_time_step();
        bool last = false;
        if (t + dt >= t_final) {
            dt = t_final - t;
            last = true;
        }
        solver.advance(dt);
        t = last ? t_final : t + dt;
    }
}

int cmd_run(const RunConfig& cfg) {
    CaseSetup cs = make_case(cfg);
    Solver solver(cs.mesh, cs.solver);
    const auto wall_start = std::chrono::steady_clock::now();
    initialize_state(solver, cs.initial);

    ensure_directory(cfg.out_dir);
    {
        std::ofstream out(cfg.out_dir + "/resolved_config.cfg");
        if (!out) throw std::runtime_error("cannot write to '" + cfg.out_dir + "'");
        out << serialize_config(cfg);
    }
    CsvWriter diag(cfg.out_dir + "/diagnostics.csv",
                   "t,Ek,enstrophy,mass,momx,momy,momz,energy");
    CsvWriter stats(cfg.out_dir + "/steps.csv",
                    "step,t,dt,mass,momx,momy,momz,energy,fallback_points,min_density,"
                    "min_pressure");

    const auto snapshot = [&](long step) {
        char name[64];
        std::snprintf(name, sizeof(name), "%s_%06ld.vtk", cfg.case_name.c_str(), step);
        write_vtk(cfg.out_dir + "/" + name, cs.mesh, solver.state(), cs.solver.gas,
                  cfg.case_name);
    };
    if (cfg.snapshots > 0) snapshot(0);

    RunSummary summary;
    summary.config = cfg;
    state_bounds(solver, cs.solver.gas, summary.min_density, summary.min_pressure);

    std::printf("%s: %d^3 cells, %s blend, %d worker%s, t_final %g\n",
                cfg.case_name.c_str(), cfg.mesh_n, cfg.mode.c_str(), cfg.workers,
                cfg.workers == 1 ? "" : "s", cs.t_final);

    long step = 0;
    double t = 0.0;
    int next_snap = 1;
    bool have_initial = false;
    std::vector<CellDOF> before_step;
    try {
        while (t < cs.t_final) {
            double dt = solver.stable_time_step();
            bool last = false;
            if (t + dt >= cs.t_final) {
                dt = cs.t_final - t;
                last = true;
            }
            before_step = solver.state();
            Diagnostics d;
            const bool want = step % cfg.diag_every == 0;
            const StepStats ss = solver.advance(dt, want ? &d : nullptr);
            if (want) {
                diag.row({t, d.kinetic_energy, d.dissipation, d.totals[0], d.totals[1],
                          d.totals[2], d.totals[3], d.totals[4]});
                std::printf("step %6ld  t %.6f  dt %.4e  Ek %.8e  enstrophy %.8e\n", step, t,
                            dt, d.kinetic_energy, d.dissipation);
                std::fflush(stdout);
                if (!have_initial) {
                    summary.initial = d;
                    have_initial = true;
                }
            }
            ++step;
            t = last ? cs.t_final : t + dt;
            const Vec5 totals = conservation_totals(solver);
            stats.row({double(step), t, ss.dt, totals[0], totals[1], totals[2], totals[3],
                       totals[4], double(ss.fallback_points), ss.min_density,
                       ss.min_pressure});
            summary.fallback_total += ss.fallback_points;
            summary.min_density = std::min(summary.min_density, ss.min_density);
            summary.min_pressure = std::min(summary.min_pressure, ss.min_pressure);
            if (cfg.snapshots > 0 && next_snap <= cfg.snapshots &&
                t >= cs.t_final * next_snap / cfg.snapshots - 1e-12 * cs.t_final) {
                snapshot(step);
                while (next_snap <= cfg.snapshots &&
                       t >= cs.t_final * next_snap / cfg.snapshots - 1e-12 * cs.t_final)
                    ++next_snap;
            }
        }
    } catch (const std::exception& e) {
        if (!before_step.empty()) {
            solver.state() = before_step;
            snapshot(step);
        }
        std::fprintf(stderr, "error: %s (step %ld, t %.8g; last good state flushed)\n",
                     e.what(), step, t);
        return 1;
    }

    Diagnostics final_d = solver.measure();
    diag.row({t, final_d.kinetic_energy, final_d.dissipation, final_d.totals[0],
              final_d.totals[1], final_d.totals[2], final_d.totals[3], final_d.totals[4]});
    if (!have_initial) summary.initial = final_d;
    summary.final_state = final_d;
    summary.steps = int(step);
    summary.end_time = t;
    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    if (cs.exact_final) {
        summary.has_errors = true;
        summary.errors = density_error(solver, cs.exact_final);
    }
    write_summary(cfg.out_dir + "/summary.json", summary);

    std::printf("done: %ld steps to t %.8g in %.1f s\n", step, t, summary.wall_seconds);
    if (summary.has_errors)
        std::printf("density error: L1 %.6e  L2 %.6e\n", summary.errors.l1,
                    summary.errors.l2);
    return 0;
}

int cmd_converge(const RunConfig& base, const std::vector<int>& meshes) {
    if (base.case_name != "advection")
        throw std::invalid_argument("the convergence study supports the advection case only");
    if (meshes.empty()) throw std::invalid_argument("empty mesh list");
    for (std::size_t i = 0; i + 1 < meshes.size(); ++i)
        if (meshes[i + 1] != 2 * meshes[i])
            throw std::invalid_argument("mesh list must refine by a factor of two");

    ensure_directory(base.out_dir);
    CsvWriter err(base.out_dir + "/errors.csv", "mesh,L1,L1_order,L2,L2_order");
    std::printf("%6s %14s %8s %14s %8s\n", "mesh", "L1", "order", "L2", "order");

    double prev_l1 = 0.0, prev_l2 = 0.0;
    bool first = true;
    for (int n : meshes) {
        RunConfig cfg = base;
        cfg.mesh_n = n;
        validate_config(cfg);
        CaseSetup cs = make_case(cfg);
        Solver solver(cs.mesh, cs.solver);
        initialize_state(solver, cs.initial);
        advance_to(solver, cs.t_final);
        const ErrorNorms e = density_error(solver, cs.exact_final);
        if (first) {
            char row[160];
            std::snprintf(row, sizeof(row), "%d,%.17g,,%.17g,", n, e.l1, e.l2);
            err.line(row);
            std::printf("%6d %14.6e %8s %14.6e %8s\n", n, e.l1, "", e.l2, "");
        } else {
            const double o1 = std::log2(prev_l1 / e.l1);
            const double o2 = std::log2(prev_l2 / e.l2);
            err.row({double(n), e.l1, o1, e.l2, o2});
            std::printf("%6d %14.6e %8.4f %14.6e %8.4f\n", n, e.l1, o1, e.l2, o2);
        }
        std::fflush(stdout);
        prev_l1 = e.l1;
        prev_l2 = e.l2;
        first = false;
    }
    return 0;
}

int cmd_info(const std::string& operator_csv) {
    const ReconstructionOperator& op = reconstruction_operator();
    std::printf("cgks %s\n", kVersion);
    std::printf("compiler: %s\n", __VERSION__);
    std::printf("language standard: %ld\n", static_cast<long>(__cplusplus));
    std::printf("reconstruction operator:\n");
    std::printf("  stencil inputs:      %d\n", ReconstructionOperator::rhs_size);
    std::printf("  polynomial unknowns: %d\n", ReconstructionOperator::unknowns);
    std::printf("  constraint block condition:    %.6e\n", op.cond_strict);
    std::printf("  least-squares block condition: %.6e\n", op.cond_lsq);
    if (!operator_csv.empty()) {
        std::ofstream out(operator_csv);
        if (!out) throw std::runtime_error("cannot open '" + operator_csv + "' for writing");
        char buf[40];
        for (int r = 0; r < ReconstructionOperator::unknowns; ++r) {
            for (int c = 0; c < ReconstructionOperator::rhs_size; ++c) {
                std::snprintf(buf, sizeof(buf), "%.17g",
                              op.quartic[std::size_t(r) * ReconstructionOperator::rhs_size + c]);
                out << (c ? "," : "") << buf;
            }
            out << "\n";
        }
        std::printf("operator map written to %s\n", operator_csv.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"compact gas-kinetic solver on periodic structured blocks"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "advance one case and write artifacts");
    std::string run_case;
    run->add_option("case", run_case, "advection | tgv")->required();
    ConfigCli run_cc;
    add_config_flags(run, run_cc);

    auto* conv = app.add_subcommand("converge", "mesh refinement study (advection)");
    std::string conv_case;
    conv->add_option("case", conv_case, "advection")->required();
    std::string conv_meshes = "10,20,40";
    conv->add_option("--meshes", conv_meshes, "comma-separated cells per axis");
    ConfigCli conv_cc;
    add_config_flags(conv, conv_cc);

    auto* info = app.add_subcommand("info", "operator conditioning and build report");
    std::string operator_csv;
    info->add_option("--operator_csv", operator_csv, "dump the stencil-to-coefficient map");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(resolve_config(run_cc, run_case));
        if (conv->parsed()) {
            std::vector<int> meshes;
            std::stringstream ss(conv_meshes);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) meshes.push_back(std::stoi(item));
            return cmd_converge(resolve_config(conv_cc, conv_case), meshes);
        }
        if (info->parsed()) return cmd_info(operator_csv);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
