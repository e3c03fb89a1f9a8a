#include "cgks/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "json.hpp"

namespace cgks {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw std::runtime_error("cannot create directory '" + path + "': " + ec.message());
}

void write_vtk(const std::string& path, const StructuredMesh& mesh,
               const std::vector<CellDOF>& state, const GasModel& gas,
               const std::string& title) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    const int nx = mesh.n(0), ny = mesh.n(1), nz = mesh.n(2);
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET STRUCTURED_GRID\n";
    out << "DIMENSIONS " << nx + 1 << " " << ny + 1 << " " << nz + 1 << "\n";
    out << "POINTS " << (nx + 1) * (ny + 1) * (nz + 1) << " double\n";
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i) {
                const Vec3 p = mesh.node(i, j, k);
                out << fmt(p.x) << " " << fmt(p.y) << " " << fmt(p.z) << "\n";
            }
    const int ncells = mesh.cell_count();
    out << "CELL_DATA " << ncells << "\n";
    out << "SCALARS density double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < ncells; ++c) out << fmt(state[c].q[0]) << "\n";
    out << "VECTORS velocity double\n";
    for (int c = 0; c < ncells; ++c) {
        const Vec5& q = state[c].q;
        out << fmt(q[1] / q[0]) << " " << fmt(q[2] / q[0]) << " " << fmt(q[3] / q[0]) << "\n";
    }
    out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < ncells; ++c) out << fmt(pressure_of(state[c].q, gas)) << "\n";
    out << "SCALARS mach double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < ncells; ++c) {
        const Vec5& q = state[c].q;
        const Vec3 vel{q[1] / q[0], q[2] / q[0], q[3] / q[0]};
        const double p = pressure_of(q, gas);
        const double c2 = gas.gamma * p / q[0];
        out << fmt(norm(vel) / std::sqrt(std::max(c2, 0.0))) << "\n";
    }
    out << "SCALARS grad_rho_mag double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < ncells; ++c) {
        const auto& g = state[c].grad;
        out << fmt(norm({g[0][0], g[1][0], g[2][0]})) << "\n";
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

CsvWriter::CsvWriter(const std::string& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open '" + path + "' for writing");
    out_ << header << "\n";
    out_.flush();
}

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out_ << ",";
        out_ << fmt(values[i]);
    }
    out_ << "\n";
    out_.flush();
}

void CsvWriter::line(const std::string& preformatted) {
    out_ << preformatted << "\n";
    out_.flush();
}

void write_summary(const std::string& path, const RunSummary& s) {
    nlohmann::ordered_json j;
    j["case"] = s.config.case_name;
    nlohmann::ordered_json cfg;
    cfg["mesh_n"] = s.config.mesh_n;
    cfg["mode"] = s.config.mode;
    cfg["ma"] = s.config.ma;
    cfg["re"] = s.config.re;
    cfg["prandtl"] = s.config.prandtl;
    cfg["gamma"] = s.config.gamma;
    cfg["cfl"] = s.config.cfl;
    cfg["t_final"] = s.config.t_final;
    cfg["distortion"] = s.config.distortion;
    cfg["workers"] = s.config.workers;
    cfg["out_dir"] = s.config.out_dir;
    cfg["snapshots"] = s.config.snapshots;
    cfg["diag_every"] = s.config.diag_every;
    cfg["geno.sharpness"] = s.config.geno_sharpness;
    cfg["geno.epsilon"] = s.config.geno_epsilon;
    cfg["geno.r"] = s.config.geno_r;
    j["config"] = cfg;
    j["steps"] = s.steps;
    j["end_time"] = s.end_time;
    j["wall_seconds"] = s.wall_seconds;
    j["fallback_total"] = s.fallback_total;
    j["min_density"] = s.min_density;
    j["min_pressure"] = s.min_pressure;

    const auto diag_json = [](const Diagnostics& d) {
        nlohmann::ordered_json o;
        o["kinetic_energy"] = d.kinetic_energy;
        o["dissipation"] = d.dissipation;
        o["totals"] = {d.totals[0], d.totals[1], d.totals[2], d.totals[3], d.totals[4]};
        return o;
    };
    j["initial"] = diag_json(s.initial);
    j["final"] = diag_json(s.final_state);

    const double mass_scale = std::max(std::abs(s.initial.totals[0]), 1e-300);
    nlohmann::ordered_json drift;
    for (int i = 0; i < 5; ++i) {
        const double scale = std::max(std::abs(s.initial.totals[i]), mass_scale);
        drift.push_back((s.final_state.totals[i] - s.initial.totals[i]) / scale);
    }
    j["conservation_drift"] = drift;

    if (s.has_errors) {
        j["errors"] = {{"l1", s.errors.l1}, {"l2", s.errors.l2}};
    }

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
}

}  // namespace cgks
