#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "cgks/cases.hpp"
#include "cgks/config.hpp"
#include "cgks/evolution.hpp"
#include "cgks/mesh.hpp"

namespace cgks {

// Legacy ASCII structured-grid file with density, velocity and pressure as
// cell data. Deterministic formatting (%.17g).
void write_vtk(const std::string& path, const StructuredMesh& mesh,
               const std::vector<CellDOF>& state, const GasModel& gas,
               const std::string& title);

// Comma-separated writer; rows flush immediately. Doubles print as %.17g so
// integral values stay integral.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header);
    void row(const std::vector<double>& values);
    void line(const std::string& preformatted);

private:
    std::ofstream out_;
};

struct RunSummary {
    RunConfig config;
    int steps = 0;
    double end_time = 0.0;
    double wall_seconds = 0.0;
    long fallback_total = 0;
    double min_density = 0.0;
    double min_pressure = 0.0;
    Diagnostics initial;
    Diagnostics final_state;
    bool has_errors = false;
    ErrorNorms errors;
};

void write_summary(const std::string& path, const RunSummary& s);

void ensure_directory(const std::string& path);

}  // namespace cgks
