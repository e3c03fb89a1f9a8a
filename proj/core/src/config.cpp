#include "cgks/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cgks {

namespace {

double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': bad number '" + value + "'");
    }
    if (used != value.size())
        throw std::invalid_argument("config key '" + key + "': bad number '" + value + "'");
    return v;
}

int parse_int(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(value, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': bad integer '" + value + "'");
    }
    if (used != value.size())
        throw std::invalid_argument("config key '" + key + "': bad integer '" + value + "'");
    return v;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "case")
        cfg.case_name = (value == "taylor-green") ? "tgv" : value;
    else if (key == "mesh_n")
        cfg.mesh_n = parse_int(key, value);
    else if (key == "mode")
        cfg.mode = value;
    else if (key == "ma")
        cfg.ma = parse_double(key, value);
    else if (key == "re")
        cfg.re = parse_double(key, value);
    else if (key == "prandtl")
        cfg.prandtl = parse_double(key, value);
    else if (key == "gamma")
        cfg.gamma = parse_double(key, value);
    else if (key == "cfl")
        cfg.cfl = parse_double(key, value);
    else if (key == "t_final")
        cfg.t_final = parse_double(key, value);
    else if (key == "distortion")
        cfg.distortion = parse_double(key, value);
    else if (key == "workers")
        cfg.workers = parse_int(key, value);
    else if (key == "out_dir")
        cfg.out_dir = value;
    else if (key == "snapshots")
        cfg.snapshots = parse_int(key, value);
    else if (key == "diag_every")
        cfg.diag_every = parse_int(key, value);
    else if (key == "geno.sharpness")
        cfg.geno_sharpness = parse_double(key, value);
    else if (key == "geno.epsilon")
        cfg.geno_epsilon = parse_double(key, value);
    else if (key == "geno.r")
        cfg.geno_r = parse_double(key, value);
    else
        throw std::invalid_argument("unknown config key '" + key + "'");
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected 'key = value'");
        set_config_value(cfg, trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    }
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "case = " << cfg.case_name << "\n";
    out << "mesh_n = " << cfg.mesh_n << "\n";
    out << "mode = " << cfg.mode << "\n";
    out << "ma = " << format_double(cfg.ma) << "\n";
    out << "re = " << format_double(cfg.re) << "\n";
    out << "prandtl = " << format_double(cfg.prandtl) << "\n";
    out << "gamma = " << format_double(cfg.gamma) << "\n";
    out << "cfl = " << format_double(cfg.cfl) << "\n";
    out << "t_final = " << format_double(cfg.t_final) << "\n";
    out << "distortion = " << format_double(cfg.distortion) << "\n";
    out << "workers = " << cfg.workers << "\n";
    out << "out_dir = " << cfg.out_dir << "\n";
    out << "snapshots = " << cfg.snapshots << "\n";
    out << "diag_every = " << cfg.diag_every << "\n";
    out << "geno.sharpness = " << format_double(cfg.geno_sharpness) << "\n";
    out << "geno.epsilon = " << format_double(cfg.geno_epsilon) << "\n";
    out << "geno.r = " << format_double(cfg.geno_r) << "\n";
    return out.str();
}

void validate_config(const RunConfig& cfg) {
    if (cfg.case_name != "advection" && cfg.case_name != "tgv")
        throw std::invalid_argument("unknown case '" + cfg.case_name + "'");
    if (cfg.mode != "linear" && cfg.mode != "nonlinear")
        throw std::invalid_argument("mode must be linear or nonlinear");
    if (cfg.mesh_n < 2) throw std::invalid_argument("mesh_n must be >= 2");
    if (!(cfg.ma > 0.0)) throw std::invalid_argument("ma must be positive");
    if (!(cfg.re > 0.0)) throw std::invalid_argument("re must be positive");
    if (!(cfg.prandtl > 0.0)) throw std::invalid_argument("prandtl must be positive");
    if (!(cfg.gamma > 1.0)) throw std::invalid_argument("gamma must exceed 1");
    if (!(cfg.cfl > 0.0) || cfg.cfl > 1.0)
        throw std::invalid_argument("cfl must lie in (0, 1]");
    if (cfg.distortion < 0.0) throw std::invalid_argument("distortion must be >= 0");
    if (cfg.workers < 0) throw std::invalid_argument("workers must be >= 0");
    if (cfg.snapshots < 0) throw std::invalid_argument("snapshots must be >= 0");
    if (cfg.diag_every < 1) throw std::invalid_argument("diag_every must be >= 1");
    if (!(cfg.geno_sharpness > 0.0))
        throw std::invalid_argument("geno.sharpness must be positive");
    if (!(cfg.geno_epsilon > 0.0)) throw std::invalid_argument("geno.epsilon must be positive");
    if (!(cfg.geno_r > 0.0)) throw std::invalid_argument("geno.r must be positive");
}

}  // namespace cgks
