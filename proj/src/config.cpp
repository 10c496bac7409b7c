#include "sqmod/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <thread>

namespace sqmod {

int ExperimentConfig::effective_threads() const {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
        throw ConfigError("config key '" + key + "': cannot parse number '" + t + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
        throw ConfigError("config key '" + key + "': cannot parse unsigned integer '" + t + "'");
    return v;
}

bool parse_bool(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError("config key '" + key + "': expected true/false, got '" + t + "'");
}

} // namespace

std::vector<double> parse_double_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string piece =
            comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
        if (!trim(piece).empty()) out.push_back(parse_double(piece, key));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());

    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!kv.emplace(key, value).second)
            throw ConfigError("config key '" + key + "' appears twice");
    }

    const std::set<std::string> known = {
        "probe.power_mw", "probe.wavelength_nm", "probe.squeeze_db", "probe.quad_phase_rad",
        "probe.squeeze_bandwidth_hz", "probe.peak_power_w",
        "mod.delta_m", "mod.omega_hz",
        "det.eta", "det.load_ohm", "det.rbw_hz", "det.m_avg", "det.var_h", "det.var_n",
        "run.seed", "run.k_samples", "run.reps", "run.threads", "run.delta_m_jitter",
        "run.measured_floors",
        "sweep.phi_db", "sweep.rbw_hz",
        "fig1d.phi_db", "fig1d.rbw_min_hz", "fig1d.rbw_max_hz", "fig1d.points_per_decade",
        "sim.sample_rate_hz", "sim.classical_cutoff_hz",
        "trace.offset_bins", "trace.half_span_bins", "trace.anti_squeeze_db", "trace.segments",
    };
    for (const auto& [key, value] : kv) {
        if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }

    auto require = [&](const std::string& key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) throw ConfigError("missing required config key '" + key + "'");
        return it->second;
    };
    auto optional = [&](const std::string& key) -> const std::string* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    ExperimentConfig cfg;
    cfg.probe.power_avg_w = parse_double(require("probe.power_mw"), "probe.power_mw") * 1.0e-3;
    cfg.probe.wavelength_m =
        parse_double(require("probe.wavelength_nm"), "probe.wavelength_nm") * 1.0e-9;
    cfg.probe.squeezing_phi = phi_from_db(parse_double(require("probe.squeeze_db"), "probe.squeeze_db"));
    if (const auto* v = optional("probe.quad_phase_rad"))
        cfg.probe.quad_phase_rad = parse_double(*v, "probe.quad_phase_rad");
    if (const auto* v = optional("probe.squeeze_bandwidth_hz"))
        cfg.probe.squeeze_bandwidth_hz = parse_double(*v, "probe.squeeze_bandwidth_hz");
    if (const auto* v = optional("probe.peak_power_w"))
        cfg.probe.peak_power_w = parse_double(*v, "probe.peak_power_w");

    const double delta_m = parse_double(require("mod.delta_m"), "mod.delta_m");
    const double omega = parse_double(require("mod.omega_hz"), "mod.omega_hz");

    cfg.det.eta = parse_double(require("det.eta"), "det.eta");
    cfg.det.load_r_ohm = parse_double(require("det.load_ohm"), "det.load_ohm");
    cfg.det.rbw_hz = parse_double(require("det.rbw_hz"), "det.rbw_hz");
    cfg.det.m_avg = parse_double(require("det.m_avg"), "det.m_avg");
    cfg.det.var_h = parse_double(require("det.var_h"), "det.var_h");
    cfg.det.var_n = parse_double(require("det.var_n"), "det.var_n");

    if (const auto* v = optional("run.seed")) {
        cfg.seed = parse_u64(*v, "run.seed");
        cfg.has_seed = true;
    }
    if (const auto* v = optional("run.k_samples"))
        cfg.k_samples = static_cast<int>(parse_double(*v, "run.k_samples"));
    if (const auto* v = optional("run.reps"))
        cfg.reps = static_cast<int>(parse_double(*v, "run.reps"));
    if (const auto* v = optional("run.threads"))
        cfg.threads = static_cast<int>(parse_double(*v, "run.threads"));
    if (const auto* v = optional("run.delta_m_jitter"))
        cfg.delta_m_jitter = parse_double(*v, "run.delta_m_jitter");
    if (const auto* v = optional("run.measured_floors"))
        cfg.measured_floors = parse_bool(*v, "run.measured_floors");

    if (const auto* v = optional("sweep.phi_db")) cfg.sweep_phi_db = parse_double_list(*v, "sweep.phi_db");
    if (const auto* v = optional("sweep.rbw_hz")) cfg.sweep_rbw_hz = parse_double_list(*v, "sweep.rbw_hz");
    if (const auto* v = optional("fig1d.phi_db")) cfg.fig1d_phi_db = parse_double_list(*v, "fig1d.phi_db");
    if (const auto* v = optional("fig1d.rbw_min_hz"))
        cfg.fig1d_rbw_min_hz = parse_double(*v, "fig1d.rbw_min_hz");
    if (const auto* v = optional("fig1d.rbw_max_hz"))
        cfg.fig1d_rbw_max_hz = parse_double(*v, "fig1d.rbw_max_hz");
    if (const auto* v = optional("fig1d.points_per_decade"))
        cfg.fig1d_points_per_decade = static_cast<int>(parse_double(*v, "fig1d.points_per_decade"));

    if (const auto* v = optional("sim.sample_rate_hz"))
        cfg.sample_rate_hz = parse_double(*v, "sim.sample_rate_hz");
    if (const auto* v = optional("sim.classical_cutoff_hz"))
        cfg.classical_cutoff_hz = parse_double(*v, "sim.classical_cutoff_hz");
    if (const auto* v = optional("trace.offset_bins"))
        cfg.trace_offset_bins = parse_double(*v, "trace.offset_bins");
    if (const auto* v = optional("trace.half_span_bins"))
        cfg.trace_half_span_bins = static_cast<int>(parse_double(*v, "trace.half_span_bins"));
    if (const auto* v = optional("trace.anti_squeeze_db"))
        cfg.trace_anti_squeeze_db = parse_double(*v, "trace.anti_squeeze_db");
    if (const auto* v = optional("trace.segments"))
        cfg.trace_segments = static_cast<long long>(parse_double(*v, "trace.segments"));

    try {
        cfg.probe.validate();
        cfg.mod = ModulationParams::make(delta_m, omega);
        cfg.det.validate();
        check_band_covers_sideband(cfg.probe, cfg.mod);
    } catch (const ParamError& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
    if (cfg.k_samples < 2) throw ConfigError("run.k_samples must be >= 2");
    if (cfg.reps < 1) throw ConfigError("run.reps must be >= 1");
    return cfg;
}

} // namespace sqmod
