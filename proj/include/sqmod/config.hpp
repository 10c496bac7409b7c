#ifndef SQMOD_CONFIG_HPP
#define SQMOD_CONFIG_HPP

#include "sqmod/params.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqmod {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything an experiment driver needs: the physics blocks plus run
/// control. Loaded from a flat key-value file; units are part of the key
/// names (probe.power_mw, probe.wavelength_nm, probe.squeeze_db, ...).
struct ExperimentConfig {
    ProbeParams probe;
    ModulationParams mod;
    DetectionParams det;

    std::uint64_t seed = 0;
    bool has_seed = false;
    int k_samples = 50;
    int reps = 236;
    int threads = 0; // 0 = use hardware concurrency
    double delta_m_jitter = 0.0;
    bool measured_floors = false;

    // sweep grids; empty means the documented defaults
    std::vector<double> sweep_phi_db;
    std::vector<double> sweep_rbw_hz;
    std::vector<double> fig1d_phi_db;
    double fig1d_rbw_min_hz = 1.0;
    double fig1d_rbw_max_hz = 1.0e7;
    int fig1d_points_per_decade = 10;

    // time-domain settings
    double sample_rate_hz = 2.56e7;
    double classical_cutoff_hz = 2.0e6;
    double trace_offset_bins = 5.0;
    int trace_half_span_bins = 50;
    double trace_anti_squeeze_db = 2.7;
    long long trace_segments = 20000;

    int effective_threads() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);

/// Parses "a,b,c" into doubles; used for the sweep-grid keys.
std::vector<double> parse_double_list(const std::string& text, const std::string& key);

} // namespace sqmod

#endif
