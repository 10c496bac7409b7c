#include "sqmod/params.hpp"
#include "sqmod/constants.hpp"

#include <cmath>
#include <string>

namespace sqmod {

void ProbeParams::validate() const {
    if (!(power_avg_w >= 0.0)) throw ParamError("probe: power_avg_w must be >= 0");
    if (!(wavelength_m > 0.0)) throw ParamError("probe: wavelength_m must be > 0");
    if (!(squeezing_phi > 0.0)) throw ParamError("probe: squeezing_phi must be > 0");
    if (!(squeeze_bandwidth_hz > 0.0)) throw ParamError("probe: squeeze_bandwidth_hz must be > 0");
    if (!std::isfinite(power_avg_w) || !std::isfinite(squeezing_phi))
        throw ParamError("probe: parameters must be finite");
}

ModulationParams ModulationParams::make(double delta_m, double omega_mod_hz) {
    ModulationParams m;
    m.delta_m = delta_m;
    m.omega_mod_hz = omega_mod_hz;
    // psi0 + psi_m == 1 holds exactly in floating point when both derive
    // from the same rounded half.
    const double half = delta_m / 2.0;
    m.psi_m = half;
    m.psi0 = 1.0 - half;
    m.validate();
    return m;
}

void ModulationParams::validate() const {
    if (!(delta_m >= 0.0)) throw ParamError("mod: delta_m must be >= 0");
    if (!(delta_m < 0.01))
        throw ParamError("mod: delta_m must stay in the weak-modulation regime (< 0.01)");
    if (!(omega_mod_hz > 0.0)) throw ParamError("mod: omega_mod_hz must be > 0");
}

void DetectionParams::validate() const {
    if (!(eta >= 0.0 && eta <= 1.0)) throw ParamError("det: eta must lie in [0, 1]");
    if (!(load_r_ohm >= 0.0)) throw ParamError("det: load_r_ohm must be >= 0");
    if (!(rbw_hz > 0.0)) throw ParamError("det: rbw_hz must be > 0");
    if (!(m_avg >= 1.0)) throw ParamError("det: m_avg must be >= 1");
    if (!(var_h >= 0.0)) throw ParamError("det: var_h must be >= 0");
    if (!(var_n >= 0.0)) throw ParamError("det: var_n must be >= 0");
}

double phi_from_db(double db) {
    if (!std::isfinite(db)) throw ParamError("phi_from_db: dB value must be finite");
    return std::pow(10.0, db / 10.0);
}

double db_from_phi(double phi) {
    if (!(phi > 0.0)) throw ParamError("db_from_phi: phi must be > 0");
    return 10.0 * std::log10(phi);
}

double mean_photocurrent(const ProbeParams& probe, const DetectionParams& det) {
    probe.validate();
    const double omega = 2.0 * M_PI * PhysConstants::c / probe.wavelength_m;
    return PhysConstants::q * det.eta * probe.power_avg_w / (PhysConstants::hbar * omega);
}

double mean_photon_count(double i0_amp, double rbw_hz) {
    if (!(rbw_hz > 0.0)) throw std::domain_error("mean_photon_count: rbw_hz must be > 0");
    return i0_amp / (PhysConstants::q * rbw_hz);
}

void check_band_covers_sideband(const ProbeParams& probe, const ModulationParams& mod) {
    if (!(probe.squeeze_bandwidth_hz / 2.0 > mod.omega_mod_hz))
        throw ParamError("probe: squeeze_bandwidth_hz/2 must exceed mod.omega_hz ("
                         + std::to_string(probe.squeeze_bandwidth_hz / 2.0) + " <= "
                         + std::to_string(mod.omega_mod_hz) + ")");
}

} // namespace sqmod
