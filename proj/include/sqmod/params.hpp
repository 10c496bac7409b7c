#ifndef SQMOD_PARAMS_HPP
#define SQMOD_PARAMS_HPP

#include <stdexcept>

namespace sqmod {

// Thrown when a parameter set violates a physical precondition.
class ParamError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Optical probe description. squeezing_phi is the amplitude-quadrature
/// noise-variance ratio relative to a coherent state: phi < 1 squeezed,
/// phi = 1 coherent, phi > 1 antisqueezed.
struct ProbeParams {
    double power_avg_w = 0.0;            // <P>, average optical power (W)
    double wavelength_m = 0.0;           // carrier wavelength (m)
    double squeezing_phi = 1.0;          // noise-power ratio, dimensionless
    double quad_phase_rad = 0.0;         // quadrature orientation theta (rad)
    double squeeze_bandwidth_hz = 1.0e8; // Lambda, band over which squeezing holds (Hz)
    double peak_power_w = 0.0;           // recorded for bookkeeping; the CW model uses power_avg_w

    void validate() const;
};

/// Sinusoidal amplitude modulation of index delta_m at frequency omega_mod.
/// psi0/psi_m are the carrier and sideband transmission factors.
struct ModulationParams {
    double delta_m = 0.0;     // modulation index, dimensionless; weak regime delta_m < 0.01
    double omega_mod_hz = 0.0;
    double psi0 = 1.0;        // 1 - delta_m/2
    double psi_m = 0.0;       // delta_m/2

    static ModulationParams make(double delta_m, double omega_mod_hz);
    void validate() const;
};

/// Detector and spectrum-analyser settings. var_h is the variance of the
/// real part of the relative classical amplitude noise integrated over the
/// +-rbw/2 band at DC (dimensionless); var_n is the per-quadrature variance
/// of the electronic noise amplitude in the +-rbw/2 bin around the sideband
/// (units s^-2). Both are referenced to rbw_hz.
struct DetectionParams {
    double eta = 1.0;        // detection efficiency in [0, 1]
    double load_r_ohm = 50.0;
    double rbw_hz = 0.0;     // resolution bandwidth B (Hz)
    double m_avg = 1.0;      // spectral averages M, real-valued >= 1
    double var_h = 0.0;
    double var_n = 0.0;

    void validate() const;
};

/// Noise-power convention: squeezing quoted in dB converts as 10^(dB/10).
double phi_from_db(double db);
double db_from_phi(double phi);

/// Mean photocurrent i0 = q eta <P> / (hbar omega), omega = 2 pi c / lambda.
double mean_photocurrent(const ProbeParams& probe, const DetectionParams& det);

/// Photons detected per measurement window 1/B: <N> = i0 / (q B).
double mean_photon_count(double i0_amp, double rbw_hz);

/// The squeezing band must cover the sideband: Lambda/2 > Omega.
void check_band_covers_sideband(const ProbeParams& probe, const ModulationParams& mod);

} // namespace sqmod

#endif
