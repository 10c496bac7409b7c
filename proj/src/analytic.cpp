#include "sqmod/analytic.hpp"
#include "sqmod/constants.hpp"

#include <cmath>
#include <stdexcept>

namespace sqmod {

namespace {
constexpr double kQ = PhysConstants::q;
} // namespace

double snr(double delta_m, double i0_amp, double phi, double rbw_hz) {
    if (!(rbw_hz > 0.0)) throw std::domain_error("snr: rbw_hz must be > 0");
    if (!(phi > 0.0)) throw std::domain_error("snr: phi must be > 0");
    return delta_m * delta_m * i0_amp / (4.0 * kQ * phi * rbw_hz);
}

NoisePowerModel mean_powers_at(double i0_amp, double delta_m, double phi,
                               const DetectionParams& det) {
    const double r = det.load_r_ohm;
    NoisePowerModel m;
    const double elec = r * 2.0 * kQ * kQ * (2.0 * det.var_n);
    const double floor_opt = r * 2.0 * kQ * i0_amp * phi * det.rbw_hz;
    const double signal = r * i0_amp * i0_amp * delta_m * delta_m / 2.0;
    m.p_elec_mean = elec;
    m.p_floor_mean = floor_opt + elec;
    m.p_omega_mean = signal + floor_opt + elec;
    return m;
}

double band_self_noise_power(const ProbeParams& probe, const DetectionParams& det) {
    const double phi = probe.squeezing_phi;
    const double shape = phi * phi / 8.0 + 1.0 / (8.0 * phi * phi) - 0.25;
    return 2.0 * kQ * kQ * det.load_r_ohm * det.rbw_hz * probe.squeeze_bandwidth_hz * shape;
}

NoisePowerModel mean_powers(const ProbeParams& probe, const ModulationParams& mod,
                            const DetectionParams& det, bool include_band_self_noise) {
    probe.validate();
    mod.validate();
    det.validate();
    const double i0 = mean_photocurrent(probe, det);
    NoisePowerModel m = mean_powers_at(i0, mod.delta_m, probe.squeezing_phi, det);
    if (include_band_self_noise) {
        const double corr = band_self_noise_power(probe, det);
        m.p_omega_mean += corr;
        m.p_floor_mean += corr;
    }
    return m;
}

DeltaEstimate estimate_delta_m(const SpectrumTriplet& s, double phi, double rbw_hz,
                               double i0_amp) {
    if (!(s.p_floor > s.p_elec))
        throw std::domain_error("estimate_delta_m: optical floor must exceed electronic floor");
    if (!(i0_amp > 0.0)) throw std::domain_error("estimate_delta_m: i0 must be > 0");
    DeltaEstimate est;
    if (s.p_omega <= s.p_floor) {
        est.below_floor = true;
        return est;
    }
    const double snr_hat = (s.p_omega - s.p_floor) / (s.p_floor - s.p_elec);
    est.value = std::sqrt(4.0 * kQ * phi * rbw_hz * snr_hat / i0_amp);
    return est;
}

double var_sideband_power(const ProbeParams& probe, const ModulationParams& mod,
                          const DetectionParams& det, double i0_amp) {
    const double r = det.load_r_ohm;
    const double dm2 = mod.delta_m * mod.delta_m;
    const double i2 = i0_amp * i0_amp;
    const double shot = 2.0 * kQ * dm2 * i2 * i0_amp * probe.squeezing_phi * det.rbw_hz;
    const double classical = 4.0 * dm2 * dm2 * i2 * i2 * det.var_h;
    const double electronic = 4.0 * kQ * kQ * dm2 * i2 * det.var_n;
    return r * r / det.m_avg * (shot + classical + electronic);
}

namespace {

FisherReport fisher_from_bracket(double bracket, double quantum_term_coherent,
                                 double classical_term, double electronic_term,
                                 const DetectionParams& det, double i0_amp) {
    FisherReport rep;
    rep.fisher = det.m_avg / bracket;
    rep.fisher_per_photon = rep.fisher / mean_photon_count(i0_amp, det.rbw_hz);
    rep.var_delta_m = bracket / det.m_avg;
    const double bracket_coherent = quantum_term_coherent + classical_term + electronic_term;
    rep.q_advantage = bracket_coherent / bracket;
    return rep;
}

} // namespace

FisherReport fisher_info(const ProbeParams& probe, const ModulationParams& mod,
                         const DetectionParams& det, double i0_amp) {
    const double quantum = 2.0 * kQ * probe.squeezing_phi * det.rbw_hz / i0_amp;
    const double quantum_coherent = 2.0 * kQ * det.rbw_hz / i0_amp;
    const double classical = 4.0 * mod.delta_m * mod.delta_m * det.var_h;
    return fisher_from_bracket(quantum + classical, quantum_coherent, classical, 0.0, det,
                               i0_amp);
}

FisherReport fisher_info_with_electronic(const ProbeParams& probe, const ModulationParams& mod,
                                         const DetectionParams& det, double i0_amp) {
    const double quantum = 2.0 * kQ * probe.squeezing_phi * det.rbw_hz / i0_amp;
    const double quantum_coherent = 2.0 * kQ * det.rbw_hz / i0_amp;
    const double classical = 4.0 * mod.delta_m * mod.delta_m * det.var_h;
    const double electronic = 4.0 * kQ * kQ * det.var_n / (i0_amp * i0_amp);
    return fisher_from_bracket(quantum + classical + electronic, quantum_coherent, classical,
                               electronic, det, i0_amp);
}

double quantum_advantage_opt(double phi) {
    if (!(phi > 0.0)) throw std::domain_error("quantum_advantage_opt: phi must be > 0");
    return 1.0 / phi;
}

double crossover_rbw(double delta_m, double var_h, double i0_amp, double phi) {
    if (!(phi > 0.0)) throw std::domain_error("crossover_rbw: phi must be > 0");
    if (var_h == 0.0) return 0.0;
    return 2.0 * delta_m * delta_m * var_h * i0_amp / (kQ * phi);
}

} // namespace sqmod
