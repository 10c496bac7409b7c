#ifndef SQMOD_ANALYTIC_HPP
#define SQMOD_ANALYTIC_HPP

#include "sqmod/params.hpp"

namespace sqmod {

/// One spectral measurement: electronic powers (W) of the modulation
/// sideband bin, the optical noise-floor bin and the electronic-floor bin.
struct SpectrumTriplet {
    double p_omega = 0.0;
    double p_floor = 0.0;
    double p_elec = 0.0;
};

/// Expected bin powers (W). Ordering p_omega_mean >= p_floor_mean >= p_elec_mean
/// holds for any delta_m >= 0.
struct NoisePowerModel {
    double p_omega_mean = 0.0;
    double p_floor_mean = 0.0;
    double p_elec_mean = 0.0;
};

struct FisherReport {
    double fisher = 0.0;            // F(delta_m), (dimensionless)^-2
    double fisher_per_photon = 0.0; // F' = F / <N>
    double var_delta_m = 0.0;       // Cramer-Rao variance, 1/F
    double q_advantage = 0.0;       // F(phi) / F(phi = 1)
};

struct DeltaEstimate {
    double value = 0.0;
    bool below_floor = false;       // sideband power did not exceed the floor
};

/// delta_SNR = delta_m^2 i0 / (4 q phi B).
double snr(double delta_m, double i0_amp, double phi, double rbw_hz);

/// Expected bin powers:
///   <p_omega> = R (i0^2 delta_m^2 / 2 + 2 q i0 phi B + 2 q^2 <|N_bin|^2>)
///   <p_floor> = the same without the signal term
///   <p_elec>  = R 2 q^2 <|N_bin|^2>
/// The electronic bin amplitude has two zero-mean quadratures of variance
/// var_n each, so <|N_bin|^2> = 2 var_n.
/// include_band_self_noise adds the squeezed-vacuum self-noise term
/// 2 q^2 R B Lambda (phi^2/8 + 1/(8 phi^2) - 1/4) to the optical bins; it is
/// negligible for bright carriers and off by default.
NoisePowerModel mean_powers(const ProbeParams& probe, const ModulationParams& mod,
                            const DetectionParams& det, bool include_band_self_noise = false);
NoisePowerModel mean_powers_at(double i0_amp, double delta_m, double phi,
                               const DetectionParams& det);

/// The self-noise wattage added per optical bin when the flag above is set.
double band_self_noise_power(const ProbeParams& probe, const DetectionParams& det);

/// delta_hat = sqrt(4 q phi B delta_SNR_hat / i0) with
/// delta_SNR_hat = (p_omega - p_floor)/(p_floor - p_elec).
/// p_omega <= p_floor yields 0 with the below_floor flag set.
/// Throws std::domain_error when p_floor <= p_elec (degenerate floors).
DeltaEstimate estimate_delta_m(const SpectrumTriplet& s, double phi, double rbw_hz,
                               double i0_amp);

/// Leading-order sideband-power variance for M spectral averages (W^2):
///   Var(p_omega) = (R^2/M) [2 q delta_m^2 i0^3 phi B
///                           + 4 delta_m^4 i0^4 var_h
///                           + 4 q^2 delta_m^2 i0^2 var_n].
/// Valid for a signal-dominated bin (delta_SNR >> 1).
double var_sideband_power(const ProbeParams& probe, const ModulationParams& mod,
                          const DetectionParams& det, double i0_amp);

/// F(delta_m) = M [2 q phi B / i0 + 4 delta_m^2 var_h]^-1, electronic noise
/// neglected. q_advantage re-evaluates the bracket at phi = 1.
FisherReport fisher_info(const ProbeParams& probe, const ModulationParams& mod,
                         const DetectionParams& det, double i0_amp);

/// Debug variant retaining the electronic term 4 q^2 var_n / i0^2 in the
/// bracket, to quantify how much the neglect matters.
FisherReport fisher_info_with_electronic(const ProbeParams& probe, const ModulationParams& mod,
                                         const DetectionParams& det, double i0_amp);

/// Q_opt = 1/phi.
double quantum_advantage_opt(double phi);

/// RBW at which the quantum and classical brackets of F are equal:
/// B* = 2 delta_m^2 var_h i0 / (q phi). Returns 0 when var_h = 0.
double crossover_rbw(double delta_m, double var_h, double i0_amp, double phi);

} // namespace sqmod

#endif
