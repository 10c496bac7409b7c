#ifndef SQMOD_FREQSIM_HPP
#define SQMOD_FREQSIM_HPP

#include "sqmod/analytic.hpp"
#include "sqmod/inference.hpp"
#include "sqmod/params.hpp"
#include "sqmod/rng.hpp"

#include <complex>
#include <cstdint>
#include <vector>

namespace sqmod {

/// One realization of the complex bin photocurrent and its electronic power
/// p = 2 R |i|^2.
struct BinDraw {
    std::complex<double> i_complex; // A
    double p_value = 0.0;           // W
};

/// Moment-matched single-bin sampling model.
///
/// Sideband bin:  i = signal_amp (1 + 2 H) + (X_re + i X_im) + q (N_re + i N_im)
/// with H ~ N(0, h_sigma^2), X_re/X_im ~ N(0, shot_sigma^2) each and
/// N_re/N_im ~ N(0, n_sigma^2) each. The shot variance is split equally
/// between the two bin quadratures (the bin coefficient of filtered
/// stationary noise is circularly symmetric), which reproduces
/// <p_floor> = 2 q R i0 phi B exactly. signal_amp carries a 1/sqrt(1 + 4 h_sigma^2)
/// normalization so that <p_omega> matches the closed-form mean exactly
/// rather than to O(var_h).
struct GenerativeModel {
    double signal_amp = 0.0;    // A, ~ i0 delta_m / 2
    double shot_sigma_re = 0.0; // A, sqrt(q i0 phi B / 2)
    double shot_sigma_im = 0.0; // A, equal to shot_sigma_re
    double h_sigma = 0.0;       // dimensionless
    double n_sigma = 0.0;       // s^-1
    double load_r_ohm = 50.0;
    double i0_amp = 0.0;
    double phi = 1.0;
    double rbw_hz = 0.0;
};

GenerativeModel build_model(const ProbeParams& probe, const ModulationParams& mod,
                            const DetectionParams& det);

BinDraw draw_sideband(const GenerativeModel& model, Rng& rng);
BinDraw draw_floor(const GenerativeModel& model, Rng& rng);
BinDraw draw_elec(const GenerativeModel& model, Rng& rng);

/// Averaging weights implementing a real-valued M: floor(M) draws plus one
/// fractionally weighted draw, with sum(w) = 1 and sum(w^2) = 1/M so the
/// averaged power has mean <p> and variance Var(p)/M.
std::vector<double> averaging_weights(double m_avg);

/// One spectral measurement: each bin is the weighted average of
/// ceil(m_avg) independent draws (fresh classical-noise draw per BinDraw).
SpectrumTriplet measure_triplet(const GenerativeModel& model, const DetectionParams& det,
                                Rng& rng);

struct RunOptions {
    bool measured_floors = false;  // use per-trial drawn floors instead of calibrated means
    double delta_m_jitter = 0.0;   // per-trial delta_m uniform in [(1-j) dm, dm]; 0 = off
    int threads = 1;
};

/// Repetitions of the variance experiment: per rep, k_samples triplets ->
/// k_samples estimates -> one VarianceReport. Sub-streams derive from
/// (seed, rep), so results are independent of scheduling and thread count.
std::vector<VarianceReport> run_experiment(const ProbeParams& probe, const ModulationParams& mod,
                                           const DetectionParams& det, int k_samples, int reps,
                                           std::uint64_t seed, const RunOptions& opts = {});

} // namespace sqmod

#endif
