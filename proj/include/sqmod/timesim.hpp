#ifndef SQMOD_TIMESIM_HPP
#define SQMOD_TIMESIM_HPP

#include "sqmod/analytic.hpp"
#include "sqmod/params.hpp"
#include "sqmod/rng.hpp"

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace sqmod {

struct TimeTrace {
    std::vector<double> samples; // photocurrent, A
    double sample_rate_hz = 0.0;

    double duration_s() const {
        return sample_rate_hz > 0.0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
    }
};

/// Spectrum-analyser style power trace: one point per RBW bin.
struct NoiseSpectrum {
    std::vector<double> freqs_hz;
    std::vector<double> powers_w;
    double rbw_hz = 0.0;
    double m_avg = 1.0;
};

struct SynthOptions {
    double classical_cutoff_hz = 2.0e6; // low-pass cutoff of the laser classical noise
};

/// Photocurrent synthesis:
///   i(t) = i0 c(t) + (i0 c(t) - i0) 2 zeta(t) + shot + electronic,
///   c(t) = (psi0 + psi_m cos(2 pi Omega t))^2 / (psi0^2 + psi_m^2/2),
/// i.e. the first-order expansion of c(t)(1 + 2 zeta) with the additive
/// baseband term i0 2 zeta omitted: that hump sits below the classical
/// cutoff, far outside the analysed span around Omega, and only a
/// modelled analyser front-end could keep its rectangular-window sidelobe
/// leakage out of the measurement bins.
/// shot: white Gaussian, one-sided PSD 2 q i0 phi (A^2/Hz).
/// zeta: white noise through 8 cascaded one-pole low-passes at the cutoff;
///       DC-band one-sided PSD 2 var_h / rbw so the per-segment DC average
///       has variance var_h at B = det.rbw_hz.
/// electronic: white, one-sided PSD 4 q^2 var_n / rbw (A^2/Hz), i.e. the
///       +-B/2 bin at det.rbw_hz carries 2 var_n of squared noise amplitude.
/// Throws on sample_rate <= 2 (Omega + B) (aliasing guard) or zero length.
TimeTrace synthesize(const ProbeParams& probe, const ModulationParams& mod,
                     const DetectionParams& det, double duration_s, double sample_rate_hz,
                     Rng& rng, const SynthOptions& opts = {});

/// Single DFT bin, normalized so a tone A cos(2 pi f_k t) aligned with bin k
/// yields magnitude A/2: c_k = (1/N) sum_n x_n e^{-2 pi i k n / N}.
std::complex<double> dft_bin(std::span<const double> x, long long k);

/// Segments the trace into floor(m_avg)+1 (or m_avg) windows of length
/// 1/rbw, computes one power point per RBW bin around center and averages
/// segments with the fractional-M weights. Bin power p = 2 R |c|^2.
/// Requires sample_rate/rbw and center/rbw integral and enough samples.
NoiseSpectrum analyze(const TimeTrace& trace, double load_r_ohm, double center_hz,
                      double rbw_hz, double m_avg, int half_span_bins = 50);

/// Reads (p_omega, p_floor) off a spectrum at omega and omega + offset.
/// offset must exceed the RBW so the bins do not overlap. p_elec comes from
/// a dark-trace spectrum when provided, else 0.
SpectrumTriplet triplet_from_trace(const NoiseSpectrum& spectrum, double omega_hz,
                                   double offset_hz);
SpectrumTriplet triplet_from_trace(const NoiseSpectrum& spectrum, const NoiseSpectrum& dark,
                                   double omega_hz, double offset_hz);

/// Trace post-processing: electronic-noise subtraction and shot-level
/// re-referencing (used to compare antisqueezed traces against a squeezed
/// trace taken at a different shot level).
NoiseSpectrum subtract_electronic(const NoiseSpectrum& spectrum, const NoiseSpectrum& dark);
NoiseSpectrum subtract_shot_level_difference(const NoiseSpectrum& spectrum, double own_shot_w,
                                             double reference_shot_w);

struct BinMoments {
    double mean = 0.0;
    double var = 0.0;     // sample variance across segments
    double se_mean = 0.0; // standard error of the mean
    long long n = 0;
};

struct TripletMoments {
    BinMoments p_omega;
    BinMoments p_floor;
    BinMoments p_elec;
};

struct TraceRunConfig {
    double sample_rate_hz = 2.56e7;
    double offset_hz = 0.0; // floor bin offset; defaults to 5 RBW when 0
    long long n_segments = 0;
    int threads = 1;
    double classical_cutoff_hz = 2.0e6;
    std::uint64_t seed = 0;
};

/// Streaming per-segment synthesis + single-bin analysis over many
/// independent segments (each segment gets its own sub-stream, so results
/// do not depend on the thread count). Memory stays O(segment).
TripletMoments accumulate_triplet_moments(const ProbeParams& probe, const ModulationParams& mod,
                                          const DetectionParams& det, const TraceRunConfig& cfg);

/// Flat little-endian binary trace format:
/// header = [sample_rate: f64][count: u64], payload = count f64 amperes.
void save_trace_binary(const TimeTrace& trace, const std::filesystem::path& path);
TimeTrace load_trace_binary(const std::filesystem::path& path);
void save_trace_csv(const TimeTrace& trace, const std::filesystem::path& path);
void save_spectrum_csv(const NoiseSpectrum& spectrum, const std::filesystem::path& path);

} // namespace sqmod

#endif
