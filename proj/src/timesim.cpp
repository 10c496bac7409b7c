#include "sqmod/timesim.hpp"
#include "sqmod/constants.hpp"
#include "sqmod/freqsim.hpp" // averaging_weights

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <thread>

static_assert(std::endian::native == std::endian::little,
              "trace binary format is little-endian; byte swapping not implemented");

namespace sqmod {

namespace {

constexpr double kQ = PhysConstants::q;
constexpr int kClassicalPoles = 8;

// Incremental synthesis of the photocurrent. State carries over between
// fill() calls so a whole trace sees one continuous classical-noise process.
class TraceSynth {
public:
    TraceSynth(const ProbeParams& probe, const ModulationParams& mod,
               const DetectionParams& det, double sample_rate_hz, double cutoff_hz, Rng& rng)
        : rng_(rng) {
        i0_ = mean_photocurrent(probe, det);
        const double fs = sample_rate_hz;
        psi0_ = mod.psi0;
        psim_ = mod.psi_m;
        carrier_norm_ = psi0_ * psi0_ + psim_ * psim_ / 2.0;
        dphase_ = 2.0 * M_PI * mod.omega_mod_hz / fs;
        sigma_shot_ = std::sqrt(kQ * i0_ * probe.squeezing_phi * fs);
        with_elec_ = det.var_n > 0.0;
        sigma_elec_ = with_elec_ ? kQ * std::sqrt(2.0 * det.var_n * fs / det.rbw_hz) : 0.0;
        with_classical_ = det.var_h > 0.0;
        if (with_classical_) {
            sigma_zw_ = std::sqrt(det.var_h * fs / det.rbw_hz);
            pole_a_ = std::exp(-2.0 * M_PI * cutoff_hz / fs);
            pole_b_ = 1.0 - pole_a_;
            const double settle = fs / (2.0 * M_PI * cutoff_hz) * kClassicalPoles;
            warmup_left_ = std::max(256LL, static_cast<long long>(16.0 * settle));
        }
    }

    void fill(std::span<double> out) {
        while (warmup_left_ > 0) {
            (void)next_zeta();
            --warmup_left_;
        }
        for (double& x : out) {
            const double zeta = with_classical_ ? next_zeta() : 0.0;
            const double c = psi0_ + psim_ * std::cos(phase_);
            phase_ += dphase_;
            if (phase_ > M_PI) phase_ -= 2.0 * M_PI;
            const double carrier = i0_ * (c * c / carrier_norm_);
            // Classical noise rides on the modulation sidebands: the AC part
            // of the carrier picks up (1 + 2 zeta), while the baseband hump
            // i0 * 2 zeta stays out. It lies entirely outside the analysis
            // span, and the instrument front-end it would have to pass is
            // not part of the emulation; with bare rectangular windows its
            // sidelobe leakage would contaminate every bin near Omega.
            double sample = carrier + (carrier - i0_) * 2.0 * zeta;
            sample += sigma_shot_ * rng_.next_gaussian();
            if (with_elec_) sample += sigma_elec_ * rng_.next_gaussian();
            x = sample;
        }
    }

private:
    double next_zeta() {
        double v = sigma_zw_ * rng_.next_gaussian();
        for (double& s : zstate_) {
            s = pole_a_ * s + pole_b_ * v;
            v = s;
        }
        return v;
    }

    Rng& rng_;
    double i0_ = 0.0;
    double psi0_ = 1.0, psim_ = 0.0, carrier_norm_ = 1.0;
    double phase_ = 0.0, dphase_ = 0.0;
    double sigma_shot_ = 0.0, sigma_elec_ = 0.0, sigma_zw_ = 0.0;
    double pole_a_ = 0.0, pole_b_ = 1.0;
    double zstate_[kClassicalPoles] = {};
    long long warmup_left_ = 0;
    bool with_elec_ = false;
    bool with_classical_ = false;
};

long long integral_ratio(double num, double den, const char* what) {
    const double ratio = num / den;
    const double rounded = std::round(ratio);
    if (!(std::abs(ratio - rounded) < 1.0e-6) || rounded < 0)
        throw std::invalid_argument(std::string(what) + " must be an integer multiple of the RBW");
    return static_cast<long long>(rounded);
}

} // namespace

TimeTrace synthesize(const ProbeParams& probe, const ModulationParams& mod,
                     const DetectionParams& det, double duration_s, double sample_rate_hz,
                     Rng& rng, const SynthOptions& opts) {
    probe.validate();
    mod.validate();
    det.validate();
    if (!(sample_rate_hz > 2.0 * (mod.omega_mod_hz + det.rbw_hz)))
        throw std::invalid_argument("synthesize: sample_rate must exceed 2 (Omega + B)");
    const auto n = static_cast<long long>(std::floor(duration_s * sample_rate_hz + 0.5));
    if (n <= 0) throw std::invalid_argument("synthesize: requested trace is empty");

    TimeTrace trace;
    trace.sample_rate_hz = sample_rate_hz;
    trace.samples.resize(static_cast<std::size_t>(n));
    TraceSynth synth(probe, mod, det, sample_rate_hz, opts.classical_cutoff_hz, rng);
    synth.fill(trace.samples);
    return trace;
}

std::complex<double> dft_bin(std::span<const double> x, long long k) {
    const auto n = static_cast<long long>(x.size());
    if (n == 0) throw std::invalid_argument("dft_bin: empty input");
    if (k < 0 || k >= n) throw std::invalid_argument("dft_bin: bin index out of range");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    if (k == 0) return {mean, 0.0};
    // A constant contributes exactly zero to every nonzero integer bin, so
    // the mean can be removed first; the Goertzel recurrence then no longer
    // amplifies roundoff from a bright DC carrier into the small bins.
    const double w = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
    const double coeff = 2.0 * std::cos(w);
    double s1 = 0.0, s2 = 0.0;
    for (double v : x) {
        const double s0 = (v - mean) + coeff * s1 - s2;
        s2 = s1;
        s1 = s0;
    }
    // X_k = e^{iw} s_{N-1} - s_{N-2} for integer k over a full window.
    const std::complex<double> xk(s1 * std::cos(w) - s2, s1 * std::sin(w));
    return xk / static_cast<double>(n);
}

NoiseSpectrum analyze(const TimeTrace& trace, double load_r_ohm, double center_hz,
                      double rbw_hz, double m_avg, int half_span_bins) {
    if (!(rbw_hz > 0.0)) throw std::invalid_argument("analyze: rbw must be > 0");
    if (!(m_avg >= 1.0)) throw std::invalid_argument("analyze: m_avg must be >= 1");
    const long long seg_len = integral_ratio(trace.sample_rate_hz, rbw_hz, "analyze: sample_rate");
    const long long k_center = integral_ratio(center_hz, rbw_hz, "analyze: center frequency");
    const std::vector<double> w = averaging_weights(m_avg);
    const auto n_seg = static_cast<long long>(w.size());
    if (static_cast<long long>(trace.samples.size()) < n_seg * seg_len)
        throw std::invalid_argument("analyze: trace too short for the requested averages");

    const long long k_nyquist = seg_len / 2;
    long long k_lo = std::max(1LL, k_center - half_span_bins);
    long long k_hi = std::min(k_nyquist - 1, k_center + half_span_bins);
    if (k_lo > k_hi) throw std::invalid_argument("analyze: no bins in range");

    NoiseSpectrum spec;
    spec.rbw_hz = rbw_hz;
    spec.m_avg = m_avg;
    spec.freqs_hz.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
    spec.powers_w.assign(static_cast<std::size_t>(k_hi - k_lo + 1), 0.0);
    for (long long k = k_lo; k <= k_hi; ++k)
        spec.freqs_hz.push_back(static_cast<double>(k) * rbw_hz);

    for (long long s = 0; s < n_seg; ++s) {
        const std::span<const double> seg(trace.samples.data() + s * seg_len,
                                          static_cast<std::size_t>(seg_len));
        for (long long k = k_lo; k <= k_hi; ++k) {
            const double p = 2.0 * load_r_ohm * std::norm(dft_bin(seg, k));
            spec.powers_w[static_cast<std::size_t>(k - k_lo)] += w[static_cast<std::size_t>(s)] * p;
        }
    }
    return spec;
}

namespace {

double power_at(const NoiseSpectrum& spec, double freq_hz, const char* what) {
    for (std::size_t i = 0; i < spec.freqs_hz.size(); ++i) {
        if (std::abs(spec.freqs_hz[i] - freq_hz) < 1.0e-6 * spec.rbw_hz) return spec.powers_w[i];
    }
    throw std::invalid_argument(std::string(what) + ": frequency not on the spectrum grid");
}

} // namespace

SpectrumTriplet triplet_from_trace(const NoiseSpectrum& spectrum, double omega_hz,
                                   double offset_hz) {
    if (!(offset_hz > spectrum.rbw_hz))
        throw std::invalid_argument("triplet_from_trace: offset must exceed the RBW");
    SpectrumTriplet t;
    t.p_omega = power_at(spectrum, omega_hz, "triplet_from_trace");
    t.p_floor = power_at(spectrum, omega_hz + offset_hz, "triplet_from_trace");
    t.p_elec = 0.0;
    return t;
}

SpectrumTriplet triplet_from_trace(const NoiseSpectrum& spectrum, const NoiseSpectrum& dark,
                                   double omega_hz, double offset_hz) {
    SpectrumTriplet t = triplet_from_trace(spectrum, omega_hz, offset_hz);
    t.p_elec = power_at(dark, omega_hz, "triplet_from_trace(dark)");
    return t;
}

NoiseSpectrum subtract_electronic(const NoiseSpectrum& spectrum, const NoiseSpectrum& dark) {
    if (spectrum.freqs_hz.size() != dark.freqs_hz.size())
        throw std::invalid_argument("subtract_electronic: spectrum grids differ");
    NoiseSpectrum out = spectrum;
    for (std::size_t i = 0; i < out.powers_w.size(); ++i) out.powers_w[i] -= dark.powers_w[i];
    return out;
}

NoiseSpectrum subtract_shot_level_difference(const NoiseSpectrum& spectrum, double own_shot_w,
                                             double reference_shot_w) {
    NoiseSpectrum out = spectrum;
    const double diff = own_shot_w - reference_shot_w;
    for (double& p : out.powers_w) p -= diff;
    return out;
}

TripletMoments accumulate_triplet_moments(const ProbeParams& probe, const ModulationParams& mod,
                                          const DetectionParams& det, const TraceRunConfig& cfg) {
    probe.validate();
    mod.validate();
    det.validate();
    check_band_covers_sideband(probe, mod);
    if (cfg.n_segments < 2)
        throw std::invalid_argument("accumulate_triplet_moments: need >= 2 segments");
    const double fs = cfg.sample_rate_hz;
    if (!(fs > 2.0 * (mod.omega_mod_hz + det.rbw_hz)))
        throw std::invalid_argument("accumulate_triplet_moments: sample_rate must exceed 2 (Omega + B)");
    const double offset = cfg.offset_hz > 0.0 ? cfg.offset_hz : 5.0 * det.rbw_hz;
    if (!(offset > det.rbw_hz))
        throw std::invalid_argument("accumulate_triplet_moments: offset must exceed the RBW");
    const long long seg_len = integral_ratio(fs, det.rbw_hz, "accumulate: sample_rate");
    const long long k_omega = integral_ratio(mod.omega_mod_hz, det.rbw_hz, "accumulate: omega");
    const long long k_floor = integral_ratio(mod.omega_mod_hz + offset, det.rbw_hz, "accumulate: offset");
    if (k_floor >= seg_len / 2)
        throw std::invalid_argument("accumulate: floor bin beyond Nyquist");

    const auto n = cfg.n_segments;
    std::vector<double> p_omega(static_cast<std::size_t>(n));
    std::vector<double> p_floor(static_cast<std::size_t>(n));
    std::vector<double> p_elec(static_cast<std::size_t>(n));
    const bool with_elec = det.var_n > 0.0;

    auto run_segment = [&](long long s, std::vector<double>& buf) {
        Rng rng = Rng::stream(cfg.seed, {0x5345474dULL, static_cast<std::uint64_t>(s)});
        TraceSynth synth(probe, mod, det, fs, cfg.classical_cutoff_hz, rng);
        synth.fill(buf);
        const double r = det.load_r_ohm;
        p_omega[static_cast<std::size_t>(s)] = 2.0 * r * std::norm(dft_bin(buf, k_omega));
        p_floor[static_cast<std::size_t>(s)] = 2.0 * r * std::norm(dft_bin(buf, k_floor));
        if (with_elec) {
            // dark segment: detector output with the light blocked
            Rng dark_rng = Rng::stream(cfg.seed, {0x4441524bULL, static_cast<std::uint64_t>(s)});
            ProbeParams dark_probe = probe;
            dark_probe.power_avg_w = 0.0;
            DetectionParams dark_det = det;
            dark_det.var_h = 0.0;
            TraceSynth dark(dark_probe, mod, dark_det, fs, cfg.classical_cutoff_hz, dark_rng);
            dark.fill(buf);
            p_elec[static_cast<std::size_t>(s)] = 2.0 * r * std::norm(dft_bin(buf, k_omega));
        }
    };

    const int nthreads = std::max(1, cfg.threads);
    if (nthreads == 1) {
        std::vector<double> buf(static_cast<std::size_t>(seg_len));
        for (long long s = 0; s < n; ++s) run_segment(s, buf);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) {
            pool.emplace_back([&, t] {
                std::vector<double> buf(static_cast<std::size_t>(seg_len));
                for (long long s = t; s < n; s += nthreads) run_segment(s, buf);
            });
        }
        for (auto& th : pool) th.join();
    }

    // Sequential reduction in segment order keeps results independent of the
    // thread count.
    auto reduce = [n](const std::vector<double>& v) {
        BinMoments m;
        m.n = n;
        double mean = 0.0, m2 = 0.0;
        long long count = 0;
        for (double x : v) {
            ++count;
            const double d = x - mean;
            mean += d / static_cast<double>(count);
            m2 += d * (x - mean);
        }
        m.mean = mean;
        m.var = m2 / static_cast<double>(n - 1);
        m.se_mean = std::sqrt(m.var / static_cast<double>(n));
        return m;
    };

    TripletMoments out;
    out.p_omega = reduce(p_omega);
    out.p_floor = reduce(p_floor);
    out.p_elec = reduce(p_elec);
    return out;
}

void save_trace_binary(const TimeTrace& trace, const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw std::runtime_error("save_trace_binary: cannot open " + path.string());
    const double fs = trace.sample_rate_hz;
    const std::uint64_t count = trace.samples.size();
    bool ok = std::fwrite(&fs, sizeof fs, 1, f) == 1;
    ok = ok && std::fwrite(&count, sizeof count, 1, f) == 1;
    ok = ok && std::fwrite(trace.samples.data(), sizeof(double), count, f) == count;
    std::fclose(f);
    if (!ok) throw std::runtime_error("save_trace_binary: short write to " + path.string());
}

TimeTrace load_trace_binary(const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "rb");
    if (!f) throw std::runtime_error("load_trace_binary: cannot open " + path.string());
    TimeTrace trace;
    std::uint64_t count = 0;
    bool ok = std::fread(&trace.sample_rate_hz, sizeof(double), 1, f) == 1;
    ok = ok && std::fread(&count, sizeof count, 1, f) == 1;
    if (ok) {
        trace.samples.resize(count);
        ok = std::fread(trace.samples.data(), sizeof(double), count, f) == count;
    }
    std::fclose(f);
    if (!ok) throw std::runtime_error("load_trace_binary: truncated file " + path.string());
    return trace;
}

void save_trace_csv(const TimeTrace& trace, const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw std::runtime_error("save_trace_csv: cannot open " + path.string());
    std::fprintf(f, "# sqmod-csv v1 trace\n");
    std::fprintf(f, "time_s,current_a\n");
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        std::fprintf(f, "%.17g,%.17g\n", static_cast<double>(i) / trace.sample_rate_hz,
                     trace.samples[i]);
    }
    std::fclose(f);
}

void save_spectrum_csv(const NoiseSpectrum& spectrum, const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw std::runtime_error("save_spectrum_csv: cannot open " + path.string());
    std::fprintf(f, "# sqmod-csv v1 spectrum\n");
    std::fprintf(f, "freq_hz,power_w\n");
    for (std::size_t i = 0; i < spectrum.freqs_hz.size(); ++i)
        std::fprintf(f, "%.17g,%.17g\n", spectrum.freqs_hz[i], spectrum.powers_w[i]);
    std::fclose(f);
}

} // namespace sqmod
