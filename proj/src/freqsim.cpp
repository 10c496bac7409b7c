#include "sqmod/freqsim.hpp"
#include "sqmod/constants.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace sqmod {

namespace {
constexpr double kQ = PhysConstants::q;

double power_of(const GenerativeModel& model, std::complex<double> i) {
    return 2.0 * model.load_r_ohm * std::norm(i);
}
} // namespace

GenerativeModel build_model(const ProbeParams& probe, const ModulationParams& mod,
                            const DetectionParams& det) {
    probe.validate();
    mod.validate();
    det.validate();
    check_band_covers_sideband(probe, mod);

    GenerativeModel m;
    m.i0_amp = mean_photocurrent(probe, det);
    m.phi = probe.squeezing_phi;
    m.rbw_hz = det.rbw_hz;
    m.load_r_ohm = det.load_r_ohm;
    m.h_sigma = std::sqrt(det.var_h);
    m.n_sigma = std::sqrt(det.var_n);
    const double shot_var = kQ * m.i0_amp * m.phi * det.rbw_hz / 2.0;
    m.shot_sigma_re = std::sqrt(shot_var);
    m.shot_sigma_im = m.shot_sigma_re;
    // <(1 + 2H)^2> = 1 + 4 var_h; normalize so the mean sideband power is
    // exactly R i0^2 delta_m^2 / 2 on top of the floor.
    m.signal_amp = m.i0_amp * mod.delta_m / 2.0 / std::sqrt(1.0 + 4.0 * det.var_h);
    return m;
}

BinDraw draw_sideband(const GenerativeModel& model, Rng& rng) {
    const double h = model.h_sigma * rng.next_gaussian();
    const double x_re = model.shot_sigma_re * rng.next_gaussian();
    const double x_im = model.shot_sigma_im * rng.next_gaussian();
    const double n_re = model.n_sigma * rng.next_gaussian();
    const double n_im = model.n_sigma * rng.next_gaussian();
    BinDraw d;
    d.i_complex = {model.signal_amp * (1.0 + 2.0 * h) + x_re + kQ * n_re, x_im + kQ * n_im};
    d.p_value = power_of(model, d.i_complex);
    return d;
}

BinDraw draw_floor(const GenerativeModel& model, Rng& rng) {
    const double x_re = model.shot_sigma_re * rng.next_gaussian();
    const double x_im = model.shot_sigma_im * rng.next_gaussian();
    const double n_re = model.n_sigma * rng.next_gaussian();
    const double n_im = model.n_sigma * rng.next_gaussian();
    BinDraw d;
    d.i_complex = {x_re + kQ * n_re, x_im + kQ * n_im};
    d.p_value = power_of(model, d.i_complex);
    return d;
}

BinDraw draw_elec(const GenerativeModel& model, Rng& rng) {
    const double n_re = model.n_sigma * rng.next_gaussian();
    const double n_im = model.n_sigma * rng.next_gaussian();
    BinDraw d;
    d.i_complex = {kQ * n_re, kQ * n_im};
    d.p_value = power_of(model, d.i_complex);
    return d;
}

std::vector<double> averaging_weights(double m_avg) {
    if (!(m_avg >= 1.0)) throw std::invalid_argument("averaging_weights: m_avg must be >= 1");
    const double m_floor = std::floor(m_avg);
    const auto m = static_cast<std::size_t>(m_floor);
    const double frac = m_avg - m_floor;
    if (frac < 1.0e-12) {
        return std::vector<double>(m, 1.0 / m_floor);
    }
    // m equal weights w plus one final weight 1 - m w, with
    // m w^2 + (1 - m w)^2 = 1/(m + frac).
    const double mm = m_floor;
    const double disc = mm * (1.0 - frac) / (mm + frac);
    const double w = (mm + std::sqrt(disc)) / (mm * mm + mm);
    std::vector<double> weights(m + 1, w);
    weights.back() = 1.0 - mm * w;
    return weights;
}

SpectrumTriplet measure_triplet(const GenerativeModel& model, const DetectionParams& det,
                                Rng& rng) {
    const std::vector<double> w = averaging_weights(det.m_avg);
    SpectrumTriplet t;
    for (double wi : w) t.p_omega += wi * draw_sideband(model, rng).p_value;
    for (double wi : w) t.p_floor += wi * draw_floor(model, rng).p_value;
    for (double wi : w) t.p_elec += wi * draw_elec(model, rng).p_value;
    return t;
}

std::vector<VarianceReport> run_experiment(const ProbeParams& probe, const ModulationParams& mod,
                                           const DetectionParams& det, int k_samples, int reps,
                                           std::uint64_t seed, const RunOptions& opts) {
    if (k_samples < 2) throw std::invalid_argument("run_experiment: k_samples must be >= 2");
    if (reps < 1) throw std::invalid_argument("run_experiment: reps must be >= 1");

    const GenerativeModel base_model = build_model(probe, mod, det);
    const NoisePowerModel cal = mean_powers_at(base_model.i0_amp, mod.delta_m, probe.squeezing_phi, det);

    std::vector<VarianceReport> reports(static_cast<std::size_t>(reps));

    auto run_rep = [&](int rep) {
        Rng rng = Rng::stream(seed, {0x7265700ULL, static_cast<std::uint64_t>(rep)});
        std::vector<double> estimates;
        estimates.reserve(static_cast<std::size_t>(k_samples));
        int below = 0;
        for (int i = 0; i < k_samples; ++i) {
            GenerativeModel model = base_model;
            if (opts.delta_m_jitter > 0.0) {
                const double u = rng.next_double();
                const double dm = mod.delta_m * (1.0 - opts.delta_m_jitter * u);
                model.signal_amp =
                    model.i0_amp * dm / 2.0 / std::sqrt(1.0 + 4.0 * det.var_h);
            }
            const SpectrumTriplet t = measure_triplet(model, det, rng);
            SpectrumTriplet used = t;
            if (!opts.measured_floors) {
                used.p_floor = cal.p_floor_mean;
                used.p_elec = cal.p_elec_mean;
            }
            const DeltaEstimate est =
                estimate_delta_m(used, probe.squeezing_phi, det.rbw_hz, base_model.i0_amp);
            if (est.below_floor) ++below;
            estimates.push_back(est.value);
        }
        VarianceReport rep_out = variance_of(estimates);
        rep_out.phi = probe.squeezing_phi;
        rep_out.rbw_hz = det.rbw_hz;
        rep_out.m_avg = det.m_avg;
        rep_out.n_below_floor = below;
        reports[static_cast<std::size_t>(rep)] = std::move(rep_out);
    };

    const int nthreads = std::max(1, opts.threads);
    if (nthreads == 1 || reps == 1) {
        for (int r = 0; r < reps; ++r) run_rep(r);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int t = 0; t < nthreads; ++t) {
            pool.emplace_back([&, t] {
                for (int r = t; r < reps; r += nthreads) run_rep(r);
            });
        }
        for (auto& th : pool) th.join();
    }
    return reports;
}

} // namespace sqmod
