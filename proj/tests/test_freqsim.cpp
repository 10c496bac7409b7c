#include "doctest.h"

#include "sqmod/analytic.hpp"
#include "sqmod/constants.hpp"
#include "sqmod/freqsim.hpp"
#include "sqmod/inference.hpp"
#include "sqmod/mcstats.hpp"

#include <cmath>
#include <vector>

using namespace sqmod;

namespace {

ProbeParams fig_probe(double phi = 1.0) {
    ProbeParams p;
    p.power_avg_w = 0.2e-3;
    p.wavelength_m = 740.0e-9;
    p.squeezing_phi = phi;
    return p;
}

DetectionParams fig_det(double rbw = 1.0e4, double m_avg = 1.0, double var_h = 0.0,
                        double var_n = 0.0) {
    DetectionParams d;
    d.eta = 1.0;
    d.load_r_ohm = 50.0;
    d.rbw_hz = rbw;
    d.m_avg = m_avg;
    d.var_h = var_h;
    d.var_n = var_n;
    return d;
}

} // namespace

TEST_CASE("generative model construction") {
    const auto mod = ModulationParams::make(1.0e-4, 1.0e7);

    const GenerativeModel coherent = build_model(fig_probe(1.0), mod, fig_det());
    CHECK(coherent.shot_sigma_re == coherent.shot_sigma_im);
    CHECK(coherent.shot_sigma_re
          == doctest::Approx(std::sqrt(PhysConstants::q * coherent.i0_amp * 1.0e4 / 2.0))
                 .epsilon(1e-14));
    CHECK(coherent.signal_amp == doctest::Approx(5.9685e-9).epsilon(1e-4));
    CHECK(coherent.signal_amp == coherent.i0_amp * 1.0e-4 / 2.0);

    const GenerativeModel quiet = build_model(fig_probe(1.0), ModulationParams::make(0.0, 1.0e7),
                                              fig_det());
    CHECK(quiet.signal_amp == 0.0);

    // mean normalization against the classical-noise broadening
    const GenerativeModel noisy = build_model(fig_probe(1.0), mod, fig_det(1.0e4, 1.0, 1.0e-5));
    CHECK(noisy.signal_amp
          == doctest::Approx(noisy.i0_amp * 1.0e-4 / 2.0 / std::sqrt(1.0 + 4.0e-5))
                 .epsilon(1e-15));
}

TEST_CASE("draws satisfy p = 2 R |i|^2 and degenerate cases") {
    GenerativeModel m;
    m.signal_amp = 3.0e-9;
    m.load_r_ohm = 50.0;
    Rng rng(1);
    const BinDraw d = draw_sideband(m, rng);
    CHECK(d.p_value == 2.0 * m.load_r_ohm * std::norm(d.i_complex));
    // all sigmas zero: deterministic signal power
    CHECK(d.p_value == doctest::Approx(2.0 * 50.0 * 9.0e-18).epsilon(1e-15));

    const auto mod = ModulationParams::make(1.0e-4, 1.0e7);
    const GenerativeModel no_elec = build_model(fig_probe(), mod, fig_det());
    Rng rng2(2);
    for (int i = 0; i < 100; ++i) CHECK(draw_elec(no_elec, rng2).p_value == 0.0);
}

TEST_CASE("floor mean matches the closed form within 3 SE") {
    const auto mod = ModulationParams::make(0.0, 1.0e7);
    const ProbeParams p = fig_probe(1.0);
    const DetectionParams d = fig_det();
    const GenerativeModel model = build_model(p, mod, d);
    Rng rng(0x11110000AULL);
    const long long n = 200000;
    std::vector<double> ps(n);
    for (auto& x : ps) x = draw_floor(model, rng).p_value;
    const MomentSummary s = summarize(ps);
    const double expect = 2.0 * PhysConstants::q * d.load_r_ohm * model.i0_amp * d.rbw_hz;
    CHECK(std::abs(s.mean - expect) < 3.0 * s.se_mean);
}

TEST_CASE("floor mean scales linearly in phi") {
    const auto mod = ModulationParams::make(0.0, 1.0e7);
    const DetectionParams d = fig_det();
    const GenerativeModel half = build_model(fig_probe(0.5), mod, d);
    const GenerativeModel full = build_model(fig_probe(1.0), mod, d);
    // matched streams: the same Gaussians scaled by sqrt(phi)
    Rng ra(42), rb(42);
    double sum_half = 0.0, sum_full = 0.0;
    for (int i = 0; i < 20000; ++i) {
        sum_half += draw_floor(half, ra).p_value;
        sum_full += draw_floor(full, rb).p_value;
    }
    CHECK(sum_half / sum_full == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("sideband variance matches the leading-order formula within 3 SE") {
    // strong-signal regime where the quoted variance is exact to O(1/SNR)
    const auto mod = ModulationParams::make(5.0e-3, 1.0e7);
    const ProbeParams p = fig_probe(0.6918309709189364);
    const DetectionParams d = fig_det(1.0e4, 1.0, 1.0e-5, 3.7e16);
    const GenerativeModel model = build_model(p, mod, d);
    Rng rng(0xBEEF1234ULL);
    const long long n = 200000;
    std::vector<double> ps(n);
    for (auto& x : ps) x = draw_sideband(model, rng).p_value;
    const MomentSummary s = summarize(ps);
    const double expect = var_sideband_power(p, mod, d, model.i0_amp);
    CHECK(std::abs(s.var - expect) < 3.0 * s.se_var);
}

TEST_CASE("averaging weights implement real-valued M") {
    for (double m : {1.0, 2.0, 5.5, 33.7, 34.0}) {
        const auto w = averaging_weights(m);
        double sum = 0.0, sumsq = 0.0;
        for (double wi : w) {
            CHECK(wi >= 0.0);
            sum += wi;
            sumsq += wi * wi;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(sumsq == doctest::Approx(1.0 / m).epsilon(1e-12));
    }
    CHECK(averaging_weights(1.0).size() == 1);
    CHECK(averaging_weights(34.0).size() == 34);
    CHECK(averaging_weights(33.7).size() == 34);
    CHECK_THROWS_AS(averaging_weights(0.7), std::invalid_argument);
}

TEST_CASE("measure_triplet with M = 1 equals single draws") {
    const auto mod = ModulationParams::make(1.0e-4, 1.0e7);
    const ProbeParams p = fig_probe(0.9);
    const DetectionParams d = fig_det(1.0e4, 1.0, 1.0e-5, 3.7e16);
    const GenerativeModel model = build_model(p, mod, d);
    Rng ra(7), rb(7);
    const SpectrumTriplet t = measure_triplet(model, d, ra);
    CHECK(t.p_omega == draw_sideband(model, rb).p_value);
    CHECK(t.p_floor == draw_floor(model, rb).p_value);
    CHECK(t.p_elec == draw_elec(model, rb).p_value);
}

TEST_CASE("triplet variance scales as 1/M") {
    const auto mod = ModulationParams::make(1.0e-4, 1.0e7);
    const ProbeParams p = fig_probe(0.6918309709189364);
    const DetectionParams base = fig_det(1.0e4, 1.0, 1.0e-5, 0.0);
    const GenerativeModel model = build_model(p, mod, base);
    const long long n = 30000;
    double var1 = 0.0;
    for (double m : {1.0, 34.0}) {
        DetectionParams d = base;
        d.m_avg = m;
        Rng rng = Rng::stream(99, {static_cast<std::uint64_t>(m)});
        std::vector<double> ps(n);
        for (auto& x : ps) x = measure_triplet(model, d, rng).p_omega;
        const MomentSummary s = summarize(ps);
        if (m == 1.0)
            var1 = s.var;
        else
            CHECK(std::abs(s.var * m / var1 - 1.0) < 0.05);
    }
}

TEST_CASE("run_experiment is deterministic and counts below-floor estimates") {
    const auto mod = ModulationParams::make(1.0e-4, 1.0e7);
    const ProbeParams p = fig_probe(0.6918309709189364);
    const DetectionParams d = fig_det(1.0e5, 34.0, 7.0e-6, 0.0);

    RunOptions serial;
    serial.threads = 1;
    RunOptions parallel;
    parallel.threads = 2;
    const auto a = run_experiment(p, mod, d, 50, 5, 2026, serial);
    const auto b = run_experiment(p, mod, d, 50, 5, 2026, parallel);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].var == b[i].var);
        CHECK(a[i].var_se == b[i].var_se);
        CHECK(a[i].estimates == b[i].estimates);
        CHECK(a[i].phi == p.squeezing_phi);
        CHECK(a[i].rbw_hz == d.rbw_hz);
    }

    // essentially zero modulation: the sideband bin dips below the
    // calibrated floor about half the time, and those estimates are
    // reported as zeros rather than dropped
    const auto mod0 = ModulationParams::make(1.0e-7, 1.0e7);
    const auto reports = run_experiment(fig_probe(1.0), mod0, fig_det(1.0e6), 200, 1, 7, serial);
    CHECK(reports[0].n_below_floor > 30);
    CHECK(reports[0].n_below_floor < 170);
    int zeros = 0;
    for (double e : reports[0].estimates) zeros += e == 0.0 ? 1 : 0;
    CHECK(zeros == reports[0].n_below_floor);
}

TEST_CASE("estimator from simulated triplets is unbiased") {
    const auto mod = ModulationParams::make(1.0e-4, 1.0e7);
    const ProbeParams p = fig_probe(1.0);
    const DetectionParams d = fig_det(1.0e3, 34.0, 0.0, 0.0);
    RunOptions opts;
    opts.threads = 2;
    const auto reports = run_experiment(p, mod, d, 20000, 1, 0x5EED, opts);
    const MomentSummary s = summarize(reports[0].estimates);
    CHECK(std::abs(s.mean - mod.delta_m) < 3.0 * s.se_mean);
    // and efficient: the ensemble variance sits at the Cramer-Rao bound
    const double i0 = mean_photocurrent(p, d);
    const double crb = fisher_info(p, mod, d, i0).var_delta_m;
    CHECK(std::abs(s.var / crb - 1.0) < 0.05);
}

TEST_CASE("line fit over a simulated phi sweep reads off the quantum advantage") {
    // Var(delta_hat) is linear in phi at fixed RBW; fitting the sweep and
    // evaluating line(1)/line(phi) recovers 1/phi = 1.445 at -1.6 dB
    const auto mod = ModulationParams::make(1.0e-4, 1.0e7);
    const DetectionParams d = fig_det(1.0e5, 34.0, 0.0, 0.0);
    RunOptions opts;
    opts.threads = 2;
    std::vector<VarVsPhiPoint> pts;
    for (double phi : {0.6918309709189364, 0.9, 1.1, 1.4, 1.8620871366628675}) {
        const auto reports = run_experiment(fig_probe(phi), mod, d, 50, 40, 0xF17, opts);
        double mean = 0.0;
        for (const auto& r : reports) mean += r.var;
        mean /= static_cast<double>(reports.size());
        double ss = 0.0;
        for (const auto& r : reports) ss += (r.var - mean) * (r.var - mean);
        const double se = std::sqrt(ss / (reports.size() - 1.0) / reports.size());
        pts.push_back({phi, mean, se});
    }
    const LineFit fit = fit_var_vs_phi(pts);
    CHECK(std::abs(fit.q_at(0.6918309709189364) / 1.4454397707459274 - 1.0) < 0.05);
    // quantum-limited sweep: no classical-noise offset
    CHECK(std::abs(fit.intercept) < 3.0 * fit.intercept_se);
}

TEST_CASE("delta_m jitter knob shifts the estimates down") {
    const auto mod = ModulationParams::make(1.0e-4, 1.0e7);
    const ProbeParams p = fig_probe(1.0);
    const DetectionParams d = fig_det(1.0e3, 34.0, 0.0, 0.0);
    RunOptions jitter;
    jitter.threads = 1;
    jitter.delta_m_jitter = 0.2; // per-trial delta_m uniform in [0.8, 1.0] x nominal
    const auto reports = run_experiment(p, mod, d, 5000, 1, 0x5EED, jitter);
    const MomentSummary s = summarize(reports[0].estimates);
    CHECK(s.mean < mod.delta_m * 0.95);
    CHECK(s.mean > mod.delta_m * 0.85);
}
