#include "sqmod/experiments.hpp"

#include "sqmod/analytic.hpp"
#include "sqmod/constants.hpp"
#include "sqmod/freqsim.hpp"
#include "sqmod/mcstats.hpp"
#include "sqmod/timesim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <thread>

namespace sqmod {

namespace {

constexpr std::uint64_t kValidateSeed = 0x5157ABCDEF01ULL;
constexpr double kNominalVarN = 3.7e16; // puts the electronic floor ~20 dB under shot at 10 kHz

ProbeParams fig_probe(double phi = 1.0) {
    ProbeParams p;
    p.power_avg_w = 0.2e-3;
    p.wavelength_m = 740.0e-9;
    p.squeezing_phi = phi;
    return p;
}

DetectionParams fig_det(double rbw, double m_avg = 1.0, double var_h = 0.0, double var_n = 0.0) {
    DetectionParams d;
    d.eta = 1.0;
    d.load_r_ohm = 50.0;
    d.rbw_hz = rbw;
    d.m_avg = m_avg;
    d.var_h = var_h;
    d.var_n = var_n;
    return d;
}

// margin convention: > 0 means pass with that fraction of the bound unused.
CheckResult bounded(const std::string& name, double value, double bound,
                    const std::string& detail = "") {
    CheckResult c;
    c.name = name;
    c.pass = value <= bound;
    c.margin = bound > 0.0 ? 1.0 - value / bound : (value <= bound ? 1.0 : -1.0);
    std::ostringstream os;
    os << "value=" << value << " bound=" << bound;
    if (!detail.empty()) os << " " << detail;
    c.detail = os.str();
    return c;
}

std::vector<double> collect_sideband(const GenerativeModel& model, long long n, Rng& rng) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& x : out) x = draw_sideband(model, rng).p_value;
    return out;
}

} // namespace

std::vector<CheckResult> validation_suite(const ExperimentConfig& cfg) {
    std::vector<CheckResult> checks;
    const int threads = cfg.effective_threads();

    // dB round trip
    {
        double worst = 0.0;
        for (double x = 0.01; x <= 100.0; x *= 1.37) {
            const double back = phi_from_db(db_from_phi(x));
            worst = std::max(worst, std::abs(back / x - 1.0));
        }
        checks.push_back(bounded("db_round_trip", worst, 1.0e-12));
    }

    // psi0 + psi_m exact unity
    {
        bool exact = true;
        for (double dm : {0.0, 1.0e-6, 1.0e-5, 1.0e-4, 1.0e-3, 9.9e-3}) {
            const auto m = ModulationParams::make(dm, 1.0e7);
            exact = exact && (m.psi0 + m.psi_m == 1.0);
        }
        checks.push_back(bounded("psi_identity_exact", exact ? 0.0 : 1.0, 0.5));
    }

    // photocurrent linear in P and eta
    {
        ProbeParams p = fig_probe();
        DetectionParams d = fig_det(1.0e4);
        d.eta = 0.42;
        const double base = mean_photocurrent(p, d);
        ProbeParams p2 = p;
        p2.power_avg_w *= 2.0;
        DetectionParams d2 = d;
        d2.eta = 0.84;
        const double errp = std::abs(mean_photocurrent(p2, d) - 2.0 * base);
        const double erre = std::abs(mean_photocurrent(p, d2) - 2.0 * base);
        checks.push_back(bounded("photocurrent_linearity", std::max(errp, erre), 1.0e-25));
    }

    // estimator round trip on closed-form powers
    {
        double worst = 0.0;
        for (double dm : {1.0e-5, 1.0e-4, 1.0e-3}) {
            ProbeParams p = fig_probe(0.6918309709189364);
            const auto mod = ModulationParams::make(dm, 1.0e7);
            DetectionParams d = fig_det(1.0e4, 1.0, 0.0, kNominalVarN);
            const double i0 = mean_photocurrent(p, d);
            const NoisePowerModel npm = mean_powers(p, mod, d);
            SpectrumTriplet t{npm.p_omega_mean, npm.p_floor_mean, npm.p_elec_mean};
            const DeltaEstimate est = estimate_delta_m(t, p.squeezing_phi, d.rbw_hz, i0);
            worst = std::max(worst, std::abs(est.value / dm - 1.0));
        }
        checks.push_back(bounded("estimator_round_trip", worst, 1.0e-10));
    }

    // Cramer-Rao bookkeeping: var_delta_m * fisher == 1
    {
        double worst = 0.0;
        for (double phi : {0.3, 0.7, 1.0, 1.9}) {
            ProbeParams p = fig_probe(phi);
            const auto mod = ModulationParams::make(1.0e-4, 1.0e7);
            DetectionParams d = fig_det(1.0e4, 34.0, 1.0e-5, 0.0);
            const double i0 = mean_photocurrent(p, d);
            const FisherReport rep = fisher_info(p, mod, d, i0);
            worst = std::max(worst, std::abs(rep.var_delta_m * rep.fisher - 1.0));
        }
        checks.push_back(bounded("efficiency_identity", worst, 1.0e-12));
    }

    // delta-method: (d<delta>/d<p>)^2 Var(p) equals 1/F
    {
        double worst_dropped = 0.0;
        double worst_full = 0.0;
        for (double phi : {0.5, 1.0}) {
            ProbeParams p = fig_probe(phi);
            const auto mod = ModulationParams::make(1.0e-4, 1.0e7);
            DetectionParams d = fig_det(1.0e4, 34.0, 1.0e-5, kNominalVarN);
            const double i0 = mean_photocurrent(p, d);
            const double dddp = 1.0 / (mod.delta_m * d.load_r_ohm * i0 * i0);

            DetectionParams d_non = d;
            d_non.var_n = 0.0;
            const double lhs = dddp * dddp * var_sideband_power(p, mod, d_non, i0);
            const double rhs = fisher_info(p, mod, d, i0).var_delta_m;
            worst_dropped = std::max(worst_dropped, std::abs(lhs / rhs - 1.0));

            const double lhs_full = dddp * dddp * var_sideband_power(p, mod, d, i0);
            const double rhs_full = fisher_info_with_electronic(p, mod, d, i0).var_delta_m;
            worst_full = std::max(worst_full, std::abs(lhs_full / rhs_full - 1.0));
        }
        checks.push_back(bounded("delta_method_consistency", worst_dropped, 1.0e-6));
        checks.push_back(bounded("delta_method_consistency_with_electronic", worst_full, 1.0e-12));
    }

    // q_advantage bounds and monotonicity
    {
        double worst = 0.0;
        bool monotone = true;
        const auto mod = ModulationParams::make(1.0e-4, 1.0e7);
        for (double phi : {0.3, 0.5, 0.6918309709189364, 0.9}) {
            for (double b : {1.0e1, 1.0e2, 1.0e3, 1.0e4, 1.0e5, 1.0e6}) {
                ProbeParams p = fig_probe(phi);
                DetectionParams d = fig_det(b, 1.0, 1.0e-5, 0.0);
                const double i0 = mean_photocurrent(p, d);
                const FisherReport rep = fisher_info(p, mod, d, i0);
                if (rep.q_advantage < 1.0 - 1.0e-12) worst = std::max(worst, 1.0 - rep.q_advantage);
                if (rep.q_advantage > 1.0 / phi + 1.0e-12)
                    worst = std::max(worst, rep.q_advantage - 1.0 / phi);
            }
            // fisher decreasing in phi at fixed B
            ProbeParams lo = fig_probe(phi), hi = fig_probe(phi + 0.05);
            DetectionParams d = fig_det(1.0e4, 1.0, 1.0e-5, 0.0);
            const double i0 = mean_photocurrent(lo, d);
            monotone = monotone
                       && fisher_info(lo, mod, d, i0).fisher > fisher_info(hi, mod, d, i0).fisher;
            // fisher decreasing in var_h
            DetectionParams dh = d;
            dh.var_h = 2.0e-5;
            monotone = monotone
                       && fisher_info(lo, mod, d, i0).fisher > fisher_info(lo, mod, dh, i0).fisher;
        }
        // identically 1 at phi = 1
        for (double b : {1.0e2, 1.0e4, 1.0e6}) {
            ProbeParams p = fig_probe(1.0);
            DetectionParams d = fig_det(b, 1.0, 1.0e-5, 0.0);
            const double i0 = mean_photocurrent(p, d);
            worst = std::max(worst, std::abs(fisher_info(p, mod, d, i0).q_advantage - 1.0));
        }
        checks.push_back(bounded("q_advantage_bounds", worst, 1.0e-12));
        checks.push_back(bounded("fisher_monotonic", monotone ? 0.0 : 1.0, 0.5));
    }

    // fractional-M averaging weights
    {
        double worst = 0.0;
        for (double m : {1.0, 1.5, 4.0, 33.7, 34.0}) {
            const auto w = averaging_weights(m);
            double sum = 0.0, sumsq = 0.0;
            for (double wi : w) {
                sum += wi;
                sumsq += wi * wi;
            }
            worst = std::max(worst, std::abs(sum - 1.0));
            worst = std::max(worst, std::abs(sumsq * m - 1.0));
        }
        checks.push_back(bounded("averaging_weights", worst, 1.0e-12));
    }

    // generator mean moments vs closed forms, 3 SE over the grid
    {
        const auto mod = ModulationParams::make(1.0e-4, 1.0e7);
        double worst_z = 0.0;
        std::string worst_at;
        const long long n = 1000000;
        std::vector<std::array<double, 2>> grid;
        for (double phi : {0.5, 0.6918309709189364, 1.0, 1.8620871366628675})
            for (double b : {1.0e2, 1.0e4, 1.0e6}) grid.push_back({phi, b});

        std::vector<double> zscores(grid.size() * 3, 0.0);
        auto run_cell = [&](std::size_t gi) {
            const double phi = grid[gi][0];
            const double b = grid[gi][1];
            ProbeParams p = fig_probe(phi);
            DetectionParams d = fig_det(b, 1.0, 1.0e-5, kNominalVarN);
            const GenerativeModel model = build_model(p, mod, d);
            const NoisePowerModel npm =
                mean_powers_at(model.i0_amp, mod.delta_m, phi, d);
            Rng rng = Rng::stream(kValidateSeed, {1, gi});
            std::vector<double> po(n), pn(n), pe(n);
            for (long long i = 0; i < n; ++i) {
                po[static_cast<std::size_t>(i)] = draw_sideband(model, rng).p_value;
                pn[static_cast<std::size_t>(i)] = draw_floor(model, rng).p_value;
                pe[static_cast<std::size_t>(i)] = draw_elec(model, rng).p_value;
            }
            const MomentSummary so = summarize(po), sn = summarize(pn), se = summarize(pe);
            zscores[gi * 3 + 0] = std::abs(so.mean - npm.p_omega_mean) / so.se_mean;
            zscores[gi * 3 + 1] = std::abs(sn.mean - npm.p_floor_mean) / sn.se_mean;
            zscores[gi * 3 + 2] = std::abs(se.mean - npm.p_elec_mean) / se.se_mean;
        };
        {
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t)
                pool.emplace_back([&, t] {
                    for (std::size_t gi = static_cast<std::size_t>(t); gi < grid.size();
                         gi += static_cast<std::size_t>(threads))
                        run_cell(gi);
                });
            for (auto& th : pool) th.join();
        }
        for (std::size_t i = 0; i < zscores.size(); ++i) {
            if (zscores[i] > worst_z) {
                worst_z = zscores[i];
                std::ostringstream os;
                os << "cell " << i / 3 << " bin " << i % 3;
                worst_at = os.str();
            }
        }
        checks.push_back(bounded("moment_mean_match_3se", worst_z, 3.0, worst_at));
    }

    // generator Var(p_omega) vs the closed form, 3 SE (reduced grid here;
    // the acceptance suite runs the full 3x3x2x2 grid at 1e6 draws)
    {
        const auto mod = ModulationParams::make(5.0e-3, 1.0e7);
        double worst_z = 0.0;
        const long long n = 200000;
        std::size_t cell = 0;
        for (double phi : {0.5, 1.8620871366628675}) {
            for (double b : {1.0e2, 1.0e6}) {
                for (double vh : {0.0, 1.0e-5}) {
                    ProbeParams p = fig_probe(phi);
                    DetectionParams d = fig_det(b, 1.0, vh, kNominalVarN);
                    const GenerativeModel model = build_model(p, mod, d);
                    Rng rng = Rng::stream(kValidateSeed, {2, cell++});
                    const auto po = collect_sideband(model, n, rng);
                    const MomentSummary s = summarize(po);
                    const double expected = var_sideband_power(p, mod, d, model.i0_amp);
                    worst_z = std::max(worst_z, std::abs(s.var - expected) / s.se_var);
                }
            }
        }
        checks.push_back(bounded("moment_var_match_3se", worst_z, 3.0));
    }

    // 1/M scaling of the averaged sideband power variance
    {
        const auto mod = ModulationParams::make(1.0e-4, 1.0e7);
        ProbeParams p = fig_probe(0.6918309709189364);
        DetectionParams base = fig_det(1.0e4, 1.0, 1.0e-5, 0.0);
        const GenerativeModel model = build_model(p, mod, base);
        const long long n = 30000;
        double var1 = 0.0;
        double worst = 0.0;
        for (double m : {1.0, 4.0, 34.0}) {
            DetectionParams d = base;
            d.m_avg = m;
            Rng rng = Rng::stream(kValidateSeed, {3, static_cast<std::uint64_t>(m)});
            std::vector<double> po(static_cast<std::size_t>(n));
            for (auto& x : po) x = measure_triplet(model, d, rng).p_omega;
            const MomentSummary s = summarize(po);
            if (m == 1.0)
                var1 = s.var;
            else
                worst = std::max(worst, std::abs(s.var * m / var1 - 1.0));
        }
        checks.push_back(bounded("variance_1_over_m_scaling", worst, 0.05));
    }

    // estimator unbiasedness and efficiency at quantum-limited settings
    {
        ProbeParams p = fig_probe(1.0);
        const auto mod = ModulationParams::make(1.0e-4, 1.0e7);
        DetectionParams d = fig_det(1.0e3, 34.0, 0.0, 0.0);
        RunOptions opts;
        opts.threads = threads;
        const auto reports = run_experiment(p, mod, d, 20000, 1, kValidateSeed + 4, opts);
        const MomentSummary s = summarize(reports[0].estimates);
        const double i0 = mean_photocurrent(p, d);
        const double crb = fisher_info(p, mod, d, i0).var_delta_m;
        checks.push_back(bounded("estimator_unbiased_3se",
                                 std::abs(s.mean - mod.delta_m) / s.se_mean, 3.0));
        checks.push_back(bounded("estimator_efficient_5pct", std::abs(s.var / crb - 1.0), 0.05));
    }

    // determinism: identical seeds give identical results regardless of threads
    {
        ProbeParams p = fig_probe(0.6918309709189364);
        const auto mod = ModulationParams::make(1.0e-4, 1.0e7);
        DetectionParams d = fig_det(1.0e5, 34.0, 7.0e-6, 0.0);
        RunOptions one;
        one.threads = 1;
        RunOptions many;
        many.threads = 2;
        const auto a = run_experiment(p, mod, d, 50, 6, kValidateSeed + 5, one);
        const auto b = run_experiment(p, mod, d, 50, 6, kValidateSeed + 5, many);
        bool same = a.size() == b.size();
        for (std::size_t i = 0; same && i < a.size(); ++i)
            same = a[i].var == b[i].var && a[i].var_se == b[i].var_se;
        checks.push_back(bounded("determinism_across_threads", same ? 0.0 : 1.0, 0.5));
    }

    // cross-model agreement freqsim vs timesim
    {
        ProbeParams p = fig_probe(0.7585775750291838);
        const auto mod = ModulationParams::make(1.0e-4, 1.0e7);
        DetectionParams d = fig_det(1.0e4, 1.0, 7.0e-6, kNominalVarN);

        TraceRunConfig tc;
        tc.sample_rate_hz = 2.56e7;
        tc.n_segments = 2000;
        tc.threads = threads;
        tc.seed = kValidateSeed + 6;
        const TripletMoments tm = accumulate_triplet_moments(p, mod, d, tc);

        const GenerativeModel model = build_model(p, mod, d);
        Rng rng = Rng::stream(kValidateSeed, {7});
        const long long n = 20000;
        std::vector<double> po(n), pn(n), pe(n);
        for (long long i = 0; i < n; ++i) {
            const SpectrumTriplet t = measure_triplet(model, d, rng);
            po[static_cast<std::size_t>(i)] = t.p_omega;
            pn[static_cast<std::size_t>(i)] = t.p_floor;
            pe[static_cast<std::size_t>(i)] = t.p_elec;
        }
        const MomentSummary so = summarize(po), sn = summarize(pn), se = summarize(pe);
        auto zcombined = [](const MomentSummary& a, const BinMoments& b) {
            return std::abs(a.mean - b.mean) / std::sqrt(a.se_mean * a.se_mean + b.se_mean * b.se_mean);
        };
        const double worst = std::max({zcombined(so, tm.p_omega), zcombined(sn, tm.p_floor),
                                       zcombined(se, tm.p_elec)});
        checks.push_back(bounded("cross_model_means_3se", worst, 3.0));
    }

    // timesim floor scales linearly in phi (matched seeds)
    {
        const auto mod = ModulationParams::make(1.0e-4, 1.0e7);
        DetectionParams d = fig_det(1.0e4, 1.0, 0.0, 0.0);
        TraceRunConfig tc;
        tc.sample_rate_hz = 2.56e7;
        tc.n_segments = 2000;
        tc.threads = threads;
        tc.seed = kValidateSeed + 8;
        const TripletMoments half = accumulate_triplet_moments(fig_probe(0.5), mod, d, tc);
        const TripletMoments full = accumulate_triplet_moments(fig_probe(1.0), mod, d, tc);
        const double ratio = half.p_floor.mean / full.p_floor.mean;
        checks.push_back(bounded("floor_phi_scaling_2pct", std::abs(ratio / 0.5 - 1.0), 0.02));
    }

    // noise floor linear in RBW; tone power invariant in RBW
    {
        ProbeParams p = fig_probe(1.0);
        const auto mod = ModulationParams::make(1.0e-4, 1.0e7);
        DetectionParams d = fig_det(1.0e4, 1.0, 0.0, 0.0);
        Rng rng = Rng::stream(kValidateSeed, {9});
        const TimeTrace shot_trace = synthesize(p, mod, d, 400.0 / 1.0e4, 2.56e7, rng);
        const NoiseSpectrum narrow = analyze(shot_trace, d.load_r_ohm, 1.2e7, 1.0e4, 390.0, 10);
        const NoiseSpectrum wide = analyze(shot_trace, d.load_r_ohm, 1.2e7, 2.0e4, 780.0, 10);
        auto avg = [](const NoiseSpectrum& s) {
            double sum = 0.0;
            for (double v : s.powers_w) sum += v;
            return sum / static_cast<double>(s.powers_w.size());
        };
        const double ratio = avg(wide) / avg(narrow);
        checks.push_back(bounded("floor_rbw_linearity_5pct", std::abs(ratio / 2.0 - 1.0), 0.05));

        ProbeParams quiet = fig_probe(1.0e-30);
        DetectionParams dq = d;
        Rng rng2 = Rng::stream(kValidateSeed, {10});
        const TimeTrace tone = synthesize(quiet, mod, dq, 4.0 / 1.0e4, 2.56e7, rng2);
        const double i0 = mean_photocurrent(quiet, dq);
        const double expect = dq.load_r_ohm * i0 * i0 * mod.delta_m * mod.delta_m / 2.0;
        const NoiseSpectrum s1 = analyze(tone, dq.load_r_ohm, 1.0e7, 1.0e4, 1.0, 0);
        const NoiseSpectrum s2 = analyze(tone, dq.load_r_ohm, 1.0e7, 2.0e4, 1.0, 0);
        const double p1 = s1.powers_w.at(0), p2 = s2.powers_w.at(0);
        checks.push_back(bounded("tone_power_value", std::abs(p1 / expect - 1.0), 5.0e-4));
        checks.push_back(bounded("tone_rbw_invariance", std::abs(p2 / p1 - 1.0), 1.0e-9));
    }

    // end-to-end estimator recovery through the time-domain path
    {
        ProbeParams p = fig_probe(0.7585775750291838);
        const auto mod = ModulationParams::make(1.0e-4, 1.0e7);
        DetectionParams d = fig_det(1.0e4, 34.0, 7.0e-6, 0.0);
        const double i0 = mean_photocurrent(p, d);
        const NoisePowerModel cal = mean_powers(p, mod, d);
        double mean_est = 0.0;
        const int reps = 100;
        for (int r = 0; r < reps; ++r) {
            TraceRunConfig tc;
            tc.sample_rate_hz = 2.56e7;
            tc.n_segments = 34;
            tc.threads = 1;
            tc.seed = kValidateSeed + 11 + static_cast<std::uint64_t>(r);
            const TripletMoments tm = accumulate_triplet_moments(p, mod, d, tc);
            SpectrumTriplet t{tm.p_omega.mean, cal.p_floor_mean, cal.p_elec_mean};
            mean_est += estimate_delta_m(t, p.squeezing_phi, d.rbw_hz, i0).value;
        }
        mean_est /= reps;
        checks.push_back(bounded("timedomain_estimator_5pct",
                                 std::abs(mean_est / mod.delta_m - 1.0), 0.05));
    }

    // below-floor policy
    {
        bool ok = true;
        const SpectrumTriplet t{1.0e-18, 2.0e-18, 1.0e-19};
        const DeltaEstimate est = estimate_delta_m(t, 1.0, 1.0e4, 1.0e-4);
        ok = ok && est.below_floor && est.value == 0.0;
        bool threw = false;
        try {
            (void)estimate_delta_m({1.0, 0.5, 0.5}, 1.0, 1.0e4, 1.0e-4);
        } catch (const std::domain_error&) {
            threw = true;
        }
        ok = ok && threw;
        checks.push_back(bounded("below_floor_policy", ok ? 0.0 : 1.0, 0.5));
    }

    (void)cfg;
    return checks;
}

} // namespace sqmod
