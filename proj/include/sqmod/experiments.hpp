#ifndef SQMOD_EXPERIMENTS_HPP
#define SQMOD_EXPERIMENTS_HPP

#include "sqmod/config.hpp"
#include "sqmod/inference.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sqmod {

struct TheoryRow {
    double rbw_hz = 0.0;
    double phi = 0.0;
    double fisher_per_photon = 0.0;
};

/// Fisher information per detected photon over an RBW grid, one curve per
/// squeezing level.
std::vector<TheoryRow> theory_fig1d(const ExperimentConfig& cfg);
void cmd_theory_fig1d(const ExperimentConfig& cfg, const std::filesystem::path& out);

/// Measured quantum advantage from paired simulation arms. The reference arm
/// reruns the identical pipeline at phi = 1 with the same per-repetition
/// sub-streams (common random numbers), and Q is the ratio of the
/// rep-averaged variances with a delete-one-rep jackknife standard error.
struct PairedQ {
    double q = 0.0;
    double q_se = 0.0;
    double var_phi = 0.0; // rep-averaged Var(delta_hat) of the squeezed arm
    double var_qnl = 0.0;
    int n_below_floor = 0;
    std::vector<double> rep_var_phi; // per-rep variances, paired by index
    std::vector<double> rep_var_qnl;
};

PairedQ paired_quantum_advantage(const ProbeParams& probe, const ModulationParams& mod,
                                 const DetectionParams& det, int k_samples, int reps,
                                 std::uint64_t seed, int threads, double delta_m_jitter = 0.0,
                                 bool measured_floors = false);

struct PhiSweepRow {
    double phi = 0.0;
    double q_measured = 0.0;
    double q_se = 0.0;
    double q_opt = 0.0;
};

std::vector<PhiSweepRow> sweep_phi(const ExperimentConfig& cfg);
void cmd_sweep_phi(const ExperimentConfig& cfg, const std::filesystem::path& out);

struct RbwSweepRow {
    double rbw_hz = 0.0;
    double q_measured = 0.0;
    double q_se = 0.0;
    double q_model = 0.0;
};

std::vector<RbwSweepRow> sweep_rbw(const ExperimentConfig& cfg);
FitResult fit_rbw_sweep(const ExperimentConfig& cfg, const std::vector<RbwSweepRow>& rows);
void cmd_sweep_rbw(const ExperimentConfig& cfg, const std::filesystem::path& out);

void cmd_trace_fig2a(const ExperimentConfig& cfg, const std::filesystem::path& out);

/// Free-form variance experiment; emits the variance-report CSV.
void cmd_simulate(const ExperimentConfig& cfg, const std::filesystem::path& out);

/// Fits over previously written CSVs. kind: "var-vs-phi" (variance-report
/// CSV) or "q-vs-rbw" (sweep-rbw CSV, needs the generating config).
void cmd_fit(const ExperimentConfig& cfg, const std::string& kind,
             const std::filesystem::path& in, const std::filesystem::path& out);

struct CheckResult {
    std::string name;
    bool pass = false;
    double margin = 0.0; // how much headroom was left, in units of the bound
    std::string detail;
};

/// Full invariant suite (moment matching, estimator efficiency, round
/// trips, determinism). Returns one entry per check.
std::vector<CheckResult> validation_suite(const ExperimentConfig& cfg);
int cmd_validate(const ExperimentConfig& cfg, std::ostream& os);

} // namespace sqmod

#endif
