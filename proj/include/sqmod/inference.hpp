#ifndef SQMOD_INFERENCE_HPP
#define SQMOD_INFERENCE_HPP

#include <span>
#include <vector>

namespace sqmod {

/// Sample variance of an ensemble of delta_m estimates, with the conditions
/// it was taken under.
struct VarianceReport {
    std::vector<double> estimates; // may be cleared after aggregation
    double var = 0.0;
    double var_se = 0.0;           // standard error of var, Var(s^2) = 2 sigma^4/(k-1)
    double phi = 1.0;
    double rbw_hz = 0.0;
    double m_avg = 1.0;
    int k_samples = 0;
    int n_below_floor = 0;
};

/// Unbiased sample variance and its normal-theory standard error.
/// Throws std::invalid_argument for fewer than two estimates.
VarianceReport variance_of(std::span<const double> estimates);

struct ValueWithError {
    double value = 0.0;
    double se = 0.0;
};

/// Q = var_qnl.var / var_phi.var with first-order error propagation.
ValueWithError measured_q(const VarianceReport& var_qnl, const VarianceReport& var_phi);

/// Weighted least-squares straight line y = intercept + slope * x.
struct LineFit {
    double slope = 0.0;
    double slope_se = 0.0;
    double intercept = 0.0;
    double intercept_se = 0.0;
    double residual_norm = 0.0; // sqrt(chi^2)
    int n_points = 0;

    double at(double x) const { return intercept + slope * x; }
    /// Quantum advantage read off the fitted line: line(1)/line(phi).
    double q_at(double phi) const { return at(1.0) / at(phi); }
};

struct VarVsPhiPoint {
    double phi = 0.0;
    double var = 0.0;
    double var_se = 0.0; // 0 means unit weight
};

/// Fit Var(delta_hat) vs phi to a line. Requires >= 2 distinct phi.
LineFit fit_var_vs_phi(std::span<const VarVsPhiPoint> points);

/// Scalar fit result.
struct FitResult {
    double value = 0.0;
    double stderr_ = 0.0;
    double residual_norm = 0.0;
    int n_points = 0;
};

struct QVsRbwPoint {
    double rbw_hz = 0.0;
    double q = 0.0;
    double q_se = 0.0;
};

/// Quantum-advantage model Q(B; v) = (2qB/i0 + 4 delta_m^2 v) /
/// (2q phi B/i0 + 4 delta_m^2 v) with v = Var(Re[H]) the fit parameter.
double q_advantage_model(double rbw_hz, double var_h, double i0_amp, double phi,
                         double delta_m);

/// One-parameter weighted least squares for var_h over the model above.
/// Grid scan followed by golden-section refinement to 1e-3 relative;
/// stderr from the chi^2 curvature. Requires >= 3 distinct rbw points.
FitResult fit_classical_noise(std::span<const QVsRbwPoint> points, double i0_amp, double phi,
                              double delta_m);

/// Invert the beam-splitter loss model phi_meas = 1 - eta (1 - phi_gen)
/// with eta = eta_detect * eta_optical.
double infer_generated_squeezing(double phi_measured, double eta_detect, double eta_optical);

} // namespace sqmod

#endif
