#include "sqmod/inference.hpp"
#include "sqmod/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace sqmod {

VarianceReport variance_of(std::span<const double> estimates) {
    const std::size_t k = estimates.size();
    if (k < 2) throw std::invalid_argument("variance_of: need at least two estimates");
    double mean = 0.0;
    for (double x : estimates) mean += x;
    mean /= static_cast<double>(k);
    double ss = 0.0;
    for (double x : estimates) {
        const double d = x - mean;
        ss += d * d;
    }
    VarianceReport rep;
    rep.estimates.assign(estimates.begin(), estimates.end());
    rep.k_samples = static_cast<int>(k);
    rep.var = ss / static_cast<double>(k - 1);
    rep.var_se = rep.var * std::sqrt(2.0 / static_cast<double>(k - 1));
    return rep;
}

ValueWithError measured_q(const VarianceReport& var_qnl, const VarianceReport& var_phi) {
    if (!(var_phi.var > 0.0))
        throw std::domain_error("measured_q: squeezed-arm variance must be > 0");
    ValueWithError q;
    q.value = var_qnl.var / var_phi.var;
    const double r1 = var_qnl.var_se / var_qnl.var;
    const double r2 = var_phi.var_se / var_phi.var;
    q.se = q.value * std::sqrt(r1 * r1 + r2 * r2);
    return q;
}

LineFit fit_var_vs_phi(std::span<const VarVsPhiPoint> points) {
    if (points.size() < 2) throw std::invalid_argument("fit_var_vs_phi: need >= 2 points");
    std::set<double> distinct;
    for (const auto& p : points) distinct.insert(p.phi);
    if (distinct.size() < 2)
        throw std::invalid_argument("fit_var_vs_phi: need >= 2 distinct phi (degenerate abscissa)");

    // Weighted normal equations for y = a + b x.
    double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        const double w = p.var_se > 0.0 ? 1.0 / (p.var_se * p.var_se) : 1.0;
        sw += w;
        sx += w * p.phi;
        sy += w * p.var;
        sxx += w * p.phi * p.phi;
        sxy += w * p.phi * p.var;
    }
    const double det = sw * sxx - sx * sx;
    if (!(std::abs(det) > 0.0))
        throw std::invalid_argument("fit_var_vs_phi: singular normal equations");

    LineFit fit;
    fit.n_points = static_cast<int>(points.size());
    fit.intercept = (sxx * sy - sx * sxy) / det;
    fit.slope = (sw * sxy - sx * sy) / det;
    fit.intercept_se = std::sqrt(sxx / det);
    fit.slope_se = std::sqrt(sw / det);
    double chi2 = 0.0;
    for (const auto& p : points) {
        const double w = p.var_se > 0.0 ? 1.0 / (p.var_se * p.var_se) : 1.0;
        const double r = p.var - (fit.intercept + fit.slope * p.phi);
        chi2 += w * r * r;
    }
    fit.residual_norm = std::sqrt(chi2);
    return fit;
}

double q_advantage_model(double rbw_hz, double var_h, double i0_amp, double phi,
                         double delta_m) {
    const double a = 2.0 * PhysConstants::q * rbw_hz / i0_amp;
    const double cl = 4.0 * delta_m * delta_m * var_h;
    return (a + cl) / (phi * a + cl);
}

namespace {

double chi2_var_h(std::span<const QVsRbwPoint> points, double v, double i0, double phi,
                  double delta_m) {
    double chi2 = 0.0;
    for (const auto& p : points) {
        const double w = p.q_se > 0.0 ? 1.0 / (p.q_se * p.q_se) : 1.0;
        const double r = p.q - q_advantage_model(p.rbw_hz, v, i0, phi, delta_m);
        chi2 += w * r * r;
    }
    return chi2;
}

} // namespace

FitResult fit_classical_noise(std::span<const QVsRbwPoint> points, double i0_amp, double phi,
                              double delta_m) {
    std::set<double> distinct;
    for (const auto& p : points) distinct.insert(p.rbw_hz);
    if (distinct.size() < 3)
        throw std::invalid_argument(
            "fit_classical_noise: need >= 3 distinct rbw points spanning the crossover");
    if (!(delta_m > 0.0) || !(i0_amp > 0.0) || !(phi > 0.0))
        throw std::invalid_argument("fit_classical_noise: invalid fixed parameters");

    auto chi2 = [&](double v) { return chi2_var_h(points, v, i0_amp, phi, delta_m); };

    // Upper bracket: beyond v_max the model is flat at Q = 1 for every
    // supplied rbw, so nothing larger is identifiable.
    double b_max = 0.0;
    for (const auto& p : points) b_max = std::max(b_max, p.rbw_hz);
    const double v_max = 1.0e3 * 2.0 * PhysConstants::q * b_max / (i0_amp * 4.0 * delta_m * delta_m);

    // Coarse scan: v = 0 plus a log grid, then golden-section refinement.
    constexpr int kGrid = 256;
    double best_v = 0.0;
    double best_chi2 = chi2(0.0);
    const double v_lo = v_max * 1.0e-12;
    const double step = std::log(v_max / v_lo) / (kGrid - 1);
    int best_idx = -1;
    for (int i = 0; i < kGrid; ++i) {
        const double v = v_lo * std::exp(step * i);
        const double c = chi2(v);
        if (c < best_chi2) {
            best_chi2 = c;
            best_v = v;
            best_idx = i;
        }
    }
    double lo = 0.0, hi = v_max;
    if (best_idx > 0) lo = v_lo * std::exp(step * (best_idx - 1));
    if (best_idx >= 0 && best_idx < kGrid - 1) hi = v_lo * std::exp(step * (best_idx + 1));
    if (best_idx == -1) hi = v_lo; // minimum at the v = 0 boundary

    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    double f1 = chi2(c1), f2 = chi2(c2);
    const double tol_abs = 1.0e-3 * std::max(best_v, v_max * 1.0e-12);
    int iters = 0;
    while (b - a > tol_abs && b - a > 1.0e-3 * std::max(a, 1.0e-300)) {
        if (++iters > 400)
            throw std::runtime_error("fit_classical_noise: golden-section did not converge");
        if (f1 < f2) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - gr * (b - a);
            f1 = chi2(c1);
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + gr * (b - a);
            f2 = chi2(c2);
        }
    }
    double v_hat = 0.5 * (a + b);
    if (chi2(0.0) <= chi2(v_hat)) v_hat = 0.0; // boundary solution

    FitResult fit;
    fit.n_points = static_cast<int>(points.size());
    fit.value = v_hat;
    fit.residual_norm = std::sqrt(chi2(v_hat));

    // stderr from the local chi^2 curvature: Var(v) = 2 / chi2''(v).
    const double h = std::max(v_hat, v_max * 1.0e-9) * 1.0e-3;
    const double vc = std::max(v_hat, h); // keep the stencil inside v >= 0
    const double d2 = (chi2(vc + h) - 2.0 * chi2(vc) + chi2(vc - h)) / (h * h);
    if (!(d2 > 0.0) || !std::isfinite(d2))
        throw std::runtime_error("fit_classical_noise: flat chi^2, parameter not identifiable");
    fit.stderr_ = std::sqrt(2.0 / d2);
    return fit;
}

double infer_generated_squeezing(double phi_measured, double eta_detect, double eta_optical) {
    if (!(eta_detect > 0.0 && eta_detect <= 1.0) || !(eta_optical > 0.0 && eta_optical <= 1.0))
        throw std::domain_error("infer_generated_squeezing: efficiencies must lie in (0, 1]");
    if (!(phi_measured > 0.0))
        throw std::domain_error("infer_generated_squeezing: phi_measured must be > 0");
    const double eta = eta_detect * eta_optical;
    const double phi_gen = 1.0 - (1.0 - phi_measured) / eta;
    if (!(phi_gen > 0.0))
        throw std::domain_error("infer_generated_squeezing: unphysical generated squeezing");
    return phi_gen;
}

} // namespace sqmod
