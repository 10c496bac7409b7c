#ifndef SQMOD_MCSTATS_HPP
#define SQMOD_MCSTATS_HPP

#include <cmath>
#include <span>

namespace sqmod {

/// Sample mean/variance with standard errors. se_var uses the empirical
/// fourth moment, Var(s^2) = (m4 - s^4 (n-3)/(n-1))/n, so it stays honest
/// for the heavy-tailed power draws.
struct MomentSummary {
    double mean = 0.0;
    double var = 0.0;
    double se_mean = 0.0;
    double se_var = 0.0;
    long long n = 0;
};

inline MomentSummary summarize(std::span<const double> xs) {
    MomentSummary s;
    s.n = static_cast<long long>(xs.size());
    if (s.n < 2) return s;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(s.n);
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    const double n = static_cast<double>(s.n);
    s.mean = mean;
    s.var = m2 / (n - 1.0);
    m4 /= n;
    s.se_mean = std::sqrt(s.var / n);
    const double v = std::max(0.0, m4 - s.var * s.var * (n - 3.0) / (n - 1.0));
    s.se_var = std::sqrt(v / n);
    return s;
}

} // namespace sqmod

#endif
