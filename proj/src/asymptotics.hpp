// Closed-form asymptotic characterizations of the secrecy capacity: the
// low-intensity quadratic and linear laws, the per-unit-intensity slope Phi,
// the average-only linear and loglog laws, the high-intensity saturation
// constant, and the continuous-time upper bound.
#pragma once

#include "channel.hpp"

#include <utility>

namespace pwc {

enum class Regime {
    peak_only_low,
    peak_avg_ratio_low,
    fixed_peak_avg_low,
    avg_only_equal_gains_low,
    avg_only_diff_gains_low,
    high_intensity,
};

const char* regime_name(Regime r);

struct AsymptoticReport {
    Regime regime = Regime::peak_only_low;
    bool has_bounds = false;   // true when a (lower, upper) sandwich applies
    double coefficient = 0;    // single-coefficient regimes
    double lower = 0, upper = 0;
    std::string scaling_law;   // e.g. "C_S ~ c*A^2", "C_S ~ c*E", "C_S = O(1)"
};

// Per-unit-intensity secrecy slope; strictly increasing in x with limit 0 at
// the origin.  Independent of the sampling interval.
double phi(double x, const ChannelParams& params);

// Coefficient c with C_S ~ c*A^2 as the peak A -> 0, for average-to-peak
// ratio p (p >= 1/2 means the average bound is inactive).
double low_intensity_quadratic(const ChannelParams& params, double p);

// Slope c with C_S ~ c*E as the average E -> 0 at fixed peak A; equals phi(A).
double low_intensity_linear_slope(const ChannelParams& params, double peak);

// Slope c with C_S ~ c*E as E -> 0 under an average-only constraint with
// equal gains.
double avg_only_equal_gains_slope(const ChannelParams& params);

// Finite-E sandwich for the average-only, different-gains regime where
// C_S ~ c*E*loglog(1/E).  The lower bound is the secrecy rate of a binary
// distribution at spread sqrt((lambda_b/(alpha_b^2*delta))*log(1/E));
// the upper bound keeps both the linear and the loglog terms.
std::pair<double, double> avg_only_diff_gains_bounds(const ChannelParams& params,
                                                     double avg);

// Intensity-independent ceiling on the secrecy capacity (high-intensity
// saturation constant), in nats/second.
double high_intensity_bound(const ChannelParams& params);

// Secrecy capacity of the underlying continuous-time channel under the same
// constraints: binary-optimal with ON-probability p_star, an upper bound on
// every discrete-time value.
struct CtResult {
    double value = 0;  // nats
    double p_star = 0;
};
CtResult ct_secrecy_capacity(const ChannelParams& params, double peak,
                             std::optional<double> average);

// Derived degradation quantities used by the high-intensity and loglog bounds.
struct DegradationParams {
    double lambda_d = 0;      // dark-current gap, gain-adjusted when gains differ
    double alpha_tilde = 0;   // gain gap
    double lambda_tilde = 0;  // auxiliary dark-current term
};
DegradationParams degradation_params(const ChannelParams& params);

// Select the asymptotic law matching the constraint set and report its
// coefficient or bounds.
AsymptoticReport classify_regime(const ChannelParams& params,
                                 const IntensityConstraints& constraints);

}  // namespace pwc
