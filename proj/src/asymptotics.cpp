#include "asymptotics.hpp"

#include <cmath>

namespace pwc {

namespace {

void require(bool cond, errc code, const std::string& msg) {
    if (!cond) throw error(code, msg);
}

void require_degraded(const ChannelParams& params) {
    params.validate();
    require(params.is_weakly_degraded(), errc::invalid_argument,
            "asymptotic formulas require stochastically degraded parameters");
}

// Entropy-like kernel of the continuous-time secrecy capacity.
double ct_kernel(double x, const ChannelParams& p) {
    const double mb = p.alpha_b * x + p.lambda_b;
    const double me = p.alpha_e * x + p.lambda_e;
    return mb * std::log(mb) - me * std::log(me);
}

double ct_kernel_deriv(double x, const ChannelParams& p) {
    const double mb = p.alpha_b * x + p.lambda_b;
    const double me = p.alpha_e * x + p.lambda_e;
    return p.alpha_b * (std::log(mb) + 1.0) - p.alpha_e * (std::log(me) + 1.0);
}

}  // namespace

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::peak_only_low: return "peak-only-low";
        case Regime::peak_avg_ratio_low: return "peak-avg-ratio-low";
        case Regime::fixed_peak_avg_low: return "fixed-peak-avg-low";
        case Regime::avg_only_equal_gains_low: return "avg-only-equal-gains-low";
        case Regime::avg_only_diff_gains_low: return "avg-only-diff-gains-low";
        case Regime::high_intensity: return "high-intensity";
    }
    return "unknown";
}

double phi(double x, const ChannelParams& params) {
    params.validate();
    require(x > 0, errc::invalid_argument,
            "the per-unit-intensity slope is defined for x > 0 (its limit at 0 is 0)");
    const double a_b = params.alpha_b, l_b = params.lambda_b;
    const double a_e = params.alpha_e, l_e = params.lambda_e;
    return (a_e - a_b) + (a_b + l_b / x) * std::log1p(a_b * x / l_b) -
           (a_e + l_e / x) * std::log1p(a_e * x / l_e);
}

double low_intensity_quadratic(const ChannelParams& params, double p) {
    require_degraded(params);
    require(p > 0 && p <= 1, errc::invalid_argument,
            "the average-to-peak ratio must lie in (0, 1]");
    const double spread = params.alpha_b * params.alpha_b / params.lambda_b -
                          params.alpha_e * params.alpha_e / params.lambda_e;
    if (p >= 0.5) return 0.125 * spread;
    return 0.5 * p * (1 - p) * spread;
}

double low_intensity_linear_slope(const ChannelParams& params, double peak) {
    require(peak > 0, errc::invalid_argument, "the peak bound must be positive");
    return phi(peak, params);
}

double avg_only_equal_gains_slope(const ChannelParams& params) {
    require_degraded(params);
    require(params.alpha_b == params.alpha_e, errc::unsupported_regime,
            "the equal-gains linear law requires identical channel gains");
    return params.alpha_b * std::log(params.lambda_e / params.lambda_b);
}

std::pair<double, double> avg_only_diff_gains_bounds(const ChannelParams& params,
                                                     double avg) {
    require_degraded(params);
    require(params.alpha_b > params.alpha_e, errc::unsupported_regime,
            "the loglog sandwich requires a strictly larger legitimate gain");
    require(avg > 0 && avg < std::exp(-1.0), errc::unsupported_regime,
            "the loglog sandwich requires an average bound in (0, 1/e)");
    const double loginv = std::log(1.0 / avg);
    const double zeta = std::sqrt(params.lambda_b /
                                  (params.alpha_b * params.alpha_b * params.delta) *
                                  loginv);
    require(avg < zeta, errc::invalid_argument,
            "the binary construction needs the average bound below its spread");
    DiscreteDistribution d;
    d.location = {0.0, zeta};
    d.weight = {1.0 - avg / zeta, avg / zeta};
    const double lower = rates(d, params, TruncationPolicy{}).f0;
    const double upper =
        params.alpha_b *
            std::log(params.lambda_e * params.alpha_b /
                     (params.lambda_b * params.alpha_e)) *
            avg +
        2.0 * (params.alpha_b - params.alpha_e) * avg * std::log(loginv);
    return {lower, upper};
}

double high_intensity_bound(const ChannelParams& params) {
    require_degraded(params);
    if (params.alpha_b == params.alpha_e) {
        const double ld = params.lambda_e - params.lambda_b;
        return (0.5 * ld * ld + ld / params.delta) / params.lambda_b;
    }
    const double ld = params.alpha_b / params.alpha_e * params.lambda_e - params.lambda_b;
    return (0.5 * ld * ld + ld / params.delta) / params.lambda_b +
           std::log(params.alpha_b / params.alpha_e) / params.delta;
}

CtResult ct_secrecy_capacity(const ChannelParams& params, double peak,
                             std::optional<double> average) {
    require_degraded(params);
    require(peak > 0, errc::invalid_argument, "the peak bound must be positive");
    if (average)
        require(*average > 0, errc::invalid_argument, "the average bound must be positive");
    if (params.identical_channels()) {
        CtResult out;
        out.value = 0;
        out.p_star = average ? std::min(0.5, *average / peak) : 0.5;
        return out;
    }
    // The ON-probability solves K(A) - K(0) = A * K'(pA); K' is strictly
    // increasing under degradedness, so the residual is monotone in p.
    const double target = ct_kernel(peak, params) - ct_kernel(0.0, params);
    auto resid = [&](double p) { return target - peak * ct_kernel_deriv(p * peak, params); };
    double lo = 1e-12, hi = 1.0;
    require(resid(lo) > 0 && resid(hi) < 0, errc::numeric_failure,
            "failed to bracket the continuous-time ON-probability (residuals " +
                std::to_string(resid(lo)) + " and " + std::to_string(resid(hi)) + ")");
    for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (resid(mid) > 0 ? lo : hi) = mid;
    }
    double p = 0.5 * (lo + hi);
    if (average) p = std::min(p, *average / peak);
    CtResult out;
    out.p_star = p;
    out.value = p * ct_kernel(peak, params) + (1 - p) * ct_kernel(0.0, params) -
                ct_kernel(p * peak, params);
    return out;
}

DegradationParams degradation_params(const ChannelParams& params) {
    require_degraded(params);
    DegradationParams d;
    d.alpha_tilde = params.alpha_b - params.alpha_e;
    d.lambda_tilde = (params.alpha_b / params.alpha_e - 1.0) * params.lambda_e;
    d.lambda_d = params.alpha_b == params.alpha_e
                     ? params.lambda_e - params.lambda_b
                     : params.alpha_b / params.alpha_e * params.lambda_e - params.lambda_b;
    return d;
}

AsymptoticReport classify_regime(const ChannelParams& params,
                                 const IntensityConstraints& constraints) {
    require_degraded(params);
    IntensityConstraints cons = constraints;
    cons.validate_and_normalize();
    AsymptoticReport rep;
    if (!cons.peak) {
        require(cons.average.has_value(), errc::invalid_argument,
                "constraints must provide a peak or an average intensity bound");
        if (params.alpha_b == params.alpha_e) {
            rep.regime = Regime::avg_only_equal_gains_low;
            rep.coefficient = avg_only_equal_gains_slope(params);
            rep.scaling_law = "C_S ~ c*E";
        } else {
            rep.regime = Regime::avg_only_diff_gains_low;
            auto [lo, up] = avg_only_diff_gains_bounds(params, *cons.average);
            rep.has_bounds = true;
            rep.lower = lo;
            rep.upper = up;
            rep.scaling_law = "C_S ~ c*E*loglog(1/E)";
        }
        return rep;
    }
    const double A = *cons.peak;
    // Candidate low-intensity predictions; the smaller applicable law wins,
    // and the high-intensity ceiling overrides once predictions exceed it.
    double coeff, prediction;
    if (!cons.average || *cons.average >= 0.5 * A) {
        rep.regime = Regime::peak_only_low;
        coeff = low_intensity_quadratic(params, 1.0);
        prediction = coeff * A * A;
        rep.scaling_law = "C_S ~ c*A^2";
    } else {
        const double r = *cons.average / A;
        const double qcoeff = low_intensity_quadratic(params, r);
        const double qpred = qcoeff * A * A;
        const double lcoeff = low_intensity_linear_slope(params, A);
        const double lpred = lcoeff * *cons.average;
        if (lpred < qpred) {
            rep.regime = Regime::fixed_peak_avg_low;
            coeff = lcoeff;
            prediction = lpred;
            rep.scaling_law = "C_S ~ c*E";
        } else {
            rep.regime = Regime::peak_avg_ratio_low;
            coeff = qcoeff;
            prediction = qpred;
            rep.scaling_law = "C_S ~ c*A^2";
        }
    }
    const double ceiling = high_intensity_bound(params);
    if (prediction > ceiling) {
        rep.regime = Regime::high_intensity;
        rep.coefficient = ceiling;
        rep.scaling_law = "C_S = O(1)";
    } else {
        rep.coefficient = coeff;
    }
    return rep;
}

}  // namespace pwc
