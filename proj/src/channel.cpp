#include "channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pwc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require(bool cond, errc code, const std::string& msg) {
    if (!cond) throw error(code, msg);
}

}  // namespace

void ChannelParams::validate() const {
    require(alpha_b > 0 && alpha_e > 0, errc::invalid_argument,
            "channel gains must be strictly positive");
    require(lambda_b > 0 && lambda_e > 0, errc::invalid_argument,
            "dark-current rates must be strictly positive");
    require(delta > 0, errc::invalid_argument, "slot duration must be strictly positive");
    require(std::isfinite(alpha_b) && std::isfinite(lambda_b) && std::isfinite(alpha_e) &&
                std::isfinite(lambda_e) && std::isfinite(delta),
            errc::invalid_argument, "channel parameters must be finite");
}

bool ChannelParams::is_weakly_degraded() const {
    return alpha_b >= alpha_e && lambda_b / alpha_b <= lambda_e / alpha_e;
}

bool ChannelParams::is_degraded() const {
    return is_weakly_degraded() &&
           (alpha_b > alpha_e || lambda_b / alpha_b < lambda_e / alpha_e);
}

bool ChannelParams::identical_channels() const {
    return alpha_b == alpha_e && lambda_b == lambda_e;
}

void IntensityConstraints::validate_and_normalize() {
    require(peak.has_value() || average.has_value(), errc::invalid_argument,
            "at least one of the peak/average intensity bounds must be present");
    if (peak) {
        require(*peak > 0 && std::isfinite(*peak), errc::invalid_argument,
                "peak intensity bound must be positive and finite");
    }
    if (average) {
        require(*average > 0 && std::isfinite(*average), errc::invalid_argument,
                "average intensity bound must be positive and finite");
        if (peak && *average > *peak) average = *peak;  // vacuous bound, clamp
    }
}

bool IntensityConstraints::average_binding() const {
    return average.has_value() && (!peak.has_value() || *average < *peak);
}

void TruncationPolicy::validate() const {
    require(epsilon_tail > 0 && epsilon_tail < 1, errc::invalid_argument,
            "tail tolerance must lie in (0,1)");
    require(y_max_cap > 0, errc::invalid_argument, "summation cap must be positive");
}

double DiscreteDistribution::mean() const {
    double m = 0;
    for (std::size_t i = 0; i < location.size(); ++i) m += weight[i] * location[i];
    return m;
}

void DiscreteDistribution::validate(const IntensityConstraints* constraints) const {
    require(!location.empty(), errc::invalid_argument, "distribution has no mass points");
    require(location.size() == weight.size(), errc::invalid_argument,
            "location/weight length mismatch");
    double sum = 0;
    for (std::size_t i = 0; i < location.size(); ++i) {
        require(location[i] >= 0 && std::isfinite(location[i]), errc::invalid_argument,
                "locations must be finite and nonnegative");
        require(weight[i] > 0 && weight[i] <= 1, errc::invalid_argument,
                "weights must lie in (0,1]");
        if (i > 0)
            require(location[i] > location[i - 1], errc::invalid_argument,
                    "locations must be strictly increasing");
        sum += weight[i];
    }
    require(std::fabs(sum - 1.0) <= 1e-12 * location.size() + 1e-12, errc::invalid_argument,
            "weights must sum to one");
    if (constraints && constraints->peak)
        require(location.back() <= *constraints->peak * (1 + 1e-12), errc::invalid_argument,
                "a mass point exceeds the peak intensity bound");
    if (constraints && constraints->average)
        require(mean() <= *constraints->average + 1e-9, errc::invalid_argument,
                "the distribution mean exceeds the average intensity bound");
}

double poisson_log_pmf(double mean, long y) {
    require(mean >= 0 && std::isfinite(mean), errc::invalid_argument,
            "Poisson mean must be finite and nonnegative");
    require(y >= 0, errc::invalid_argument, "Poisson count must be nonnegative");
    if (mean == 0) return y == 0 ? 0.0 : kNegInf;
    return -mean + static_cast<double>(y) * std::log(mean) - std::lgamma(y + 1.0);
}

long truncation_index(double mean, const TruncationPolicy& policy) {
    policy.validate();
    require(mean >= 0 && std::isfinite(mean), errc::invalid_argument,
            "Poisson mean must be finite and nonnegative");
    if (mean == 0) return 0;

    const double target = 1.0 - policy.epsilon_tail;
    const long floor_index = static_cast<long>(std::ceil(mean));
    const bool small = mean < 700;  // linear-space pmf recurrence stays normal
    double term = small ? std::exp(-mean) : 0.0;
    double cum = 0, comp = 0;  // Kahan accumulation of the cumulative pmf
    for (long y = 0; y <= policy.y_max_cap; ++y) {
        if (!small) term = std::exp(poisson_log_pmf(mean, y));
        double t = term - comp;
        double s = cum + t;
        comp = (s - cum) - t;
        cum = s;
        if (cum >= target && y >= floor_index) return y;
        if (small) term *= mean / static_cast<double>(y + 1);
    }
    throw error(errc::truncation_overflow,
                "truncation index for Poisson mean " + std::to_string(mean) +
                    " exceeds the summation cap " + std::to_string(policy.y_max_cap));
}

double g_kernel(Receiver side, long y, const DiscreteDistribution& dist,
                const ChannelParams& params) {
    params.validate();
    dist.validate();
    require(y >= 0, errc::invalid_argument, "kernel index must be nonnegative");
    const double alpha = side == Receiver::legitimate ? params.alpha_b : params.alpha_e;
    const double lambda = side == Receiver::legitimate ? params.lambda_b : params.lambda_e;
    std::vector<double> terms(dist.size());
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const double m = (alpha * dist.location[i] + lambda) * params.delta;
        terms[i] = std::log(dist.weight[i]) - alpha * dist.location[i] * params.delta +
                   static_cast<double>(y) * std::log(m);
    }
    return detail::log_sum_exp(terms);
}

namespace detail {

double log_sum_exp(const std::vector<double>& v) {
    double mx = kNegInf;
    for (double t : v) mx = std::max(mx, t);
    if (mx == kNegInf) return kNegInf;
    double s = 0;
    for (double t : v) s += std::exp(t - mx);
    return mx + std::log(s);
}

SideTables::SideTables(Receiver side, const std::vector<double>& locations,
                       const ChannelParams& params, const TruncationPolicy& policy,
                       double peak)
    : alpha_(side == Receiver::legitimate ? params.alpha_b : params.alpha_e),
      lambda_(side == Receiver::legitimate ? params.lambda_b : params.lambda_e),
      delta_(params.delta),
      n_(locations.size()) {
    double top = peak;
    for (double x : locations) top = std::max(top, x);
    y_count_ = truncation_index((alpha_ * top + lambda_) * delta_, policy) + 1;

    cond_log_pmf_.assign(n_ * y_count_, 0.0);
    cond_pmf_.assign(n_ * y_count_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        const double m = mean_of(locations[i]);
        const double logm = std::log(m);
        double lf = 0;  // log y!
        for (long y = 0; y < y_count_; ++y) {
            if (y > 0) lf += std::log(static_cast<double>(y));
            const double lp = -m + static_cast<double>(y) * logm - lf;
            cond_log_pmf_[i * y_count_ + y] = lp;
            cond_pmf_[i * y_count_ + y] = std::exp(lp);
        }
    }
    log_py_.assign(y_count_, 0.0);
    log_g_.assign(y_count_ + 1, 0.0);
    exp_terms_.assign(n_, 0.0);
    log_means_.assign(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        exp_terms_[i] = -alpha_ * locations[i] * delta_;
        log_means_[i] = std::log(mean_of(locations[i]));
    }
}

void SideTables::set_weights(const std::vector<double>& weights) {
    std::vector<double> terms(n_);
    // Output law by log-sum-exp over the support, column by column.
    for (long y = 0; y < y_count_; ++y) {
        for (std::size_t i = 0; i < n_; ++i) {
            terms[i] = weights[i] > 0
                           ? std::log(weights[i]) + cond_log_pmf_[i * y_count_ + y]
                           : kNegInf;
        }
        log_py_[y] = log_sum_exp(terms);
    }
    // Kernel log g via log P_Y(y) = -lambda*delta + log g(y) - log y!, with one
    // extra index for the shift identity used by density_derivative_at.
    double lf = 0;
    for (long y = 0; y < y_count_; ++y) {
        if (y > 0) lf += std::log(static_cast<double>(y));
        log_g_[y] = log_py_[y] + lambda_ * delta_ + lf;
    }
    for (std::size_t i = 0; i < n_; ++i) {
        terms[i] = weights[i] > 0 ? std::log(weights[i]) + exp_terms_[i] +
                                        static_cast<double>(y_count_) * log_means_[i]
                                  : kNegInf;
    }
    log_g_[y_count_] = log_sum_exp(terms);
    py_.resize(y_count_);
    for (long y = 0; y < y_count_; ++y) py_[y] = std::exp(log_py_[y]);
}

void SideTables::densities_on_support(std::vector<double>& out) const {
    out.assign(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0;
        const double* lp = &cond_log_pmf_[i * y_count_];
        const double* p = &cond_pmf_[i * y_count_];
        for (long y = 0; y < y_count_; ++y) {
            if (p[y] > 0) s += p[y] * (lp[y] - log_py_[y]);
        }
        out[i] = s / delta_;
    }
}

double SideTables::density_at(double x) const {
    const double m = mean_of(x);
    const double logm = std::log(m);
    double s = 0;
    if (m < 700) {
        double term = std::exp(-m);
        for (long y = 0; y < y_count_; ++y) {
            s += term * log_g_[y];
            term *= m / static_cast<double>(y + 1);
        }
    } else {
        double lf = 0;
        for (long y = 0; y < y_count_; ++y) {
            if (y > 0) lf += std::log(static_cast<double>(y));
            s += std::exp(-m + static_cast<double>(y) * logm - lf) * log_g_[y];
        }
    }
    return (m / delta_) * logm - alpha_ * x - s / delta_;
}

double SideTables::density_derivative_at(double x) const {
    const double m = mean_of(x);
    const double logm = std::log(m);
    double s = 0;
    if (m < 700) {
        double term = std::exp(-m);
        for (long y = 0; y < y_count_; ++y) {
            s += term * (log_g_[y + 1] - log_g_[y]);
            term *= m / static_cast<double>(y + 1);
        }
    } else {
        double lf = 0;
        for (long y = 0; y < y_count_; ++y) {
            if (y > 0) lf += std::log(static_cast<double>(y));
            s += std::exp(-m + static_cast<double>(y) * logm - lf) *
                 (log_g_[y + 1] - log_g_[y]);
        }
    }
    return alpha_ * (logm - s);
}

void SideTables::hessian(std::vector<double>& out) const {
    out.assign(n_ * n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
        for (std::size_t k = j; k < n_; ++k) {
            double s = 0;
            const double* pj = &cond_pmf_[j * y_count_];
            const double* pk = &cond_pmf_[k * y_count_];
            for (long y = 0; y < y_count_; ++y) {
                if (py_[y] > 0) s += pj[y] * pk[y] / py_[y];
            }
            out[j * n_ + k] = out[k * n_ + j] = -s / delta_;
        }
    }
}

}  // namespace detail

MiDensities mi_densities(double x, const DiscreteDistribution& dist,
                         const ChannelParams& params, const TruncationPolicy& policy) {
    params.validate();
    policy.validate();
    dist.validate();
    require(x >= 0 && std::isfinite(x), errc::invalid_argument,
            "evaluation intensity must be finite and nonnegative");
    const double top = std::max(x, dist.location.back());
    detail::SideTables b(Receiver::legitimate, dist.location, params, policy, top);
    detail::SideTables e(Receiver::eavesdropper, dist.location, params, policy, top);
    b.set_weights(dist.weight);
    e.set_weights(dist.weight);
    MiDensities d;
    d.i_b = b.density_at(x);
    d.i_e = e.density_at(x);
    d.c_s = d.i_b - d.i_e;
    return d;
}

Rates rates(const DiscreteDistribution& dist, const ChannelParams& params,
            const TruncationPolicy& policy) {
    params.validate();
    policy.validate();
    dist.validate();
    detail::SideTables b(Receiver::legitimate, dist.location, params, policy,
                         dist.location.back());
    detail::SideTables e(Receiver::eavesdropper, dist.location, params, policy,
                         dist.location.back());
    b.set_weights(dist.weight);
    e.set_weights(dist.weight);
    std::vector<double> db, de;
    b.densities_on_support(db);
    e.densities_on_support(de);
    Rates r{0, 0, 0};
    for (std::size_t i = 0; i < dist.size(); ++i) {
        r.i_b += dist.weight[i] * db[i];
        r.i_e += dist.weight[i] * de[i];
    }
    r.f0 = r.i_b - r.i_e;
    return r;
}

}  // namespace pwc
