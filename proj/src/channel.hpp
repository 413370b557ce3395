// Poisson wiretap channel primitives: channel laws, output kernels,
// mutual-information densities, and rates for finitely supported inputs.
//
// All probability arithmetic is carried out in log space; rates are in
// nats/second (the slot duration divides every per-slot quantity).
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pwc {

// Error taxonomy shared by the whole library; mirrored by the C API codes.
enum class errc {
    ok = 0,
    invalid_argument,
    not_degraded,
    unsupported_regime,
    truncation_overflow,
    solver_stall,
    undefined_multiplier,
    numeric_failure,
};

class error : public std::runtime_error {
  public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

// Gains and dark-current rates of the two receivers plus the slot duration.
struct ChannelParams {
    double alpha_b = 1.0;   // legitimate-channel gain, > 0
    double lambda_b = 1.0;  // legitimate dark current (photons/second), > 0
    double alpha_e = 1.0;   // eavesdropper gain, > 0
    double lambda_e = 1.0;  // eavesdropper dark current, > 0
    double delta = 1.0;     // slot duration (seconds), > 0

    void validate() const;

    // Stochastic degradedness: alpha_b >= alpha_e and
    // lambda_b/alpha_b <= lambda_e/alpha_e with at least one strict.
    bool is_degraded() const;

    // Weak closure of the degradedness cone (identical channels allowed).
    bool is_weakly_degraded() const;

    bool identical_channels() const;
};

// Peak and/or average intensity bounds.  At least one must be present; when
// both are, an average above the peak is vacuous and clamped to it.
struct IntensityConstraints {
    std::optional<double> peak;     // A
    std::optional<double> average;  // E

    void validate_and_normalize();
    bool average_binding() const;  // average present and strictly below peak
};

struct TruncationPolicy {
    double epsilon_tail = 1e-12;
    long y_max_cap = 100000;

    void validate() const;
};

// Finitely supported input distribution with strictly increasing locations.
struct DiscreteDistribution {
    std::vector<double> location;
    std::vector<double> weight;

    std::size_t size() const { return location.size(); }
    double mean() const;
    void validate(const IntensityConstraints* constraints = nullptr) const;
};

// log of the Poisson pmf e^{-mean} mean^y / y!.  mean = 0 is the unit mass
// at y = 0 (log-zero sentinel, -inf, for y > 0).
double poisson_log_pmf(double mean, long y);

// Smallest index whose true upper tail mass is below policy.epsilon_tail,
// found by cumulative summation of the pmf; always >= mean.
long truncation_index(double mean, const TruncationPolicy& policy);

enum class Receiver { legitimate, eavesdropper };

// log g(y; F) = log sum_i p_i exp(-alpha x_i delta) [(alpha x_i + lambda) delta]^y,
// accumulated with log-sum-exp.  Output pmf: log P_Y = -lambda*delta + log g - log y!.
double g_kernel(Receiver side, long y, const DiscreteDistribution& dist,
                const ChannelParams& params);

struct MiDensities {
    double i_b;  // legitimate mutual-information density, nats/second
    double i_e;  // eavesdropper mutual-information density, nats/second
    double c_s;  // secrecy-rate density i_b - i_e, nats/second
};

MiDensities mi_densities(double x, const DiscreteDistribution& dist,
                         const ChannelParams& params, const TruncationPolicy& policy);

struct Rates {
    double i_b;  // I(X;Y), nats/second
    double i_e;  // I(X;Z), nats/second
    double f0;   // I(X;Y) - I(X;Z), nats/second
};

Rates rates(const DiscreteDistribution& dist, const ChannelParams& params,
            const TruncationPolicy& policy);

namespace detail {

// Numerically stable log(sum exp(v)) over a span with optional log-weights.
double log_sum_exp(const std::vector<double>& v);

// Precomputed per-receiver tables for one support: conditional log-pmfs of
// every mass point over a shared truncated output range, refreshed per-weight
// quantities (output law, kernel logs).  This is the optimizer's workhorse;
// the public functions above are thin wrappers over the same arithmetic.
class SideTables {
  public:
    SideTables(Receiver side, const std::vector<double>& locations,
               const ChannelParams& params, const TruncationPolicy& policy,
               double peak);

    long y_count() const { return y_count_; }
    double alpha() const { return alpha_; }

    // Refresh the output law log P_Y and kernel log g for given weights.
    void set_weights(const std::vector<double>& weights);

    // KL-form densities d_j = (1/delta) sum_y p(y|x_j) log[p(y|x_j)/P_Y(y)]
    // for every support point, using current weights.
    void densities_on_support(std::vector<double>& out) const;

    // Density at an arbitrary x in [0, peak] via the kernel form.
    double density_at(double x) const;

    // d/dx of density_at, via the Poisson shift identity:
    // i'(x) = alpha [ log((alpha x + lambda) delta) - sum_y p(y|x)(log g(y+1) - log g(y)) ].
    double density_derivative_at(double x) const;

    // Negated information matrix H_jk = -(1/delta) sum_y p(y|x_j) p(y|x_k) / P_Y(y).
    void hessian(std::vector<double>& out) const;

    double mean_of(double x) const { return (alpha_ * x + lambda_) * delta_; }

  private:
    double alpha_, lambda_, delta_;
    long y_count_;                     // truncation_index(max mean) + 1 extra rows
    std::size_t n_;                    // support size
    std::vector<double> cond_log_pmf_; // n_ x y_count_, row-major
    std::vector<double> cond_pmf_;     // exp of the above
    std::vector<double> log_py_;       // y_count_
    std::vector<double> py_;           // exp of the above
    std::vector<double> log_g_;        // y_count_ + 1 (shifted access needs one extra)
    std::vector<double> log_means_;    // log of each point's output mean
    std::vector<double> exp_terms_;    // -alpha x_i delta per point
};

}  // namespace detail

}  // namespace pwc
