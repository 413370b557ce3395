// Maximization of the weighted secrecy objective
//   f_mu = mu*I(X;Y) + (1-mu)*(I(X;Y) - I(X;Z))
// over finitely supported distributions on [0, A] under an optional average
// intensity bound, certified by the density KKT conditions.
#pragma once

#include "channel.hpp"

namespace pwc {

struct SolverConfig {
    double kkt_tol = 1e-6;       // max admissible certificate violation, nats/second
    long grid_size = 2001;       // uniform certificate grid on [0, A]
    double merge_tol = 1e-4;     // min mass-point separation, fraction of A
    double weight_floor = 1e-9;  // weights below this are dropped
    std::size_t max_support = 64;
    long max_outer_iters = 200;

    void validate() const;
};

struct KktReport {
    double gamma = 0;              // average-constraint multiplier, >= 0
    double max_violation = 0;      // max over grid of slack excess above the bound
    double equality_residual = 0;  // max |slack - bound| over the mass points
    double argmax_x = 0;           // abscissa attaining max_violation
    std::vector<double> grid_x;
    std::vector<double> grid_slack;  // bound - s(x); nonnegative when certified

    bool certified(double kkt_tol) const {
        return max_violation <= kkt_tol && equality_residual <= kkt_tol;
    }
};

struct SolveResult {
    DiscreteDistribution dist;
    double objective = 0;  // f_mu at dist, nats/second
    double gamma = 0;
    KktReport kkt;
    long iterations = 0;
    double mu = 0;
};

// Optimal weights for a fixed support: projected ascent over the simplex with
// the average constraint handled by a scalar dual search on gamma, then a
// Newton polish.  Returns the weights, the multiplier (0 when the average
// constraint is slack), and the attained objective.
struct WeightsResult {
    std::vector<double> weights;
    double gamma = 0;
    double objective = 0;
};
WeightsResult optimize_weights(const std::vector<double>& locations, double mu,
                               const ChannelParams& params,
                               const IntensityConstraints& constraints,
                               const SolverConfig& config, const TruncationPolicy& policy,
                               const std::vector<double>* warm = nullptr);

// Coordinate-wise golden-section location refinement at fixed weights (upward
// moves capped by the average-intensity budget), then re-optimized weights.
// The objective never decreases.  The origin point is pinned.
SolveResult refine_locations(const SolveResult& current, double mu,
                             const ChannelParams& params,
                             const IntensityConstraints& constraints,
                             const SolverConfig& config, const TruncationPolicy& policy);

// Independent certificate check: evaluates the weighted density minus gamma*x
// over the uniform grid plus 21-point refinement windows around each mass
// point and the worst violation, and reports slack against the bound
// f_mu(F) - gamma*E.
KktReport kkt_verify(const DiscreteDistribution& dist, double gamma, double mu,
                     const ChannelParams& params, const IntensityConstraints& constraints,
                     const SolverConfig& config, const TruncationPolicy& policy);

// Least-squares multiplier making the density slack constant across the mass
// points; clamped at 0 when the average constraint is slack.
double estimate_gamma(const DiscreteDistribution& dist, double mu,
                      const ChannelParams& params, const IntensityConstraints& constraints,
                      const TruncationPolicy& policy);

// Full solve: support escalation from {0, A} with certificate-driven insertion,
// merge/floor hygiene, and a terminal consolidation + stationarity polish.
SolveResult solve(double mu, const ChannelParams& params,
                  const IntensityConstraints& constraints, const SolverConfig& config,
                  const TruncationPolicy& policy,
                  const DiscreteDistribution* warm_start = nullptr);

}  // namespace pwc
