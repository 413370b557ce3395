// Rate-equivocation boundary tracing: sweep the tangent weighting mu through
// the solver and compare the endpoint distributions for a tradeoff.
#pragma once

#include "optimizer.hpp"

namespace pwc {

struct RegionPoint {
    double mu = 0;
    double rate_R = 0;           // I(X;Y) at the mu-optimal distribution, nats/second
    double equivocation_Re = 0;  // I(X;Y) - I(X;Z) there, nats/second
    DiscreteDistribution dist;
};

// Solves each mu in the (ordered) grid, warm-starting from the previous
// distribution; returns points sorted by mu.  Solver failures carry the
// offending mu in the message.
std::vector<RegionPoint> trace_boundary(const ChannelParams& params,
                                        const IntensityConstraints& constraints,
                                        const std::vector<double>& mu_grid,
                                        const SolverConfig& config,
                                        const TruncationPolicy& policy);

// True iff the mu=0 and mu=1 distributions differ beyond tol in any matched
// location or weight (mass points matched in support order; a support-size
// mismatch is itself a difference).  Both endpoints must be present.
bool detect_tradeoff(const std::vector<RegionPoint>& points, double tol);

}  // namespace pwc
