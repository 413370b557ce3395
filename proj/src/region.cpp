#include "region.hpp"

#include <cmath>

namespace pwc {

std::vector<RegionPoint> trace_boundary(const ChannelParams& params,
                                        const IntensityConstraints& constraints,
                                        const std::vector<double>& mu_grid,
                                        const SolverConfig& config,
                                        const TruncationPolicy& policy) {
    if (mu_grid.empty())
        throw error(errc::invalid_argument, "the mu grid must be non-empty");
    for (std::size_t i = 0; i < mu_grid.size(); ++i) {
        if (mu_grid[i] < 0 || mu_grid[i] > 1)
            throw error(errc::invalid_argument, "mu grid values must lie in [0,1]");
        if (i > 0 && mu_grid[i] <= mu_grid[i - 1])
            throw error(errc::invalid_argument, "mu grid values must be strictly increasing");
    }
    std::vector<RegionPoint> points;
    points.reserve(mu_grid.size());
    const DiscreteDistribution* warm = nullptr;
    for (double mu : mu_grid) {
        try {
            SolveResult r = solve(mu, params, constraints, config, policy, warm);
            RegionPoint pt;
            pt.mu = mu;
            Rates rt = rates(r.dist, params, policy);
            pt.rate_R = rt.i_b;
            pt.equivocation_Re = rt.f0;
            pt.dist = std::move(r.dist);
            points.push_back(std::move(pt));
            warm = &points.back().dist;
        } catch (const error& e) {
            throw error(e.code(), "mu=" + std::to_string(mu) + ": " + e.what());
        }
    }
    return points;
}

bool detect_tradeoff(const std::vector<RegionPoint>& points, double tol) {
    const RegionPoint* lo = nullptr;
    const RegionPoint* hi = nullptr;
    for (const RegionPoint& p : points) {
        if (p.mu == 0.0) lo = &p;
        if (p.mu == 1.0) hi = &p;
    }
    if (!lo || !hi)
        throw error(errc::invalid_argument,
                    "tradeoff detection needs both the mu=0 and mu=1 endpoints");
    if (tol < 0) throw error(errc::invalid_argument, "alignment tolerance must be >= 0");
    const DiscreteDistribution& a = lo->dist;
    const DiscreteDistribution& b = hi->dist;
    if (a.size() != b.size()) return true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::fabs(a.location[i] - b.location[i]) > tol) return true;
        if (std::fabs(a.weight[i] - b.weight[i]) > tol) return true;
    }
    return false;
}

}  // namespace pwc
