#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "region.hpp"
#include "reference_values.hpp"

#include <cmath>
#include <string>

using namespace pwc;

namespace {

ChannelParams base_params() { return {2.0, 1.0, 1.0, 2.0, 0.5}; }

IntensityConstraints peak_avg(double a, double e) {
    IntensityConstraints c;
    c.peak = a;
    c.average = e;
    return c;
}

}  // namespace

TEST_CASE("boundary is monotone and concave with consistent endpoints") {
    SolverConfig cfg;
    TruncationPolicy pol;
    std::vector<double> grid = {0.0, 0.25, 0.5, 0.75, 1.0};
    auto pts = trace_boundary(base_params(), peak_avg(4.0, 1.0), grid, cfg, pol);
    REQUIRE(pts.size() == grid.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i].mu == grid[i]);
        CHECK(pts[i].equivocation_Re <= pts[i].rate_R + 1e-12);
        CHECK(pts[i].equivocation_Re >= 0.0);
        pts[i].dist.validate(nullptr);
        CHECK(pts[i].dist.mean() <= 1.0 + 1e-9);
    }
    // R nondecreasing, Re nonincreasing along increasing mu
    for (std::size_t i = 1; i < pts.size(); ++i) {
        CHECK(pts[i].rate_R >= pts[i - 1].rate_R - 1e-9);
        CHECK(pts[i].equivocation_Re <= pts[i - 1].equivocation_Re + 1e-9);
    }
    // concavity of the upper boundary Re(R): interior chord slopes decrease
    for (std::size_t i = 2; i < pts.size(); ++i) {
        const double dr1 = pts[i - 1].rate_R - pts[i - 2].rate_R;
        const double dr2 = pts[i].rate_R - pts[i - 1].rate_R;
        if (dr1 < 1e-10 || dr2 < 1e-10) continue;  // vertical segment
        const double s1 = (pts[i - 1].equivocation_Re - pts[i - 2].equivocation_Re) / dr1;
        const double s2 = (pts[i].equivocation_Re - pts[i - 1].equivocation_Re) / dr2;
        CHECK(s2 <= s1 + 1e-6);
    }
    // endpoints agree with direct solves
    SolveResult s0 = solve(0.0, base_params(), peak_avg(4.0, 1.0), cfg, pol);
    SolveResult s1 = solve(1.0, base_params(), peak_avg(4.0, 1.0), cfg, pol);
    CHECK(pts.front().equivocation_Re == doctest::Approx(s0.objective).epsilon(1e-9));
    CHECK(pts.back().rate_R == doctest::Approx(s1.objective).epsilon(1e-9));
    CHECK(pts.front().equivocation_Re == doctest::Approx(0.49611601).epsilon(1e-6));
    CHECK(pts.back().rate_R == doctest::Approx(ref::rate_i_b).epsilon(1e-6));
}

TEST_CASE("tradeoff detection distinguishes the two constraint geometries") {
    SolverConfig cfg;
    TruncationPolicy pol;
    std::vector<double> ends = {0.0, 1.0};

    // A=4, E=1: the secrecy-optimal and rate-optimal inputs differ
    auto pts4 = trace_boundary(base_params(), peak_avg(4.0, 1.0), ends, cfg, pol);
    CHECK(detect_tradeoff(pts4, 1e-3));

    // A=3, E=0.75: one distribution attains both extremes simultaneously
    auto pts3 = trace_boundary(base_params(), peak_avg(3.0, 0.75), ends, cfg, pol);
    CHECK_FALSE(detect_tradeoff(pts3, 1e-3));
    REQUIRE(pts3.front().dist.size() == pts3.back().dist.size());
    for (std::size_t i = 0; i < pts3.front().dist.size(); ++i) {
        CHECK(std::fabs(pts3.front().dist.location[i] -
                        pts3.back().dist.location[i]) < 1e-3);
        CHECK(std::fabs(pts3.front().dist.weight[i] -
                        pts3.back().dist.weight[i]) < 1e-3);
    }
}

TEST_CASE("single-point grid matches a direct solve") {
    SolverConfig cfg;
    TruncationPolicy pol;
    auto pts = trace_boundary(base_params(), peak_avg(4.0, 1.0), {0.0}, cfg, pol);
    REQUIRE(pts.size() == 1);
    SolveResult s = solve(0.0, base_params(), peak_avg(4.0, 1.0), cfg, pol);
    CHECK(pts[0].equivocation_Re == doctest::Approx(s.objective).epsilon(1e-10));
    Rates r = rates(s.dist, base_params(), pol);
    CHECK(pts[0].rate_R == doctest::Approx(r.i_b).epsilon(1e-10));
}

TEST_CASE("grid validation") {
    SolverConfig cfg;
    TruncationPolicy pol;
    auto cons = peak_avg(4.0, 1.0);
    CHECK_THROWS_AS(trace_boundary(base_params(), cons, {}, cfg, pol), error);
    CHECK_THROWS_AS(trace_boundary(base_params(), cons, {0.0, 0.0}, cfg, pol), error);
    CHECK_THROWS_AS(trace_boundary(base_params(), cons, {0.5, 0.25}, cfg, pol), error);
    CHECK_THROWS_AS(trace_boundary(base_params(), cons, {-0.1, 0.5}, cfg, pol), error);
    CHECK_THROWS_AS(trace_boundary(base_params(), cons, {0.5, 1.5}, cfg, pol), error);
}

TEST_CASE("solver failures carry the offending mu") {
    SolverConfig cfg;
    TruncationPolicy pol;
    IntensityConstraints avg_only;
    avg_only.average = 1.0;  // unsupported without a peak
    try {
        trace_boundary(base_params(), avg_only, {0.0, 1.0}, cfg, pol);
        CHECK(false);
    } catch (const error& e) {
        CHECK(std::string(e.what()).find("mu=0") != std::string::npos);
    }
}

TEST_CASE("tradeoff detection requires both endpoints") {
    SolverConfig cfg;
    TruncationPolicy pol;
    auto pts = trace_boundary(base_params(), peak_avg(4.0, 1.0), {0.0, 0.5}, cfg, pol);
    CHECK_THROWS_AS(detect_tradeoff(pts, 1e-3), error);
    CHECK_THROWS_AS(detect_tradeoff({}, 1e-3), error);
}

TEST_CASE("identical channels give zero equivocation everywhere") {
    SolverConfig cfg;
    TruncationPolicy pol;
    ChannelParams same{1.0, 1.0, 1.0, 1.0, 0.5};
    auto pts = trace_boundary(same, peak_avg(3.0, 1.0), {0.0, 0.5, 1.0}, cfg, pol);
    for (const auto& p : pts) {
        CHECK(p.equivocation_Re == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(p.equivocation_Re <= p.rate_R + 1e-12);
    }
    // mu=1 still maximizes the main-channel rate
    CHECK(pts.back().rate_R > 0.1);
}
