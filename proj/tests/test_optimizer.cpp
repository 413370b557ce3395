#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "optimizer.hpp"
#include "reference_values.hpp"

#include <cmath>

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

TEST_CASE("fixed-support weights reproduce the binary optimum") {
    SolverConfig cfg;
    TruncationPolicy pol;
    WeightsResult w =
        optimize_weights({0.0, 3.0}, 0.0, base_params(), peak_avg(3.0, 0.75), cfg, pol);
    CHECK(w.weights[0] == doctest::Approx(0.75).epsilon(1e-8));
    CHECK(w.weights[1] == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(w.gamma > 0);

    WeightsResult w1 =
        optimize_weights({0.0, 4.0}, 1.0, base_params(), peak_avg(4.0, 1.0), cfg, pol);
    CHECK(w1.weights[0] == doctest::Approx(0.75).epsilon(1e-8));
    CHECK(w1.weights[1] == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(w1.objective == doctest::Approx(ref::rate_i_b).epsilon(1e-9));
}

TEST_CASE("slack average constraint yields zero multiplier") {
    SolverConfig cfg;
    TruncationPolicy pol;
    WeightsResult w =
        optimize_weights({0.0, 3.0}, 0.0, base_params(), peak_avg(3.0, 3.0), cfg, pol);
    CHECK(w.gamma == 0.0);
    IntensityConstraints peak_only;
    peak_only.peak = 3.0;
    WeightsResult w2 =
        optimize_weights({0.0, 3.0}, 0.0, base_params(), peak_only, cfg, pol);
    CHECK(w2.gamma == 0.0);
    CHECK(w2.objective == doctest::Approx(w.objective).epsilon(1e-10));
}

TEST_CASE("weight optimization rejects malformed supports") {
    SolverConfig cfg;
    TruncationPolicy pol;
    CHECK_THROWS_AS(
        optimize_weights({1.0, 3.0}, 0.0, base_params(), peak_avg(3.0, 1.0), cfg, pol),
        error);  // origin missing
    CHECK_THROWS_AS(
        optimize_weights({0.0, 3.0, 2.0}, 0.0, base_params(), peak_avg(3.0, 1.0), cfg,
                         pol),
        error);  // unsorted
    CHECK_THROWS_AS(
        optimize_weights({0.0, 5.0}, 0.0, base_params(), peak_avg(3.0, 1.0), cfg, pol),
        error);  // beyond the peak
}

TEST_CASE("solver returns the known ternary optimum") {
    SolverConfig cfg;
    TruncationPolicy pol;
    SolveResult r = solve(0.0, base_params(), peak_avg(4.0, 1.0), cfg, pol);
    REQUIRE(r.dist.size() == 3);
    CHECK(r.dist.location[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.dist.location[1] == doctest::Approx(2.6848).epsilon(1e-3));
    CHECK(r.dist.location[2] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(r.dist.weight[0] == doctest::Approx(0.6884).epsilon(5e-3));
    CHECK(r.dist.weight[1] == doctest::Approx(0.1872).epsilon(5e-3));
    CHECK(r.dist.weight[2] == doctest::Approx(0.1244).epsilon(5e-3));
    CHECK(r.kkt.certified(cfg.kkt_tol));
    CHECK(r.objective == doctest::Approx(0.49611601).epsilon(1e-6));
    // result invariants
    CHECK(r.dist.mean() <= 1.0 + 1e-9);
    Rates rt = rates(r.dist, base_params(), pol);
    const double f_mu = rt.i_b - (1 - r.mu) * rt.i_e;
    CHECK(r.objective == doctest::Approx(f_mu).epsilon(1e-9));
}

TEST_CASE("certificate is sound and slack is nonnegative at the solution") {
    SolverConfig cfg;
    TruncationPolicy pol;
    SolveResult r = solve(0.0, base_params(), peak_avg(3.0, 0.75), cfg, pol);
    KktReport k =
        kkt_verify(r.dist, r.gamma, 0.0, base_params(), peak_avg(3.0, 0.75), cfg, pol);
    CHECK(k.max_violation <= cfg.kkt_tol);
    CHECK(k.equality_residual <= cfg.kkt_tol);
    REQUIRE(k.grid_x.size() == k.grid_slack.size());
    double min_slack = 1e300;
    for (std::size_t i = 1; i < k.grid_x.size(); ++i) {
        CHECK(k.grid_x[i] > k.grid_x[i - 1]);  // sorted, deduplicated
        min_slack = std::min(min_slack, k.grid_slack[i]);
    }
    CHECK(min_slack >= -cfg.kkt_tol);
    CHECK(-min_slack == doctest::Approx(k.max_violation).epsilon(1e-12));
}

TEST_CASE("suboptimal candidates fail verification") {
    SolverConfig cfg;
    TruncationPolicy pol;
    DiscreteDistribution half;
    half.location = {0.0, 10.0};
    half.weight = {0.5, 0.5};
    KktReport k = kkt_verify(half, 0.0513, 0.0, base_params(), peak_avg(10.0, 2.5),
                             cfg, pol);
    CHECK(k.max_violation > cfg.kkt_tol);

    DiscreteDistribution origin;
    origin.location = {0.0};
    origin.weight = {1.0};
    KktReport k0 = kkt_verify(origin, 0.0, 0.0, base_params(), peak_avg(10.0, 2.5),
                              cfg, pol);
    CHECK(k0.max_violation > cfg.kkt_tol);
    CHECK(k0.argmax_x > 0);
}

TEST_CASE("refinement never decreases the objective") {
    SolverConfig cfg;
    TruncationPolicy pol;
    IntensityConstraints peak_only;
    peak_only.peak = 4.0;
    // Peak-only optimum: {0, 2.0736, 4}, objective 0.58018190.  Perturb the
    // interior point and refine back; with no average bound the move is
    // uncapped, so recovery must strictly improve.
    for (double start : {1.6, 2.5}) {
        SolveResult cur;
        cur.dist.location = {0.0, start, 4.0};
        cur.mu = 0.0;
        WeightsResult w0 = optimize_weights(cur.dist.location, 0.0, base_params(),
                                            peak_only, cfg, pol);
        cur.dist.weight = w0.weights;
        cur.objective = w0.objective;
        cur.gamma = w0.gamma;
        SolveResult next =
            refine_locations(cur, 0.0, base_params(), peak_only, cfg, pol);
        CHECK(next.objective >= cur.objective - 1e-9);
        CHECK(next.objective > cur.objective + 1e-6);
        CHECK(std::fabs(next.dist.location[1] - 2.0736) <
              std::fabs(start - 2.0736));  // moved toward the optimum
        CHECK(next.dist.location[0] == 0.0);  // origin pinned
    }

    // With a binding average bound the headroom cap pins every location, so
    // refinement is a no-decrease fixed point; location moves then come from
    // support insertion and the terminal stationarity polish inside solve().
    SolveResult opt = solve(0.0, base_params(), peak_avg(4.0, 1.0), cfg, pol);
    SolveResult re =
        refine_locations(opt, 0.0, base_params(), peak_avg(4.0, 1.0), cfg, pol);
    CHECK(re.objective >= opt.objective - 1e-9);
    CHECK(re.dist.mean() <= 1.0 + 1e-9);
    for (std::size_t i = 0; i < opt.dist.size(); ++i)
        CHECK(std::fabs(re.dist.location[i] - opt.dist.location[i]) <=
              cfg.merge_tol * 4.0);
}

TEST_CASE("multiplier estimate matches the solver's multiplier") {
    SolverConfig cfg;
    TruncationPolicy pol;
    SolveResult r = solve(0.0, base_params(), peak_avg(4.0, 1.0), cfg, pol);
    const double g =
        estimate_gamma(r.dist, 0.0, base_params(), peak_avg(4.0, 1.0), pol);
    CHECK(g == doctest::Approx(r.gamma).epsilon(1e-4));

    // slack constraint: clamped at zero
    const double g0 =
        estimate_gamma(r.dist, 0.0, base_params(), peak_avg(4.0, 4.0), pol);
    CHECK(g0 == 0.0);

    DiscreteDistribution single;
    single.location = {0.0};
    single.weight = {1.0};
    CHECK_THROWS_AS(estimate_gamma(single, 0.0, base_params(), peak_avg(4.0, 1.0), pol),
                    error);
}

TEST_CASE("two-point multiplier fit is the exact slope") {
    TruncationPolicy pol;
    DiscreteDistribution d;
    d.location = {0.0, 3.0};
    d.weight = {0.75, 0.25};
    // constraint binds (mean = 0.75 = E)
    const double g = estimate_gamma(d, 0.0, base_params(), peak_avg(3.0, 0.75), pol);
    MiDensities a = mi_densities(0.0, d, base_params(), pol);
    MiDensities b = mi_densities(3.0, d, base_params(), pol);
    CHECK(g == doctest::Approx((b.c_s - a.c_s) / 3.0).epsilon(1e-10));
}

TEST_CASE("solver error taxonomy") {
    SolverConfig cfg;
    TruncationPolicy pol;
    // not degraded
    ChannelParams bad{1.0, 2.0, 2.0, 1.0, 0.5};
    CHECK_THROWS_AS(solve(0.0, bad, peak_avg(3.0, 1.0), cfg, pol), error);
    try {
        solve(0.0, bad, peak_avg(3.0, 1.0), cfg, pol);
    } catch (const error& e) {
        CHECK(e.code() == errc::not_degraded);
    }
    // average-only: unsupported, message directs to the asymptotic laws
    IntensityConstraints avg_only;
    avg_only.average = 1.0;
    try {
        solve(0.0, base_params(), avg_only, cfg, pol);
        CHECK(false);
    } catch (const error& e) {
        CHECK(e.code() == errc::unsupported_regime);
        CHECK(std::string(e.what()).find("asymptotic") != std::string::npos);
    }
    // mu outside [0,1]
    CHECK_THROWS_AS(solve(1.5, base_params(), peak_avg(3.0, 1.0), cfg, pol), error);
}

TEST_CASE("identical channels solve to the degenerate origin input") {
    ChannelParams same{1.0, 1.0, 1.0, 1.0, 0.5};
    SolverConfig cfg;
    TruncationPolicy pol;
    SolveResult r = solve(0.0, same, peak_avg(3.0, 1.0), cfg, pol);
    REQUIRE(r.dist.size() == 1);
    CHECK(r.dist.location[0] == 0.0);
    CHECK(r.objective == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.kkt.certified(cfg.kkt_tol));
}

TEST_CASE("warm starts reach the same certified answer") {
    SolverConfig cfg;
    TruncationPolicy pol;
    SolveResult cold = solve(0.0, base_params(), peak_avg(4.0, 1.0), cfg, pol);
    DiscreteDistribution warm;
    warm.location = {0.0, 2.5, 4.0};
    warm.weight = {0.7, 0.2, 0.1};
    SolveResult warm_r = solve(0.0, base_params(), peak_avg(4.0, 1.0), cfg, pol, &warm);
    CHECK(warm_r.objective == doctest::Approx(cold.objective).epsilon(1e-8));
    REQUIRE(warm_r.dist.size() == cold.dist.size());
    for (std::size_t i = 0; i < cold.dist.size(); ++i)
        CHECK(warm_r.dist.location[i] ==
              doctest::Approx(cold.dist.location[i]).epsilon(1e-4));
}

TEST_CASE("repeated solves are bit-identical") {
    SolverConfig cfg;
    TruncationPolicy pol;
    SolveResult a = solve(0.0, base_params(), peak_avg(4.0, 1.0), cfg, pol);
    SolveResult b = solve(0.0, base_params(), peak_avg(4.0, 1.0), cfg, pol);
    REQUIRE(a.dist.size() == b.dist.size());
    for (std::size_t i = 0; i < a.dist.size(); ++i) {
        CHECK(a.dist.location[i] == b.dist.location[i]);
        CHECK(a.dist.weight[i] == b.dist.weight[i]);
    }
    CHECK(a.objective == b.objective);
    CHECK(a.gamma == b.gamma);
    CHECK(a.kkt.max_violation == b.kkt.max_violation);
}

TEST_CASE("origin membership and support bounds across instances") {
    SolverConfig cfg;
    TruncationPolicy pol;
    for (double mu : {0.0, 0.5, 1.0}) {
        for (double a : {1.0, 4.0}) {
            SolveResult r = solve(mu, base_params(), peak_avg(a, a / 4.0), cfg, pol);
            CHECK(r.dist.location.front() == 0.0);
            CHECK(r.dist.weight.front() >= cfg.weight_floor);
            CHECK(r.dist.location.back() <= a * (1 + 1e-12));
            CHECK(r.dist.size() <= 6);
        }
    }
}
