#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "channel.hpp"
#include "reference_values.hpp"

#include <cmath>
#include <random>

using namespace pwc;

namespace {

ChannelParams base_params() { return {2.0, 1.0, 1.0, 2.0, 0.5}; }

DiscreteDistribution binary(double x1, double w0) {
    DiscreteDistribution d;
    d.location = {0.0, x1};
    d.weight = {w0, 1.0 - w0};
    return d;
}

}  // namespace

TEST_CASE("poisson log-pmf matches high-precision references") {
    CHECK(poisson_log_pmf(1.0, 0) == doctest::Approx(ref::log_pmf_1_0).epsilon(1e-15));
    CHECK(poisson_log_pmf(10.5, 25) ==
          doctest::Approx(ref::log_pmf_10p5_25).epsilon(1e-14));
    CHECK(std::exp(poisson_log_pmf(3.0, 3)) ==
          doctest::Approx(9.0 / 2.0 * std::exp(-3.0) / 1.0).epsilon(1e-13));
}

TEST_CASE("truncation index covers all but the admissible tail") {
    TruncationPolicy pol;
    CHECK(truncation_index(1.0, pol) == ref::trunc_mean1);
    CHECK(truncation_index(21.0, pol) == ref::trunc_mean21);
    // never below the mean, grows as the tail allowance shrinks
    TruncationPolicy loose;
    loose.epsilon_tail = 1e-6;
    CHECK(truncation_index(21.0, loose) <= ref::trunc_mean21);
    CHECK(truncation_index(21.0, loose) >= 21);
}

TEST_CASE("truncation cap violations are reported") {
    TruncationPolicy tight;
    tight.y_max_cap = 10;
    CHECK_THROWS_AS(truncation_index(50.0, tight), error);
    try {
        truncation_index(50.0, tight);
    } catch (const error& e) {
        CHECK(e.code() == errc::truncation_overflow);
    }
}

TEST_CASE("parameter validation") {
    ChannelParams p = base_params();
    CHECK_NOTHROW(p.validate());
    p.alpha_b = 0;
    CHECK_THROWS_AS(p.validate(), error);
    p = base_params();
    p.delta = -1;
    CHECK_THROWS_AS(p.validate(), error);
    p = base_params();
    p.lambda_e = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(p.validate(), error);
}

TEST_CASE("degradedness predicates") {
    CHECK(base_params().is_degraded());
    ChannelParams rev{1.0, 2.0, 2.0, 1.0, 0.5};  // roles swapped
    CHECK_FALSE(rev.is_degraded());
    ChannelParams same{1.0, 1.0, 1.0, 1.0, 0.5};  // identical channels
    CHECK_FALSE(same.is_degraded());
    CHECK(same.is_weakly_degraded());
    CHECK(same.identical_channels());
    // equal gains, higher eavesdropper dark current: degraded
    ChannelParams eq{1.0, 1.0, 1.0, 2.0, 0.5};
    CHECK(eq.is_degraded());
    // noisier legitimate dark-current ratio: not degraded
    ChannelParams bad{2.0, 3.0, 1.0, 1.0, 0.5};
    CHECK_FALSE(bad.is_degraded());
}

TEST_CASE("distribution validation") {
    DiscreteDistribution d = binary(3.0, 0.75);
    CHECK_NOTHROW(d.validate());
    CHECK(d.mean() == doctest::Approx(0.75).epsilon(1e-15));

    DiscreteDistribution unsorted;
    unsorted.location = {3.0, 0.0};
    unsorted.weight = {0.5, 0.5};
    CHECK_THROWS_AS(unsorted.validate(), error);

    DiscreteDistribution badsum = binary(3.0, 0.75);
    badsum.weight[1] = 0.5;
    CHECK_THROWS_AS(badsum.validate(), error);

    IntensityConstraints cons;
    cons.peak = 2.0;
    CHECK_THROWS_AS(binary(3.0, 0.75).validate(&cons), error);
    cons.peak = 3.0;
    cons.average = 0.5;
    CHECK_THROWS_AS(binary(3.0, 0.75).validate(&cons), error);
    cons.average = 0.75;
    CHECK_NOTHROW(binary(3.0, 0.75).validate(&cons));
}

TEST_CASE("constraints validation") {
    IntensityConstraints none;
    CHECK_THROWS_AS(none.validate_and_normalize(), error);
    IntensityConstraints neg;
    neg.peak = -1.0;
    CHECK_THROWS_AS(neg.validate_and_normalize(), error);
    IntensityConstraints both;
    both.peak = 2.0;
    both.average = 3.0;  // slack beyond the peak: normalizes to peak-only behavior
    CHECK_NOTHROW(both.validate_and_normalize());
    CHECK_FALSE(both.average_binding());
}

TEST_CASE("mixture kernel matches the reference") {
    const double lg = g_kernel(Receiver::legitimate, 2, binary(3.0, 0.75), base_params());
    CHECK(lg == doctest::Approx(ref::log_g_b_y2).epsilon(1e-13));
}

TEST_CASE("information densities match the reference") {
    // The default tail bound (1e-12) leaves ~2e-11 relative truncation error;
    // tightening it recovers the exact value.
    MiDensities d =
        mi_densities(3.0, binary(3.0, 0.75), base_params(), TruncationPolicy{});
    CHECK(d.i_b == doctest::Approx(ref::i_b_at3).epsilon(1e-9));
    CHECK(d.i_e == doctest::Approx(ref::i_e_at3).epsilon(1e-9));
    CHECK(d.c_s == doctest::Approx(ref::c_s_at3).epsilon(1e-9));
    CHECK(d.c_s == doctest::Approx(d.i_b - d.i_e).epsilon(1e-13));

    TruncationPolicy tight;
    tight.epsilon_tail = 1e-15;
    MiDensities dt = mi_densities(3.0, binary(3.0, 0.75), base_params(), tight);
    CHECK(dt.i_b == doctest::Approx(ref::i_b_at3).epsilon(1e-12));
    CHECK(dt.i_e == doctest::Approx(ref::i_e_at3).epsilon(1e-12));
    CHECK(dt.c_s == doctest::Approx(ref::c_s_at3).epsilon(1e-12));
}

TEST_CASE("rates match the reference") {
    Rates r = rates(binary(4.0, 0.75), base_params(), TruncationPolicy{});
    CHECK(r.i_b == doctest::Approx(ref::rate_i_b).epsilon(1e-12));
    CHECK(r.i_e == doctest::Approx(ref::rate_i_e).epsilon(1e-12));
    CHECK(r.f0 == doctest::Approx(ref::rate_f0).epsilon(1e-12));
}

TEST_CASE("density form agrees with the definitional KL sum") {
    // Independent evaluation: i(x) = (1/delta) * sum_y P(y|x) log(P(y|x)/P_Y(y)).
    std::mt19937 rng(20240811u);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        ChannelParams p;
        p.alpha_e = 0.3 + unif(rng);
        p.alpha_b = p.alpha_e * (1.0 + unif(rng));
        p.lambda_b = 0.3 + unif(rng);
        p.lambda_e = p.lambda_b * p.alpha_e / p.alpha_b * (1.0 + unif(rng)) +
                     p.lambda_b * p.alpha_e / p.alpha_b * 0.01;
        p.delta = 0.25 + unif(rng);
        const double A = 1.0 + 4.0 * unif(rng);
        DiscreteDistribution d;
        const int n = 2 + static_cast<int>(unif(rng) * 4);
        std::vector<double> cuts;
        for (int i = 1; i < n; ++i) cuts.push_back(A * (i + unif(rng) * 0.5) / n);
        d.location.push_back(0.0);
        for (double c : cuts) d.location.push_back(c);
        double wsum = 0;
        for (int i = 0; i < n; ++i) {
            d.weight.push_back(0.05 + unif(rng));
            wsum += d.weight.back();
        }
        for (double& w : d.weight) w /= wsum;
        const double x = A * unif(rng);

        TruncationPolicy pol;
        MiDensities got = mi_densities(x, d, p, pol);

        for (int side = 0; side < 2; ++side) {
            const double alpha = side == 0 ? p.alpha_b : p.alpha_e;
            const double lambda = side == 0 ? p.lambda_b : p.lambda_e;
            const Receiver rec = side == 0 ? Receiver::legitimate : Receiver::eavesdropper;
            const double top = std::max(x, d.location.back());
            const long y_max = truncation_index((alpha * top + lambda) * p.delta, pol);
            const double mean = (alpha * x + lambda) * p.delta;
            double kl = 0;
            for (long y = 0; y <= y_max; ++y) {
                const double lp = poisson_log_pmf(mean, y);
                const double lq = -lambda * p.delta + g_kernel(rec, y, d, p) -
                                  std::lgamma(static_cast<double>(y) + 1.0);
                kl += std::exp(lp) * (lp - lq);
            }
            kl /= p.delta;
            const double want = side == 0 ? got.i_b : got.i_e;
            CHECK(want == doctest::Approx(kl).epsilon(2e-10));
        }
    }
}

TEST_CASE("identical channels carry zero secrecy density") {
    ChannelParams same{1.5, 0.8, 1.5, 0.8, 0.5};
    MiDensities d = mi_densities(2.0, binary(3.0, 0.6), same, TruncationPolicy{});
    CHECK(d.c_s == doctest::Approx(0.0).epsilon(1e-14));
    Rates r = rates(binary(3.0, 0.6), same, TruncationPolicy{});
    CHECK(r.f0 == doctest::Approx(0.0).epsilon(1e-14));
}
