#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "vfsk/error.hpp"
#include "vfsk/gendiff1d.hpp"

using namespace vfsk;

TEST_CASE("uniform grid inserts zero and extra nodes") {
    const auto g = uniform_grid(-1.0, 2.0, 3);
    CHECK(g == std::vector<double>{-1.0, 0.0, 1.0, 2.0});
    const auto h = uniform_grid(-1.0, 1.0, 4, {0.3});
    CHECK(std::find(h.begin(), h.end(), 0.3) != h.end());
    CHECK(std::find(h.begin(), h.end(), 0.0) != h.end());
    CHECK(std::is_sorted(h.begin(), h.end()));
    const auto odd = uniform_grid(-1.0, 2.0, 7);
    CHECK(std::find(odd.begin(), odd.end(), 0.0) != odd.end());
    CHECK(std::adjacent_find(odd.begin(), odd.end(), std::greater_equal<>()) == odd.end());
    CHECK_THROWS_AS(uniform_grid(1.0, 1.0, 4), InvalidArgument);
}

TEST_CASE("scale and speed for constant coefficients") {
    const auto ss = compute_scale_speed(drifts::zero(), fields::constant(3.0), uniform_grid(-2.0, 2.0, 40));
    for (std::size_t i = 0; i < ss.size(); ++i) {
        CHECK(ss.u[i] == doctest::Approx(3.0 * ss.x[i]).scale(1.0).epsilon(1e-14));
        CHECK(ss.v[i] == doctest::Approx(6.0 * ss.x[i]).scale(1.0).epsilon(1e-14));
    }
    CHECK(ss.u_at(0.05) == doctest::Approx(0.15));
    CHECK(ss.node_index(0.0) == 20);
    CHECK_THROWS_AS(ss.node_index(0.05), InvalidArgument);
    CHECK_THROWS_AS(ss.u_at(3.0), InvalidArgument);

    const ExitStats e = exit_stats_analytic(ss, 1.0, 0.5, 0.0);
    CHECK(e.p_right == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
    // Brownian exit time a b scaled by the diffusion 1 / lambda^2.
    CHECK(e.mean_time == doctest::Approx(9.0 * 0.5).epsilon(1e-12));
    CHECK(e.n == 0);
}

TEST_CASE("scale function with drift matches the closed form") {
    const double b = 0.7;
    const auto ss = compute_scale_speed(drifts::constant({b, 0, 0}), fields::constant(1.0), uniform_grid(-1.0, 1.0, 4000));
    const ExitStats e = exit_stats_analytic(ss, 1.0, 1.0, 0.0);
    const double s = [&](double x) { return (1.0 - std::exp(-2.0 * b * x)) / (2.0 * b); }(1.0);
    const double sl = (1.0 - std::exp(2.0 * b)) / (2.0 * b);
    CHECK(e.p_right == doctest::Approx(-sl / (s - sl)).epsilon(1e-6));
    // Mean exit time from (-1, 1) for dq = b dt + dW started at 0.
    const double p = -sl / (s - sl);
    CHECK(e.mean_time == doctest::Approx((2.0 * p - 1.0) / b).epsilon(1e-5));
}

TEST_CASE("step friction: glued interface") {
    const double l1 = 1.0, l2 = 2.0;
    const auto ss = compute_scale_speed(drifts::zero(), fields::step(l1, l2), uniform_grid(-1.0, 1.0, 200));
    const ExitStats e = exit_stats_analytic(ss, 1.0, 1.0, 0.0);
    CHECK(e.p_right == doctest::Approx(glued_exit_probability(l1, l2, 1.0, 1.0)).epsilon(1e-13));
    CHECK(e.p_right == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(e.mean_time == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(glued_exit_probability(2.0, 1.0, 0.5, 1.5) == doctest::Approx(1.0 / 2.5));
    CHECK_THROWS_AS(glued_exit_probability(0.0, 1.0, 1.0, 1.0), InvalidArgument);

    CHECK_THROWS_WITH_AS(compute_scale_speed(drifts::zero(), fields::step(1, 2), {-1.0, -0.5, 0.25, 1.0}),
                         doctest::Contains("grid must contain 0"), InvalidArgument);
    CHECK_THROWS_AS(compute_scale_speed(drifts::zero(), fields::constant(1.0), {-1.0, 0.0, 0.0, 1.0}),
                    InvalidArgument);
}

TEST_CASE("chain exit statistics agree with the analytic values") {
    const auto ss = compute_scale_speed(drifts::constant({0.3, 0, 0}), fields::sinusoidal(2.0, 0.5, {1, 0, 0}),
                                        uniform_grid(-1.0, 1.0, 100));
    const ExitStats a = exit_stats_analytic(ss, 1.0, 1.0, 0.2);
    const ExitStats m = exit_stats_mc(ss, 1.0, 1.0, 0.2, 20000, 7, 1);
    CHECK(m.n == 20000);
    CHECK(std::abs(m.p_right - a.p_right) < 4.0 * m.p_right_se);
    CHECK(std::abs(m.mean_time - a.mean_time) < 4.0 * m.mean_time_se);
}

TEST_CASE("chain runs") {
    const auto ss = compute_scale_speed(drifts::zero(), fields::step(1.0, 2.0), uniform_grid(-1.0, 1.0, 40));
    StoppingRule rule;
    rule.interval = std::make_pair(0.5, 0.5);
    const ChainRun r1 = simulate_gendiff(ss, 0.0, rule, 3, 11, true);
    const ChainRun r2 = simulate_gendiff(ss, 0.0, rule, 3, 11, true);
    CHECK(r1.time == r2.time);
    CHECK(r1.jumps == r2.jumps);
    REQUIRE(r1.exited);
    CHECK(std::abs(std::abs(r1.position) - 0.5) < 1e-12);
    CHECK(r1.exited_right == (r1.position > 0));
    REQUIRE(r1.path.size() == r1.jumps + 1);
    for (std::size_t k = 1; k < r1.path.size(); ++k) {
        CHECK(r1.path[k].first > r1.path[k - 1].first);
        CHECK(std::abs(r1.path[k].second - r1.path[k - 1].second) == doctest::Approx(0.05));
    }

    StoppingRule horizon;
    horizon.horizon = 0.01;
    const ChainRun h = simulate_gendiff(ss, 0.0, horizon, 3, 0);
    CHECK_FALSE(h.exited);
    CHECK(h.time >= 0.01);

    StoppingRule forever;
    forever.horizon = 1e9;
    CHECK_THROWS_AS(simulate_gendiff(ss, 0.0, forever, 3, 0), Error);
    CHECK_THROWS_AS(simulate_gendiff(ss, 0.0, StoppingRule{}, 3, 0), InvalidArgument);
}

TEST_CASE("averaging: variance tends to T / mean(lambda)^2") {
    // y = int_0^q lambda is a Brownian motion, and y ~ mean(lambda) q for small epsilon.
    AveragingOptions opt;
    opt.h = 1e-4;
    opt.scheme = ItoScheme::Heun;  // Euler-Maruyama is visibly biased at h / eps^2 = 0.04
    opt.seed = 2;
    const auto rows = averaging_check(fields::sinusoidal(2.0, 1.0, {1, 0, 0}), {0.05}, 1.0, 4000, opt);
    REQUIRE(rows.size() == 1);
    CHECK(std::abs(rows[0].variance.mean - 0.25) < 4.0 * rows[0].variance.std_error + 2e-3);
}

TEST_CASE("exit csv") {
    ExitCase c{"step", {1, 1, 0, 0.25, 2.0, 0, 0, 0}, {1, 1, 0, 0.5, 1.5, 0.125, 0.25, 100}};
    std::ostringstream os;
    write_csv(os, {c});
    CHECK(os.str() ==
          "case,quantity,analytic,empirical,std_error\nstep,p_right,0.25,0.5,0.125\nstep,mean_time,2,1.5,0.25\n");
}
