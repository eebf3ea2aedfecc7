#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vfsk/error.hpp"
#include "vfsk/parallel.hpp"
#include "vfsk/stats.hpp"

using namespace vfsk;

TEST_CASE("mean and variance estimates") {
    const std::vector<double> xs{1, 2, 3, 4};
    const Estimate m = mean_estimate(xs);
    CHECK(m.mean == 2.5);
    CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(m.n == 4);
    const Estimate v = variance_estimate(xs);
    CHECK(v.mean == doctest::Approx(5.0 / 3.0));
    // m4 = mean (x - 2.5)^4 = (2 * 5.0625 + 2 * 0.0625) / 4.
    const double m4 = 2.5625;
    CHECK(v.std_error == doctest::Approx(std::sqrt((m4 - 25.0 / 9.0 * 1.0 / 3.0) / 4.0)));

    std::vector<double> normals(100000);
    CounterRng rng({1, 0}, DrawTag::Generic);
    for (auto& x : normals) x = rng.normal();
    const Estimate vn = variance_estimate(normals);
    CHECK(std::abs(vn.mean - 1.0) < 4.0 * vn.std_error);
    CHECK(vn.std_error == doctest::Approx(std::sqrt(2.0 / 100000)).epsilon(0.05));
}

TEST_CASE("parallel helpers") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    const auto sq = parallel_map(100, 3, [](std::size_t i) { return static_cast<double>(i * i); });
    for (std::size_t i = 0; i < sq.size(); ++i) REQUIRE(sq[i] == static_cast<double>(i * i));
    CHECK_THROWS_AS(parallel_for(10, 2, [](std::size_t i) {
                        if (i == 7) throw InvalidArgument("boom");
                    }),
                    InvalidArgument);
    CHECK(default_workers() >= 1);
}

namespace {

ModelSpec spec() {
    ModelSpec s;
    s.friction = fields::sinusoidal(2.0, 0.5, {1, 0, 0});
    s.horizon = 1.0;
    return s;
}

Ensemble ito_ensemble(std::uint64_t seed, double h, unsigned workers, std::size_t n = 64) {
    const ModelSpec s = spec();
    return build_ensemble(s, seed, n, workers, [&](std::uint64_t k) {
        return simulate_ito_limit(s, sample_wiener(1, 1.0, 1e-3, seed, k), h);
    });
}

}  // namespace

TEST_CASE("ensembles are independent of the worker count") {
    const Ensemble a = ito_ensemble(3, 1e-3, 1);
    const Ensemble b = ito_ensemble(3, 1e-3, 4);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a.streams[k] == k);
        REQUIRE(a.trajectories[k].q == b.trajectories[k].q);
    }
    CHECK_NOTHROW(check_ensemble(a));
    Ensemble bad = a;
    bad.streams[1] = 0;
    CHECK_THROWS_AS(check_ensemble(bad), InvalidArgument);
}

TEST_CASE("coupled sup distance") {
    const Ensemble fine = ito_ensemble(5, 1e-3, 1);
    const Ensemble same = ito_ensemble(5, 1e-3, 1);
    const SupDistance zero = coupled_sup_distance(fine, same);
    CHECK(zero.mean == 0.0);
    CHECK(zero.q95 == 0.0);

    const Ensemble coarse = ito_ensemble(5, 1e-2, 1);
    const std::vector<double> kappa{0.0, 1e-3, 1.0};
    const SupDistance d = coupled_sup_distance(fine, coarse, kappa);
    REQUIRE(d.samples.size() == 64);
    CHECK(d.mean > 0.0);
    CHECK(d.median <= d.q95);
    REQUIRE(d.exceed_probability.size() == 3);
    CHECK(d.exceed_probability[0] == 1.0);
    CHECK(d.exceed_probability[2] == 0.0);
    CHECK(d.samples[3] == sup_distance(fine.trajectories[3], coarse.trajectories[3]));

    CHECK_THROWS_AS(coupled_sup_distance(fine, ito_ensemble(6, 1e-3, 1)), InvalidArgument);
    Trajectory x, y;
    x.h = 2e-3;
    x.steps = 3;
    x.q = {0, 1, 2, 3};
    y.h = 3e-3;
    y.steps = 2;
    y.q = {0, 1, 2};
    CHECK_THROWS_AS(sup_distance(x, y), InvalidArgument);
    y.h = 6e-3;
    y.steps = 1;
    y.q = {0.5, 2.5};
    CHECK(sup_distance(x, y) == 0.5);
}

TEST_CASE("weak errors") {
    std::vector<Point> pts{{1, 0, 0}, {3, 0, 0}};
    const WeakError m = weak_error(pts, Functional::terminal_mean(), 2.0);
    CHECK(m.estimate == 2.0);
    CHECK(m.z == 0.0);
    CHECK(weak_error(pts, Functional::terminal_second_moment(), 5.0).estimate == 5.0);
    CHECK(weak_error(pts, Functional::terminal_variance(), 2.0).estimate == 2.0);
    const WeakError t = weak_error(pts, Functional::bounded_test([](const Point& q) { return q[0] > 2 ? 1.0 : 0.0; }), 0.5);
    CHECK(t.estimate == 0.5);

    std::vector<Point> flat{{1, 0, 0}, {1, 0, 0}};
    CHECK(weak_error(flat, Functional::terminal_mean(), 1.0).z == 0.0);
    CHECK(std::isinf(weak_error(flat, Functional::terminal_mean(), 2.0).z));
    CHECK(weak_error(flat, Functional::terminal_mean(), 2.0).z < 0.0);
}

TEST_CASE("decreasing trend flag") {
    const std::vector<double> est{1.0, 0.5, 0.2}, se{0.1, 0.1, 0.05};
    CHECK(decreasing_trend(est, se) == std::optional<bool>(true));
    const std::vector<double> wide{0.3, 0.2, 0.05};
    CHECK(decreasing_trend(est, wide) == std::optional<bool>(false));
    const std::vector<double> up{1.0, 1.5, 0.2};
    CHECK(decreasing_trend(up, se) == std::optional<bool>(false));
    CHECK_FALSE(decreasing_trend(std::vector<double>{1.0}, std::vector<double>{0.1}).has_value());
}

TEST_CASE("run_sweep") {
    SweepPlan plan;
    plan.parameter = "h";
    plan.values = {0.1, 0.01};
    plan.statistic = "abs";
    plan.n_paths = 100;
    plan.seed = 2;
    plan.workers = 2;
    plan.sample = [&](std::uint64_t k) {
        CounterRng rng({plan.seed, k}, DrawTag::Generic);
        const double z = rng.normal();
        return std::vector<double>{10.0 + 0.01 * z, 1.0 + 0.01 * z};
    };
    const SweepResult r = run_sweep(plan);
    CHECK(r.decreasing == std::optional<bool>(true));
    CHECK(r.estimate[0] == doctest::Approx(10.0).epsilon(0.01));
    plan.workers = 1;
    CHECK(run_sweep(plan).estimate == r.estimate);

    std::ostringstream os;
    write_csv(os, r);
    CHECK(os.str().rfind("parameter,value,estimate,std_error,n_paths\nh,0.10000000000000001,", 0) == 0);

    SweepPlan bad = plan;
    bad.parameter = "tau";
    CHECK_THROWS_AS(run_sweep(bad), InvalidArgument);
    bad = plan;
    bad.values = {0.1, 0.1};
    CHECK_THROWS_AS(run_sweep(bad), InvalidArgument);
    bad = plan;
    bad.n_paths = 1;
    CHECK_THROWS_AS(run_sweep(bad), InvalidArgument);
    bad = plan;
    bad.sample = nullptr;
    CHECK_THROWS_AS(run_sweep(bad), InvalidArgument);
}
