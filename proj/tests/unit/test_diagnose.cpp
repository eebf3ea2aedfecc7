#include <doctest.h>

#include <cmath>
#include <sstream>

#include "vfsk/diagnose.hpp"
#include "vfsk/error.hpp"

using namespace vfsk;

namespace {

ModelSpec base(FrictionField f = fields::constant(2.0)) {
    ModelSpec s;
    s.friction = std::move(f);
    s.mass = 0.05;
    s.horizon = 1.0;
    return s;
}

}  // namespace

TEST_CASE("friction action") {
    ModelSpec s = base();
    const auto path = sample_wiener(1, 1.0, 1e-2, 1, 0);
    const auto tr = simulate_langevin_white(s, path, 1e-2);
    const auto a = friction_action(tr);
    REQUIRE(a.size() == tr.steps + 1);
    for (std::size_t n = 0; n <= tr.steps; ++n) CHECK(a[n] == doctest::Approx(2.0 * tr.time(n)).epsilon(1e-14));

    ModelSpec v = base(fields::sinusoidal(2.0, 0.5, {1, 0, 0}));
    const auto tv = simulate_langevin_white(v, path, 1e-2);
    const auto av = friction_action(tv);
    for (std::size_t n = 1; n <= tv.steps; ++n) {
        CHECK(av[n] > av[n - 1]);
        CHECK(av[n] - av[n - 1] >= 1.5 * 1e-2 - 1e-15);
        CHECK(av[n] - av[n - 1] <= 2.5 * 1e-2 + 1e-15);
    }
}

TEST_CASE("decomposition closes to roundoff") {
    for (int d : {1, 2}) {
        ModelSpec s = base(fields::sinusoidal(2.0, 0.5, {1, 0.5, 0}, d));
        s.dimension = d;
        s.drift = drifts::sinusoidal({0.4, -0.3, 0}, {0.5, 1, 0}, d);
        s.initial_momentum = {1.0, d == 2 ? -0.5 : 0.0, 0};
        s.initial_position = {0.1, d == 2 ? 0.2 : 0.0, 0};
        for (double h : {1e-3, 1e-2}) {
            for (std::uint64_t k = 0; k < 5; ++k) {
                const auto path = sample_wiener(d, 1.0, h, 9, k);
                const auto tr = simulate_langevin_white(s, path, h);
                const auto dec = decompose(tr, path);
                CAPTURE(d);
                CAPTURE(h);
                CHECK(dec.max_residual() < 1e-12);
                CHECK(dec.max_residual() <= decomposition_tolerance(s, h));
                CHECK(dec.action.front() == 0.0);
                CHECK(dec.drift_integral.front() == 0.0);
                CHECK(dec.noise_integral.front() == 0.0);
            }
        }
    }
}

TEST_CASE("decomposition pieces in the constant case") {
    const double lambda = 2.0, mu = 0.05, b = 0.5, p0 = 1.0;
    ModelSpec s = base();
    s.drift = drifts::constant({b, 0, 0});
    s.initial_momentum = {p0, 0, 0};
    const auto path = sample_wiener(1, 1.0, 1e-3, 3, 0);
    const auto tr = simulate_langevin_white(s, path, 1e-3);
    const auto dec = decompose(tr, path);
    const double k = lambda / mu;
    for (std::size_t n = 0; n <= dec.steps; n += 50) {
        const double t = tr.time(n);
        const double relax = 1.0 - std::exp(-k * t);
        CHECK(dec.at(dec.alpha, n, 0) == doctest::Approx(mu / lambda * p0 * relax).epsilon(1e-12));
        CHECK(dec.at(dec.beta, n, 0) ==
              doctest::Approx(b / lambda * t - mu / lambda * b / lambda * relax).epsilon(1e-12).scale(1e-12));
        CHECK(dec.at(dec.drift_integral, n, 0) == doctest::Approx(b / lambda * t).epsilon(1e-12));
        CHECK(dec.at(dec.noise_integral, n, 0) == doctest::Approx(path.at(n, 0) / lambda).epsilon(1e-12).scale(1e-12));
        // lambda q = sigma W - mu (p - p0) + b t in the constant case.
        CHECK(lambda * tr.q_at(n, 0) ==
              doctest::Approx(path.at(n, 0) - mu * (tr.p_at(n, 0) - p0) + b * t).scale(1.0).epsilon(1e-11));
    }
}

TEST_CASE("decompose preconditions") {
    ModelSpec s = base();
    const auto path = sample_wiener(1, 1.0, 1e-3, 3, 0);
    const auto other = sample_wiener(1, 1.0, 1e-3, 3, 1);
    const auto tr = simulate_langevin_white(s, path, 1e-3);
    CHECK_THROWS_AS(decompose(tr, other), InvalidArgument);
    CHECK_THROWS_AS(decompose(tr, sample_wiener(1, 1.0, 2e-3, 3, 0)), InvalidArgument);
    // A step spanning several path cells is accepted.
    const auto coarse = simulate_langevin_white(s, path, 2e-3);
    CHECK(decompose(coarse, path).max_residual() < 1e-12);
    CHECK_THROWS_AS(decompose(simulate_ito_limit(s, path, 1e-3), path), InvalidArgument);
}

TEST_CASE("diagnose step and tolerance") {
    DiagnoseOptions opt;
    CHECK(diagnose_step(1e-2, 1.0, opt) == doctest::Approx(1e-3));
    CHECK(diagnose_step(1e-4, 1.0, opt) == doctest::Approx(1e-5));
    CHECK(diagnose_step(1.0, 1.0, opt) == doctest::Approx(1e-3));
    const double h = diagnose_step(3e-3, 1.0, opt);
    CHECK(h <= 3e-4);
    CHECK(std::abs(1.0 / h - std::round(1.0 / h)) < 1e-9);

    ModelSpec s = base();
    s.noise_scale = 1.5;
    s.drift = drifts::constant({0.5, 0, 0});
    s.initial_momentum = {-2.0, 0, 0};
    s.horizon = 3.0;
    CHECK(decomposition_tolerance(s, 1e-3) == doctest::Approx(10 * 1e-3 * 4.0 * 4.0));
}

TEST_CASE("gamma gap matches the constant-friction closed form") {
    // lambda q_T = sigma W_T - mu p_T, so the gap is mu^2 / lambda^2 E p_T^2.
    ModelSpec s = base();
    DiagnoseOptions opt;
    opt.seed = 4;
    const std::vector<double> mus{1e-1, 1e-2};
    const auto rows = gamma_gap(s, mus, 4000, 1.0, opt);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        const double k = 2.0 / r.mu;
        const double var_p = (1.0 - std::exp(-2.0 * k)) / (2.0 * k * r.mu * r.mu);
        const double exact = r.mu * r.mu / 4.0 * var_p;
        CAPTURE(r.mu);
        CHECK(std::abs(r.gap.mean - exact) < 4.0 * r.gap.std_error);
    }
    CHECK(rows[1].gap.mean < rows[0].gap.mean);
}

TEST_CASE("alpha and beta residuals shrink with mu") {
    ModelSpec s = base(fields::sinusoidal(2.0, 0.5, {1, 0, 0}));
    s.drift = drifts::constant({0.5, 0, 0});
    s.initial_momentum = {1.0, 0, 0};
    DiagnoseOptions opt;
    opt.seed = 5;
    const auto rows = alpha_beta_residuals(s, {1e-1, 1e-2}, 500, 1.0, opt);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].alpha_sq.mean < rows[0].alpha_sq.mean);
    CHECK(rows[1].beta_residual_sq.mean < rows[0].beta_residual_sq.mean);
    // |alpha_T| <= mu |p0| / lambda_0.
    CHECK(rows[1].alpha_sq.mean <= std::pow(1e-2 / 1.5, 2) * 1.0001);
}

TEST_CASE("diagnose csv") {
    std::vector<GammaGapRow> g{{1e-2, {0.5, 0.25, 10}}};
    std::ostringstream a;
    write_csv(a, g);
    CHECK(a.str() == "mu,estimate,std_error,n_paths\n0.01,0.5,0.25,10\n");
    std::vector<AlphaBetaRow> ab{{1e-2, {1, 0.5, 4}, {2, 0.25, 4}}};
    std::ostringstream b;
    write_csv(b, ab);
    CHECK(b.str() == "mu,alpha_sq,alpha_se,beta_residual_sq,beta_residual_se,n_paths\n0.01,1,0.5,2,0.25,4\n");
}
