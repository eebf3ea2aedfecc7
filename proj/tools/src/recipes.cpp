#include "vfsk/cli/recipes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>

#include "vfsk/diagnose.hpp"
#include "vfsk/gendiff1d.hpp"
#include "vfsk/homogenize.hpp"
#include "vfsk/integrate.hpp"
#include "vfsk/io.hpp"
#include "vfsk/noise.hpp"
#include "vfsk/parallel.hpp"
#include "vfsk/stats.hpp"

namespace vfsk::cli {

namespace {

using io::format_double;

// lambda = 2 + 0.5 sin(q)
constexpr const char* kSineQ = "sinusoidal(2,0.5,0.15915494309189535)";

ParamSpec real(std::string key, std::string def, std::string help, bool positive = true) {
    return {std::move(key), ParamType::Real, std::move(def), std::move(help), positive, 1, {}};
}
ParamSpec integer(std::string key, std::string def, std::string help) {
    return {std::move(key), ParamType::Integer, std::move(def), std::move(help), true, 1, {}};
}
ParamSpec list(std::string key, std::string def, std::string help) {
    return {std::move(key), ParamType::RealList, std::move(def), std::move(help), true, 1, {}};
}
ParamSpec smooth_friction(std::string key, std::string def, int dim = 1) {
    return {std::move(key), ParamType::SmoothFriction, std::move(def), "friction field lambda", false, dim, {}};
}
ParamSpec friction(std::string key, std::string def, int dim = 1) {
    return {std::move(key), ParamType::Friction, std::move(def), "friction field lambda", false, dim, {}};
}
ParamSpec drift(std::string key, std::string def, int dim = 1) {
    return {std::move(key), ParamType::Drift, std::move(def), "drift field b", false, dim, {}};
}
ParamSpec scheme(std::string def) {
    return {"scheme", ParamType::Choice, std::move(def), "Ito-limit scheme", false, 1, {"heun", "euler-maruyama"}};
}

std::string csv(std::initializer_list<std::string> header, const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    io::write_header(os, header);
    for (const auto& r : rows) io::write_row(os, r);
    return os.str();
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string describe(const char* what, double value, const char* rel, double bound) {
    return std::string(what) + " = " + num(value) + " " + rel + " " + num(bound);
}

ItoScheme scheme_of(const RunConfig& c) {
    return c.text("scheme") == "heun" ? ItoScheme::Heun : ItoScheme::EulerMaruyama;
}

const MollifierKernel& kernel() {
    static const MollifierKernel k = build_kernel();
    return k;
}

void require_sorted_decreasing(const std::vector<double>& v, const char* key) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) throw InvalidArgument(std::string(key) + " must be strictly decreasing");
    if (v.size() < 2) throw InvalidArgument(std::string(key) + " needs at least two values");
}

bool is_constant(const FrictionField& f) { return f.lower_bound() == f.upper_bound(); }

bool is_constant(const DriftField& b) {
    return b.is_zero() || b.description().rfind("constant(", 0) == 0;
}

// Cell average of f over the unit torus, by the periodic rectangle rule.
double cell_mean(int dim, const std::function<double(const Point&)>& f) {
    const TorusGrid g(dim, dim == 1 ? 4096 : 512);
    return sample(g, f).mean();
}

void require_periodic(const FrictionField& f, const char* recipe) {
    const std::string& d = f.description();
    if (d.rfind("sinusoidal(", 0) != 0 && d.rfind("constant(", 0) != 0)
        throw InvalidArgument(std::string(recipe) + ": lambda must be a periodic (sinusoidal or constant) field");
}

ModelSpec first_order_spec(const RunConfig& c) {
    ModelSpec s;
    s.friction = c.friction("lambda");
    s.drift = c.drift("b");
    s.noise_scale = c.real("sigma");
    s.horizon = c.real("T");
    s.initial_position = {c.real("q0"), 0, 0};
    return s;
}

std::vector<ParamSpec> with_model(std::string lambda, std::vector<ParamSpec> extra) {
    std::vector<ParamSpec> p{smooth_friction("lambda", std::move(lambda)), drift("b", "zero"),
                             real("sigma", "1", "noise amplitude"), real("T", "1", "horizon"),
                             real("q0", "0", "initial position", false)};
    for (auto& e : extra) p.push_back(std::move(e));
    return p;
}

// sk-constant -----------------------------------------------------------------

void sk_constant(RunContext& ctx) {
    const RunConfig& c = ctx.config();
    ModelSpec s = first_order_spec(c);
    s.mass = c.real("mu");
    require_valid(s);
    if (!is_constant(s.friction) || !is_constant(s.drift))
        throw InvalidArgument("sk-constant: lambda and b must be constant");
    const double h = c.real("h"), T = s.horizon, lam = s.friction.lower_bound();
    const auto n = static_cast<std::size_t>(c.integer("n_paths"));

    const auto terminal = parallel_map(n, ctx.workers(), [&](std::size_t k) {
        return simulate_langevin_white(s, sample_wiener(1, T, h, ctx.seed(), k), h).terminal();
    });
    const double b = s.drift.value({})[0];
    const double var_ref = T * s.noise_scale * s.noise_scale / (lam * lam);
    const double mean_ref = s.initial_position[0] + b * T / lam;
    const WeakError var = weak_error(terminal, Functional::terminal_variance(), var_ref);
    const WeakError mean = weak_error(terminal, Functional::terminal_mean(), mean_ref);

    std::ostringstream os;
    io::write_header(os, {"statistic", "estimate", "std_error", "reference", "z", "n_paths"});
    for (const auto& [name, e] : {std::pair{"var_q_T", var}, std::pair{"mean_q_T", mean}}) {
        os << name << ',';
        io::write_row(os, {e.estimate, e.std_error, e.reference, e.z, static_cast<double>(e.n)});
    }
    ctx.write_artifact("summary.csv", os.str());

    const Trajectory first = simulate_langevin_white(s, sample_wiener(1, T, h, ctx.seed(), 0), h);
    std::ostringstream tr;
    write_csv(tr, first);
    ctx.write_artifact("trajectory_0.csv", tr.str());
    ctx.write_artifact("trajectory_0.json", sidecar_json(first));

    ctx.check("variance_within_4se", std::abs(var.z) <= 4.0, describe("|z|", std::abs(var.z), "<=", 4.0));
    ctx.check("mean_within_4se", std::abs(mean.z) <= 4.0, describe("|z|", std::abs(mean.z), "<=", 4.0));
}

// sk-fails-variable / alpha-beta-residuals ------------------------------------

std::vector<ParamSpec> diagnose_params(std::string lambda, std::string b) {
    return {smooth_friction("lambda", std::move(lambda)),
            drift("b", std::move(b)),
            real("sigma", "1", "noise amplitude"),
            real("T", "1", "horizon"),
            list("mu_list", "1e-2, 1e-3, 1e-4", "masses, decreasing"),
            integer("n_paths", "4000", "paths per mass"),
            real("h_over_mu", "0.1", "Langevin step as a fraction of mu"),
            real("max_h", "1e-3", "largest Langevin step")};
}

ModelSpec diagnose_spec(const RunConfig& c) {
    ModelSpec s;
    s.friction = c.friction("lambda");
    s.drift = c.drift("b");
    s.noise_scale = c.real("sigma");
    s.horizon = c.real("T");
    s.mass = c.list("mu_list").front();
    return s;
}

DiagnoseOptions diagnose_options(const RunContext& ctx) {
    DiagnoseOptions opt;
    opt.h_over_mu = ctx.config().real("h_over_mu");
    opt.max_h = ctx.config().real("max_h");
    opt.seed = ctx.seed();
    opt.workers = ctx.workers();
    return opt;
}

void sk_fails_variable(RunContext& ctx) {
    const RunConfig& c = ctx.config();
    const auto& mus = c.list("mu_list");
    require_sorted_decreasing(mus, "mu_list");
    const auto n = static_cast<std::size_t>(c.integer("n_paths"));
    ModelSpec var = diagnose_spec(c);
    require_valid(var);
    ModelSpec control = var;
    control.friction = c.friction("control_lambda");
    require_valid(control);
    if (!is_constant(control.friction)) throw InvalidArgument("sk-fails-variable: control_lambda must be constant");

    const DiagnoseOptions opt = diagnose_options(ctx);
    // The frozen-OU step is exact in law for constant friction, so the
    // control needs no mass-resolving step.
    DiagnoseOptions copt = opt;
    copt.h_over_mu = HUGE_VAL;
    copt.max_h = c.real("control_h");
    const auto gv = gamma_gap(var, mus, n, var.horizon, opt);
    const auto gc = gamma_gap(control, mus, n, control.horizon, copt);

    std::ostringstream os;
    io::write_header(os, {"case", "mu", "estimate", "std_error", "n_paths"});
    std::vector<double> ev, sv, ec, sc;
    for (const auto& [name, rows] : {std::pair{"variable", &gv}, std::pair{"control", &gc}}) {
        for (const auto& r : *rows) {
            os << name << ',';
            io::write_row(os, {r.mu, r.gap.mean, r.gap.std_error, static_cast<double>(r.gap.n)});
        }
    }
    for (const auto& r : gv) ev.push_back(r.gap.mean), sv.push_back(r.gap.std_error);
    for (const auto& r : gc) ec.push_back(r.gap.mean), sc.push_back(r.gap.std_error);
    ctx.write_artifact("gamma_gap.csv", os.str());

    const auto tv = decreasing_trend(ev, sv), tc = decreasing_trend(ec, sc);
    std::ostringstream trend;
    io::write_header(trend, {"case", "decreasing", "last_over_first"});
    trend << "variable," << (tv.value_or(false) ? 1 : 0) << ',' << format_double(ev.back() / ev.front()) << '\n';
    trend << "control," << (tc.value_or(false) ? 1 : 0) << ',' << format_double(ec.back() / ec.front()) << '\n';
    ctx.write_artifact("trend.csv", trend.str());

    double worst = HUGE_VAL;
    for (std::size_t i = 1; i < ev.size(); ++i) worst = std::min(worst, ev[i] / ev[0]);
    ctx.check("variable_gap_persists", worst >= 0.5, describe("min G(mu)/G(mu_0)", worst, ">=", 0.5));
    const double drop = ec.front() / ec.back();
    ctx.check("control_gap_vanishes", drop >= 10.0, describe("G(mu_0)/G(mu_last)", drop, ">=", 10.0));
}

void alpha_beta(RunContext& ctx) {
    const RunConfig& c = ctx.config();
    const auto& mus = c.list("mu_list");
    require_sorted_decreasing(mus, "mu_list");
    ModelSpec s = diagnose_spec(c);
    s.initial_momentum = {c.real("p0"), 0, 0};
    require_valid(s);
    const auto rows =
        alpha_beta_residuals(s, mus, static_cast<std::size_t>(c.integer("n_paths")), s.horizon, diagnose_options(ctx));
    std::ostringstream os;
    write_csv(os, rows);
    ctx.write_artifact("residuals.csv", os.str());

    std::vector<double> a, as, b, bs;
    for (const auto& r : rows) {
        a.push_back(r.alpha_sq.mean);
        as.push_back(r.alpha_sq.std_error);
        b.push_back(r.beta_residual_sq.mean);
        bs.push_back(r.beta_residual_sq.std_error);
    }
    const bool da = decreasing_trend(a, as).value_or(false), db = decreasing_trend(b, bs).value_or(false);
    ctx.check("alpha_decreasing", da, "E|alpha_T|^2 strictly decreasing with separated error bars");
    ctx.check("beta_decreasing", db, "E|beta_T - int b/lambda|^2 strictly decreasing with separated error bars");
}

// regularized limits ------------------------------------------------------------

void regularized_mu(RunContext& ctx) {
    const RunConfig& c = ctx.config();
    const auto& mus = c.list("mu_list");
    require_sorted_decreasing(mus, "mu_list");
    ModelSpec s = first_order_spec(c);
    s.mass = mus.front();
    const double delta = c.real("delta"), h = c.real("h"), T = s.horizon;
    s.mollifier_width = delta;
    require_valid(s);

    SweepPlan plan;
    plan.parameter = "mu";
    plan.values = mus;
    plan.statistic = "mean_sup_distance";
    plan.n_paths = static_cast<std::size_t>(c.integer("n_paths"));
    plan.seed = ctx.seed();
    plan.workers = ctx.workers();
    plan.sample = [&](std::uint64_t k) {
        auto path = std::make_shared<const WienerPath>(sample_wiener(1, T + delta, h, ctx.seed(), k));
        const MollifiedNoise noise = mollify(path, kernel(), delta, T, h / 2);
        const Trajectory limit = simulate_smooth_limit(s, noise, h);
        std::vector<double> out;
        for (double mu : mus) {
            ModelSpec sm = s;
            sm.mass = mu;
            out.push_back(sup_distance(simulate_langevin_mollified(sm, noise, h), limit));
        }
        return out;
    };
    const SweepResult r = run_sweep(plan);
    std::ostringstream os;
    write_csv(os, r);
    ctx.write_artifact("sweep.csv", os.str());
    ctx.check("sup_distance_decreasing", r.decreasing.value_or(false),
              "mean sup|q^{mu,delta} - q^delta| strictly decreasing in mu with separated error bars");
}

void regularized_delta(RunContext& ctx) {
    const RunConfig& c = ctx.config();
    const auto& deltas = c.list("delta_list");
    require_sorted_decreasing(deltas, "delta_list");
    ModelSpec s = first_order_spec(c);
    s.mass = 1.0;
    require_valid(s);
    const double dt = c.real("dt"), T = s.horizon;
    const auto per_delta = static_cast<double>(c.integer("steps_per_delta"));
    const auto n = static_cast<std::size_t>(c.integer("n_paths"));

    std::vector<std::vector<double>> terminal_gap(n);
    SweepPlan plan;
    plan.parameter = "delta";
    plan.values = deltas;
    plan.statistic = "mean_sup_distance";
    plan.n_paths = n;
    plan.seed = ctx.seed();
    plan.workers = ctx.workers();
    plan.sample = [&](std::uint64_t k) {
        auto path = std::make_shared<const WienerPath>(sample_wiener(1, T + deltas.front(), dt, ctx.seed(), k));
        const Trajectory strat = simulate_stratonovich_limit(s, *path, dt);
        std::vector<double> sup, gap;
        for (double delta : deltas) {
            const double h = delta / per_delta;
            const MollifiedNoise noise = mollify(path, kernel(), delta, T, h / 2);
            const Trajectory smooth = simulate_smooth_limit(s, noise, h);
            sup.push_back(sup_distance(smooth, strat));
            gap.push_back(smooth.terminal()[0] - strat.terminal()[0]);
        }
        terminal_gap[k] = std::move(gap);
        return sup;
    };
    const SweepResult r = run_sweep(plan);
    std::ostringstream os;
    write_csv(os, r);
    ctx.write_artifact("sweep.csv", os.str());

    std::vector<double> weak, weak_se;
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        std::vector<double> d(n);
        for (std::size_t k = 0; k < n; ++k) d[k] = terminal_gap[k][j];
        const Estimate e = mean_estimate(d);
        weak.push_back(std::abs(e.mean));
        weak_se.push_back(e.std_error);
        rows.push_back({deltas[j], std::abs(e.mean), e.std_error, static_cast<double>(n)});
    }
    ctx.write_artifact("weak_error.csv", csv({"delta", "abs_mean_difference", "std_error", "n_paths"}, rows));
    ctx.check("sup_distance_decreasing", r.decreasing.value_or(false),
              "mean sup|q^delta - q| strictly decreasing in delta with separated error bars");
    ctx.check("weak_error_decreasing", decreasing_trend(weak, weak_se).value_or(false),
              "|E q^delta_T - E q_T| strictly decreasing in delta with separated error bars");
}

// ito-vs-strat -----------------------------------------------------------------

void ito_vs_strat(RunContext& ctx) {
    const RunConfig& c = ctx.config();
    ModelSpec s = first_order_spec(c);
    s.mass = 1.0;
    require_valid(s);
    const double h = c.real("h"), T = s.horizon, s2 = s.noise_scale * s.noise_scale;
    const auto n = static_cast<std::size_t>(c.integer("n_paths"));

    struct Sample {
        double strat = 0.0, ito = 0.0, integral = 0.0;
    };
    const auto samples = parallel_map(n, ctx.workers(), [&](std::size_t k) {
        const WienerPath w = sample_wiener(1, T, h, ctx.seed(), k);
        const Trajectory strat = simulate_stratonovich_limit(s, w, h);
        ItoOptions raw;
        raw.include_correction = false;
        Sample out;
        out.strat = strat.terminal()[0];
        out.ito = simulate_ito_limit(s, w, h, raw).terminal()[0];
        for (std::size_t m = 0; m < strat.steps; ++m) {
            Point g{};
            const double lam = s.friction_and_gradient_at(strat.position(m), g);
            out.integral += s2 * g[0] / (2.0 * lam * lam * lam) * h;
        }
        return out;
    });
    std::vector<double> qs(n), qi(n), diff(n), integral(n);
    for (std::size_t k = 0; k < n; ++k) {
        qs[k] = samples[k].strat;
        qi[k] = samples[k].ito;
        diff[k] = qs[k] - qi[k];
        integral[k] = samples[k].integral;
    }
    const Estimate es = mean_estimate(qs), ei = mean_estimate(qi), ed = mean_estimate(diff),
                   ec = mean_estimate(integral);
    // The Stratonovich drift exceeds the uncorrected Ito drift by -sigma^2 lambda' / (2 lambda^3).
    const double combined = std::hypot(ed.std_error, ec.std_error);
    const double z = (ed.mean + ec.mean) / combined;

    std::ostringstream os;
    io::write_header(os, {"quantity", "estimate", "std_error"});
    for (const auto& [name, e] : {std::pair{"mean_q_T_stratonovich", es}, std::pair{"mean_q_T_ito_uncorrected", ei},
                                  std::pair{"mean_difference", ed}, std::pair{"correction_integral", ec}}) {
        os << name << ',';
        io::write_row(os, {e.mean, e.std_error});
    }
    os << "z,";
    io::write_row(os, {z, 1.0});
    ctx.write_artifact("summary.csv", os.str());
    ctx.check("difference_matches_correction", std::abs(z) <= 4.0,
              "E[q_strat - q_ito] + E int sigma^2 lambda'/(2 lambda^3) dt: " + describe("|z|", std::abs(z), "<=", 4.0));
}

// generalized diffusion ----------------------------------------------------------

void gendiff_exit(RunContext& ctx) {
    const RunConfig& c = ctx.config();
    const double a = c.real("a"), b = c.real("b"), x0 = c.real("x0");
    if (!(-a < x0 && x0 < b)) throw InvalidArgument("gendiff-exit: x0 must lie in (-a, b)");
    const auto cells = static_cast<std::size_t>(c.integer("cells"));
    const auto n = static_cast<std::size_t>(c.integer("n_chains"));
    const DriftField& drift = c.drift("drift");

    std::vector<ExitCase> cases;
    auto run_case = [&](const char* id, const FrictionField& lambda) {
        std::vector<double> extra{x0};
        for (double j : lambda.jumps()) extra.push_back(j);
        const ScaleSpeed ss = compute_scale_speed(drift, lambda, uniform_grid(-a, b, cells, extra));
        cases.push_back({id, exit_stats_analytic(ss, a, b, x0), exit_stats_mc(ss, a, b, x0, n, ctx.seed(), ctx.workers())});
        return cases.back();
    };

    const FrictionField& lambda = c.friction("lambda");
    const ExitCase base = run_case("lambda", lambda);
    const double dp = std::abs(base.empirical.p_right - base.analytic.p_right);
    ctx.check("exit_probability_within_4se", dp <= 4.0 * base.empirical.p_right_se,
              describe("|p_mc - p|", dp, "<=", 4.0 * base.empirical.p_right_se));
    const double rel = std::abs(base.empirical.mean_time / base.analytic.mean_time - 1.0);
    ctx.check("exit_time_within_2pct", rel <= 0.02, describe("relative error", rel, "<=", 0.02));
    if (is_constant(lambda) && drift.is_zero()) {
        const double l = lambda.lower_bound();
        const double p = (x0 + a) / (a + b), t = l * l * (x0 + a) * (b - x0);
        const double err = std::max(std::abs(base.analytic.p_right - p), std::abs(base.analytic.mean_time / t - 1.0));
        ctx.check("analytic_matches_closed_form", err <= 1e-9, describe("max error", err, "<=", 1e-9));
    }

    const FrictionField& step = c.friction("step_lambda");
    const ExitCase glued = run_case("step", step);
    if (step.is_piecewise_constant() && drift.is_zero() && x0 == 0.0 && step.jumps() == std::vector<double>{0.0}) {
        const double p = glued_exit_probability(step.value_left({}), step.value_right({}), a, b);
        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
        const double d = std::abs(glued.empirical.p_right - p);
        ctx.check("step_exit_probability_within_4se", d <= 4.0 * se, describe("|p_mc - p_glued|", d, "<=", 4.0 * se));
    } else {
        const double d = std::abs(glued.empirical.p_right - glued.analytic.p_right);
        ctx.check("step_exit_probability_within_4se", d <= 4.0 * glued.empirical.p_right_se,
                  describe("|p_mc - p|", d, "<=", 4.0 * glued.empirical.p_right_se));
    }
    std::ostringstream os;
    write_csv(os, cases);
    ctx.write_artifact("exits.csv", os.str());
}

void glued_step(RunContext& ctx) {
    const RunConfig& c = ctx.config();
    const double l1 = c.real("lambda1"), l2 = c.real("lambda2"), a = c.real("a"), b = c.real("b");
    const auto& widths = c.list("widths");
    require_sorted_decreasing(widths, "widths");
    const auto cells = static_cast<std::size_t>(c.integer("cells"));
    const double target = glued_exit_probability(l1, l2, a, b);
    const auto grid = uniform_grid(-a, b, cells);

    std::vector<std::vector<double>> rows;
    std::vector<double> gaps;
    for (double w : widths) {
        const ScaleSpeed ss = compute_scale_speed(drifts::zero(), fields::tanh_ramp(l1, l2, w), grid);
        const double p = exit_stats_analytic(ss, a, b, 0.0).p_right;
        gaps.push_back(std::abs(p - target));
        rows.push_back({w, p, gaps.back()});
    }
    const double p_step = exit_stats_analytic(compute_scale_speed(drifts::zero(), fields::step(l1, l2), grid), a, b, 0.0).p_right;
    rows.push_back({0.0, p_step, std::abs(p_step - target)});
    ctx.write_artifact("smoothing.csv", csv({"width", "p_right", "gap"}, rows));

    bool monotone = true;
    for (std::size_t i = 1; i < gaps.size(); ++i) monotone = monotone && gaps[i] < gaps[i - 1];
    ctx.check("monotone_convergence", monotone, "gap to the glued probability strictly decreasing in the width");
    ctx.check("final_gap_below_0.01", gaps.back() < 0.01, describe("final gap", gaps.back(), "<", 0.01));
    ctx.check("step_matches_glued_formula", std::abs(p_step - target) <= 1e-12,
              describe("|p_step - p_glued|", std::abs(p_step - target), "<=", 1e-12));
}

void averaging(RunContext& ctx) {
    const RunConfig& c = ctx.config();
    const FrictionField& lambda = c.friction("lambda");
    require_periodic(lambda, "averaging-1d");
    const double eps = c.real("eps"), T = c.real("T");
    const auto n = static_cast<std::size_t>(c.integer("n_paths"));
    AveragingOptions opt;
    opt.h = c.real("h");
    opt.scheme = scheme_of(c);
    opt.seed = ctx.seed();
    opt.workers = ctx.workers();
    const auto rows = averaging_check(lambda, {eps}, T, n, opt);
    const double m = cell_mean(1, [&](const Point& y) { return lambda.value(y); });
    const double ref = T / (m * m);
    const Estimate& v = rows.front().variance;
    ctx.write_artifact("averaging.csv", csv({"epsilon", "variance", "std_error", "reference", "n_paths"},
                                            {{eps, v.mean, v.std_error, ref, static_cast<double>(v.n)}}));
    const double rel = std::abs(v.mean / ref - 1.0);
    ctx.check("variance_within_5pct", rel <= 0.05, describe("relative error", rel, "<=", 0.05));
}

// homogenization ------------------------------------------------------------------

void homog_1d(RunContext& ctx) {
    const RunConfig& c = ctx.config();
    const FrictionField& lambda = c.friction("lambda");
    require_periodic(lambda, "homog-1d-sine");
    const CellSolution cell = solve_cell(lambda, TorusGrid(1, static_cast<int>(c.integer("n"))));
    const EffectiveCoefficients eff = effective_coefficients(lambda, c.drift("b"), cell);
    ctx.write_artifact("coefficients.json", to_json(eff, cell));
    std::ostringstream os;
    write_csv(os, cell);
    ctx.write_artifact("corrector.csv", os.str());
    // In one dimension int_0^q lambda is a unit-rate martingale of the limit.
    const double m = cell_mean(1, [&](const Point& y) { return lambda.value(y); });
    const double err = std::abs(eff.a(0, 0) - 1.0 / (m * m));
    ctx.check("a_bar_within_1e-6", err <= 1e-6, describe("|a - 1/mean(lambda)^2|", err, "<=", 1e-6));
}

void homog_2d(RunContext& ctx) {
    const RunConfig& c = ctx.config();
    const FrictionField& lambda = c.friction("lambda");
    require_periodic(lambda, "homog-2d-separable");
    for (double y2 : {0.1, 0.37, 0.8})
        if (std::abs(lambda.value({0.3, y2, 0}) - lambda.value({0.3, 0, 0})) > 1e-14)
            throw InvalidArgument("homog-2d-separable: lambda must depend on y_1 only");
    const CellSolution cell = solve_cell(lambda, TorusGrid(2, static_cast<int>(c.integer("n"))));
    const EffectiveCoefficients eff = effective_coefficients(lambda, c.drift("b"), cell);
    ctx.write_artifact("coefficients.json", to_json(eff, cell));
    std::ostringstream os;
    write_csv(os, cell);
    ctx.write_artifact("corrector.csv", os.str());

    const double m = cell_mean(1, [&](const Point& y) { return lambda.value({y[0], 0, 0}); });
    const double inv = cell_mean(1, [&](const Point& y) { return 1.0 / lambda.value({y[0], 0, 0}); });
    const double e11 = std::abs(eff.a(0, 0) - 1.0 / (m * m));
    const double e22 = std::abs(eff.a(1, 1) - inv / m);
    const double e12 = std::max(std::abs(eff.a(0, 1)), std::abs(eff.a(1, 0)));
    ctx.check("a11_within_1e-6", e11 <= 1e-6, describe("|a11 - 1/mean(lambda)^2|", e11, "<=", 1e-6));
    ctx.check("a22_within_1e-5", e22 <= 1e-5, describe("|a22 - mean(1/lambda)/mean(lambda)|", e22, "<=", 1e-5));
    ctx.check("a12_within_1e-8", e12 <= 1e-8, describe("|a12|", e12, "<=", 1e-8));
}

std::vector<int> grid_sizes(const RunConfig& c) {
    std::vector<int> out;
    for (double v : c.list("n_list")) {
        if (v != std::floor(v) || v < 16) throw InvalidArgument("n_list entries must be integers >= 16");
        out.push_back(static_cast<int>(v));
    }
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i] != 2 * out[i - 1]) throw InvalidArgument("n_list must double at each entry");
    if (out.size() < 2) throw InvalidArgument("n_list needs at least two sizes");
    return out;
}

void cell_identity(RunContext& ctx) {
    const RunConfig& c = ctx.config();
    const auto sizes = grid_sizes(c);
    std::ostringstream os;
    io::write_header(os, {"case", "n", "form_gap", "ratio"});
    for (const char* key : {"lambda_1d", "lambda_2d"}) {
        const FrictionField& lambda = c.friction(key);
        std::vector<double> gaps;
        for (int n : sizes) {
            const CellSolution cell = solve_cell(lambda, TorusGrid(lambda.dimension(), n));
            gaps.push_back(effective_coefficients(lambda, drifts::zero(lambda.dimension()), cell).form_gap);
            os << key << ',' << n << ',' << format_double(gaps.back()) << ','
               << (gaps.size() > 1 ? format_double(gaps[gaps.size() - 2] / gaps.back()) : "") << '\n';
        }
        const std::string name(key);
        ctx.check(name + "_gap_below_1e-6", gaps.back() <= 1e-6, describe("gap", gaps.back(), "<=", 1e-6));
        bool ratios = true;
        double worst = 4.0;
        for (std::size_t i = 1; i < gaps.size(); ++i) {
            const double r = gaps[i - 1] / gaps[i];
            if (std::abs(r - 4.0) > std::abs(worst - 4.0)) worst = r;
            ratios = ratios && std::abs(r - 4.0) <= 1.0;
        }
        ctx.check(name + "_ratio_4_pm_1", ratios, describe("worst ratio", worst, "within", 4.0) + " +- 1");
    }
    ctx.write_artifact("form_gap.csv", os.str());
}

void invariant_density(RunContext& ctx) {
    const RunConfig& c = ctx.config();
    const FrictionField& lambda = c.friction("lambda");
    const auto sizes = grid_sizes(c);
    std::ostringstream os;
    io::write_header(os, {"n", "residual", "ratio"});
    std::vector<double> res;
    bool ok = true;
    double worst = 4.0;
    for (int n : sizes) {
        res.push_back(invariant_density_residual(lambda, TorusGrid(lambda.dimension(), n)));
        os << n << ',' << format_double(res.back()) << ',';
        if (res.size() > 1) {
            const double r = res[res.size() - 2] / res.back();
            os << format_double(r);
            if (std::abs(r - 4.0) > std::abs(worst - 4.0)) worst = r;
            ok = ok && std::abs(r - 4.0) <= 1.0;
        }
        os << '\n';
    }
    ctx.write_artifact("residual.csv", os.str());
    ctx.check("residual_ratio_4_pm_1", ok, describe("worst ratio", worst, "within", 4.0) + " +- 1");
}

void homog_mc(RunContext& ctx) {
    const RunConfig& c = ctx.config();
    const FrictionField& lambda = c.friction("lambda");
    require_periodic(lambda, "homog-mc-1d");
    const DriftField& b = c.drift("b");
    const CellSolution cell = solve_cell(lambda, TorusGrid(1, static_cast<int>(c.integer("n"))));
    const EffectiveCoefficients eff = effective_coefficients(lambda, b, cell);
    const double T = c.real("T");
    McDiffusivityOptions opt;
    opt.h = c.real("h");
    opt.scheme = scheme_of(c);
    opt.seed = ctx.seed();
    opt.workers = ctx.workers();
    opt.drift = {eff.b(0) * T};
    const McDiffusivity mc =
        mc_effective_diffusivity(lambda, b, c.real("eps"), T, static_cast<std::size_t>(c.integer("n_paths")), opt);
    ctx.write_artifact("comparison.csv", csv({"quantity", "pde", "mc", "mc_std_error"}, {}) + "a_bar," +
                                             format_double(eff.a(0, 0)) + ',' + format_double(mc.a(0, 0)) + ',' +
                                             format_double(mc.a_se(0, 0)) + '\n');
    const double d = std::abs(mc.a(0, 0) - eff.a(0, 0)), bound = 3.0 * mc.a_se(0, 0) + 0.01;
    ctx.check("pde_mc_agree", d <= bound, describe("|a_mc - a_pde|", d, "<=", bound));
}

std::vector<Recipe> build_registry() {
    std::vector<Recipe> r;
    r.push_back({"sk-constant",
                 "Langevin ensemble at small mass, constant friction: Var(q_T) against T sigma^2/lambda^2",
                 {},
                 with_model("constant(2)", {real("mu", "1e-4", "mass"), real("h", "1e-3", "step"),
                                            integer("n_paths", "10000", "paths")}),
                 sk_constant});
    {
        auto p = diagnose_params("clipped_linear(2,0.75,0.25)", "zero");
        p.push_back(smooth_friction("control_lambda", "constant(2)"));
        p.push_back(real("control_h", "1e-3", "step for the constant-friction control"));
        r.push_back({"sk-fails-variable",
                     "gamma gap E|gamma_T - int sigma/lambda dW|^2 persists for variable friction, vanishes for constant",
                     {"gamma-gap"},
                     p,
                     sk_fails_variable});
    }
    {
        auto p = diagnose_params("clipped_linear(2,0.75,0.25)", "constant(0.5)");
        p.push_back(real("p0", "1", "initial momentum", false));
        r.push_back({"alpha-beta-residuals", "E|alpha_T|^2 and E|beta_T - int b/lambda|^2 vanish as mu decreases", {},
                     p, alpha_beta});
    }
    r.push_back({"regularized-limit-mu",
                 "coupled sup distance between mollified Langevin and the smooth-noise limit across mu",
                 {},
                 with_model(kSineQ, {real("delta", "0.05", "mollifier width"),
                                     list("mu_list", "1e-2, 3e-3, 1e-3", "masses, decreasing"),
                                     real("h", "1e-4", "step (noise tabulated at h/2)"),
                                     integer("n_paths", "1000", "coupled paths")}),
                 regularized_mu});
    r.push_back({"regularized-limit-delta",
                 "coupled sup distance and weak error between the smooth-noise limit and the Stratonovich limit across delta",
                 {},
                 with_model(kSineQ, {list("delta_list", "0.1, 0.05, 0.025", "mollifier widths, decreasing"),
                                     real("dt", "3.125e-4", "Wiener path step and Stratonovich step"),
                                     integer("steps_per_delta", "40", "ODE steps per mollifier width"),
                                     integer("n_paths", "1000", "coupled paths")}),
                 regularized_delta});
    r.push_back({"ito-vs-strat",
                 "Stratonovich minus uncorrected Ito mean against the noise-induced drift integral",
                 {},
                 with_model(kSineQ, {real("h", "1e-3", "step"), integer("n_paths", "20000", "paths")}),
                 ito_vs_strat});
    r.push_back({"gendiff-exit",
                 "exit statistics of the generalized diffusion chain against scale/speed formulas",
                 {},
                 {friction("lambda", "constant(1)"), friction("step_lambda", "step(1,2)"), drift("drift", "zero"),
                  real("a", "1", "left end at -a"), real("b", "1", "right end"), real("x0", "0", "start", false),
                  integer("cells", "200", "grid panels on (-a, b)"), integer("n_chains", "100000", "chains per case")},
                 gendiff_exit});
    r.push_back({"glued-step",
                 "exit probability under tanh-smoothed steps converges to the glued interface value",
                 {},
                 {real("lambda1", "1", "friction left of 0"), real("lambda2", "2", "friction right of 0"),
                  real("a", "1", "left end at -a"), real("b", "1", "right end"),
                  list("widths", "0.2, 0.05, 0.0125", "tanh widths, decreasing"),
                  integer("cells", "4000", "grid panels on (-a, b)")},
                 glued_step});
    r.push_back({"averaging-1d",
                 "Var(q_T) of the Ito limit with friction lambda(q/eps) against T/mean(lambda)^2",
                 {},
                 {smooth_friction("lambda", "sinusoidal(2,1,1)"), real("eps", "1e-2", "oscillation scale"),
                  real("T", "1", "horizon"), integer("n_paths", "10000", "paths"), real("h", "5e-6", "step"),
                  scheme("heun")},
                 averaging});
    r.push_back({"homog-1d-sine", "one-dimensional cell problem: a-bar against 1/mean(lambda)^2", {},
                 {smooth_friction("lambda", "sinusoidal(2,1,1)"), drift("b", "zero"), integer("n", "128", "grid nodes")},
                 homog_1d});
    r.push_back({"homog-2d-separable", "two-dimensional cell problem with lambda depending on y_1 only", {},
                 {smooth_friction("lambda", "sinusoidal(2,1,1,0)", 2), drift("b", "zero", 2),
                  integer("n", "128", "grid nodes per axis")},
                 homog_2d});
    r.push_back({"invariant-density", "second-order decay of the discrete adjoint residual of lambda", {},
                 {smooth_friction("lambda", "sinusoidal(2,1,1)"), list("n_list", "32, 64, 128", "grid sizes")},
                 invariant_density});
    r.push_back({"cell-identity-5859", "gap between the symmetric and simplified a-bar formulas under refinement", {},
                 {smooth_friction("lambda_1d", "sinusoidal(2,1,1)"), smooth_friction("lambda_2d", "sinusoidal(2,0.5,1,1)", 2),
                  list("n_list", "32, 64, 128", "grid sizes")},
                 cell_identity});
    r.push_back({"homog-mc-1d", "cell-problem a-bar against the Monte Carlo diffusivity at small eps", {},
                 {smooth_friction("lambda", "sinusoidal(2,1,1)"), drift("b", "zero"), real("eps", "1e-2", "oscillation scale"),
                  real("T", "1", "horizon"), integer("n_paths", "10000", "paths"), real("h", "5e-6", "step"),
                  scheme("heun"), integer("n", "128", "cell grid nodes")},
                 homog_mc});
    return r;
}

}  // namespace

const std::vector<Recipe>& registry() {
    static const std::vector<Recipe> r = build_registry();
    return r;
}

const Recipe* find_recipe(std::string_view name) {
    for (const auto& r : registry()) {
        if (r.name == name) return &r;
        if (std::find(r.aliases.begin(), r.aliases.end(), name) != r.aliases.end()) return &r;
    }
    return nullptr;
}

}  // namespace vfsk::cli
