#include "vfsk/gendiff1d.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "vfsk/error.hpp"
#include "vfsk/io.hpp"
#include "vfsk/noise.hpp"
#include "vfsk/parallel.hpp"
#include "vfsk/rng.hpp"

namespace vfsk {

namespace {

constexpr double kNodeTol = 1e-12;

Point at(double x) { return {x, 0.0, 0.0}; }

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double q) {
    if (q < xs.front() - kNodeTol || q > xs.back() + kNodeTol)
        throw InvalidArgument("scale/speed evaluated outside the grid");
    auto it = std::upper_bound(xs.begin(), xs.end(), q);
    if (it == xs.end()) return ys.back();
    if (it == xs.begin()) return ys.front();
    const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double f = (q - xs[i]) / (xs[i + 1] - xs[i]);
    return ys[i] + f * (ys[i + 1] - ys[i]);
}

}  // namespace

std::size_t ScaleSpeed::node_index(double q) const {
    auto it = std::lower_bound(x.begin(), x.end(), q - kNodeTol);
    if (it == x.end() || std::abs(*it - q) > kNodeTol)
        throw InvalidArgument("point " + io::format_double(q) + " is not a grid node");
    return static_cast<std::size_t>(it - x.begin());
}

double ScaleSpeed::u_at(double q) const { return interp(x, u, q); }
double ScaleSpeed::v_at(double q) const { return interp(x, v, q); }

std::vector<double> uniform_grid(double lo, double hi, std::size_t cells, const std::vector<double>& extra) {
    if (!(hi > lo) || cells == 0) throw InvalidArgument("uniform_grid: empty range");
    std::vector<double> g(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i)
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
    std::vector<double> want = extra;
    want.push_back(0.0);
    for (double e : want) {
        if (e <= lo || e >= hi) continue;
        // Snap an existing node when close, insert otherwise.
        auto it = std::lower_bound(g.begin(), g.end(), e);
        const double spacing = (hi - lo) / static_cast<double>(cells);
        if (std::abs(*it - e) < 1e-9 * spacing) {
            *it = e;
        } else if (it != g.begin() && std::abs(*(it - 1) - e) < 1e-9 * spacing) {
            *(it - 1) = e;
        } else {
            g.insert(it, e);
        }
    }
    return g;
}

ScaleSpeed compute_scale_speed(const DriftField& b, const FrictionField& lambda, std::vector<double> grid) {
    if (lambda.dimension() != 1 || b.dimension() != 1)
        throw InvalidArgument("compute_scale_speed: fields must be one-dimensional");
    if (!(lambda.lower_bound() > 0.0)) throw InvalidArgument("compute_scale_speed: lambda must be positive");
    if (grid.size() < 3) throw InvalidArgument("compute_scale_speed: grid needs at least three nodes");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i + 1] > grid[i])) throw InvalidArgument("compute_scale_speed: grid must be strictly increasing");

    ScaleSpeed ss;
    ss.x = std::move(grid);
    ss.friction = lambda.description();
    ss.drift = b.description();
    const auto& x = ss.x;
    const std::size_t n = x.size();

    auto zero = std::find(x.begin(), x.end(), 0.0);
    if (zero == x.end()) throw InvalidArgument("compute_scale_speed: grid must contain 0 as a node");
    const auto i0 = static_cast<std::size_t>(zero - x.begin());
    for (double j : lambda.jumps()) {
        if (j <= x.front() || j >= x.back()) continue;
        if (std::find(x.begin(), x.end(), j) == x.end())
            throw InvalidArgument("jump not aligned with grid: friction jumps at " + io::format_double(j));
    }

    // One-sided integrands on panel [x_i, x_{i+1}].
    const auto lam_r = [&](std::size_t i) { return lambda.value_right(at(x[i])); };
    const auto lam_l = [&](std::size_t i) { return lambda.value_left(at(x[i])); };
    const auto bv = [&](std::size_t i) { return b.value(at(x[i]))[0]; };

    // I(x) = int_0^x b lambda.
    std::vector<double> I(n, 0.0);
    for (std::size_t i = i0; i + 1 < n; ++i)
        I[i + 1] = I[i] + 0.5 * (x[i + 1] - x[i]) * (bv(i) * lam_r(i) + bv(i + 1) * lam_l(i + 1));
    for (std::size_t i = i0; i > 0; --i)
        I[i - 1] = I[i] - 0.5 * (x[i] - x[i - 1]) * (bv(i - 1) * lam_r(i - 1) + bv(i) * lam_l(i));

    ss.u.assign(n, 0.0);
    ss.v.assign(n, 0.0);
    const auto du = [&](std::size_t i) {
        return 0.5 * (x[i + 1] - x[i]) *
               (lam_r(i) * std::exp(-2.0 * I[i]) + lam_l(i + 1) * std::exp(-2.0 * I[i + 1]));
    };
    const auto dv = [&](std::size_t i) {
        return (x[i + 1] - x[i]) * (lam_r(i) * std::exp(2.0 * I[i]) + lam_l(i + 1) * std::exp(2.0 * I[i + 1]));
    };
    for (std::size_t i = i0; i + 1 < n; ++i) {
        ss.u[i + 1] = ss.u[i] + du(i);
        ss.v[i + 1] = ss.v[i] + dv(i);
    }
    for (std::size_t i = i0; i > 0; --i) {
        ss.u[i - 1] = ss.u[i] - du(i - 1);
        ss.v[i - 1] = ss.v[i] - dv(i - 1);
    }
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(ss.u[i + 1] > ss.u[i]) || !(ss.v[i + 1] > ss.v[i]))
            throw Error("compute_scale_speed: u or v failed to increase (non-finite exponent?)");
    return ss;
}

ExitStats exit_stats_analytic(const ScaleSpeed& ss, double a, double b, double x0) {
    const double lo = -a, hi = b;
    if (!(lo < x0 && x0 < hi)) throw InvalidArgument("exit_stats_analytic: x0 outside the interval");
    if (lo < ss.x.front() - kNodeTol || hi > ss.x.back() + kNodeTol)
        throw InvalidArgument("exit_stats_analytic: interval exceeds the grid");

    // Quadrature nodes: the interval ends, x0, and the grid nodes between.
    std::vector<double> ys{lo, x0, hi};
    for (double y : ss.x)
        if (y > lo + kNodeTol && y < hi - kNodeTol && std::abs(y - x0) > kNodeTol) ys.push_back(y);
    std::sort(ys.begin(), ys.end());

    const double ua = ss.u_at(lo), ub = ss.u_at(hi), ux = ss.u_at(x0);
    const double span = ub - ua;
    auto green = [&](double y) {
        const double uy = ss.u_at(y);
        return (std::min(ux, uy) - ua) * (ub - std::max(ux, uy)) / span;
    };
    double t = 0.0;
    for (std::size_t i = 0; i + 1 < ys.size(); ++i)
        t += 0.5 * (green(ys[i]) + green(ys[i + 1])) * (ss.v_at(ys[i + 1]) - ss.v_at(ys[i]));

    ExitStats e;
    e.a = a;
    e.b = b;
    e.x0 = x0;
    e.p_right = (ux - ua) / span;
    e.mean_time = t;
    return e;
}

double glued_exit_probability(double lambda1, double lambda2, double a, double b) {
    if (!(lambda1 > 0.0 && lambda2 > 0.0 && a >= 0.0 && b > 0.0))
        throw InvalidArgument("glued_exit_probability: arguments must be positive");
    return lambda1 * a / (lambda1 * a + lambda2 * b);
}

ChainRun simulate_gendiff(const ScaleSpeed& ss, double x0, const StoppingRule& rule, std::uint64_t seed,
                          std::uint64_t stream, bool record) {
    const std::size_t n = ss.size();
    std::size_t i = ss.node_index(x0);
    std::size_t left = 0, right = n - 1;
    bool bounded = false;
    if (rule.interval) {
        left = ss.node_index(-rule.interval->first);
        right = ss.node_index(rule.interval->second);
        if (!(left < i && i < right)) throw InvalidArgument("simulate_gendiff: x0 must lie inside the interval");
        bounded = true;
    }
    if (!bounded && !rule.horizon) throw InvalidArgument("simulate_gendiff: stopping rule is empty");

    const auto& u = ss.u;
    const auto& v = ss.v;
    CounterRng rng(StreamKey{seed, stream}, DrawTag::ChainUniform);
    ChainRun run;
    if (record) run.path.emplace_back(0.0, ss.x[i]);
    for (;;) {
        if (bounded && (i == left || i == right)) {
            run.exited = true;
            run.exited_right = i == right;
            break;
        }
        if (i == 0 || i == n - 1) throw Error("simulate_gendiff: chain left the grid range");
        const double dl = u[i] - u[i - 1], dr = u[i + 1] - u[i], w = u[i + 1] - u[i - 1];
        const double hold = dl * dr / w * 0.5 * (v[i + 1] - v[i - 1]);
        if (rule.horizon && run.time + hold > *rule.horizon) {
            run.time = *rule.horizon;
            break;
        }
        run.time += hold;
        i = rng.uniform32() < dl / w ? i + 1 : i - 1;
        ++run.jumps;
        if (record) run.path.emplace_back(run.time, ss.x[i]);
    }
    run.position = ss.x[i];
    return run;
}

ExitStats exit_stats_mc(const ScaleSpeed& ss, double a, double b, double x0, std::size_t n_chains,
                        std::uint64_t seed, unsigned workers) {
    StoppingRule rule;
    rule.interval = std::make_pair(a, b);
    const auto runs = parallel_map(n_chains, workers, [&](std::size_t k) {
        const ChainRun r = simulate_gendiff(ss, x0, rule, seed, k);
        return std::make_pair(r.exited_right ? 1.0 : 0.0, r.time);
    });
    std::vector<double> hit(n_chains), time(n_chains);
    for (std::size_t k = 0; k < n_chains; ++k) {
        hit[k] = runs[k].first;
        time[k] = runs[k].second;
    }
    const Estimate p = mean_estimate(hit), t = mean_estimate(time);
    ExitStats e;
    e.a = a;
    e.b = b;
    e.x0 = x0;
    e.p_right = p.mean;
    e.p_right_se = p.std_error;
    e.mean_time = t.mean;
    e.mean_time_se = t.std_error;
    e.n = n_chains;
    return e;
}

std::vector<AveragingRow> averaging_check(const FrictionField& lambda, const std::vector<double>& eps_list,
                                          double horizon, std::size_t n_paths, const AveragingOptions& opt) {
    std::vector<AveragingRow> rows;
    for (double eps : eps_list) {
        ModelSpec spec;
        spec.dimension = 1;
        spec.friction = lambda;
        spec.drift = drifts::zero(1);
        spec.noise_scale = 1.0;
        spec.oscillation_scale = eps;
        spec.horizon = horizon;
        require_valid(spec);
        ItoOptions io_opt;
        io_opt.scheme = opt.scheme;
        const auto qt = parallel_map(n_paths, opt.workers, [&](std::size_t k) {
            const WienerPath path = sample_wiener(1, horizon, opt.h, opt.seed, k);
            return simulate_ito_limit(spec, path, opt.h, io_opt).terminal()[0];
        });
        rows.push_back({eps, variance_estimate(qt)});
    }
    return rows;
}

void write_csv(std::ostream& os, const std::vector<ExitCase>& cases) {
    io::write_header(os, {"case", "quantity", "analytic", "empirical", "std_error"});
    for (const auto& c : cases) {
        os << c.id << ",p_right,";
        io::write_row(os, {c.analytic.p_right, c.empirical.p_right, c.empirical.p_right_se});
        os << c.id << ",mean_time,";
        io::write_row(os, {c.analytic.mean_time, c.empirical.mean_time, c.empirical.mean_time_se});
    }
}

}  // namespace vfsk
