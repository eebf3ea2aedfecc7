#include "vfsk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "vfsk/error.hpp"
#include "vfsk/io.hpp"
#include "vfsk/parallel.hpp"

namespace vfsk {

Estimate mean_estimate(std::span<const double> xs) {
    Estimate e;
    e.n = xs.size();
    if (xs.empty()) return e;
    double s = 0.0;
    for (double x : xs) s += x;
    e.mean = s / static_cast<double>(e.n);
    if (e.n < 2) return e;
    double ss = 0.0;
    for (double x : xs) ss += (x - e.mean) * (x - e.mean);
    e.std_error = std::sqrt(ss / static_cast<double>(e.n - 1) / static_cast<double>(e.n));
    return e;
}

Estimate variance_estimate(std::span<const double> xs) {
    Estimate e;
    e.n = xs.size();
    if (e.n < 2) return e;
    const double n = static_cast<double>(e.n);
    double s = 0.0;
    for (double x : xs) s += x;
    const double m = s / n;
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double c = (x - m) * (x - m);
        m2 += c;
        m4 += c * c;
    }
    e.mean = m2 / (n - 1.0);
    m4 /= n;
    const double v = (m4 - e.mean * e.mean * (n - 3.0) / (n - 1.0)) / n;
    e.std_error = std::sqrt(std::max(v, 0.0));
    return e;
}

void check_ensemble(const Ensemble& ens) {
    if (ens.streams.size() != ens.trajectories.size())
        throw InvalidArgument("ensemble: stream list and trajectory list differ in length");
    std::set<std::uint64_t> seen(ens.streams.begin(), ens.streams.end());
    if (seen.size() != ens.streams.size()) throw InvalidArgument("ensemble: stream ids are not distinct");
    if (ens.trajectories.empty()) return;
    const Trajectory& t0 = ens.trajectories.front();
    for (const Trajectory& t : ens.trajectories)
        if (t.h != t0.h || t.steps != t0.steps || t.dimension() != t0.dimension())
            throw InvalidArgument("ensemble: trajectories do not share a grid");
}

Ensemble build_ensemble(const ModelSpec& spec, std::uint64_t seed, std::size_t n_paths, unsigned workers,
                        const std::function<Trajectory(std::uint64_t stream)>& simulate) {
    Ensemble ens;
    ens.spec = spec;
    ens.seed = seed;
    ens.streams.resize(n_paths);
    for (std::size_t k = 0; k < n_paths; ++k) ens.streams[k] = k;
    ens.trajectories = parallel_map(n_paths, workers, [&](std::size_t k) { return simulate(k); });
    check_ensemble(ens);
    return ens;
}

double sup_distance(const Trajectory& a, const Trajectory& b) {
    if (a.dimension() != b.dimension()) throw InvalidArgument("sup_distance: dimension mismatch");
    const bool a_coarse = a.h >= b.h;
    const Trajectory& coarse = a_coarse ? a : b;
    const Trajectory& fine = a_coarse ? b : a;
    const double r = coarse.h / fine.h;
    const auto k = static_cast<std::size_t>(std::llround(r));
    if (k == 0 || std::abs(r - static_cast<double>(k)) > 1e-9 * r)
        throw InvalidArgument("sup_distance: steps are not commensurate");
    const std::size_t n = std::min(coarse.steps, fine.steps / k);
    const int d = a.dimension();
    double worst = 0.0;
    for (std::size_t m = 0; m <= n; ++m) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
            const double e = coarse.q_at(m, i) - fine.q_at(m * k, i);
            s += e * e;
        }
        worst = std::max(worst, std::sqrt(s));
    }
    return worst;
}

namespace {

double quantile(std::vector<double> xs, double p) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    const double pos = p * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

}  // namespace

SupDistance coupled_sup_distance(const Ensemble& a, const Ensemble& b, std::span<const double> kappa) {
    if (a.seed != b.seed || a.streams != b.streams)
        throw InvalidArgument("coupled_sup_distance: ensembles are not driven by the same streams");
    SupDistance out;
    out.samples.resize(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out.samples[k] = sup_distance(a.trajectories[k], b.trajectories[k]);
    const Estimate e = mean_estimate(out.samples);
    out.mean = e.mean;
    out.std_error = e.std_error;
    out.median = quantile(out.samples, 0.5);
    out.q95 = quantile(out.samples, 0.95);
    out.kappa.assign(kappa.begin(), kappa.end());
    for (double c : kappa) {
        std::size_t hits = 0;
        for (double s : out.samples) hits += s > c ? 1 : 0;
        out.exceed_probability.push_back(out.samples.empty() ? 0.0
                                                             : static_cast<double>(hits) /
                                                                   static_cast<double>(out.samples.size()));
    }
    return out;
}

WeakError weak_error(std::span<const Point> terminals, const Functional& f, double reference) {
    std::vector<double> xs(terminals.size());
    for (std::size_t k = 0; k < terminals.size(); ++k) {
        const Point& q = terminals[k];
        switch (f.kind) {
            case Functional::Kind::TerminalMean:
            case Functional::Kind::TerminalVariance: xs[k] = q[f.component]; break;
            case Functional::Kind::TerminalSecondMoment: xs[k] = q[f.component] * q[f.component]; break;
            case Functional::Kind::BoundedTest:
                if (!f.test) throw InvalidArgument("weak_error: bounded test function missing");
                xs[k] = f.test(q);
                break;
        }
    }
    const Estimate e = f.kind == Functional::Kind::TerminalVariance ? variance_estimate(xs) : mean_estimate(xs);
    WeakError w;
    w.estimate = e.mean;
    w.std_error = e.std_error;
    w.reference = reference;
    w.n = e.n;
    const double diff = e.mean - reference;
    if (e.std_error > 0.0)
        w.z = diff / e.std_error;
    else
        w.z = diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
    return w;
}

WeakError weak_error(const Ensemble& ens, const Functional& functional, double reference) {
    std::vector<Point> terminals;
    terminals.reserve(ens.size());
    for (const Trajectory& t : ens.trajectories) terminals.push_back(t.terminal());
    return weak_error(terminals, functional, reference);
}

std::optional<bool> decreasing_trend(std::span<const double> estimate, std::span<const double> std_error) {
    if (estimate.size() < 2) return std::nullopt;
    for (std::size_t i = 0; i + 1 < estimate.size(); ++i) {
        if (!(estimate[i + 1] < estimate[i])) return false;
        if (!(estimate[i + 1] + std_error[i + 1] < estimate[i] - std_error[i])) return false;
    }
    return true;
}

SweepResult run_sweep(const SweepPlan& plan) {
    const auto& names = sweep_parameters();
    if (std::find(names.begin(), names.end(), plan.parameter) == names.end())
        throw InvalidArgument("run_sweep: unknown swept parameter '" + plan.parameter + "'");
    if (plan.values.empty()) throw InvalidArgument("run_sweep: no values");
    if (plan.values.size() > 1) {
        const bool up = plan.values[1] > plan.values[0];
        for (std::size_t i = 0; i + 1 < plan.values.size(); ++i) {
            const bool step_up = plan.values[i + 1] > plan.values[i];
            if (plan.values[i + 1] == plan.values[i] || step_up != up)
                throw InvalidArgument("run_sweep: values must be strictly monotone");
        }
    }
    if (plan.n_paths < 2) throw InvalidArgument("run_sweep: need at least two paths");
    if (!plan.sample) throw InvalidArgument("run_sweep: no sampler");

    const std::size_t m = plan.values.size();
    const auto rows = parallel_map(plan.n_paths, plan.workers, [&](std::size_t k) {
        auto r = plan.sample(static_cast<std::uint64_t>(k));
        if (r.size() != m) throw InvalidArgument("run_sweep: sampler returned the wrong number of samples");
        return r;
    });

    SweepResult out;
    out.parameter = plan.parameter;
    out.statistic = plan.statistic;
    out.values = plan.values;
    out.n_paths = plan.n_paths;
    std::vector<double> column(plan.n_paths);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < plan.n_paths; ++k) column[k] = rows[k][j];
        const Estimate e = mean_estimate(column);
        out.estimate.push_back(e.mean);
        out.std_error.push_back(e.std_error);
    }
    out.decreasing = decreasing_trend(out.estimate, out.std_error);
    return out;
}

void write_csv(std::ostream& os, const SweepResult& r) {
    io::write_header(os, {"parameter", "value", "estimate", "std_error", "n_paths"});
    for (std::size_t j = 0; j < r.values.size(); ++j) {
        os << r.parameter << ',';
        io::write_row(os, {r.values[j], r.estimate[j], r.std_error[j], static_cast<double>(r.n_paths)});
    }
}

}  // namespace vfsk
