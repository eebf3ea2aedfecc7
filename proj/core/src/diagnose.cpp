#include "vfsk/diagnose.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ou.hpp"
#include "vfsk/error.hpp"
#include "vfsk/io.hpp"
#include "vfsk/parallel.hpp"

namespace vfsk {

std::vector<double> friction_action(const Trajectory& traj) {
    std::vector<double> a(traj.steps + 1, 0.0);
    double prev = traj.spec.friction_at(traj.position(0));
    for (std::size_t n = 0; n < traj.steps; ++n) {
        const double next = traj.spec.friction_at(traj.position(n + 1));
        a[n + 1] = a[n] + 0.5 * traj.h * (prev + next);
        prev = next;
    }
    return a;
}

double Decomposition::max_residual() const noexcept {
    double m = 0.0;
    for (double r : residual) m = std::max(m, r);
    return m;
}

Decomposition decompose(const Trajectory& traj, const WienerPath& path) {
    if (traj.equation != Equation::LangevinWhite || !traj.has_momentum())
        throw InvalidArgument("decompose: trajectory must come from simulate_langevin_white");
    const ModelSpec& spec = traj.spec;
    const int d = spec.dimension;
    if (path.dimension() != d) throw InvalidArgument("decompose: path dimension mismatch");
    const double h = traj.h;
    const double r = h / path.dt();
    const auto k = static_cast<std::size_t>(std::llround(r));
    if (k == 0 || std::abs(r - static_cast<double>(k)) > 1e-9 * r || traj.steps * k > path.steps())
        throw InvalidArgument("decompose: trajectory and path grids do not match");
    if (traj.key != path.key()) throw InvalidArgument("decompose: trajectory and path streams differ");

    const std::size_t rows = traj.steps + 1;
    Decomposition out;
    out.dimension = d;
    out.h = h;
    out.steps = traj.steps;
    for (auto* v : {&out.alpha, &out.beta, &out.gamma, &out.drift_integral, &out.noise_integral})
        v->assign(rows * d, 0.0);
    out.action.assign(rows, 0.0);
    out.residual.assign(rows, 0.0);

    const double mu = spec.mass, sigma = spec.noise_scale;
    // Momentum split into the parts driven by p_0, by b and by the noise.
    Point pa = spec.initial_momentum, pb{}, pg{};
    for (std::size_t n = 0; n < traj.steps; ++n) {
        const Point q = traj.position(n);
        const double lam = spec.friction_at(q);
        const Point b = spec.drift_at(q);
        const detail::OuStep ou(lam / mu, h);
        out.action[n + 1] = out.action[n] + lam * h;
        for (int i = 0; i < d; ++i) {
            const std::size_t cur = n * d + i, nxt = cur + d;
            const double dw = path.at((n + 1) * k, i) - path.at(n * k, i);
            const double xi = ou.draw(dw, path.aux_normal(n * d + i), h);
            const double v = b[i] / lam;
            out.alpha[nxt] = out.alpha[cur] + ou.c1 * pa[i];
            out.beta[nxt] = out.beta[cur] + ou.c1 * pb[i] + v * (h - ou.c1);
            out.gamma[nxt] = out.gamma[cur] + ou.c1 * pg[i] + (sigma / lam) * (dw - xi);
            out.drift_integral[nxt] = out.drift_integral[cur] + v * h;
            out.noise_integral[nxt] = out.noise_integral[cur] + (sigma / lam) * dw;
            pa[i] = ou.decay * pa[i];
            pb[i] = ou.decay * pb[i] + v * (1.0 - ou.decay);
            pg[i] = ou.decay * pg[i] + (sigma / mu) * xi;
        }
    }
    for (std::size_t n = 0; n < rows; ++n) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
            const std::size_t j = n * d + i;
            const double e = traj.q_at(n, i) - spec.initial_position[i] - out.alpha[j] - out.beta[j] - out.gamma[j];
            s += e * e;
        }
        out.residual[n] = std::sqrt(s);
    }
    return out;
}

double decomposition_tolerance(const ModelSpec& spec, double h) {
    return 10.0 * h * (1.0 + spec.horizon) *
           (spec.noise_scale + spec.drift.bound() + norm(spec.initial_momentum, spec.dimension));
}

double diagnose_step(double mu, double horizon, const DiagnoseOptions& opt) {
    const double target = std::min(opt.h_over_mu * mu, opt.max_h);
    const double n = std::ceil(horizon / target - 1e-9);
    return horizon / n;
}

namespace {

template <class PerPath>
void for_each_mu(const ModelSpec& spec, const std::vector<double>& mu_list, std::size_t n_paths, double horizon,
                 const DiagnoseOptions& opt, PerPath&& per_path) {
    for (std::size_t j = 0; j < mu_list.size(); ++j) {
        ModelSpec s = spec;
        s.mass = mu_list[j];
        s.horizon = horizon;
        require_valid(s);
        const double h = diagnose_step(s.mass, horizon, opt);
        parallel_for(n_paths, opt.workers, [&](std::size_t k) {
            const WienerPath path = sample_wiener(s.dimension, horizon, h, opt.seed, k);
            const Trajectory tr = simulate_langevin_white(s, path, h);
            per_path(j, k, decompose(tr, path));
        });
    }
}

double sq_norm_terminal(const Decomposition& dec, const std::vector<double>& a, const std::vector<double>* b) {
    double s = 0.0;
    for (int i = 0; i < dec.dimension; ++i) {
        const double e = dec.at(a, dec.steps, i) - (b ? dec.at(*b, dec.steps, i) : 0.0);
        s += e * e;
    }
    return s;
}

}  // namespace

std::vector<GammaGapRow> gamma_gap(const ModelSpec& spec, const std::vector<double>& mu_list, std::size_t n_paths,
                                   double horizon, const DiagnoseOptions& opt) {
    std::vector<std::vector<double>> samples(mu_list.size(), std::vector<double>(n_paths));
    for_each_mu(spec, mu_list, n_paths, horizon, opt, [&](std::size_t j, std::size_t k, const Decomposition& dec) {
        samples[j][k] = sq_norm_terminal(dec, dec.gamma, &dec.noise_integral);
    });
    std::vector<GammaGapRow> rows;
    for (std::size_t j = 0; j < mu_list.size(); ++j) rows.push_back({mu_list[j], mean_estimate(samples[j])});
    return rows;
}

std::vector<AlphaBetaRow> alpha_beta_residuals(const ModelSpec& spec, const std::vector<double>& mu_list,
                                               std::size_t n_paths, double horizon, const DiagnoseOptions& opt) {
    std::vector<std::vector<double>> a(mu_list.size(), std::vector<double>(n_paths));
    std::vector<std::vector<double>> b = a;
    for_each_mu(spec, mu_list, n_paths, horizon, opt, [&](std::size_t j, std::size_t k, const Decomposition& dec) {
        a[j][k] = sq_norm_terminal(dec, dec.alpha, nullptr);
        b[j][k] = sq_norm_terminal(dec, dec.beta, &dec.drift_integral);
    });
    std::vector<AlphaBetaRow> rows;
    for (std::size_t j = 0; j < mu_list.size(); ++j)
        rows.push_back({mu_list[j], mean_estimate(a[j]), mean_estimate(b[j])});
    return rows;
}

void write_csv(std::ostream& os, const std::vector<GammaGapRow>& rows) {
    io::write_header(os, {"mu", "estimate", "std_error", "n_paths"});
    for (const auto& r : rows) io::write_row(os, {r.mu, r.gap.mean, r.gap.std_error, static_cast<double>(r.gap.n)});
}

void write_csv(std::ostream& os, const std::vector<AlphaBetaRow>& rows) {
    io::write_header(os, {"mu", "alpha_sq", "alpha_se", "beta_residual_sq", "beta_residual_se", "n_paths"});
    for (const auto& r : rows)
        io::write_row(os, {r.mu, r.alpha_sq.mean, r.alpha_sq.std_error, r.beta_residual_sq.mean,
                           r.beta_residual_sq.std_error, static_cast<double>(r.alpha_sq.n)});
}

}  // namespace vfsk
