#include "vfsk/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>

#include "vfsk/error.hpp"
#include "vfsk/io.hpp"

namespace vfsk {

// WienerPath ---------------------------------------------------------------

WienerPath::WienerPath(int dim, double dt, std::size_t steps, std::vector<double> values,
                       std::optional<StreamKey> key)
    : dim_(dim), dt_(dt), steps_(steps), values_(std::move(values)), key_(key) {}

WienerPath WienerPath::from_values(int dim, double dt, std::vector<double> values) {
    if (dim < 1 || dim > kMaxDim) throw InvalidArgument("path dimension out of range");
    if (!(dt > 0.0)) throw InvalidArgument("path step dt must be positive");
    if (values.size() < 2 * static_cast<std::size_t>(dim) || values.size() % dim != 0)
        throw InvalidArgument("path values must hold at least two rows of d entries");
    const std::size_t steps = values.size() / dim - 1;
    return WienerPath(dim, dt, steps, std::move(values), std::nullopt);
}

Point WienerPath::node(std::size_t n) const noexcept {
    Point p{};
    for (int i = 0; i < dim_; ++i) p[i] = at(n, i);
    return p;
}

double WienerPath::interpolate(double t, int i) const noexcept {
    if (t <= 0.0) return at(0, i);
    const double x = t / dt_;
    auto n = static_cast<std::size_t>(x);
    if (n >= steps_) return at(steps_, i);
    const double f = x - static_cast<double>(n);
    return at(n, i) + f * (at(n + 1, i) - at(n, i));
}

double WienerPath::aux_normal(std::uint64_t index) const noexcept {
    if (!key_) return 0.0;
    return normal_at(*key_, DrawTag::LangevinAux, index);
}

WienerPath sample_wiener(int dim, double t_ext, double dt, std::uint64_t seed, std::uint64_t stream) {
    if (dim < 1 || dim > kMaxDim) throw InvalidArgument("path dimension out of range");
    if (!(dt > 0.0)) throw InvalidArgument("sample_wiener: dt must be positive");
    if (!(t_ext > 0.0)) throw InvalidArgument("sample_wiener: horizon must be positive");
    const auto steps = static_cast<std::size_t>(std::ceil(t_ext / dt - 1e-9));
    const StreamKey key{seed, stream};
    std::vector<double> v((steps + 1) * dim, 0.0);
    CounterRng rng(key, DrawTag::WienerIncrement);
    const double sd = std::sqrt(dt);
    for (std::size_t n = 0; n < steps; ++n)
        for (int i = 0; i < dim; ++i) v[(n + 1) * dim + i] = v[n * dim + i] + sd * rng.normal();
    return WienerPath(dim, dt, steps, std::move(v), key);
}

// Kernel -------------------------------------------------------------------

namespace {

double bump(double s) noexcept {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return std::exp(-1.0 / (s * (1.0 - s)));
}

double bump_dot(double s) noexcept {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double u = s * (1.0 - s);
    return bump(s) * (1.0 - 2.0 * s) / (u * u);
}

}  // namespace

double MollifierKernel::mass() const noexcept {
    double m = 0.0;
    for (std::size_t j = 0; j < size(); ++j) m += weight[j] * rho[j];
    return m;
}

double MollifierKernel::derivative_mass() const noexcept {
    double m = 0.0;
    for (std::size_t j = 0; j < size(); ++j) m += weight[j] * rho_dot[j];
    return m;
}

double MollifierKernel::first_moment() const noexcept {
    double m = 0.0;
    for (std::size_t j = 0; j < size(); ++j) m += weight[j] * s[j] * rho[j];
    return m;
}

double MollifierKernel::max_abs_rho_dot() const noexcept {
    double m = 0.0;
    for (double v : rho_dot) m = std::max(m, std::abs(v));
    return m;
}

double MollifierKernel::rho_at(double x) const noexcept { return normalization * bump(x); }
double MollifierKernel::rho_dot_at(double x) const noexcept { return normalization * bump_dot(x); }

MollifierKernel build_kernel(std::size_t m) {
    if (m < 512) throw InvalidArgument("build_kernel: need at least 512 nodes");
    MollifierKernel k;
    k.s.resize(m);
    k.weight.assign(m, 1.0 / static_cast<double>(m - 1));
    k.weight.front() *= 0.5;
    k.weight.back() *= 0.5;
    k.rho.resize(m);
    k.rho_dot.resize(m);
    double z = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        k.s[j] = static_cast<double>(j) / static_cast<double>(m - 1);
        z += k.weight[j] * bump(k.s[j]);
    }
    k.normalization = 1.0 / z;
    for (std::size_t j = 0; j < m; ++j) {
        k.rho[j] = k.normalization * bump(k.s[j]);
        k.rho_dot[j] = k.normalization * bump_dot(k.s[j]);
    }
    return k;
}

// Mollification ------------------------------------------------------------

MollifiedNoise::MollifiedNoise(std::shared_ptr<const WienerPath> path, double delta, double step,
                               std::size_t steps, std::vector<double> values, std::vector<double> derivative)
    : path_(std::move(path)),
      delta_(delta),
      step_(step),
      steps_(steps),
      values_(std::move(values)),
      deriv_(std::move(derivative)) {}

namespace {

struct KernelMoments {
    std::vector<double> R;
    std::vector<double> M;
};

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

// R and M at s_j = j g / delta for j g < delta, then at s = 1.
KernelMoments kernel_moments(const MollifierKernel& kernel, double delta, double g) {
    static const auto rule = [] {
        std::pair<std::vector<double>, std::vector<double>> r;
        gauss_legendre(12, r.first, r.second);
        return r;
    }();
    std::vector<double> s{0.0};
    for (std::int64_t j = 1;; ++j) {
        const double sj = static_cast<double>(j) * g / delta;
        if (sj >= 1.0 - 1e-12) break;
        s.push_back(sj);
    }
    s.push_back(1.0);

    KernelMoments km;
    km.R.assign(s.size(), 0.0);
    km.M.assign(s.size(), 0.0);
    constexpr double kMaxPanel = 1.0 / 256;
    for (std::size_t j = 0; j + 1 < s.size(); ++j) {
        const int pieces = std::max(1, static_cast<int>(std::ceil((s[j + 1] - s[j]) / kMaxPanel)));
        const double width = (s[j + 1] - s[j]) / pieces;
        double r = 0.0, m = 0.0;
        for (int p = 0; p < pieces; ++p) {
            const double mid = s[j] + (p + 0.5) * width;
            for (std::size_t q = 0; q < rule.first.size(); ++q) {
                const double x = mid + 0.5 * width * rule.first[q];
                const double f = 0.5 * width * rule.second[q] * kernel.rho_at(x);
                r += f;
                m += f * x;
            }
        }
        km.R[j + 1] = km.R[j] + r;
        km.M[j + 1] = km.M[j] + m;
    }
    // Unit mass exactly, so constant paths are reproduced to roundoff.
    const double mass = km.R.back();
    for (std::size_t j = 0; j < s.size(); ++j) {
        km.R[j] /= mass;
        km.M[j] /= mass;
    }
    return km;
}

}  // namespace

MollifiedNoise mollify(std::shared_ptr<const WienerPath> path, const MollifierKernel& kernel, double delta,
                       double horizon, std::optional<double> step) {
    if (!path) throw InvalidArgument("mollify: null path");
    const WienerPath& w = *path;
    const double dt = w.dt();
    if (!(delta >= 2.0 * dt * (1.0 - 1e-12)))
        throw InvalidArgument("mollify: delta must be at least twice the path step");
    if (w.horizon() < horizon + delta - 1e-9 * dt)
        throw InvalidArgument("mollify: path horizon " + std::to_string(w.horizon()) +
                              " shorter than T + delta = " + std::to_string(horizon + delta));
    const double h = step.value_or(dt);
    if (!(h > 0.0)) throw InvalidArgument("mollify: output step must be positive");
    const auto n_out = static_cast<std::size_t>(std::llround(horizon / h));
    if (std::abs(static_cast<double>(n_out) * h - horizon) > 1e-9 * horizon)
        throw InvalidArgument("mollify: output step must divide the horizon");

    // Output and path nodes live on a common lattice of spacing g.
    std::int64_t r_out = 1, r_path = 1;
    if (h <= dt) {
        r_path = std::llround(dt / h);
        if (std::abs(static_cast<double>(r_path) * h - dt) > 1e-9 * dt)
            throw InvalidArgument("mollify: output step and path step are not commensurate");
    } else {
        r_out = std::llround(h / dt);
        if (std::abs(static_cast<double>(r_out) * dt - h) > 1e-9 * h)
            throw InvalidArgument("mollify: output step and path step are not commensurate");
    }
    const double g = std::min(h, dt);
    const KernelMoments km = kernel_moments(kernel, delta, g);
    const auto top = static_cast<std::int64_t>(km.R.size()) - 1;

    // W is linear on each path cell, so the convolution with rho is exact given
    // R(s) = int_0^s rho and M(s) = int_0^s r rho(r) dr at the cell breakpoints.
    const int d = w.dimension();
    const auto& raw = w.values();
    std::vector<double> val((n_out + 1) * d, 0.0), der((n_out + 1) * d, 0.0);
    for (std::size_t n = 0; n <= n_out; ++n) {
        const std::int64_t start = static_cast<std::int64_t>(n) * r_out;  // t in lattice units
        const std::int64_t k0 = start / r_path;
        double acc_v[kMaxDim] = {0.0, 0.0, 0.0};
        double acc_d[kMaxDim] = {0.0, 0.0, 0.0};
        for (std::int64_t k = k0;; ++k) {
            const std::int64_t i0 = std::max<std::int64_t>(k * r_path - start, 0);
            if (i0 >= top) break;
            const std::int64_t i1 = std::min<std::int64_t>((k + 1) * r_path - start, top);
            const double dR = km.R[i1] - km.R[i0];
            const double dM = km.M[i1] - km.M[i0];
            const double lag = static_cast<double>(start - k * r_path) * g;  // t - t_k
            const double* lo = &raw[static_cast<std::size_t>(k) * d];
            for (int i = 0; i < d; ++i) {
                const double slope = (lo[i + d] - lo[i]) / dt;
                acc_v[i] += (lo[i] + slope * lag) * dR + slope * delta * dM;
                acc_d[i] += slope * dR;
            }
        }
        for (int i = 0; i < d; ++i) {
            val[n * d + i] = acc_v[i];
            der[n * d + i] = acc_d[i];
        }
    }
    return MollifiedNoise(std::move(path), delta, h, n_out, std::move(val), std::move(der));
}

double mollification_error(const MollifiedNoise& noise) {
    const int d = noise.dimension();
    double worst = 0.0;
    for (std::size_t n = 0; n <= noise.steps(); ++n) {
        const double t = static_cast<double>(n) * noise.step();
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
            const double e = noise.value(n, i) - noise.path().interpolate(t, i);
            s += e * e;
        }
        worst = std::max(worst, std::sqrt(s));
    }
    return worst;
}

double mollification_error(std::shared_ptr<const WienerPath> path, double delta, double horizon) {
    static const MollifierKernel kernel = build_kernel();
    return mollification_error(mollify(std::move(path), kernel, delta, horizon));
}

double derivative_consistency(const MollifiedNoise& noise) {
    const int d = noise.dimension();
    const double h = noise.step();
    double worst = 0.0;
    for (int i = 0; i < d; ++i) {
        double integral = 0.0;
        for (std::size_t n = 2; n <= noise.steps(); n += 2) {
            integral += h / 3.0 *
                        (noise.derivative(n - 2, i) + 4.0 * noise.derivative(n - 1, i) + noise.derivative(n, i));
            const double diff = noise.value(n, i) - noise.value(0, i);
            const double t = static_cast<double>(n) * h;
            worst = std::max(worst, std::abs(integral - diff) / (t + 1.0));
        }
    }
    return worst;
}

double derivative_bound_ratio(const MollifiedNoise& noise, const MollifierKernel& kernel) {
    const WienerPath& w = noise.path();
    const int d = w.dimension();
    const double scale = kernel.max_abs_rho_dot() / noise.delta();
    double worst = 0.0;
    for (std::size_t n = 0; n <= noise.steps(); ++n) {
        const double t = static_cast<double>(n) * noise.step();
        // Max of |W| over [t, t + delta]: a piecewise-linear path peaks at a
        // node or at an end of the window.
        auto norm_at = [&](double s) {
            double acc = 0.0;
            for (int i = 0; i < d; ++i) acc += w.interpolate(s, i) * w.interpolate(s, i);
            return std::sqrt(acc);
        };
        double wmax = std::max(norm_at(t), norm_at(t + noise.delta()));
        const auto first = static_cast<std::size_t>(std::ceil(t / w.dt()));
        const auto stop = std::min(w.steps(), static_cast<std::size_t>(std::floor((t + noise.delta()) / w.dt())));
        for (std::size_t k = first; k <= stop; ++k) {
            double acc = 0.0;
            for (int i = 0; i < d; ++i) acc += w.at(k, i) * w.at(k, i);
            wmax = std::max(wmax, std::sqrt(acc));
        }
        double dn = 0.0;
        for (int i = 0; i < d; ++i) dn += noise.derivative(n, i) * noise.derivative(n, i);
        dn = std::sqrt(dn);
        const double bound = scale * wmax;
        if (bound == 0.0) {
            if (dn > 0.0) return INFINITY;
            continue;
        }
        worst = std::max(worst, dn / bound);
    }
    return worst;
}

void write_csv(std::ostream& os, const WienerPath& path) {
    std::vector<std::string> head{"t"};
    for (int i = 0; i < path.dimension(); ++i) head.push_back("W_" + std::to_string(i + 1));
    io::write_header(os, head);
    std::vector<double> row(1 + path.dimension());
    for (std::size_t n = 0; n <= path.steps(); ++n) {
        row[0] = static_cast<double>(n) * path.dt();
        for (int i = 0; i < path.dimension(); ++i) row[1 + i] = path.at(n, i);
        io::write_row(os, row);
    }
}

void write_csv(std::ostream& os, const MollifiedNoise& noise) {
    const int d = noise.dimension();
    std::vector<std::string> head{"t"};
    for (int i = 0; i < d; ++i) head.push_back("Wd_" + std::to_string(i + 1));
    for (int i = 0; i < d; ++i) head.push_back("dWd_" + std::to_string(i + 1));
    io::write_header(os, head);
    std::vector<double> row(1 + 2 * d);
    for (std::size_t n = 0; n <= noise.steps(); ++n) {
        row[0] = static_cast<double>(n) * noise.step();
        for (int i = 0; i < d; ++i) {
            row[1 + i] = noise.value(n, i);
            row[1 + d + i] = noise.derivative(n, i);
        }
        io::write_row(os, row);
    }
}

}  // namespace vfsk
