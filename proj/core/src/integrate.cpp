#include "vfsk/integrate.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

#include "vfsk/error.hpp"
#include "vfsk/io.hpp"
#include "ou.hpp"

namespace vfsk {

const char* to_string(Equation eq) noexcept {
    switch (eq) {
        case Equation::LangevinWhite: return "langevin-white";
        case Equation::LangevinMollified: return "langevin-mollified";
        case Equation::ItoLimit: return "ito-limit";
        case Equation::StratonovichLimit: return "stratonovich-limit";
        case Equation::SmoothLimitOde: return "smooth-limit-ode";
    }
    return "unknown";
}

Point Trajectory::position(std::size_t n) const noexcept {
    Point x{};
    for (int i = 0; i < spec.dimension; ++i) x[i] = q_at(n, i);
    return x;
}

namespace {

void require_smooth(const ModelSpec& spec, const char* who) {
    require_valid(spec);
    if (spec.friction.is_piecewise_constant())
        throw Unsupported(std::string(who) + ": step friction unsupported by integrators");
}

// Number of `unit` cells in `h`; throws unless h is a positive integer multiple.
std::size_t ratio(double h, double unit, const char* who, const char* what) {
    if (!(h > 0.0)) throw InvalidArgument(std::string(who) + ": step must be positive");
    const double r = h / unit;
    const auto k = static_cast<std::size_t>(std::llround(r));
    if (k == 0 || std::abs(r - static_cast<double>(k)) > 1e-9 * r)
        throw InvalidArgument(std::string(who) + ": step must be an integer multiple of " + what);
    return k;
}

std::size_t step_count(double horizon, double h, const char* who) {
    const auto n = static_cast<std::size_t>(std::floor(horizon / h + 1e-9));
    if (n == 0) throw InvalidArgument(std::string(who) + ": horizon shorter than one step");
    return n;
}

Trajectory start(const ModelSpec& spec, Equation eq, std::string scheme, double h, std::size_t n,
                 bool momentum) {
    Trajectory tr;
    tr.equation = eq;
    tr.scheme = std::move(scheme);
    tr.spec = spec;
    tr.h = h;
    tr.steps = n;
    const int d = spec.dimension;
    tr.q.resize((n + 1) * d);
    for (int i = 0; i < d; ++i) tr.q[i] = spec.initial_position[i];
    if (momentum) {
        tr.p.resize((n + 1) * d);
        for (int i = 0; i < d; ++i) tr.p[i] = spec.initial_momentum[i];
    }
    return tr;
}

void guard(const Point& q, int d, std::size_t n, const char* who) {
    for (int i = 0; i < d; ++i)
        if (!(std::abs(q[i]) <= kBlowUpThreshold))  // also catches NaN
            throw BlowUp(std::string(who) + ": trajectory left |q| <= 1e8", n);
}

// Wiener increment over path cells [n k, (n+1) k).
double increment(const WienerPath& path, std::size_t n, std::size_t k, int i) noexcept {
    return path.at((n + 1) * k, i) - path.at(n * k, i);
}

}  // namespace

Trajectory simulate_langevin_white(const ModelSpec& spec, const WienerPath& path, double h) {
    constexpr const char* who = "simulate_langevin_white";
    require_smooth(spec, who);
    const int d = spec.dimension;
    if (path.dimension() != d) throw InvalidArgument(std::string(who) + ": path dimension mismatch");
    const std::size_t k = ratio(h, path.dt(), who, "the path step");
    const std::size_t n_steps = step_count(spec.horizon, h, who);
    if (n_steps * k > path.steps()) throw InvalidArgument(std::string(who) + ": path shorter than horizon");

    Trajectory tr = start(spec, Equation::LangevinWhite, "frozen-ou", h, n_steps, true);
    tr.key = path.key();
    const double mu = spec.mass, sigma = spec.noise_scale;
    Point q = spec.initial_position, p = spec.initial_momentum;
    for (std::size_t n = 0; n < n_steps; ++n) {
        const double lam = spec.friction_at(q);
        const Point b = spec.drift_at(q);
        const detail::OuStep ou(lam / mu, h);
        const double decay = ou.decay, c1 = ou.c1;
        for (int i = 0; i < d; ++i) {
            const double dw = increment(path, n, k, i);
            const double xi = ou.draw(dw, path.aux_normal(n * d + i), h);
            const double v = b[i] / lam;
            const double p_new = decay * p[i] + v * (1.0 - decay) + (sigma / mu) * xi;
            q[i] += c1 * p[i] + v * (h - c1) + (sigma / lam) * (dw - xi);
            p[i] = p_new;
        }
        guard(q, d, n + 1, who);
        for (int i = 0; i < d; ++i) {
            tr.q[(n + 1) * d + i] = q[i];
            tr.p[(n + 1) * d + i] = p[i];
        }
    }
    return tr;
}

Trajectory simulate_langevin_mollified(const ModelSpec& spec, const MollifiedNoise& noise, double h) {
    constexpr const char* who = "simulate_langevin_mollified";
    require_smooth(spec, who);
    const int d = spec.dimension;
    if (noise.dimension() != d) throw InvalidArgument(std::string(who) + ": noise dimension mismatch");
    if (h > noise.delta() / 20.0 * (1.0 + 1e-12))
        throw InvalidArgument(std::string(who) + ": step exceeds delta / 20");
    const std::size_t k = ratio(h, noise.step(), who, "the noise step");
    const std::size_t n_steps = step_count(spec.horizon, h, who);
    if (n_steps * k > noise.steps()) throw InvalidArgument(std::string(who) + ": noise shorter than horizon");

    Trajectory tr = start(spec, Equation::LangevinMollified, "exponential-euler", h, n_steps, true);
    tr.key = noise.path().key();
    const double mu = spec.mass, sigma = spec.noise_scale;
    Point q = spec.initial_position, p = spec.initial_momentum;
    for (std::size_t n = 0; n < n_steps; ++n) {
        const double lam = spec.friction_at(q);
        const Point b = spec.drift_at(q);
        const detail::OuStep ou(lam / mu, h);
        const double decay = ou.decay, c1 = ou.c1;
        for (int i = 0; i < d; ++i) {
            const double v = (b[i] + sigma * noise.derivative(n * k, i)) / lam;
            const double p_new = decay * p[i] + v * (1.0 - decay);
            q[i] += c1 * p[i] + v * (h - c1);
            p[i] = p_new;
        }
        guard(q, d, n + 1, who);
        for (int i = 0; i < d; ++i) {
            tr.q[(n + 1) * d + i] = q[i];
            tr.p[(n + 1) * d + i] = p[i];
        }
    }
    return tr;
}

Trajectory simulate_smooth_limit(const ModelSpec& spec, const MollifiedNoise& noise, double h) {
    constexpr const char* who = "simulate_smooth_limit";
    require_smooth(spec, who);
    const int d = spec.dimension;
    if (noise.dimension() != d) throw InvalidArgument(std::string(who) + ": noise dimension mismatch");
    if (h > noise.delta() / 20.0 * (1.0 + 1e-12))
        throw InvalidArgument(std::string(who) + ": step exceeds delta / 20");
    const std::size_t k = ratio(0.5 * h, noise.step(), who, "the noise step (at h/2)");
    const std::size_t n_steps = step_count(spec.horizon, h, who);
    if (2 * n_steps * k > noise.steps()) throw InvalidArgument(std::string(who) + ": noise shorter than horizon");

    Trajectory tr = start(spec, Equation::SmoothLimitOde, "rk4", h, n_steps, false);
    tr.key = noise.path().key();
    const double sigma = spec.noise_scale;
    auto rhs = [&](const Point& x, std::size_t node) {
        const double lam = spec.friction_at(x);
        const Point b = spec.drift_at(x);
        Point out{};
        for (int i = 0; i < d; ++i) out[i] = (b[i] + sigma * noise.derivative(node, i)) / lam;
        return out;
    };
    auto axpy = [d](const Point& x, double a, const Point& y) {
        Point r = x;
        for (int i = 0; i < d; ++i) r[i] += a * y[i];
        return r;
    };
    Point q = spec.initial_position;
    for (std::size_t n = 0; n < n_steps; ++n) {
        const std::size_t n0 = 2 * n * k, nm = n0 + k, n1 = n0 + 2 * k;
        const Point k1 = rhs(q, n0);
        const Point k2 = rhs(axpy(q, 0.5 * h, k1), nm);
        const Point k3 = rhs(axpy(q, 0.5 * h, k2), nm);
        const Point k4 = rhs(axpy(q, h, k3), n1);
        for (int i = 0; i < d; ++i) q[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        guard(q, d, n + 1, who);
        for (int i = 0; i < d; ++i) tr.q[(n + 1) * d + i] = q[i];
    }
    return tr;
}

namespace {

// Shared driver for the first-order SDEs: drift a(q) and scalar noise g(q) = sigma / lambda(q).
// drift(q, lam) returns a(q) and stores lambda(q) in lam. D is the dimension,
// fixed at compile time so the component loops unroll.
template <int D, class Drift>
void first_order_loop(const ModelSpec& spec, const WienerPath& path, double h, std::size_t k, bool heun,
                      const char* who, Drift& drift, Trajectory& tr) {
    constexpr int d = D;
    const std::size_t n_steps = tr.steps;
    const double sigma = spec.noise_scale;
    Point q = spec.initial_position;
    Point dw{};
    for (std::size_t n = 0; n < n_steps; ++n) {
        for (int i = 0; i < d; ++i) dw[i] = increment(path, n, k, i);
        double lam = 0.0;
        const Point a = drift(q, lam);
        const double g = sigma / lam;
        if (!heun) {
            for (int i = 0; i < d; ++i) q[i] += a[i] * h + g * dw[i];
        } else {
            Point pred = q;
            for (int i = 0; i < d; ++i) pred[i] += a[i] * h + g * dw[i];
            double lam_p = 0.0;
            const Point a_p = drift(pred, lam_p);
            const double g_p = sigma / lam_p;
            for (int i = 0; i < d; ++i) q[i] += 0.5 * (a[i] + a_p[i]) * h + 0.5 * (g + g_p) * dw[i];
        }
        guard(q, d, n + 1, who);
        for (int i = 0; i < d; ++i) tr.q[(n + 1) * d + i] = q[i];
    }
}

template <class Drift>
Trajectory first_order(const ModelSpec& spec, const WienerPath& path, double h, Equation eq, bool heun,
                       const char* who, Drift drift) {
    require_smooth(spec, who);
    const int d = spec.dimension;
    if (path.dimension() != d) throw InvalidArgument(std::string(who) + ": path dimension mismatch");
    const std::size_t k = ratio(h, path.dt(), who, "the path step");
    const std::size_t n_steps = step_count(spec.horizon, h, who);
    if (n_steps * k > path.steps()) throw InvalidArgument(std::string(who) + ": path shorter than horizon");

    Trajectory tr = start(spec, eq, heun ? "heun" : "euler-maruyama", h, n_steps, false);
    tr.key = path.key();
    switch (d) {
        case 1: first_order_loop<1>(spec, path, h, k, heun, who, drift, tr); break;
        case 2: first_order_loop<2>(spec, path, h, k, heun, who, drift, tr); break;
        default: first_order_loop<3>(spec, path, h, k, heun, who, drift, tr); break;
    }
    return tr;
}

}  // namespace

Trajectory simulate_ito_limit(const ModelSpec& spec, const WienerPath& path, double h, ItoOptions options) {
    const int d = spec.dimension;
    const double s2 = spec.noise_scale * spec.noise_scale;
    // Ito drift b/lambda - c s2 grad(lambda)/(2 lambda^3) with c in {0, 1}. The
    // Heun scheme integrates the Stratonovich form, whose drift is larger by
    // s2 grad(lambda)/(2 lambda^3).
    const double c = (options.include_correction ? 1.0 : 0.0) -
                     (options.scheme == ItoScheme::Heun ? 1.0 : 0.0);
    const bool heun = options.scheme == ItoScheme::Heun;
    if (c == 0.0 && spec.drift.is_zero()) {
        Trajectory tr = first_order(spec, path, h, Equation::ItoLimit, heun, "simulate_ito_limit",
                                    [&](const Point& q, double& lam) {
                                        lam = spec.friction_at(q);
                                        return Point{};
                                    });
        if (!options.include_correction) tr.scheme += "-uncorrected";
        return tr;
    }
    auto drift = [&](const Point& q, double& lam) {
        Point a{};
        Point g{};
        lam = c != 0.0 ? spec.friction_and_gradient_at(q, g) : spec.friction_at(q);
        if (!spec.drift.is_zero()) {
            const Point b = spec.drift_at(q);
            for (int i = 0; i < d; ++i) a[i] = b[i] / lam;
        }
        if (c != 0.0) {
            const double w = c * s2 / (2.0 * lam * lam * lam);
            for (int i = 0; i < d; ++i) a[i] -= w * g[i];
        }
        return a;
    };
    Trajectory tr = first_order(spec, path, h, Equation::ItoLimit, heun, "simulate_ito_limit", drift);
    if (!options.include_correction) tr.scheme += "-uncorrected";
    return tr;
}

Trajectory simulate_stratonovich_limit(const ModelSpec& spec, const WienerPath& path, double h) {
    const int d = spec.dimension;
    if (spec.drift.is_zero())
        return first_order(spec, path, h, Equation::StratonovichLimit, true, "simulate_stratonovich_limit",
                           [&](const Point& q, double& lam) {
                               lam = spec.friction_at(q);
                               return Point{};
                           });
    auto drift = [&](const Point& q, double& lam) {
        lam = spec.friction_at(q);
        Point a{};
        const Point b = spec.drift_at(q);
        for (int i = 0; i < d; ++i) a[i] = b[i] / lam;
        return a;
    };
    return first_order(spec, path, h, Equation::StratonovichLimit, true, "simulate_stratonovich_limit", drift);
}

void write_csv(std::ostream& os, const Trajectory& traj) {
    const int d = traj.dimension();
    std::vector<std::string> head{"t"};
    for (int i = 0; i < d; ++i) head.push_back("q_" + std::to_string(i + 1));
    if (traj.has_momentum())
        for (int i = 0; i < d; ++i) head.push_back("p_" + std::to_string(i + 1));
    io::write_header(os, head);
    std::vector<double> row;
    for (std::size_t n = 0; n <= traj.steps; ++n) {
        row.assign(1, traj.time(n));
        for (int i = 0; i < d; ++i) row.push_back(traj.q_at(n, i));
        if (traj.has_momentum())
            for (int i = 0; i < d; ++i) row.push_back(traj.p_at(n, i));
        io::write_row(os, row);
    }
}

std::string sidecar_json(const Trajectory& traj) {
    const ModelSpec& s = traj.spec;
    const int d = s.dimension;
    auto vec = [d](const Point& p) { return std::vector<double>(p.begin(), p.begin() + d); };
    nlohmann::ordered_json j;
    j["equation"] = to_string(traj.equation);
    j["scheme"] = traj.scheme;
    j["h"] = traj.h;
    j["steps"] = traj.steps;
    if (traj.key) {
        j["seed"] = traj.key->seed;
        j["stream"] = traj.key->stream;
    } else {
        j["seed"] = nullptr;
        j["stream"] = nullptr;
    }
    j["model"] = {
        {"dimension", d},
        {"friction", s.friction.description()},
        {"drift", s.drift.description()},
        {"sigma", s.noise_scale},
        {"mu", s.mass},
        {"delta", s.mollifier_width},
        {"epsilon", s.oscillation_scale},
        {"q0", vec(s.initial_position)},
        {"p0", vec(s.initial_momentum)},
        {"T", s.horizon},
    };
    return j.dump(2);
}

}  // namespace vfsk
