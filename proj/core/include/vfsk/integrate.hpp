#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vfsk/model.hpp"
#include "vfsk/noise.hpp"

namespace vfsk {

enum class Equation {
    LangevinWhite,
    LangevinMollified,
    ItoLimit,
    StratonovichLimit,
    SmoothLimitOde,
};

/// "langevin-white", "langevin-mollified", "ito-limit", ...
const char* to_string(Equation eq) noexcept;

/// Samples on the uniform grid t_n = n h, n = 0..steps().
struct Trajectory {
    Equation equation = Equation::LangevinWhite;
    std::string scheme;
    ModelSpec spec;
    std::optional<StreamKey> key;
    double h = 0.0;
    std::size_t steps = 0;
    std::vector<double> q;
    std::vector<double> p;  // empty for first-order equations

    int dimension() const noexcept { return spec.dimension; }
    bool has_momentum() const noexcept { return !p.empty(); }
    double time(std::size_t n) const noexcept { return static_cast<double>(n) * h; }
    double q_at(std::size_t n, int i) const noexcept { return q[n * spec.dimension + i]; }
    double p_at(std::size_t n, int i) const noexcept { return p[n * spec.dimension + i]; }
    Point position(std::size_t n) const noexcept;
    Point terminal() const noexcept { return position(steps); }
};

/// |q| above this aborts a simulation with BlowUp.
inline constexpr double kBlowUpThreshold = 1e8;

/// Second-order system with white noise. Each step freezes lambda and b at
/// the left node and applies the exact Gaussian transition of the resulting
/// Ornstein-Uhlenbeck pair. The Wiener increment over the step comes from
/// `path`; the second Gaussian of the pair is drawn conditionally on it from
/// path.aux_normal(). h must be a positive integer multiple of path.dt().
Trajectory simulate_langevin_white(const ModelSpec& spec, const WienerPath& path, double h);

/// Second-order system driven by the smooth forcing sigma dW^delta/dt. The
/// forcing b(q_n) + sigma dW^delta(t_n) is frozen over a step and (q, p) are
/// advanced exactly for that frozen forcing. Needs h <= delta / 20 and h a
/// multiple of noise.step().
Trajectory simulate_langevin_mollified(const ModelSpec& spec, const MollifiedNoise& noise, double h);

/// Classical RK4 on dq/dt = b/lambda + (sigma/lambda) dW^delta/dt. Needs
/// h <= delta / 20 and h / 2 a multiple of noise.step().
Trajectory simulate_smooth_limit(const ModelSpec& spec, const MollifiedNoise& noise, double h);

enum class ItoScheme {
    /// Euler-Maruyama on the Ito form.
    EulerMaruyama,
    /// Heun predictor-corrector on the equivalent Stratonovich form
    /// (drift shifted by +sigma^2 grad(lambda) / (2 lambda^3)).
    Heun,
};

struct ItoOptions {
    bool include_correction = true;
    ItoScheme scheme = ItoScheme::EulerMaruyama;
};

/// dq = (b/lambda - sigma^2 grad(lambda) / (2 lambda^3)) dt + (sigma/lambda) dW.
/// With include_correction = false the second drift term is dropped.
Trajectory simulate_ito_limit(const ModelSpec& spec, const WienerPath& path, double h,
                              ItoOptions options = {});

/// Heun scheme for dq = (b/lambda) dt + (sigma/lambda) o dW.
Trajectory simulate_stratonovich_limit(const ModelSpec& spec, const WienerPath& path, double h);

/// CSV with header t,q_1..q_d[,p_1..p_d].
void write_csv(std::ostream& os, const Trajectory& traj);
/// JSON object with the equation tag, scheme, step, provenance and model parameters.
std::string sidecar_json(const Trajectory& traj);

}  // namespace vfsk
