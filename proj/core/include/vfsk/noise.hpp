#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "vfsk/model.hpp"
#include "vfsk/rng.hpp"

namespace vfsk {

/// Wiener trajectory sampled on the uniform grid t_n = n dt, n = 0..steps().
class WienerPath {
public:
    /// Builds a path from explicit node values (row-major, steps+1 rows of d
    /// entries). Used for deterministic stand-ins; the first row must be zero
    /// for a genuine Wiener path but this is not enforced.
    static WienerPath from_values(int dim, double dt, std::vector<double> values);

    int dimension() const noexcept { return dim_; }
    double dt() const noexcept { return dt_; }
    std::size_t steps() const noexcept { return steps_; }
    double horizon() const noexcept { return static_cast<double>(steps_) * dt_; }
    const std::optional<StreamKey>& key() const noexcept { return key_; }

    double at(std::size_t n, int i) const noexcept { return values_[n * dim_ + i]; }
    Point node(std::size_t n) const noexcept;
    /// W_{t_{n+1}} - W_{t_n}.
    double increment(std::size_t n, int i) const noexcept { return at(n + 1, i) - at(n, i); }

    /// Linear interpolation between nodes; t is clamped to [0, horizon].
    double interpolate(double t, int i) const noexcept;

    /// Auxiliary standard normal attached to this path, independent of the
    /// increments. Deterministic stand-ins return 0.
    double aux_normal(std::uint64_t index) const noexcept;

    const std::vector<double>& values() const noexcept { return values_; }

private:
    friend WienerPath sample_wiener(int, double, double, std::uint64_t, std::uint64_t);
    WienerPath(int dim, double dt, std::size_t steps, std::vector<double> values,
               std::optional<StreamKey> key);

    int dim_;
    double dt_;
    std::size_t steps_;
    std::vector<double> values_;
    std::optional<StreamKey> key_;
};

/// Samples W on [0, t_ext] with step dt. The number of steps is
/// ceil(t_ext / dt - 1e-9), so the horizon can slightly exceed t_ext.
WienerPath sample_wiener(int dim, double t_ext, double dt, std::uint64_t seed, std::uint64_t stream);

/// Bump kernel rho(s) = C exp(-1 / (s (1 - s))) on [0, 1] sampled at m nodes,
/// with trapezoid weights. C makes the discrete mass exactly one.
struct MollifierKernel {
    std::vector<double> s;
    std::vector<double> weight;
    std::vector<double> rho;
    std::vector<double> rho_dot;
    double normalization = 0.0;

    std::size_t size() const noexcept { return s.size(); }
    double mass() const noexcept;
    double derivative_mass() const noexcept;
    double first_moment() const noexcept;
    double max_abs_rho_dot() const noexcept;

    /// Analytic values at an arbitrary s, using this kernel's C.
    double rho_at(double s) const noexcept;
    double rho_dot_at(double s) const noexcept;
};

inline constexpr std::size_t kDefaultKernelNodes = 1025;

/// Requires m >= 512.
MollifierKernel build_kernel(std::size_t m = kDefaultKernelNodes);

/// W^delta and its derivative tabulated on t_n = n * step, n = 0..steps().
class MollifiedNoise {
public:
    MollifiedNoise(std::shared_ptr<const WienerPath> path, double delta, double step, std::size_t steps,
                   std::vector<double> values, std::vector<double> derivative);

    const WienerPath& path() const noexcept { return *path_; }
    std::shared_ptr<const WienerPath> shared_path() const noexcept { return path_; }
    int dimension() const noexcept { return path_->dimension(); }
    double delta() const noexcept { return delta_; }
    double step() const noexcept { return step_; }
    std::size_t steps() const noexcept { return steps_; }
    double horizon() const noexcept { return static_cast<double>(steps_) * step_; }

    double value(std::size_t n, int i) const noexcept { return values_[n * dimension() + i]; }
    double derivative(std::size_t n, int i) const noexcept { return deriv_[n * dimension() + i]; }

private:
    std::shared_ptr<const WienerPath> path_;
    double delta_;
    double step_;
    std::size_t steps_;
    std::vector<double> values_;
    std::vector<double> deriv_;
};

/// Mollifies `path` with width delta on [0, horizon], output every `step`
/// (default: the path's dt). W is taken piecewise linear between nodes and
/// convolved with rho exactly, using cumulative integrals of rho and s rho
/// at the cell breakpoints; the derivative table is the same convolution of
/// the cell slopes, which equals -(1/delta) int W rho_dot. Needs delta >= 2 dt,
/// a path reaching horizon + delta, and one of step, dt an integer multiple
/// of the other.
MollifiedNoise mollify(std::shared_ptr<const WienerPath> path, const MollifierKernel& kernel, double delta,
                       double horizon, std::optional<double> step = std::nullopt);

/// max over output nodes in [0, horizon] of |W^delta_t - W_t|.
double mollification_error(const MollifiedNoise& noise);
/// Convenience overload on the path's own grid with the default kernel.
double mollification_error(std::shared_ptr<const WienerPath> path, double delta, double horizon);

/// Largest |int_0^t dW^delta - (W^delta_t - W^delta_0)| / (t + 1) over the
/// even output nodes, integrating the derivative table by composite Simpson.
double derivative_consistency(const MollifiedNoise& noise);

/// Largest ratio |dW^delta_t| / ((1/delta) max|rho_dot| max_{t<=s<=t+delta} |W_s|);
/// a value <= 1 means the pathwise bound holds at every node.
double derivative_bound_ratio(const MollifiedNoise& noise, const MollifierKernel& kernel);

/// CSV with header t,W_1..W_d.
void write_csv(std::ostream& os, const WienerPath& path);
/// CSV with header t,Wd_1..Wd_d,dWd_1..dWd_d.
void write_csv(std::ostream& os, const MollifiedNoise& noise);

}  // namespace vfsk
