#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vfsk/integrate.hpp"
#include "vfsk/model.hpp"
#include "vfsk/stats.hpp"

namespace vfsk {

/// Scale function u and speed function v tabulated on a 1-D grid:
///   u(q) = int_0^q lambda(x) exp(-2 int_0^x b lambda dy) dx,
///   v(q) = 2 int_0^q lambda(x) exp(+2 int_0^x b lambda dy) dx.
/// The generator D_v D_u is that of dq = (b/lambda - lambda'/(2 lambda^3)) dt + dW/lambda.
struct ScaleSpeed {
    std::vector<double> x;
    std::vector<double> u;
    std::vector<double> v;
    std::string friction;
    std::string drift;

    std::size_t size() const noexcept { return x.size(); }
    /// Index of the node equal to q; throws InvalidArgument if q is not a node.
    std::size_t node_index(double q) const;
    /// Piecewise-linear interpolation of u or v at q inside the grid.
    double u_at(double q) const;
    double v_at(double q) const;
};

/// Builds u, v with the trapezoid rule on each grid panel, using one-sided
/// friction values at the panel ends so that discontinuities sitting on
/// nodes are integrated exactly. The grid must be strictly increasing and
/// contain 0; every jump of lambda must be a node.
ScaleSpeed compute_scale_speed(const DriftField& b, const FrictionField& lambda, std::vector<double> grid);

/// Uniform grid on [lo, hi] with `cells` panels, with 0 and `extra` inserted
/// as nodes when they fall inside.
std::vector<double> uniform_grid(double lo, double hi, std::size_t cells, const std::vector<double>& extra = {});

struct ExitStats {
    double a = 0.0;  // interval (-a, b)
    double b = 0.0;
    double x0 = 0.0;
    double p_right = 0.0;
    double mean_time = 0.0;
    double p_right_se = 0.0;  // zero for analytic values
    double mean_time_se = 0.0;
    std::size_t n = 0;  // number of chains; zero for analytic values
};

/// Exit-right probability (u(x0) - u(-a)) / (u(b) - u(-a)) and expected exit
/// time int G(x0, y) dv(y) with the interval Green function in scale
/// coordinates, integrated by the trapezoid rule over the grid nodes.
ExitStats exit_stats_analytic(const ScaleSpeed& ss, double a, double b, double x0);

/// lambda1 a / (lambda1 a + lambda2 b): exit-right probability from 0 of the
/// interval (-a, b) under step friction (lambda1 left of 0, lambda2 right).
double glued_exit_probability(double lambda1, double lambda2, double a, double b);

struct StoppingRule {
    /// Interval (-a, b); both ends must be nodes. Absent means no interval.
    std::optional<std::pair<double, double>> interval;
    /// Stop once the clock reaches this time. Absent means no horizon.
    std::optional<double> horizon;
};

struct ChainRun {
    bool exited = false;
    bool exited_right = false;
    double time = 0.0;
    double position = 0.0;
    std::size_t jumps = 0;
    /// Visited (time, position) pairs when recording was requested.
    std::vector<std::pair<double, double>> path;
};

/// Embedded birth-death chain on the grid: from node i jump right with
/// probability (u_i - u_{i-1}) / (u_{i+1} - u_{i-1}); each visit advances
/// the clock by the mean exit time from (x_{i-1}, x_{i+1}),
/// G_i (v_{i+1} - v_{i-1}) / 2 with G_i = (u_i - u_{i-1})(u_{i+1} - u_i) / (u_{i+1} - u_{i-1}).
/// Throws Error if the chain reaches an end node of the grid that is not a
/// stopping boundary.
ChainRun simulate_gendiff(const ScaleSpeed& ss, double x0, const StoppingRule& rule, std::uint64_t seed,
                          std::uint64_t stream = 0, bool record = false);

/// Monte Carlo exit statistics over n chains (streams 0..n-1).
ExitStats exit_stats_mc(const ScaleSpeed& ss, double a, double b, double x0, std::size_t n_chains,
                        std::uint64_t seed, unsigned workers = 0);

struct AveragingOptions {
    double h = 1e-4;
    ItoScheme scheme = ItoScheme::EulerMaruyama;
    std::uint64_t seed = 0;
    unsigned workers = 0;
};

struct AveragingRow {
    double epsilon = 0.0;
    Estimate variance;
};

/// Var(q_T) of the Ito limit with friction lambda(q / epsilon), b = 0,
/// sigma = 1, q_0 = 0, for each epsilon.
std::vector<AveragingRow> averaging_check(const FrictionField& lambda, const std::vector<double>& eps_list,
                                          double horizon, std::size_t n_paths, const AveragingOptions& opt = {});

/// CSV with header case,quantity,analytic,empirical,std_error.
struct ExitCase {
    std::string id;
    ExitStats analytic;
    ExitStats empirical;
};
void write_csv(std::ostream& os, const std::vector<ExitCase>& cases);

}  // namespace vfsk
