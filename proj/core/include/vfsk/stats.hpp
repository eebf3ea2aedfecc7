#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vfsk/integrate.hpp"

namespace vfsk {

/// Sample mean with its CLT standard error.
struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

/// Mean and standard error (sample standard deviation / sqrt(n)). Sums are
/// accumulated in index order.
Estimate mean_estimate(std::span<const double> xs);

/// Unbiased sample variance with the large-sample standard error
/// sqrt((m4 - s^4 (n - 3) / (n - 1)) / n).
Estimate variance_estimate(std::span<const double> xs);

/// Trajectories driven by streams[k] of one master seed, sharing the model and grid.
struct Ensemble {
    ModelSpec spec;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> streams;
    std::vector<Trajectory> trajectories;

    std::size_t size() const noexcept { return trajectories.size(); }
};

/// Runs simulate(stream) for streams 0..n-1 on up to `workers` threads.
/// Throws InvalidArgument if the results do not share a grid.
Ensemble build_ensemble(const ModelSpec& spec, std::uint64_t seed, std::size_t n_paths, unsigned workers,
                        const std::function<Trajectory(std::uint64_t stream)>& simulate);

/// Checks the Ensemble invariants (common grid, distinct streams).
void check_ensemble(const Ensemble& ens);

struct SupDistance {
    double mean = 0.0;
    double std_error = 0.0;
    double median = 0.0;
    double q95 = 0.0;
    std::vector<double> kappa;
    std::vector<double> exceed_probability;  // P(max > kappa[k])
    std::vector<double> samples;             // per stream, in ensemble order
};

/// Per-stream max over the common time nodes of |q^A_t - q^B_t|. The two grids
/// may differ when one step is an integer multiple of the other; the coarser
/// grid's nodes are compared. Throws InvalidArgument on stream mismatch.
SupDistance coupled_sup_distance(const Ensemble& a, const Ensemble& b, std::span<const double> kappa = {});

/// Sup distance for one coupled pair, on the coarser grid's nodes.
double sup_distance(const Trajectory& a, const Trajectory& b);

struct Functional {
    enum class Kind { TerminalMean, TerminalSecondMoment, TerminalVariance, BoundedTest };
    Kind kind = Kind::TerminalMean;
    int component = 0;
    std::function<double(const Point&)> test;

    static Functional terminal_mean(int component = 0) { return {Kind::TerminalMean, component, {}}; }
    static Functional terminal_second_moment(int component = 0) {
        return {Kind::TerminalSecondMoment, component, {}};
    }
    static Functional terminal_variance(int component = 0) { return {Kind::TerminalVariance, component, {}}; }
    static Functional bounded_test(std::function<double(const Point&)> f) {
        return {Kind::BoundedTest, 0, std::move(f)};
    }
};

struct WeakError {
    double estimate = 0.0;
    double std_error = 0.0;
    double reference = 0.0;
    double z = 0.0;  // (estimate - reference) / std_error; 0 when both vanish
    std::size_t n = 0;
};

WeakError weak_error(const Ensemble& ens, const Functional& functional, double reference);
/// Same, on terminal positions already extracted from an ensemble.
WeakError weak_error(std::span<const Point> terminals, const Functional& functional, double reference);

/// Swept parameters understood by run_sweep.
inline const std::vector<std::string>& sweep_parameters() {
    static const std::vector<std::string> names{"mu", "delta", "epsilon", "h", "n"};
    return names;
}

/// A Monte Carlo convergence sweep. `sample(stream)` runs every swept value
/// on the noise of one stream and returns one sample per value, so values
/// share common random numbers. The statistic is the mean of the samples.
struct SweepPlan {
    std::string parameter;
    std::vector<double> values;
    std::string statistic;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    std::function<std::vector<double>(std::uint64_t stream)> sample;
};

struct SweepResult {
    std::string parameter;
    std::string statistic;
    std::vector<double> values;
    std::vector<double> estimate;
    std::vector<double> std_error;
    std::size_t n_paths = 0;
    /// Estimates strictly decreasing with non-overlapping one-standard-error
    /// bars; undefined for a single value.
    std::optional<bool> decreasing;
};

/// Throws InvalidArgument for an invalid plan (unknown parameter, values not
/// strictly monotone, fewer than two paths, missing sampler).
SweepResult run_sweep(const SweepPlan& plan);

/// Trend flag used by run_sweep.
std::optional<bool> decreasing_trend(std::span<const double> estimate, std::span<const double> std_error);

/// CSV with header parameter,value,estimate,std_error,n_paths.
void write_csv(std::ostream& os, const SweepResult& r);

}  // namespace vfsk
