#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "vfsk/integrate.hpp"
#include "vfsk/noise.hpp"
#include "vfsk/stats.hpp"

namespace vfsk {

/// A(t) = int_0^t lambda(q_s) ds by the trapezoid rule on the trajectory grid.
std::vector<double> friction_action(const Trajectory& traj);

/// q_t = q_0 + alpha(t) + beta(t) + gamma(t) along one white-noise Langevin
/// trajectory. Arrays are row-major, steps+1 rows of d entries.
struct Decomposition {
    int dimension = 1;
    double h = 0.0;
    std::size_t steps = 0;
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> gamma;
    /// Left-point action sum_k lambda(q_k) h, the action seen by the stepper.
    std::vector<double> action;
    /// int_0^t b/lambda ds and int_0^t sigma/lambda dW (left-point sums).
    std::vector<double> drift_integral;
    std::vector<double> noise_integral;
    /// |q_t - q_0 - alpha - beta - gamma| per node.
    std::vector<double> residual;

    double max_residual() const noexcept;
    double at(const std::vector<double>& field, std::size_t n, int i) const noexcept {
        return field[n * dimension + i];
    }
};

/// Splits a trajectory of simulate_langevin_white into the three terms.
/// Within each step the friction is frozen, so the nested integrals are
/// evaluated exactly cell by cell: the exponential weights are integrated in
/// closed form and the stochastic inner integral reuses the step's Gaussian
/// pair drawn from `path`. Throws InvalidArgument on a grid mismatch.
Decomposition decompose(const Trajectory& traj, const WienerPath& path);

/// 10 h (1 + T) (sigma + sup|b| + |p_0|).
double decomposition_tolerance(const ModelSpec& spec, double h);

struct DiagnoseOptions {
    /// Langevin step as a fraction of mu; the step must resolve the momentum
    /// relaxation time mu / lambda for the noise-induced drift to appear.
    double h_over_mu = 0.1;
    /// Upper cap on the step.
    double max_h = 1e-3;
    std::uint64_t seed = 0;
    unsigned workers = 0;
};

/// Step used for mass mu under `opt`, adjusted so it divides T.
double diagnose_step(double mu, double horizon, const DiagnoseOptions& opt);

struct GammaGapRow {
    double mu = 0.0;
    Estimate gap;
};

/// For each mu: Monte Carlo E|gamma(T) - int_0^T sigma/lambda(q_s) dW_s|^2
/// over n_paths white-noise Langevin paths with horizon T.
std::vector<GammaGapRow> gamma_gap(const ModelSpec& spec, const std::vector<double>& mu_list,
                                   std::size_t n_paths, double horizon, const DiagnoseOptions& opt = {});

struct AlphaBetaRow {
    double mu = 0.0;
    Estimate alpha_sq;
    Estimate beta_residual_sq;
};

/// For each mu: E|alpha(T)|^2 and E|beta(T) - int_0^T b/lambda ds|^2.
std::vector<AlphaBetaRow> alpha_beta_residuals(const ModelSpec& spec, const std::vector<double>& mu_list,
                                               std::size_t n_paths, double horizon,
                                               const DiagnoseOptions& opt = {});

/// CSV with header mu,estimate,std_error,n_paths.
void write_csv(std::ostream& os, const std::vector<GammaGapRow>& rows);
/// CSV with header mu,alpha_sq,alpha_se,beta_residual_sq,beta_residual_se,n_paths.
void write_csv(std::ostream& os, const std::vector<AlphaBetaRow>& rows);

}  // namespace vfsk
