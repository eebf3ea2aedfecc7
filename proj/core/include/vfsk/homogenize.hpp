#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "vfsk/integrate.hpp"
#include "vfsk/model.hpp"
#include "vfsk/stats.hpp"

namespace vfsk {

/// Uniform periodic grid on the unit torus, nodes y = j / n per axis.
/// Node (j_1, j_2) has flat index j_1 + n j_2.
struct TorusGrid {
    int dimension = 1;
    int n = 64;

    TorusGrid() = default;
    /// Requires dimension in {1, 2} and n >= 16.
    TorusGrid(int dimension, int n);

    std::size_t size() const noexcept;
    double spacing() const noexcept { return 1.0 / n; }
    Point node(std::size_t flat) const noexcept;
    /// Flat index of the neighbour one step along `axis` (+1 or -1), wrapped.
    std::size_t neighbour(std::size_t flat, int axis, int dir) const noexcept;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// A^0 f = (1 / (2 lambda^2)) Lap f - (grad lambda / (2 lambda^3)) . grad f with
/// second-order centred differences; grad lambda is the analytic gradient.
SparseMatrix assemble_A0(const FrictionField& lambda, const TorusGrid& grid);

/// Samples f on the grid.
Eigen::VectorXd sample(const TorusGrid& grid, const std::function<double(const Point&)>& f);

/// Centred difference of a grid function along `axis`.
Eigen::VectorXd centred_difference(const TorusGrid& grid, const Eigen::VectorXd& f, int axis);

struct CellSolution {
    TorusGrid grid;
    std::vector<Eigen::VectorXd> corrector;  // N_k, k = 0..d-1
    /// Normalised left null vector m of the discrete A^0 (A^T m = 0, sum m = 1).
    Eigen::VectorXd invariant_density;
    /// Constant removed from rhs_k to make it orthogonal to m.
    std::vector<double> projection;
    /// lambda-weighted mean of the unprojected rhs_k; vanishes in the continuum.
    std::vector<double> lambda_projection;
    /// ||A^0 N_k - rhs_k||_inf / ||rhs_k||_inf, projected rhs.
    std::vector<double> residual;
    std::vector<double> mean;
};

/// Solves A^0 N_k = d_k lambda / (2 lambda^3) on the torus. The right-hand
/// side is projected onto the range of the discrete operator using its left
/// null vector; the system is solved with N pinned at node 0 and then shifted
/// to mean zero. Throws SolveFailure if the relative residual exceeds 1e-10.
CellSolution solve_cell(const FrictionField& lambda, const TorusGrid& grid);

struct EffectiveCoefficients {
    int dimension = 1;
    int n = 0;
    /// Symmetric form built from grad N_i . grad N_j; the reported a-bar.
    Eigen::MatrixXd a;
    /// Simplified form int (d_i N_j / lambda) / int lambda + delta_ij int(1/lambda) / int lambda.
    Eigen::MatrixXd a_simplified;
    Eigen::VectorXd b;
    double symmetry_error = 0.0;
    double min_eigenvalue = 0.0;
    /// max |a - a_simplified|.
    double form_gap = 0.0;
};

/// Rectangle-rule quadrature of both a-bar forms and of b-bar.
EffectiveCoefficients effective_coefficients(const FrictionField& lambda, const DriftField& b,
                                             const CellSolution& cell);

/// max over nodes of |(A^0)^T lambda| using the assembled matrix, with lambda
/// sampled on the grid.
double invariant_density_residual(const FrictionField& lambda, const TorusGrid& grid);

struct McDiffusivityOptions {
    double h = 1e-4;
    ItoScheme scheme = ItoScheme::EulerMaruyama;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    /// Drift subtracted before the covariance is formed (b-bar times T).
    std::vector<double> drift;
    /// Also report the mean drift with the Ito correction integral removed.
    bool corrected_drift = false;
};

struct McDiffusivity {
    Eigen::MatrixXd a;
    Eigen::MatrixXd a_se;
    Eigen::VectorXd drift_raw;
    Eigen::VectorXd drift_raw_se;
    Eigen::VectorXd drift_corrected;  // empty unless requested
    std::size_t n_paths = 0;
};

/// Empirical covariance of q_T - q_0 - b-bar T divided by T for the Ito limit
/// with friction lambda(q / epsilon) and drift b(q / epsilon), sigma = 1.
McDiffusivity mc_effective_diffusivity(const FrictionField& lambda, const DriftField& b, double epsilon,
                                       double horizon, std::size_t n_paths, const McDiffusivityOptions& opt = {});

/// JSON with grid size, both a-bar evaluations, b-bar and residuals.
std::string to_json(const EffectiveCoefficients& eff, const CellSolution& cell);

/// CSV grid of the correctors: y_1[,y_2],N_1[,N_2].
void write_csv(std::ostream& os, const CellSolution& cell);

}  // namespace vfsk
