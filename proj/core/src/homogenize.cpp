#include "vfsk/homogenize.hpp"

#include <cmath>
#include <ostream>

#include <Eigen/SparseLU>
#include <json.hpp>

#include "vfsk/error.hpp"
#include "vfsk/io.hpp"
#include "vfsk/noise.hpp"
#include "vfsk/parallel.hpp"

namespace vfsk {

TorusGrid::TorusGrid(int dim, int nodes) : dimension(dim), n(nodes) {
    if (dim != 1 && dim != 2) throw InvalidArgument("TorusGrid: dimension must be 1 or 2");
    if (nodes < 16) throw InvalidArgument("TorusGrid: need at least 16 nodes per axis");
}

std::size_t TorusGrid::size() const noexcept {
    return dimension == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
}

Point TorusGrid::node(std::size_t flat) const noexcept {
    Point y{};
    y[0] = static_cast<double>(flat % n) / n;
    if (dimension == 2) y[1] = static_cast<double>(flat / n) / n;
    return y;
}

std::size_t TorusGrid::neighbour(std::size_t flat, int axis, int dir) const noexcept {
    const std::size_t nn = static_cast<std::size_t>(n);
    std::size_t j0 = flat % nn, j1 = flat / nn;
    if (axis == 0)
        j0 = (j0 + nn + static_cast<std::size_t>(dir + static_cast<int>(nn))) % nn;
    else
        j1 = (j1 + nn + static_cast<std::size_t>(dir + static_cast<int>(nn))) % nn;
    return j0 + nn * j1;
}

Eigen::VectorXd sample(const TorusGrid& grid, const std::function<double(const Point&)>& f) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t j = 0; j < grid.size(); ++j) v[static_cast<Eigen::Index>(j)] = f(grid.node(j));
    return v;
}

Eigen::VectorXd centred_difference(const TorusGrid& grid, const Eigen::VectorXd& f, int axis) {
    Eigen::VectorXd out(f.size());
    const double inv = 0.5 * grid.n;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const auto jp = static_cast<Eigen::Index>(grid.neighbour(j, axis, 1));
        const auto jm = static_cast<Eigen::Index>(grid.neighbour(j, axis, -1));
        out[static_cast<Eigen::Index>(j)] = (f[jp] - f[jm]) * inv;
    }
    return out;
}

namespace {

void check_field(const FrictionField& lambda, const TorusGrid& grid, const char* who) {
    if (lambda.dimension() != grid.dimension) throw InvalidArgument(std::string(who) + ": dimension mismatch");
    if (lambda.is_piecewise_constant())
        throw Unsupported(std::string(who) + ": needs a smooth friction field");
    if (!(lambda.lower_bound() > 0.0)) throw InvalidArgument(std::string(who) + ": lambda must be positive");
}

// Triplets of A^0 with rows listed in `skip` replaced by the identity row.
std::vector<Eigen::Triplet<double>> a0_triplets(const FrictionField& lambda, const TorusGrid& grid) {
    const double inv_h2 = static_cast<double>(grid.n) * grid.n;
    const double inv_2h = 0.5 * grid.n;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(grid.size() * (1 + 4 * grid.dimension));
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const Point y = grid.node(j);
        const double lam = lambda.value(y);
        const Point g = lambda.gradient(y);
        const double diff = 1.0 / (2.0 * lam * lam);
        const auto row = static_cast<int>(j);
        t.emplace_back(row, row, -2.0 * grid.dimension * diff * inv_h2);
        for (int axis = 0; axis < grid.dimension; ++axis) {
            const double adv = -g[axis] / (2.0 * lam * lam * lam);
            t.emplace_back(row, static_cast<int>(grid.neighbour(j, axis, 1)), diff * inv_h2 + adv * inv_2h);
            t.emplace_back(row, static_cast<int>(grid.neighbour(j, axis, -1)), diff * inv_h2 - adv * inv_2h);
        }
    }
    return t;
}

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

using ColMatrix = Eigen::SparseMatrix<double>;

// Copy of m with row `r` replaced by e_r^T.
ColMatrix pin_row(const ColMatrix& m, Eigen::Index r) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(m.nonZeros()));
    for (Eigen::Index c = 0; c < m.outerSize(); ++c)
        for (ColMatrix::InnerIterator it(m, c); it; ++it)
            if (it.row() != r) t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    t.emplace_back(static_cast<int>(r), static_cast<int>(r), 1.0);
    ColMatrix out(m.rows(), m.cols());
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

}  // namespace

SparseMatrix assemble_A0(const FrictionField& lambda, const TorusGrid& grid) {
    check_field(lambda, grid, "assemble_A0");
    const auto t = a0_triplets(lambda, grid);
    const auto n = static_cast<Eigen::Index>(grid.size());
    SparseMatrix a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

CellSolution solve_cell(const FrictionField& lambda, const TorusGrid& grid) {
    check_field(lambda, grid, "solve_cell");
    const int d = grid.dimension;
    const auto n = static_cast<Eigen::Index>(grid.size());
    const auto t = a0_triplets(lambda, grid);
    ColMatrix a(n, n);
    a.setFromTriplets(t.begin(), t.end());

    CellSolution out;
    out.grid = grid;

    // Left null vector: A^T m = 0 with m_0 = 1, then normalised.
    {
        const ColMatrix at = pin_row(ColMatrix(a.transpose()), 0);
        Eigen::SparseLU<ColMatrix> lu;
        lu.compute(at);
        if (lu.info() != Eigen::Success) throw SolveFailure("solve_cell: adjoint factorisation failed", INFINITY);
        Eigen::VectorXd e0 = Eigen::VectorXd::Zero(n);
        e0[0] = 1.0;
        Eigen::VectorXd m = lu.solve(e0);
        if (lu.info() != Eigen::Success) throw SolveFailure("solve_cell: adjoint solve failed", INFINITY);
        out.invariant_density = m / m.sum();
    }
    const Eigen::VectorXd& m = out.invariant_density;

    Eigen::SparseLU<ColMatrix> lu;
    lu.compute(pin_row(a, 0));
    if (lu.info() != Eigen::Success) throw SolveFailure("solve_cell: factorisation failed", INFINITY);

    const Eigen::VectorXd lam = sample(grid, [&](const Point& y) { return lambda.value(y); });
    for (int k = 0; k < d; ++k) {
        const Eigen::VectorXd rhs0 = sample(grid, [&](const Point& y) {
            const double l = lambda.value(y);
            return lambda.gradient(y)[k] / (2.0 * l * l * l);
        });
        const double c = m.dot(rhs0);  // m sums to one
        const Eigen::VectorXd rhs = rhs0.array() - c;
        out.projection.push_back(c);
        out.lambda_projection.push_back(lam.dot(rhs0) / lam.sum());

        Eigen::VectorXd b = rhs;
        b[0] = 0.0;
        Eigen::VectorXd nk = lu.solve(b);
        if (lu.info() != Eigen::Success) throw SolveFailure("solve_cell: solve failed", INFINITY);
        nk.array() -= nk.mean();
        const double scale = inf_norm(rhs0);
        const double res = inf_norm(a * nk - rhs);
        const double rel = scale > 0.0 ? res / scale : res;
        if (rel > 1e-10) throw SolveFailure("solve_cell: residual above 1e-10", rel);
        out.residual.push_back(rel);
        out.mean.push_back(nk.mean());
        out.corrector.push_back(std::move(nk));
    }
    return out;
}

EffectiveCoefficients effective_coefficients(const FrictionField& lambda, const DriftField& b,
                                             const CellSolution& cell) {
    const TorusGrid& grid = cell.grid;
    check_field(lambda, grid, "effective_coefficients");
    if (b.dimension() != grid.dimension) throw InvalidArgument("effective_coefficients: drift dimension mismatch");
    const int d = grid.dimension;
    const Eigen::VectorXd lam = sample(grid, [&](const Point& y) { return lambda.value(y); });
    const Eigen::VectorXd inv_lam = lam.cwiseInverse();
    const double mean_lam = lam.mean();

    // dN[j][i] = d_i N_j.
    std::vector<std::vector<Eigen::VectorXd>> dN(d, std::vector<Eigen::VectorXd>(d));
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) dN[j][i] = centred_difference(grid, cell.corrector[j], i);

    EffectiveCoefficients eff;
    eff.dimension = d;
    eff.n = grid.n;
    eff.a.resize(d, d);
    eff.a_simplified.resize(d, d);
    eff.b.resize(d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            Eigen::VectorXd integrand = dN[j][i] + dN[i][j];
            for (int k = 0; k < d; ++k) integrand += dN[i][k].cwiseProduct(dN[j][k]);
            if (i == j) integrand.array() += 1.0;
            eff.a(i, j) = integrand.cwiseProduct(inv_lam).mean() / mean_lam;
            eff.a_simplified(i, j) =
                dN[j][i].cwiseProduct(inv_lam).mean() / mean_lam + (i == j ? inv_lam.mean() / mean_lam : 0.0);
        }
    }
    std::vector<Eigen::VectorXd> bk(d);
    for (int k = 0; k < d; ++k) bk[k] = sample(grid, [&](const Point& y) { return b.value(y)[k]; });
    for (int i = 0; i < d; ++i) {
        double s = bk[i].mean();
        for (int k = 0; k < d; ++k) s += bk[k].cwiseProduct(dN[i][k]).mean();
        eff.b[i] = s / mean_lam;
    }
    eff.symmetry_error = (eff.a - eff.a.transpose()).cwiseAbs().maxCoeff();
    const Eigen::MatrixXd sym = 0.5 * (eff.a + eff.a.transpose());
    eff.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym).eigenvalues().minCoeff();
    eff.form_gap = (eff.a - eff.a_simplified).cwiseAbs().maxCoeff();
    return eff;
}

double invariant_density_residual(const FrictionField& lambda, const TorusGrid& grid) {
    const SparseMatrix a = assemble_A0(lambda, grid);
    const Eigen::VectorXd lam = sample(grid, [&](const Point& y) { return lambda.value(y); });
    const Eigen::VectorXd r = a.transpose() * lam;
    return inf_norm(r);
}

McDiffusivity mc_effective_diffusivity(const FrictionField& lambda, const DriftField& b, double epsilon,
                                       double horizon, std::size_t n_paths, const McDiffusivityOptions& opt) {
    const int d = lambda.dimension();
    ModelSpec spec;
    spec.dimension = d;
    spec.friction = lambda;
    spec.drift = b;
    spec.noise_scale = 1.0;
    spec.oscillation_scale = epsilon;
    spec.horizon = horizon;
    require_valid(spec);
    if (!opt.drift.empty() && static_cast<int>(opt.drift.size()) != d)
        throw InvalidArgument("mc_effective_diffusivity: drift has the wrong dimension");
    if (n_paths < 2) throw InvalidArgument("mc_effective_diffusivity: need at least two paths");

    ItoOptions io_opt;
    io_opt.scheme = opt.scheme;
    struct Sample {
        Point disp{};
        Point corr{};
    };
    const auto samples = parallel_map(n_paths, opt.workers, [&](std::size_t k) {
        const WienerPath path = sample_wiener(d, horizon, opt.h, opt.seed, k);
        const Trajectory tr = simulate_ito_limit(spec, path, opt.h, io_opt);
        Sample s;
        const Point qt = tr.terminal();
        for (int i = 0; i < d; ++i) s.disp[i] = qt[i] - spec.initial_position[i];
        if (opt.corrected_drift) {
            for (std::size_t n = 0; n < tr.steps; ++n) {
                const Point q = tr.position(n);
                const double l = spec.friction_at(q);
                const Point g = spec.friction_gradient_at(q);
                for (int i = 0; i < d; ++i) s.corr[i] -= g[i] / (2.0 * l * l * l) * tr.h;
            }
        }
        return s;
    });

    McDiffusivity out;
    out.n_paths = n_paths;
    out.a.resize(d, d);
    out.a_se.resize(d, d);
    out.drift_raw.resize(d);
    out.drift_raw_se.resize(d);
    std::vector<std::vector<double>> x(d, std::vector<double>(n_paths));
    for (std::size_t k = 0; k < n_paths; ++k)
        for (int i = 0; i < d; ++i)
            x[i][k] = samples[k].disp[i] - (opt.drift.empty() ? 0.0 : opt.drift[i] * horizon);
    std::vector<double> means(d);
    for (int i = 0; i < d; ++i) {
        const Estimate e = mean_estimate(x[i]);
        means[i] = e.mean;
        out.drift_raw[i] = e.mean / horizon + (opt.drift.empty() ? 0.0 : opt.drift[i]);
        out.drift_raw_se[i] = e.std_error / horizon;
    }
    // Covariance entries as means of centred products; their standard error
    // follows from the spread of the products.
    std::vector<double> prod(n_paths);
    const double bessel = static_cast<double>(n_paths) / static_cast<double>(n_paths - 1);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            for (std::size_t k = 0; k < n_paths; ++k) prod[k] = (x[i][k] - means[i]) * (x[j][k] - means[j]);
            const Estimate e = mean_estimate(prod);
            out.a(i, j) = e.mean * bessel / horizon;
            out.a_se(i, j) = e.std_error * bessel / horizon;
        }
    }
    if (opt.corrected_drift) {
        out.drift_corrected.resize(d);
        for (int i = 0; i < d; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < n_paths; ++k) s += samples[k].disp[i] - samples[k].corr[i];
            out.drift_corrected[i] = s / static_cast<double>(n_paths) / horizon;
        }
    }
    return out;
}

std::string to_json(const EffectiveCoefficients& eff, const CellSolution& cell) {
    auto mat = [](const Eigen::MatrixXd& m) {
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) rows[static_cast<std::size_t>(i)].push_back(m(i, j));
        return rows;
    };
    nlohmann::ordered_json j;
    j["dimension"] = eff.dimension;
    j["n"] = eff.n;
    j["a_bar"] = mat(eff.a);
    j["a_bar_simplified"] = mat(eff.a_simplified);
    j["form_gap"] = eff.form_gap;
    j["b_bar"] = std::vector<double>(eff.b.data(), eff.b.data() + eff.b.size());
    j["symmetry_error"] = eff.symmetry_error;
    j["min_eigenvalue"] = eff.min_eigenvalue;
    j["cell_residual"] = cell.residual;
    j["projection"] = cell.projection;
    j["lambda_projection"] = cell.lambda_projection;
    return j.dump(2);
}

void write_csv(std::ostream& os, const CellSolution& cell) {
    const int d = cell.grid.dimension;
    std::vector<std::string> head;
    for (int i = 0; i < d; ++i) head.push_back("y_" + std::to_string(i + 1));
    for (int k = 0; k < d; ++k) head.push_back("N_" + std::to_string(k + 1));
    io::write_header(os, head);
    std::vector<double> row;
    for (std::size_t j = 0; j < cell.grid.size(); ++j) {
        const Point y = cell.grid.node(j);
        row.assign(y.begin(), y.begin() + d);
        for (int k = 0; k < d; ++k) row.push_back(cell.corrector[k][static_cast<Eigen::Index>(j)]);
        io::write_row(os, row);
    }
}

}  // namespace vfsk
