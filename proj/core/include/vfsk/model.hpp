#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace vfsk {

inline constexpr int kMaxDim = 3;

/// A point or vector in R^d, d <= kMaxDim; unused trailing entries are zero.
using Point = std::array<double, kMaxDim>;

enum class Smoothness { Smooth, PiecewiseConstant };

namespace detail {
struct FrictionImpl;
struct DriftImpl;
}  // namespace detail

/// Scalar friction coefficient lambda(q) with a priori bounds
/// lower_bound() <= lambda(q) <= upper_bound().
///
/// Immutable value type; copies share the underlying definition.
class FrictionField {
public:
    explicit FrictionField(std::shared_ptr<const detail::FrictionImpl> impl);

    double value(const Point& q) const;
    Point gradient(const Point& q) const;
    /// value(q), with gradient(q) written to `grad`, sharing work where possible.
    double value_and_gradient(const Point& q, Point& grad) const;

    /// One-sided limits along the first coordinate, used where a
    /// piecewise-constant field jumps. Equal to value() for smooth fields.
    double value_left(const Point& q) const;
    double value_right(const Point& q) const;

    double lower_bound() const noexcept;
    double upper_bound() const noexcept;
    int dimension() const noexcept;

    /// Declared smoothness. Catalog fields declare the truth; the flag can be
    /// overridden with with_smoothness() so validation can catch mismatches.
    Smoothness smoothness() const noexcept { return smoothness_; }
    FrictionField with_smoothness(Smoothness s) const;

    /// True when the underlying definition really is piecewise constant.
    bool is_piecewise_constant() const noexcept;

    /// Positions (along q_1) of the discontinuities of a piecewise-constant field.
    const std::vector<double>& jumps() const noexcept;

    /// Catalog expression, e.g. "sinusoidal(2,0.5,1)".
    const std::string& description() const noexcept;

private:
    std::shared_ptr<const detail::FrictionImpl> impl_;
    Smoothness smoothness_;
};

/// Vector drift field b(q) with a priori bound sup |b(q)|.
class DriftField {
public:
    explicit DriftField(std::shared_ptr<const detail::DriftImpl> impl);

    Point value(const Point& q) const;
    double bound() const noexcept;
    int dimension() const noexcept;
    bool is_zero() const noexcept;
    const std::string& description() const noexcept;

private:
    std::shared_ptr<const detail::DriftImpl> impl_;
};

/// Named friction constructors. All are 1-periodic or bounded by construction.
namespace fields {

FrictionField constant(double c, int dim = 1);

/// lambda(q) = c0 + c1 sin(2 pi k.q). Requires c0 > |c1| to be valid; the
/// constructor records the bounds and leaves the check to validate_model().
FrictionField sinusoidal(double c0, double c1, const Point& wavevector, int dim = 1);

/// Smoothed step in q_1: lo + (hi - lo) (1 + tanh(q_1 / width)) / 2.
FrictionField tanh_ramp(double lo, double hi, double width);

/// lambda_1 for q <= 0 and lambda_2 for q > 0 (one dimension only).
FrictionField step(double lambda1, double lambda2);

/// center + s(q_1 - anchor_1), where s(x) = x for |x| <= radius and saturates
/// smoothly as sign(x) (radius + width tanh((|x| - radius) / width)) outside.
/// The gradient equals e_1 on the slab |q_1 - anchor_1| <= radius, and the
/// field ranges over [center - radius - width, center + radius + width].
FrictionField clipped_linear(double center, double radius, double width, int dim = 1,
                             double anchor = 0.0);

}  // namespace fields

namespace drifts {

DriftField zero(int dim = 1);
DriftField constant(const Point& b, int dim = 1);
/// b_i(q) = amplitude_i sin(2 pi k.q).
DriftField sinusoidal(const Point& amplitude, const Point& wavevector, int dim = 1);

}  // namespace drifts

/// Problem definition shared by all modules.
///
/// When oscillation_scale != 1 the fields are evaluated at q / epsilon,
/// i.e. lambda_eps(q) = lambda(q / eps) and b_eps(q) = b(q / eps).
struct ModelSpec {
    int dimension = 1;
    FrictionField friction = fields::constant(1.0);
    DriftField drift = drifts::zero();
    double noise_scale = 1.0;
    double mass = 1.0;
    double mollifier_width = 0.0;
    double oscillation_scale = 1.0;
    Point initial_position{};
    Point initial_momentum{};
    double horizon = 1.0;

    double friction_at(const Point& q) const;
    Point friction_gradient_at(const Point& q) const;
    double friction_and_gradient_at(const Point& q, Point& grad) const;
    Point drift_at(const Point& q) const;
};

/// List of violated invariants; empty iff the model is usable downstream.
struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const noexcept { return violations.empty(); }
    bool mentions(const std::string& fragment) const;
};

ValidationReport validate_model(const ModelSpec& spec);

/// Throws InvalidArgument listing the violations when the report is not empty.
void require_valid(const ModelSpec& spec);

/// Max over points of |central FD gradient - gradient| / (1 + |gradient|),
/// with FD step `fd_step`. Throws Unsupported for piecewise-constant fields.
double gradient_check(const FrictionField& field, std::span<const Point> points,
                      double fd_step = 1e-5);

double norm(const Point& v, int dim) noexcept;

}  // namespace vfsk
