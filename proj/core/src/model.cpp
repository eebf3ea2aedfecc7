#include "vfsk/model.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vfsk/error.hpp"

namespace vfsk {

namespace detail {

struct FrictionImpl {
    virtual ~FrictionImpl() = default;
    virtual double value(const Point& q) const = 0;
    virtual Point gradient(const Point& q) const = 0;
    virtual double value_gradient(const Point& q, Point& g) const {
        g = gradient(q);
        return value(q);
    }
    virtual double value_left(const Point& q) const { return value(q); }
    virtual double value_right(const Point& q) const { return value(q); }
    virtual bool piecewise_constant() const { return false; }

    int dim = 1;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> jumps;
    std::string description;
};

struct DriftImpl {
    virtual ~DriftImpl() = default;
    virtual Point value(const Point& q) const = 0;

    int dim = 1;
    double bound = 0.0;
    bool zero = false;
    std::string description;
};

}  // namespace detail

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt_num(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

std::string fmt_point(const Point& p, int dim) {
    if (dim == 1) return fmt_num(p[0]);
    std::string s = "(";
    for (int i = 0; i < dim; ++i) s += (i ? "," : "") + fmt_num(p[i]);
    return s + ")";
}

double dot(const Point& a, const Point& b, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += a[i] * b[i];
    return s;
}

void check_dim(int dim) {
    if (dim < 1 || dim > kMaxDim)
        throw InvalidArgument("dimension must be in [1, " + std::to_string(kMaxDim) + "]");
}

struct ConstantFriction final : detail::FrictionImpl {
    double c;
    explicit ConstantFriction(double c_) : c(c_) {}
    double value(const Point&) const override { return c; }
    Point gradient(const Point&) const override { return {}; }
};

struct SinusoidalFriction final : detail::FrictionImpl {
    double c0, c1;
    Point k;
    SinusoidalFriction(double c0_, double c1_, const Point& k_) : c0(c0_), c1(c1_), k(k_) {}
    double value(const Point& q) const override {
        return c0 + c1 * std::sin(kTwoPi * dot(k, q, dim));
    }
    Point gradient(const Point& q) const override {
        const double s = c1 * kTwoPi * std::cos(kTwoPi * dot(k, q, dim));
        Point g{};
        for (int i = 0; i < dim; ++i) g[i] = s * k[i];
        return g;
    }
    double value_gradient(const Point& q, Point& g) const override {
        const double x = kTwoPi * dot(k, q, dim);
        const double s = c1 * kTwoPi * std::cos(x);
        g = {};
        for (int i = 0; i < dim; ++i) g[i] = s * k[i];
        return c0 + c1 * std::sin(x);
    }
};

struct TanhRampFriction final : detail::FrictionImpl {
    double l, h, w;
    TanhRampFriction(double l_, double h_, double w_) : l(l_), h(h_), w(w_) {}
    double value(const Point& q) const override {
        return l + (h - l) * 0.5 * (1.0 + std::tanh(q[0] / w));
    }
    Point gradient(const Point& q) const override {
        const double c = std::cosh(q[0] / w);
        return {(h - l) * 0.5 / (w * c * c), 0.0, 0.0};
    }
};

struct StepFriction final : detail::FrictionImpl {
    double l1, l2;
    StepFriction(double a, double b) : l1(a), l2(b) {}
    double value(const Point& q) const override { return q[0] <= 0.0 ? l1 : l2; }
    double value_left(const Point& q) const override { return q[0] <= 0.0 ? l1 : l2; }
    double value_right(const Point& q) const override { return q[0] < 0.0 ? l1 : l2; }
    Point gradient(const Point& q) const override {
        if (q[0] == 0.0) throw InvalidArgument("gradient of step friction requested at its jump");
        return {};
    }
    bool piecewise_constant() const override { return true; }
};

struct ClippedLinearFriction final : detail::FrictionImpl {
    double center, radius, width, anchor;
    ClippedLinearFriction(double c, double r, double w, double a)
        : center(c), radius(r), width(w), anchor(a) {}
    double value(const Point& q) const override {
        const double x = q[0] - anchor;
        const double ax = std::abs(x);
        if (ax <= radius) return center + x;
        return center + std::copysign(radius + width * std::tanh((ax - radius) / width), x);
    }
    Point gradient(const Point& q) const override {
        const double ax = std::abs(q[0] - anchor);
        if (ax <= radius) return {1.0, 0.0, 0.0};
        const double c = std::cosh((ax - radius) / width);
        return {1.0 / (c * c), 0.0, 0.0};
    }
};

struct ZeroDrift final : detail::DriftImpl {
    Point value(const Point&) const override { return {}; }
};

struct ConstantDrift final : detail::DriftImpl {
    Point b;
    explicit ConstantDrift(const Point& b_) : b(b_) {}
    Point value(const Point&) const override { return b; }
};

struct SinusoidalDrift final : detail::DriftImpl {
    Point amp, k;
    SinusoidalDrift(const Point& a, const Point& k_) : amp(a), k(k_) {}
    Point value(const Point& q) const override {
        const double s = std::sin(kTwoPi * dot(k, q, dim));
        Point out{};
        for (int i = 0; i < dim; ++i) out[i] = amp[i] * s;
        return out;
    }
};

template <class Impl>
std::shared_ptr<Impl> finish(std::shared_ptr<Impl> p, int dim, double lo, double hi, std::string desc) {
    p->dim = dim;
    p->lo = lo;
    p->hi = hi;
    p->description = std::move(desc);
    return p;
}

}  // namespace

// FrictionField ------------------------------------------------------------

FrictionField::FrictionField(std::shared_ptr<const detail::FrictionImpl> impl)
    : impl_(std::move(impl)),
      smoothness_(impl_->piecewise_constant() ? Smoothness::PiecewiseConstant : Smoothness::Smooth) {}

double FrictionField::value(const Point& q) const {
    const double v = impl_->value(q);
    assert(v >= impl_->lo - 1e-12 && v <= impl_->hi + 1e-12);
    return v;
}

Point FrictionField::gradient(const Point& q) const {
    if (impl_->piecewise_constant()) {
        for (double j : impl_->jumps)
            if (q[0] == j) throw InvalidArgument("gradient of piecewise-constant friction at a jump");
    }
    return impl_->gradient(q);
}

double FrictionField::value_and_gradient(const Point& q, Point& grad) const {
    if (impl_->piecewise_constant()) {
        grad = gradient(q);
        return value(q);
    }
    return impl_->value_gradient(q, grad);
}

double FrictionField::value_left(const Point& q) const { return impl_->value_left(q); }
double FrictionField::value_right(const Point& q) const { return impl_->value_right(q); }
double FrictionField::lower_bound() const noexcept { return impl_->lo; }
double FrictionField::upper_bound() const noexcept { return impl_->hi; }
int FrictionField::dimension() const noexcept { return impl_->dim; }
bool FrictionField::is_piecewise_constant() const noexcept { return impl_->piecewise_constant(); }
const std::vector<double>& FrictionField::jumps() const noexcept { return impl_->jumps; }
const std::string& FrictionField::description() const noexcept { return impl_->description; }

FrictionField FrictionField::with_smoothness(Smoothness s) const {
    FrictionField copy = *this;
    copy.smoothness_ = s;
    return copy;
}

// DriftField ---------------------------------------------------------------

DriftField::DriftField(std::shared_ptr<const detail::DriftImpl> impl) : impl_(std::move(impl)) {}

Point DriftField::value(const Point& q) const { return impl_->value(q); }
double DriftField::bound() const noexcept { return impl_->bound; }
int DriftField::dimension() const noexcept { return impl_->dim; }
bool DriftField::is_zero() const noexcept { return impl_->zero; }
const std::string& DriftField::description() const noexcept { return impl_->description; }

// Catalog ------------------------------------------------------------------

namespace fields {

FrictionField constant(double c, int dim) {
    check_dim(dim);
    return FrictionField(finish(std::make_shared<ConstantFriction>(c), dim, c, c,
                                "constant(" + fmt_num(c) + ")"));
}

FrictionField sinusoidal(double c0, double c1, const Point& wavevector, int dim) {
    check_dim(dim);
    const double a = std::abs(c1);
    return FrictionField(finish(std::make_shared<SinusoidalFriction>(c0, c1, wavevector), dim,
                                c0 - a, c0 + a,
                                "sinusoidal(" + fmt_num(c0) + "," + fmt_num(c1) + "," +
                                    fmt_point(wavevector, dim) + ")"));
}

FrictionField tanh_ramp(double lo, double hi, double width) {
    if (!(width > 0.0)) throw InvalidArgument("tanh_ramp width must be positive");
    return FrictionField(finish(std::make_shared<TanhRampFriction>(lo, hi, width), 1,
                                std::min(lo, hi), std::max(lo, hi),
                                "tanh_ramp(" + fmt_num(lo) + "," + fmt_num(hi) + "," + fmt_num(width) + ")"));
}

FrictionField step(double lambda1, double lambda2) {
    auto impl = finish(std::make_shared<StepFriction>(lambda1, lambda2), 1, std::min(lambda1, lambda2),
                       std::max(lambda1, lambda2),
                       "step(" + fmt_num(lambda1) + "," + fmt_num(lambda2) + ")");
    impl->jumps = {0.0};
    return FrictionField(impl);
}

FrictionField clipped_linear(double center, double radius, double width, int dim, double anchor) {
    check_dim(dim);
    if (!(radius > 0.0) || !(width > 0.0))
        throw InvalidArgument("clipped_linear radius and width must be positive");
    const double span = radius + width;
    return FrictionField(finish(std::make_shared<ClippedLinearFriction>(center, radius, width, anchor), dim,
                                center - span, center + span,
                                "clipped_linear(" + fmt_num(center) + "," + fmt_num(radius) + "," +
                                    fmt_num(width) + ")"));
}

}  // namespace fields

namespace drifts {

DriftField zero(int dim) {
    check_dim(dim);
    auto p = std::make_shared<ZeroDrift>();
    p->dim = dim;
    p->zero = true;
    p->description = "zero";
    return DriftField(p);
}

DriftField constant(const Point& b, int dim) {
    check_dim(dim);
    auto p = std::make_shared<ConstantDrift>(b);
    p->dim = dim;
    p->bound = norm(b, dim);
    p->zero = p->bound == 0.0;
    p->description = "constant(" + fmt_point(b, dim) + ")";
    return DriftField(p);
}

DriftField sinusoidal(const Point& amplitude, const Point& wavevector, int dim) {
    check_dim(dim);
    auto p = std::make_shared<SinusoidalDrift>(amplitude, wavevector);
    p->dim = dim;
    p->bound = norm(amplitude, dim);
    p->zero = p->bound == 0.0;
    p->description = "sinusoidal(" + fmt_point(amplitude, dim) + "," + fmt_point(wavevector, dim) + ")";
    return DriftField(p);
}

}  // namespace drifts

// ModelSpec ----------------------------------------------------------------

namespace {
Point scaled(const Point& q, double eps, int dim) {
    if (eps == 1.0) return q;
    Point y{};
    for (int i = 0; i < dim; ++i) y[i] = q[i] / eps;
    return y;
}
}  // namespace

double ModelSpec::friction_at(const Point& q) const {
    return friction.value(scaled(q, oscillation_scale, dimension));
}

Point ModelSpec::friction_gradient_at(const Point& q) const {
    Point g = friction.gradient(scaled(q, oscillation_scale, dimension));
    if (oscillation_scale != 1.0)
        for (int i = 0; i < dimension; ++i) g[i] /= oscillation_scale;
    return g;
}

double ModelSpec::friction_and_gradient_at(const Point& q, Point& grad) const {
    const double v = friction.value_and_gradient(scaled(q, oscillation_scale, dimension), grad);
    if (oscillation_scale != 1.0)
        for (int i = 0; i < dimension; ++i) grad[i] /= oscillation_scale;
    return v;
}

Point ModelSpec::drift_at(const Point& q) const {
    if (drift.is_zero()) return {};
    return drift.value(scaled(q, oscillation_scale, dimension));
}

bool ValidationReport::mentions(const std::string& fragment) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const std::string& v) { return v.find(fragment) != std::string::npos; });
}

ValidationReport validate_model(const ModelSpec& spec) {
    ValidationReport r;
    auto add = [&](std::string s) { r.violations.push_back(std::move(s)); };

    if (spec.dimension < 1 || spec.dimension > kMaxDim) add("dimension out of range");
    if (spec.friction.dimension() != spec.dimension) add("friction dimension does not match d");
    if (spec.drift.dimension() != spec.dimension) add("drift dimension does not match d");

    const double lo = spec.friction.lower_bound();
    const double hi = spec.friction.upper_bound();
    if (!(lo > 0.0)) add("λ lower bound ≤ 0");
    if (!std::isfinite(hi)) add("λ upper bound not finite");
    if (lo > hi) add("λ lower bound exceeds upper bound");
    if (spec.friction.is_piecewise_constant() && spec.friction.smoothness() == Smoothness::Smooth)
        add("step field must be piecewise-constant");
    if (!spec.friction.is_piecewise_constant() &&
        spec.friction.smoothness() == Smoothness::PiecewiseConstant)
        add("smooth field declared piecewise-constant");
    if (!std::isfinite(spec.drift.bound())) add("drift bound not finite");

    if (!(spec.noise_scale > 0.0)) add("σ must be positive");
    if (!(spec.mass > 0.0)) add("μ must be positive");
    if (!(spec.horizon > 0.0)) add("T must be positive");
    if (!(spec.oscillation_scale > 0.0)) add("ε must be positive");
    if (!(spec.mollifier_width >= 0.0)) add("δ must be non-negative");
    for (int i = 0; i < kMaxDim; ++i) {
        if (!std::isfinite(spec.initial_position[i]) || !std::isfinite(spec.initial_momentum[i]))
            add("initial state not finite");
        if (i >= spec.dimension && (spec.initial_position[i] != 0.0 || spec.initial_momentum[i] != 0.0))
            add("initial state has components beyond d");
    }
    return r;
}

void require_valid(const ModelSpec& spec) {
    const auto r = validate_model(spec);
    if (r.ok()) return;
    std::string msg = "invalid model:";
    for (const auto& v : r.violations) msg += " " + v + ";";
    throw InvalidArgument(msg);
}

double gradient_check(const FrictionField& field, std::span<const Point> points, double fd_step) {
    if (field.is_piecewise_constant())
        throw Unsupported("gradient_check is unsupported for piecewise-constant friction");
    const int d = field.dimension();
    double worst = 0.0;
    for (const Point& q : points) {
        const Point g = field.gradient(q);
        Point diff{};
        for (int i = 0; i < d; ++i) {
            Point qp = q, qm = q;
            qp[i] += fd_step;
            qm[i] -= fd_step;
            diff[i] = (field.value(qp) - field.value(qm)) / (2.0 * fd_step) - g[i];
        }
        worst = std::max(worst, norm(diff, d) / (1.0 + norm(g, d)));
    }
    return worst;
}

double norm(const Point& v, int dim) noexcept {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += v[i] * v[i];
    return std::sqrt(s);
}

}  // namespace vfsk
