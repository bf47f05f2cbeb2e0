#include "riemfpp/metric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "riemfpp/rng.hpp"

namespace riemfpp {

void sym3_eigenvalues(const double m[3][3], double out[3]) {
    double p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
    if (p1 == 0.0) {
        out[0] = m[0][0];
        out[1] = m[1][1];
        out[2] = m[2][2];
        return;
    }
    double q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    double p2 = (m[0][0] - q) * (m[0][0] - q) + (m[1][1] - q) * (m[1][1] - q) +
                (m[2][2] - q) * (m[2][2] - q) + 2.0 * p1;
    double p = std::sqrt(p2 / 6.0);
    double b[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) b[i][j] = (m[i][j] - (i == j ? q : 0.0)) / p;
    double detb = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                  b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                  b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    double r = std::clamp(detb / 2.0, -1.0, 1.0);
    double phi = std::acos(r) / 3.0;
    out[0] = q + 2.0 * p * std::cos(phi);
    out[2] = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    out[1] = 3.0 * q - out[0] - out[2];
}

std::string MetricTransform::kind_name() const {
    switch (kind) {
        case Kind::PaperDiagonal: return "paper-diagonal";
        case Kind::Constant: return "constant";
        case Kind::Conformal: return "conformal";
        case Kind::HyperbolicHalfPlane: return "hyperbolic-halfplane";
        case Kind::User: return "user";
    }
    return "?";
}

MetricTransform::Kind MetricTransform::kind_from_name(const std::string& name) {
    if (name == "paper-diagonal") return Kind::PaperDiagonal;
    if (name == "constant") return Kind::Constant;
    if (name == "conformal") return Kind::Conformal;
    if (name == "hyperbolic-halfplane" || name == "hyperbolic") return Kind::HyperbolicHalfPlane;
    if (name == "user") return Kind::User;
    throw std::invalid_argument("unknown metric transform kind: " + name);
}

MetricField::MetricField(MetricTransform transform,
                         std::vector<std::shared_ptr<ScalarField>> fields, GridSpec window,
                         InterpOrder interp)
    : transform_(std::move(transform)), window_(window), interp_(interp) {
    for (auto& f : fields) {
        if (!f) throw std::invalid_argument("null scalar field");
        if (interp_ == InterpOrder::Cubic) f->prepare_cubic();
        fields_.push_back(f);
    }
    switch (transform_.kind) {
        case MetricTransform::Kind::PaperDiagonal:
            if (fields_.size() != 1 && int(fields_.size()) != window_.dimension)
                throw std::invalid_argument("paper-diagonal needs 1 or d scalar fields");
            break;
        case MetricTransform::Kind::Conformal:
            if (fields_.size() != 1) throw std::invalid_argument("conformal needs 1 scalar field");
            break;
        case MetricTransform::Kind::Constant:
            if (transform_.parameters.empty() || !(transform_.parameters[0] > 0))
                throw std::invalid_argument("constant transform needs a positive parameter");
            break;
        case MetricTransform::Kind::HyperbolicHalfPlane:
            if (!(window_.origin[window_.dimension - 1] > 0))
                throw std::invalid_argument("hyperbolic half-plane window must have last coordinate > 0");
            break;
        case MetricTransform::Kind::User:
            if (!transform_.user) throw std::invalid_argument("user transform needs a callable");
            break;
    }
    // field windows must cover the metric window
    for (auto& f : fields_) {
        for (int i = 0; i < window_.dimension; ++i) {
            if (f->grid.origin[i] > window_.origin[i] + 1e-12 ||
                f->grid.origin[i] + f->grid.extent[i] < window_.origin[i] + window_.extent[i] - 1e-12)
                throw std::invalid_argument("scalar field window does not cover the metric window");
        }
    }
}

MetricField MetricField::constant(int dimension, double diag_value, GridSpec window) {
    MetricTransform t;
    t.kind = MetricTransform::Kind::Constant;
    t.parameters = {diag_value};
    (void)dimension;
    return MetricField(std::move(t), {}, window);
}

MetricField MetricField::hyperbolic_halfplane(GridSpec window) {
    MetricTransform t;
    t.kind = MetricTransform::Kind::HyperbolicHalfPlane;
    return MetricField(std::move(t), {}, window);
}

MetricField MetricField::paper_diagonal(std::shared_ptr<ScalarField> field, InterpOrder interp) {
    GridSpec w = field->grid;
    MetricTransform t;
    t.kind = MetricTransform::Kind::PaperDiagonal;
    return MetricField(std::move(t), {std::move(field)}, w, interp);
}

MetricField MetricField::paper_diagonal(std::vector<std::shared_ptr<ScalarField>> fields,
                                        InterpOrder interp) {
    if (fields.empty()) throw std::invalid_argument("paper_diagonal: no fields");
    GridSpec w = fields[0]->grid;
    MetricTransform t;
    t.kind = MetricTransform::Kind::PaperDiagonal;
    return MetricField(std::move(t), std::move(fields), w, interp);
}

MetricField MetricField::conformal(std::shared_ptr<ScalarField> field, InterpOrder interp) {
    GridSpec w = field->grid;
    MetricTransform t;
    t.kind = MetricTransform::Kind::Conformal;
    return MetricField(std::move(t), {std::move(field)}, w, interp);
}

bool MetricField::is_c2() const {
    switch (transform_.kind) {
        case MetricTransform::Kind::Constant:
        case MetricTransform::Kind::HyperbolicHalfPlane:
            return true;
        case MetricTransform::Kind::User:
            return transform_.user_is_c2;
        default:
            return interp_ == InterpOrder::Cubic;
    }
}

void MetricField::check_window(const Point& x) const {
    if (!window_.contains(x)) throw OutOfWindowError("metric_at: point outside the window");
}

bool MetricField::is_scalar_shape() const {
    switch (transform_.kind) {
        case MetricTransform::Kind::Constant:
        case MetricTransform::Kind::Conformal:
        case MetricTransform::Kind::HyperbolicHalfPlane:
            return true;
        case MetricTransform::Kind::PaperDiagonal:
            return fields_.size() == 1;
        case MetricTransform::Kind::User:
            return false;
    }
    return false;
}

double MetricField::scalar_at(const Point& x) const {
    switch (transform_.kind) {
        case MetricTransform::Kind::Constant:
            return transform_.parameters[0];
        case MetricTransform::Kind::HyperbolicHalfPlane: {
            double y = x[window_.dimension - 1];
            return 1.0 / (y * y);
        }
        case MetricTransform::Kind::Conformal:
            return std::exp(2.0 * fields_[0]->value(x, interp_));
        case MetricTransform::Kind::PaperDiagonal:
            return softplus(fields_[0]->value(x, interp_));
        default:
            throw Error("scalar_at on a non-scalar metric");
    }
}

MetricValue MetricField::value_at(const Point& x) const {
    check_window(x);
    const int d = window_.dimension;
    switch (transform_.kind) {
        case MetricTransform::Kind::Constant:
            return MetricValue::scalar(d, transform_.parameters[0]);
        case MetricTransform::Kind::HyperbolicHalfPlane: {
            double y = x[d - 1];
            return MetricValue::scalar(d, 1.0 / (y * y));
        }
        case MetricTransform::Kind::Conformal:
            return MetricValue::scalar(d, std::exp(2.0 * fields_[0]->value(x, interp_)));
        case MetricTransform::Kind::PaperDiagonal: {
            if (fields_.size() == 1)
                return MetricValue::scalar(d, softplus(fields_[0]->value(x, interp_)));
            std::array<double, 3> diag{};
            for (int i = 0; i < d; ++i) diag[i] = softplus(fields_[i]->value(x, interp_));
            return MetricValue::diagonal(d, diag);
        }
        case MetricTransform::Kind::User:
            return transform_.user(x, d);
    }
    throw Error("unreachable");
}

double MetricField::speed(const Point& x, const Point& v) const {
    check_window(x);
    if (is_scalar_shape()) {
        double s = scalar_at(x);
        return std::sqrt(s * dot(v, v, window_.dimension));
    }
    return std::sqrt(value_at(x).quad(v));
}

CurveLength MetricField::curve_length(const Polyline& curve, int min_intervals,
                                      double max_interval_length) const {
    if (curve.size() < 2) return {};
    const int d = window_.dimension;
    CurveLength out;
    for (size_t s = 1; s < curve.size(); ++s) {
        Point a = curve[s - 1], b = curve[s];
        if (!window_.contains(a) || !window_.contains(b))
            throw OutOfWindowError("curve_length: curve exits the window");
        Point delta = sub(b, a);
        double len = norm(delta, d);
        out.euclidean += len;
        if (len == 0) continue;
        int n = std::max(min_intervals, int(std::ceil(len / max_interval_length)));
        if (n % 2) ++n;  // composite Simpson needs an even interval count
        double hstep = 1.0 / n;
        double acc = 0;
        for (int i = 0; i <= n; ++i) {
            Point p = add(a, scale(delta, double(i) * hstep));
            double f = speed(p, delta);
            double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * f;
        }
        out.riemannian += acc * hstep / 3.0;
    }
    return out;
}

CubeExtremes MetricField::cube_extremes(const LatticePoint& z, int samples_per_axis) const {
    if (samples_per_axis < 1) throw std::invalid_argument("samples_per_axis must be >= 1");
    const int d = window_.dimension;
    Point lo{}, hi{};
    for (int i = 0; i < d; ++i) {
        lo[i] = double(z[i]) - 0.5;
        hi[i] = double(z[i]) + 0.5;
        if (lo[i] < window_.origin[i] - 1e-12 ||
            hi[i] > window_.origin[i] + window_.extent[i] + 1e-12)
            throw OutOfWindowError("cube_extremes: cube not inside the window");
    }
    CubeExtremes ext;
    ext.site = z;
    ext.samples_per_axis = samples_per_axis;
    double lmin = std::numeric_limits<double>::infinity();
    double lmax = -lmin;
    const int m = samples_per_axis;
    int64_t count = 1;
    for (int i = 0; i < d; ++i) count *= (m + 1);
    for (int64_t s = 0; s < count; ++s) {
        int64_t rem = s;
        Point p{};
        for (int i = 0; i < d; ++i) {
            int64_t k = rem % (m + 1);
            rem /= (m + 1);
            p[i] = lo[i] + (hi[i] - lo[i]) * double(k) / double(m);
        }
        MetricValue g = value_at(p);
        lmin = std::min(lmin, g.eigen_min());
        lmax = std::max(lmax, g.eigen_max());
    }
    ext.lambda = lmin;
    ext.Lambda = lmax;
    return ext;
}

namespace {

double transform_scalar_of_field_min(const MetricTransform& t, double field_min) {
    switch (t.kind) {
        case MetricTransform::Kind::Conformal:
            return std::exp(2.0 * field_min);
        case MetricTransform::Kind::PaperDiagonal:
            return softplus(field_min);
        default:
            throw Error("unsupported");
    }
}

double transform_scalar_of_field_max(const MetricTransform& t, double field_max) {
    switch (t.kind) {
        case MetricTransform::Kind::Conformal:
            return std::exp(2.0 * field_max);
        case MetricTransform::Kind::PaperDiagonal:
            return softplus(field_max);
        default:
            throw Error("unsupported");
    }
}

}  // namespace

double MetricField::lambda_min_window() const {
    switch (transform_.kind) {
        case MetricTransform::Kind::Constant:
            return transform_.parameters[0];
        case MetricTransform::Kind::HyperbolicHalfPlane: {
            double ymax = window_.origin[window_.dimension - 1] +
                          window_.extent[window_.dimension - 1];
            return 1.0 / (ymax * ymax);
        }
        case MetricTransform::Kind::PaperDiagonal:
        case MetricTransform::Kind::Conformal:
            if (interp_ == InterpOrder::Linear) {
                // linear interpolation stays inside node [min, max]; the
                // transform is increasing, so the node minimum is exact
                double v = std::numeric_limits<double>::infinity();
                for (auto& f : fields_)
                    v = std::min(v, transform_scalar_of_field_min(transform_, f->min_node_value()));
                return v;
            }
            break;
        case MetricTransform::Kind::User:
            break;
    }
    // dense scan fallback (cubic interpolation can overshoot node values)
    double v = std::numeric_limits<double>::infinity();
    const int d = window_.dimension;
    double step = fields_.empty() ? window_.spacing : fields_[0]->grid.spacing / 4.0;
    int64_t n[3] = {1, 1, 1};
    for (int i = 0; i < d; ++i) n[i] = int64_t(std::ceil(window_.extent[i] / step)) + 1;
    for (int64_t kz = 0; kz < n[2]; ++kz)
        for (int64_t ky = 0; ky < n[1]; ++ky)
            for (int64_t kx = 0; kx < n[0]; ++kx) {
                Point p = window_.origin;
                p[0] += window_.extent[0] * double(kx) / double(std::max<int64_t>(1, n[0] - 1));
                p[1] += window_.extent[1] * double(ky) / double(std::max<int64_t>(1, n[1] - 1));
                if (d == 3)
                    p[2] += window_.extent[2] * double(kz) / double(std::max<int64_t>(1, n[2] - 1));
                v = std::min(v, value_at(p).eigen_min());
            }
    return v;
}

double MetricField::lambda_max_window() const {
    switch (transform_.kind) {
        case MetricTransform::Kind::Constant:
            return transform_.parameters[0];
        case MetricTransform::Kind::HyperbolicHalfPlane: {
            double ymin = window_.origin[window_.dimension - 1];
            return 1.0 / (ymin * ymin);
        }
        case MetricTransform::Kind::PaperDiagonal:
        case MetricTransform::Kind::Conformal:
            if (interp_ == InterpOrder::Linear) {
                double v = 0;
                for (auto& f : fields_)
                    v = std::max(v, transform_scalar_of_field_max(transform_, f->max_node_value()));
                return v;
            }
            break;
        case MetricTransform::Kind::User:
            break;
    }
    double v = 0;
    const int d = window_.dimension;
    double step = fields_.empty() ? window_.spacing : fields_[0]->grid.spacing / 4.0;
    int64_t n[3] = {1, 1, 1};
    for (int i = 0; i < d; ++i) n[i] = int64_t(std::ceil(window_.extent[i] / step)) + 1;
    for (int64_t kz = 0; kz < n[2]; ++kz)
        for (int64_t ky = 0; ky < n[1]; ++ky)
            for (int64_t kx = 0; kx < n[0]; ++kx) {
                Point p = window_.origin;
                p[0] += window_.extent[0] * double(kx) / double(std::max<int64_t>(1, n[0] - 1));
                p[1] += window_.extent[1] * double(ky) / double(std::max<int64_t>(1, n[1] - 1));
                if (d == 3)
                    p[2] += window_.extent[2] * double(kz) / double(std::max<int64_t>(1, n[2] - 1));
                v = std::max(v, value_at(p).eigen_max());
            }
    return v;
}

MgfEstimate mgf_estimate(const std::vector<double>& lambda_samples, double r, int bootstrap,
                         uint64_t seed) {
    if (lambda_samples.empty()) throw std::invalid_argument("mgf_estimate: empty sample vector");
    const size_t n = lambda_samples.size();
    std::vector<double> ex(n);
    double mean = 0;
    for (size_t i = 0; i < n; ++i) {
        ex[i] = std::exp(r * lambda_samples[i]);
        mean += ex[i];
    }
    mean /= double(n);

    MgfEstimate out;
    out.value = mean;
    if (bootstrap <= 0 || n < 2) {
        out.ci_lo = out.ci_hi = mean;
        return out;
    }
    Xoshiro256 rng(seed);
    std::vector<double> boots(static_cast<size_t>(bootstrap));
    for (int b = 0; b < bootstrap; ++b) {
        double s = 0;
        for (size_t i = 0; i < n; ++i) s += ex[rng.below(n)];
        boots[size_t(b)] = s / double(n);
    }
    std::sort(boots.begin(), boots.end());
    auto pick = [&](double q) {
        double idx = q * double(bootstrap - 1);
        return boots[size_t(std::llround(idx))];
    };
    out.ci_lo = pick(0.025);
    out.ci_hi = pick(0.975);
    return out;
}

TailCheckResult tail_check(const std::vector<double>& lambda_samples, double u) {
    TailCheckResult out;
    out.bound = 2.0 * std::exp(-u * u / 2.0);
    if (lambda_samples.empty()) {
        out.pass = true;
        return out;
    }
    size_t exceed = 0;
    for (double v : lambda_samples)
        if (v > u) ++exceed;
    double n = double(lambda_samples.size());
    out.empirical = double(exceed) / n;
    out.standard_error = std::sqrt(std::max(out.empirical * (1.0 - out.empirical), 1.0 / n) / n);
    out.pass = out.empirical <= out.bound + 3.0 * out.standard_error;
    return out;
}

}  // namespace riemfpp
