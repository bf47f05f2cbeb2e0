#include "riemfpp/geodesics.hpp"

#include <algorithm>
#include <cmath>

namespace riemfpp {

namespace {

void dense_metric(const MetricField& metric, const Point& x, double g[3][3], int d) {
    MetricValue m = metric.value_at(x);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g[i][j] = m.entry(i, j);
}

bool inside_margin(const GridSpec& w, const Point& x, double margin) {
    for (int i = 0; i < w.dimension; ++i)
        if (x[i] < w.origin[i] + margin || x[i] > w.origin[i] + w.extent[i] - margin)
            return false;
    return true;
}

}  // namespace

ChristoffelArray christoffel(const MetricField& metric, const Point& x, double fd_step) {
    if (!metric.is_c2())
        throw Error("christoffel: metric transform is not C^2-capable "
                    "(use cubic field interpolation or an analytic transform)");
    const int d = metric.dimension();
    if (!inside_margin(metric.window(), x, fd_step))
        throw OutOfWindowError("christoffel: point too close to the window boundary");

    double dg[3][3][3] = {};  // dg[j][l][k] = d_j g_{lk}
    for (int j = 0; j < d; ++j) {
        Point xp = x, xm = x;
        xp[j] += fd_step;
        xm[j] -= fd_step;
        double gp[3][3], gm[3][3];
        dense_metric(metric, xp, gp, d);
        dense_metric(metric, xm, gm, d);
        for (int l = 0; l < d; ++l)
            for (int k = 0; k < d; ++k) dg[j][l][k] = (gp[l][k] - gm[l][k]) / (2.0 * fd_step);
    }

    MetricValue g0 = metric.value_at(x);
    ChristoffelArray out{};
    for (int j = 0; j < d; ++j)
        for (int k = j; k < d; ++k) {
            Point rhs{};
            for (int l = 0; l < d; ++l)
                rhs[l] = 0.5 * (dg[j][l][k] + dg[k][j][l] - dg[l][j][k]);
            Point gamma = g0.solve(rhs);
            for (int i = 0; i < d; ++i) {
                out[size_t(i)][size_t(j)][size_t(k)] = gamma[i];
                out[size_t(i)][size_t(k)][size_t(j)] = gamma[i];
            }
        }
    return out;
}

Polyline GeodesicCurve::points() const {
    Polyline p;
    p.reserve(samples.size());
    for (auto& s : samples) p.push_back(s.x);
    return p;
}

GeodesicCurve integrate_geodesic(const MetricField& metric, const Point& x0, const Point& v0,
                                 double length, double step, double fd_step) {
    const int d = metric.dimension();
    const GridSpec& w = metric.window();
    const double margin = 2.0 * fd_step;
    if (!inside_margin(w, x0, margin))
        throw OutOfWindowError("integrate_geodesic: start too close to the window boundary");

    double s0 = metric.speed(x0, v0);
    if (!(s0 > 0)) throw std::invalid_argument("integrate_geodesic: zero initial velocity");
    Point v = scale(v0, 1.0 / s0);
    Point x = x0;

    GeodesicCurve curve;
    curve.step = step;
    curve.samples.push_back({0.0, x, v, 1.0});

    auto accel = [&](const Point& xx, const Point& vv, Point& out) -> bool {
        if (!inside_margin(w, xx, fd_step)) return false;
        ChristoffelArray G = christoffel(metric, xx, fd_step);
        for (int i = 0; i < d; ++i) {
            double a = 0;
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) a += G[size_t(i)][size_t(j)][size_t(k)] * vv[j] * vv[k];
            out[i] = -a;
        }
        return true;
    };

    int64_t steps = int64_t(std::ceil(length / step));
    double t = 0;
    for (int64_t n = 0; n < steps; ++n) {
        double hstep = std::min(step, length - t);
        Point k1x = v, k1v{};
        Point k2x{}, k2v{}, k3x{}, k3v{}, k4x{}, k4v{};
        Point tmp{};
        bool ok = accel(x, v, k1v);
        if (ok) {
            tmp = add(x, scale(k1x, hstep / 2));
            k2x = add(v, scale(k1v, hstep / 2));
            ok = accel(tmp, k2x, k2v);
        }
        if (ok) {
            tmp = add(x, scale(k2x, hstep / 2));
            k3x = add(v, scale(k2v, hstep / 2));
            ok = accel(tmp, k3x, k3v);
        }
        if (ok) {
            tmp = add(x, scale(k3x, hstep));
            k4x = add(v, scale(k3v, hstep));
            ok = accel(tmp, k4x, k4v);
        }
        if (!ok) {
            curve.truncated = true;
            break;
        }
        Point xn = x, vn = v;
        for (int i = 0; i < d; ++i) {
            xn[i] += hstep / 6.0 * (k1x[i] + 2 * k2x[i] + 2 * k3x[i] + k4x[i]);
            vn[i] += hstep / 6.0 * (k1v[i] + 2 * k2v[i] + 2 * k3v[i] + k4v[i]);
        }
        if (!inside_margin(w, xn, margin)) {
            curve.truncated = true;
            break;
        }
        x = xn;
        v = vn;
        t += hstep;
        double sp = metric.speed(x, v);
        curve.max_speed_drift = std::max(curve.max_speed_drift, std::abs(sp - 1.0));
        curve.samples.push_back({t, x, v, sp});
    }
    return curve;
}

namespace {

struct Approach {
    double miss = 0;         // unsigned closest-approach distance
    double signed_miss = 0;  // lateral offset (2d), sign disambiguates sides
    double t_at = 0;
    size_t index = 0;
};

Approach closest_approach(const GeodesicCurve& curve, const Point& y, int d) {
    Approach best;
    best.miss = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < curve.samples.size(); ++i) {
        double m = norm(sub(curve.samples[i].x, y), d);
        if (m < best.miss) {
            best.miss = m;
            best.t_at = curve.samples[i].t;
            best.index = i;
        }
    }
    const auto& s = curve.samples[best.index];
    double cross = s.v[0] * (y[1] - s.x[1]) - s.v[1] * (y[0] - s.x[0]);
    best.signed_miss = cross >= 0 ? best.miss : -best.miss;
    return best;
}

}  // namespace

ShootResult shoot(const MetricField& metric, const Point& x, const Point& y, double tolerance,
                  double step, double fd_step, int max_iterations) {
    const int d = metric.dimension();
    if (d != 2) throw Error("shoot: implemented for d = 2");
    const GridSpec& w = metric.window();
    if (!w.contains(x) || !w.contains(y))
        throw OutOfWindowError("shoot: endpoints must lie in the window interior");

    double chord = metric.curve_length({x, y}, 16, 0.02).riemannian;
    double T = 1.6 * chord + 4.0 * step;

    auto trial = [&](double theta) {
        Point v0 = {std::cos(theta), std::sin(theta), 0};
        return integrate_geodesic(metric, x, v0, T, step, fd_step);
    };

    ShootResult out;
    const int sweep_n = 48;
    double base = std::atan2(y[1] - x[1], y[0] - x[0]);
    std::vector<double> thetas(sweep_n);
    std::vector<double> misses(sweep_n);
    std::vector<double> signed_misses(sweep_n);
    int best_i = 0;
    for (int i = 0; i < sweep_n; ++i) {
        // sweep the full circle, centered on the chord direction
        double th = base + 2.0 * M_PI * (double(i) / sweep_n - 0.5);
        GeodesicCurve c = trial(th);
        Approach a = closest_approach(c, y, d);
        thetas[size_t(i)] = th;
        misses[size_t(i)] = a.miss;
        signed_misses[size_t(i)] = a.signed_miss;
        if (a.miss < misses[size_t(best_i)]) best_i = i;
        ++out.iterations;
    }

    // bracket around the best sweep angle, then golden-section on |miss|
    double lo = thetas[size_t((best_i + sweep_n - 1) % sweep_n)];
    double hi = thetas[size_t((best_i + 1) % sweep_n)];
    if (hi < lo) hi += 2.0 * M_PI;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    auto miss_of = [&](double th) {
        ++out.iterations;
        GeodesicCurve c = trial(th);
        return closest_approach(c, y, d);
    };
    Approach m1 = miss_of(c1), m2 = miss_of(c2);
    while (out.iterations < max_iterations + sweep_n && (b - a) > 1e-12) {
        if (m1.miss < m2.miss) {
            b = c2;
            c2 = c1;
            m2 = m1;
            c1 = b - gr * (b - a);
            m1 = miss_of(c1);
        } else {
            a = c1;
            c1 = c2;
            m1 = m2;
            c2 = a + gr * (b - a);
            m2 = miss_of(c2);
        }
        if (std::min(m1.miss, m2.miss) < tolerance * 0.25) break;
    }
    double theta_best = m1.miss < m2.miss ? c1 : c2;
    GeodesicCurve final_curve = trial(theta_best);
    Approach fin = closest_approach(final_curve, y, d);

    // refine the arc length at closest approach by local projection
    double t_star = fin.t_at;
    if (fin.index + 1 < final_curve.samples.size() && fin.index > 0) {
        const auto& s = final_curve.samples[fin.index];
        double proj = (y[0] - s.x[0]) * s.v[0] + (y[1] - s.x[1]) * s.v[1];
        t_star += std::clamp(proj, -final_curve.step, final_curve.step);
    }

    out.curve = std::move(final_curve);
    out.curve.samples.erase(
        std::remove_if(out.curve.samples.begin(), out.curve.samples.end(),
                       [&](const GeodesicSample& s) { return s.t > fin.t_at + out.curve.step; }),
        out.curve.samples.end());
    out.riemannian_length = t_star;
    out.miss = fin.miss;
    out.converged = fin.miss <= tolerance;
    return out;
}

std::vector<EscapeProbeRow> completeness_probe(const std::vector<const MetricField*>& ensemble,
                                               int directions, double T, double step,
                                               double fd_step) {
    std::vector<EscapeProbeRow> rows;
    for (size_t mi = 0; mi < ensemble.size(); ++mi) {
        const MetricField& metric = *ensemble[mi];
        const int d = metric.dimension();
        const GridSpec& w = metric.window();
        double lambda = metric.lambda_min_window();
        double bound = 1.0 / std::sqrt(lambda);
        double dmin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < d; ++i) {
            dmin = std::min(dmin, -w.origin[i]);
            dmin = std::min(dmin, w.origin[i] + w.extent[i]);
        }
        if (!(dmin > T * bound))
            throw WindowTooSmallError(
                "completeness_probe: window radius must exceed T / sqrt(lambda_min)");
        for (int k = 0; k < directions; ++k) {
            double th = 2.0 * M_PI * double(k) / directions;
            Point v0 = {std::cos(th), std::sin(th), 0};
            if (d == 3) v0 = {std::cos(th), std::sin(th), std::sin(2.0 * th) * 0.5};
            GeodesicCurve c = integrate_geodesic(metric, Point{}, v0, T, step, fd_step);
            EscapeProbeRow row;
            row.metric_index = int(mi);
            row.angle = th;
            row.bound = bound;
            for (auto& s : c.samples)
                if (s.t > 0) row.max_ratio = std::max(row.max_ratio, norm(s.x, d) / s.t);
            row.within_bound = row.max_ratio <= bound * (1.0 + 1e-9);
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace riemfpp
