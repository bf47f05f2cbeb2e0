#include "riemfpp/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <stdexcept>

namespace riemfpp {

double student_t_quantile(double p, int dof) {
    boost::math::students_t dist{double(dof)};
    return boost::math::quantile(dist, p);
}

MeanCI mean_ci(const std::vector<double>& xs, double level) {
    if (xs.empty()) throw std::invalid_argument("mean_ci: empty sample");
    MeanCI out;
    out.n = int(xs.size());
    double sum = 0;
    for (double x : xs) sum += x;
    out.mean = sum / double(out.n);
    if (out.n == 1) {
        out.ci_lo = out.ci_hi = out.mean;
        return out;
    }
    double ss = 0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / double(out.n - 1));
    double tq = student_t_quantile(0.5 + level / 2.0, out.n - 1);
    double half = tq * out.sd / std::sqrt(double(out.n));
    out.ci_lo = out.mean - half;
    out.ci_hi = out.mean + half;
    return out;
}

MeanCI batch_means_ci(const std::vector<double>& xs, int batches, double level) {
    if (batches < 2) throw std::invalid_argument("batch_means_ci: need >= 2 batches");
    if (int(xs.size()) < batches) return mean_ci(xs, level);
    std::vector<double> means;
    size_t per = xs.size() / size_t(batches);
    for (int b = 0; b < batches; ++b) {
        double s = 0;
        for (size_t i = size_t(b) * per; i < size_t(b + 1) * per; ++i) s += xs[i];
        means.push_back(s / double(per));
    }
    return mean_ci(means, level);
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_fit: mismatched or short inputs");
    double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    LinearFit fit;
    double denom = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_tot = syy - sy * sy / n;
    double ss_res = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

}  // namespace riemfpp
