#pragma once

#include <vector>

namespace riemfpp {

struct MeanCI {
    double mean = 0;
    double sd = 0;
    double ci_lo = 0;
    double ci_hi = 0;
    int n = 0;
};

double student_t_quantile(double p, int dof);

/// Sample mean with a two-sided Student-t confidence interval.
MeanCI mean_ci(const std::vector<double>& xs, double level = 0.95);

/// Batch-means interval for serially dependent samples: split into
/// `batches` contiguous blocks and treat block means as independent.
MeanCI batch_means_ci(const std::vector<double>& xs, int batches, double level = 0.95);

/// Ordinary least squares y ~ a + b x; returns {intercept, slope, r2}.
struct LinearFit {
    double intercept = 0;
    double slope = 0;
    double r2 = 0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace riemfpp
