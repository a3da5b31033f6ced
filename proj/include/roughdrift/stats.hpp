#pragma once

// Small statistics toolkit shared by the diagnostic and Monte-Carlo modules:
// mean/standard-error summaries, log-log slope fits, two-sample
// Kolmogorov-Smirnov distance, and a generic bootstrap.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "roughdrift/rng.hpp"

namespace rd {

/// Sample mean together with the standard error of the mean.
struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
    int n = 0;
};

MeanSE mean_se(const Eigen::ArrayXd& x);

/// Least-squares line through (log x_i, log y_i).  r2 is the usual
/// coefficient of determination of the fit.
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// Least-squares line through the raw points (x_i, y_i).
SlopeFit fit_linear(const std::vector<double>& x, const std::vector<double>& y);

/// Empirical p-quantile (linear interpolation between order statistics).
double quantile(Eigen::ArrayXd sample, double p);

/// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
double ks_statistic(Eigen::ArrayXd a, Eigen::ArrayXd b);

/// Percentile bootstrap: resample `sample` with replacement `n_boot` times,
/// apply `statistic` to each resample, and return the [lo_p, hi_p] quantiles
/// of the resulting distribution together with the point estimate.
struct BootstrapCI {
    double estimate = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

BootstrapCI bootstrap_ci(Rng& rng, const Eigen::ArrayXd& sample,
                         const std::function<double(const Eigen::ArrayXd&)>& statistic,
                         int n_boot, double lo_p, double hi_p);

}  // namespace rd
