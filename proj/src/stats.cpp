#include "roughdrift/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rd {

MeanSE mean_se(const Eigen::ArrayXd& x) {
    const int n = static_cast<int>(x.size());
    if (n < 2) throw std::invalid_argument("mean_se: need at least 2 samples");
    MeanSE out;
    out.n = n;
    out.mean = x.mean();
    const double var = (x - out.mean).square().sum() / static_cast<double>(n - 1);
    out.se = std::sqrt(var / static_cast<double>(n));
    return out;
}

SlopeFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    if (n < 2 || y.size() != x.size())
        throw std::invalid_argument("fit_linear: need >= 2 points with matching lengths");
    double sx = 0, sy = 0;
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_linear: degenerate abscissae");
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("fit_loglog: mismatched lengths");
    std::vector<double> lx, ly;
    lx.reserve(x.size());
    ly.reserve(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0 || y[i] <= 0.0)
            throw std::invalid_argument("fit_loglog: requires positive data");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return fit_linear(lx, ly);
}

double quantile(Eigen::ArrayXd sample, double p) {
    const int n = static_cast<int>(sample.size());
    if (n == 0) throw std::invalid_argument("quantile: empty sample");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile: p outside [0,1]");
    std::sort(sample.data(), sample.data() + n);
    const double pos = p * (n - 1);
    const int lo = static_cast<int>(std::floor(pos));
    const int hi = std::min(lo + 1, n - 1);
    const double frac = pos - lo;
    return (1.0 - frac) * sample[lo] + frac * sample[hi];
}

double ks_statistic(Eigen::ArrayXd a, Eigen::ArrayXd b) {
    const int na = static_cast<int>(a.size());
    const int nb = static_cast<int>(b.size());
    if (na == 0 || nb == 0) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(a.data(), a.data() + na);
    std::sort(b.data(), b.data() + nb);
    int ia = 0, ib = 0;
    double d = 0.0;
    while (ia < na && ib < nb) {
        const double v = std::min(a[ia], b[ib]);
        while (ia < na && a[ia] <= v) ++ia;
        while (ib < nb && b[ib] <= v) ++ib;
        const double fa = static_cast<double>(ia) / na;
        const double fb = static_cast<double>(ib) / nb;
        d = std::max(d, std::fabs(fa - fb));
    }
    return d;
}

BootstrapCI bootstrap_ci(Rng& rng, const Eigen::ArrayXd& sample,
                         const std::function<double(const Eigen::ArrayXd&)>& statistic,
                         int n_boot, double lo_p, double hi_p) {
    const int n = static_cast<int>(sample.size());
    if (n == 0) throw std::invalid_argument("bootstrap_ci: empty sample");
    if (n_boot < 2) throw std::invalid_argument("bootstrap_ci: need >= 2 resamples");
    BootstrapCI out;
    out.estimate = statistic(sample);
    Eigen::ArrayXd stats(n_boot);
    Eigen::ArrayXd resample(n);
    for (int b = 0; b < n_boot; ++b) {
        for (int i = 0; i < n; ++i) resample[i] = sample[rng.uniform_int(n)];
        stats[b] = statistic(resample);
    }
    out.lo = quantile(stats, lo_p);
    out.hi = quantile(stats, hi_p);
    return out;
}

}  // namespace rd
