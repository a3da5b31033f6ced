#include "roughdrift/norms.hpp"

#include <cmath>
#include <stdexcept>

#include "roughdrift/stats.hpp"

namespace rd::holder {

namespace {

/// Euclidean length of the difference between rows i and j of an array.
double row_diff_norm(const Eigen::ArrayXXd& v, int i, int j) {
    return (v.row(j) - v.row(i)).matrix().norm();
}

}  // namespace

double holder_seminorm(const GridPath& f, double alpha, const Interval& sub) {
    if (!(alpha > 0.0)) throw std::invalid_argument("holder_seminorm: alpha must be positive");
    const auto [first, last] = f.index_range(sub);
    double best = 0.0;
    for (int i = first; i <= last; ++i) {
        for (int j = i + 1; j <= last; ++j) {
            const double num = row_diff_norm(f.values, i, j);
            const double den = std::pow((j - i) * f.dx, alpha);
            const double r = num / den;
            if (r > best) best = r;
        }
    }
    return best;
}

double holder_seminorm(const GridPath& f, double alpha) {
    return holder_seminorm(f, alpha, f.domain());
}

double weighted_norm(const GridPath& f, double alpha) {
    if (f.n_points() < 2)
        throw std::invalid_argument("weighted_norm: need at least two grid points");
    double sup = 0.0;
    for (int i = 0; i < f.n_points(); ++i)
        sup = std::max(sup, f.values.row(i).matrix().norm());
    const double radius = std::max(std::fabs(f.x0), std::fabs(f.x_max()));
    const double weight = std::pow(std::max(1.0, radius), -alpha / 2.0);
    return sup + weight * holder_seminorm(f, alpha);
}

double two_param_norm(const TwoParamField& R, double gamma, const Interval& sub) {
    if (!(gamma > 0.0)) throw std::invalid_argument("two_param_norm: gamma must be positive");
    const auto [first, last] = R.index_range(sub);
    double best = 0.0;
    for (int i = first; i <= last; ++i) {
        for (int j = first; j <= last; ++j) {
            if (i == j) continue;
            double sq = 0.0;
            for (int c = 0; c < R.n_components; ++c) {
                const double v = R.comps[static_cast<std::size_t>(c)](i, j);
                sq += v * v;
            }
            const double r = std::sqrt(sq) / std::pow(std::fabs(j - i) * R.dx, gamma);
            if (r > best) best = r;
        }
    }
    return best;
}

double two_param_norm(const TwoParamField& R, double gamma) {
    return two_param_norm(R, gamma, {R.x(0), R.x(R.n_points() - 1)});
}

double kappa_growth(const GridPath& W, const TwoParamField& WW, double alpha,
                    double chi) {
    if (W.n_points() != WW.n_points() || std::fabs(W.x0 - WW.x0) > 1e-12 ||
        std::fabs(W.dx - WW.dx) > 1e-12)
        throw std::invalid_argument("kappa_growth: path and area must share one grid");
    if (!(chi >= 0.0)) throw std::invalid_argument("kappa_growth: chi must be nonnegative");
    const double left = -W.x0;
    const double right = W.x_max();
    if (std::fabs(left - right) > 1e-9 * W.dx)
        throw std::invalid_argument("kappa_growth: grid must be symmetric about 0");
    if (right < 1.0)
        throw std::invalid_argument("kappa_growth: grid radius must be at least 1");

    // Window radii a_k = x_max - k*dx, shrinking symmetrically while a >= 1.
    double best = 0.0;
    const int n = W.n_points();
    for (int k = 0;; ++k) {
        const double a = right - k * W.dx;
        if (a < 1.0 - 1e-9 * W.dx) break;
        if (n - 1 - k <= k) break;  // fewer than two points left
        const Interval win{-a, a};
        const double vw = holder_seminorm(W, alpha, win) / std::pow(a, chi);
        const double va = two_param_norm(WW, 2.0 * alpha, win) / std::pow(a, 2.0 * chi);
        best = std::max(best, vw + va);
    }
    return best;
}

double time_space_holder(const TimeSpaceField& f, double gamma, double alpha,
                         const SpaceTimeWindow& window) {
    if (!(gamma > 0.0) || !(alpha > 0.0))
        throw std::invalid_argument("time_space_holder: exponents must be positive");
    if (!(window.time.hi >= window.time.lo))
        throw std::invalid_argument("time_space_holder: degenerate time window");
    // Clip window to grid nodes; the time window may hold a single slice
    // (pure-space norm) but the overall window must contain >= 2 nodes.
    const double tol = 1e-9;
    int k0 = static_cast<int>(std::ceil((window.time.lo - f.t0) / f.dt - tol));
    int k1 = static_cast<int>(std::floor((window.time.hi - f.t0) / f.dt + tol));
    k0 = std::max(k0, 0);
    k1 = std::min(k1, f.n_times() - 1);
    int i0 = static_cast<int>(std::ceil((window.space.lo - f.x0) / f.dx - tol));
    int i1 = static_cast<int>(std::floor((window.space.hi - f.x0) / f.dx + tol));
    i0 = std::max(i0, 0);
    i1 = std::min(i1, f.n_space() - 1);
    if (k1 < k0 || i1 < i0 || (k1 - k0 + 1) * (i1 - i0 + 1) < 2)
        throw std::invalid_argument("time_space_holder: window captures fewer than two nodes");

    double best = 0.0;
    for (int k = k0; k <= k1; ++k) {
        for (int i = i0; i <= i1; ++i) {
            for (int l = k; l <= k1; ++l) {
                for (int j = (l == k ? i + 1 : i0); j <= i1; ++j) {
                    double sq = 0.0;
                    for (int c = 0; c < f.n_components; ++c) {
                        const double d = f.comps[static_cast<std::size_t>(c)](l, j) -
                                         f.comps[static_cast<std::size_t>(c)](k, i);
                        sq += d * d;
                    }
                    const double den = std::pow((l - k) * f.dt, gamma) +
                                       std::pow(std::fabs(j - i) * f.dx, alpha);
                    const double r = std::sqrt(sq) / den;
                    if (r > best) best = r;
                }
            }
        }
    }
    return best;
}

namespace {

double fit_lags(const std::vector<double>& scale, const std::vector<double>& peak,
                const char* who) {
    for (const double m : peak) {
        if (!(m > 0.0))
            throw std::invalid_argument(std::string(who) +
                                        ": a lag has identically zero increments");
    }
    return rd::fit_loglog(scale, peak).slope;
}

}  // namespace

double holder_exponent_fit(const GridPath& f, const std::vector<int>& lags) {
    if (lags.size() < 3)
        throw std::invalid_argument("holder_exponent_fit: need at least three lags");
    std::vector<double> scale, peak;
    for (const int l : lags) {
        if (l < 1 || l >= f.n_points())
            throw std::invalid_argument("holder_exponent_fit: lag outside the grid");
        double m = 0.0;
        for (int i = 0; i + l < f.n_points(); ++i)
            m = std::max(m, row_diff_norm(f.values, i, i + l));
        scale.push_back(l * f.dx);
        peak.push_back(m);
    }
    return fit_lags(scale, peak, "holder_exponent_fit");
}

double holder_exponent_fit(const TimeSpaceField& f, const std::vector<int>& lags) {
    if (lags.size() < 3)
        throw std::invalid_argument("holder_exponent_fit: need at least three lags");
    std::vector<double> scale, peak;
    for (const int l : lags) {
        if (l < 1 || l >= f.n_space())
            throw std::invalid_argument("holder_exponent_fit: lag outside the grid");
        double m = 0.0;
        for (int k = 0; k < f.n_times(); ++k) {
            for (int i = 0; i + l < f.n_space(); ++i) {
                double sq = 0.0;
                for (int c = 0; c < f.n_components; ++c) {
                    const double d = f.comps[static_cast<std::size_t>(c)](k, i + l) -
                                     f.comps[static_cast<std::size_t>(c)](k, i);
                    sq += d * d;
                }
                m = std::max(m, std::sqrt(sq));
            }
        }
        scale.push_back(l * f.dx);
        peak.push_back(m);
    }
    return fit_lags(scale, peak, "holder_exponent_fit");
}

}  // namespace rd::holder
