#include "roughdrift/fbm.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rd {

namespace {

/// Autocovariance of unit-spacing fractional Gaussian noise:
/// gamma(k) = (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2.
double fgn_autocov(int k, double hurst) {
    const double kk = static_cast<double>(k);
    const double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2)
                  + std::pow(std::fabs(kk - 1.0), h2));
}

}  // namespace

Eigen::ArrayXd brownian_path(Rng& rng, int n, double t_max) {
    if (n < 1) throw std::invalid_argument("brownian_path: need n >= 1 steps");
    if (!(t_max > 0.0)) throw std::invalid_argument("brownian_path: t_max must be positive");
    const double sd = std::sqrt(t_max / n);
    Eigen::ArrayXd path(n + 1);
    path[0] = 0.0;
    for (int i = 0; i < n; ++i) path[i + 1] = path[i] + sd * rng.gaussian();
    return path;
}

Eigen::ArrayXd fbm_path(Rng& rng, int n, double hurst, double t_max) {
    if (n < 1) throw std::invalid_argument("fbm_path: need n >= 1 steps");
    if (!(hurst > 0.0 && hurst < 1.0))
        throw std::invalid_argument("fbm_path: hurst must lie in (0,1)");
    if (!(t_max > 0.0)) throw std::invalid_argument("fbm_path: t_max must be positive");
    if (hurst == 0.5) return brownian_path(rng, n, t_max);

    // Durbin-Levinson: draw X_i ~ N(mu_i, sigma2_i) conditional on the past,
    // where phi holds the current prediction coefficients.
    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> phi, phi_next;
    phi.reserve(static_cast<std::size_t>(n));
    phi_next.reserve(static_cast<std::size_t>(n));

    x[0] = rng.gaussian();  // gamma(0) = 1
    double sigma2 = 1.0;
    for (int i = 1; i < n; ++i) {
        // Reflection coefficient for lag i.
        double acc = fgn_autocov(i, hurst);
        for (int j = 0; j < i - 1; ++j) acc -= phi[static_cast<std::size_t>(j)] * fgn_autocov(i - 1 - j, hurst);
        const double kappa = acc / sigma2;

        phi_next.assign(static_cast<std::size_t>(i), 0.0);
        for (int j = 0; j < i - 1; ++j)
            phi_next[static_cast<std::size_t>(j)] =
                phi[static_cast<std::size_t>(j)] - kappa * phi[static_cast<std::size_t>(i - 2 - j)];
        phi_next[static_cast<std::size_t>(i - 1)] = kappa;
        phi.swap(phi_next);
        sigma2 *= (1.0 - kappa * kappa);
        if (sigma2 <= 0.0) sigma2 = 1e-300;  // numerical floor; never hit at desk scale

        double mu = 0.0;
        for (int j = 0; j < i; ++j) mu += phi[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(i - 1 - j)];
        x[static_cast<std::size_t>(i)] = mu + std::sqrt(sigma2) * rng.gaussian();
    }

    // Integrate the unit-spacing noise and rescale by self-similarity:
    // B_H(k dt) = dt^H * sum_{i<k} X_i.
    const double scale = std::pow(t_max / n, hurst);
    Eigen::ArrayXd path(n + 1);
    path[0] = 0.0;
    for (int i = 0; i < n; ++i) path[i + 1] = path[i] + scale * x[static_cast<std::size_t>(i)];
    return path;
}

}  // namespace rd
