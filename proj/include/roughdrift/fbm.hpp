#pragma once

// Exact sampling of (fractional) Brownian paths on uniform grids.  Fractional
// paths come from the Hosking/Durbin-Levinson recursion, which draws the
// increment process from its exact finite-dimensional law in O(n^2) time —
// ample at desk scale and free of the truncation artefacts of spectral
// approximations.

#include <Eigen/Dense>

#include "roughdrift/rng.hpp"

namespace rd {

/// Fractional Brownian path with Hurst index `hurst`, sampled at the n+1
/// points {k * t_max / n}, starting at 0.  hurst must lie in (0,1);
/// hurst = 1/2 short-circuits to the exact Brownian cumulative sum.
Eigen::ArrayXd fbm_path(Rng& rng, int n, double hurst, double t_max);

/// Standard Brownian path at the n+1 points {k * t_max / n}, starting at 0.
Eigen::ArrayXd brownian_path(Rng& rng, int n, double t_max);

}  // namespace rd
