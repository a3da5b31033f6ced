#pragma once

// Regularity seminorms and growth functionals on grid-sampled objects.  All
// suprema are taken over grid pairs — the grid restriction of the continuum
// definitions — which keeps every quantity deterministic and exactly
// reproducible.  Increments of vector-valued paths are measured in the
// Euclidean norm.

#include "roughdrift/grid.hpp"

namespace rd::holder {

/// max over grid pairs x != y inside `sub` of |f(y)-f(x)| / |y-x|^alpha.
/// Requires at least two grid points in `sub`.
double holder_seminorm(const GridPath& f, double alpha, const Interval& sub);

/// Convenience overload over the full grid span.
double holder_seminorm(const GridPath& f, double alpha);

/// Growth-weighted norm  ||f||_inf + (1 v max|x|)^{-alpha/2} * seminorm,
/// taken over the whole grid.  The weight discounts the seminorm on wide
/// windows so that paths with polynomially growing oscillation still get a
/// finite, comparable size.
double weighted_norm(const GridPath& f, double alpha);

/// max over grid pairs i != j inside `sub` of |R(x_i,x_j)| / |x_j-x_i|^gamma.
double two_param_norm(const TwoParamField& R, double gamma, const Interval& sub);

/// Convenience overload over the full grid span.
double two_param_norm(const TwoParamField& R, double gamma);

/// Growth functional of a path/area pair on a symmetric grid:
///   sup over window radii a >= 1 of
///     seminorm_alpha(W; [-a,a]) / a^chi + seminorm_{2 alpha}(WW; [-a,a]) / a^{2 chi},
/// the radii running over grid-representable values.  Requires W and WW on
/// the same grid, symmetric about 0, with radius >= 1.
double kappa_growth(const GridPath& W, const TwoParamField& WW, double alpha,
                    double chi);

/// Rectangular window in (t, x) for time-space norms.
struct SpaceTimeWindow {
    Interval time;
    Interval space;
};

/// max over pairs of grid nodes (s,x) != (t,y) inside the window of
///   |f_t(y) - f_s(x)| / (|t-s|^gamma + |y-x|^alpha).
double time_space_holder(const TimeSpaceField& f, double gamma, double alpha,
                         const SpaceTimeWindow& window);

/// Empirical regularity exponent: least-squares slope of
/// log(max_i |f(x_{i+l}) - f(x_i)|) against log(l * dx) over the given
/// integer lags l (at least three, each inside the grid).  Throws when some
/// lag produces identically zero increments (constant path).
double holder_exponent_fit(const GridPath& f, const std::vector<int>& lags);

/// Same estimator on a time-space field: the max at lag l is additionally
/// taken over time slices, so the fitted exponent measures spatial
/// regularity uniformly in time.
double holder_exponent_fit(const TimeSpaceField& f, const std::vector<int>& lags);

}  // namespace rd::holder
