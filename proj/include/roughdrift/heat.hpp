#pragma once

// Gaussian heat kernel, heat semigroup on grid paths, mollification, and the
// square-root substitution quadrature for time integrals with an integrable
// singularity at the left endpoint.  These are the convolution primitives
// behind the environment lift and the mild-solution solver.

#include <functional>

#include "roughdrift/grid.hpp"

namespace rd::heat {

/// Highest spatial derivative of the kernel the library ever takes.
inline constexpr int kMaxDerivative = 4;

/// Default Simpson node count for time_singular_integral.
inline constexpr int kDefaultSingularNodes = 257;

/// k-th spatial derivative of the heat kernel p_t(x) = exp(-x^2/2t)/sqrt(2 pi t),
/// evaluated through the Hermite closed form
///   d^k/dx^k p_t(x) = (-1)^k t^{-k/2} He_k(x/sqrt t) p_t(x).
/// Requires t > 0 and 0 <= k <= kMaxDerivative.
double kernel(double t, double x, int k);

/// Grid samples of d^k/dx^k (P_t f), the k-th derivative of the heat
/// semigroup applied to a scalar path.  Quadrature: trapezoid over a grid
/// refined to resolve the kernel (spacing <= min(dx, sqrt(t)/2)), refined
/// node values by 4-point cubic interpolation, kernel support truncated at
/// 8 sqrt(t).  On the line, f is continued as a constant outside its window
/// and the continuation tails are added in closed form; on the torus the
/// kernel is wrapped over periodic images instead.
GridPath semigroup_apply(const GridPath& f, double t, int k,
                         Geometry geom = Geometry::line);

/// \int_t^T g(s) ds where g may blow up like (s-t)^{-power} at s = t with
/// power < 1.  The substitution s = t + u^2 turns the integral into
/// \int 2 u g(t+u^2) du, handled by composite Simpson with n_nodes nodes
/// (odd, >= 3).  The u = 0 node never evaluates g at s = t: for power < 1/2
/// the integrand vanishes there, and for power >= 1/2 the node value is
/// estimated from a half-step evaluation.
GridPath time_singular_integral(const std::function<GridPath(double)>& g,
                                double t, double T, double power,
                                int n_nodes = kDefaultSingularNodes);

/// Smoothing density: a Gaussian of standard deviation 1/level, i.e. the
/// level-n member rho_n(x) = n rho(n x) of a mollifier family.  Discrete
/// weights are renormalised to unit mass on the grid.
struct Mollifier {
    int level = 8;

    void validate() const;
};

/// Convolve one slice with the mollifier (constant continuation on the
/// line, wrap-around on the torus).
GridPath mollify_slice(const GridPath& f, const Mollifier& m,
                       Geometry geom = Geometry::line);

/// Mollify every time slice of a field.
TimeSpaceField mollify(const TimeSpaceField& Y, const Mollifier& m,
                       Geometry geom = Geometry::line);

/// Flatten a field outside a central window: the output agrees with Y on
/// [-N, N], is constant outside [-2N, 2N], and in between its increments are
/// those of Y scaled by a smooth symmetric profile that falls from 1 to 0.
/// Discretely, increments of each slice are multiplied by the profile at the
/// midpoint and re-summed from the grid point nearest 0, which reproduces Y
/// exactly wherever the profile is 1.
TimeSpaceField truncate_derivatives(const TimeSpaceField& Y, int N);

/// The smooth cutoff profile used by truncate_derivatives: symmetric, 1 on
/// [-N, N], 0 outside [-2N, 2N], infinitely differentiable, with derivative
/// bounds proportional to 1/N.  Exposed for tests.
double cutoff_profile(double x, int N);

}  // namespace rd::heat
