#pragma once

#include <vector>

#include <Eigen/Dense>

#include "roughdrift/grid.hpp"

namespace rd::rough {

/// A path together with its matrix of second-order increments.  The pair is
/// consistent when the two-parameter part satisfies the additivity
/// (Chen) relation over every ordered triple of grid points; `validate`
/// checks that relation on a subsampled set of triples (all triples on
/// small grids) with relative tolerance 1e-10.
struct RoughPath {
    GridPath W;         ///< n-component path.
    TwoParamField WW;   ///< n*n components; (j,k) stored at index j*n+k.
    double alpha = 0.5; ///< Hoelder exponent of W, in (1/3, 1].

    int n_components() const { return W.n_components; }
    void validate() const;
};

/// A scalar path v with a declared derivative with respect to the reference
/// path: the remainder v(y)-v(x)-dWv(x).(W(y)-W(x)) is expected to vanish
/// at twice the rate of the path increments, capped at rate one.
struct ControlledPath {
    GridPath v;        ///< scalar values.
    GridPath dWv;      ///< n components, one per component of W.
    double beta = 0.5; ///< Hoelder exponent of v, in (1/3, 1].

    double beta_prime() const { return beta < 0.5 ? beta : 0.5; }
    void validate() const;
};

/// Second-order increments of a grid path, computed cell by cell with the
/// trapezoid rule and accumulated through prefix sums, which makes the
/// additivity relation hold exactly (up to roundoff) by construction.
TwoParamField make_iterated_integral(const GridPath& W);

/// Left side minus right side of the additivity relation over the ordered
/// grid triple (ix, iy, iz), as an n-by-n matrix.
Eigen::MatrixXd chen_defect(const RoughPath& R, int ix, int iy, int iz);

/// Pairwise additivity defects through grid midpoints, as a two-parameter
/// field with n*n components; a consistent pair yields a field that is zero
/// to roundoff.
TwoParamField chen_defect_field(const RoughPath& R);

/// The remainder v(y)-v(x)-dWv(x).(W(y)-W(x)) over all grid pairs.
TwoParamField remainder_field(const ControlledPath& v, const RoughPath& R);

/// Compensated Riemann sum of v against W over one partition of [ix, iy]:
/// each cell contributes v(p)*(W(q)-W(p)) plus the declared derivative
/// contracted with the second-order increment.  `partition` lists grid
/// indices, strictly increasing from ix to iy.
Eigen::VectorXd compensated_sum(const ControlledPath& v, const RoughPath& R,
                                const std::vector<int>& partition);

/// Result of `rough_integral`: the value at the finest grid partition plus
/// a convergence record for each coarser partition that was evaluated.
struct RoughIntegral {
    Eigen::VectorXd value;          ///< finest-partition compensated sum.
    std::vector<double> mesh;       ///< largest cell width per coarser partition.
    std::vector<double> deviation;  ///< sup-norm distance to `value`.
};

/// Integral of a controlled path against a rough path over [ix, iy].  The
/// value is the compensated sum over every grid point in the window; the
/// coarser partitions (dyadic stride coarsenings of the window when none
/// are supplied) document convergence.
RoughIntegral rough_integral(const ControlledPath& v, const RoughPath& R, int ix, int iy,
                             const std::vector<std::vector<int>>& coarser = {});

/// Left-point Riemann sum of f dg over the finest grid partition of [ix, iy].
double young_integral(const GridPath& f, const GridPath& g, int ix, int iy);

/// Sizes entering the two-exponent product bound for the left-point sum.
struct YoungBound {
    double value;           ///< the left-point sum itself.
    double deviation;       ///< |value - f(x)(g(y)-g(x))|.
    double norm_f;          ///< alpha_f-Hoelder seminorm of f on the window.
    double norm_g;          ///< alpha_g-Hoelder seminorm of g on the window.
    double fitted_constant; ///< deviation / (norm_f * norm_g * span^(alpha_f+alpha_g)).
};

/// Measures the left-point sum against the product bound
/// norm_f * norm_g * span^(alpha_f+alpha_g) and reports the fitted constant
/// (zero when the bound's denominator vanishes).
YoungBound young_bound_report(const GridPath& f, const GridPath& g, int ix, int iy,
                              double alpha_f, double alpha_g);

/// Ladder study of the one-step error of the compensated sum.  For each
/// dyadic coarsening level, every cell's single-step sum is compared with
/// the finest-partition sum over the same cell, and the discrepancy is
/// divided by the two-term local bound
///   |WW| * |dWv| * h^(2a+b)  +  |W| * |R| * h^(a+2b'),
/// with the norms taken over the whole window.  A consistent scheme keeps
/// the ratio bounded across levels.
struct BoundCheck {
    std::vector<double> mesh;       ///< per-level largest cell width.
    std::vector<double> max_ratio;  ///< per-level worst cell ratio.
    double fitted_constant;         ///< max over levels.
};

BoundCheck integral_error_bound_check(const ControlledPath& v, const RoughPath& R,
                                      int ix, int iy, int n_levels = 4);

}  // namespace rd::rough
