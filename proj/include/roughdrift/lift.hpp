#pragma once

#include <string>
#include <vector>

#include "roughdrift/grid.hpp"
#include "roughdrift/heat.hpp"
#include "roughdrift/rough.hpp"
#include "roughdrift/util.hpp"

namespace rd::lift {

/// Component layout of the enlarged second-order part: index (i-1)*2+(j-1)
/// for the pair (i, j) with 1 = environment, 2 = flow correction.
inline constexpr int kYY = 0;
inline constexpr int kYZ = 1;
inline constexpr int kZY = 2;
inline constexpr int kZZ = 3;

/// Knobs shared by the lift constructions.
struct LiftOptions {
    Geometry geometry = Geometry::line;
    /// Simpson nodes of the time quadrature behind the inhomogeneous
    /// correction.  After substitution that integrand is regular, so a
    /// moderate count suffices; raise it for convergence studies.
    int time_nodes = 65;
    /// Slices differing by less than this (relative to the first slice)
    /// make the environment count as time-homogeneous, which zeroes the
    /// inhomogeneous correction exactly.
    double homogeneity_tol = 1e-13;
};

/// The environment path Y paired with its flow correction Z and the four
/// second-order components, one set per time slice of [t0, T].  Everything
/// lives on Y's space grid; the pair (Y_t, Z_t) with its second-order part
/// forms a two-component rough path for every t.
struct RoughLift {
    double T = 1.0;
    TimeSpaceField Y;                ///< scalar environment, times t0..T.
    TimeSpaceField Z;                ///< scalar correction, same shape.
    std::vector<TwoParamField> WW;   ///< per slice, 4 components (kYY..kZZ).
    HolderParams params;             ///< exponents with the lifted growth rate.

    int n_times() const { return static_cast<int>(WW.size()); }

    /// The slice-k pair assembled as a two-component rough path
    /// (W = (Y_k, Z_k)), sharing this lift's second-order data.
    rough::RoughPath slice_path(int k) const;

    /// Checks the closed-form symmetric components, the shuffle identity,
    /// and pairwise additivity on every slice.  Throws IntegrityError with
    /// the worst triple on failure.
    void validate() const;
};

/// Flow correction of the environment at horizon T: the closed-form
/// homogeneous part 2(P_{T-t}Y_t - Y_t) plus, for genuinely time-dependent
/// environments, a singular-in-time quadrature of the second-derivative
/// semigroup action on Y_s - Y_t.  The result covers the times t0..T.
TimeSpaceField build_Z(const TimeSpaceField& Y, double T, const LiftOptions& opts = {});

/// Cross-integral of the homogeneous part against the environment on one
/// slice: an exact-additivity construction from the sampled semigroup
/// action and a trapezoid prefix, valid for every ordered pair.
TwoParamField cross_integral_homogeneous(const GridPath& Y_slice, double t, double T,
                                         Geometry geom = Geometry::line);

/// Cross-integral of the inhomogeneous correction against the environment
/// slice at time t, as a left-point product sum (zero for time-homogeneous
/// environments).
TwoParamField cross_integral_inhomogeneous(const TimeSpaceField& Y, double t, double T,
                                           const LiftOptions& opts = {});

/// Empirical joint-regularity probe: fitted time exponent of the
/// environment and fitted space exponent of its smallest-lag time
/// increment, with the combined condition 2*nu + mu > 1 - alpha.
struct JointRegularity {
    double nu_hat = 0.0;  ///< time-direction exponent of Y.
    double mu_hat = 0.0;  ///< space exponent of the first time increment.
    bool ok = true;       ///< 2*nu + mu > 1 - alpha held.
};

JointRegularity joint_regularity_check(const TimeSpaceField& Y, double alpha);

/// Builds the full lift at horizon T: correction field, symmetric parts in
/// closed form, the cross component from the two cross-integrals, and its
/// partner through the shuffle identity.  The stored growth rate is the
/// lifted one: chi' = chi + max(0, 1/2 - alpha) + 0.01.
RoughLift assemble_lift(const TimeSpaceField& Y, double T, const HolderParams& base,
                        const LiftOptions& opts = {});

/// Mollification study: lifts of smoothed copies of the environment are
/// compared against the lift of the environment itself, level by level.
struct CauchyStudy {
    std::vector<int> levels;
    std::vector<double> dY;     ///< sup-over-time weighted distance of the paths.
    std::vector<double> dZ;     ///< same for the corrections.
    std::vector<double> dWW;    ///< sup-over-time two-parameter distance.
    std::vector<double> kappa;  ///< growth functional per level.
    bool decreasing = false;    ///< all three distances non-increasing (5% slack).
    bool bounded = false;       ///< kappa spread within a factor of three.
};

CauchyStudy geometric_cauchy_study(const TimeSpaceField& Y, double T,
                                   const std::vector<int>& levels, const HolderParams& base,
                                   const LiftOptions& opts = {});

/// Writes Y.csv, Z.csv, one CSV per slice for the second-order part, and a
/// manifest.json with the horizon, grids, exponents, and per-slice sizes.
void write_lift(const RoughLift& lift, const std::string& dir);

}  // namespace rd::lift
