#pragma once

// Monte-Carlo laboratory around the drift-heat equation: Euler-Maruyama
// simulation in a (possibly mollified) environment, martingale diagnostics
// against mild solutions, the two drift evaluations (PDE route and kernel
// expansion), moment checks on the non-Brownian part of the motion, and
// distributional comparisons across mollification levels.
//
// Randomness is drawn through fixed-width path blocks with per-block
// sub-streams derived from the user seed, so results are bit-identical for a
// given seed no matter how blocks would be scheduled across workers.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "roughdrift/grid.hpp"
#include "roughdrift/lift.hpp"
#include "roughdrift/pde.hpp"
#include "roughdrift/stats.hpp"

namespace rd::sde {

using rd::Geometry;

/// A batch of simulated trajectories together with their driving noise.
/// X and B are n_paths x (n_steps + 1); column k holds time t0 + k dt.
/// X(:,0) = x0 and B(:,0) = 0.  A path that leaves the spatial window is
/// flagged and frozen at its last inside value; its noise keeps recording.
struct SdePaths {
    double t0 = 0.0;
    double dt = 0.0;
    double x0 = 0.0;
    std::uint64_t seed = 0;
    Eigen::MatrixXd X;
    Eigen::MatrixXd B;
    std::vector<std::uint8_t> frozen;

    int n_paths() const { return static_cast<int>(X.rows()); }
    int n_steps() const { return static_cast<int>(X.cols()) - 1; }
    double frozen_fraction() const;
    void validate() const;
};

/// Width of the RNG path blocks; fixed so that stream assignment does not
/// depend on how many paths are requested or how work would be split.
inline constexpr int kPathBlock = 64;

/// Drift table = centered difference of Y in x (one-sided at the edges).
TimeSpaceField centered_slope(const TimeSpaceField& Y);

/// Euler-Maruyama with a precomputed drift table, bilinearly interpolated in
/// (t, x).  dt must divide the table's time step; the simulation runs over
/// the table's whole time span and freezes paths at the table's spatial
/// window edges.
SdePaths simulate_with_drift(const TimeSpaceField& drift, double x0, double dt, int n_paths,
                             std::uint64_t seed);

/// Euler-Maruyama in the environment Y: drift = centered slope of Y.
SdePaths simulate_euler(const TimeSpaceField& Y, double x0, double dt, int n_paths,
                        std::uint64_t seed);

/// Monte-Carlo check that t -> u_t(X_t) - int_0^t f_r(X_r) dr has constant
/// expectation: one estimate with standard error per checkpoint, compared
/// against u at the start of the paths.
struct MartingaleReport {
    std::vector<double> checkpoints;
    std::vector<double> estimate;
    std::vector<double> se;
    double reference = 0.0;
    double frozen_fraction = 0.0;
    bool pass = false;
};

MartingaleReport martingale_defect(const pde::MildSolution& sol, const TimeSpaceField& f,
                                   const SdePaths& paths,
                                   const std::vector<double>& checkpoints);

/// Everything needed to evaluate drift functionals of an environment:
/// the raw field, its regularity parameters, and solver settings.
struct DriftEnvironment {
    TimeSpaceField Y;
    HolderParams params;
    double tol = 1e-6;
    int max_iter = 60;
    int time_nodes = 65;
    Geometry geometry = Geometry::line;
};

/// Point query for the local mean displacement over a window h.
struct DriftQuery {
    double t = 0.0;
    double x = 0.0;
    double h = 0.0;
};

/// Mean displacement via the backward equation: solve with identity terminal
/// data at horizon t + h and return u_t(x) - x.  t and t + h must lie on
/// the environment's time grid.
double drift_function(const DriftEnvironment& env, const DriftQuery& q);

/// Whole-grid form of drift_function: the displacement profile u_t(.) - id
/// on the environment's spatial grid, from a single backward solve.  Point
/// queries interpolate this profile linearly.
GridPath drift_profile(const DriftEnvironment& env, double t, double h);

/// Mean displacement via the kernel expansion: first-derivative kernel
/// applied to the environment increment plus the rough correction integral.
double drift_expansion(const DriftEnvironment& env, const DriftQuery& q);

/// Whole-grid form of drift_expansion (one kernel pass for all probes).
GridPath drift_expansion_profile(const DriftEnvironment& env, double t, double h);

/// Moments of the non-Brownian part X_{t0+h} - x0 - B_{t0+h} across a ladder
/// of step counts.  Slopes are per-unit-of-q log-log slopes; the check
/// passes when both are at least (1 + beta)/2 - 0.1.  A drift-free batch
/// reports zero moments, infinite slopes, and a pass.
struct BrownianPartReport {
    std::vector<double> hs;
    std::vector<double> moment2;
    std::vector<double> moment4;
    double slope2 = 0.0;
    double slope4 = 0.0;
    bool pass = false;
};

BrownianPartReport brownian_part_check(const SdePaths& paths, const std::vector<int>& h_steps,
                                       double beta);

/// Kolmogorov-Smirnov comparison of the terminal laws simulated at two
/// mollification levels of the same environment (independent noise), with a
/// permutation null band at the 95% level.
struct LawComparisonReport {
    double ks = 0.0;
    double band95 = 0.0;
    int n_paths = 0;
    double frozen_a = 0.0;
    double frozen_b = 0.0;
    bool pass = false;
};

LawComparisonReport two_scheme_law_comparison(const TimeSpaceField& Y, int level_a,
                                              int level_b, double x0, double dt, int n_paths,
                                              std::uint64_t seed, int n_boot = 200);

/// Telescoping identity: paths driven by the per-step mean displacement
/// d_k(x) = drift_function(t_k, x, dt)/dt satisfy
///   X_T - x0 - sum_k d_k(X_k) dt - sum_k dB_k = 0
/// up to accumulation roundoff.  The simulation step must equal the
/// environment's time step.  `floor` is the roundoff allowance added to the
/// three-standard-error band.
struct TelescopeReport {
    double mean = 0.0;
    double se = 0.0;
    double floor = 0.0;
    double frozen_fraction = 0.0;
    bool pass = false;
};

TelescopeReport telescoping_check(const DriftEnvironment& env, double x0, int n_paths,
                                  std::uint64_t seed);

/// Mean and standard error of exp(|X_T|) over the batch.
MeanSE exponential_moment(const SdePaths& paths);

}  // namespace rd::sde
