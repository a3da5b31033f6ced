#pragma once

// Mild solutions of the backward drift equation
//
//     du/dt + (1/2) d2u/dx2 + dY_t/dx * du/dx = f,    u(T, .) = uT,
//
// posed against an environment that may be too rough for the product
// dY/dx * du/dx to exist classically.  The solver works with the mild
// formulation: the unknown is the spatial derivative v = du/dx, which is a
// fixed point of
//
//     v = psi + M v,
//   (M v)_t(x) = int_t^T [ d2/dx2 P_{s-t} ( C_s - C_s(x) ) ](x) ds,
//
// where C_s(y) is the compensated rough integral of v_s against Y_s built
// from the environment lift, and (phi, psi) collect the terminal data and
// the source.  u itself is recovered from v through the first-derivative
// analogue of the same kernel integral.
//
// Everything is deterministic for fixed grids; accuracy is set by the grid
// spacings, the time-quadrature node count, and the Picard tolerance.

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "roughdrift/grid.hpp"
#include "roughdrift/heat.hpp"
#include "roughdrift/lift.hpp"

namespace rd::pde {

using rd::Geometry;

/// Terminal data and source folded into one pair of fields:
///   phi_t = P_{T-t} uT - int_t^T P_{s-t} f_s ds,     psi = d phi / dx.
struct TerminalProfile {
    TimeSpaceField phi;
    TimeSpaceField psi;
};

/// Builds (phi, psi) on the time grid of `f`, which must contain T.  The
/// terminal condition must carry two components (value, derivative); the
/// derivative component feeds psi directly, so differentiating the data is
/// never done numerically.  `gamma` is the spatial regularity of the source
/// and controls the strength assigned to the s -> t singularity of the
/// derivative integral.
TerminalProfile terminal_profile(const GridPath& uT, const TimeSpaceField& f, double T,
                                 double gamma = 1.0, Geometry geom = Geometry::line,
                                 int time_nodes = 65);

struct PicardOptions {
    int time_nodes = 65;
    Geometry geometry = Geometry::line;
};

/// One application of the fixed-point operator M to a derivative candidate.
/// `v` is a scalar field on the lift's grids and is understood as carrying
/// the controlled expansion (0, v) with respect to (Y, Z): its increments
/// are tracked by the correction component of the environment, which is what
/// the compensated prefix inside the kernel integral uses.  Throws
/// IntegrityError when the lift lacks its cross components or the grids
/// disagree.
TimeSpaceField picard_operator(const TimeSpaceField& v, const lift::RoughLift& lift,
                               const PicardOptions& opts = {});

/// Problem data for the mild solver.
struct MildProblem {
    lift::RoughLift lift;    ///< environment lift on the solution grids.
    TimeSpaceField f;        ///< source term (may be identically zero).
    GridPath uT;             ///< terminal condition, components (value, derivative).
    double T = 1.0;          ///< horizon; must equal the lift's horizon.
    HolderParams params;     ///< exponents; must satisfy beta < alpha, beta > 2 chi.
    double gamma = 1.0;      ///< spatial regularity of the source.
    double tol = 1e-6;       ///< sup-norm residual target of the iteration.
    int max_iter = 60;
    int time_nodes = 65;
    Geometry geometry = Geometry::line;

    /// Grid conformity, exponent constraints, and finiteness of the data.
    void validate() const;
};

struct MildSolution {
    TimeSpaceField u;              ///< solution values.
    TimeSpaceField v;              ///< spatial derivative (the fixed point).
    TimeSpaceField dWv;            ///< controlled expansion of v: components (0, v).
    double residual = 0.0;         ///< sup |v - psi - M v| at the returned iterate.
    int iterations = 0;
    std::vector<double> history;   ///< residual after each iteration.
};

/// Raised when the Picard iteration exhausts max_iter while the residuals
/// have stopped decreasing; carries the full residual history.
class ConvergenceError : public std::runtime_error {
  public:
    ConvergenceError(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), history_(std::move(history)) {}
    const std::vector<double>& history() const { return history_; }

  private:
    std::vector<double> history_;
};

/// Runs the Picard iteration v <- psi + M v from v0 = psi until the update
/// falls below p.tol, then reconstructs u = phi + first-derivative kernel
/// integral of the fixed point.  On success the returned iterate satisfies
/// the residual bound exactly as reported.  The terminal slice reproduces uT
/// verbatim.  Throws ConvergenceError when max_iter is reached after the
/// residuals failed to decrease three times in a row.
MildSolution solve_mild(const MildProblem& p);

/// Fitted regularity of a computed solution: log-log slopes of peak
/// increments over dyadic lags, measured on the interior half of the window
/// (the outer part is influenced by the continuation of data beyond the
/// grid).  `exact` is set when the increments sit at rounding level, in
/// which case the slopes are reported as zero and should be ignored.
struct PdeRegularity {
    double u_time = 0.0;      ///< time exponent of u.
    double v_time = 0.0;      ///< time exponent of v.
    double v_space = 0.0;     ///< space exponent of v.
    double growth_rate = 0.0; ///< semilog envelope slope of |v| in |x|.
    bool exact = false;
};

PdeRegularity regularity_report(const MildSolution& sol);

/// Solves the problem against mollified environments of increasing level and
/// measures the sup-distance of consecutive solutions on the interior half
/// of the window.  `decreasing` requires the distances of both u and v to be
/// non-increasing (5% slack for values at rounding level).
struct StabilityStudy {
    std::vector<int> levels;
    std::vector<double> du;   ///< size levels-1: sup |u_{n+1} - u_n|.
    std::vector<double> dv;
    bool decreasing = false;
};

StabilityStudy stability_study(const MildProblem& p, const std::vector<int>& levels);

}  // namespace rd::pde
