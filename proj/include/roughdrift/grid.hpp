#pragma once

// Core value types: uniformly sampled paths in space, time-space fields, and
// two-parameter (pair-indexed) fields, plus the regularity-parameter bundle
// threaded through the analytic modules.  All types are plain immutable data
// after construction; operations on them live in the per-topic headers.

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace rd {

/// Spatial topology of a grid: an interval of the line (with constant
/// continuation outside), or a circle of circumference n_points * dx whose
/// sample at x0 + n_points*dx is identified with the one at x0.
enum class Geometry { line, torus };

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double span() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// R^n-valued function sampled on the uniform grid {x0 + i*dx : 0 <= i <= M}.
/// Row i of `values` is the value at x0 + i*dx.  When a whole-line object is
/// represented, the grid covers a truncated symmetric window [-a, a] and
/// values outside it are understood as constant continuation.
struct GridPath {
    double x0 = 0.0;
    double dx = 1.0;
    int n_components = 1;
    Eigen::ArrayXXd values;  // n_points x n_components

    GridPath() = default;
    GridPath(double x0, double dx, int n_points, int n_components = 1);

    int n_points() const { return static_cast<int>(values.rows()); }
    int n_intervals() const { return n_points() - 1; }
    double x(int i) const { return x0 + i * dx; }
    double x_max() const { return x(n_intervals()); }
    Interval domain() const { return {x0, x_max()}; }

    double operator()(int i, int c = 0) const { return values(i, c); }

    /// Index range [first, last] of grid points falling inside `sub`
    /// (endpoints snapped with a small relative tolerance).  Throws if the
    /// interval reaches outside the grid or captures fewer than two points.
    std::pair<int, int> index_range(const Interval& sub) const;

    /// Throws std::invalid_argument if the structure is inconsistent.
    void validate() const;
};

/// Sample a scalar function on a uniform grid.
GridPath path_from_function(double x0, double dx, int n_points,
                            const std::function<double(double)>& f);

/// R^n-valued function of (t, x) sampled on a uniform rectangle.  Component c
/// is stored as an n_times x n_space matrix; entry (k, i) is the value at
/// (t0 + k*dt, x0 + i*dx).
struct TimeSpaceField {
    double t0 = 0.0;
    double dt = 1.0;
    double x0 = 0.0;
    double dx = 1.0;
    int n_components = 1;
    std::vector<Eigen::MatrixXd> comps;

    TimeSpaceField() = default;
    TimeSpaceField(double t0, double dt, int n_times, double x0, double dx,
                   int n_space, int n_components = 1);

    int n_times() const { return comps.empty() ? 0 : static_cast<int>(comps[0].rows()); }
    int n_space() const { return comps.empty() ? 0 : static_cast<int>(comps[0].cols()); }
    double t(int k) const { return t0 + k * dt; }
    double x(int i) const { return x0 + i * dx; }
    double t_max() const { return t(n_times() - 1); }

    double operator()(int k, int i, int c = 0) const { return comps[static_cast<std::size_t>(c)](k, i); }

    /// Time slice k as a path over x (copies the row).
    GridPath slice(int k) const;

    /// Overwrite time slice k with the values of a conforming path.
    void set_slice(int k, const GridPath& p);

    void validate() const;
};

/// R^n-valued function of grid-point pairs, R(x_i, x_j), with vanishing
/// diagonal.  Component c is an n x n matrix; entry (i, j) refers to the
/// ordered pair (x_i, x_j).
struct TwoParamField {
    double x0 = 0.0;
    double dx = 1.0;
    int n_components = 1;
    std::vector<Eigen::MatrixXd> comps;

    TwoParamField() = default;
    TwoParamField(double x0, double dx, int n_points, int n_components = 1);

    int n_points() const { return comps.empty() ? 0 : static_cast<int>(comps[0].rows()); }
    double x(int i) const { return x0 + i * dx; }

    double operator()(int i, int j, int c = 0) const { return comps[static_cast<std::size_t>(c)](i, j); }

    std::pair<int, int> index_range(const Interval& sub) const;

    void validate() const;
};

/// Regularity and growth parameters shared by the analytic modules:
/// alpha   spatial exponent of the driving path,
/// beta    exponent of the controlled integrand (beta_prime = min(beta,1/2)),
/// chi     polynomial growth rate of the environment in the window radius,
/// theta   time-decay exponent used by drift estimates,
/// lambda  scale parameter of the weight profiles.
struct HolderParams {
    double alpha = 0.75;
    double beta = 0.6;
    double beta_prime = 0.5;
    double chi = 0.05;
    double theta = 1.0;
    double lambda = 1.0;

    HolderParams() = default;
    HolderParams(double alpha, double beta, double chi, double theta = 1.0,
                 double lambda = 1.0);

    /// Throws std::invalid_argument when a parameter leaves its admissible
    /// range.  The cross-constraints beta < alpha (controlled integration)
    /// and beta > 2*chi (growth-compatible integration) are checked at the
    /// call sites that rely on them, not here.
    void validate() const;
};

// ---------------------------------------------------------------------------
// CSV import/export.  One file per field; numbers are written with enough
// digits to round-trip exactly, so save/load is the identity on doubles.
// ---------------------------------------------------------------------------

/// Header `x,v0,...`, one row per grid point.
void save_csv(const GridPath& f, const std::string& path);
GridPath load_grid_csv(const std::string& path);

/// Header `t,x,v0,...`, one row per (time, space) pair, time-major.
void save_csv(const TimeSpaceField& f, const std::string& path);
TimeSpaceField load_field_csv(const std::string& path);

/// Header `x,y,v0,...`, one row per ordered grid pair, row-major.
void save_csv(const TwoParamField& f, const std::string& path);
TwoParamField load_two_param_csv(const std::string& path);

}  // namespace rd
