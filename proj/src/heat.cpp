#include "roughdrift/heat.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "roughdrift/util.hpp"

namespace rd::heat {

namespace {

/// Probabilists' Hermite polynomial He_k.
double hermite(int k, double u) {
    switch (k) {
        case 0: return 1.0;
        case 1: return u;
        case 2: return u * u - 1.0;
        case 3: return u * (u * u - 3.0);
        default: return u * u * (u * u - 6.0) + 3.0;  // k == 4
    }
}

void check_time_order(double t, const char* who) {
    if (!(t > 0.0)) throw std::invalid_argument(std::string(who) + ": t must be positive");
}

void check_deriv_order(int k, const char* who) {
    if (k < 0 || k > kMaxDerivative)
        throw std::invalid_argument(std::string(who) + ": derivative order must be in 0..4");
}

/// Values of f on the refinement {x0 + q * dx / r} by 4-point cubic
/// interpolation (exact at grid nodes).  Line grids clamp the stencil into
/// the grid near the ends; torus grids wrap it.
struct Refined {
    int r = 1;              // node spacing is dx / r
    Eigen::ArrayXd values;  // line: r*(n-1)+1 nodes; torus: r*n nodes
};

Refined refine(const GridPath& f, double target_h, Geometry geom) {
    const int n = f.n_points();
    Refined out;
    out.r = std::max(1, static_cast<int>(std::ceil(f.dx / target_h)));
    const int r = out.r;

    if (geom == Geometry::line) {
        const int R = r * (n - 1);
        out.values.resize(R + 1);
        if (r == 1) {
            out.values = f.values.col(0);
            return out;
        }
        if (n < 4)
            throw std::invalid_argument(
                "semigroup_apply: refinement needs at least 4 grid points");
        for (int q = 0; q <= R; ++q) {
            const int cell = std::min(q / r, n - 2);
            const int s = std::min(std::max(cell - 1, 0), n - 4);  // stencil start
            const double xi = static_cast<double>(q) / r - s;      // in [0, 3]
            double acc = 0.0;
            for (int j = 0; j < 4; ++j) {
                double w = 1.0;
                for (int m = 0; m < 4; ++m)
                    if (m != j) w *= (xi - m) / (j - m);
                acc += w * f.values(s + j, 0);
            }
            out.values[q] = acc;
        }
    } else {
        const int R = r * n;
        out.values.resize(R);
        if (r == 1) {
            out.values = f.values.col(0);
            return out;
        }
        for (int q = 0; q < R; ++q) {
            const int cell = q / r;
            const double theta = static_cast<double>(q - cell * r) / r;
            // Stencil {cell-1, cell, cell+1, cell+2} wrapped around the circle.
            const double w[4] = {
                -theta * (theta - 1.0) * (theta - 2.0) / 6.0,
                (theta + 1.0) * (theta - 1.0) * (theta - 2.0) / 2.0,
                -(theta + 1.0) * theta * (theta - 2.0) / 2.0,
                (theta + 1.0) * theta * (theta - 1.0) / 6.0};
            double acc = 0.0;
            for (int j = 0; j < 4; ++j) {
                const int idx = ((cell - 1 + j) % n + n) % n;
                acc += w[j] * f.values(idx, 0);
            }
            out.values[q] = acc;
        }
    }
    return out;
}

}  // namespace

double kernel(double t, double x, int k) {
    check_time_order(t, "kernel");
    check_deriv_order(k, "kernel");
    const double u = x / std::sqrt(t);
    const double p = std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI * t);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return sign * std::pow(t, -0.5 * k) * hermite(k, u) * p;
}

GridPath semigroup_apply(const GridPath& f, double t, int k, Geometry geom) {
    check_time_order(t, "semigroup_apply");
    check_deriv_order(k, "semigroup_apply");
    if (f.n_components != 1)
        throw std::invalid_argument("semigroup_apply: path must be scalar");
    if (f.n_points() < 2)
        throw std::invalid_argument("semigroup_apply: need at least two grid points");

    const double sqt = std::sqrt(t);
    const Refined rf = refine(f, 0.5 * sqt, geom);
    const int r = rf.r;
    const double h = f.dx / r;
    const int n = f.n_points();

    GridPath out(f.x0, f.dx, n, 1);

    if (geom == Geometry::line) {
        const int R = r * (n - 1);
        const int D = static_cast<int>(std::ceil(8.0 * sqt / h));
        // Kernel table over signed node displacements d = -D..D.
        Eigen::ArrayXd kt(2 * D + 1);
        for (int d = -D; d <= D; ++d) kt[d + D] = kernel(t, d * h, k);

        // The quadrature window always spans the full kernel support
        // [x - 8 sqrt(t), x + 8 sqrt(t)]; sampling f with clamped indices
        // realises the constant continuation beyond the grid.  Never cutting
        // the window inside the Gaussian bump keeps the trapezoid rule at
        // spectral accuracy (the integrand and its derivatives vanish at
        // both window ends).
        for (int i = 0; i < n; ++i) {
            const int qi = i * r;
            double acc = 0.0;
            for (int q = qi - D; q <= qi + D; ++q) {
                const int qc = std::min(std::max(q, 0), R);
                acc += kt[qi - q + D] * rf.values[qc];
            }
            acc -= 0.5 * (kt[2 * D] * rf.values[std::max(qi - D, 0)] +
                          kt[0] * rf.values[std::min(qi + D, R)]);
            out.values(i, 0) = acc * h;
        }
    } else {
        const int R = r * n;
        const double L = n * f.dx;  // circumference
        // Wrapped kernel table over node displacements 0..R-1: sum the line
        // kernel over all periodic images within the 8 sqrt(t) support.
        Eigen::ArrayXd kt = Eigen::ArrayXd::Zero(R);
        for (int d = 0; d < R; ++d) {
            const double z = d * h;
            const int m_lo = static_cast<int>(std::floor((z - 8.0 * sqt) / L));
            const int m_hi = static_cast<int>(std::ceil((z + 8.0 * sqt) / L));
            double acc = 0.0;
            for (int m = m_lo; m <= m_hi; ++m) {
                const double zz = z - m * L;
                if (std::fabs(zz) <= 8.0 * sqt) acc += kernel(t, zz, k);
            }
            kt[d] = acc;
        }
        for (int i = 0; i < n; ++i) {
            const int qi = i * r;
            double acc = 0.0;
            for (int q = 0; q < R; ++q) acc += kt[((qi - q) % R + R) % R] * rf.values[q];
            out.values(i, 0) = acc * h;
        }
    }
    return out;
}

GridPath time_singular_integral(const std::function<GridPath(double)>& g,
                                double t, double T, double power, int n_nodes) {
    if (!(power < 1.0))
        throw std::invalid_argument("time_singular_integral: power must be < 1");
    if (!(T > t))
        throw std::invalid_argument("time_singular_integral: need T > t");
    if (n_nodes < 3 || n_nodes % 2 == 0)
        throw std::invalid_argument("time_singular_integral: node count must be odd and >= 3");

    const double U = std::sqrt(T - t);
    const double hu = U / (n_nodes - 1);

    GridPath acc;
    bool first = true;
    auto add = [&](double weight, const GridPath& term) {
        if (first) {
            acc = term;
            acc.values *= weight;
            first = false;
        } else {
            if (term.n_points() != acc.n_points() || term.n_components != acc.n_components)
                throw IntegrityError("time_singular_integral: integrand changed its grid");
            acc.values += weight * term.values;
        }
    };

    for (int j = 0; j < n_nodes; ++j) {
        double w = (j == 0 || j == n_nodes - 1) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        w *= hu / 3.0;
        if (j == 0) {
            // The left endpoint sits on the singularity.  After substitution
            // the integrand is 2u g(t+u^2): it vanishes at u=0 when the blow-up
            // is milder than (s-t)^{-1/2}, and otherwise its limit is estimated
            // from a half-step evaluation (exact for a pure (s-t)^{-1/2}).
            if (power < 0.5) continue;
            const double uh = 0.5 * hu;
            add(w, [&] {
                GridPath v = g(t + uh * uh);
                v.values *= 2.0 * uh;
                return v;
            }());
            continue;
        }
        const double u = j * hu;
        GridPath v = g(t + u * u);
        v.values *= 2.0 * u;
        add(w, v);
    }
    if (first)
        throw std::invalid_argument("time_singular_integral: no integrand evaluations");
    return acc;
}

void Mollifier::validate() const {
    if (level < 1) throw std::invalid_argument("Mollifier: level must be >= 1");
}

GridPath mollify_slice(const GridPath& f, const Mollifier& m, Geometry geom) {
    m.validate();
    const int n = f.n_points();
    const double sigma = 1.0 / m.level;
    const int J = std::max(1, static_cast<int>(std::ceil(8.0 * sigma / f.dx)));

    // Discrete Gaussian weights, renormalised to unit mass so that constants
    // are reproduced exactly.
    Eigen::ArrayXd w(2 * J + 1);
    for (int j = -J; j <= J; ++j) {
        const double z = j * f.dx / sigma;
        w[j + J] = std::exp(-0.5 * z * z);
    }
    w /= w.sum();

    GridPath out(f.x0, f.dx, n, f.n_components);
    for (int c = 0; c < f.n_components; ++c) {
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = -J; j <= J; ++j) {
                int idx = i + j;
                if (geom == Geometry::torus) {
                    idx = (idx % n + n) % n;
                } else {
                    idx = std::min(std::max(idx, 0), n - 1);
                }
                acc += w[j + J] * f.values(idx, c);
            }
            out.values(i, c) = acc;
        }
    }
    return out;
}

TimeSpaceField mollify(const TimeSpaceField& Y, const Mollifier& m, Geometry geom) {
    TimeSpaceField out = Y;
    for (int k = 0; k < Y.n_times(); ++k) out.set_slice(k, mollify_slice(Y.slice(k), m, geom));
    return out;
}

double cutoff_profile(double x, int N) {
    if (N < 1) throw std::invalid_argument("cutoff_profile: N must be >= 1");
    const double a = std::fabs(x);
    if (a <= N) return 1.0;
    if (a >= 2.0 * N) return 0.0;
    // Smooth transition on [N, 2N] via the standard exponential bump.
    const auto psi = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
    const double s = (2.0 * N - a) / N;  // 1 at a=N, 0 at a=2N
    return psi(s) / (psi(s) + psi(1.0 - s));
}

TimeSpaceField truncate_derivatives(const TimeSpaceField& Y, int N) {
    if (N < 1) throw std::invalid_argument("truncate_derivatives: N must be >= 1");
    TimeSpaceField out = Y;
    const int n = Y.n_space();
    // Anchor at the grid point nearest the origin; increments away from it
    // are rescaled by the cutoff profile at the cell midpoint.
    int i0 = 0;
    for (int i = 1; i < n; ++i)
        if (std::fabs(Y.x(i)) < std::fabs(Y.x(i0))) i0 = i;

    for (int c = 0; c < Y.n_components; ++c) {
        auto& mat = out.comps[static_cast<std::size_t>(c)];
        const auto& src = Y.comps[static_cast<std::size_t>(c)];
        for (int kt = 0; kt < Y.n_times(); ++kt) {
            mat(kt, i0) = src(kt, i0);
            for (int i = i0; i + 1 < n; ++i) {
                const double mid = 0.5 * (Y.x(i) + Y.x(i + 1));
                const double phi = cutoff_profile(mid, N);
                // Where the profile is identically one, carry the (zero)
                // offset from the source instead of re-accumulating
                // increments, so the inner window is reproduced bit for bit.
                mat(kt, i + 1) = (phi == 1.0)
                                     ? src(kt, i + 1) - (src(kt, i) - mat(kt, i))
                                     : mat(kt, i) + phi * (src(kt, i + 1) - src(kt, i));
            }
            for (int i = i0; i > 0; --i) {
                const double mid = 0.5 * (Y.x(i) + Y.x(i - 1));
                const double phi = cutoff_profile(mid, N);
                mat(kt, i - 1) = (phi == 1.0)
                                     ? src(kt, i - 1) - (src(kt, i) - mat(kt, i))
                                     : mat(kt, i) - phi * (src(kt, i) - src(kt, i - 1));
            }
        }
    }
    return out;
}

}  // namespace rd::heat
