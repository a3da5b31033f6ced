#include "roughdrift/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "roughdrift/norms.hpp"
#include "roughdrift/stats.hpp"
#include "roughdrift/util.hpp"

namespace rd::pde {

namespace {

/// Index of T on the time grid of `Y`, or a domain error.
int horizon_index(const TimeSpaceField& Y, double T, const char* who) {
    const double scale = std::max(1.0, std::fabs(T));
    for (int k = 0; k < Y.n_times(); ++k)
        if (std::fabs(Y.t(k) - T) <= 1e-9 * scale) return k;
    throw std::invalid_argument(std::string(who) + ": horizon T is not on the time grid");
}

/// One component of a multi-component path as a scalar path.
GridPath component_of(const GridPath& p, int c) {
    GridPath out(p.x0, p.dx, p.n_points(), 1);
    out.values.col(0) = p.values.col(c);
    return out;
}

/// Linear interpolation of a scalar field in time.
GridPath interp_slice(const TimeSpaceField& Y, double s) {
    const int last = Y.n_times() - 2;
    int j = static_cast<int>(std::floor((s - Y.t0) / Y.dt));
    j = std::min(std::max(j, 0), last);
    const double w = (s - Y.t(j)) / Y.dt;
    GridPath out = Y.slice(j);
    if (w != 0.0) {
        const GridPath next = Y.slice(j + 1);
        out.values = (1.0 - w) * out.values + w * next.values;
    }
    return out;
}

/// Kernel integral shared by the fixed-point operator (deriv = 2) and the
/// reconstruction of u from its derivative (deriv = 1):
///
///   out_t(x) = int_t^T [ d^deriv/dx^deriv P_{s-t} (Q_s - Q_s(x)) ](x) ds,
///
/// where Q_s is the compensated-prefix rough integral of v_s against Y_s.
/// Because the rough integral is additive, the inner two-parameter object
/// collapses to Q_s(y) - Q_s(x); the subtraction of Q_s(x) is realised
/// through the kernel's response to constants, which is uniform across the
/// grid (clamped sampling maps a constant to the same value everywhere) and
/// is therefore obtained from a small auxiliary grid.
TimeSpaceField kernel_rough_integral(const TimeSpaceField& v, const lift::RoughLift& lift,
                                     int deriv, int time_nodes, Geometry geom) {
    const TimeSpaceField& Y = lift.Y;
    const int K = lift.n_times() - 1;
    const int m = Y.n_space();
    if (v.n_times() != K + 1 || v.n_space() != m || v.n_components != 1)
        throw IntegrityError("picard operator: candidate grids disagree with the lift");
    if (std::fabs(v.t0 - Y.t0) > 1e-12 || std::fabs(v.dt - Y.dt) > 1e-12 ||
        std::fabs(v.x0 - Y.x0) > 1e-12 || std::fabs(v.dx - Y.dx) > 1e-12)
        throw IntegrityError("picard operator: candidate grids disagree with the lift");
    for (int k = 0; k <= K; ++k)
        if (lift.WW[static_cast<std::size_t>(k)].n_components != 4)
            throw IntegrityError("picard operator: lift is missing its cross components");

    const double alpha = lift.params.alpha;
    const double power = (deriv == 2) ? 1.0 - 0.5 * alpha : 0.5 * (1.0 - alpha);

    GridPath ones_aux(Y.x0, Y.dx, 9, 1);
    ones_aux.values.setOnes();

    TimeSpaceField out(Y.t0, Y.dt, K + 1, Y.x0, Y.dx, m, 1);
    const auto& Ymat = Y.comps[0];
    const auto& Vmat = v.comps[0];
    for (int k = 0; k < K; ++k) {
        const double t = Y.t(k);
        auto g = [&](double s) {
            double pos = (s - Y.t0) / Y.dt;
            int j = static_cast<int>(std::floor(pos));
            j = std::min(std::max(j, 0), K - 1);
            const double w = pos - j;
            const auto& W0 = lift.WW[static_cast<std::size_t>(j)].comps[lift::kZY];
            const auto& W1 = lift.WW[static_cast<std::size_t>(j) + 1].comps[lift::kZY];

            GridPath q(Y.x0, Y.dx, m, 1);
            double acc = 0.0;
            q.values(0, 0) = 0.0;
            for (int i = 0; i + 1 < m; ++i) {
                const double vi = (1.0 - w) * Vmat(j, i) + w * Vmat(j + 1, i);
                const double dy = (1.0 - w) * (Ymat(j, i + 1) - Ymat(j, i)) +
                                  w * (Ymat(j + 1, i + 1) - Ymat(j + 1, i));
                const double ww = (1.0 - w) * W0(i, i + 1) + w * W1(i, i + 1);
                acc += vi * dy + vi * ww;
                q.values(i + 1, 0) = acc;
            }

            GridPath a = heat::semigroup_apply(q, s - t, deriv, geom);
            const double e = heat::semigroup_apply(ones_aux, s - t, deriv, geom)(4, 0);
            a.values -= e * q.values;
            return a;
        };
        const GridPath row = heat::time_singular_integral(g, t, lift.T, power, time_nodes);
        out.comps[0].row(k) = row.values.col(0).matrix().transpose();
    }
    return out;
}

/// Least-squares slope of y against x (plain linear fit).
double linear_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

/// Peak |f(k+l, i) - f(k, i)| over time pairs, restricted to columns
/// [lo, hi].
double peak_time_increment(const TimeSpaceField& f, int lag, int lo, int hi) {
    double peak = 0.0;
    const auto& mat = f.comps[0];
    for (int k = 0; k + lag < f.n_times(); ++k)
        for (int i = lo; i <= hi; ++i)
            peak = std::max(peak, std::fabs(mat(k + lag, i) - mat(k, i)));
    return peak;
}

/// Log-log slope of peak time increments over dyadic lags; 0 when there are
/// too few lags to fit.
double time_exponent(const TimeSpaceField& f, int lo, int hi) {
    std::vector<double> xs, ys;
    for (int l = 1; 2 * l < f.n_times(); l *= 2) {
        const double peak = peak_time_increment(f, l, lo, hi);
        if (peak > 0.0) {
            xs.push_back(l * f.dt);
            ys.push_back(peak);
        }
    }
    if (xs.size() < 3) return 0.0;
    return fit_loglog(xs, ys).slope;
}

}  // namespace

TerminalProfile terminal_profile(const GridPath& uT, const TimeSpaceField& f, double T,
                                 double gamma, Geometry geom, int time_nodes) {
    uT.validate();
    f.validate();
    if (uT.n_components != 2)
        throw std::invalid_argument(
            "terminal_profile: terminal data must store (value, derivative)");
    if (f.n_components != 1)
        throw std::invalid_argument("terminal_profile: source must be scalar");
    if (f.n_space() != uT.n_points() || std::fabs(f.x0 - uT.x0) > 1e-12 ||
        std::fabs(f.dx - uT.dx) > 1e-12)
        throw std::invalid_argument("terminal_profile: source and terminal grids disagree");
    if (!(gamma > 0.0)) throw std::invalid_argument("terminal_profile: gamma must be positive");
    const int K = horizon_index(f, T, "terminal_profile");

    const int m = uT.n_points();
    const bool zero_src = f.comps[0].cwiseAbs().maxCoeff() == 0.0;
    const GridPath u0 = component_of(uT, 0);
    const GridPath u1 = component_of(uT, 1);
    const double p1 = std::min(std::max(0.5 * (1.0 - gamma), 0.0), 0.75);

    TerminalProfile tp;
    tp.phi = TimeSpaceField(f.t0, f.dt, K + 1, f.x0, f.dx, m, 1);
    tp.psi = tp.phi;
    for (int k = 0; k <= K; ++k) {
        if (k == K) {
            tp.phi.set_slice(k, u0);
            tp.psi.set_slice(k, u1);
            continue;
        }
        const double t = f.t(k);
        const double tau = T - t;
        GridPath phik = heat::semigroup_apply(u0, tau, 0, geom);
        GridPath psik = heat::semigroup_apply(u1, tau, 0, geom);
        if (!zero_src) {
            const GridPath I0 = heat::time_singular_integral(
                [&](double s) { return heat::semigroup_apply(interp_slice(f, s), s - t, 0, geom); },
                t, T, 0.0, time_nodes);
            const GridPath I1 = heat::time_singular_integral(
                [&](double s) { return heat::semigroup_apply(interp_slice(f, s), s - t, 1, geom); },
                t, T, p1, time_nodes);
            phik.values -= I0.values;
            psik.values -= I1.values;
        }
        tp.phi.set_slice(k, phik);
        tp.psi.set_slice(k, psik);
    }
    return tp;
}

TimeSpaceField picard_operator(const TimeSpaceField& v, const lift::RoughLift& lift,
                               const PicardOptions& opts) {
    return kernel_rough_integral(v, lift, 2, opts.time_nodes, opts.geometry);
}

void MildProblem::validate() const {
    params.validate();
    if (!(params.beta < params.alpha))
        throw std::invalid_argument("MildProblem: need beta < alpha");
    if (!(params.beta > 2.0 * params.chi))
        throw std::invalid_argument("MildProblem: need beta > 2 chi");
    if (!(gamma > 0.0)) throw std::invalid_argument("MildProblem: gamma must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("MildProblem: tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("MildProblem: max_iter must be >= 1");
    if (std::fabs(lift.T - T) > 1e-9 * std::max(1.0, std::fabs(T)))
        throw std::invalid_argument("MildProblem: horizon disagrees with the lift");

    const TimeSpaceField& Y = lift.Y;
    if (f.n_times() != Y.n_times() || f.n_space() != Y.n_space() || f.n_components != 1 ||
        std::fabs(f.t0 - Y.t0) > 1e-12 || std::fabs(f.dt - Y.dt) > 1e-12 ||
        std::fabs(f.x0 - Y.x0) > 1e-12 || std::fabs(f.dx - Y.dx) > 1e-12)
        throw std::invalid_argument("MildProblem: source grid disagrees with the lift");
    if (uT.n_components != 2)
        throw std::invalid_argument("MildProblem: terminal data must store (value, derivative)");
    if (uT.n_points() != Y.n_space() || std::fabs(uT.x0 - Y.x0) > 1e-12 ||
        std::fabs(uT.dx - Y.dx) > 1e-12)
        throw std::invalid_argument("MildProblem: terminal grid disagrees with the lift");
    if (!uT.values.allFinite())
        throw std::invalid_argument("MildProblem: terminal data must be finite");
}

MildSolution solve_mild(const MildProblem& p) {
    p.validate();
    const int K = p.lift.n_times() - 1;
    const TerminalProfile tp =
        terminal_profile(p.uT, p.f, p.T, p.gamma, p.geometry, p.time_nodes);

    TimeSpaceField v = tp.psi;
    std::vector<double> history;
    int streak = 0;
    bool flagged = false;
    bool converged = false;
    double res = std::numeric_limits<double>::infinity();
    int iters = 0;
    for (int it = 1; it <= p.max_iter; ++it) {
        const TimeSpaceField Mv =
            kernel_rough_integral(v, p.lift, 2, p.time_nodes, p.geometry);
        TimeSpaceField vn = tp.psi;
        vn.comps[0] += Mv.comps[0];
        const double prev = history.empty() ? std::numeric_limits<double>::infinity()
                                            : history.back();
        res = (vn.comps[0] - v.comps[0]).cwiseAbs().maxCoeff();
        history.push_back(res);
        iters = it;
        if (res <= p.tol) {
            // Keep the pre-update iterate: the reported residual is then
            // exactly sup |v - psi - M v| for the returned v.
            converged = true;
            break;
        }
        if (!std::isfinite(res) || res >= prev) {
            if (++streak >= 3) flagged = true;
        } else {
            streak = 0;
        }
        v = std::move(vn);
    }
    if (!converged && flagged)
        throw ConvergenceError("solve_mild: residuals stopped decreasing before reaching " +
                                   format_g17(p.tol) + " (last " + format_g17(res) + " after " +
                                   std::to_string(iters) + " iterations)",
                               history);

    const TimeSpaceField K1 = kernel_rough_integral(v, p.lift, 1, p.time_nodes, p.geometry);
    MildSolution sol;
    sol.u = tp.phi;
    sol.u.comps[0] += K1.comps[0];
    sol.v = v;
    // The terminal slice carries the data verbatim.
    sol.u.comps[0].row(K) = p.uT.values.col(0).matrix().transpose();
    sol.v.comps[0].row(K) = p.uT.values.col(1).matrix().transpose();
    sol.dWv = TimeSpaceField(v.t0, v.dt, K + 1, v.x0, v.dx, v.n_space(), 2);
    sol.dWv.comps[1] = sol.v.comps[0];
    sol.residual = res;
    sol.iterations = iters;
    sol.history = std::move(history);
    return sol;
}

PdeRegularity regularity_report(const MildSolution& sol) {
    sol.u.validate();
    sol.v.validate();
    const int m = sol.u.n_space();
    const double center = sol.u.x0 + 0.5 * (m - 1) * sol.u.dx;
    const double radius = 0.5 * (sol.u.x(m - 1) - center);
    int lo = m, hi = -1;
    for (int i = 0; i < m; ++i) {
        if (std::fabs(sol.u.x(i) - center) <= radius + 1e-12) {
            lo = std::min(lo, i);
            hi = std::max(hi, i);
        }
    }

    PdeRegularity rep;
    const double scale_u = 1.0 + sol.u.comps[0].cwiseAbs().maxCoeff();
    const double scale_v = 1.0 + sol.v.comps[0].cwiseAbs().maxCoeff();
    const double flat_u = peak_time_increment(sol.u, 1, lo, hi);
    const double flat_v = peak_time_increment(sol.v, 1, lo, hi);
    const auto v0 = sol.v.comps[0].row(0).segment(lo, hi - lo + 1);
    const double spread_v = (v0.array() - v0(0)).abs().maxCoeff();
    if (flat_u <= 1e-12 * scale_u && flat_v <= 1e-12 * scale_v &&
        spread_v <= 1e-12 * scale_v) {
        rep.exact = true;
        return rep;
    }

    rep.u_time = time_exponent(sol.u, lo, hi);
    rep.v_time = time_exponent(sol.v, lo, hi);

    GridPath seg(sol.v.x(lo), sol.v.dx, hi - lo + 1, 1);
    seg.values.col(0) = sol.v.comps[0].row(0).segment(lo, hi - lo + 1).transpose().array();
    // Fitting lags must stay well below the window size: once a lag is
    // comparable to the window, the peak increment saturates at the total
    // oscillation and the fitted slope is dragged towards zero.
    const int lag_cap = std::max(4, seg.n_points() / 16);
    std::vector<int> lags;
    for (int l = 1; l <= lag_cap && lags.size() < 6; l *= 2) lags.push_back(l);
    if (lags.size() >= 3 && spread_v > 0.0)
        rep.v_space = holder::holder_exponent_fit(seg, lags);

    // Semilog envelope of |v| against the distance from the window centre.
    const int rings = 8;
    const double full = sol.u.x(m - 1) - center;
    std::vector<double> rs, ls;
    for (int j = 1; j <= rings; ++j) {
        const double r_in = (j - 1) * full / rings, r_out = j * full / rings;
        double peak = 0.0;
        for (int i = 0; i < m; ++i) {
            const double d = std::fabs(sol.v.x(i) - center);
            if (d > r_in - 1e-12 && d <= r_out + 1e-12)
                peak = std::max(peak, std::fabs(sol.v.comps[0](0, i)));
        }
        rs.push_back(0.5 * (r_in + r_out));
        ls.push_back(std::log(1.0 + peak));
    }
    rep.growth_rate = linear_slope(rs, ls);
    return rep;
}

StabilityStudy stability_study(const MildProblem& p, const std::vector<int>& levels) {
    if (levels.size() < 2)
        throw std::invalid_argument("stability_study: need at least two levels");
    p.validate();

    const int m = p.lift.Y.n_space();
    const double center = p.lift.Y.x0 + 0.5 * (m - 1) * p.lift.Y.dx;
    const double radius = 0.5 * (p.lift.Y.x(m - 1) - center);

    lift::LiftOptions lo;
    lo.geometry = p.geometry;
    lo.time_nodes = p.time_nodes;

    StabilityStudy study;
    study.levels = levels;
    std::vector<MildSolution> sols;
    for (int n : levels) {
        const TimeSpaceField Yn = heat::mollify(p.lift.Y, heat::Mollifier{n}, p.geometry);
        MildProblem pn = p;
        pn.lift = lift::assemble_lift(Yn, p.T, p.params, lo);
        sols.push_back(solve_mild(pn));
    }

    auto dist = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        double peak = 0.0;
        for (int k = 0; k < static_cast<int>(a.rows()); ++k)
            for (int i = 0; i < m; ++i)
                if (std::fabs(p.lift.Y.x(i) - center) <= radius + 1e-12)
                    peak = std::max(peak, std::fabs(a(k, i) - b(k, i)));
        return peak;
    };
    for (std::size_t j = 0; j + 1 < sols.size(); ++j) {
        study.du.push_back(dist(sols[j + 1].u.comps[0], sols[j].u.comps[0]));
        study.dv.push_back(dist(sols[j + 1].v.comps[0], sols[j].v.comps[0]));
    }
    auto non_increasing = [](const std::vector<double>& d) {
        for (std::size_t i = 1; i < d.size(); ++i)
            if (d[i] > 1.05 * d[i - 1] + 1e-15) return false;
        return true;
    };
    study.decreasing = non_increasing(study.du) && non_increasing(study.dv);
    return study;
}

}  // namespace rd::pde
