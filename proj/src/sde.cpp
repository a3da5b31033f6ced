#include "roughdrift/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "roughdrift/heat.hpp"
#include "roughdrift/util.hpp"

namespace rd::sde {

namespace {

/// Bilinear interpolation of a scalar field at (t, x), with clamping to the
/// grid in both directions.
double interp_field(const TimeSpaceField& f, double t, double x) {
    const int nt = f.n_times(), m = f.n_space();
    double pt = (t - f.t0) / f.dt;
    int j = std::min(std::max(static_cast<int>(std::floor(pt)), 0), std::max(nt - 2, 0));
    double wt = std::min(std::max(pt - j, 0.0), 1.0);
    if (nt == 1) { j = 0; wt = 0.0; }
    double px = (x - f.x0) / f.dx;
    int i = std::min(std::max(static_cast<int>(std::floor(px)), 0), std::max(m - 2, 0));
    double wx = std::min(std::max(px - i, 0.0), 1.0);
    const auto& F = f.comps[0];
    const double lo = (1.0 - wx) * F(j, i) + wx * F(j, i + 1);
    if (nt == 1) return lo;
    const double hi = (1.0 - wx) * F(j + 1, i) + wx * F(j + 1, i + 1);
    return (1.0 - wt) * lo + wt * hi;
}

/// Linear interpolation of a one-component grid path at x, clamped.
double interp_grid(const GridPath& g, double x) {
    const int m = g.n_points();
    double px = (x - g.x0) / g.dx;
    int i = std::min(std::max(static_cast<int>(std::floor(px)), 0), std::max(m - 2, 0));
    double wx = std::min(std::max(px - i, 0.0), 1.0);
    return (1.0 - wx) * g(i, 0) + wx * g(i + 1, 0);
}

int snapped_index(double t, double t0, double dt, int n, const char* what) {
    const double pos = (t - t0) / dt;
    const long k = std::lround(pos);
    if (k < 0 || k >= n || std::fabs(pos - k) > 1e-9 * (1.0 + std::fabs(pos)))
        throw std::invalid_argument(std::string(what) +
                                    ": time does not lie on the environment grid");
    return static_cast<int>(k);
}

GridPath identity_terminal(const TimeSpaceField& like) {
    GridPath uT(like.x0, like.dx, like.n_space(), 2);
    for (int i = 0; i < like.n_space(); ++i) {
        uT.values(i, 0) = uT.x(i);
        uT.values(i, 1) = 1.0;
    }
    return uT;
}

TimeSpaceField zero_like(const TimeSpaceField& like) {
    return TimeSpaceField(like.t0, like.dt, like.n_times(), like.x0, like.dx, like.n_space(),
                          1);
}

pde::MildSolution solve_identity(const DriftEnvironment& env, double horizon) {
    pde::MildProblem p;
    p.params = env.params;
    p.lift = lift::assemble_lift(env.Y, horizon, env.params,
                                 lift::LiftOptions{env.geometry, env.time_nodes, 1e-13});
    p.f = zero_like(p.lift.Y);  // the lift keeps only the slices up to the horizon
    p.uT = identity_terminal(env.Y);
    p.T = horizon;
    p.tol = env.tol;
    p.max_iter = env.max_iter;
    p.time_nodes = env.time_nodes;
    p.geometry = env.geometry;
    return pde::solve_mild(p);
}

}  // namespace

double SdePaths::frozen_fraction() const {
    if (frozen.empty()) return 0.0;
    double c = 0.0;
    for (auto f : frozen) c += (f != 0);
    return c / static_cast<double>(frozen.size());
}

void SdePaths::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("SdePaths: dt must be positive");
    if (X.rows() < 1 || X.cols() < 2)
        throw std::invalid_argument("SdePaths: need at least one path and one step");
    if (X.rows() != B.rows() || X.cols() != B.cols())
        throw std::invalid_argument("SdePaths: X and B must have matching shapes");
    if (frozen.size() != static_cast<std::size_t>(X.rows()))
        throw std::invalid_argument("SdePaths: frozen flags must cover all paths");
    if (!X.allFinite() || !B.allFinite())
        throw IntegrityError("SdePaths: non-finite trajectory entries");
    for (int p = 0; p < X.rows(); ++p) {
        if (X(p, 0) != x0) throw IntegrityError("SdePaths: paths must start at x0");
        if (B(p, 0) != 0.0) throw IntegrityError("SdePaths: noise must start at zero");
    }
}

TimeSpaceField centered_slope(const TimeSpaceField& Y) {
    Y.validate();
    if (Y.n_components != 1)
        throw std::invalid_argument("centered_slope: expected a scalar field");
    const int nt = Y.n_times(), m = Y.n_space();
    if (m < 2) throw std::invalid_argument("centered_slope: need at least two space nodes");
    TimeSpaceField D(Y.t0, Y.dt, nt, Y.x0, Y.dx, m, 1);
    const auto& F = Y.comps[0];
    auto& G = D.comps[0];
    for (int k = 0; k < nt; ++k) {
        G(k, 0) = (F(k, 1) - F(k, 0)) / Y.dx;
        for (int i = 1; i + 1 < m; ++i) G(k, i) = (F(k, i + 1) - F(k, i - 1)) / (2.0 * Y.dx);
        G(k, m - 1) = (F(k, m - 1) - F(k, m - 2)) / Y.dx;
    }
    return D;
}

SdePaths simulate_with_drift(const TimeSpaceField& drift, double x0, double dt, int n_paths,
                             std::uint64_t seed) {
    drift.validate();
    if (drift.n_components != 1)
        throw std::invalid_argument("simulate_with_drift: expected a scalar drift table");
    if (!(dt > 0.0)) throw std::invalid_argument("simulate_with_drift: dt must be positive");
    if (n_paths < 1) throw std::invalid_argument("simulate_with_drift: need paths");
    const double span = (drift.n_times() - 1) * drift.dt;
    if (!(span > 0.0))
        throw std::invalid_argument("simulate_with_drift: drift table has no time span");
    const double ratio = drift.dt / dt;
    if (std::fabs(ratio - std::lround(ratio)) > 1e-9 * ratio || std::lround(ratio) < 1)
        throw std::invalid_argument(
            "simulate_with_drift: dt must divide the drift table's time step");
    const int n_steps = static_cast<int>(std::lround(span / dt));
    const double x_lo = drift.x0, x_hi = drift.x(drift.n_space() - 1);
    if (x0 < x_lo || x0 > x_hi)
        throw std::invalid_argument("simulate_with_drift: x0 outside the spatial window");

    SdePaths out;
    out.t0 = drift.t0;
    out.dt = dt;
    out.x0 = x0;
    out.seed = seed;
    out.X.resize(n_paths, n_steps + 1);
    out.B.resize(n_paths, n_steps + 1);
    out.frozen.assign(static_cast<std::size_t>(n_paths), 0);

    const double sq = std::sqrt(dt);
    for (int block = 0; block * kPathBlock < n_paths; ++block) {
        Rng rng = block_rng(seed, static_cast<std::uint64_t>(block));
        const int p_end = std::min((block + 1) * kPathBlock, n_paths);
        for (int p = block * kPathBlock; p < p_end; ++p) {
            // Separate accumulators keep the noise sum bit-identical between
            // X and B when the drift contribution is exactly zero.
            double cum = 0.0, noise = 0.0;
            out.X(p, 0) = x0;
            out.B(p, 0) = 0.0;
            bool live = true;
            for (int k = 0; k < n_steps; ++k) {
                const double db = sq * rng.gaussian();
                noise += db;
                out.B(p, k + 1) = noise;
                if (live) {
                    const double t = drift.t0 + k * dt;
                    const double d = interp_field(drift, t, x0 + cum);
                    cum += d * dt + db;
                    const double pos = x0 + cum;
                    if (pos < x_lo || pos > x_hi) {
                        live = false;
                        out.frozen[static_cast<std::size_t>(p)] = 1;
                    }
                }
                out.X(p, k + 1) = live ? x0 + cum : out.X(p, k);
            }
        }
    }
    return out;
}

SdePaths simulate_euler(const TimeSpaceField& Y, double x0, double dt, int n_paths,
                        std::uint64_t seed) {
    return simulate_with_drift(centered_slope(Y), x0, dt, n_paths, seed);
}

MartingaleReport martingale_defect(const pde::MildSolution& sol, const TimeSpaceField& f,
                                   const SdePaths& paths,
                                   const std::vector<double>& checkpoints) {
    paths.validate();
    if (f.n_components != 1)
        throw std::invalid_argument("martingale_defect: expected a scalar source");
    if (checkpoints.empty())
        throw std::invalid_argument("martingale_defect: need at least one checkpoint");
    const int n = paths.n_paths();
    const bool zero_src = f.comps[0].cwiseAbs().maxCoeff() == 0.0;

    MartingaleReport rep;
    rep.checkpoints = checkpoints;
    rep.frozen_fraction = paths.frozen_fraction();
    rep.reference = interp_field(sol.u, paths.t0, paths.x0);
    bool ok = true;
    for (double c : checkpoints) {
        const int kc =
            snapped_index(c, paths.t0, paths.dt, paths.n_steps() + 1, "martingale_defect");
        Eigen::ArrayXd vals(n);
        for (int p = 0; p < n; ++p) {
            double acc = interp_field(sol.u, c, paths.X(p, kc));
            if (!zero_src)
                for (int k = 0; k < kc; ++k)
                    acc -= paths.dt *
                           interp_field(f, paths.t0 + k * paths.dt, paths.X(p, k));
            vals[p] = acc;
        }
        const MeanSE ms = mean_se(vals);
        rep.estimate.push_back(ms.mean);
        rep.se.push_back(ms.se);
        // Tiny absolute floor so that exactly-deterministic statistics
        // (zero variance) are judged by roundoff rather than by 3 * 0.
        const double band = 3.0 * ms.se + 1e-12 * (1.0 + std::fabs(rep.reference));
        ok = ok && std::fabs(ms.mean - rep.reference) <= band;
    }
    rep.pass = ok;
    return rep;
}

GridPath drift_profile(const DriftEnvironment& env, double t, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("drift_profile: window must be positive");
    const int kt = snapped_index(t, env.Y.t0, env.Y.dt, env.Y.n_times(), "drift_profile");
    snapped_index(t + h, env.Y.t0, env.Y.dt, env.Y.n_times(), "drift_profile");
    const auto sol = solve_identity(env, t + h);
    GridPath out(env.Y.x0, env.Y.dx, env.Y.n_space(), 1);
    for (int i = 0; i < out.n_points(); ++i) out.values(i, 0) = sol.u(kt, i, 0) - out.x(i);
    return out;
}

double drift_function(const DriftEnvironment& env, const DriftQuery& q) {
    return interp_grid(drift_profile(env, q.t, q.h), q.x);
}

GridPath drift_expansion_profile(const DriftEnvironment& env, double t_at, double h) {
    if (!(h > 0.0))
        throw std::invalid_argument("drift_expansion_profile: window must be positive");
    const TimeSpaceField& Y = env.Y;
    const int kt = snapped_index(t_at, Y.t0, Y.dt, Y.n_times(), "drift_expansion_profile");
    snapped_index(t_at + h, Y.t0, Y.dt, Y.n_times(), "drift_expansion_profile");
    const auto lift = lift::assemble_lift(Y, t_at + h, env.params,
                                          lift::LiftOptions{env.geometry, env.time_nodes,
                                                            1e-13});
    const int m = Y.n_space();
    const int K = lift.n_times() - 1;
    const double t = Y.t(kt);

    GridPath ones_aux(Y.x0, Y.dx, 9, 1);
    ones_aux.values.setOnes();

    // L_s(y) = Y_s(y) + rough prefix of Z_s against Y_s; the kernel response
    // to L_s minus its own value at the probe is exactly the expansion's
    // integrand, by additivity of the prefix.
    auto g = [&](double s) {
        double pos = (s - Y.t0) / Y.dt;
        int j = std::min(std::max(static_cast<int>(std::floor(pos)), 0), K - 1);
        const double w = pos - j;
        const auto& W0 = lift.WW[static_cast<std::size_t>(j)].comps[lift::kZY];
        const auto& W1 = lift.WW[static_cast<std::size_t>(j + 1)].comps[lift::kZY];
        GridPath L(Y.x0, Y.dx, m, 1);
        double acc = 0.0;
        L.values(0, 0) = (1.0 - w) * Y(j, 0, 0) + w * Y(j + 1, 0, 0);
        for (int i = 0; i + 1 < m; ++i) {
            const double zi = (1.0 - w) * lift.Z(j, i, 0) + w * lift.Z(j + 1, i, 0);
            const double dy = (1.0 - w) * (Y(j, i + 1, 0) - Y(j, i, 0)) +
                              w * (Y(j + 1, i + 1, 0) - Y(j + 1, i, 0));
            const double ww = (1.0 - w) * W0(i, i + 1) + w * W1(i, i + 1);
            acc += zi * dy + ww;
            L.values(i + 1, 0) =
                (1.0 - w) * Y(j, i + 1, 0) + w * Y(j + 1, i + 1, 0) + acc;
        }
        GridPath a = heat::semigroup_apply(L, s - t, 1, env.geometry);
        const double e = heat::semigroup_apply(ones_aux, s - t, 1, env.geometry)(4, 0);
        a.values -= e * L.values;
        return a;
    };
    const double power = 0.5 * (1.0 - env.params.alpha);
    return heat::time_singular_integral(g, t, t_at + h, power, env.time_nodes);
}

double drift_expansion(const DriftEnvironment& env, const DriftQuery& q) {
    return interp_grid(drift_expansion_profile(env, q.t, q.h), q.x);
}

BrownianPartReport brownian_part_check(const SdePaths& paths, const std::vector<int>& h_steps,
                                       double beta) {
    paths.validate();
    if (h_steps.size() < 3)
        throw std::invalid_argument("brownian_part_check: need at least three window sizes");
    BrownianPartReport rep;
    const int n = paths.n_paths();
    for (int hs : h_steps) {
        if (hs < 1 || hs > paths.n_steps())
            throw std::invalid_argument("brownian_part_check: window outside the path range");
        double m2 = 0.0, m4 = 0.0;
        for (int p = 0; p < n; ++p) {
            const double d = (paths.X(p, hs) - paths.X(p, 0)) - (paths.B(p, hs) - paths.B(p, 0));
            m2 += d * d;
            m4 += d * d * d * d;
        }
        rep.hs.push_back(hs * paths.dt);
        rep.moment2.push_back(m2 / n);
        rep.moment4.push_back(m4 / n);
    }
    const double floor2 = 1e-300;
    const bool all_zero =
        *std::max_element(rep.moment2.begin(), rep.moment2.end()) < floor2 &&
        *std::max_element(rep.moment4.begin(), rep.moment4.end()) < floor2;
    if (all_zero) {
        rep.slope2 = rep.slope4 = std::numeric_limits<double>::infinity();
        rep.pass = true;
        return rep;
    }
    rep.slope2 = fit_loglog(rep.hs, rep.moment2).slope / 2.0;
    rep.slope4 = fit_loglog(rep.hs, rep.moment4).slope / 4.0;
    const double gate = 0.5 * (1.0 + beta) - 0.1;
    rep.pass = rep.slope2 >= gate && rep.slope4 >= gate;
    return rep;
}

LawComparisonReport two_scheme_law_comparison(const TimeSpaceField& Y, int level_a,
                                              int level_b, double x0, double dt, int n_paths,
                                              std::uint64_t seed, int n_boot) {
    if (n_boot < 20)
        throw std::invalid_argument("two_scheme_law_comparison: need more permutations");
    std::uint64_t st = seed;
    const std::uint64_t sa = splitmix64_next(st);
    const std::uint64_t sb = splitmix64_next(st);
    const std::uint64_t sp = splitmix64_next(st);

    const auto pa =
        simulate_euler(heat::mollify(Y, heat::Mollifier{level_a}), x0, dt, n_paths, sa);
    const auto pb =
        simulate_euler(heat::mollify(Y, heat::Mollifier{level_b}), x0, dt, n_paths, sb);

    LawComparisonReport rep;
    rep.n_paths = n_paths;
    rep.frozen_a = pa.frozen_fraction();
    rep.frozen_b = pb.frozen_fraction();
    const Eigen::ArrayXd a = pa.X.col(pa.n_steps()).array();
    const Eigen::ArrayXd b = pb.X.col(pb.n_steps()).array();
    rep.ks = ks_statistic(a, b);

    // Permutation null: pool the two samples, re-split at random, and take
    // the 95th percentile of the resulting KS distances.
    Eigen::ArrayXd pool(2 * n_paths);
    pool << a, b;
    Rng rng(sp);
    Eigen::ArrayXd dist(n_boot);
    std::vector<int> idx(static_cast<std::size_t>(2 * n_paths));
    for (int i = 0; i < 2 * n_paths; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int r = 0; r < n_boot; ++r) {
        for (int i = 2 * n_paths - 1; i > 0; --i)
            std::swap(idx[static_cast<std::size_t>(i)],
                      idx[static_cast<std::size_t>(rng.uniform_int(i + 1))]);
        Eigen::ArrayXd ra(n_paths), rb(n_paths);
        for (int i = 0; i < n_paths; ++i) {
            ra[i] = pool[idx[static_cast<std::size_t>(i)]];
            rb[i] = pool[idx[static_cast<std::size_t>(n_paths + i)]];
        }
        dist[r] = ks_statistic(ra, rb);
    }
    rep.band95 = quantile(dist, 0.95);
    rep.pass = rep.ks <= rep.band95;
    return rep;
}

TelescopeReport telescoping_check(const DriftEnvironment& env, double x0, int n_paths,
                                  std::uint64_t seed) {
    const TimeSpaceField& Y = env.Y;
    const int nt = Y.n_times();
    if (nt < 2) throw std::invalid_argument("telescoping_check: need a time span");
    const double dt = Y.dt;

    // One backward solve per step: slice k of the table is the mean
    // displacement rate over [t_k, t_{k+1}] as a function of position.
    TimeSpaceField table(Y.t0, dt, nt, Y.x0, Y.dx, Y.n_space(), 1);
    for (int k = 0; k + 1 < nt; ++k) {
        const auto sol = solve_identity(env, Y.t(k + 1));
        for (int i = 0; i < Y.n_space(); ++i)
            table.comps[0](k, i) = (sol.u(k, i, 0) - Y.x(i)) / dt;
    }

    const auto paths = simulate_with_drift(table, x0, dt, n_paths, seed);
    const int K = paths.n_steps();
    Eigen::ArrayXd stat(n_paths);
    for (int p = 0; p < n_paths; ++p) {
        double s = paths.X(p, K) - x0 - paths.B(p, K);
        for (int k = 0; k < K; ++k)
            s -= dt * interp_field(table, Y.t0 + k * dt, paths.X(p, k));
        stat[p] = s;
    }
    const MeanSE ms = mean_se(stat);
    TelescopeReport rep;
    rep.mean = ms.mean;
    rep.se = ms.se;
    rep.frozen_fraction = paths.frozen_fraction();
    // Roundoff allowance: the simulation accumulates x0 + cum while the
    // statistic regroups the same terms, so each path carries a few ulps of
    // the running scale per step.
    rep.floor = 1e-12 * (1.0 + std::fabs(x0)) * K;
    rep.pass = std::fabs(rep.mean) <= 3.0 * rep.se + rep.floor;
    return rep;
}

MeanSE exponential_moment(const SdePaths& paths) {
    paths.validate();
    const int n = paths.n_paths();
    Eigen::ArrayXd vals(n);
    for (int p = 0; p < n; ++p) vals[p] = std::exp(std::fabs(paths.X(p, paths.n_steps())));
    return mean_se(vals);
}

}  // namespace rd::sde
