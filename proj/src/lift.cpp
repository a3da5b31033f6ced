#include "roughdrift/lift.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "roughdrift/norms.hpp"
#include "roughdrift/stats.hpp"
#include "roughdrift/util.hpp"

namespace rd::lift {

namespace {

/// Index of T on the time grid, or a domain error.
int horizon_index(const TimeSpaceField& Y, double T, const char* who) {
    const double scale = std::max(1.0, std::fabs(T));
    for (int k = 0; k < Y.n_times(); ++k)
        if (std::fabs(Y.t(k) - T) <= 1e-9 * scale) return k;
    throw std::invalid_argument(std::string(who) + ": horizon T is not on the time grid");
}

/// Largest deviation of any slice from the first one, relative to its size.
bool is_time_homogeneous(const TimeSpaceField& Y, double tol) {
    const double scale = 1.0 + Y.comps[0].row(0).cwiseAbs().maxCoeff();
    for (int k = 1; k < Y.n_times(); ++k) {
        const double d = (Y.comps[0].row(k) - Y.comps[0].row(0)).cwiseAbs().maxCoeff();
        if (d > tol * scale) return false;
    }
    return true;
}

/// Linear interpolation of the environment in time.
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

/// Inhomogeneous part of the correction at slice k: time quadrature of the
/// second-derivative semigroup action on Y_s - Y_{t_k}.  The substitution
/// inside time_singular_integral regularises the integrand completely for
/// time-interpolated environments (the difference vanishes linearly at
/// s = t_k), hence power 0.
GridPath z2_slice(const TimeSpaceField& Y, int k, double T, const LiftOptions& opts) {
    const GridPath base = Y.slice(k);
    const double t = Y.t(k);
    auto g = [&](double s) {
        GridPath diff = interp_slice(Y, s);
        diff.values -= base.values;
        return heat::semigroup_apply(diff, s - t, 2, opts.geometry);
    };
    return heat::time_singular_integral(g, t, T, 0.0, opts.time_nodes);
}

struct WorstTriple {
    int slice = -1;
    int a = 0, b = 0, c = 0;
    double defect = 0.0;
    double scale = 1.0;
};

/// Subsampled grid indices, as in the rough-path consistency check.
std::vector<int> probe_indices(int n) {
    std::vector<int> idx;
    const int budget = 24;
    if (n <= 2 * budget) {
        for (int i = 0; i < n; ++i) idx.push_back(i);
    } else {
        const int stride = n / budget;
        for (int i = 0; i < n; i += stride) idx.push_back(i);
        if (idx.back() != n - 1) idx.push_back(n - 1);
    }
    return idx;
}

/// Scans pairwise additivity of one slice and keeps the worst violation.
void scan_chen(const RoughLift& lift, int k, WorstTriple& worst) {
    const auto& WW = lift.WW[static_cast<std::size_t>(k)];
    const auto& Ymat = lift.Y.comps[0];
    const auto& Zmat = lift.Z.comps[0];
    const auto idx = probe_indices(WW.n_points());
    for (std::size_t ia = 0; ia < idx.size(); ++ia) {
        for (std::size_t ib = ia; ib < idx.size(); ++ib) {
            for (std::size_t ic = ib; ic < idx.size(); ++ic) {
                const int a = idx[ia], b = idx[ib], c = idx[ic];
                const double dW1[2] = {Ymat(k, b) - Ymat(k, a), Zmat(k, b) - Zmat(k, a)};
                const double dW2[2] = {Ymat(k, c) - Ymat(k, b), Zmat(k, c) - Zmat(k, b)};
                for (int i = 0; i < 2; ++i) {
                    for (int j = 0; j < 2; ++j) {
                        const int comp = i * 2 + j;
                        const double D = WW(a, c, comp) - WW(a, b, comp) - WW(b, c, comp) -
                                         dW1[i] * dW2[j];
                        const double scale = 1.0 + std::fabs(WW(a, c, comp)) +
                                             std::fabs(WW(a, b, comp)) +
                                             std::fabs(WW(b, c, comp));
                        if (std::fabs(D) / scale > worst.defect / worst.scale) {
                            worst = WorstTriple{k, a, b, c, std::fabs(D), scale};
                        }
                    }
                }
            }
        }
    }
}

}  // namespace

rough::RoughPath RoughLift::slice_path(int k) const {
    GridPath W(Y.x0, Y.dx, Y.n_space(), 2);
    for (int i = 0; i < Y.n_space(); ++i) {
        W.values(i, 0) = Y(k, i, 0);
        W.values(i, 1) = Z(k, i, 0);
    }
    return rough::RoughPath{std::move(W), WW[static_cast<std::size_t>(k)], params.alpha};
}

void RoughLift::validate() const {
    if (Y.n_times() != n_times() || Z.n_times() != n_times())
        throw IntegrityError("RoughLift: slice counts disagree");
    if (Y.n_space() != Z.n_space() || Y.n_space() != WW[0].n_points())
        throw IntegrityError("RoughLift: space grids disagree");
    params.validate();

    WorstTriple worst;
    for (int k = 0; k < n_times(); ++k) {
        const auto& F = WW[static_cast<std::size_t>(k)];
        if (F.n_components != 4) throw IntegrityError("RoughLift: slice is missing components");
        const auto idx = probe_indices(F.n_points());
        for (int a : idx) {
            for (int b : idx) {
                const double dY = Y(k, b, 0) - Y(k, a, 0);
                const double dZ = Z(k, b, 0) - Z(k, a, 0);
                if (std::fabs(F(a, b, kYY) - 0.5 * dY * dY) > 1e-12 * (1.0 + dY * dY))
                    throw IntegrityError("RoughLift: symmetric component 11 is not closed-form");
                if (std::fabs(F(a, b, kZZ) - 0.5 * dZ * dZ) > 1e-12 * (1.0 + dZ * dZ))
                    throw IntegrityError("RoughLift: symmetric component 22 is not closed-form");
                const double shuffle = F(a, b, kYZ) + F(a, b, kZY) - dY * dZ;
                if (std::fabs(shuffle) > 1e-12 * (1.0 + std::fabs(dY * dZ)))
                    throw IntegrityError("RoughLift: shuffle identity violated");
            }
        }
        scan_chen(*this, k, worst);
    }
    if (worst.defect > 1e-10 * worst.scale)
        throw IntegrityError("RoughLift: additivity defect " + format_g17(worst.defect) +
                             " at slice " + std::to_string(worst.slice) + ", triple (" +
                             std::to_string(worst.a) + ", " + std::to_string(worst.b) + ", " +
                             std::to_string(worst.c) + ")");
}

TimeSpaceField build_Z(const TimeSpaceField& Y, double T, const LiftOptions& opts) {
    Y.validate();
    if (Y.n_components != 1)
        throw std::invalid_argument("build_Z: environment must be scalar");
    const int kT = horizon_index(Y, T, "build_Z");
    const bool homogeneous = is_time_homogeneous(Y, opts.homogeneity_tol);

    TimeSpaceField Z(Y.t0, Y.dt, kT + 1, Y.x0, Y.dx, Y.n_space(), 1);
    for (int k = 0; k < kT; ++k) {
        const GridPath slice = Y.slice(k);
        const GridPath G1 = heat::semigroup_apply(slice, T - Y.t(k), 0, opts.geometry);
        GridPath z = slice;
        z.values = 2.0 * (G1.values - slice.values);
        if (!homogeneous) {
            const GridPath z2 = z2_slice(Y, k, T, opts);
            z.values += z2.values;
        }
        Z.set_slice(k, z);
    }
    // At t = T the correction vanishes identically.
    return Z;
}

TwoParamField cross_integral_homogeneous(const GridPath& Y_slice, double t, double T,
                                         Geometry geom) {
    Y_slice.validate();
    if (Y_slice.n_components != 1)
        throw std::invalid_argument("cross_integral_homogeneous: slice must be scalar");
    if (!(T > t))
        throw std::invalid_argument("cross_integral_homogeneous: need T > t");

    const int m = Y_slice.n_points();
    const double tau = T - t;
    const GridPath G1 = heat::semigroup_apply(Y_slice, tau, 0, geom);
    const GridPath g1 = heat::semigroup_apply(Y_slice, tau, 1, geom);

    // Trapezoid prefix of the product g1 * Y; together with the sampled
    // antiderivative G1 it turns the double integral into pure function
    // differences, which is what makes pairwise additivity exact.
    Eigen::ArrayXd G2(m);
    G2[0] = 0.0;
    for (int i = 0; i + 1 < m; ++i) {
        G2[i + 1] = G2[i] + 0.5 * (g1(i, 0) * Y_slice(i, 0) + g1(i + 1, 0) * Y_slice(i + 1, 0)) *
                                Y_slice.dx;
    }

    TwoParamField out(Y_slice.x0, Y_slice.dx, m, 1);
    auto& mat = out.comps[0];
    for (int a = 0; a < m; ++a) {
        const double Ya = Y_slice(a, 0);
        const double Z1a = 2.0 * (G1(a, 0) - Ya);
        for (int b = 0; b < m; ++b) {
            if (a == b) {
                mat(a, b) = 0.0;
                continue;
            }
            const double dY = Y_slice(b, 0) - Ya;
            const double dZ1 = 2.0 * (G1(b, 0) - Y_slice(b, 0)) - Z1a;
            mat(a, b) = dZ1 * dY + dY * dY -
                        2.0 * (G2[b] - G2[a] - Ya * (G1(b, 0) - G1(a, 0)));
        }
    }
    return out;
}

TwoParamField cross_integral_inhomogeneous(const TimeSpaceField& Y, double t, double T,
                                           const LiftOptions& opts) {
    Y.validate();
    if (Y.n_components != 1)
        throw std::invalid_argument("cross_integral_inhomogeneous: environment must be scalar");
    if (!(T > t))
        throw std::invalid_argument("cross_integral_inhomogeneous: need T > t");
    const int k = horizon_index(Y, t, "cross_integral_inhomogeneous");
    horizon_index(Y, T, "cross_integral_inhomogeneous");

    const int m = Y.n_space();
    TwoParamField out(Y.x0, Y.dx, m, 1);
    if (is_time_homogeneous(Y, opts.homogeneity_tol)) return out;

    const GridPath z2 = z2_slice(Y, k, T, opts);

    // Trapezoid prefix of z2 against the environment increments.  Any
    // prefix keeps pairwise additivity exact (the field below is a pure
    // function-difference form); the trapezoid weights buy second-order
    // accuracy for the value itself.
    Eigen::ArrayXd L(m);
    L[0] = 0.0;
    for (int i = 0; i + 1 < m; ++i)
        L[i + 1] = L[i] + 0.5 * (z2(i, 0) + z2(i + 1, 0)) * (Y(k, i + 1, 0) - Y(k, i, 0));

    auto& mat = out.comps[0];
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            mat(a, b) = (a == b) ? 0.0
                                 : L[b] - L[a] - z2(a, 0) * (Y(k, b, 0) - Y(k, a, 0));
        }
    }
    return out;
}

JointRegularity joint_regularity_check(const TimeSpaceField& Y, double alpha) {
    Y.validate();
    JointRegularity out;
    if (Y.n_times() < 8 || is_time_homogeneous(Y, 1e-13)) {
        // Too short to fit, or no time variation at all: the condition is
        // vacuous (nu may be taken arbitrarily large).
        out.nu_hat = 1.0;
        out.mu_hat = 0.0;
        out.ok = true;
        return out;
    }

    // Time exponent: peak increment over space at dyadic time lags.
    std::vector<int> lags;
    for (int l = 1; 2 * l < Y.n_times(); l *= 2) lags.push_back(l);
    std::vector<double> xs, ys;
    for (int l : lags) {
        double peak = 0.0;
        for (int k = 0; k + l < Y.n_times(); ++k)
            peak = std::max(peak,
                            (Y.comps[0].row(k + l) - Y.comps[0].row(k)).cwiseAbs().maxCoeff());
        if (peak > 0.0) {
            xs.push_back(l * Y.dt);
            ys.push_back(peak);
        }
    }
    if (xs.size() >= 3) {
        out.nu_hat = fit_loglog(xs, ys).slope;
    } else {
        out.nu_hat = 1.0;
    }

    // Space exponent of the smallest-lag time increment.  A slice with no
    // spatial spread (the increment is constant in x) carries exponent 0 by
    // convention; fitting it would divide by zero increments.
    GridPath d = Y.slice(0);
    d.values.col(0) = (Y.comps[0].row(1) - Y.comps[0].row(0)).transpose().array();
    const double spread = (d.values.col(0) - d.values(0, 0)).cwiseAbs().maxCoeff();
    if (spread > 0.0) {
        std::vector<int> slags;
        for (int l = 1; l <= Y.n_space() / 4 && slags.size() < 8; l *= 2) slags.push_back(l);
        out.mu_hat = holder::holder_exponent_fit(d, slags);
    } else {
        out.mu_hat = 0.0;
    }
    out.ok = 2.0 * out.nu_hat + out.mu_hat > 1.0 - alpha;
    return out;
}

RoughLift assemble_lift(const TimeSpaceField& Y, double T, const HolderParams& base,
                        const LiftOptions& opts) {
    base.validate();
    const int kT = horizon_index(Y, T, "assemble_lift");
    const bool homogeneous = is_time_homogeneous(Y, opts.homogeneity_tol);

    RoughLift lift;
    lift.T = T;
    lift.Y = TimeSpaceField(Y.t0, Y.dt, kT + 1, Y.x0, Y.dx, Y.n_space(), 1);
    for (int k = 0; k <= kT; ++k) lift.Y.set_slice(k, Y.slice(k));
    lift.Z = build_Z(Y, T, opts);
    lift.params = base;
    lift.params.chi = base.chi + std::max(0.0, 0.5 - base.alpha) + 0.01;

    const int m = Y.n_space();
    lift.WW.assign(static_cast<std::size_t>(kT + 1), TwoParamField(Y.x0, Y.dx, m, 4));
    for (int k = 0; k <= kT; ++k) {
        auto& F = lift.WW[static_cast<std::size_t>(k)];
        // Cross component: closed-form part plus, when the environment is
        // genuinely time-dependent, the left-point correction integral.
        if (k < kT) {
            F.comps[kZY] = cross_integral_homogeneous(Y.slice(k), Y.t(k), T, opts.geometry)
                               .comps[0];
            if (!homogeneous) {
                F.comps[kZY] +=
                    cross_integral_inhomogeneous(Y, Y.t(k), T, opts).comps[0];
            }
        }
        for (int a = 0; a < m; ++a) {
            for (int b = 0; b < m; ++b) {
                const double dY = lift.Y(k, b, 0) - lift.Y(k, a, 0);
                const double dZ = lift.Z(k, b, 0) - lift.Z(k, a, 0);
                F.comps[kYY](a, b) = 0.5 * dY * dY;
                F.comps[kZZ](a, b) = 0.5 * dZ * dZ;
                F.comps[kYZ](a, b) = dY * dZ - F.comps[kZY](a, b);
            }
        }
    }
    lift.validate();
    return lift;
}

CauchyStudy geometric_cauchy_study(const TimeSpaceField& Y, double T,
                                   const std::vector<int>& levels, const HolderParams& base,
                                   const LiftOptions& opts) {
    if (levels.size() < 3)
        throw std::invalid_argument("geometric_cauchy_study: need at least three levels");
    const RoughLift ref = assemble_lift(Y, T, base, opts);

    CauchyStudy study;
    study.levels = levels;
    for (int level : levels) {
        const TimeSpaceField Yn = heat::mollify(Y, heat::Mollifier{level}, opts.geometry);
        const RoughLift ln = assemble_lift(Yn, T, base, opts);

        double dY = 0.0, dZ = 0.0, dWW = 0.0, kap = 0.0;
        for (int k = 0; k < ref.n_times(); ++k) {
            GridPath ey = ref.Y.slice(k);
            ey.values -= ln.Y.slice(k).values;
            dY = std::max(dY, holder::weighted_norm(ey, base.alpha));
            GridPath ez = ref.Z.slice(k);
            ez.values -= ln.Z.slice(k).values;
            dZ = std::max(dZ, holder::weighted_norm(ez, base.alpha));

            TwoParamField ew = ref.WW[static_cast<std::size_t>(k)];
            for (int c = 0; c < 4; ++c)
                ew.comps[static_cast<std::size_t>(c)] -=
                    ln.WW[static_cast<std::size_t>(k)].comps[static_cast<std::size_t>(c)];
            dWW = std::max(dWW, holder::two_param_norm(ew, 2.0 * base.alpha));

            const auto sp = ln.slice_path(k);
            kap = std::max(kap, holder::kappa_growth(sp.W, sp.WW, ln.params.alpha,
                                                     ln.params.chi));
        }
        study.dY.push_back(dY);
        study.dZ.push_back(dZ);
        study.dWW.push_back(dWW);
        study.kappa.push_back(kap);
    }

    auto non_increasing = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (v[i] > 1.05 * v[i - 1] + 1e-15) return false;
        return true;
    };
    study.decreasing = non_increasing(study.dY) && non_increasing(study.dZ) &&
                       non_increasing(study.dWW);
    const double kmin = *std::min_element(study.kappa.begin(), study.kappa.end());
    const double kmax = *std::max_element(study.kappa.begin(), study.kappa.end());
    study.bounded = kmax <= 3.0 * kmin + 1e-12;
    return study;
}

void write_lift(const RoughLift& lift, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    save_csv(lift.Y, dir + "/Y.csv");
    save_csv(lift.Z, dir + "/Z.csv");

    static const char* names[4] = {"11", "12", "21", "22"};
    nlohmann::json slices = nlohmann::json::array();
    for (int k = 0; k < lift.n_times(); ++k) {
        const auto& F = lift.WW[static_cast<std::size_t>(k)];
        double peak = 0.0;
        for (int c = 0; c < 4; ++c) {
            TwoParamField one(F.x0, F.dx, F.n_points(), 1);
            one.comps[0] = F.comps[static_cast<std::size_t>(c)];
            save_csv(one, dir + "/WW_t" + std::to_string(k) + "_" + names[c] + ".csv");
            peak = std::max(peak, F.comps[static_cast<std::size_t>(c)].cwiseAbs().maxCoeff());
        }
        slices.push_back({{"t", lift.Y.t(k)},
                          {"sup_Y", lift.Y.comps[0].row(k).cwiseAbs().maxCoeff()},
                          {"sup_Z", lift.Z.comps[0].row(k).cwiseAbs().maxCoeff()},
                          {"max_WW", peak}});
    }

    nlohmann::json manifest{
        {"horizon", lift.T},
        {"time", {{"t0", lift.Y.t0}, {"dt", lift.Y.dt}, {"n", lift.n_times()}}},
        {"space", {{"x0", lift.Y.x0}, {"dx", lift.Y.dx}, {"n", lift.Y.n_space()}}},
        {"exponents",
         {{"alpha", lift.params.alpha},
          {"beta", lift.params.beta},
          {"chi", lift.params.chi},
          {"theta", lift.params.theta},
          {"lambda", lift.params.lambda}}},
        {"slices", slices}};
    std::ofstream out(dir + "/manifest.json");
    if (!out) throw std::runtime_error("write_lift: cannot open manifest in " + dir);
    out << manifest.dump(2) << "\n";
    if (!out) throw std::runtime_error("write_lift: manifest write failed");
}

}  // namespace rd::lift
