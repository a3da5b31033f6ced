#include "roughdrift/rough.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "roughdrift/norms.hpp"

namespace rd::rough {

namespace {

bool same_grid(const GridPath& a, const GridPath& b) {
    const double scale = std::max({1.0, std::fabs(a.x0), std::fabs(a.dx)});
    return a.n_points() == b.n_points() && std::fabs(a.x0 - b.x0) <= 1e-12 * scale &&
           std::fabs(a.dx - b.dx) <= 1e-12 * scale;
}

void check_window(const GridPath& W, int ix, int iy, const char* who) {
    if (ix < 0 || iy >= W.n_points() || ix >= iy)
        throw std::invalid_argument(std::string(who) + ": window indices out of order or range");
}

/// Grid indices probed by the consistency check: every index on small
/// grids, a strided subsample (endpoints included) on large ones.
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

}  // namespace

void RoughPath::validate() const {
    W.validate();
    WW.validate();
    if (!(alpha > 1.0 / 3.0 && alpha <= 1.0))
        throw std::invalid_argument("RoughPath: alpha must lie in (1/3, 1]");
    const int n = W.n_components;
    if (WW.n_components != n * n)
        throw std::invalid_argument("RoughPath: second-order part needs n*n components");
    const double scale0 = std::max({1.0, std::fabs(W.x0), std::fabs(W.dx)});
    if (WW.n_points() != W.n_points() || std::fabs(WW.x0 - W.x0) > 1e-12 * scale0 ||
        std::fabs(WW.dx - W.dx) > 1e-12 * scale0)
        throw std::invalid_argument("RoughPath: path and second-order part disagree on the grid");

    const auto idx = probe_indices(W.n_points());
    for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = a; b < idx.size(); ++b) {
            for (std::size_t c = b; c < idx.size(); ++c) {
                const Eigen::MatrixXd D = chen_defect(*this, idx[a], idx[b], idx[c]);
                double scale = 0.0;
                for (int j = 0; j < n; ++j) {
                    for (int k = 0; k < n; ++k) {
                        const int comp = j * n + k;
                        scale = std::max(scale, std::fabs(WW(idx[a], idx[c], comp)));
                        scale = std::max(scale, std::fabs(WW(idx[a], idx[b], comp)));
                        scale = std::max(scale, std::fabs(WW(idx[b], idx[c], comp)));
                    }
                }
                if (D.cwiseAbs().maxCoeff() > 1e-10 * (1.0 + scale))
                    throw std::invalid_argument(
                        "RoughPath: second-order increments violate additivity");
            }
        }
    }
}

void ControlledPath::validate() const {
    v.validate();
    dWv.validate();
    if (v.n_components != 1)
        throw std::invalid_argument("ControlledPath: v must be scalar");
    if (!(beta > 1.0 / 3.0 && beta <= 1.0))
        throw std::invalid_argument("ControlledPath: beta must lie in (1/3, 1]");
    if (!same_grid(v, dWv))
        throw std::invalid_argument("ControlledPath: v and dWv must share the grid");
}

TwoParamField make_iterated_integral(const GridPath& W) {
    W.validate();
    const int m = W.n_points();
    const int n = W.n_components;

    // Prefix sums of the per-cell trapezoid contributions: cell [i, i+1]
    // contributes (W_j(i) + W_j(i+1))/2 * (W_k(i+1) - W_k(i)).  Increments
    // of the prefix make the pairwise values additive by construction.
    std::vector<Eigen::ArrayXd> prefix(static_cast<std::size_t>(n * n));
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            Eigen::ArrayXd p(m);
            p[0] = 0.0;
            for (int i = 0; i + 1 < m; ++i) {
                const double mid = 0.5 * (W(i, j) + W(i + 1, j));
                p[i + 1] = p[i] + mid * (W(i + 1, k) - W(i, k));
            }
            prefix[static_cast<std::size_t>(j * n + k)] = std::move(p);
        }
    }

    TwoParamField out(W.x0, W.dx, m, n * n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            auto& mat = out.comps[static_cast<std::size_t>(j * n + k)];
            const auto& p = prefix[static_cast<std::size_t>(j * n + k)];
            // The same formula serves both orientations: for b < a it gives
            // the backward integral with base point a.
            for (int a = 0; a < m; ++a) {
                for (int b = 0; b < m; ++b) {
                    mat(a, b) = (a == b) ? 0.0
                                         : (p[b] - p[a]) - W(a, j) * (W(b, k) - W(a, k));
                }
            }
        }
    }
    return out;
}

Eigen::MatrixXd chen_defect(const RoughPath& R, int ix, int iy, int iz) {
    const int m = R.W.n_points();
    if (ix < 0 || iz >= m || ix > iy || iy > iz)
        throw std::invalid_argument("chen_defect: indices must satisfy 0 <= x <= y <= z");
    const int n = R.n_components();
    Eigen::MatrixXd D(n, n);
    for (int j = 0; j < n; ++j) {
        const double dW1 = R.W(iy, j) - R.W(ix, j);
        for (int k = 0; k < n; ++k) {
            const int comp = j * n + k;
            const double dW2 = R.W(iz, k) - R.W(iy, k);
            D(j, k) = R.WW(ix, iz, comp) - R.WW(ix, iy, comp) - R.WW(iy, iz, comp) - dW1 * dW2;
        }
    }
    return D;
}

TwoParamField chen_defect_field(const RoughPath& R) {
    const int m = R.W.n_points();
    const int n = R.n_components();
    TwoParamField out(R.W.x0, R.W.dx, m, n * n);
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            const int mid = a + (b - a) / 2;
            const Eigen::MatrixXd D = chen_defect(R, a, mid, b);
            for (int j = 0; j < n; ++j) {
                for (int k = 0; k < n; ++k) {
                    out.comps[static_cast<std::size_t>(j * n + k)](a, b) = D(j, k);
                    out.comps[static_cast<std::size_t>(j * n + k)](b, a) = D(j, k);
                }
            }
        }
    }
    return out;
}

TwoParamField remainder_field(const ControlledPath& v, const RoughPath& R) {
    v.validate();
    if (!same_grid(v.v, R.W) || v.dWv.n_components != R.n_components())
        throw std::invalid_argument("remainder_field: controlled path and rough path grids differ");
    const int m = R.W.n_points();
    const int n = R.n_components();
    TwoParamField out(R.W.x0, R.W.dx, m, 1);
    auto& mat = out.comps[0];
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            if (a == b) {
                mat(a, b) = 0.0;
                continue;
            }
            double r = v.v(b, 0) - v.v(a, 0);
            for (int j = 0; j < n; ++j) r -= v.dWv(a, j) * (R.W(b, j) - R.W(a, j));
            mat(a, b) = r;
        }
    }
    return out;
}

Eigen::VectorXd compensated_sum(const ControlledPath& v, const RoughPath& R,
                                const std::vector<int>& partition) {
    const int m = R.W.n_points();
    const int n = R.n_components();
    if (partition.size() < 2)
        throw std::invalid_argument("compensated_sum: partition needs at least two points");
    for (std::size_t i = 0; i < partition.size(); ++i) {
        if (partition[i] < 0 || partition[i] >= m)
            throw std::invalid_argument("compensated_sum: partition leaves the grid");
        if (i > 0 && partition[i] <= partition[i - 1])
            throw std::invalid_argument("compensated_sum: partition must be strictly increasing");
    }
    Eigen::VectorXd S = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i + 1 < partition.size(); ++i) {
        const int p = partition[i];
        const int q = partition[i + 1];
        for (int k = 0; k < n; ++k) {
            double term = v.v(p, 0) * (R.W(q, k) - R.W(p, k));
            for (int j = 0; j < n; ++j) term += v.dWv(p, j) * R.WW(p, q, j * n + k);
            S[k] += term;
        }
    }
    return S;
}

RoughIntegral rough_integral(const ControlledPath& v, const RoughPath& R, int ix, int iy,
                             const std::vector<std::vector<int>>& coarser) {
    check_window(R.W, ix, iy, "rough_integral");
    if (!same_grid(v.v, R.W))
        throw std::invalid_argument("rough_integral: controlled path and rough path grids differ");

    std::vector<int> finest(static_cast<std::size_t>(iy - ix + 1));
    for (int i = ix; i <= iy; ++i) finest[static_cast<std::size_t>(i - ix)] = i;

    RoughIntegral out;
    out.value = compensated_sum(v, R, finest);

    std::vector<std::vector<int>> ladder = coarser;
    if (ladder.empty()) {
        for (int stride = 2; stride < iy - ix; stride *= 2) {
            std::vector<int> p;
            for (int i = ix; i < iy; i += stride) p.push_back(i);
            p.push_back(iy);
            ladder.push_back(std::move(p));
        }
    }
    for (const auto& p : ladder) {
        if (p.front() != ix || p.back() != iy)
            throw std::invalid_argument("rough_integral: partition does not span the window");
        const Eigen::VectorXd S = compensated_sum(v, R, p);
        double mesh = 0.0;
        for (std::size_t i = 0; i + 1 < p.size(); ++i)
            mesh = std::max(mesh, (p[i + 1] - p[i]) * R.W.dx);
        out.mesh.push_back(mesh);
        out.deviation.push_back((S - out.value).cwiseAbs().maxCoeff());
    }
    return out;
}

double young_integral(const GridPath& f, const GridPath& g, int ix, int iy) {
    if (f.n_components != 1 || g.n_components != 1)
        throw std::invalid_argument("young_integral: paths must be scalar");
    if (!same_grid(f, g))
        throw std::invalid_argument("young_integral: paths must share the grid");
    check_window(f, ix, iy, "young_integral");
    double S = 0.0;
    for (int i = ix; i < iy; ++i) S += f(i, 0) * (g(i + 1, 0) - g(i, 0));
    return S;
}

YoungBound young_bound_report(const GridPath& f, const GridPath& g, int ix, int iy,
                              double alpha_f, double alpha_g) {
    YoungBound out;
    out.value = young_integral(f, g, ix, iy);
    out.deviation = std::fabs(out.value - f(ix, 0) * (g(iy, 0) - g(ix, 0)));
    const Interval win{f.x(ix), f.x(iy)};
    out.norm_f = holder::holder_seminorm(f, alpha_f, win);
    out.norm_g = holder::holder_seminorm(g, alpha_g, win);
    const double denom = out.norm_f * out.norm_g * std::pow(win.span(), alpha_f + alpha_g);
    out.fitted_constant = denom > 0.0 ? out.deviation / denom : 0.0;
    return out;
}

BoundCheck integral_error_bound_check(const ControlledPath& v, const RoughPath& R,
                                      int ix, int iy, int n_levels) {
    check_window(R.W, ix, iy, "integral_error_bound_check");
    if (n_levels < 1)
        throw std::invalid_argument("integral_error_bound_check: need at least one level");

    const Interval win{R.W.x(ix), R.W.x(iy)};
    const double nW = holder::holder_seminorm(R.W, R.alpha, win);
    const double nWW = holder::two_param_norm(R.WW, 2.0 * R.alpha, win);
    const double ndW = holder::holder_seminorm(v.dWv, v.beta, win);
    const TwoParamField Rv = remainder_field(v, R);
    const double nR = holder::two_param_norm(Rv, 2.0 * v.beta_prime(), win);

    BoundCheck out;
    out.fitted_constant = 0.0;
    for (int level = 1; level <= n_levels; ++level) {
        const int stride = 1 << level;
        if (stride >= iy - ix) break;
        double worst = 0.0;
        double mesh = 0.0;
        for (int a = ix; a < iy; a += stride) {
            const int b = std::min(a + stride, iy);
            const Eigen::VectorXd one = compensated_sum(v, R, {a, b});
            std::vector<int> cells(static_cast<std::size_t>(b - a + 1));
            for (int i = a; i <= b; ++i) cells[static_cast<std::size_t>(i - a)] = i;
            const Eigen::VectorXd ref = compensated_sum(v, R, cells);
            const double num = (one - ref).cwiseAbs().maxCoeff();
            const double h = (b - a) * R.W.dx;
            mesh = std::max(mesh, h);
            const double denom = nWW * ndW * std::pow(h, 2.0 * R.alpha + v.beta) +
                                 nW * nR * std::pow(h, R.alpha + 2.0 * v.beta_prime());
            double ratio = 0.0;
            if (num > 0.0)
                ratio = denom > 0.0 ? num / denom : std::numeric_limits<double>::infinity();
            if (num <= 1e-14 * (1.0 + ref.cwiseAbs().maxCoeff())) ratio = 0.0;
            worst = std::max(worst, ratio);
        }
        out.mesh.push_back(mesh);
        out.max_ratio.push_back(worst);
        out.fitted_constant = std::max(out.fitted_constant, worst);
    }
    return out;
}

}  // namespace rd::rough
