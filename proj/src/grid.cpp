#include "roughdrift/grid.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "roughdrift/util.hpp"

namespace rd {

namespace {

std::pair<int, int> range_impl(const Interval& sub, double x0, double dx,
                               int n_points, const char* who) {
    if (!(sub.hi > sub.lo)) {
        throw std::invalid_argument(std::string(who) + ": degenerate interval");
    }
    // First grid point >= sub.lo and last grid point <= sub.hi.
    const double tol = 1e-9;
    int first = static_cast<int>(std::ceil((sub.lo - x0) / dx - tol));
    int last = static_cast<int>(std::floor((sub.hi - x0) / dx + tol));
    first = std::max(first, 0);
    last = std::min(last, n_points - 1);
    if (sub.lo < x0 - tol * dx || sub.hi > x0 + (n_points - 1) * dx + tol * dx) {
        throw std::invalid_argument(std::string(who) + ": interval reaches outside the grid");
    }
    if (last - first < 1) {
        throw std::invalid_argument(std::string(who) + ": interval captures fewer than two grid points");
    }
    return {first, last};
}

}  // namespace

GridPath::GridPath(double x0_, double dx_, int n_points_, int n_components_)
    : x0(x0_), dx(dx_), n_components(n_components_) {
    if (!(dx_ > 0.0)) throw std::invalid_argument("GridPath: dx must be positive");
    if (n_points_ < 1) throw std::invalid_argument("GridPath: need at least one grid point");
    if (n_components_ < 1) throw std::invalid_argument("GridPath: need at least one component");
    values = Eigen::ArrayXXd::Zero(n_points_, n_components_);
}

std::pair<int, int> GridPath::index_range(const Interval& sub) const {
    return range_impl(sub, x0, dx, n_points(), "GridPath::index_range");
}

void GridPath::validate() const {
    if (!(dx > 0.0)) throw std::invalid_argument("GridPath: dx must be positive");
    if (n_components < 1) throw std::invalid_argument("GridPath: need at least one component");
    if (values.rows() < 1) throw std::invalid_argument("GridPath: need at least one grid point");
    if (values.cols() != n_components)
        throw std::invalid_argument("GridPath: values width disagrees with n_components");
    if (!values.isFinite().all())
        throw std::invalid_argument("GridPath: values contain non-finite entries");
}

GridPath path_from_function(double x0, double dx, int n_points,
                            const std::function<double(double)>& f) {
    GridPath p(x0, dx, n_points, 1);
    for (int i = 0; i < n_points; ++i) p.values(i, 0) = f(p.x(i));
    return p;
}

TimeSpaceField::TimeSpaceField(double t0_, double dt_, int n_times_, double x0_,
                               double dx_, int n_space_, int n_components_)
    : t0(t0_), dt(dt_), x0(x0_), dx(dx_), n_components(n_components_) {
    if (!(dt_ > 0.0)) throw std::invalid_argument("TimeSpaceField: dt must be positive");
    if (!(dx_ > 0.0)) throw std::invalid_argument("TimeSpaceField: dx must be positive");
    if (n_times_ < 1 || n_space_ < 1)
        throw std::invalid_argument("TimeSpaceField: need at least one time and one space point");
    if (n_components_ < 1)
        throw std::invalid_argument("TimeSpaceField: need at least one component");
    comps.assign(static_cast<std::size_t>(n_components_),
                 Eigen::MatrixXd::Zero(n_times_, n_space_));
}

GridPath TimeSpaceField::slice(int k) const {
    if (k < 0 || k >= n_times())
        throw std::invalid_argument("TimeSpaceField::slice: time index out of range");
    GridPath p(x0, dx, n_space(), n_components);
    for (int c = 0; c < n_components; ++c)
        p.values.col(c) = comps[static_cast<std::size_t>(c)].row(k).transpose().array();
    return p;
}

void TimeSpaceField::set_slice(int k, const GridPath& p) {
    if (k < 0 || k >= n_times())
        throw std::invalid_argument("TimeSpaceField::set_slice: time index out of range");
    if (p.n_points() != n_space() || p.n_components != n_components)
        throw std::invalid_argument("TimeSpaceField::set_slice: path shape does not match field");
    for (int c = 0; c < n_components; ++c)
        comps[static_cast<std::size_t>(c)].row(k) = p.values.col(c).matrix().transpose();
}

void TimeSpaceField::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("TimeSpaceField: dt must be positive");
    if (!(dx > 0.0)) throw std::invalid_argument("TimeSpaceField: dx must be positive");
    if (comps.size() != static_cast<std::size_t>(n_components) || comps.empty())
        throw std::invalid_argument("TimeSpaceField: component count disagrees with storage");
    const auto rows = comps[0].rows();
    const auto cols = comps[0].cols();
    for (const auto& m : comps) {
        if (m.rows() != rows || m.cols() != cols)
            throw std::invalid_argument("TimeSpaceField: ragged component matrices");
        if (!m.array().isFinite().all())
            throw std::invalid_argument("TimeSpaceField: values contain non-finite entries");
    }
}

TwoParamField::TwoParamField(double x0_, double dx_, int n_points_, int n_components_)
    : x0(x0_), dx(dx_), n_components(n_components_) {
    if (!(dx_ > 0.0)) throw std::invalid_argument("TwoParamField: dx must be positive");
    if (n_points_ < 2) throw std::invalid_argument("TwoParamField: need at least two grid points");
    if (n_components_ < 1)
        throw std::invalid_argument("TwoParamField: need at least one component");
    comps.assign(static_cast<std::size_t>(n_components_),
                 Eigen::MatrixXd::Zero(n_points_, n_points_));
}

std::pair<int, int> TwoParamField::index_range(const Interval& sub) const {
    return range_impl(sub, x0, dx, n_points(), "TwoParamField::index_range");
}

void TwoParamField::validate() const {
    if (!(dx > 0.0)) throw std::invalid_argument("TwoParamField: dx must be positive");
    if (comps.size() != static_cast<std::size_t>(n_components) || comps.empty())
        throw std::invalid_argument("TwoParamField: component count disagrees with storage");
    const auto n = comps[0].rows();
    for (const auto& m : comps) {
        if (m.rows() != n || m.cols() != n)
            throw std::invalid_argument("TwoParamField: component matrices must be square and uniform");
        if (!m.array().isFinite().all())
            throw std::invalid_argument("TwoParamField: values contain non-finite entries");
        if (m.diagonal().cwiseAbs().maxCoeff() != 0.0)
            throw std::invalid_argument("TwoParamField: diagonal must vanish identically");
    }
}

HolderParams::HolderParams(double alpha_, double beta_, double chi_, double theta_,
                           double lambda_)
    : alpha(alpha_), beta(beta_), beta_prime(std::min(beta_, 0.5)), chi(chi_),
      theta(theta_), lambda(lambda_) {
    validate();
}

void HolderParams::validate() const {
    if (!(alpha > 1.0 / 3.0 && alpha <= 1.0))
        throw std::invalid_argument("HolderParams: alpha must lie in (1/3, 1]");
    if (!(beta > 1.0 / 3.0 && beta <= 1.0))
        throw std::invalid_argument("HolderParams: beta must lie in (1/3, 1]");
    if (beta_prime != std::min(beta, 0.5))
        throw std::invalid_argument("HolderParams: beta_prime must equal min(beta, 1/2)");
    if (!(chi > 0.0)) throw std::invalid_argument("HolderParams: chi must be positive");
    if (!(theta >= 1.0)) throw std::invalid_argument("HolderParams: theta must be >= 1");
    if (!(lambda >= 1.0)) throw std::invalid_argument("HolderParams: lambda must be >= 1");
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

std::vector<double> parse_row(const std::string& line, const char* who) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw std::runtime_error(std::string(who) + ": malformed numeric cell '" + cell + "'");
        }
    }
    return out;
}

/// Recover (origin, spacing) from a sorted uniform coordinate column.
void check_uniform(const std::vector<double>& xs, double& origin, double& spacing,
                   const char* who) {
    if (xs.size() < 2) throw std::runtime_error(std::string(who) + ": need at least two rows");
    origin = xs.front();
    spacing = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    if (!(spacing > 0.0)) throw std::runtime_error(std::string(who) + ": coordinates not increasing");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double expect = origin + static_cast<double>(i) * spacing;
        if (std::fabs(xs[i] - expect) > 1e-9 * std::max(1.0, std::fabs(expect)))
            throw std::runtime_error(std::string(who) + ": coordinates are not uniformly spaced");
    }
}

}  // namespace

void save_csv(const GridPath& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_csv: cannot open " + path);
    out << "x";
    for (int c = 0; c < f.n_components; ++c) out << ",v" << c;
    out << "\n";
    for (int i = 0; i < f.n_points(); ++i) {
        out << format_g17(f.x(i));
        for (int c = 0; c < f.n_components; ++c) out << "," << format_g17(f.values(i, c));
        out << "\n";
    }
    if (!out) throw std::runtime_error("save_csv: write failed for " + path);
}

GridPath load_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_grid_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("x", 0) != 0)
        throw std::runtime_error("load_grid_csv: missing 'x' header in " + path);
    std::vector<double> xs;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto row = parse_row(line, "load_grid_csv");
        if (row.size() < 2) throw std::runtime_error("load_grid_csv: row with fewer than two columns");
        xs.push_back(row[0]);
        rows.push_back(std::move(row));
    }
    double x0 = 0, dx = 0;
    check_uniform(xs, x0, dx, "load_grid_csv");
    const int n_comp = static_cast<int>(rows[0].size()) - 1;
    GridPath p(x0, dx, static_cast<int>(rows.size()), n_comp);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (static_cast<int>(rows[i].size()) - 1 != n_comp)
            throw std::runtime_error("load_grid_csv: ragged rows");
        for (int c = 0; c < n_comp; ++c)
            p.values(static_cast<int>(i), c) = rows[i][static_cast<std::size_t>(c) + 1];
    }
    return p;
}

void save_csv(const TimeSpaceField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_csv: cannot open " + path);
    out << "t,x";
    for (int c = 0; c < f.n_components; ++c) out << ",v" << c;
    out << "\n";
    for (int k = 0; k < f.n_times(); ++k) {
        for (int i = 0; i < f.n_space(); ++i) {
            out << format_g17(f.t(k)) << "," << format_g17(f.x(i));
            for (int c = 0; c < f.n_components; ++c)
                out << "," << format_g17(f.comps[static_cast<std::size_t>(c)](k, i));
            out << "\n";
        }
    }
    if (!out) throw std::runtime_error("save_csv: write failed for " + path);
}

TimeSpaceField load_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_field_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,x", 0) != 0)
        throw std::runtime_error("load_field_csv: missing 't,x' header in " + path);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto row = parse_row(line, "load_field_csv");
        if (row.size() < 3) throw std::runtime_error("load_field_csv: row with fewer than three columns");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("load_field_csv: no data rows");

    // Count the space points of the first time block (time-major layout).
    std::size_t n_space = 1;
    while (n_space < rows.size() && rows[n_space][0] == rows[0][0]) ++n_space;
    if (rows.size() % n_space != 0)
        throw std::runtime_error("load_field_csv: rows do not form a full rectangle");
    const std::size_t n_times = rows.size() / n_space;

    std::vector<double> ts(n_times), xs(n_space);
    for (std::size_t k = 0; k < n_times; ++k) ts[k] = rows[k * n_space][0];
    for (std::size_t i = 0; i < n_space; ++i) xs[i] = rows[i][1];
    double t0 = 0, dt = 1, x0 = 0, dx = 1;
    if (n_times >= 2) check_uniform(ts, t0, dt, "load_field_csv");
    else t0 = ts[0];
    check_uniform(xs, x0, dx, "load_field_csv");

    const int n_comp = static_cast<int>(rows[0].size()) - 2;
    TimeSpaceField f(t0, dt, static_cast<int>(n_times), x0, dx,
                     static_cast<int>(n_space), n_comp);
    for (std::size_t k = 0; k < n_times; ++k) {
        for (std::size_t i = 0; i < n_space; ++i) {
            const auto& row = rows[k * n_space + i];
            if (static_cast<int>(row.size()) - 2 != n_comp)
                throw std::runtime_error("load_field_csv: ragged rows");
            for (int c = 0; c < n_comp; ++c)
                f.comps[static_cast<std::size_t>(c)](static_cast<int>(k), static_cast<int>(i)) =
                    row[static_cast<std::size_t>(c) + 2];
        }
    }
    return f;
}

void save_csv(const TwoParamField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_csv: cannot open " + path);
    out << "x,y";
    for (int c = 0; c < f.n_components; ++c) out << ",v" << c;
    out << "\n";
    const int n = f.n_points();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            out << format_g17(f.x(i)) << "," << format_g17(f.x(j));
            for (int c = 0; c < f.n_components; ++c) out << "," << format_g17(f(i, j, c));
            out << "\n";
        }
    }
    if (!out) throw std::runtime_error("save_csv: write failed for " + path);
}

TwoParamField load_two_param_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_two_param_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,y", 0) != 0)
        throw std::runtime_error("load_two_param_csv: missing 'x,y' header in " + path);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto row = parse_row(line, "load_two_param_csv");
        if (row.size() < 3)
            throw std::runtime_error("load_two_param_csv: row with fewer than three columns");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("load_two_param_csv: no data rows");

    // Rows are written row-major over an n x n square.
    std::size_t n = 1;
    while (n < rows.size() && rows[n][0] == rows[0][0]) ++n;
    if (rows.size() != n * n)
        throw std::runtime_error("load_two_param_csv: rows do not form a square");

    std::vector<double> xs(n);
    for (std::size_t j = 0; j < n; ++j) xs[j] = rows[j][1];
    double x0 = 0, dx = 1;
    check_uniform(xs, x0, dx, "load_two_param_csv");

    const int n_comp = static_cast<int>(rows[0].size()) - 2;
    TwoParamField f(x0, dx, static_cast<int>(n), n_comp);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto& row = rows[i * n + j];
            if (static_cast<int>(row.size()) - 2 != n_comp)
                throw std::runtime_error("load_two_param_csv: ragged rows");
            for (int c = 0; c < n_comp; ++c)
                f.comps[static_cast<std::size_t>(c)](static_cast<int>(i), static_cast<int>(j)) =
                    row[static_cast<std::size_t>(c) + 2];
        }
    }
    return f;
}

}  // namespace rd
