#include "coverlab/harmonic_forms.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

#include <Eigen/SparseLU>
#include <Eigen/Sparse>

namespace coverlab {

Point tau_vector(Point pole, Point p) {
    double dx = p.x - pole.x, dy = p.y - pole.y;
    double r2 = dx * dx + dy * dy;
    if (r2 == 0.0) throw SingularityError("angle form evaluated at its pole");
    double s = 1.0 / (2.0 * M_PI * r2);
    return {-dy * s, dx * s};
}

double angle_increment(Point pole, Point a, Point b) {
    Point u = a - pole, v = b - pole;
    return std::atan2(cross(u, v), dot(u, v)) / (2.0 * M_PI);
}

double branch_angle(Point pole, Point p) {
    return std::atan2(p.y - pole.y, p.x - pole.x) / (2.0 * M_PI);
}

// ---------------------------------------------------------------- GridPotential

GridPotential::GridPotential(std::shared_ptr<const Grid> grid, std::vector<double> lattice_values,
                             std::vector<std::uint8_t> defined)
    : grid_(std::move(grid)), values_(std::move(lattice_values)), defined_(std::move(defined)) {}

void GridPotential::corners(Point p, int& i, int& j, double& u, double& v, const double** f) const {
    const Grid& g = *grid_;
    double fx = (p.x - g.origin().x) / g.h();
    double fy = (p.y - g.origin().y) / g.h();
    i = static_cast<int>(std::floor(fx));
    j = static_cast<int>(std::floor(fy));
    u = fx - i;
    v = fy - j;
    if (i < 0 || j < 0 || i + 1 >= g.nx() || j + 1 >= g.ny())
        throw GeometryError("potential evaluated outside the lattice");
    int ids[4] = {g.lattice_id(i, j), g.lattice_id(i + 1, j), g.lattice_id(i, j + 1), g.lattice_id(i + 1, j + 1)};
    for (int c = 0; c < 4; ++c) {
        if (!defined_[ids[c]]) throw GeometryError("potential undefined near the evaluation point");
        f[c] = &values_[ids[c]];
    }
}

double GridPotential::value(Point p) const {
    int i, j;
    double u, v;
    const double* f[4];
    corners(p, i, j, u, v, f);
    return (1 - u) * (1 - v) * *f[0] + u * (1 - v) * *f[1] + (1 - u) * v * *f[2] + u * v * *f[3];
}

Point GridPotential::gradient(Point p) const {
    double v;
    Point g;
    value_and_gradient(p, v, g);
    return g;
}

void GridPotential::value_and_gradient(Point p, double& val, Point& grad) const {
    int i, j;
    double u, v;
    const double* f[4];
    corners(p, i, j, u, v, f);
    double f00 = *f[0], f10 = *f[1], f01 = *f[2], f11 = *f[3];
    val = (1 - u) * (1 - v) * f00 + u * (1 - v) * f10 + (1 - u) * v * f01 + u * v * f11;
    double ih = 1.0 / grid_->h();
    grad = {((1 - v) * (f10 - f00) + v * (f11 - f01)) * ih, ((1 - u) * (f01 - f00) + u * (f11 - f10)) * ih};
}

double GridPotential::node_value(int active) const {
    auto [i, j] = grid_->coords(active);
    return values_[grid_->lattice_id(i, j)];
}

Eigen::VectorXd GridPotential::active_values() const {
    Eigen::VectorXd out(grid_->num_active());
    for (int a = 0; a < grid_->num_active(); ++a) out[a] = node_value(a);
    return out;
}

GridPotential GridPotential::combine(const std::vector<const GridPotential*>& fields, const std::vector<double>& c) {
    if (fields.empty() || fields.size() != c.size()) throw std::invalid_argument("combine: size mismatch");
    const GridPotential& f0 = *fields[0];
    std::vector<double> vals(f0.values_.size(), 0.0);
    std::vector<std::uint8_t> def = f0.defined_;
    for (std::size_t k = 0; k < fields.size(); ++k) {
        if (fields[k]->grid_ != f0.grid_) throw std::invalid_argument("combine: potentials on different grids");
        for (std::size_t n = 0; n < vals.size(); ++n) {
            vals[n] += c[k] * fields[k]->values_[n];
            def[n] = def[n] && fields[k]->defined_[n];
        }
    }
    return GridPotential(f0.grid_, std::move(vals), std::move(def));
}

// ---------------------------------------------------------------- OneForm

OneForm::OneForm(std::vector<Point> poles, std::vector<double> weights, std::shared_ptr<const GridPotential> potential)
    : poles_(std::move(poles)), weights_(std::move(weights)), potential_(std::move(potential)) {
    if (poles_.size() != weights_.size()) throw std::invalid_argument("OneForm: poles/weights size mismatch");
}

Point OneForm::analytic(Point p) const {
    Point w{};
    for (std::size_t m = 0; m < poles_.size(); ++m) w = w + weights_[m] * tau_vector(poles_[m], p);
    return w;
}

Point OneForm::operator()(Point p) const {
    Point w = analytic(p);
    if (potential_) w = w + potential_->gradient(p);
    return w;
}

double OneForm::analytic_increment(Point a, Point b) const {
    double s = 0.0;
    for (std::size_t m = 0; m < poles_.size(); ++m) s += weights_[m] * angle_increment(poles_[m], a, b);
    return s;
}

double OneForm::increment(Point a, Point b) const {
    double s = analytic_increment(a, b);
    if (potential_) s += potential_->value(b) - potential_->value(a);
    return s;
}

double OneForm::fundamental_difference(Point x, Point y) const {
    double s = 0.0;
    for (std::size_t m = 0; m < poles_.size(); ++m)
        s += weights_[m] * (branch_angle(poles_[m], y) - branch_angle(poles_[m], x));
    if (potential_) s += potential_->value(y) - potential_->value(x);
    return s;
}

OneForm tau_form(Point pole) { return OneForm({pole}, {1.0}, nullptr); }

// ---------------------------------------------------------------- loops

Loop Loop::circle(Point center, double radius, int segments, bool ccw) {
    Loop l;
    l.vertices.reserve(segments);
    for (int s = 0; s < segments; ++s) {
        double th = 2.0 * M_PI * s / segments * (ccw ? 1.0 : -1.0);
        l.vertices.push_back({center.x + radius * std::cos(th), center.y + radius * std::sin(th)});
    }
    return l;
}

Loop Loop::reversed() const {
    Loop l{vertices};
    std::reverse(l.vertices.begin(), l.vertices.end());
    return l;
}

double loop_integral(const OneForm& form, const Loop& loop, const PlanarDomain& domain) {
    const auto& v = loop.vertices;
    if (v.size() < 3) throw GeometryError("loop needs at least three vertices");
    double analytic = 0.0, exact = 0.0;
    for (std::size_t s = 0; s < v.size(); ++s) {
        Point a = v[s], b = v[(s + 1) % v.size()];
        if (!domain.contains(a) || !domain.contains(0.5 * (a + b)))
            throw GeometryError("loop leaves the domain");
        analytic += form.analytic_increment(a, b);
    }
    if (form.potential()) {
        for (std::size_t s = 0; s < v.size(); ++s)
            exact += form.potential()->value(v[(s + 1) % v.size()]) - form.potential()->value(v[s]);
    }
    return analytic + exact;
}

Loop generator_loop(const PlanarDomain& domain, int hole) {
    const Circle& c = domain.holes().at(hole);
    double clearance = domain.outer().radius - norm(c.center - domain.outer().center) - c.radius;
    for (int i = 0; i < domain.rank(); ++i) {
        if (i == hole) continue;
        const Circle& d = domain.holes()[i];
        clearance = std::min(clearance, norm(c.center - d.center) - c.radius - d.radius);
    }
    return Loop::circle(c.center, c.radius + 0.5 * clearance);
}

// ---------------------------------------------------------------- Neumann potential

namespace {

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

// Component whose exterior contains the lattice point q (q not in M).
int violated_component(const PlanarDomain& dom, Point q) {
    if (norm(q - dom.outer().center) >= dom.outer().radius) return 0;
    for (int j = 0; j < dom.rank(); ++j)
        if (norm(q - dom.holes()[j].center) <= dom.holes()[j].radius) return j + 1;
    return dom.nearest_component(q);
}

// Outer rings of ghosts, extrapolated linearly along lattice lines; only
// used so that bilinear cells touching the boundary are complete.
void extrapolate_rings(const Grid& g, std::vector<double>& val, std::vector<std::uint8_t>& def, int rings) {
    for (int ring = 0; ring < rings; ++ring) {
        std::vector<std::uint8_t> snap = def;
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                int q = g.lattice_id(i, j);
                if (snap[q]) continue;
                double s = 0.0;
                int n = 0;
                for (int d = 0; d < Grid::kDirs; ++d) {
                    int i1 = i - Grid::kDi[d], j1 = j - Grid::kDj[d];
                    if (!g.in_lattice(i1, j1) || !snap[g.lattice_id(i1, j1)]) continue;
                    int i2 = i1 - Grid::kDi[d], j2 = j1 - Grid::kDj[d];
                    double v1 = val[g.lattice_id(i1, j1)];
                    if (g.in_lattice(i2, j2) && snap[g.lattice_id(i2, j2)])
                        s += 2.0 * v1 - val[g.lattice_id(i2, j2)];
                    else
                        s += v1;
                    ++n;
                }
                if (n > 0) {
                    val[q] = s / n;
                    def[q] = 1;
                }
            }
    }
}

}  // namespace

NeumannPotential solve_neumann_potential(std::shared_ptr<const Grid> grid, const OneForm& tau, double tol,
                                         int max_iter) {
    const Grid& g = *grid;
    const PlanarDomain& dom = g.domain();
    const int n = g.num_active();
    const double h = g.h();

    // unknowns: active nodes, then the ghost nodes adjacent to them
    std::vector<int> unknown(static_cast<std::size_t>(g.nx()) * g.ny(), -1);
    std::vector<int> ghost_lattice;
    for (int a = 0; a < n; ++a) {
        auto [i, j] = g.coords(a);
        unknown[g.lattice_id(i, j)] = a;
    }
    for (int a = 0; a < n; ++a) {
        auto [i, j] = g.coords(a);
        for (int d = 0; d < Grid::kDirs; ++d) {
            if (g.neighbor(a, d) >= 0) continue;
            int q = g.lattice_id(i + Grid::kDi[d], j + Grid::kDj[d]);
            if (unknown[q] >= 0) continue;
            unknown[q] = n + static_cast<int>(ghost_lattice.size());
            ghost_lattice.push_back(q);
        }
    }
    const int ng = static_cast<int>(ghost_lattice.size());
    const int N = n + ng;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(7 * static_cast<std::size_t>(N));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
    for (int a = 0; a < n; ++a) {
        auto [i, j] = g.coords(a);
        for (int d = 0; d < Grid::kDirs; ++d)
            trip.emplace_back(a, unknown[g.lattice_id(i + Grid::kDi[d], j + Grid::kDj[d])], -1.0);
        trip.emplace_back(a, a, 4.0);
    }
    for (int s = 0; s < ng; ++s) {
        const int row = n + s;
        const int q = ghost_lattice[s];
        Point pq = g.lattice_point(q % g.nx(), q / g.nx());
        int comp = violated_component(dom, pq);
        const Circle& c = dom.component(comp);
        Point dir = pq - c.center;
        double r = norm(dir);
        Point x0 = c.center + (c.radius / r) * dir;
        Point nu = dom.outward_normal(comp, x0);
        double delta = std::abs(r - c.radius);
        // mirror image at least one spacing deep, inside a cell of unknowns
        bool placed = false;
        for (int attempt = 0; attempt < 6 && !placed; ++attempt) {
            double depth = std::max(delta, h) + 0.5 * h * attempt;
            Point img = x0 - depth * nu;
            double fx = (img.x - g.origin().x) / h, fy = (img.y - g.origin().y) / h;
            int i0 = static_cast<int>(std::floor(fx)), j0 = static_cast<int>(std::floor(fy));
            double u = fx - i0, v = fy - j0;
            int ids[4] = {g.lattice_id(i0, j0), g.lattice_id(i0 + 1, j0), g.lattice_id(i0, j0 + 1),
                          g.lattice_id(i0 + 1, j0 + 1)};
            double w[4] = {(1 - u) * (1 - v), u * (1 - v), (1 - u) * v, u * v};
            bool ok = true;
            for (int k = 0; k < 4; ++k)
                if (w[k] != 0.0 && unknown[ids[k]] < 0) ok = false;
            if (!ok) continue;
            trip.emplace_back(row, row, 1.0);
            for (int k = 0; k < 4; ++k)
                if (w[k] != 0.0) trip.emplace_back(row, unknown[ids[k]], -w[k]);
            rhs[row] = -(delta + depth) * dot(tau.analytic(x0), nu);
            placed = true;
        }
        if (!placed) throw SolverError("ghost node image could not be placed; grid too coarse");
    }
    Eigen::SparseMatrix<double> K(N, N);
    K.setFromTriplets(trip.begin(), trip.end());
    K.makeCompressed();

    // The Neumann system is singular and only compatible up to truncation
    // error. Pin node 0 in place of its equation, then spread the defect of
    // the dropped equation as a uniform source so no point charge remains.
    Eigen::SparseMatrix<double, Eigen::RowMajor> Krow = K;
    Eigen::SparseMatrix<double> K0 = K;
    K0.prune([](Eigen::Index r, Eigen::Index, double) { return r != 0; });
    K0.coeffRef(0, 0) = 1.0;
    K0.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(K0);
    if (lu.info() != Eigen::Success) throw SolverError("Neumann potential: factorisation failed");
    auto refine = [&](const Eigen::VectorXd& b) {
        Eigen::VectorXd x = lu.solve(b);
        for (int it = 0; it < max_iter; ++it) {
            Eigen::VectorXd r = b - K0 * x;
            if (r.lpNorm<Eigen::Infinity>() <= tol * std::max(1.0, b.lpNorm<Eigen::Infinity>())) break;
            x += lu.solve(r);
        }
        return x;
    };
    auto row0 = [&](const Eigen::VectorXd& v) { return Krow.row(0).dot(v); };
    Eigen::VectorXd b0 = rhs;
    b0[0] = 0.0;
    Eigen::VectorXd x = refine(b0);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(N);
    z.head(n).setOnes();
    z[0] = 0.0;
    Eigen::VectorXd y = refine(z);
    double defect = row0(x) - rhs[0];
    double unit = row0(y) - 1.0;
    double c = -defect / unit;
    x += c * y;
    Eigen::VectorXd src = rhs;
    src.head(n).array() += c;
    x.array() -= x.head(n).mean();
    double scale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
    double res = (K * x - src).lpNorm<Eigen::Infinity>();
    if (!(res <= 1e-10 * scale))
        throw SolverError("Neumann potential solve did not converge: residual " + sci(res));

    std::vector<double> vals(unknown.size(), 0.0);
    std::vector<std::uint8_t> def(unknown.size(), 0);
    for (std::size_t q = 0; q < unknown.size(); ++q)
        if (unknown[q] >= 0) {
            vals[q] = x[unknown[q]];
            def[q] = 1;
        }
    extrapolate_rings(g, vals, def, 3);
    return {GridPotential(std::move(grid), std::move(vals), std::move(def)), res, c};
}

// ---------------------------------------------------------------- quadrature

namespace {

enum class CellType { outside, inside, cut };

CellType classify_cell(const PlanarDomain& dom, Point lo, double h) {
    Point hi{lo.x + h, lo.y + h};
    const Circle& o = dom.outer();
    double far = 0.0;
    Point cs[4] = {lo, {hi.x, lo.y}, {lo.x, hi.y}, hi};
    for (Point c : cs) far = std::max(far, norm(c - o.center));
    double nx = std::clamp(o.center.x, lo.x, hi.x), ny = std::clamp(o.center.y, lo.y, hi.y);
    double near_outer = norm(Point{nx, ny} - o.center);
    if (near_outer >= o.radius) return CellType::outside;
    bool inside = far < o.radius;
    for (const Circle& c : dom.holes()) {
        double cx = std::clamp(c.center.x, lo.x, hi.x), cy = std::clamp(c.center.y, lo.y, hi.y);
        double nearest = norm(Point{cx, cy} - c.center);
        double farthest = 0.0;
        for (Point q : cs) farthest = std::max(farthest, norm(q - c.center));
        if (farthest <= c.radius) return CellType::outside;
        if (nearest <= c.radius) inside = false;
    }
    return inside ? CellType::inside : CellType::cut;
}

struct RowSums {
    Eigen::MatrixXd fine, coarse;
    double vol_fine = 0.0, vol_coarse = 0.0;
};

void accumulate_point(const std::vector<OneForm>& forms, Point p, double w, Eigen::MatrixXd& m,
                      std::vector<Point>& buf) {
    const int k = static_cast<int>(forms.size());
    for (int i = 0; i < k; ++i) buf[i] = forms[i](p);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j <= i; ++j) m(i, j) += w * dot(buf[i], buf[j]);
}

RowSums quadrature_row(const Grid& g, const std::vector<OneForm>& forms, int j, int cut_samples) {
    const int k = static_cast<int>(forms.size());
    const PlanarDomain& dom = g.domain();
    const double h = g.h();
    RowSums r{Eigen::MatrixXd::Zero(k, k), Eigen::MatrixXd::Zero(k, k)};
    std::vector<Point> buf(k);
    const int sc = std::max(2, cut_samples / 2);
    for (int i = 0; i + 1 < g.nx(); ++i) {
        Point lo = g.lattice_point(i, j);
        CellType t = classify_cell(dom, lo, h);
        if (t == CellType::outside) continue;
        if (t == CellType::inside) {
            double w = 0.25 * h * h;
            for (double a : {0.25, 0.75})
                for (double b : {0.25, 0.75}) accumulate_point(forms, {lo.x + a * h, lo.y + b * h}, w, r.fine, buf);
            r.vol_fine += h * h;
            accumulate_point(forms, {lo.x + 0.5 * h, lo.y + 0.5 * h}, h * h, r.coarse, buf);
            r.vol_coarse += h * h;
            continue;
        }
        for (int level = 0; level < 2; ++level) {
            int s = level == 0 ? cut_samples : sc;
            double w = h * h / (s * s);
            Eigen::MatrixXd& m = level == 0 ? r.fine : r.coarse;
            double& vol = level == 0 ? r.vol_fine : r.vol_coarse;
            for (int b = 0; b < s; ++b)
                for (int a = 0; a < s; ++a) {
                    Point p{lo.x + (a + 0.5) * h / s, lo.y + (b + 0.5) * h / s};
                    if (!dom.contains(p)) continue;
                    accumulate_point(forms, p, w, m, buf);
                    vol += w;
                }
        }
    }
    return r;
}

SigmaQuadrature finish_quadrature(const std::vector<RowSums>& rows, int k) {
    Eigen::MatrixXd fine = Eigen::MatrixXd::Zero(k, k), coarse = Eigen::MatrixXd::Zero(k, k);
    double vf = 0.0, vc = 0.0;
    for (const RowSums& r : rows) {
        if (r.fine.size() == 0) continue;
        fine += r.fine;
        coarse += r.coarse;
        vf += r.vol_fine;
        vc += r.vol_coarse;
    }
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            fine(i, j) = fine(j, i);
            coarse(i, j) = coarse(j, i);
        }
    const double c = 8.0 * M_PI * M_PI;
    SigmaQuadrature q;
    q.volume = vf;
    q.gram_A = (c / vf) * fine;
    q.sigma = q.gram_A / c;
    q.error = (fine / vf - coarse / vc).cwiseAbs().maxCoeff();
    return q;
}

}  // namespace

SigmaQuadrature sigma_quadrature(const Grid& grid, const std::vector<OneForm>& forms, int cut_samples) {
    std::vector<RowSums> rows(grid.ny());
#pragma omp parallel for schedule(dynamic, 4)
    for (int j = 0; j < grid.ny() - 1; ++j) rows[j] = quadrature_row(grid, forms, j, cut_samples);
    return finish_quadrature(rows, static_cast<int>(forms.size()));
}

SigmaQuadrature sigma_quadrature_serial(const Grid& grid, const std::vector<OneForm>& forms, int cut_samples) {
    std::vector<RowSums> rows(grid.ny());
    for (int j = 0; j < grid.ny() - 1; ++j) rows[j] = quadrature_row(grid, forms, j, cut_samples);
    return finish_quadrature(rows, static_cast<int>(forms.size()));
}

Eigen::MatrixXd covariance_matrix(const FormBasis& basis) {
    return sigma_quadrature(*basis.grid, basis.forms).sigma;
}

Eigen::MatrixXd gram_I_neumann(const FormBasis& basis) {
    if (!basis.grid->domain().all_neumann())
        throw std::invalid_argument("gram_I_neumann needs an all-Neumann domain");
    return sigma_quadrature(*basis.grid, basis.forms).gram_A;
}

double tangential_defect(const OneForm& form, const PlanarDomain& domain, int samples) {
    double worst = 0.0;
    for (int c = 0; c < domain.num_components(); ++c) {
        const Circle& circ = domain.component(c);
        for (int s = 0; s < samples; ++s) {
            double th = 2.0 * M_PI * (s + 0.5) / samples;
            Point dir{std::cos(th), std::sin(th)};
            // a hair inside M so the bilinear cell is well defined
            double r = circ.radius * (c == 0 ? 1.0 - 1e-9 : 1.0 + 1e-9);
            Point p = circ.center + r * dir;
            if (!domain.contains(p)) continue;
            worst = std::max(worst, std::abs(dot(form(p), domain.outward_normal(c, p))));
        }
    }
    return worst;
}

// ---------------------------------------------------------------- dual basis

FormBasis dual_basis(const PlanarDomain& domain, std::shared_ptr<const Grid> grid) {
    const int k = domain.rank();
    if (k == 0) throw BasisError("domain has no holes: the space of harmonic forms is zero");
    FormBasis B;
    B.grid = grid;

    std::vector<Point> poles;
    std::vector<OneForm> raw;
    std::vector<std::shared_ptr<const GridPotential>> pots;
    for (const Circle& c : domain.holes()) poles.push_back(c.center);
    for (int j = 0; j < k; ++j) {
        NeumannPotential sol = solve_neumann_potential(grid, tau_form(poles[j]));
        B.potential_residual = std::max(B.potential_residual, sol.residual);
        auto pot = std::make_shared<const GridPotential>(std::move(sol.field));
        pots.push_back(pot);
        raw.emplace_back(std::vector<Point>{poles[j]}, std::vector<double>{1.0}, pot);
    }
    for (int i = 0; i < k; ++i) B.loops.push_back(generator_loop(domain, i));

    B.raw_periods.resize(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) B.raw_periods(i, j) = loop_integral(raw[j], B.loops[i], domain);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B.raw_periods);
    double smin = svd.singularValues().minCoeff();
    if (!(smin > 1e-8 * std::max(1.0, svd.singularValues().maxCoeff())))
        throw BasisError("period matrix is singular (smallest singular value " + std::to_string(smin) + ")");
    Eigen::MatrixXd C = B.raw_periods.inverse();

    std::vector<const GridPotential*> fields;
    for (const auto& p : pots) fields.push_back(p.get());
    for (int j = 0; j < k; ++j) {
        std::vector<double> w(k);
        for (int m = 0; m < k; ++m) w[m] = C(m, j);
        auto pot = std::make_shared<const GridPotential>(GridPotential::combine(fields, w));
        B.forms.emplace_back(poles, w, pot);
    }
    B.periods.resize(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) B.periods(i, j) = loop_integral(B.forms[j], B.loops[i], domain);

    SigmaQuadrature q = sigma_quadrature(*grid, B.forms);
    B.gram_A = q.gram_A;
    B.sigma = q.sigma;
    B.volume = q.volume;
    B.quadrature_error = q.error;
    return B;
}

}  // namespace coverlab
