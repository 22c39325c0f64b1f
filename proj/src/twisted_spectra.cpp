#include "coverlab/twisted_spectra.hpp"

#include <cmath>

#include <Eigen/SparseCholesky>

namespace coverlab {

double EdgeForm::fundamental_difference(int a, int b) const {
    Point pa = grid->node(a), pb = grid->node(b);
    double s = potential[b] - potential[a];
    for (std::size_t m = 0; m < poles.size(); ++m)
        s += weights[m] * (branch_angle(poles[m], pb) - branch_angle(poles[m], pa));
    return s;
}

EdgeForm lattice_form(std::shared_ptr<const Grid> grid, const OneForm& omega) {
    EdgeForm f;
    f.grid = grid;
    f.poles = omega.poles();
    f.weights = omega.weights();
    const int n = grid->num_active();
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
    if (omega.potential())
        for (int a = 0; a < n; ++a) phi[a] = omega.potential()->node_value(a);

    for (int a = 0; a < n; ++a)
        for (int d : {0, 2}) {
            int b = grid->neighbor(a, d);
            if (b < 0) continue;
            f.tail.push_back(a);
            f.head.push_back(b);
            f.alpha.push_back(omega.analytic_increment(grid->node(a), grid->node(b)) + phi[b] - phi[a]);
        }

    // Coulomb gauge: alpha += d psi with L psi = div alpha, node 0 pinned
    Eigen::VectorXd div = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> trip;
    for (int e = 0; e < f.num_edges(); ++e) {
        int a = f.tail[e], b = f.head[e];
        div[a] += f.alpha[e];
        div[b] -= f.alpha[e];
        if (a > 0) trip.emplace_back(a - 1, a - 1, 1.0);
        if (b > 0) trip.emplace_back(b - 1, b - 1, 1.0);
        if (a > 0 && b > 0) {
            trip.emplace_back(a - 1, b - 1, -1.0);
            trip.emplace_back(b - 1, a - 1, -1.0);
        }
    }
    Eigen::SparseMatrix<double> L(n - 1, n - 1);
    L.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(L);
    if (ldlt.info() != Eigen::Success) throw AssemblyError("lattice graph Laplacian is singular (grid disconnected?)");
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(n);
    psi.tail(n - 1) = ldlt.solve(div.tail(n - 1));
    for (int e = 0; e < f.num_edges(); ++e) f.alpha[e] += psi[f.head[e]] - psi[f.tail[e]];
    f.potential = phi + psi;
    f.potential.array() -= f.potential.mean();
    return f;
}

EdgeForm scaled(const EdgeForm& f, double c) {
    EdgeForm g = f;
    for (double& a : g.alpha) a *= c;
    for (double& w : g.weights) w *= c;
    g.potential *= c;
    return g;
}

double TwistedOperator::hermitian_defect() const {
    CSparse D = CSparse(matrix.adjoint()) - matrix;
    double m = 0.0;
    for (int k = 0; k < D.outerSize(); ++k)
        for (CSparse::InnerIterator it(D, k); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

namespace {

CSparse build(const Grid& grid, const EdgeForm* form, double t) {
    const int n = grid.num_active();
    const double ih2 = 1.0 / (grid.h() * grid.h());
    const PlanarDomain& dom = grid.domain();
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(5 * static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
        int diag = 0;
        for (int d = 0; d < Grid::kDirs; ++d) {
            if (grid.neighbor(a, d) >= 0) {
                ++diag;
            } else if (dom.component(grid.crossed_component(a, d)).bc == BoundaryCondition::dirichlet) {
                ++diag;
            }
        }
        trip.emplace_back(a, a, cplx(diag * ih2, 0.0));
    }
    if (form) {
        for (int e = 0; e < form->num_edges(); ++e) {
            double th = 2.0 * M_PI * t * form->alpha[e];
            cplx z(-std::cos(th) * ih2, -std::sin(th) * ih2);
            trip.emplace_back(form->tail[e], form->head[e], z);
            trip.emplace_back(form->head[e], form->tail[e], std::conj(z));
        }
    } else {
        for (int a = 0; a < n; ++a)
            for (int d : {0, 2}) {
                int b = grid.neighbor(a, d);
                if (b < 0) continue;
                trip.emplace_back(a, b, cplx(-ih2, 0.0));
                trip.emplace_back(b, a, cplx(-ih2, 0.0));
            }
    }
    CSparse M(n, n);
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

}  // namespace

TwistedOperator assemble(std::shared_ptr<const Grid> grid, std::shared_ptr<const EdgeForm> form, double t) {
    if (form && form->grid.get() != grid.get()) throw AssemblyError("form lives on a different grid");
    TwistedOperator op;
    op.grid = grid;
    op.form = form;
    op.t = t;
    op.matrix = build(*grid, form.get(), t);
    double scale = 8.0 / (grid->h() * grid->h());
    if (op.hermitian_defect() > 1e-12 * scale) throw AssemblyError("assembled operator is not Hermitian");
    return op;
}

TwistedOperator assemble_untwisted(std::shared_ptr<const Grid> grid) { return assemble(grid, nullptr, 0.0); }

namespace {

void fix_phase(Eigen::Ref<Eigen::VectorXcd> v, int anchor) {
    cplx ref = anchor >= 0 ? v[anchor] : v.sum();
    if (std::abs(ref) < 1e-12 * v.norm()) {
        Eigen::Index i;
        v.cwiseAbs().maxCoeff(&i);
        ref = v[i];
    }
    v *= std::conj(ref) / std::abs(ref);
}

}  // namespace

Spectrum low_spectrum(const TwistedOperator& op, double cutoff, int nev, int anchor) {
    LanczosOptions opt;
    opt.nev = nev;
    opt.cutoff = cutoff;
    EigenPairs p = lowest_eigenpairs(op.matrix, opt);
    Spectrum s;
    s.mu = p.values;
    s.residuals = p.residuals;
    s.phi = p.vectors / op.grid->h();
    for (Eigen::Index j = 0; j < s.phi.cols(); ++j) fix_phase(s.phi.col(j), anchor);
    return s;
}

EigenResult principal_eigenpair(const TwistedOperator& op, int anchor, const LanczosOptions& opt_in) {
    LanczosOptions opt = opt_in;
    opt.nev = std::max(1, opt.nev);
    EigenPairs p = lowest_eigenpairs(op.matrix, opt);
    EigenResult r;
    r.mu = p.values[0];
    r.residual = p.residuals[0];
    r.iterations = p.iterations;
    r.phi = p.vectors.col(0) / op.grid->h();
    if (anchor < 0 && op.t == 0.0) {
        fix_phase(r.phi, -1);
        // a ground state has one sign; clean rounding noise in the imaginary part
        r.phi = r.phi.real().cast<cplx>();
    } else {
        fix_phase(r.phi, std::max(anchor, 0));
    }
    return r;
}

std::vector<CurvePoint> eigenvalue_curve(std::shared_ptr<const Grid> grid, std::shared_ptr<const EdgeForm> form,
                                         const std::vector<double>& ts) {
    std::vector<CurvePoint> out(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        TwistedOperator op = assemble(grid, form, ts[i]);
        EigenResult r = principal_eigenpair(op, 0);
        out[i] = {ts[i], r.mu, r.residual};
    }
    return out;
}

namespace {

// b_a = (2 pi / h^2) sum_b alpha_ab phi0_b, which approximates 4 pi omega . grad phi0
Eigen::VectorXd twist_source(const EdgeForm& f, const Eigen::VectorXd& phi0) {
    const double h = f.grid->h();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(phi0.size());
    for (int e = 0; e < f.num_edges(); ++e) {
        b[f.tail[e]] += f.alpha[e] * phi0[f.head[e]];
        b[f.head[e]] -= f.alpha[e] * phi0[f.tail[e]];
    }
    return (2.0 * M_PI / (h * h)) * b;
}

// same sum with |alpha| |phi0|: the size rounding errors in b are measured against
double twist_source_scale(const EdgeForm& f, const Eigen::VectorXd& phi0) {
    const double h = f.grid->h();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(phi0.size());
    for (int e = 0; e < f.num_edges(); ++e) {
        b[f.tail[e]] += std::abs(f.alpha[e] * phi0[f.head[e]]);
        b[f.head[e]] += std::abs(f.alpha[e] * phi0[f.tail[e]]);
    }
    return (2.0 * M_PI / (h * h)) * b.norm();
}

}  // namespace

GOmegaSolution solve_g_omega(const TwistedOperator& op0, const EigenResult& eig0, const EdgeForm& form, double tol) {
    if (op0.t != 0.0) throw std::invalid_argument("g solve needs the untwisted operator");
    const Eigen::VectorXd phi0 = eig0.phi.real();
    const double h = op0.grid->h();
    Eigen::VectorXd u = phi0 * h;  // unit Euclidean vector
    Eigen::SparseMatrix<double> A = op0.matrix.real();
    Eigen::VectorXd b = twist_source(form, phi0);

    GOmegaSolution s;
    double bn = b.norm(), scale = twist_source_scale(form, phi0);
    s.solvability = scale > 0.0 ? std::abs(u.dot(b)) / scale : 0.0;
    if (s.solvability > 1e-8) throw ConsistencyError("right-hand side is not orthogonal to phi0");
    s.g = Eigen::VectorXd::Zero(phi0.size());
    // constant phi0 against a divergence-free alpha: the source vanishes up to rounding
    if (bn <= 1e-12 * scale) return s;

    auto project = [&](Eigen::VectorXd& v) { v -= u * u.dot(v); };
    auto apply = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd w = A * v - eig0.mu * v;
        project(w);
        return w;
    };
    Eigen::VectorXd rhs = b;
    project(rhs);
    Eigen::VectorXd dinv = A.diagonal().cwiseInverse();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
    Eigen::VectorXd r = rhs;
    Eigen::VectorXd z = dinv.cwiseProduct(r);
    project(z);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    const double rn0 = rhs.norm();
    const int max_iter = 20 * static_cast<int>(b.size());
    int it = 0;
    for (; it < max_iter && r.norm() > tol * rn0; ++it) {
        Eigen::VectorXd Ap = apply(p);
        double alpha = rz / p.dot(Ap);
        x += alpha * p;
        r -= alpha * Ap;
        if (it % 50 == 49) r = rhs - apply(x);  // keep the recurrence honest
        z = dinv.cwiseProduct(r);
        project(z);
        double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    project(x);
    s.g = x;
    s.iterations = it;
    s.residual = (rhs - apply(x)).norm() / rn0;
    if (s.residual > std::max(tol, 1e-8)) throw SolverError("g solve did not converge");
    return s;
}

double quadratic_form_I(const EigenResult& eig0, const EdgeForm& form, const Eigen::VectorXd& g) {
    const Eigen::VectorXd phi0 = eig0.phi.real();
    double first = 0.0, second = 0.0;
    for (int e = 0; e < form.num_edges(); ++e) {
        int a = form.tail[e], b = form.head[e];
        double al = form.alpha[e];
        first += al * al * phi0[a] * phi0[b];
        // phi0_a alpha_ab g_b + phi0_b alpha_ba g_a
        second += al * (phi0[a] * g[b] - phi0[b] * g[a]);
    }
    return 8.0 * M_PI * M_PI * first + 4.0 * M_PI * second;
}

Eigen::MatrixXd gram_I(const TwistedOperator& op0, const EigenResult& eig0, const std::vector<EdgeForm>& forms) {
    const int k = static_cast<int>(forms.size());
    const Eigen::VectorXd phi0 = eig0.phi.real();
    const double h = op0.grid->h();
    std::vector<Eigen::VectorXd> g(k), b(k);
    for (int i = 0; i < k; ++i) {
        g[i] = solve_g_omega(op0, eig0, forms[i]).g;
        b[i] = twist_source(forms[i], phi0);
    }
    Eigen::MatrixXd G(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            double first = 0.0;
            for (int e = 0; e < forms[i].num_edges(); ++e)
                first += forms[i].alpha[e] * forms[j].alpha[e] * phi0[forms[i].tail[e]] * phi0[forms[i].head[e]];
            G(i, j) = 8.0 * M_PI * M_PI * first - 2.0 * h * h * b[i].dot(g[j]);
        }
    return 0.5 * (G + G.transpose());
}

HessianCheck hessian_check(std::shared_ptr<const Grid> grid, std::shared_ptr<const EdgeForm> form, double t) {
    if (!(t > 0.0 && t <= 0.2)) throw std::invalid_argument("hessian check needs t in (0, 0.2]");
    HessianCheck c;
    TwistedOperator op0 = assemble(grid, form, 0.0);
    EigenResult e0 = principal_eigenpair(op0);
    c.lambda0 = e0.mu;
    c.mu_t = principal_eigenpair(assemble(grid, form, t), 0).mu;
    c.mu_half = principal_eigenpair(assemble(grid, form, 0.5 * t), 0).mu;
    c.q_t = 2.0 * (c.mu_t - c.lambda0) / (t * t);
    c.q_half = 2.0 * (c.mu_half - c.lambda0) / (0.25 * t * t);
    c.richardson = (4.0 * c.q_half - c.q_t) / 3.0;
    GOmegaSolution g = solve_g_omega(op0, e0, *form);
    c.I = quadratic_form_I(e0, *form, g.g);
    c.rel_error = std::abs(c.richardson - c.I) / c.I;
    return c;
}

}  // namespace coverlab
