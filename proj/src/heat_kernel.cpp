#include "coverlab/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

namespace coverlab {

std::complex<double> twisted_kernel(const TwistedOperator& op, double t, int x, int y) {
    if (!(t > 0.0)) throw std::invalid_argument("kernel time must be positive");
    EigenResult e0 = principal_eigenpair(op, 0);
    Spectrum s = low_spectrum(op, e0.mu + 30.0 / t, 1, 0);
    cplx acc = 0.0;
    for (Eigen::Index j = 0; j < s.mu.size(); ++j)
        acc += std::exp(-s.mu[j] * t) * s.phi(x, j) * std::conj(s.phi(y, j));
    return acc;
}

CoverKernel::CoverKernel(std::shared_ptr<const Grid> grid, std::shared_ptr<const EdgeForm> form,
                         std::vector<int> probes, double t_min, int n_quad, int anchor)
    : grid_(std::move(grid)), form_(std::move(form)), probes_(std::move(probes)), t_min_(t_min), n_quad_(n_quad) {
    if (!form_ || form_->poles.size() != 1) throw std::invalid_argument("cover kernel needs a single-hole form");
    if (!(t_min_ > 0.0)) throw std::invalid_argument("t_min must be positive");
    if (n_quad_ < 2 || n_quad_ % 2) throw std::invalid_argument("n_quad must be even");
    lambda0_ = principal_eigenpair(assemble(grid_, form_, 0.0)).mu;
    cutoff_ = lambda0_ + 30.0 / t_min_;
    mu_.resize(n_quad_);
    at_probes_.resize(n_quad_);
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 1)
    for (int q = 0; q < n_quad_; ++q) {
        try {
            double s = static_cast<double>(q) / n_quad_;
            Spectrum sp = low_spectrum(assemble(grid_, form_, s), cutoff_, 1, anchor);
            mu_[q] = sp.mu;
            Eigen::MatrixXcd P(probes_.size(), sp.mu.size());
            for (std::size_t i = 0; i < probes_.size(); ++i) P.row(i) = sp.phi.row(probes_[i]);
            at_probes_[q] = P;
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
}

int CoverKernel::probe_index(int node) const {
    auto it = std::find(probes_.begin(), probes_.end(), node);
    if (it == probes_.end()) throw std::invalid_argument("node is not a probe of this kernel");
    return static_cast<int>(it - probes_.begin());
}

std::complex<double> CoverKernel::twisted(int q, double t, int x, int y) const {
    if (t < t_min_ * (1.0 - 1e-12)) throw std::invalid_argument("t below the time the modes were chosen for");
    int ix = probe_index(x), iy = probe_index(y);
    cplx acc = 0.0;
    for (Eigen::Index j = 0; j < mu_[q].size(); ++j)
        acc += std::exp(-mu_[q][j] * t) * at_probes_[q](ix, j) * std::conj(at_probes_[q](iy, j));
    return acc;
}

KernelEstimate CoverKernel::value(double t, int x, int y, int n) const {
    KernelEstimate k;
    k.t = t;
    k.x = x;
    k.y = y;
    k.n = n;
    const double xi_xy = xi(x, y);
    cplx full = 0.0, half = 0.0;
    for (int q = 0; q < n_quad_; ++q) {
        double s = static_cast<double>(q) / n_quad_;
        cplx term = twisted(q, t, x, y) * std::polar(1.0, -2.0 * M_PI * s * (n + xi_xy));
        full += term;
        if (q % 2 == 0) half += term;
    }
    full /= static_cast<double>(n_quad_);
    half /= static_cast<double>(n_quad_ / 2);
    k.value = full.real();
    k.imag = full.imag();
    k.quad_error = std::abs(full - half);
    double pmax = 0.0;
    for (const auto& P : at_probes_) pmax = std::max(pmax, P.cwiseAbs2().maxCoeff());
    k.trunc_error = grid_->num_active() * pmax * std::exp(-cutoff_ * t);
    return k;
}

double base_consistency(const CoverKernel& K, double t, int x, int y, int sheets) {
    double sum = 0.0;
    for (int n = -sheets; n <= sheets; ++n) sum += K.value(t, x, y, n).value;
    return std::abs(sum - K.twisted(0, t, x, y).real());
}

int sheets_needed(double I, double t, double tail) {
    // exp(-2 pi^2 N^2 / (I t)) < tail, plus the shift by xi
    return static_cast<int>(std::ceil(std::sqrt(I * t * std::log(1.0 / tail) / (2.0 * M_PI * M_PI)))) + 2;
}

double AsymptoticProfile::d2(const Eigen::VectorXd& n) const {
    Eigen::VectorXd v = n + xi;
    return v.dot(A_inv * v);
}

double AsymptoticProfile::predicted(double t, const Eigen::VectorXd& n) const {
    return C_I * std::exp(-2.0 * M_PI * M_PI * d2(n) / t);
}

AsymptoticProfile asymptotic_profile(const Eigen::MatrixXd& A, double lambda0, double phi0_x, double phi0_y,
                                     const Eigen::VectorXd& xi) {
    AsymptoticProfile p;
    p.k = static_cast<int>(A.rows());
    if (A.cols() != p.k || xi.size() != p.k) throw std::invalid_argument("profile inputs have mismatched sizes");
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("A is not positive definite");
    p.A = A;
    p.A_inv = llt.solve(Eigen::MatrixXd::Identity(p.k, p.k));
    p.lambda0 = lambda0;
    p.xi = xi;
    p.C_I = std::pow(2.0 * M_PI, 0.5 * p.k) / std::sqrt(A.determinant()) * phi0_x * phi0_y;
    return p;
}

std::vector<AsymptoticRow> asymptotic_check(const CoverKernel& K, const AsymptoticProfile& P,
                                            const std::vector<double>& ts, int x, int y,
                                            const std::vector<int>& sheets) {
    std::vector<AsymptoticRow> rows;
    for (double t : ts)
        for (int n : sheets) {
            AsymptoticRow r;
            r.t = t;
            r.n = n;
            double h = K.value(t, x, y, n).value;
            r.scaled = std::pow(t, 0.5 * P.k) * std::exp(P.lambda0 * t) * h;
            r.predicted = P.predicted(t, Eigen::VectorXd::Constant(1, n));
            r.diff = std::abs(r.scaled - r.predicted);
            rows.push_back(r);
        }
    return rows;
}

SheetProfile sheet_profile(const CoverKernel& K, double t, int x, int y, int sheets) {
    SheetProfile p;
    double m1 = 0.0, m2 = 0.0;
    for (int n = -sheets; n <= sheets; ++n) {
        double v = K.value(t, x, y, n).value;
        p.values.push_back(v);
        p.mass += v;
        m1 += n * v;
        m2 += static_cast<double>(n) * n * v;
    }
    p.mean = m1 / p.mass;
    p.variance = m2 / p.mass - p.mean * p.mean;
    return p;
}

}  // namespace coverlab
