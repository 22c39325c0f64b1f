#include "coverlab/winding_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace coverlab {

DriftEstimate drift_estimate(const Eigen::MatrixXi& rho, double T) {
    const int n = static_cast<int>(rho.rows()), k = static_cast<int>(rho.cols());
    DriftEstimate d;
    d.mean = Eigen::VectorXd::Zero(k);
    d.se = Eigen::VectorXd::Zero(k);
    if (n == 0 || T <= 0.0) {
        d.se_reliable = false;
        return d;
    }
    Eigen::MatrixXd x = rho.cast<double>() / T;
    d.mean = x.colwise().mean().transpose();
    if (n < 2) {
        d.se.setConstant(std::nan(""));
        d.se_reliable = false;
        return d;
    }
    // leave-one-out means
    for (int c = 0; c < k; ++c) {
        double total = x.col(c).sum(), acc = 0.0;
        for (int i = 0; i < n; ++i) {
            double loo = (total - x(i, c)) / (n - 1);
            acc += (loo - d.mean[c]) * (loo - d.mean[c]);
        }
        d.se[c] = std::sqrt(acc * (n - 1) / n);
    }
    d.se_reliable = n >= 100;
    return d;
}

DriftEstimate drift_estimate(const EnsembleResult& e) { return drift_estimate(e.rho, e.T); }

namespace {

Eigen::MatrixXd sample_cov(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
    return (c.transpose() * c) / std::max<Eigen::Index>(1, x.rows() - 1);
}

}  // namespace

CltReport clt_covariance(const EnsembleResult& e, const Eigen::MatrixXd& sigma, const CltTolerances& tol, int bins) {
    const int k = e.k, n = e.n_traj();
    if (sigma.rows() != k || sigma.cols() != k) throw std::invalid_argument("sigma has the wrong size");
    CltReport r;
    r.T = e.T;
    r.n = n;
    r.target = sigma;
    r.tol = tol;
    DriftEstimate d = drift_estimate(e);
    r.mean = d.mean;
    r.mean_se = d.se;
    r.z = Eigen::VectorXd::Zero(k);
    r.se_reliable = d.se_reliable;
    r.drift_pass = d.se_reliable;
    for (int c = 0; c < k; ++c) {
        if (d.se[c] > 0.0) r.z[c] = d.mean[c] / d.se[c];
        else if (d.mean[c] != 0.0) r.z[c] = INFINITY;
        if (!(std::abs(r.z[c]) < tol.drift_z)) r.drift_pass = false;
    }

    const double sT = e.T > 0.0 ? std::sqrt(e.T) : 0.0;
    r.cov = sT > 0.0 ? Eigen::MatrixXd(sample_cov(e.rho.cast<double>() / sT)) : Eigen::MatrixXd::Zero(k, k);
    r.rel_error = Eigen::MatrixXd::Zero(k, k);
    r.cov_pass = true;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            if (i == j) {
                r.rel_error(i, i) = std::abs(r.cov(i, i) - sigma(i, i)) / sigma(i, i);
                if (!(r.rel_error(i, i) < tol.diag_rel)) r.cov_pass = false;
            } else {
                r.rel_error(i, j) = std::abs(r.cov(i, j) - sigma(i, j)) / std::sqrt(sigma(i, i) * sigma(j, j));
                if (!(r.rel_error(i, j) < tol.offdiag_frac)) r.cov_pass = false;
            }
        }

    // a covariance far below the target means the horizon is too short to test anything
    r.underflow = !(sT > 0.0) || r.cov.diagonal().maxCoeff() < 1e-6 * sigma.diagonal().maxCoeff() || n < bins * 5;
    r.chi2_df = bins - 1;
    if (r.underflow) {
        r.cov_pass = false;
        r.normality_pass = false;
        r.p_value = std::nan("");
        r.chi2 = std::nan("");
        return r;
    }

    Eigen::MatrixXd x = e.theta / sT;
    Eigen::RowVectorXd mu = x.colwise().mean();
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("sigma is not positive definite");
    boost::math::chi_squared dist_k(k);
    std::vector<double> edges(bins + 1);
    edges[0] = 0.0;
    edges[bins] = INFINITY;
    for (int b = 1; b < bins; ++b) edges[b] = boost::math::quantile(dist_k, static_cast<double>(b) / bins);
    std::vector<int> counts(bins, 0);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd v = (x.row(i) - mu).transpose();
        double d2 = v.dot(llt.solve(v));
        int b = static_cast<int>(std::upper_bound(edges.begin() + 1, edges.end() - 1, d2) - (edges.begin() + 1));
        ++counts[b];
    }
    double expect = static_cast<double>(n) / bins;
    r.chi2 = 0.0;
    for (int c : counts) r.chi2 += (c - expect) * (c - expect) / expect;
    r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.chi2_df), r.chi2));
    r.normality_pass = r.p_value > tol.p_min;
    return r;
}

QvCheck ergodic_qv_check(const EnsembleResult& e, const Eigen::MatrixXd& sigma, double diag_rel) {
    const int k = e.k, n = e.n_traj();
    if (e.qv.cols() != k * k) throw std::invalid_argument("ensemble has no quadratic-variation columns");
    if (!(e.T > 0.0)) throw std::invalid_argument("quadratic-variation rate needs T > 0");
    QvCheck q;
    q.target = sigma;
    q.mean.resize(k, k);
    q.se.resize(k, k);
    for (int c = 0; c < k * k; ++c) {
        Eigen::VectorXd v = e.qv.col(c) / e.T;
        double m = v.mean();
        double var = n > 1 ? (v.array() - m).square().sum() / (n - 1) : 0.0;
        q.mean(c / k, c % k) = m;
        q.se(c / k, c % k) = std::sqrt(var / n);
    }
    q.diag_rel_error.resize(k);
    q.pass = true;
    for (int i = 0; i < k; ++i) {
        q.diag_rel_error[i] = std::abs(q.mean(i, i) - sigma(i, i)) / sigma(i, i);
        if (!(q.diag_rel_error[i] < diag_rel)) q.pass = false;
    }
    return q;
}

Eigen::MatrixXd path_qv_rate(const FormBasis& basis, const std::vector<Point>& path, double dt) {
    const int k = basis.rank();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(k, k);
    if (path.size() < 2) return acc;
    std::vector<Point> w(k);
    for (std::size_t s = 0; s + 1 < path.size(); ++s) {
        for (int i = 0; i < k; ++i) w[i] = basis.forms[i](path[s]);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) acc(i, j) += dot(w[i], w[j]) * dt;
    }
    return acc / (dt * static_cast<double>(path.size() - 1));
}

double annulus_sigma(double r1, double r2) {
    if (!(r1 > 0.0 && r1 < r2)) throw std::domain_error("annulus radii must satisfy 0 < r1 < r2");
    return std::log(r2 / r1) / (2.0 * M_PI * M_PI * (r2 * r2 - r1 * r1));
}

double wen_variance(double r0, double r1, double r2, double t) {
    if (!(r1 > 0.0 && r1 < r2)) throw std::domain_error("annulus radii must satisfy 0 < r1 < r2");
    if (r0 < r1 || r0 > r2) throw std::domain_error("start radius outside [r1, r2]");
    double a = std::log(r2 / r1), b = std::log(r1 / r0);
    return (a * a - b * b) / (4.0 * M_PI * M_PI) +
           annulus_sigma(r1, r2) * (t - 0.5 * (r2 * r2 - r0 * r0) + r1 * r1 * std::log(r2 / r0));
}

SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("line fit needs at least two points");
    const int n = static_cast<int>(x.size());
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd Y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = x[i];
        Y[i] = y[i];
    }
    Eigen::Vector2d beta = X.colPivHouseholderQr().solve(Y);
    SlopeFit f;
    f.intercept = beta[0];
    f.slope = beta[1];
    if (n > 2) {
        double s2 = (Y - X * beta).squaredNorm() / (n - 2);
        Eigen::Matrix2d cov = s2 * (X.transpose() * X).inverse();
        f.slope_se = std::sqrt(cov(1, 1));
    }
    return f;
}

SlopeFit variance_slope(const EnsembleResult& e, int component) {
    std::vector<double> t, v;
    for (const Checkpoint& c : e.checkpoints) {
        if (c.t <= 0.0) continue;
        Eigen::VectorXd x = c.rho.col(component).cast<double>();
        double m = x.mean();
        t.push_back(c.t);
        v.push_back((x.array() - m).square().sum() / std::max<Eigen::Index>(1, x.size() - 1));
    }
    return fit_line(t, v);
}

std::vector<ReportRow> report_rows(const CltReport& r) {
    std::vector<ReportRow> rows;
    const int k = static_cast<int>(r.mean.size());
    for (int i = 0; i < k; ++i) {
        std::string s = std::to_string(i + 1);
        rows.push_back({"drift_z_" + s, r.z[i], 0.0, r.tol.drift_z, r.se_reliable && std::abs(r.z[i]) < r.tol.drift_z});
    }
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            std::string s = std::to_string(i + 1) + std::to_string(j + 1);
            double tol = i == j ? r.tol.diag_rel : r.tol.offdiag_frac;
            rows.push_back({"cov_" + s, r.cov(i, j), r.target(i, j), tol, r.rel_error(i, j) < tol});
        }
    rows.push_back({"normality_p", r.p_value, 0.0, r.tol.p_min, r.normality_pass});
    return rows;
}

}  // namespace coverlab
