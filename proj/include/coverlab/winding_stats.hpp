#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coverlab/harmonic_forms.hpp"
#include "coverlab/rbm.hpp"

namespace coverlab {

struct DriftEstimate {
    Eigen::VectorXd mean;  // mean of rho(T)/T
    Eigen::VectorXd se;    // jackknife standard error
    bool se_reliable = true;
};

DriftEstimate drift_estimate(const Eigen::MatrixXi& rho, double T);
DriftEstimate drift_estimate(const EnsembleResult& e);

struct CltTolerances {
    double drift_z = 3.0;
    double diag_rel = 0.10;
    double offdiag_frac = 0.10;  // of the geometric mean of the two diagonals
    double p_min = 0.01;
};

struct CltReport {
    double T = 0.0;
    int n = 0;
    Eigen::VectorXd mean;       // rho(T)/T
    Eigen::VectorXd mean_se;
    Eigen::VectorXd z;
    Eigen::MatrixXd cov;        // of rho(T)/sqrt(T)
    Eigen::MatrixXd target;
    Eigen::MatrixXd rel_error;  // diagonal: relative; off-diagonal: |diff| / sqrt(target_ii target_jj)
    double chi2 = 0.0;
    int chi2_df = 0;
    double p_value = 0.0;
    bool underflow = false;
    bool se_reliable = false;   // enough trajectories for the jackknife error
    CltTolerances tol;
    bool drift_pass = false, cov_pass = false, normality_pass = false;

    bool pass() const { return drift_pass && cov_pass && normality_pass; }
};

/// Drift, covariance and normality of the terminal windings against sigma.
/// Normality: Mahalanobis radius of (theta - mean)/sqrt(T) under sigma,
/// chi-square over `bins` equiprobable bins.
CltReport clt_covariance(const EnsembleResult& e, const Eigen::MatrixXd& sigma, const CltTolerances& tol = {},
                         int bins = 10);

struct QvCheck {
    Eigen::MatrixXd mean;     // mean over trajectories of qv_ij / T
    Eigen::MatrixXd se;
    Eigen::MatrixXd target;
    Eigen::VectorXd diag_rel_error;
    bool pass = false;
};

QvCheck ergodic_qv_check(const EnsembleResult& e, const Eigen::MatrixXd& sigma, double diag_rel = 0.05);

/// (1/T) sum omega_i . omega_j dt along a sampled path (left-point rule).
Eigen::MatrixXd path_qv_rate(const FormBasis& basis, const std::vector<Point>& path, double dt);

double annulus_sigma(double r1, double r2);
double wen_variance(double r0, double r1, double r2, double t);

struct SlopeFit {
    double slope = 0.0, intercept = 0.0, slope_se = 0.0;
};

/// Least squares y = a + b x.
SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// var(rho_c(t)) at each checkpoint, regressed on t.
SlopeFit variance_slope(const EnsembleResult& e, int component = 0);

/// Flat (statistic, value, target, tolerance, pass) rows for the report CSV.
struct ReportRow {
    std::string statistic;
    double value = 0.0, target = 0.0, tolerance = 0.0;
    bool pass = false;
};
std::vector<ReportRow> report_rows(const CltReport& r);

}  // namespace coverlab
