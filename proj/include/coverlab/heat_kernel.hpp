#pragma once

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "coverlab/twisted_spectra.hpp"

namespace coverlab {

/// Truncated spectral sum sum_j exp(-mu_j t) phi_j(x) conj(phi_j(y)) over
/// the modes of `op` below lambda_min + 30/t.
std::complex<double> twisted_kernel(const TwistedOperator& op, double t, int x, int y);

struct KernelEstimate {
    double t = 0.0;
    int x = -1, y = -1;       // active node indices
    int n = 0;                // sheet
    double value = 0.0;
    double imag = 0.0;        // imaginary residue of the quadrature
    double quad_error = 0.0;  // change against the rule with half the points
    double trunc_error = 0.0; // bound on the dropped modes
};

/// Heat kernel of the Z cover of a one-hole domain, from the twisted
/// kernels H_s on a uniform grid of s in [0, 1). The torus spectra are
/// computed once and cached at the probe nodes.
class CoverKernel {
public:
    CoverKernel(std::shared_ptr<const Grid> grid, std::shared_ptr<const EdgeForm> form, std::vector<int> probes,
                double t_min, int n_quad = 64, int anchor = 0);

    int n_quad() const { return n_quad_; }
    double t_min() const { return t_min_; }
    double lambda0() const { return lambda0_; }
    /// Modes kept at sample q.
    int modes(int q) const { return static_cast<int>(mu_[q].size()); }
    const EdgeForm& form() const { return *form_; }

    /// H_s(t, x, y) at s = q / n_quad; x, y must be probe nodes.
    std::complex<double> twisted(int q, double t, int x, int y) const;
    /// Period of the lattice form from x to y inside the fundamental domain.
    double xi(int x, int y) const { return form_->fundamental_difference(x, y); }
    /// Kernel from x to the copy of y on sheet n.
    KernelEstimate value(double t, int x, int y, int n) const;

private:
    int probe_index(int node) const;

    std::shared_ptr<const Grid> grid_;
    std::shared_ptr<const EdgeForm> form_;
    std::vector<int> probes_;
    double t_min_;
    int n_quad_;
    double lambda0_ = 0.0;
    double cutoff_ = 0.0;
    std::vector<Eigen::VectorXd> mu_;
    std::vector<Eigen::MatrixXcd> at_probes_;  // probes x modes
};

/// |sum_{|n|<=N} H^(t, x, g_n y) - H_0(t, x, y)|.
double base_consistency(const CoverKernel& K, double t, int x, int y, int sheets);

/// Smallest N with the Gaussian sheet tail below `tail` for the form I value.
int sheets_needed(double I, double t, double tail = 1e-10);

struct AsymptoticProfile {
    int k = 0;
    double lambda0 = 0.0;
    double C_I = 0.0;
    Eigen::MatrixXd A;
    Eigen::MatrixXd A_inv;
    Eigen::VectorXd xi;

    /// d_I(x, g_n y)^2 = (n + xi)^T A^{-1} (n + xi)
    double d2(const Eigen::VectorXd& n) const;
    double predicted(double t, const Eigen::VectorXd& n) const;
};

/// C_I = (2 pi)^{k/2} det(A)^{-1/2} phi0(x) phi0(y).
AsymptoticProfile asymptotic_profile(const Eigen::MatrixXd& A, double lambda0, double phi0_x, double phi0_y,
                                     const Eigen::VectorXd& xi);

struct AsymptoticRow {
    double t = 0.0;
    int n = 0;
    double scaled = 0.0;     // t^{k/2} exp(lambda0 t) H^
    double predicted = 0.0;  // C_I exp(-2 pi^2 d_I^2 / t)
    double diff = 0.0;
};

std::vector<AsymptoticRow> asymptotic_check(const CoverKernel& K, const AsymptoticProfile& P,
                                            const std::vector<double>& ts, int x, int y,
                                            const std::vector<int>& sheets);

struct SheetProfile {
    double mass = 0.0, mean = 0.0, variance = 0.0;
    std::vector<double> values;  // n = -N..N
};

SheetProfile sheet_profile(const CoverKernel& K, double t, int x, int y, int sheets);

}  // namespace coverlab
