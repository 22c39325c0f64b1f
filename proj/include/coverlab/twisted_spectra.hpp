#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "coverlab/geometry.hpp"
#include "coverlab/harmonic_forms.hpp"
#include "coverlab/sparse_eigen.hpp"

namespace coverlab {

class AssemblyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A 1-form restricted to the lattice: alpha_e is its integral along each
/// edge between active nodes, moved to the discrete Coulomb gauge
/// (sum of alpha over the edges at every node is zero). The gauge change
/// is exact, so periods over lattice cycles are those of the form.
struct EdgeForm {
    std::shared_ptr<const Grid> grid;
    std::vector<int> tail, head;     // edge e runs tail[e] -> head[e], tail < head
    std::vector<double> alpha;
    std::vector<Point> poles;
    std::vector<double> weights;
    /// alpha_e = sum_m w_m * turn about pole m + P(head) - P(tail)
    Eigen::VectorXd potential;

    int num_edges() const { return static_cast<int>(alpha.size()); }
    /// Integral from node a to node b along a path that avoids the branch cuts.
    double fundamental_difference(int a, int b) const;
};

EdgeForm lattice_form(std::shared_ptr<const Grid> grid, const OneForm& omega);
/// Same edge list with every alpha multiplied by c.
EdgeForm scaled(const EdgeForm& f, double c);

/// Discrete -H_{t omega}: the five-point Laplacian with Peierls phases
/// exp(2 pi i t alpha_e) on the edges. Neumann sides drop the missing edge;
/// Dirichlet sides keep it on the diagonal with zero value.
struct TwistedOperator {
    std::shared_ptr<const Grid> grid;
    std::shared_ptr<const EdgeForm> form;   // null for the untwisted operator
    double t = 0.0;
    CSparse matrix;

    double hermitian_defect() const;
};

TwistedOperator assemble(std::shared_ptr<const Grid> grid, std::shared_ptr<const EdgeForm> form, double t);
TwistedOperator assemble_untwisted(std::shared_ptr<const Grid> grid);

struct EigenResult {
    double mu = 0.0;
    Eigen::VectorXcd phi;       // L2-normalised: sum |phi|^2 h^2 = 1
    double residual = 0.0;      // of the unit-norm vector
    int iterations = 0;
};

/// Smallest eigenpair. At t = 0 the vector is made real and positive;
/// otherwise its value at `anchor` (default: node 0) is made real positive.
EigenResult principal_eigenpair(const TwistedOperator& op, int anchor = -1, const LanczosOptions& opt = {});

/// All pairs below `cutoff` (at least nev), L2-normalised, phase fixed at `anchor`.
struct Spectrum {
    Eigen::VectorXd mu;
    Eigen::MatrixXcd phi;
    Eigen::VectorXd residuals;
};
Spectrum low_spectrum(const TwistedOperator& op, double cutoff, int nev = 1, int anchor = 0);

struct CurvePoint {
    double t = 0.0, mu = 0.0, residual = 0.0;
};
std::vector<CurvePoint> eigenvalue_curve(std::shared_ptr<const Grid> grid, std::shared_ptr<const EdgeForm> form,
                                         const std::vector<double>& ts);

struct GOmegaSolution {
    Eigen::VectorXd g;          // L2 scaling, orthogonal to phi0
    double residual = 0.0;      // relative, of the projected system
    double solvability = 0.0;   // <phi0, rhs> / (|phi0| |rhs|)
    int iterations = 0;
};

/// Solves (A0 - lambda0) g = 4 pi (omega . grad phi0) on the complement of phi0.
GOmegaSolution solve_g_omega(const TwistedOperator& op0, const EigenResult& eig0, const EdgeForm& form,
                             double tol = 1e-10);

/// I(omega) = 8 pi^2 int |omega|^2 phi0^2 + 8 pi int phi0 omega . grad g, in lattice form.
double quadratic_form_I(const EigenResult& eig0, const EdgeForm& form, const Eigen::VectorXd& g);

/// Gram matrix of the I form over a list of lattice forms (polarisation).
Eigen::MatrixXd gram_I(const TwistedOperator& op0, const EigenResult& eig0, const std::vector<EdgeForm>& forms);

struct HessianCheck {
    double lambda0 = 0.0;
    double mu_t = 0.0, mu_half = 0.0;
    double q_t = 0.0, q_half = 0.0;   // 2 (mu - lambda0) / t^2
    double richardson = 0.0;
    double I = 0.0;
    double rel_error = 0.0;
};

HessianCheck hessian_check(std::shared_ptr<const Grid> grid, std::shared_ptr<const EdgeForm> form, double t);

}  // namespace coverlab
