#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "coverlab/geometry.hpp"

namespace coverlab {

class SingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BasisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Angle form about `pole` as a vector field: (-(y-q), x-p) / (2 pi rho^2).
Point tau_vector(Point pole, Point p);

/// Exact change of arg(. - pole)/(2 pi) along the straight segment a -> b.
double angle_increment(Point pole, Point a, Point b);

/// arg(p - pole)/(2 pi) in (-1/2, 1/2], branch cut on the ray pointing in -x.
double branch_angle(Point pole, Point p);

/// Nodal scalar field on a grid's lattice. Active nodes carry solved values;
/// a band of ghost nodes outside M carries extrapolated values so the
/// bilinear interpolant is defined everywhere in M.
class GridPotential {
public:
    GridPotential(std::shared_ptr<const Grid> grid, std::vector<double> lattice_values,
                  std::vector<std::uint8_t> defined);

    const Grid& grid() const { return *grid_; }
    std::shared_ptr<const Grid> grid_ptr() const { return grid_; }
    double value(Point p) const;
    Point gradient(Point p) const;
    void value_and_gradient(Point p, double& v, Point& g) const;
    double node_value(int active) const;
    Eigen::VectorXd active_values() const;
    const std::vector<double>& lattice_values() const { return values_; }
    const std::vector<std::uint8_t>& defined() const { return defined_; }

    /// sum_i c_i * f_i over potentials living on the same grid.
    static GridPotential combine(const std::vector<const GridPotential*>& fields, const std::vector<double>& c);

private:
    void corners(Point p, int& i, int& j, double& u, double& v, const double** f) const;

    std::shared_ptr<const Grid> grid_;
    std::vector<double> values_;
    std::vector<std::uint8_t> defined_;
};

/// omega = sum_j c_j tau_j + d(phi).
class OneForm {
public:
    OneForm() = default;
    OneForm(std::vector<Point> poles, std::vector<double> weights, std::shared_ptr<const GridPotential> potential);

    const std::vector<Point>& poles() const { return poles_; }
    const std::vector<double>& weights() const { return weights_; }
    const GridPotential* potential() const { return potential_.get(); }
    std::shared_ptr<const GridPotential> potential_ptr() const { return potential_; }

    Point operator()(Point p) const;
    Point analytic(Point p) const;
    double potential_at(Point p) const { return potential_ ? potential_->value(p) : 0.0; }
    /// Line integral along the straight segment a -> b (exact for the analytic part).
    double increment(Point a, Point b) const;
    double analytic_increment(Point a, Point b) const;
    /// Integral along a path from x to y that does not cross any branch cut.
    double fundamental_difference(Point x, Point y) const;

private:
    std::vector<Point> poles_;
    std::vector<double> weights_;
    std::shared_ptr<const GridPotential> potential_;
};

OneForm tau_form(Point pole);

struct Loop {
    std::vector<Point> vertices;  // closed: last vertex connects back to the first

    static Loop circle(Point center, double radius, int segments = 720, bool ccw = true);
    Loop reversed() const;
};

/// Line integral over a closed polyline; throws GeometryError if any vertex or
/// segment sample leaves M.
double loop_integral(const OneForm& form, const Loop& loop, const PlanarDomain& domain);

struct NeumannPotential {
    GridPotential field;
    double residual = 0.0;          // max-norm of the five-point system residual
    double compatibility = 0.0;     // uniform source that made the discrete system solvable
};

/// Five-point Laplace solve for d(phi).nu = -tau.nu. Ghost nodes just outside M
/// are tied to the bilinear value at their mirror image across the circle;
/// mean-zero normalised. Boundary labels on the grid are ignored: the
/// tangential condition is imposed on every circle.
NeumannPotential solve_neumann_potential(std::shared_ptr<const Grid> grid, const OneForm& tau,
                                         double tol = 1e-13, int max_iter = 10);

struct FormBasis {
    std::shared_ptr<const Grid> grid;
    std::vector<OneForm> forms;
    std::vector<Loop> loops;
    Eigen::MatrixXd raw_periods;  // loops x raw forms tau_j + d phi_j
    Eigen::MatrixXd periods;      // loops x dual forms
    Eigen::MatrixXd gram_A;
    Eigen::MatrixXd sigma;
    double volume = 0.0;
    double quadrature_error = 0.0;
    double potential_residual = 0.0;

    int rank() const { return static_cast<int>(forms.size()); }
};

/// Generator loop around hole j: a circle halfway to the nearest other boundary.
Loop generator_loop(const PlanarDomain& domain, int hole);

FormBasis dual_basis(const PlanarDomain& domain, std::shared_ptr<const Grid> grid);

struct SigmaQuadrature {
    Eigen::MatrixXd gram_A;  // (8 pi^2 / vol) int w_i . w_j
    Eigen::MatrixXd sigma;   // gram_A / (8 pi^2)
    double volume = 0.0;
    double error = 0.0;      // change between two subsampling levels, max entry of sigma
};

/// Cell quadrature of w_i . w_j over M: interior cells by the 2x2 midpoint
/// rule, cut cells by area-weighted subsampling. OpenMP over lattice rows.
SigmaQuadrature sigma_quadrature(const Grid& grid, const std::vector<OneForm>& forms, int cut_samples = 8);
/// Same numbers, one thread, kept as the reference for the parallel version.
SigmaQuadrature sigma_quadrature_serial(const Grid& grid, const std::vector<OneForm>& forms, int cut_samples = 8);

Eigen::MatrixXd covariance_matrix(const FormBasis& basis);
Eigen::MatrixXd gram_I_neumann(const FormBasis& basis);

/// Largest |omega . nu| over the exact boundary circles, sampled at `samples` points each.
double tangential_defect(const OneForm& form, const PlanarDomain& domain, int samples = 720);

}  // namespace coverlab
