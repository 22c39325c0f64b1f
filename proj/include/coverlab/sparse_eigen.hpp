#pragma once

#include <complex>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace coverlab {

using cplx = std::complex<double>;
using CSparse = Eigen::SparseMatrix<cplx>;

class EigenError : public std::runtime_error {
public:
    EigenError(const std::string& what, double last_residual)
        : std::runtime_error(what), last_residual(last_residual) {}
    double last_residual;
};

struct LanczosOptions {
    int block = 4;
    int nev = 1;                       // at least this many pairs
    double cutoff = std::numeric_limits<double>::infinity();  // and every pair below this value
    double tol = 1e-8;                 // residual <= tol * (|mu| + 1)
    double shift = -1.0;               // factor A - shift*I; must lie below the spectrum
    int max_dim = 160;
    int max_restarts = 30;
    int dense_below = 600;             // dense solver for small matrices
};

struct EigenPairs {
    Eigen::VectorXd values;     // ascending
    Eigen::MatrixXcd vectors;   // unit Euclidean norm columns
    Eigen::VectorXd residuals;  // ||A x - mu x||
    int iterations = 0;
};

/// Lowest eigenpairs of a Hermitian positive semi-definite sparse matrix by
/// shift-invert block Lanczos with full reorthogonalisation. The start block
/// is deterministic: the all-ones vector plus fixed pseudo-random columns.
EigenPairs lowest_eigenpairs(const CSparse& A, const LanczosOptions& opt = {});

/// Same pairs from a dense Hermitian eigensolver (reference for small problems).
EigenPairs lowest_eigenpairs_dense(const CSparse& A, const LanczosOptions& opt = {});

}  // namespace coverlab
