#include "coverlab/sparse_eigen.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>

#include "coverlab/rng.hpp"

namespace coverlab {

namespace {

int wanted(const Eigen::VectorXd& vals, const LanczosOptions& opt) {
    int n = static_cast<int>(vals.size());
    int below = 0;
    while (below < n && vals[below] <= opt.cutoff) ++below;
    // one pair past the cutoff shows nothing below it was skipped
    int w = std::isfinite(opt.cutoff) ? below + 1 : 0;
    return std::min(n, std::max(opt.nev, w));
}

EigenPairs select(const Eigen::VectorXd& vals, const Eigen::MatrixXcd& vecs, const Eigen::VectorXd& res,
                  const LanczosOptions& opt) {
    int n = static_cast<int>(vals.size());
    int below = 0;
    while (below < n && vals[below] <= opt.cutoff) ++below;
    int keep = std::min(n, std::max(opt.nev, std::isfinite(opt.cutoff) ? below : 0));
    EigenPairs p;
    p.values = vals.head(keep);
    p.vectors = vecs.leftCols(keep);
    p.residuals = res.head(keep);
    return p;
}

// Orthonormalise the columns of W against V (first m columns) and among themselves.
// Columns that collapse are replaced with fresh pseudo-random directions.
void orthonormalize(const Eigen::MatrixXcd& V, int m, Eigen::MatrixXcd& W, PhiloxStream& rng) {
    const Eigen::Index n = W.rows();
    for (Eigen::Index c = 0; c < W.cols(); ++c) {
        for (int attempt = 0; attempt < 4; ++attempt) {
            double before = W.col(c).norm();
            for (int pass = 0; pass < 2; ++pass) {
                if (m > 0) W.col(c) -= V.leftCols(m) * (V.leftCols(m).adjoint() * W.col(c));
                if (c > 0) W.col(c) -= W.leftCols(c) * (W.leftCols(c).adjoint() * W.col(c));
            }
            double after = W.col(c).norm();
            if (after > 1e-10 * std::max(before, 1e-300)) {
                W.col(c) /= after;
                break;
            }
            for (Eigen::Index i = 0; i < n; ++i) W(i, c) = cplx(rng.normal(), rng.normal());
        }
    }
}

}  // namespace

EigenPairs lowest_eigenpairs_dense(const CSparse& A, const LanczosOptions& opt) {
    Eigen::MatrixXcd D(A);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(D);
    if (es.info() != Eigen::Success) throw EigenError("dense Hermitian eigensolver failed", NAN);
    Eigen::VectorXd res(D.rows());
    for (Eigen::Index j = 0; j < D.rows(); ++j)
        res[j] = (D * es.eigenvectors().col(j) - es.eigenvalues()[j] * es.eigenvectors().col(j)).norm();
    EigenPairs p = select(es.eigenvalues(), es.eigenvectors(), res, opt);
    p.iterations = 1;
    return p;
}

EigenPairs lowest_eigenpairs(const CSparse& A, const LanczosOptions& opt) {
    const Eigen::Index n = A.rows();
    if (A.cols() != n) throw std::invalid_argument("matrix must be square");
    if (n <= opt.dense_below) return lowest_eigenpairs_dense(A, opt);

    CSparse S = A;
    for (Eigen::Index i = 0; i < n; ++i) S.coeffRef(i, i) -= opt.shift;
    Eigen::SimplicialLDLT<CSparse> solver(S);
    if (solver.info() != Eigen::Success) throw EigenError("factorisation of the shifted matrix failed", NAN);

    const int b = opt.block;
    const int max_dim = static_cast<int>(std::min<Eigen::Index>(opt.max_dim, n));
    PhiloxStream rng(0x5eed, 7);
    Eigen::MatrixXcd start(n, b);
    start.col(0).setOnes();
    for (int c = 1; c < b; ++c)
        for (Eigen::Index i = 0; i < n; ++i) start(i, c) = cplx(rng.normal(), rng.normal());

    double last_res = INFINITY;
    int iterations = 0;
    Eigen::MatrixXcd V(n, max_dim);
    Eigen::MatrixXcd AV(n, max_dim);
    for (int restart = 0; restart <= opt.max_restarts; ++restart) {
        Eigen::MatrixXcd W = start;
        int m = 0;
        orthonormalize(V, 0, W, rng);
        while (m + W.cols() <= max_dim) {
            const int nb = static_cast<int>(W.cols());
            V.middleCols(m, nb) = W;
            AV.middleCols(m, nb) = A * W;
            m += nb;
            ++iterations;

            bool full = m + b > max_dim;
            if ((m >= std::max(2 * b, 2 * opt.nev) && (m / b) % 2 == 0) || full) {
                Eigen::MatrixXcd H = V.leftCols(m).adjoint() * AV.leftCols(m);
                H = 0.5 * (H + H.adjoint()).eval();
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
                Eigen::MatrixXcd X = V.leftCols(m) * es.eigenvectors();
                Eigen::MatrixXcd R = AV.leftCols(m) * es.eigenvectors() - X * es.eigenvalues().asDiagonal();
                Eigen::VectorXd res = R.colwise().norm().transpose();
                const Eigen::VectorXd& mu = es.eigenvalues();
                int w = wanted(mu, opt);
                bool ok = w < m;  // the Krylov space must extend past what is asked for
                last_res = 0.0;
                for (int j = 0; j < w; ++j) {
                    last_res = std::max(last_res, res[j] / (std::abs(mu[j]) + 1.0));
                    if (!(res[j] <= opt.tol * (std::abs(mu[j]) + 1.0))) ok = false;
                }
                if (ok) {
                    EigenPairs p = select(mu, X, res, opt);
                    p.iterations = iterations;
                    return p;
                }
                if (full) {
                    // restart from the lowest Ritz vectors
                    int keep = std::max(b, std::min(w + 1, max_dim / 2));
                    start = X.leftCols(std::min<Eigen::Index>(keep, m));
                    break;
                }
            }
            const int nz = std::min(nb, b);
            W.resize(n, nz);
            for (int c = 0; c < nz; ++c) W.col(c) = solver.solve(V.col(m - nz + c));
            orthonormalize(V, m, W, rng);
        }
    }
    throw EigenError("block Lanczos did not converge", last_res);
}

}  // namespace coverlab
