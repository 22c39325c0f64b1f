#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "coverlab/sparse_eigen.hpp"

using namespace coverlab;

namespace {

// Dirichlet Laplacian on an m x m square grid with unit spacing, optional random edge phases.
CSparse square_laplacian(int m, bool phases, unsigned seed = 1) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 2 * M_PI);
    std::vector<Eigen::Triplet<cplx>> trip;
    auto id = [m](int i, int j) { return j * m + i; };
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            trip.emplace_back(id(i, j), id(i, j), 4.0);
            if (i + 1 < m) {
                cplx w = phases ? std::polar(1.0, u(gen)) : cplx(1.0);
                trip.emplace_back(id(i, j), id(i + 1, j), -w);
                trip.emplace_back(id(i + 1, j), id(i, j), -std::conj(w));
            }
            if (j + 1 < m) {
                cplx w = phases ? std::polar(1.0, u(gen)) : cplx(1.0);
                trip.emplace_back(id(i, j), id(i, j + 1), -w);
                trip.emplace_back(id(i, j + 1), id(i, j), -std::conj(w));
            }
        }
    CSparse A(m * m, m * m);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

double exact_square(int m, int p, int q) {
    double a = std::sin(p * M_PI / (2.0 * (m + 1))), b = std::sin(q * M_PI / (2.0 * (m + 1)));
    return 4.0 * (a * a + b * b);
}

}  // namespace

TEST(Lanczos, MatchesClosedFormWithDegeneratePairs) {
    const int m = 30;  // 900 unknowns, above the dense threshold
    LanczosOptions o;
    o.nev = 6;
    EigenPairs p = lowest_eigenpairs(square_laplacian(m, false), o);
    ASSERT_GE(p.values.size(), 6);
    std::vector<double> ex{exact_square(m, 1, 1), exact_square(m, 1, 2), exact_square(m, 2, 1),
                           exact_square(m, 2, 2), exact_square(m, 1, 3), exact_square(m, 3, 1)};
    std::sort(ex.begin(), ex.end());
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(p.values[i], ex[i], 1e-9) << i;
}

TEST(Lanczos, AgreesWithDenseOnMagneticLaplacian) {
    CSparse A = square_laplacian(26, true, 3);
    LanczosOptions o;
    o.nev = 8;
    EigenPairs s = lowest_eigenpairs(A, o), d = lowest_eigenpairs_dense(A, o);
    ASSERT_GE(s.values.size(), 8);
    for (int i = 0; i < 8; ++i) EXPECT_NEAR(s.values[i], d.values[i], 1e-8 * (1 + d.values[i]));
    for (int i = 0; i < s.values.size(); ++i) {
        Eigen::VectorXcd x = s.vectors.col(i);
        EXPECT_NEAR(x.norm(), 1.0, 1e-10);
        EXPECT_LE((A * x - s.values[i] * x).norm(), 1e-8 * (1 + std::abs(s.values[i])));
        EXPECT_NEAR(s.residuals[i], (A * x - s.values[i] * x).norm(), 1e-12);
    }
}

TEST(Lanczos, CutoffReturnsEveryPairBelowIt) {
    CSparse A = square_laplacian(30, true, 4);
    EigenPairs d = lowest_eigenpairs_dense(A, {.nev = 40});
    double cutoff = 0.5 * (d.values[11] + d.values[12]);
    LanczosOptions o;
    o.nev = 1;
    o.cutoff = cutoff;
    EigenPairs s = lowest_eigenpairs(A, o);
    int below = 0;
    for (int i = 0; i < s.values.size(); ++i) below += s.values[i] < cutoff;
    EXPECT_EQ(below, 12);
    for (int i = 0; i < 12; ++i) EXPECT_NEAR(s.values[i], d.values[i], 1e-8);
}

TEST(Lanczos, SmallProblemsUseTheDenseSolver) {
    CSparse A = square_laplacian(8, true, 5);
    EigenPairs s = lowest_eigenpairs(A, {.nev = 3}), d = lowest_eigenpairs_dense(A, {.nev = 3});
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(s.values[i], d.values[i], 1e-12);
}

TEST(Lanczos, ValuesAreAscending) {
    EigenPairs s = lowest_eigenpairs(square_laplacian(28, true, 6), {.nev = 10});
    for (int i = 1; i < s.values.size(); ++i) EXPECT_LE(s.values[i - 1], s.values[i]);
}
