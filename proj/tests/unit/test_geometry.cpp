#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "coverlab/geometry.hpp"

using namespace coverlab;

namespace {

PlanarDomain annulus(double r1 = 1.0, double r2 = 2.0) {
    DomainSpec s;
    s.outer = {{0, 0}, r2};
    s.holes = {{{0, 0}, r1}};
    return build_domain(s);
}

PlanarDomain two_holes() {
    DomainSpec s;
    s.outer = {{0, 0}, 5.0};
    s.holes = {{{-2, 0}, 1.0}, {{2, 0}, 1.0}};
    return build_domain(s);
}

}  // namespace

TEST(BuildDomain, RankCountsHoles) {
    EXPECT_EQ(two_holes().rank(), 2);
    EXPECT_EQ(annulus().rank(), 1);
}

TEST(BuildDomain, RejectsOverlappingHoles) {
    DomainSpec s;
    s.outer = {{0, 0}, 5.0};
    s.holes = {{{0, 0}, 1.0}, {{1, 0}, 1.0}};
    EXPECT_THROW(build_domain(s), GeometryError);
}

TEST(BuildDomain, RejectsHoleOutsideOuter) {
    DomainSpec s;
    s.outer = {{0, 0}, 2.0};
    s.holes = {{{1.8, 0}, 0.5}};
    EXPECT_THROW(build_domain(s), GeometryError);
}

TEST(Contains, Annulus) {
    PlanarDomain d = annulus();
    EXPECT_TRUE(contains(d, {1.5, 0}));
    EXPECT_FALSE(contains(d, {0.5, 0}));
    EXPECT_FALSE(contains(d, {3, 0}));
    EXPECT_FALSE(contains(d, {2, 0}));  // strict
    EXPECT_FALSE(contains(d, {1, 0}));
}

TEST(BoundaryProjection, MirrorsAcrossOuterCircle) {
    Reflection r = boundary_projection(annulus(), {2.1, 0});
    EXPECT_NEAR(r.point.x, 1.9, 1e-14);
    EXPECT_NEAR(r.point.y, 0.0, 1e-14);
    EXPECT_NEAR(r.normal.x, 1.0, 1e-14);
    EXPECT_EQ(r.component, 0);
}

TEST(BoundaryProjection, MirrorsAcrossHoleWithNormalIntoHole) {
    Reflection r = boundary_projection(annulus(), {0.95, 0});
    EXPECT_NEAR(r.point.x, 1.05, 1e-14);
    EXPECT_NEAR(r.normal.x, -1.0, 1e-14);
    EXPECT_EQ(r.component, 1);
}

TEST(BoundaryProjection, DeepExcursionIsAnError) {
    EXPECT_THROW(boundary_projection(annulus(), {4.0, 0}), ReflectionError);
    EXPECT_THROW(boundary_projection(annulus(), {1.5, 0}), ReflectionError);
}

TEST(Discretize, AnnulusAreaWithinTwoPercent) {
    PlanarDomain d = annulus();
    Grid g = discretize(d, 0.02);
    EXPECT_NEAR(g.area_estimate() / (3.0 * M_PI), 1.0, 0.02);
    EXPECT_NEAR(d.area(), 3.0 * M_PI, 1e-12);
}

TEST(Discretize, CoarseSpacingIsAResolutionError) {
    EXPECT_THROW(discretize(annulus(), 1.5), ResolutionError);
    EXPECT_THROW(discretize(annulus(), 0.25), ResolutionError);  // min feature 1, needs h < 1/4
    EXPECT_NO_THROW(discretize(annulus(), 0.24));
}

TEST(Discretize, RefinementChangesAreaByLessThanOnePercent) {
    PlanarDomain d = annulus();
    double a1 = discretize(d, 0.02).area_estimate();
    double a2 = discretize(d, 0.01).area_estimate();
    EXPECT_LT(std::abs(a1 - a2) / a2, 0.01);
}

TEST(Discretize, AreaErrorIsAtLeastFirstOrder) {
    PlanarDomain d = annulus();
    std::vector<double> lh, le;
    for (double h : {0.08, 0.04, 0.02}) {
        double err = std::abs(discretize(d, h).area_estimate() - d.area()) / d.area();
        lh.push_back(std::log(h));
        le.push_back(std::log(err));
    }
    double mx = (lh[0] + lh[1] + lh[2]) / 3, my = (le[0] + le[1] + le[2]) / 3, sxy = 0, sxx = 0;
    for (int i = 0; i < 3; ++i) {
        sxy += (lh[i] - mx) * (le[i] - my);
        sxx += (lh[i] - mx) * (lh[i] - mx);
    }
    EXPECT_GE(sxy / sxx, 1.0);
}

TEST(Discretize, InteriorNodesHaveFourActiveNeighbours) {
    Grid g = discretize(two_holes(), 0.1);
    std::size_t interior = 0;
    for (int a = 0; a < g.num_active(); ++a) {
        int missing = 0;
        for (int d = 0; d < Grid::kDirs; ++d) missing += g.neighbor(a, d) < 0;
        if (g.kind(a) == NodeKind::interior) {
            ++interior;
            EXPECT_EQ(missing, 0);
        } else {
            EXPECT_GT(missing, 0);
            EXPECT_NEAR(norm(g.normal(a)), 1.0, 1e-12);
        }
    }
    EXPECT_EQ(interior, g.count(NodeKind::interior));
    EXPECT_GT(interior, 0u);
}

TEST(Discretize, BoundaryNodesTakeTheCrossedCircleCondition) {
    DomainSpec s;
    s.outer = {{0, 0}, 2.0, BoundaryCondition::dirichlet};
    s.holes = {{{0, 0}, 1.0, BoundaryCondition::neumann}};
    Grid g = discretize(build_domain(s), 0.05);
    EXPECT_GT(g.count(NodeKind::dirichlet_boundary), 0u);
    EXPECT_GT(g.count(NodeKind::neumann_boundary), 0u);
    for (int a = 0; a < g.num_active(); ++a) {
        double r = norm(g.node(a));
        if (g.kind(a) == NodeKind::dirichlet_boundary) {
            EXPECT_GT(r, 1.5);
        }
        if (g.kind(a) == NodeKind::neumann_boundary) {
            EXPECT_LT(r, 1.5);
        }
    }
}

TEST(Discretize, ActiveNodesStayActiveUnderRefinement) {
    PlanarDomain d = two_holes();
    Grid coarse = discretize(d, 0.1), fine = discretize(d, 0.05);
    for (int a = 0; a < coarse.num_active(); ++a) {
        int b = fine.nearest_active(coarse.node(a));
        ASSERT_GE(b, 0);
        EXPECT_NEAR(norm(fine.node(b) - coarse.node(a)), 0.0, 1e-9);
    }
}

TEST(Discretize, NodesFallOnTheHoleCentreLattice) {
    Grid g = discretize(annulus(), 0.02);
    int a = g.nearest_active({1.5, 0.0});
    EXPECT_NEAR(g.node(a).x, 1.5, 1e-12);
    EXPECT_NEAR(g.node(a).y, 0.0, 1e-12);
}
