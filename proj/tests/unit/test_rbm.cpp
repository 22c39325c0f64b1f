#include <cmath>
#include <memory>
#include <sstream>

#include <gtest/gtest.h>

#include "coverlab/rbm.hpp"

using namespace coverlab;

namespace {

struct AnnulusFixture : ::testing::Test {
    static void SetUpTestSuite() {
        DomainSpec s;
        s.outer = {{0, 0}, 2.0};
        s.holes = {{{0, 0}, 1.0}};
        domain = std::make_unique<PlanarDomain>(build_domain(s));
        basis = std::make_unique<FormBasis>(dual_basis(*domain, std::make_shared<const Grid>(*domain, 0.05)));
    }
    static void TearDownTestSuite() {
        basis.reset();
        domain.reset();
    }

    static SimConfig small(int n = 16, double T = 2.0) {
        SimConfig c;
        c.dt = 1e-3;
        c.T = T;
        c.n_traj = n;
        c.base_seed = 99;
        return c;
    }

    static inline std::unique_ptr<PlanarDomain> domain;
    static inline std::unique_ptr<FormBasis> basis;
};

WindingState zero_state(int k) {
    return {Eigen::VectorXd::Zero(k), Eigen::VectorXi::Zero(k), Eigen::VectorXd::Zero(k)};
}

}  // namespace

TEST(WindingNumber, IsTheFloor) {
    Eigen::VectorXd th(4);
    th << -0.5, 0.0, 1.999, -2.0;
    Eigen::VectorXi r = winding_number(th);
    EXPECT_EQ(r[0], -1);
    EXPECT_EQ(r[1], 0);
    EXPECT_EQ(r[2], 1);
    EXPECT_EQ(r[3], -2);
}

TEST_F(AnnulusFixture, StepInsideMovesFreely) {
    Point p = step(*domain, {1.5, 0.0}, {0.01, -0.02});
    EXPECT_DOUBLE_EQ(p.x, 1.51);
    EXPECT_DOUBLE_EQ(p.y, -0.02);
}

TEST_F(AnnulusFixture, StepReflectsAtOuterAndHole) {
    Point p = step(*domain, {1.95, 0.0}, {0.1, 0.0});
    EXPECT_NEAR(p.x, 1.95, 1e-14);
    Point q = step(*domain, {0.0, 1.03}, {0.0, -0.05});
    EXPECT_NEAR(q.y, 1.02, 1e-14);
    EXPECT_TRUE(domain->contains(p));
    EXPECT_TRUE(domain->contains(q));
}

TEST_F(AnnulusFixture, QuarterArcAddsAQuarterTurn) {
    WindingState s = zero_state(1);
    const int segs = 200;
    Point prev{1.5, 0.0};
    for (int i = 1; i <= segs; ++i) {
        double a = 0.5 * M_PI * i / segs;
        Point next{1.5 * std::cos(a), 1.5 * std::sin(a)};
        s = track_winding(prev, next, *basis, s);
        prev = next;
    }
    EXPECT_NEAR(s.theta[0], 0.25, 1e-6);
    EXPECT_NEAR(s.theta_strat[0], 0.25, 1e-4);
    EXPECT_EQ(s.rho[0], 0);
}

TEST_F(AnnulusFixture, ClockwiseLoopWindsMinusOne) {
    WindingState s = zero_state(1);
    Loop l = Loop::circle({0, 0}, 1.3, 400, false);
    for (std::size_t i = 0; i < l.vertices.size(); ++i)
        s = track_winding(l.vertices[i], l.vertices[(i + 1) % l.vertices.size()], *basis, s);
    EXPECT_NEAR(s.theta[0], -1.0, 1e-6);
    EXPECT_EQ(s.rho[0], -1);
}

TEST_F(AnnulusFixture, ContractibleLoopLeavesThetaUnchanged) {
    WindingState s = zero_state(1);
    s.theta[0] = 0.3;
    Loop l = Loop::circle({1.5, 0.2}, 0.3, 100);
    for (std::size_t i = 0; i < l.vertices.size(); ++i)
        s = track_winding(l.vertices[i], l.vertices[(i + 1) % l.vertices.size()], *basis, s);
    EXPECT_NEAR(s.theta[0], 0.3, 1e-9);
}

TEST_F(AnnulusFixture, SegmentThroughHoleIsRejected) {
    EXPECT_THROW(track_winding({1.1, 0.0}, {-1.1, 0.0}, *basis, zero_state(1)), StepRejection);
}

TEST_F(AnnulusFixture, ValidateRejectsBadSteps) {
    SimConfig c = small();
    c.dt = 0.02;  // above r_min^2 / 100
    EXPECT_THROW(validate(c, *domain), SimulationError);
    c = small();
    c.T = 1.0005;
    EXPECT_THROW(validate(c, *domain), SimulationError);
    c = small();
    c.checkpoints = {0.5, 0.00025};
    EXPECT_THROW(validate(c, *domain), SimulationError);
    c = small();
    c.start = Point{0.5, 0.0};
    EXPECT_THROW(validate(c, *domain), SimulationError);
    EXPECT_NO_THROW(validate(small(), *domain));
}

TEST_F(AnnulusFixture, ZeroHorizonKeepsInitialTheta) {
    SimConfig c = small(8, 0.0);
    c.theta0 = 0.0;
    EnsembleResult r = simulate(*domain, *basis, c);
    EXPECT_EQ(r.theta.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(r.rho.cwiseAbs().maxCoeff(), 0);
    EXPECT_EQ(r.qv.cwiseAbs().maxCoeff(), 0.0);
}

TEST_F(AnnulusFixture, SameSeedSameEnsemble) {
    EnsembleResult a = simulate(*domain, *basis, small()), b = simulate(*domain, *basis, small());
    EXPECT_EQ(a.theta, b.theta);
    EXPECT_EQ(a.qv, b.qv);
    SimConfig c = small();
    c.base_seed = 100;
    EXPECT_NE(simulate(*domain, *basis, c).theta, a.theta);
}

TEST_F(AnnulusFixture, SerialMatchesParallelBitwise) {
    SimConfig c = small(24);
    c.checkpoints = {0.5, 2.0};
    EnsembleResult p = simulate(*domain, *basis, c), s = simulate_serial(*domain, *basis, c);
    EXPECT_EQ(p.theta, s.theta);
    EXPECT_EQ(p.theta_strat, s.theta_strat);
    EXPECT_EQ(p.rho, s.rho);
    EXPECT_EQ(p.qv, s.qv);
    ASSERT_EQ(p.checkpoints.size(), 2u);
    EXPECT_EQ(p.checkpoints[0].theta, s.checkpoints[0].theta);
}

TEST_F(AnnulusFixture, TrajectoryIgnoresEnsembleSize) {
    EnsembleResult a = simulate(*domain, *basis, small(4)), b = simulate(*domain, *basis, small(12));
    EXPECT_EQ(a.theta.row(3), b.theta.row(3));
}

TEST_F(AnnulusFixture, TrackersAgreeAndStayInside) {
    SimConfig c = small(32, 4.0);
    EnsembleResult r = simulate(*domain, *basis, c);
    // both integrals converge to the same Stratonovich limit
    EXPECT_LT((r.theta - r.theta_strat).cwiseAbs().maxCoeff(), 0.02);
    EXPECT_EQ(r.rejection_rate, 0.0);
    for (int i = 0; i < r.n_traj(); ++i) EXPECT_EQ(r.rho(i, 0), static_cast<int>(std::floor(r.theta(i, 0))));
}

TEST_F(AnnulusFixture, QuadraticVariationRateIsNearSigma) {
    // uniform start is stationary, so E[qv]/T is the closed-form annulus value at any T
    EnsembleResult r = simulate(*domain, *basis, small(256, 4.0));
    double rate = r.qv.col(0).mean() / r.T;
    EXPECT_NEAR(rate / (std::log(2.0) / (6 * M_PI * M_PI)), 1.0, 0.05);
}

TEST_F(AnnulusFixture, EnsembleCsvRoundTrips) {
    SimConfig c = small(5, 1.0);
    EnsembleResult r = simulate(*domain, *basis, c);
    std::stringstream ss;
    write_ensemble_csv(ss, r);
    EnsembleResult back = read_ensemble_csv(ss);
    EXPECT_EQ(back.k, 1);
    EXPECT_EQ(back.T, r.T);
    EXPECT_EQ(back.theta, r.theta);
    EXPECT_EQ(back.rho, r.rho);
    EXPECT_EQ(back.qv, r.qv);
}
