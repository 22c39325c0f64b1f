#include <gtest/gtest.h>

#include "coverlab/config.hpp"

using namespace coverlab;

TEST(Config, EmptyObjectGivesDefaults) {
    RunConfig c = parse_config("{}");
    EXPECT_EQ(c.domain.holes.size(), 1u);
    EXPECT_DOUBLE_EQ(c.domain.outer.radius, 2.0);
    EXPECT_DOUBLE_EQ(c.h, 0.02);
    EXPECT_DOUBLE_EQ(c.sim.dt, 1e-3);
    EXPECT_EQ(c.sim.n_traj, 5000);
    EXPECT_FALSE(c.sim.start.has_value());
    EXPECT_EQ(config_hash(c), config_hash(default_config()));
}

TEST(Config, ParsesEverySection) {
    RunConfig c = parse_config(R"({
        // two holes, one Dirichlet
        "name": "pair",
        "domain": {"outer": {"center": [0, 0], "radius": 5},
                   "holes": [{"center": [-2, 0], "radius": 1},
                             {"center": [2, 0], "radius": 1, "bc": "dirichlet"}]},
        "h": 0.05,
        "simulate": {"dt": 0.002, "T": 10, "seed": 7, "n_traj": 20, "start": [0, 3],
                     "tracker": "angle", "checkpoints": [5, 10], "theta0": 0},
        "verify": {"drift_z": 4, "diag_rel": 0.2, "offdiag_frac": 0.2, "p_min": 0.001, "qv_rel": 0.1},
        "spectrum": {"ts": [0, 0.5], "form": 1},
        "hessian": {"t": 0.05, "form": 1},
        "heatkernel": {"ts": [20], "x": [0, 3], "y": [0, -3], "sheets": [0, 1], "n_quad": 32,
                       "profile_t": 50, "consistency_t": 20}
    })");
    EXPECT_EQ(c.name, "pair");
    ASSERT_EQ(c.domain.holes.size(), 2u);
    EXPECT_EQ(c.domain.holes[1].bc, BoundaryCondition::dirichlet);
    EXPECT_EQ(c.domain.holes[0].bc, BoundaryCondition::neumann);
    EXPECT_EQ(c.sim.base_seed, 7u);
    ASSERT_TRUE(c.sim.start.has_value());
    EXPECT_DOUBLE_EQ(c.sim.start->y, 3.0);
    EXPECT_EQ(c.sim.tracker, Tracker::angle);
    EXPECT_EQ(c.sim.checkpoints.size(), 2u);
    EXPECT_DOUBLE_EQ(c.sim.theta0, 0.0);
    EXPECT_DOUBLE_EQ(c.clt.p_min, 0.001);
    EXPECT_DOUBLE_EQ(c.qv_tol, 0.1);
    EXPECT_EQ(c.spectrum.form, 1);
    EXPECT_DOUBLE_EQ(c.hessian.t, 0.05);
    EXPECT_EQ(c.heatkernel.n_quad, 32);
    EXPECT_DOUBLE_EQ(c.heatkernel.y.y, -3.0);
}

TEST(Config, UnknownKeysAreErrors) {
    EXPECT_THROW(parse_config(R"({"simulate": {"steps": 10}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"colour": "red"})"), ConfigError);
}

TEST(Config, BadValuesAreErrors) {
    EXPECT_THROW(parse_config("{not json"), ConfigError);
    EXPECT_THROW(parse_config(R"({"h": "fine"})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"h": -1})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"simulate": {"start": "centre"}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"domain": {"outer": {"center": [0, 0], "radius": 1},
                                             "holes": [{"center": [0, 0], "radius": 2}]}})"),
                 ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, HashIsStableAndSensitive) {
    RunConfig a = parse_config(R"({"h": 0.05, "name": "x"})");
    RunConfig b = parse_config(R"({"name": "x", "h": 0.05})");
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
    b.sim.base_seed += 1;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(canonical_json(parse_config(canonical_json(a))), canonical_json(a));
}

TEST(Config, Fnv1aKnownValues) {
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ull);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cull);
}
