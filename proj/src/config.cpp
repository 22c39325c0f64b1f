#include "coverlab/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace coverlab {

using nlohmann::json;

RunConfig default_config() {
    RunConfig c;
    c.name = "annulus";
    c.domain.outer = {{0.0, 0.0}, 2.0, BoundaryCondition::neumann};
    c.domain.holes = {{{0.0, 0.0}, 1.0, BoundaryCondition::neumann}};
    return c;
}

namespace {

Point read_point(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2) throw ConfigError(std::string(what) + " must be [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

BoundaryCondition read_bc(const json& j) {
    std::string s = j.get<std::string>();
    if (s == "neumann") return BoundaryCondition::neumann;
    if (s == "dirichlet") return BoundaryCondition::dirichlet;
    throw ConfigError("unknown boundary condition '" + s + "'");
}

Circle read_circle(const json& j) {
    Circle c;
    c.center = read_point(j.at("center"), "center");
    c.radius = j.at("radius").get<double>();
    if (j.contains("bc")) c.bc = read_bc(j["bc"]);
    return c;
}

json write_circle(const Circle& c) {
    return {{"center", {c.center.x, c.center.y}},
            {"radius", c.radius},
            {"bc", c.bc == BoundaryCondition::neumann ? "neumann" : "dirichlet"}};
}

void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const auto& a : allowed) ok = ok || a == it.key();
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

Tracker read_tracker(const std::string& s) {
    if (s == "angle") return Tracker::angle;
    if (s == "stratonovich") return Tracker::stratonovich;
    if (s == "both") return Tracker::both;
    throw ConfigError("unknown tracker '" + s + "'");
}

const char* tracker_name(Tracker t) {
    switch (t) {
        case Tracker::angle: return "angle";
        case Tracker::stratonovich: return "stratonovich";
        default: return "both";
    }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig c = default_config();
    json j;
    try {
        j = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        check_keys(j, {"name", "domain", "h", "simulate", "verify", "spectrum", "hessian", "heatkernel"}, "config");
        if (j.contains("name")) c.name = j["name"].get<std::string>();
        if (j.contains("domain")) {
            const json& d = j["domain"];
            check_keys(d, {"outer", "holes"}, "domain");
            c.domain.outer = read_circle(d.at("outer"));
            c.domain.holes.clear();
            for (const auto& hj : d.at("holes")) c.domain.holes.push_back(read_circle(hj));
        }
        if (j.contains("h")) c.h = j["h"].get<double>();
        if (j.contains("simulate")) {
            const json& s = j["simulate"];
            check_keys(s, {"dt", "T", "seed", "n_traj", "start", "tracker", "checkpoints", "theta0"}, "simulate");
            if (s.contains("dt")) c.sim.dt = s["dt"].get<double>();
            if (s.contains("T")) c.sim.T = s["T"].get<double>();
            if (s.contains("seed")) c.sim.base_seed = s["seed"].get<std::uint64_t>();
            if (s.contains("n_traj")) c.sim.n_traj = s["n_traj"].get<int>();
            if (s.contains("start")) {
                if (s["start"].is_string()) {
                    if (s["start"].get<std::string>() != "uniform") throw ConfigError("start must be \"uniform\" or [x, y]");
                    c.sim.start.reset();
                } else {
                    c.sim.start = read_point(s["start"], "start");
                }
            }
            if (s.contains("tracker")) c.sim.tracker = read_tracker(s["tracker"].get<std::string>());
            if (s.contains("checkpoints")) c.sim.checkpoints = s["checkpoints"].get<std::vector<double>>();
            if (s.contains("theta0")) c.sim.theta0 = s["theta0"].get<double>();
        }
        if (j.contains("verify")) {
            const json& v = j["verify"];
            check_keys(v, {"drift_z", "diag_rel", "offdiag_frac", "p_min", "qv_rel"}, "verify");
            if (v.contains("drift_z")) c.clt.drift_z = v["drift_z"].get<double>();
            if (v.contains("diag_rel")) c.clt.diag_rel = v["diag_rel"].get<double>();
            if (v.contains("offdiag_frac")) c.clt.offdiag_frac = v["offdiag_frac"].get<double>();
            if (v.contains("p_min")) c.clt.p_min = v["p_min"].get<double>();
            if (v.contains("qv_rel")) c.qv_tol = v["qv_rel"].get<double>();
        }
        if (j.contains("spectrum")) {
            const json& s = j["spectrum"];
            check_keys(s, {"ts", "form"}, "spectrum");
            if (s.contains("ts")) c.spectrum.ts = s["ts"].get<std::vector<double>>();
            if (s.contains("form")) c.spectrum.form = s["form"].get<int>();
        }
        if (j.contains("hessian")) {
            const json& s = j["hessian"];
            check_keys(s, {"t", "form"}, "hessian");
            if (s.contains("t")) c.hessian.t = s["t"].get<double>();
            if (s.contains("form")) c.hessian.form = s["form"].get<int>();
        }
        if (j.contains("heatkernel")) {
            const json& s = j["heatkernel"];
            check_keys(s, {"ts", "x", "y", "sheets", "n_quad", "profile_t", "consistency_t"}, "heatkernel");
            if (s.contains("ts")) c.heatkernel.ts = s["ts"].get<std::vector<double>>();
            if (s.contains("x")) c.heatkernel.x = read_point(s["x"], "x");
            if (s.contains("y")) c.heatkernel.y = read_point(s["y"], "y");
            if (s.contains("sheets")) c.heatkernel.sheets = s["sheets"].get<std::vector<int>>();
            if (s.contains("n_quad")) c.heatkernel.n_quad = s["n_quad"].get<int>();
            if (s.contains("profile_t")) c.heatkernel.profile_t = s["profile_t"].get<double>();
            if (s.contains("consistency_t")) c.heatkernel.consistency_t = s["consistency_t"].get<double>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    try {
        build_domain(c.domain);
    } catch (const GeometryError& e) {
        throw ConfigError(std::string("invalid domain: ") + e.what());
    }
    if (!(c.h > 0.0)) throw ConfigError("h must be positive");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string canonical_json(const RunConfig& c) {
    json j;
    j["name"] = c.name;
    json holes = json::array();
    for (const auto& hc : c.domain.holes) holes.push_back(write_circle(hc));
    j["domain"] = {{"outer", write_circle(c.domain.outer)}, {"holes", holes}};
    j["h"] = c.h;
    json sim = {{"dt", c.sim.dt},
                {"T", c.sim.T},
                {"seed", c.sim.base_seed},
                {"n_traj", c.sim.n_traj},
                {"tracker", tracker_name(c.sim.tracker)},
                {"checkpoints", c.sim.checkpoints},
                {"theta0", c.sim.theta0}};
    if (c.sim.start) sim["start"] = {c.sim.start->x, c.sim.start->y};
    else sim["start"] = "uniform";
    j["simulate"] = sim;
    j["verify"] = {{"drift_z", c.clt.drift_z},
                   {"diag_rel", c.clt.diag_rel},
                   {"offdiag_frac", c.clt.offdiag_frac},
                   {"p_min", c.clt.p_min},
                   {"qv_rel", c.qv_tol}};
    j["spectrum"] = {{"ts", c.spectrum.ts}, {"form", c.spectrum.form}};
    j["hessian"] = {{"t", c.hessian.t}, {"form", c.hessian.form}};
    j["heatkernel"] = {{"ts", c.heatkernel.ts},
                       {"x", {c.heatkernel.x.x, c.heatkernel.x.y}},
                       {"y", {c.heatkernel.y.x, c.heatkernel.y.y}},
                       {"sheets", c.heatkernel.sheets},
                       {"n_quad", c.heatkernel.n_quad},
                       {"profile_t", c.heatkernel.profile_t},
                       {"consistency_t", c.heatkernel.consistency_t}};
    return j.dump();
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string config_hash(const RunConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical_json(cfg))));
    return buf;
}

}  // namespace coverlab
