#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "coverlab/geometry.hpp"
#include "coverlab/rbm.hpp"
#include "coverlab/winding_stats.hpp"

namespace coverlab {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SpectrumSection {
    std::vector<double> ts{0.0, 0.1, -0.1, 0.5, 0.9, 1.0};
    int form = 0;   // which dual form is twisted
};

struct HessianSection {
    double t = 0.1;
    int form = 0;
};

struct HeatKernelSection {
    std::vector<double> ts{10.0, 40.0};
    Point x{1.5, 0.0};
    Point y{1.5, 0.0};
    std::vector<int> sheets{0, 1, 2};
    int n_quad = 64;
    double profile_t = 100.0;
    double consistency_t = 10.0;
};

struct RunConfig {
    std::string name = "run";
    DomainSpec domain;
    double h = 0.02;
    SimConfig sim;
    CltTolerances clt;
    double qv_tol = 0.05;
    SpectrumSection spectrum;
    HessianSection hessian;
    HeatKernelSection heatkernel;
};

/// Annulus (1, 2), all Neumann, h = 0.02, dt = 1e-3, T = 200, n = 5000.
RunConfig default_config();

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
/// Canonical JSON of the fully defaulted config; hashed for the output directory.
std::string canonical_json(const RunConfig& cfg);
std::uint64_t fnv1a(const std::string& s);
std::string config_hash(const RunConfig& cfg);

}  // namespace coverlab
