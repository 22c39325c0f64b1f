#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coverlab/config.hpp"
#include "coverlab/harmonic_forms.hpp"
#include "coverlab/rbm.hpp"

namespace coverlab {

struct Check {
    std::string name;
    double value = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string provenance;  // "closed form", "computed", "identity"
};

struct RunReport {
    std::vector<Check> checks;
    std::vector<std::string> files;
    std::vector<std::string> warnings;
    std::vector<std::string> notes;

    bool pass() const;
    std::vector<std::string> failing() const;
};

/// Shared state for one configuration: geometry, basis and the last ensemble.
class Session {
public:
    Session(RunConfig cfg, std::filesystem::path out_dir);

    const RunConfig& config() const { return cfg_; }
    const PlanarDomain& domain() const { return domain_; }
    std::shared_ptr<const Grid> grid();
    const FormBasis& basis();
    const std::filesystem::path& out_dir() const { return out_; }

    void forms(RunReport& r);
    void sigma(RunReport& r);
    void simulate(RunReport& r);
    /// Uses the ensemble from simulate() if there is one, else reads `ensemble_csv`.
    void verify(RunReport& r, const std::optional<std::filesystem::path>& ensemble_csv = std::nullopt);
    void spectrum(RunReport& r);
    void hessian(RunReport& r);
    void heatkernel(RunReport& r);
    void all(RunReport& r);

private:
    std::filesystem::path file(const std::string& name, RunReport& r) const;
    /// Closed-form annulus radii when the domain is a concentric all-Neumann annulus.
    std::optional<std::pair<double, double>> neumann_annulus() const;

    RunConfig cfg_;
    PlanarDomain domain_;
    std::filesystem::path out_;
    std::shared_ptr<const Grid> grid_;
    std::optional<FormBasis> basis_;
    std::optional<EnsembleResult> ensemble_;
};

/// Manifest JSON: config hash, seed, timing, files and every check.
std::string manifest_json(const RunConfig& cfg, const std::string& command, const RunReport& r, double wall_seconds);

}  // namespace coverlab
